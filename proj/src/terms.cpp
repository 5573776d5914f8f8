#include "dynlogit/terms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "dynlogit/error.hpp"
#include "text_util.hpp"

namespace dynlogit {

using json = nlohmann::json;

namespace {

constexpr std::array<const char*, 7> kWeekdays = {"Monday", "Tuesday", "Wednesday", "Thursday",
                                                  "Friday", "Saturday", "Sunday"};

std::optional<int> weekday_index(const std::string& s) {
    for (int k = 0; k < 7; ++k)
        if (s == kWeekdays[static_cast<std::size_t>(k)]) return k;
    return std::nullopt;
}

const char* target_prefix(Target t) { return t == Target::vertex ? "v:" : "e:"; }

std::string seasonal_attr(const TermParams& p) { return p.attr.empty() ? "day" : p.attr; }

}  // namespace

// -----------------------------------------------------------------------------
// Names
// -----------------------------------------------------------------------------

const char* to_string(TermKind kind) {
    switch (kind) {
        case TermKind::intercept: return "intercept";
        case TermKind::attr_dummy: return "attr_dummy";
        case TermKind::mixing: return "mixing";
        case TermKind::individual_dummy: return "individual_dummy";
        case TermKind::lag_indicator: return "lag_indicator";
        case TermKind::lag_triangle: return "lag_triangle";
        case TermKind::lag_cycle_embed: return "lag_cycle_embed";
        case TermKind::log_size: return "log_size";
        case TermKind::seasonal: return "seasonal";
    }
    return "?";
}

const char* to_string(MixingClass mixing) {
    switch (mixing) {
        case MixingClass::both: return "RR";
        case MixingClass::neither: return "NN";
        case MixingClass::mixed: return "RN";
    }
    return "?";
}

std::optional<TermKind> term_kind_from_string(const std::string& name) {
    for (auto k : {TermKind::intercept, TermKind::attr_dummy, TermKind::mixing, TermKind::individual_dummy,
                   TermKind::lag_indicator, TermKind::lag_triangle, TermKind::lag_cycle_embed, TermKind::log_size,
                   TermKind::seasonal}) {
        if (name == to_string(k)) return k;
    }
    return std::nullopt;
}

const char* to_string(LagPolicy policy) { return policy == LagPolicy::exclude ? "exclude" : "bridge"; }

std::optional<LagPolicy> lag_policy_from_string(const std::string& name) {
    if (name == "exclude") return LagPolicy::exclude;
    if (name == "bridge") return LagPolicy::bridge;
    return std::nullopt;
}

// -----------------------------------------------------------------------------
// TermSpec / ModelSpec
// -----------------------------------------------------------------------------

bool TermSpec::lagged() const noexcept {
    return kind == TermKind::lag_indicator || kind == TermKind::lag_triangle || kind == TermKind::lag_cycle_embed;
}

bool TermSpec::expands() const noexcept {
    switch (kind) {
        case TermKind::mixing: return !params.mixing.has_value();
        case TermKind::individual_dummy: return params.label.empty();
        case TermKind::seasonal: return params.level.empty();
        default: return false;
    }
}

std::string TermSpec::column_name() const {
    std::string n = target_prefix(target);
    const std::string lag_suffix = "lag" + std::to_string(lag);
    switch (kind) {
        case TermKind::intercept: return n + "intercept";
        case TermKind::attr_dummy:
            return n + "attr[" + params.attr + (params.value ? "=" + attr_to_string(*params.value) : "") + "]";
        case TermKind::mixing:
            return n + "mixing[" + params.attr + (params.mixing ? std::string(":") + to_string(*params.mixing) : "") +
                   "]";
        case TermKind::individual_dummy:
            return n + "indiv[" + (params.label.empty() ? "group=" + params.group : params.label) + "]";
        case TermKind::lag_indicator: return n + lag_suffix;
        case TermKind::lag_triangle: return n + "triangles." + lag_suffix;
        case TermKind::lag_cycle_embed: return n + "cycles" + std::to_string(params.max_len) + "." + lag_suffix;
        case TermKind::log_size: return n + "log_size";
        case TermKind::seasonal:
            return n + seasonal_attr(params) + "[" + (params.level.empty() ? "ref=" + params.reference : params.level) +
                   "]";
    }
    return n + "?";
}

void check_term(const TermSpec& term) {
    const std::string name = std::string(target_prefix(term.target)) + to_string(term.kind);
    const bool vertex_ok = term.kind == TermKind::intercept || term.kind == TermKind::attr_dummy ||
                           term.kind == TermKind::individual_dummy || term.kind == TermKind::lag_indicator ||
                           term.kind == TermKind::lag_triangle || term.kind == TermKind::seasonal;
    const bool edge_ok = term.kind == TermKind::intercept || term.kind == TermKind::mixing ||
                         term.kind == TermKind::individual_dummy || term.kind == TermKind::log_size ||
                         term.kind == TermKind::lag_indicator || term.kind == TermKind::lag_cycle_embed ||
                         term.kind == TermKind::seasonal;
    if (term.target == Target::vertex ? !vertex_ok : !edge_ok) {
        throw SpecError(name + ": kind not available for " +
                        (term.target == Target::vertex ? "vertex" : "edge") + " terms");
    }
    if (term.lagged()) {
        if (term.lag < 1) throw SpecError(name + ": lagged terms need lag >= 1");
    } else if (term.lag != 0) {
        throw SpecError(name + ": term takes no lag");
    }
    if (term.kind == TermKind::lag_cycle_embed && (term.params.max_len < 3 || term.params.max_len > 9)) {
        throw SpecError(name + ": max_len must lie in [3, 9]");
    }
    if ((term.kind == TermKind::attr_dummy || term.kind == TermKind::mixing) && term.params.attr.empty()) {
        throw SpecError(name + ": missing params.attr");
    }
    if (term.kind == TermKind::individual_dummy && term.params.label.empty() == term.params.group.empty()) {
        throw SpecError(name + ": give exactly one of params.label or params.group");
    }
}

int ModelSpec::max_lag() const noexcept {
    int k = 0;
    for (const auto* list : {&vertex_terms, &edge_terms})
        for (const auto& t : *list) k = std::max(k, t.lag);
    return k;
}

std::vector<std::string> ModelSpec::column_names() const {
    std::vector<std::string> out;
    for (const auto& t : vertex_terms) out.push_back(t.column_name());
    for (const auto& t : edge_terms) out.push_back(t.column_name());
    return out;
}

bool ModelSpec::expanded() const noexcept {
    for (const auto* list : {&vertex_terms, &edge_terms})
        for (const auto& t : *list)
            if (t.expands()) return false;
    return true;
}

namespace {

TermSpec term_from_json(const json& j, Target target, const std::string& where) {
    if (!j.is_object()) throw SpecError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() != "kind" && it.key() != "lag" && it.key() != "params") {
            throw SpecError(where + ": unknown key '" + it.key() + "'");
        }
    }
    TermSpec term;
    term.target = target;
    auto kit = j.find("kind");
    if (kit == j.end() || !kit->is_string()) throw SpecError(where + ": missing string 'kind'");
    auto kind = term_kind_from_string(kit->get<std::string>());
    if (!kind) throw SpecError(where + ": unknown kind '" + kit->get<std::string>() + "'");
    term.kind = *kind;
    if (auto lit = j.find("lag"); lit != j.end()) {
        if (!lit->is_number_integer()) throw SpecError(where + ".lag: expected an integer");
        term.lag = lit->get<int>();
    } else if (term.lagged()) {
        term.lag = 1;
    }
    if (auto pit = j.find("params"); pit != j.end()) {
        if (!pit->is_object()) throw SpecError(where + ".params: expected an object");
        auto str = [&](const json& v, const std::string& key) {
            if (!v.is_string()) throw SpecError(where + ".params." + key + ": expected a string");
            return v.get<std::string>();
        };
        for (auto it = pit->begin(); it != pit->end(); ++it) {
            const auto& key = it.key();
            const auto& v = it.value();
            if (key == "attr") {
                term.params.attr = str(v, key);
            } else if (key == "value") {
                if (v.is_boolean()) term.params.value = v.get<bool>();
                else if (v.is_number_integer()) term.params.value = v.get<std::int64_t>();
                else if (v.is_number()) term.params.value = v.get<double>();
                else if (v.is_string()) term.params.value = v.get<std::string>();
                else throw SpecError(where + ".params.value: unsupported type");
            } else if (key == "class") {
                auto c = str(v, key);
                if (c == "RR" || c == "both") term.params.mixing = MixingClass::both;
                else if (c == "NN" || c == "neither") term.params.mixing = MixingClass::neither;
                else if (c == "RN" || c == "mixed") term.params.mixing = MixingClass::mixed;
                else throw SpecError(where + ".params.class: expected RR, NN or RN");
            } else if (key == "label") {
                term.params.label = str(v, key);
            } else if (key == "group") {
                term.params.group = str(v, key);
            } else if (key == "level") {
                term.params.level = str(v, key);
            } else if (key == "reference") {
                term.params.reference = str(v, key);
            } else if (key == "max_len") {
                if (!v.is_number_integer()) throw SpecError(where + ".params.max_len: expected an integer");
                term.params.max_len = v.get<int>();
            } else {
                throw SpecError(where + ".params: unknown parameter '" + key + "'");
            }
        }
    }
    if (term.kind == TermKind::seasonal && term.params.attr.empty()) term.params.attr = "day";
    try {
        check_term(term);
    } catch (const SpecError& e) {
        throw SpecError(where + ": " + e.what());
    }
    return term;
}

json term_to_json(const TermSpec& t) {
    json j{{"kind", to_string(t.kind)}};
    if (t.lagged()) j["lag"] = t.lag;
    json p = json::object();
    const auto& q = t.params;
    switch (t.kind) {
        case TermKind::attr_dummy:
            p["attr"] = q.attr;
            if (q.value) {
                std::visit(
                    [&](const auto& v) {
                        using T = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<T, std::monostate>) p["value"] = nullptr;
                        else p["value"] = v;
                    },
                    *q.value);
            }
            break;
        case TermKind::mixing:
            p["attr"] = q.attr;
            if (q.mixing) p["class"] = to_string(*q.mixing);
            break;
        case TermKind::individual_dummy:
            if (!q.label.empty()) p["label"] = q.label;
            else p["group"] = q.group;
            break;
        case TermKind::lag_cycle_embed: p["max_len"] = q.max_len; break;
        case TermKind::seasonal:
            p["attr"] = seasonal_attr(q);
            if (!q.level.empty()) p["level"] = q.level;
            else p["reference"] = q.reference;
            break;
        default: break;
    }
    if (!p.empty()) j["params"] = p;
    return j;
}

}  // namespace

ModelSpec parse_model_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("line " + std::to_string(detail::line_of_offset(text, e.byte)), e.what());
    }
    if (!doc.is_object()) throw SpecError("model spec: top level must be an object");
    ModelSpec spec;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        Target target;
        if (it.key() == "vertex_terms") target = Target::vertex;
        else if (it.key() == "edge_terms") target = Target::edge;
        else if (it.key() == "name" || it.key() == "description") continue;
        else throw SpecError("model spec: unknown key '" + it.key() + "'");
        if (!it->is_array()) throw SpecError(it.key() + ": expected an array");
        auto& list = target == Target::vertex ? spec.vertex_terms : spec.edge_terms;
        for (std::size_t k = 0; k < it->size(); ++k) {
            list.push_back(term_from_json((*it)[k], target, it.key() + "[" + std::to_string(k) + "]"));
        }
    }
    return spec;
}

ModelSpec load_model_spec(const std::filesystem::path& path) { return parse_model_spec(detail::read_file(path)); }

std::string model_spec_to_text(const ModelSpec& spec) {
    json v = json::array();
    json e = json::array();
    for (const auto& t : spec.vertex_terms) v.push_back(term_to_json(t));
    for (const auto& t : spec.edge_terms) e.push_back(term_to_json(t));
    return json{{"vertex_terms", v}, {"edge_terms", e}}.dump(2) + "\n";
}

namespace {

std::vector<std::string> observed_levels(const NetworkPanel& panel, const std::string& attr) {
    std::set<std::string> levels;
    for (const auto& s : panel.snapshots()) {
        auto it = s.time_attrs.find(attr);
        if (it != s.time_attrs.end() && !std::holds_alternative<std::monostate>(it->second)) {
            levels.insert(attr_to_string(it->second));
        }
    }
    bool weekdays = !levels.empty();
    for (const auto& l : levels) weekdays = weekdays && weekday_index(l).has_value();
    if (weekdays) return {kWeekdays.begin(), kWeekdays.end()};
    return {levels.begin(), levels.end()};
}

void expand_into(const TermSpec& t, const NetworkPanel& panel, std::vector<TermSpec>& out) {
    if (!t.expands()) {
        out.push_back(t);
        return;
    }
    switch (t.kind) {
        case TermKind::mixing:
            for (auto c : {MixingClass::both, MixingClass::neither, MixingClass::mixed}) {
                auto m = t;
                m.params.mixing = c;
                out.push_back(m);
            }
            break;
        case TermKind::individual_dummy: {
            const auto& rs = panel.risk_set();
            if (!rs.has_attribute(t.params.group)) {
                throw SpecError(t.column_name() + ": unknown vertex attribute '" + t.params.group + "'");
            }
            for (VertexIndex v = 0; v < rs.size(); ++v) {
                if (!attr_truthy(*rs.attr(v, t.params.group))) continue;
                auto m = t;
                m.params.group.clear();
                m.params.label = rs.label(v);
                out.push_back(m);
            }
            break;
        }
        case TermKind::seasonal:
            for (const auto& level : observed_levels(panel, seasonal_attr(t.params))) {
                if (level == t.params.reference) continue;
                auto m = t;
                m.params.level = level;
                out.push_back(m);
            }
            break;
        default: out.push_back(t);
    }
}

}  // namespace

ModelSpec expand_model(const ModelSpec& spec, const NetworkPanel& panel) {
    ModelSpec out;
    for (const auto& t : spec.vertex_terms) expand_into(t, panel, out.vertex_terms);
    for (const auto& t : spec.edge_terms) expand_into(t, panel, out.edge_terms);
    return out;
}

// -----------------------------------------------------------------------------
// Lag windows
// -----------------------------------------------------------------------------

std::vector<const Snapshot*> lag_window(const NetworkPanel& panel, int t, int max_lag, LagPolicy policy) {
    std::vector<const Snapshot*> out;
    out.reserve(static_cast<std::size_t>(max_lag));
    if (policy == LagPolicy::exclude) {
        for (int k = 1; k <= max_lag; ++k) {
            const auto* s = panel.find(t - k);
            if (!s) throw GapError(t, t - k);
            out.push_back(s);
        }
        return out;
    }
    const auto& snaps = panel.snapshots();
    auto it = std::lower_bound(snaps.begin(), snaps.end(), t, [](const Snapshot& s, int v) { return s.t < v; });
    auto before = static_cast<std::ptrdiff_t>(it - snaps.begin());
    if (before < max_lag) throw GapError(t, t - max_lag);
    for (int k = 1; k <= max_lag; ++k) out.push_back(&snaps[static_cast<std::size_t>(before - k)]);
    return out;
}

std::vector<int> usable_times(const NetworkPanel& panel, int max_lag, LagPolicy policy) {
    std::vector<int> out;
    const auto& snaps = panel.snapshots();
    for (std::size_t pos = 0; pos < snaps.size(); ++pos) {
        int t = snaps[pos].t;
        bool ok = true;
        if (policy == LagPolicy::exclude) {
            for (int k = 1; k <= max_lag && ok; ++k) ok = panel.find(t - k) != nullptr;
        } else {
            ok = pos >= static_cast<std::size_t>(max_lag);
        }
        if (ok) out.push_back(t);
    }
    return out;
}

// -----------------------------------------------------------------------------
// Graph statistics
// -----------------------------------------------------------------------------

std::uint64_t triangle_count(const Snapshot& snapshot, VertexIndex p) {
    Adjacency adj(snapshot);
    if (p >= adj.universe()) return 0;
    auto n = adj.neighbors(p);
    std::uint64_t count = 0;
    for (std::size_t a = 0; a < n.size(); ++a)
        for (std::size_t b = a + 1; b < n.size(); ++b)
            if (adj.adjacent(n[a], n[b])) ++count;
    return count;
}

namespace {

struct PathCounter {
    const Adjacency& adj;
    VertexIndex target;
    int max_edges;
    std::vector<int> dist;
    std::vector<char> visited;
    std::uint64_t count = 0;

    void walk(VertexIndex v, int depth) {
        for (auto w : adj.neighbors(v)) {
            if (w == target) {
                if (depth + 1 >= 2) ++count;
                continue;
            }
            if (visited[w] || dist[w] < 0 || depth + 1 + dist[w] > max_edges) continue;
            visited[w] = 1;
            walk(w, depth + 1);
            visited[w] = 0;
        }
    }
};

}  // namespace

std::uint64_t pair_cycle_count(const Adjacency& adj, VertexIndex i, VertexIndex j, int max_len) {
    if (max_len < 3 || max_len > 9) throw RangeError("pair_cycle_count: max_len must lie in [3, 9]");
    if (i == j || i >= adj.universe() || j >= adj.universe()) return 0;
    const int max_edges = max_len - 1;
    // Distances to j, ignoring the direct i-j edge.
    std::vector<int> dist(adj.universe(), -1);
    std::deque<VertexIndex> queue{j};
    dist[j] = 0;
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        if (dist[v] >= max_edges) continue;
        for (auto w : adj.neighbors(v)) {
            if ((v == i && w == j) || (v == j && w == i)) continue;
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    if (dist[i] < 0) return 0;
    PathCounter pc{adj, j, max_edges, std::move(dist), std::vector<char>(adj.universe(), 0)};
    pc.visited[i] = 1;
    pc.walk(i, 0);
    return pc.count;
}

std::uint64_t pair_cycle_count(const Snapshot& snapshot, VertexIndex i, VertexIndex j, int max_len) {
    return pair_cycle_count(Adjacency(snapshot), i, j, max_len);
}

// -----------------------------------------------------------------------------
// LaggedGraph
// -----------------------------------------------------------------------------

LaggedGraph::LaggedGraph(std::shared_ptr<const Snapshot> snapshot, bool triangles, std::vector<int> cycle_lengths)
    : snapshot_(std::move(snapshot)) {
    if (!triangles && cycle_lengths.empty()) return;
    Adjacency adj(*snapshot_);
    if (triangles) triangles_ = triangles_per_vertex(adj);
    std::sort(cycle_lengths.begin(), cycle_lengths.end());
    cycle_lengths.erase(std::unique(cycle_lengths.begin(), cycle_lengths.end()), cycle_lengths.end());
    for (int len : cycle_lengths) {
        std::vector<std::uint64_t> counts;
        counts.reserve(snapshot_->edges.size());
        for (const auto& e : snapshot_->edges) counts.push_back(pair_cycle_count(adj, e.i, e.j, len));
        cycles_.emplace_back(len, std::move(counts));
    }
}

std::uint64_t LaggedGraph::triangles(VertexIndex p) const {
    if (triangles_.empty() && snapshot_->present.universe() > 0) {
        throw std::logic_error("LaggedGraph: triangle counts were not prepared");
    }
    return p < triangles_.size() ? triangles_[p] : 0;
}

std::uint64_t LaggedGraph::edge_cycles(VertexIndex i, VertexIndex j, int max_len) const {
    auto pos = snapshot_->edge_position(i, j);
    if (!pos) return 0;
    for (const auto& [len, counts] : cycles_)
        if (len == max_len) return counts[*pos];
    throw std::logic_error("LaggedGraph: cycle counts of length " + std::to_string(max_len) + " were not prepared");
}

// -----------------------------------------------------------------------------
// CompiledModel
// -----------------------------------------------------------------------------

CompiledModel::CompiledModel(const ModelSpec& expanded, const RiskSet& risk_set) : spec_(expanded) {
    auto compile = [&](const TermSpec& t) {
        check_term(t);
        if (t.expands()) throw SpecError(t.column_name() + ": model must be expanded before compiling");
        Term c{t.kind, t.lag, {}, 0, MixingClass::both, {}, {}, t.params.max_len};
        switch (t.kind) {
            case TermKind::attr_dummy:
            case TermKind::mixing:
                if (!risk_set.has_attribute(t.params.attr)) {
                    throw SpecError(t.column_name() + ": unknown vertex attribute '" + t.params.attr + "'");
                }
                c.flag.resize(risk_set.size());
                for (VertexIndex v = 0; v < risk_set.size(); ++v) {
                    const auto& a = *risk_set.attr(v, t.params.attr);
                    c.flag[v] = (t.kind == TermKind::attr_dummy && t.params.value) ? attr_equals(a, *t.params.value)
                                                                                   : attr_truthy(a);
                }
                if (t.params.mixing) c.mixing = *t.params.mixing;
                break;
            case TermKind::individual_dummy: {
                auto v = risk_set.find(t.params.label);
                if (!v) throw SpecError(t.column_name() + ": unknown vertex '" + t.params.label + "'");
                c.who = *v;
                break;
            }
            case TermKind::seasonal:
                c.attr = seasonal_attr(t.params);
                c.level = t.params.level;
                break;
            default: break;
        }
        max_lag_ = std::max(max_lag_, t.lag);
        return c;
    };
    for (const auto& t : spec_.vertex_terms) vertex_.push_back(compile(t));
    for (const auto& t : spec_.edge_terms) edge_.push_back(compile(t));
}

bool CompiledModel::needs_triangles(int lag) const {
    return std::any_of(vertex_.begin(), vertex_.end(),
                       [&](const Term& t) { return t.kind == TermKind::lag_triangle && t.lag == lag; });
}

std::vector<int> CompiledModel::cycle_lengths(int lag) const {
    std::vector<int> out;
    for (const auto& t : edge_)
        if (t.kind == TermKind::lag_cycle_embed && t.lag == lag) out.push_back(t.max_len);
    return out;
}

std::shared_ptr<const LaggedGraph> CompiledModel::lagged(std::shared_ptr<const Snapshot> snapshot, int lag) const {
    return std::make_shared<const LaggedGraph>(std::move(snapshot), needs_triangles(lag), cycle_lengths(lag));
}

namespace {

bool seasonal_match(const StepContext& ctx, const std::string& attr, const std::string& level) {
    if (!ctx.time_attrs) return false;
    auto it = ctx.time_attrs->find(attr);
    if (it == ctx.time_attrs->end()) return false;
    if (auto s = std::get_if<std::string>(&it->second)) return *s == level;
    return attr_to_string(it->second) == level;
}

const LaggedGraph& lag_at(const StepContext& ctx, int lag) {
    if (lag < 1 || static_cast<std::size_t>(lag) > ctx.lags.size() || !ctx.lags[static_cast<std::size_t>(lag - 1)]) {
        throw GapError(ctx.t, ctx.t - lag);
    }
    return *ctx.lags[static_cast<std::size_t>(lag - 1)];
}

}  // namespace

double CompiledModel::vertex_value(const Term& term, const StepContext& ctx, VertexIndex p) const {
    switch (term.kind) {
        case TermKind::intercept: return 1.0;
        case TermKind::attr_dummy: return term.flag[p] ? 1.0 : 0.0;
        case TermKind::individual_dummy: return p == term.who ? 1.0 : 0.0;
        case TermKind::lag_indicator: return lag_at(ctx, term.lag).present(p) ? 1.0 : 0.0;
        case TermKind::lag_triangle: return static_cast<double>(lag_at(ctx, term.lag).triangles(p));
        case TermKind::seasonal: return seasonal_match(ctx, term.attr, term.level) ? 1.0 : 0.0;
        default: throw SpecError(std::string("vertex term of kind ") + to_string(term.kind));
    }
}

double CompiledModel::edge_value(const Term& term, const StepContext& ctx, VertexIndex i, VertexIndex j) const {
    switch (term.kind) {
        case TermKind::intercept: return 1.0;
        case TermKind::mixing: {
            const bool a = term.flag[i] != 0;
            const bool b = term.flag[j] != 0;
            switch (term.mixing) {
                case MixingClass::both: return a && b ? 1.0 : 0.0;
                case MixingClass::neither: return !a && !b ? 1.0 : 0.0;
                case MixingClass::mixed: return a != b ? 1.0 : 0.0;
            }
            return 0.0;
        }
        case TermKind::individual_dummy: return (i == term.who || j == term.who) ? 1.0 : 0.0;
        case TermKind::log_size:
            return ctx.current_size > 0 ? std::log(static_cast<double>(ctx.current_size)) : 0.0;
        case TermKind::lag_indicator: return lag_at(ctx, term.lag).has_edge(i, j) ? 1.0 : 0.0;
        case TermKind::lag_cycle_embed:
            return std::log1p(static_cast<double>(lag_at(ctx, term.lag).edge_cycles(i, j, term.max_len)));
        case TermKind::seasonal: return seasonal_match(ctx, term.attr, term.level) ? 1.0 : 0.0;
        default: throw SpecError(std::string("edge term of kind ") + to_string(term.kind));
    }
}

void CompiledModel::vertex_features(const StepContext& ctx, VertexIndex p, std::span<double> out) const {
    if (out.size() != vertex_.size()) throw DimensionError("vertex_features: output size mismatch");
    for (std::size_t c = 0; c < vertex_.size(); ++c) out[c] = vertex_value(vertex_[c], ctx, p);
}

void CompiledModel::edge_features(const StepContext& ctx, VertexIndex i, VertexIndex j, std::span<double> out) const {
    if (out.size() != edge_.size()) throw DimensionError("edge_features: output size mismatch");
    for (std::size_t c = 0; c < edge_.size(); ++c) out[c] = edge_value(edge_[c], ctx, i, j);
}

double CompiledModel::vertex_eta(const StepContext& ctx, VertexIndex p, std::span<const double> coef) const {
    double eta = 0.0;
    for (std::size_t c = 0; c < vertex_.size(); ++c) {
        if (coef[c] != 0.0) eta += coef[c] * vertex_value(vertex_[c], ctx, p);
    }
    return eta;
}

double CompiledModel::edge_eta(const StepContext& ctx, VertexIndex i, VertexIndex j,
                               std::span<const double> coef) const {
    double eta = 0.0;
    for (std::size_t c = 0; c < edge_.size(); ++c) {
        const double b = coef[vertex_.size() + c];
        if (b != 0.0) eta += b * edge_value(edge_[c], ctx, i, j);
    }
    return eta;
}

// -----------------------------------------------------------------------------
// Contexts and single-statistic evaluation
// -----------------------------------------------------------------------------

AttrMap time_attrs_at(const NetworkPanel& panel, int t) {
    if (const auto* s = panel.find(t)) return s->time_attrs;
    const auto& snaps = panel.snapshots();
    if (snaps.empty()) return {};
    auto it = std::lower_bound(snaps.begin(), snaps.end(), t, [](const Snapshot& s, int v) { return s.t < v; });
    const Snapshot& anchor = it == snaps.begin() ? snaps.front() : *std::prev(it);
    AttrMap out = anchor.time_attrs;
    const int shift = ((t - anchor.t) % 7 + 7) % 7;
    for (auto& [key, value] : out) {
        auto s = std::get_if<std::string>(&value);
        if (!s) continue;
        if (auto w = weekday_index(*s)) value = std::string(kWeekdays[static_cast<std::size_t>((*w + shift) % 7)]);
    }
    return out;
}

StepContext observed_context(const CompiledModel& model, const NetworkPanel& panel, int t, LagPolicy policy,
                             std::vector<std::shared_ptr<const LaggedGraph>>& storage) {
    StepContext ctx;
    ctx.t = t;
    const auto window = lag_window(panel, t, model.max_lag(), policy);
    for (std::size_t k = 0; k < window.size(); ++k) {
        // Panel snapshots outlive the context; alias without ownership.
        std::shared_ptr<const Snapshot> alias(std::shared_ptr<const Snapshot>(), window[k]);
        storage.push_back(model.lagged(alias, static_cast<int>(k + 1)));
        ctx.lags.push_back(storage.back().get());
    }
    ctx.time_attrs = panel.find(t) ? &panel.find(t)->time_attrs : nullptr;
    if (const auto* s = panel.find(t)) ctx.current_size = s->present.count();
    return ctx;
}

namespace {

ModelSpec single_term_model(const TermSpec& term) {
    ModelSpec spec;
    (term.target == Target::vertex ? spec.vertex_terms : spec.edge_terms).push_back(term);
    return spec;
}

}  // namespace

double vertex_stat(const TermSpec& term, const NetworkPanel& panel, int t, VertexIndex p, LagPolicy policy) {
    if (term.target != Target::vertex) throw SpecError("vertex_stat: term targets edges");
    CompiledModel model(single_term_model(term), panel.risk_set());
    std::vector<std::shared_ptr<const LaggedGraph>> storage;
    auto ctx = observed_context(model, panel, t, policy, storage);
    AttrMap attrs;
    if (!ctx.time_attrs) {
        attrs = time_attrs_at(panel, t);
        ctx.time_attrs = &attrs;
    }
    double out = 0.0;
    model.vertex_features(ctx, p, {&out, 1});
    return out;
}

double edge_stat(const TermSpec& term, const NetworkPanel& panel, int t, VertexIndex i, VertexIndex j,
                 const VertexSet& current_present, LagPolicy policy) {
    if (term.target != Target::edge) throw SpecError("edge_stat: term targets vertices");
    if (i == j) throw ValidationError("edge_stat: i == j");
    if (!current_present.contains(i) || !current_present.contains(j)) {
        throw ValidationError("edge_stat: both endpoints must be present");
    }
    CompiledModel model(single_term_model(term), panel.risk_set());
    std::vector<std::shared_ptr<const LaggedGraph>> storage;
    auto ctx = observed_context(model, panel, t, policy, storage);
    AttrMap attrs;
    if (!ctx.time_attrs) {
        attrs = time_attrs_at(panel, t);
        ctx.time_attrs = &attrs;
    }
    ctx.current_size = current_present.count();
    double out = 0.0;
    model.edge_features(ctx, i, j, {&out, 1});
    return out;
}

// -----------------------------------------------------------------------------
// Validation
// -----------------------------------------------------------------------------

bool ValidationReport::ok() const {
    return std::none_of(findings.begin(), findings.end(), [](const Finding& f) { return f.severity == Severity::error; });
}

ValidationReport validate_model(const ModelSpec& spec, const NetworkPanel& panel, LagPolicy policy) {
    ValidationReport report;
    auto add = [&](Severity s, std::string m) { report.findings.push_back({s, std::move(m)}); };
    const auto& rs = panel.risk_set();

    std::set<std::string> time_attr_names;
    for (const auto& s : panel.snapshots())
        for (const auto& [k, _] : s.time_attrs) time_attr_names.insert(k);

    bool terms_ok = true;
    for (const auto* list : {&spec.vertex_terms, &spec.edge_terms}) {
        for (const auto& t : *list) {
            try {
                check_term(t);
            } catch (const SpecError& e) {
                add(Severity::error, e.what());
                terms_ok = false;
                continue;
            }
            const auto name = t.column_name();
            if ((t.kind == TermKind::attr_dummy || t.kind == TermKind::mixing) && !rs.has_attribute(t.params.attr)) {
                add(Severity::error, name + ": unknown vertex attribute '" + t.params.attr + "'");
                terms_ok = false;
            }
            if (t.kind == TermKind::individual_dummy) {
                if (!t.params.label.empty() && !rs.find(t.params.label)) {
                    add(Severity::error, name + ": unknown vertex '" + t.params.label + "'");
                    terms_ok = false;
                }
                if (!t.params.group.empty() && !rs.has_attribute(t.params.group)) {
                    add(Severity::error, name + ": unknown vertex attribute '" + t.params.group + "'");
                    terms_ok = false;
                }
            }
            if (t.kind == TermKind::seasonal && !time_attr_names.contains(seasonal_attr(t.params))) {
                add(Severity::error, name + ": unknown time attribute '" + seasonal_attr(t.params) + "'");
                terms_ok = false;
            }
        }
    }

    if (terms_ok) {
        const auto expanded = expand_model(spec, panel);
        for (const auto* list : {&expanded.vertex_terms, &expanded.edge_terms}) {
            const bool vertex = list == &expanded.vertex_terms;
            const std::string side = vertex ? "vertex" : "edge";
            std::set<std::string> names;
            for (const auto& t : *list) {
                if (!names.insert(t.column_name()).second) {
                    add(Severity::warning, side + " model: duplicate column " + t.column_name());
                }
            }
            // Each group below sums to one on every row; two of them in one block are collinear.
            std::vector<std::string> constant_groups;
            if (std::any_of(list->begin(), list->end(), [](const TermSpec& t) { return t.kind == TermKind::intercept; })) {
                constant_groups.push_back("intercept");
            }
            std::map<std::string, std::set<MixingClass>> mixing;
            std::map<std::string, std::set<std::string>> seasonal;
            for (const auto& t : *list) {
                if (t.kind == TermKind::mixing) mixing[t.params.attr].insert(*t.params.mixing);
                if (t.kind == TermKind::seasonal) seasonal[seasonal_attr(t.params)].insert(t.params.level);
            }
            for (const auto& [attr, classes] : mixing) {
                if (classes.size() == 3) constant_groups.push_back("mixing[" + attr + "]");
            }
            for (const auto& [attr, levels] : seasonal) {
                std::set<std::string> seen;
                for (const auto& s : panel.snapshots()) {
                    auto it = s.time_attrs.find(attr);
                    if (it != s.time_attrs.end()) seen.insert(attr_to_string(it->second));
                }
                if (!seen.empty() && std::includes(levels.begin(), levels.end(), seen.begin(), seen.end())) {
                    constant_groups.push_back("seasonal[" + attr + "]");
                }
                for (const auto& l : levels) {
                    if (!seen.contains(l)) {
                        add(Severity::warning, side + " model: seasonal level '" + l + "' never observed (zero column)");
                    }
                }
            }
            if (constant_groups.size() >= 2) {
                std::string joined;
                for (const auto& g : constant_groups) joined += (joined.empty() ? "" : " + ") + g;
                add(Severity::warning, side + " model: collinear dummy sets (" + joined + ")");
            }
        }
    }

    report.usable = usable_times(panel, spec.max_lag(), policy);
    if (report.usable.empty()) {
        add(Severity::error, "no usable transition steps for max lag " + std::to_string(spec.max_lag()));
    } else {
        add(Severity::info, std::to_string(report.usable.size()) + " usable transition steps in [" +
                                std::to_string(report.usable.front()) + ", " + std::to_string(report.usable.back()) +
                                "] (lag policy " + to_string(policy) + ")");
    }
    return report;
}

}  // namespace dynlogit
