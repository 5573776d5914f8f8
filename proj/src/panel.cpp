#include "dynlogit/panel.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dynlogit/error.hpp"
#include "text_util.hpp"

namespace dynlogit {

using json = nlohmann::json;

// -----------------------------------------------------------------------------
// Attributes
// -----------------------------------------------------------------------------

bool attr_truthy(const AttrValue& value) {
    return std::visit(
        [](const auto& v) -> bool {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return false;
            } else if constexpr (std::is_same_v<T, std::string>) {
                return !v.empty();
            } else {
                return v != T{};
            }
        },
        value);
}

std::string attr_to_string(const AttrValue& value) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return "null";
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::string>) {
                return v;
            } else {
                return json(v).dump();
            }
        },
        value);
}

bool attr_equals(const AttrValue& a, const AttrValue& b) {
    auto numeric = [](const AttrValue& v) -> std::optional<double> {
        if (auto p = std::get_if<std::int64_t>(&v)) return static_cast<double>(*p);
        if (auto p = std::get_if<double>(&v)) return *p;
        return std::nullopt;
    };
    auto na = numeric(a);
    auto nb = numeric(b);
    if (na && nb) return *na == *nb;
    return a == b;
}

// -----------------------------------------------------------------------------
// VertexSet
// -----------------------------------------------------------------------------

VertexSet::VertexSet(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

VertexSet::VertexSet(std::size_t universe, std::span<const VertexIndex> members) : VertexSet(universe) {
    for (auto v : members) insert(v);
}

VertexSet VertexSet::full(std::size_t universe) {
    VertexSet s(universe);
    for (VertexIndex v = 0; v < universe; ++v) s.insert(v);
    return s;
}

void VertexSet::insert(VertexIndex v) {
    if (v >= universe_) throw RangeError("vertex index " + std::to_string(v) + " outside risk set");
    words_[v >> 6] |= (std::uint64_t{1} << (v & 63));
}

void VertexSet::erase(VertexIndex v) {
    if (v >= universe_) return;
    words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
}

std::size_t VertexSet::count() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::vector<VertexIndex> VertexSet::members() const {
    std::vector<VertexIndex> out;
    out.reserve(count());
    for (std::size_t w = 0; w < words_.size(); ++w) {
        auto word = words_[w];
        while (word) {
            int bit = std::countr_zero(word);
            out.push_back(static_cast<VertexIndex>(w * 64 + bit));
            word &= word - 1;
        }
    }
    return out;
}

// -----------------------------------------------------------------------------
// RiskSet
// -----------------------------------------------------------------------------

RiskSet::RiskSet(std::vector<std::string> labels, std::vector<AttrMap> attrs)
    : labels_(std::move(labels)), attrs_(std::move(attrs)) {
    if (attrs_.empty()) attrs_.resize(labels_.size());
    if (attrs_.size() != labels_.size()) {
        throw ValidationError("risk set: attribute table has " + std::to_string(attrs_.size()) +
                              " rows for " + std::to_string(labels_.size()) + " vertices");
    }
    index_.reserve(labels_.size());
    for (std::size_t v = 0; v < labels_.size(); ++v) {
        auto [it, inserted] = index_.emplace(labels_[v], static_cast<VertexIndex>(v));
        if (!inserted) throw ValidationError("risk set: duplicate vertex label '" + labels_[v] + "'");
    }
    std::set<std::string> columns;
    for (const auto& a : attrs_)
        for (const auto& [k, _] : a) columns.insert(k);
    for (auto& a : attrs_)
        for (const auto& k : columns) a.try_emplace(k, std::monostate{});
}

std::optional<VertexIndex> RiskSet::find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool RiskSet::has_attribute(const std::string& name) const {
    return !attrs_.empty() && attrs_.front().contains(name);
}

const AttrValue* RiskSet::attr(VertexIndex v, const std::string& name) const {
    const auto& a = attrs_.at(v);
    auto it = a.find(name);
    return it == a.end() ? nullptr : &it->second;
}

// -----------------------------------------------------------------------------
// Snapshot / NetworkPanel
// -----------------------------------------------------------------------------

std::optional<std::size_t> Snapshot::edge_position(VertexIndex a, VertexIndex b) const {
    if (a == b) return std::nullopt;
    auto e = Edge::make(a, b);
    auto it = std::lower_bound(edges.begin(), edges.end(), e);
    if (it == edges.end() || *it != e) return std::nullopt;
    return static_cast<std::size_t>(it - edges.begin());
}

bool Snapshot::has_edge(VertexIndex a, VertexIndex b) const { return edge_position(a, b).has_value(); }

namespace {

void validate_snapshot_edges(const Snapshot& s, const RiskSet* risk_set) {
    auto name = [&](VertexIndex v) {
        return risk_set && v < risk_set->size() ? risk_set->label(v) : std::to_string(v);
    };
    for (std::size_t k = 0; k < s.edges.size(); ++k) {
        const auto& e = s.edges[k];
        if (e.i == e.j) {
            throw ValidationError("t=" + std::to_string(s.t) + ": loop on vertex " + name(e.i));
        }
        if (!s.present.contains(e.i) || !s.present.contains(e.j)) {
            throw ValidationError("t=" + std::to_string(s.t) + ": edge (" + name(e.i) + ", " + name(e.j) +
                                  ") has an endpoint that is not present");
        }
        if (k > 0 && s.edges[k - 1] == e) {
            throw ValidationError("t=" + std::to_string(s.t) + ": duplicate edge (" + name(e.i) + ", " +
                                  name(e.j) + ")");
        }
    }
}

}  // namespace

Snapshot make_snapshot(int t, const VertexSet& present, std::vector<Edge> edges, AttrMap time_attrs) {
    for (auto& e : edges) e = Edge::make(e.i, e.j);
    std::sort(edges.begin(), edges.end());
    Snapshot s{t, present, std::move(edges), std::move(time_attrs)};
    validate_snapshot_edges(s, nullptr);
    return s;
}

NetworkPanel::NetworkPanel(RiskSet risk_set, std::vector<Snapshot> snapshots, std::vector<int> gaps, bool directed)
    : risk_set_(std::move(risk_set)), snapshots_(std::move(snapshots)), gaps_(std::move(gaps)),
      directed_(directed) {
    if (directed_) throw ValidationError("directed panels are not supported");
    std::sort(snapshots_.begin(), snapshots_.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    std::sort(gaps_.begin(), gaps_.end());
    for (std::size_t k = 1; k < snapshots_.size(); ++k) {
        if (snapshots_[k].t == snapshots_[k - 1].t) {
            throw ValidationError("duplicate snapshot for t=" + std::to_string(snapshots_[k].t));
        }
    }
    for (std::size_t k = 1; k < gaps_.size(); ++k) {
        if (gaps_[k] == gaps_[k - 1]) throw ValidationError("duplicate gap index " + std::to_string(gaps_[k]));
    }
    for (int g : gaps_) {
        if (find(g)) throw ValidationError("gap index " + std::to_string(g) + " is also an observed snapshot");
    }
    for (auto& s : snapshots_) {
        if (s.present.universe() != risk_set_.size()) {
            throw ValidationError("t=" + std::to_string(s.t) + ": presence set sized for " +
                                  std::to_string(s.present.universe()) + " vertices, risk set has " +
                                  std::to_string(risk_set_.size()));
        }
        for (auto& e : s.edges) e = Edge::make(e.i, e.j);
        std::sort(s.edges.begin(), s.edges.end());
        validate_snapshot_edges(s, &risk_set_);
    }
}

const Snapshot* NetworkPanel::find(int t) const {
    auto pos = position(t);
    return pos ? &snapshots_[*pos] : nullptr;
}

std::optional<std::size_t> NetworkPanel::position(int t) const {
    auto it = std::lower_bound(snapshots_.begin(), snapshots_.end(), t,
                               [](const Snapshot& s, int value) { return s.t < value; });
    if (it == snapshots_.end() || it->t != t) return std::nullopt;
    return static_cast<std::size_t>(it - snapshots_.begin());
}

bool NetworkPanel::is_gap(int t) const { return std::binary_search(gaps_.begin(), gaps_.end(), t); }

int NetworkPanel::first_time() const {
    if (snapshots_.empty() && gaps_.empty()) throw RangeError("panel has no time indices");
    int lo = snapshots_.empty() ? gaps_.front() : snapshots_.front().t;
    if (!gaps_.empty()) lo = std::min(lo, gaps_.front());
    return lo;
}

int NetworkPanel::last_time() const {
    if (snapshots_.empty() && gaps_.empty()) throw RangeError("panel has no time indices");
    int hi = snapshots_.empty() ? gaps_.back() : snapshots_.back().t;
    if (!gaps_.empty()) hi = std::max(hi, gaps_.back());
    return hi;
}

// -----------------------------------------------------------------------------
// Panel text format
// -----------------------------------------------------------------------------

namespace {

json attr_to_json(const AttrValue& value) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return nullptr;
            } else {
                return v;
            }
        },
        value);
}

AttrValue attr_from_json(const json& j, const std::string& where) {
    switch (j.type()) {
        case json::value_t::null: return std::monostate{};
        case json::value_t::boolean: return j.get<bool>();
        case json::value_t::number_integer: return j.get<std::int64_t>();
        case json::value_t::number_unsigned: return static_cast<std::int64_t>(j.get<std::uint64_t>());
        case json::value_t::number_float: return j.get<double>();
        case json::value_t::string: return j.get<std::string>();
        default: throw ParseError(where, "attribute values must be number, string, bool or null");
    }
}

json attrs_to_json(const AttrMap& attrs) {
    json out = json::object();
    for (const auto& [k, v] : attrs) out[k] = attr_to_json(v);
    return out;
}

AttrMap attrs_from_json(const json& j, const std::string& where) {
    AttrMap out;
    if (j.is_null()) return out;
    if (!j.is_object()) throw ParseError(where, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        out.emplace(it.key(), attr_from_json(it.value(), where + "." + it.key()));
    }
    return out;
}

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where, std::string("missing key \"") + key + "\"");
    return *it;
}

std::string require_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw ParseError(where, "expected a string");
    return j.get<std::string>();
}

int require_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ParseError(where, "expected an integer");
    return j.get<int>();
}

std::string dump_array_lines(const std::vector<json>& items) {
    if (items.empty()) return "[]";
    std::string out = "[\n";
    for (std::size_t k = 0; k < items.size(); ++k) {
        out += items[k].dump();
        out += (k + 1 < items.size()) ? ",\n" : "\n";
    }
    out += "]";
    return out;
}

}  // namespace

std::string panel_to_text(const NetworkPanel& panel) {
    const auto& rs = panel.risk_set();
    std::vector<json> vertices;
    vertices.reserve(rs.size());
    for (VertexIndex v = 0; v < rs.size(); ++v) {
        vertices.push_back(json{{"label", rs.label(v)}, {"attrs", attrs_to_json(rs.attrs(v))}});
    }
    std::vector<json> snaps;
    snaps.reserve(panel.snapshots().size());
    for (const auto& s : panel.snapshots()) {
        json present = json::array();
        for (auto v : s.present.members()) present.push_back(rs.label(v));
        std::vector<std::pair<std::string, std::string>> pairs;
        pairs.reserve(s.edges.size());
        for (const auto& e : s.edges) {
            const auto& a = rs.label(e.i);
            const auto& b = rs.label(e.j);
            pairs.emplace_back(std::min(a, b), std::max(a, b));
        }
        std::sort(pairs.begin(), pairs.end());
        json edges = json::array();
        for (auto& [a, b] : pairs) edges.push_back(json::array({a, b}));
        snaps.push_back(json{{"t", s.t}, {"attrs", attrs_to_json(s.time_attrs)}, {"present", present}, {"edges", edges}});
    }
    std::string out = "{\n";
    out += "\"directed\": false,\n";
    out += "\"gaps\": " + json(panel.gaps()).dump() + ",\n";
    out += "\"risk_set\": " + dump_array_lines(vertices) + ",\n";
    out += "\"snapshots\": " + dump_array_lines(snaps) + "\n";
    out += "}\n";
    return out;
}

NetworkPanel panel_from_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("line " + std::to_string(detail::line_of_offset(text, e.byte)), e.what());
    }
    if (!doc.is_object()) throw ParseError("$", "top level must be an object");

    bool directed = false;
    if (auto it = doc.find("directed"); it != doc.end()) {
        if (!it->is_boolean()) throw ParseError("$.directed", "expected a boolean");
        directed = it->get<bool>();
    }
    if (directed) throw ValidationError("directed panels are not supported");

    const auto& jrs = require(doc, "risk_set", "$");
    if (!jrs.is_array()) throw ParseError("$.risk_set", "expected an array");
    std::vector<std::string> labels;
    std::vector<AttrMap> attrs;
    for (std::size_t k = 0; k < jrs.size(); ++k) {
        std::string where = "$.risk_set[" + std::to_string(k) + "]";
        labels.push_back(require_string(require(jrs[k], "label", where), where + ".label"));
        auto ait = jrs[k].find("attrs");
        attrs.push_back(ait == jrs[k].end() ? AttrMap{} : attrs_from_json(*ait, where + ".attrs"));
    }
    RiskSet risk_set(std::move(labels), std::move(attrs));

    auto lookup = [&](const json& j, const std::string& where) {
        auto label = require_string(j, where);
        auto v = risk_set.find(label);
        if (!v) throw ValidationError(where + ": unknown vertex label '" + label + "'");
        return *v;
    };

    std::vector<Snapshot> snapshots;
    const auto& jsn = require(doc, "snapshots", "$");
    if (!jsn.is_array()) throw ParseError("$.snapshots", "expected an array");
    for (std::size_t k = 0; k < jsn.size(); ++k) {
        std::string where = "$.snapshots[" + std::to_string(k) + "]";
        Snapshot s;
        s.t = require_int(require(jsn[k], "t", where), where + ".t");
        s.present = VertexSet(risk_set.size());
        if (auto ait = jsn[k].find("attrs"); ait != jsn[k].end()) s.time_attrs = attrs_from_json(*ait, where + ".attrs");
        const auto& jp = require(jsn[k], "present", where);
        if (!jp.is_array()) throw ParseError(where + ".present", "expected an array");
        for (std::size_t q = 0; q < jp.size(); ++q) {
            s.present.insert(lookup(jp[q], where + ".present[" + std::to_string(q) + "]"));
        }
        const auto& je = require(jsn[k], "edges", where);
        if (!je.is_array()) throw ParseError(where + ".edges", "expected an array");
        for (std::size_t q = 0; q < je.size(); ++q) {
            std::string ew = where + ".edges[" + std::to_string(q) + "]";
            if (!je[q].is_array() || je[q].size() != 2) throw ParseError(ew, "expected a [label, label] pair");
            auto a = lookup(je[q][0], ew + "[0]");
            auto b = lookup(je[q][1], ew + "[1]");
            s.edges.push_back(Edge::make(a, b));
        }
        snapshots.push_back(std::move(s));
    }

    std::vector<int> gaps;
    if (auto it = doc.find("gaps"); it != doc.end()) {
        if (!it->is_array()) throw ParseError("$.gaps", "expected an array");
        for (std::size_t k = 0; k < it->size(); ++k) {
            gaps.push_back(require_int((*it)[k], "$.gaps[" + std::to_string(k) + "]"));
        }
    }
    return NetworkPanel(std::move(risk_set), std::move(snapshots), std::move(gaps), false);
}

NetworkPanel load_panel(const std::filesystem::path& path) {
    return panel_from_text(detail::read_file(path));
}

void save_panel(const NetworkPanel& panel, const std::filesystem::path& path) {
    detail::write_file(path, panel_to_text(panel));
}

NetworkPanel subpanel(const NetworkPanel& panel, int t_from, int t_to) {
    if (t_from > t_to) throw RangeError("subpanel: t_from > t_to");
    if (panel.snapshots().empty() && panel.gaps().empty()) throw RangeError("subpanel of an empty panel");
    if (t_from < panel.first_time() || t_to > panel.last_time()) {
        throw RangeError("subpanel: [" + std::to_string(t_from) + ", " + std::to_string(t_to) +
                         "] outside panel range [" + std::to_string(panel.first_time()) + ", " +
                         std::to_string(panel.last_time()) + "]");
    }
    std::vector<Snapshot> snaps;
    for (const auto& s : panel.snapshots())
        if (s.t >= t_from && s.t <= t_to) snaps.push_back(s);
    std::vector<int> gaps;
    for (int g : panel.gaps())
        if (g >= t_from && g <= t_to) gaps.push_back(g);
    return NetworkPanel(panel.risk_set(), std::move(snaps), std::move(gaps), panel.directed());
}

// -----------------------------------------------------------------------------
// Edge-list conversion
// -----------------------------------------------------------------------------

namespace {

AttrValue parse_cell(const std::string& cell) {
    if (cell.empty() || cell == "null" || cell == "NA") return std::monostate{};
    if (cell == "true" || cell == "TRUE") return true;
    if (cell == "false" || cell == "FALSE") return false;
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), i);
    if (ec == std::errc() && p == cell.data() + cell.size()) return i;
    try {
        std::size_t used = 0;
        double d = std::stod(cell, &used);
        if (used == cell.size()) return d;
    } catch (const std::exception&) {
    }
    return cell;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line, fields)
};

Table read_table(const std::filesystem::path& path, bool has_header) {
    Table out;
    std::istringstream in(detail::read_file(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto fields = detail::split_fields(line);
        if (fields.empty() || fields.front().starts_with('#')) continue;
        if (has_header && out.header.empty()) {
            out.header = std::move(fields);
            continue;
        }
        out.rows.emplace_back(lineno, std::move(fields));
    }
    return out;
}

int parse_time(const std::string& field, const std::filesystem::path& file, std::size_t line) {
    int t = 0;
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), t);
    if (ec != std::errc() || p != field.data() + field.size()) {
        throw ParseError(file.filename().string() + " line " + std::to_string(line), "time index '" + field +
                                                                                           "' is not an integer");
    }
    return t;
}

bool looks_like_header(const std::vector<std::string>& fields) {
    if (fields.empty()) return false;
    int t = 0;
    const auto& f = fields.front();
    auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), t);
    return ec != std::errc() || p != f.data() + f.size();
}

}  // namespace

NetworkPanel convert_edge_list(const std::filesystem::path& edge_list, const std::filesystem::path& presence,
                               const ConvertOptions& options) {
    auto edges = read_table(edge_list, false);
    auto pres = read_table(presence, false);
    if (!edges.rows.empty() && looks_like_header(edges.rows.front().second)) edges.rows.erase(edges.rows.begin());
    if (!pres.rows.empty() && looks_like_header(pres.rows.front().second)) pres.rows.erase(pres.rows.begin());

    std::vector<std::string> labels;
    std::vector<AttrMap> vattrs;
    std::set<std::string> known;
    if (options.vertex_attrs) {
        auto table = read_table(*options.vertex_attrs, true);
        for (auto& [line, fields] : table.rows) {
            if (fields.size() > table.header.size()) {
                throw ParseError(options.vertex_attrs->filename().string() + " line " + std::to_string(line),
                                 "more fields than header columns");
            }
            AttrMap a;
            for (std::size_t c = 1; c < table.header.size(); ++c) {
                a[table.header[c]] = c < fields.size() ? parse_cell(fields[c]) : AttrValue{};
            }
            if (!known.insert(fields[0]).second) {
                throw ValidationError("duplicate vertex label '" + fields[0] + "' in attribute file");
            }
            labels.push_back(fields[0]);
            vattrs.push_back(std::move(a));
        }
    }

    std::map<int, std::set<std::string>> present;
    for (auto& [line, fields] : pres.rows) {
        if (fields.size() > 2) {
            throw ParseError(presence.filename().string() + " line " + std::to_string(line),
                             "expected 't,label' or 't'");
        }
        int t = parse_time(fields[0], presence, line);
        auto& slot = present[t];
        if (fields.size() == 2) slot.insert(fields[1]);
    }
    std::set<std::string> extra;
    for (auto& [t, names] : present)
        for (auto& n : names)
            if (!known.contains(n)) extra.insert(n);
    for (auto& n : extra) {
        labels.push_back(n);
        vattrs.emplace_back();
    }
    RiskSet risk_set(std::move(labels), std::move(vattrs));

    std::map<int, AttrMap> tattrs;
    if (options.time_attrs) {
        auto table = read_table(*options.time_attrs, true);
        for (auto& [line, fields] : table.rows) {
            int t = parse_time(fields[0], *options.time_attrs, line);
            for (std::size_t c = 1; c < table.header.size(); ++c) {
                tattrs[t][table.header[c]] = c < fields.size() ? parse_cell(fields[c]) : AttrValue{};
            }
        }
    }

    std::map<int, std::vector<Edge>> edge_map;
    for (auto& [line, fields] : edges.rows) {
        std::string where = edge_list.filename().string() + " line " + std::to_string(line);
        if (fields.size() != 3) throw ParseError(where, "expected 't,label_i,label_j'");
        int t = parse_time(fields[0], edge_list, line);
        auto pit = present.find(t);
        for (int c = 1; c <= 2; ++c) {
            if (pit == present.end() || !pit->second.contains(fields[c])) {
                throw ValidationError(where + ": vertex '" + fields[c] + "' is not present at t=" +
                                      std::to_string(t));
            }
        }
        if (fields[1] == fields[2]) throw ValidationError(where + ": loop on vertex '" + fields[1] + "'");
        auto a = *risk_set.find(fields[1]);
        auto b = *risk_set.find(fields[2]);
        edge_map[t].push_back(Edge::make(a, b));
    }

    std::vector<Snapshot> snaps;
    for (auto& [t, names] : present) {
        Snapshot s;
        s.t = t;
        s.present = VertexSet(risk_set.size());
        for (auto& n : names) s.present.insert(*risk_set.find(n));
        auto& es = edge_map[t];
        std::sort(es.begin(), es.end());
        es.erase(std::unique(es.begin(), es.end()), es.end());
        s.edges = std::move(es);
        if (auto it = tattrs.find(t); it != tattrs.end()) s.time_attrs = it->second;
        snaps.push_back(std::move(s));
    }
    return NetworkPanel(std::move(risk_set), std::move(snaps), options.gaps, false);
}

}  // namespace dynlogit
