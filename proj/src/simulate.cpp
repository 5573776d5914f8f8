#include "dynlogit/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "dynlogit/error.hpp"
#include "dynlogit/parallel.hpp"

namespace dynlogit {

using ojson = nlohmann::ordered_json;

// -----------------------------------------------------------------------------
// Random streams
// -----------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t replicate, std::int64_t t) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ splitmix64(replicate + 0x632be59bd9b4e019ULL));
    h = splitmix64(h ^ splitmix64(static_cast<std::uint64_t>(t) + 0x85157af5ULL));
    engine_.seed(h);
}

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

const char* to_string(SimMode mode) { return mode == SimMode::stochastic ? "stochastic" : "threshold50"; }

void SimConfig::check() const {
    if (replicates < 1) throw RangeError("simulation needs at least one replicate");
    if (horizon < 1) throw RangeError("projection horizon must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw RangeError("alpha must lie in (0, 1)");
}

// -----------------------------------------------------------------------------
// Model binding and one-step sampling
// -----------------------------------------------------------------------------

FitResult fit_from_coefficients(const ModelSpec& expanded, std::vector<double> coefficients) {
    if (coefficients.size() != expanded.column_count()) {
        throw DimensionError("model has " + std::to_string(expanded.column_count()) + " columns, got " +
                             std::to_string(coefficients.size()) + " coefficients");
    }
    FitResult fit;
    fit.column_names = expanded.column_names();
    fit.vertex_columns = expanded.vertex_terms.size();
    fit.coefficients = std::move(coefficients);
    fit.std_errors.assign(fit.coefficients.size(), std::numeric_limits<double>::quiet_NaN());
    fit.converged = true;
    fit.prior = PriorSpec::none();
    fit.method = "fixed";
    return fit;
}

namespace {

struct Bound {
    CompiledModel model;
    std::vector<double> coef;
};

Bound bind(const FitResult& fit, const ModelSpec& spec, const NetworkPanel& panel) {
    auto expanded = expand_model(spec, panel);
    const auto names = expanded.column_names();
    if (names != fit.column_names) {
        std::string detail;
        for (std::size_t k = 0; k < std::max(names.size(), fit.column_names.size()); ++k) {
            const std::string a = k < names.size() ? names[k] : "<none>";
            const std::string b = k < fit.column_names.size() ? fit.column_names[k] : "<none>";
            if (a != b) {
                detail = "column " + std::to_string(k) + ": model '" + a + "' vs fit '" + b + "'";
                break;
            }
        }
        throw DimensionError("fit does not match the model (" + detail + ")");
    }
    for (std::size_t k = 0; k < fit.coefficients.size(); ++k) {
        if (!std::isfinite(fit.coefficients[k])) {
            throw ValidationError("coefficient " + fit.column_names[k] + " is not finite");
        }
    }
    return {CompiledModel(expanded, panel.risk_set()), fit.coefficients};
}

/// Builds a lag input carrying every derived count any lag of the model reads.
std::shared_ptr<const LaggedGraph> lag_input(const CompiledModel& model, std::shared_ptr<const Snapshot> s) {
    bool tri = false;
    std::vector<int> lengths;
    for (int k = 1; k <= model.max_lag(); ++k) {
        tri = tri || model.needs_triangles(k);
        auto l = model.cycle_lengths(k);
        lengths.insert(lengths.end(), l.begin(), l.end());
    }
    return std::make_shared<const LaggedGraph>(std::move(s), tri, std::move(lengths));
}

std::shared_ptr<const Snapshot> alias(const Snapshot* s) {
    return std::shared_ptr<const Snapshot>(std::shared_ptr<const Snapshot>(), s);
}

/// Draws one state given a context whose lags and time attributes are set.
Snapshot sample_state(const Bound& b, StepContext ctx, std::size_t universe, RngStream* rng, const SimConfig& config) {
    Snapshot out;
    out.t = ctx.t;
    out.present = VertexSet(universe);
    if (ctx.time_attrs) out.time_attrs = *ctx.time_attrs;
    for (VertexIndex p = 0; p < universe; ++p) {
        bool on = true;
        if (!config.fixed_vertex_set) {
            const double pr = logistic(b.model.vertex_eta(ctx, p, b.coef));
            on = config.mode == SimMode::threshold50 ? pr > 0.5 : rng->bernoulli(pr);
        }
        if (on) out.present.insert(p);
    }
    const auto members = out.present.members();
    ctx.current_size = members.size();
    for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t c = a + 1; c < members.size(); ++c) {
            const double pr = logistic(b.model.edge_eta(ctx, members[a], members[c], b.coef));
            const bool on = config.mode == SimMode::threshold50 ? pr > 0.5 : rng->bernoulli(pr);
            if (on) out.edges.push_back({members[a], members[c]});
        }
    }
    return out;
}

struct ObservedStep {
    int t;
    AttrMap attrs;
    std::vector<std::shared_ptr<const LaggedGraph>> storage;
    StepContext ctx;
};

std::unique_ptr<ObservedStep> observed_step(const Bound& b, const NetworkPanel& panel, int t, LagPolicy policy) {
    auto step = std::make_unique<ObservedStep>();
    step->t = t;
    step->attrs = time_attrs_at(panel, t);
    step->ctx = observed_context(b.model, panel, t, policy, step->storage);
    step->ctx.time_attrs = &step->attrs;
    return step;
}

}  // namespace

Snapshot one_step_sample(const FitResult& fit, const ModelSpec& spec, const NetworkPanel& panel, int t,
                         RngStream& rng, const SimConfig& config) {
    const auto b = bind(fit, spec, panel);
    const auto step = observed_step(b, panel, t, config.lag_policy);
    return sample_state(b, step->ctx, panel.risk_set().size(), &rng, config);
}

Snapshot classify_threshold(const FitResult& fit, const ModelSpec& spec, const NetworkPanel& panel, int t,
                            const SimConfig& config) {
    auto c = config;
    c.mode = SimMode::threshold50;
    const auto b = bind(fit, spec, panel);
    const auto step = observed_step(b, panel, t, c.lag_policy);
    return sample_state(b, step->ctx, panel.risk_set().size(), nullptr, c);
}

// -----------------------------------------------------------------------------
// Intervals and adequacy
// -----------------------------------------------------------------------------

std::pair<double, double> central_interval(std::vector<double> draws, double alpha) {
    if (draws.empty()) throw RangeError("central_interval: no draws");
    if (!(alpha > 0.0 && alpha < 1.0)) throw RangeError("central_interval: alpha must lie in (0, 1)");
    std::sort(draws.begin(), draws.end());
    const double m = static_cast<double>(draws.size());
    // The small offsets keep exact products such as 0.025 * 200 on the intended side.
    auto lo = static_cast<long long>(std::floor((1.0 - alpha) / 2.0 * m + 1e-9)) + 1;
    auto hi = static_cast<long long>(std::ceil((1.0 + alpha) / 2.0 * m - 1e-9));
    const auto n = static_cast<long long>(draws.size());
    lo = std::clamp(lo, 1LL, n);
    hi = std::clamp(hi, lo, n);
    return {draws[static_cast<std::size_t>(lo - 1)], draws[static_cast<std::size_t>(hi - 1)]};
}

OneStepResult one_step_intervals(const FitResult& fit, const ModelSpec& spec, const NetworkPanel& panel,
                                 const SimConfig& config) {
    config.check();
    const auto b = bind(fit, spec, panel);
    const auto times = usable_times(panel, b.model.max_lag(), config.lag_policy);
    const std::size_t m = config.replicates;
    const std::size_t universe = panel.risk_set().size();

    std::vector<std::unique_ptr<ObservedStep>> steps(times.size());
    parallel_for(times.size(), config.threads,
                 [&](std::size_t k) { steps[k] = observed_step(b, panel, times[k], config.lag_policy); });

    OneStepResult out;
    auto& samples = out.samples;
    samples.steps = times;
    samples.draws.assign(times.size(), std::vector<GliVector>(m));
    parallel_for(times.size() * m, config.threads, [&](std::size_t task) {
        const std::size_t k = task / m;
        const std::size_t r = task % m;
        RngStream rng(config.seed, r, times[k]);
        samples.draws[k][r] = gli_vector(sample_state(b, steps[k]->ctx, universe, &rng, config));
    });
    for (int t : times) samples.observed.push_back(gli_vector(*panel.find(t)));

    auto& report = out.report;
    report.alpha = config.alpha;
    report.replicates = m;
    report.mode = config.mode;
    report.fixed_vertex_set = config.fixed_vertex_set;
    report.total_steps = times.size();
    for (const auto& row : samples.draws)
        for (const auto& g : row)
            if (g.size < 3) ++report.degenerate_draws;
    for (std::size_t g = 0; g < GliVector::kCount; ++g) {
        GliCoverage cov;
        cov.name = std::string(GliVector::kNames[g]);
        std::vector<double> values(m);
        for (std::size_t k = 0; k < times.size(); ++k) {
            for (std::size_t r = 0; r < m; ++r) values[r] = samples.draws[k][r].values()[g];
            auto [lo, hi] = central_interval(values, config.alpha);
            const double obs = samples.observed[k]->values()[g];
            const bool inside = lo <= obs && obs <= hi;
            cov.steps.push_back({times[k], lo, hi, obs, inside});
            if (inside) ++cov.covered;
        }
        report.glis.push_back(std::move(cov));
    }
    return out;
}

// -----------------------------------------------------------------------------
// Projection
// -----------------------------------------------------------------------------

std::vector<Trajectory> project(const FitResult& fit, const ModelSpec& spec, const NetworkPanel& panel,
                                const SimConfig& config) {
    config.check();
    const auto b = bind(fit, spec, panel);
    if (panel.empty()) throw ValidationError("cannot project from an empty panel");
    const int start = config.start.value_or(panel.last_time() + 1);
    const int horizon = static_cast<int>(config.horizon);
    const int max_lag = b.model.max_lag();
    const std::size_t universe = panel.risk_set().size();

    // Observed snapshots strictly before the start, most recent last.
    std::vector<const Snapshot*> history;
    for (const auto& s : panel.snapshots())
        if (s.t < start) history.push_back(&s);

    // Lag k of step h (time start + h) reads sampled step h - k when h >= k, otherwise an observed snapshot.
    std::vector<std::shared_ptr<const LaggedGraph>> observed_lag(static_cast<std::size_t>(max_lag) + 1);
    for (int need = 1; need <= max_lag; ++need) {
        // `need` counts how far before the start the lag reaches.
        const Snapshot* s = nullptr;
        if (config.lag_policy == LagPolicy::exclude) {
            s = panel.find(start - need);
            if (s && s->t >= start) s = nullptr;
        } else if (static_cast<std::size_t>(need) <= history.size()) {
            s = history[history.size() - static_cast<std::size_t>(need)];
        }
        if (s) observed_lag[static_cast<std::size_t>(need)] = lag_input(b.model, alias(s));
    }
    for (int h = 0; h < std::min(horizon, max_lag); ++h) {
        for (int k = h + 1; k <= max_lag; ++k) {
            if (!observed_lag[static_cast<std::size_t>(k - h)]) throw GapError(start + h, start + h - k);
        }
    }
    std::vector<AttrMap> attrs(static_cast<std::size_t>(horizon));
    for (int h = 0; h < horizon; ++h) attrs[static_cast<std::size_t>(h)] = time_attrs_at(panel, start + h);

    std::vector<Trajectory> out(config.replicates);
    parallel_for(config.replicates, config.threads, [&](std::size_t r) {
        auto& traj = out[r];
        std::vector<std::shared_ptr<const LaggedGraph>> sampled;
        for (int h = 0; h < horizon; ++h) {
            const int t = start + h;
            StepContext ctx;
            ctx.t = t;
            ctx.time_attrs = &attrs[static_cast<std::size_t>(h)];
            for (int k = 1; k <= max_lag; ++k) {
                ctx.lags.push_back(k <= h ? sampled[static_cast<std::size_t>(h - k)].get()
                                          : observed_lag[static_cast<std::size_t>(k - h)].get());
            }
            RngStream rng(config.seed, r, t);
            auto snap = std::make_shared<const Snapshot>(sample_state(b, ctx, universe, &rng, config));
            traj.times.push_back(t);
            traj.gli.push_back(gli_vector(*snap));
            if (config.keep_snapshots) traj.snapshots.push_back(*snap);
            if (max_lag > 0) sampled.push_back(lag_input(b.model, snap));
            // Only the last max_lag sampled states are ever read again.
            if (static_cast<int>(sampled.size()) > max_lag && max_lag > 0) {
                sampled[sampled.size() - 1 - static_cast<std::size_t>(max_lag)].reset();
            }
        }
    });
    return out;
}

NetworkPanel simulate_panel(const FitResult& fit, const ModelSpec& spec, const NetworkPanel& seed_panel,
                            const SimConfig& config) {
    auto c = config;
    c.replicates = 1;
    c.keep_snapshots = true;
    const int start = c.start.value_or(seed_panel.last_time() + 1);
    c.start = start;
    auto traj = project(fit, spec, seed_panel, c);
    std::vector<Snapshot> snaps;
    for (const auto& s : seed_panel.snapshots())
        if (s.t < start) snaps.push_back(s);
    for (auto& s : traj[0].snapshots) snaps.push_back(std::move(s));
    std::vector<int> gaps;
    for (int g : seed_panel.gaps())
        if (g < start) gaps.push_back(g);
    return NetworkPanel(seed_panel.risk_set(), std::move(snaps), std::move(gaps));
}

// -----------------------------------------------------------------------------
// Reports
// -----------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string adequacy_report_json(const AdequacyReport& report, const std::string& manifest_json) {
    ojson j;
    j["alpha"] = report.alpha;
    j["replicates"] = report.replicates;
    j["mode"] = to_string(report.mode);
    j["fixed_vertex_set"] = report.fixed_vertex_set;
    j["total_steps"] = report.total_steps;
    j["degenerate_draws"] = report.degenerate_draws;
    j["interval_rule"] = "order statistics floor((1-alpha)/2*m)+1 and ceil((1+alpha)/2*m); boundary counts as inside";
    ojson glis = ojson::object();
    for (const auto& g : report.glis) {
        ojson steps = ojson::array();
        for (const auto& s : g.steps) {
            steps.push_back({{"t", s.t}, {"lower", s.lower}, {"upper", s.upper}, {"observed", s.observed},
                             {"inside", s.inside}});
        }
        glis[g.name] = {{"steps", steps}, {"summary", {{"covered", g.covered}, {"total", g.steps.size()}}}};
    }
    j["glis"] = glis;
    if (!manifest_json.empty()) j["manifest"] = ojson::parse(manifest_json);
    return j.dump(2) + "\n";
}

std::string adequacy_report_csv(const AdequacyReport& report) {
    std::ostringstream s;
    s << "step,gli,lower,upper,observed,inside\n";
    for (const auto& g : report.glis) {
        for (const auto& st : g.steps) {
            s << st.t << ',' << g.name << ',' << fmt(st.lower) << ',' << fmt(st.upper) << ',' << fmt(st.observed)
              << ',' << (st.inside ? 1 : 0) << '\n';
        }
    }
    return s.str();
}

std::string trajectory_csv(const Trajectory& trajectory) {
    std::ostringstream s;
    s << "t";
    for (auto n : GliVector::kNames) s << ',' << n;
    s << '\n';
    for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
        s << trajectory.times[k];
        for (double v : trajectory.gli[k].values()) s << ',' << fmt(v);
        s << '\n';
    }
    return s.str();
}

}  // namespace dynlogit
