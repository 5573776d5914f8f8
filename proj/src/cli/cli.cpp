#include "dynlogit/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dynlogit/design.hpp"
#include "dynlogit/error.hpp"
#include "dynlogit/gli.hpp"
#include "dynlogit/panel.hpp"
#include "dynlogit/simulate.hpp"
#include "dynlogit/solver.hpp"
#include "dynlogit/synthetic.hpp"
#include "dynlogit/terms.hpp"
#include "text_util.hpp"

namespace dynlogit::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Globals {
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::string out_dir;
    std::string format = "json";
};

/// Raised for outcomes that are not errors but still need a nonzero exit.
struct Outcome {
    int code = kOk;
    void worsen(int c) {
        // Separation outranks plain non-convergence.
        if (c == kSeparation || (c == kConvergence && code == kOk)) code = c;
    }
};

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

class Run {
public:
    Run(std::string command, const Globals& g, std::ostream& out, std::ostream& err)
        : command_(std::move(command)), g_(g), out_(out), err_(err), started_(utc_now()) {
        manifest_["tool"] = "dynlogit";
        manifest_["version"] = kVersion;
        manifest_["command"] = command_;
        manifest_["inputs"] = ojson::object();
        manifest_["config"] = ojson::object();
        manifest_["config"]["seed"] = g.seed;
    }

    ojson& manifest() { return manifest_; }
    void input(const std::string& key, const ojson& value) { manifest_["inputs"][key] = value; }
    void config(const std::string& key, const ojson& value) { manifest_["config"][key] = value; }

    fs::path out_dir() const {
        fs::path dir = g_.out_dir.empty() ? fs::path(".") : fs::path(g_.out_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
        return dir;
    }

    void write(const fs::path& path, const std::string& content) {
        detail::write_file(path, content);
        outputs_.push_back(path.filename().string());
    }

    std::string manifest_text() const { return manifest_.dump(); }

    /// Sidecar with wall-clock times; kept apart so reports stay byte-identical.
    void finish() {
        ojson side = manifest_;
        side["outputs"] = outputs_;
        side["started_at"] = started_;
        side["finished_at"] = utc_now();
        detail::write_file(out_dir() / (command_ + ".manifest.json"), side.dump(2) + "\n");
    }

    std::ostream& out() { return out_; }
    std::ostream& err() { return err_; }
    const Globals& globals() const { return g_; }

private:
    std::string command_;
    const Globals& g_;
    std::ostream& out_;
    std::ostream& err_;
    std::string started_;
    ojson manifest_;
    std::vector<std::string> outputs_;
};

LagPolicy parse_lag_policy(const std::string& s) {
    auto p = lag_policy_from_string(s);
    if (!p) throw SpecError("unknown lag policy '" + s + "' (expected exclude or bridge)");
    return *p;
}

void report_findings(Run& run, const ValidationReport& report, const std::string& what) {
    std::string errors;
    for (const auto& f : report.findings) {
        if (f.severity == Severity::warning) run.err() << "warning: " << what << ": " << f.message << "\n";
        if (f.severity == Severity::error) errors += (errors.empty() ? "" : "; ") + f.message;
    }
    if (!errors.empty()) throw ValidationError(what + ": " + errors);
}

std::string unique_stem(const std::string& path, std::set<std::string>& used) {
    std::string stem = fs::path(path).stem().string();
    std::string s = stem;
    for (int k = 2; used.contains(s); ++k) s = stem + "_" + std::to_string(k);
    used.insert(s);
    return s;
}

int fit_code(const FitResult& f) {
    if (f.separation_warning) return kSeparation;
    if (!f.converged) return kConvergence;
    return kOk;
}

// -----------------------------------------------------------------------------
// fit
// -----------------------------------------------------------------------------

struct FitArgs {
    std::string panel;
    std::vector<std::string> specs;
    std::string prior = "cauchy:scale=2.5,df=1";
    double tolerance = 1e-8;
    std::size_t max_iter = 100;
    std::string lag_policy = "exclude";
    bool dump_design = false;
    bool no_parts = false;
};

int cmd_fit(const FitArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
    Run run("fit", g, out, err);
    const auto panel = load_panel(a.panel);
    const auto prior = parse_prior(a.prior);
    const auto policy = parse_lag_policy(a.lag_policy);
    run.input("panel", a.panel);
    run.input("specs", a.specs);
    run.config("prior", prior.describe());
    run.config("tolerance", a.tolerance);
    run.config("max_iter", a.max_iter);
    run.config("lag_policy", to_string(policy));
    run.config("bic_n_obs", "total Bernoulli rows of the fitted design");

    SolverOptions opts;
    opts.tolerance = a.tolerance;
    opts.max_iter = a.max_iter;
    opts.threads = g.threads;
    DesignOptions dopts{policy, g.threads, 0};

    const auto dir = run.out_dir();
    Outcome outcome;
    std::set<std::string> used;
    struct Row {
        std::string spec;
        std::string stem;
        FitResult fit;
    };
    std::vector<Row> rows;
    // All specs share the usable steps of the deepest lag so their criteria compare like with like.
    std::vector<ModelSpec> specs;
    for (const auto& spec_path : a.specs) {
        specs.push_back(load_model_spec(spec_path));
        report_findings(run, validate_model(specs.back(), panel, policy), spec_path);
        dopts.window_lag = std::max(dopts.window_lag, specs.back().max_lag());
    }
    run.config("window_lag", dopts.window_lag);
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const auto& spec_path = a.specs[k];
        const auto& spec = specs[k];
        const auto dm = build_design(panel, spec, dopts);
        const auto stem = unique_stem(spec_path, used);
        auto joint = fit(dm, prior, opts);
        run.config("spec", spec_path);
        const auto manifest = run.manifest_text();
        run.write(dir / (stem + ".fit.json"), fit_report_json(joint, manifest));
        run.write(dir / (stem + ".fit.csv"), fit_table_csv(joint));
        outcome.worsen(fit_code(joint));
        if (!a.no_parts) {
            auto [vpart, epart] = split_design(dm);
            for (auto* part : {&vpart, &epart}) {
                const std::string name = part == &vpart ? "vertex" : "edge";
                if (part->rows() == 0) {
                    err << "warning: " << spec_path << ": no " << name << " rows; part report skipped\n";
                    continue;
                }
                auto pf = fit(*part, prior, opts);
                run.write(dir / (stem + "." + name + ".fit.json"), fit_report_json(pf, manifest));
                run.write(dir / (stem + "." + name + ".fit.csv"), fit_table_csv(pf));
            }
        }
        if (a.dump_design) write_design_dump(dm, dir / (stem + ".design"));
        for (const auto& d : joint.diagnostics) err << "note: " << spec_path << ": " << d << "\n";
        rows.push_back({spec_path, stem, std::move(joint)});
    }
    run.manifest()["inputs"].erase("spec");
    run.manifest()["config"].erase("spec");

    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return rows[x].fit.bic < rows[y].fit.bic; });
    ojson ranking = ojson::array();
    std::ostringstream csv;
    csv << "rank,spec,bic,aic,log_likelihood,parameters,n_obs,converged\n";
    csv.precision(10);
    for (std::size_t r = 0; r < order.size(); ++r) {
        const auto& row = rows[order[r]];
        ranking.push_back({{"rank", r + 1},
                           {"spec", row.spec},
                           {"report", row.stem + ".fit.json"},
                           {"bic", row.fit.bic},
                           {"aic", row.fit.aic},
                           {"log_likelihood", row.fit.log_likelihood},
                           {"parameters", row.fit.parameters()},
                           {"n_obs", row.fit.n_obs},
                           {"converged", row.fit.converged}});
        csv << r + 1 << ',' << row.spec << ',' << row.fit.bic << ',' << row.fit.aic << ',' << row.fit.log_likelihood
            << ',' << row.fit.parameters() << ',' << row.fit.n_obs << ',' << (row.fit.converged ? 1 : 0) << '\n';
    }
    if (rows.size() > 1) {
        ojson doc{{"criterion", "bic"}, {"ranking", ranking}, {"manifest", run.manifest()}};
        run.write(dir / "ranking.json", doc.dump(2) + "\n");
        run.write(dir / "ranking.csv", csv.str());
    }
    if (g.format == "csv") out << csv.str();
    else out << ranking.dump(2) << "\n";
    run.finish();
    return outcome.code;
}

// -----------------------------------------------------------------------------
// adequacy / project
// -----------------------------------------------------------------------------

struct SimArgs {
    std::string panel;
    std::string spec;
    std::string fit;
    std::size_t sims = 100;
    double alpha = 0.95;
    std::size_t horizon = 5;
    std::optional<int> start;
    bool fixed_vertex_set = false;
    bool dump_graphs = false;
    std::string mode = "stochastic";
    std::string lag_policy = "exclude";
};

SimConfig sim_config(const SimArgs& a, const Globals& g, Run& run) {
    SimConfig c;
    c.replicates = a.sims;
    c.alpha = a.alpha;
    c.horizon = a.horizon;
    c.seed = g.seed;
    c.threads = g.threads;
    c.fixed_vertex_set = a.fixed_vertex_set;
    c.start = a.start;
    c.lag_policy = parse_lag_policy(a.lag_policy);
    if (a.mode == "stochastic") c.mode = SimMode::stochastic;
    else if (a.mode == "threshold50") c.mode = SimMode::threshold50;
    else throw SpecError("unknown mode '" + a.mode + "' (expected stochastic or threshold50)");
    c.check();
    run.input("panel", a.panel);
    run.input("spec", a.spec);
    run.input("fit", a.fit);
    run.config("sims", c.replicates);
    run.config("mode", to_string(c.mode));
    run.config("fixed_vertex_set", c.fixed_vertex_set);
    run.config("lag_policy", to_string(c.lag_policy));
    return c;
}

int cmd_adequacy(const SimArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
    Run run("adequacy", g, out, err);
    auto config = sim_config(a, g, run);
    run.config("alpha", config.alpha);
    const auto panel = load_panel(a.panel);
    const auto spec = load_model_spec(a.spec);
    const auto fitted = load_fit_report(a.fit);
    const auto result = one_step_intervals(fitted, spec, panel, config);
    const auto dir = run.out_dir();
    run.write(dir / "adequacy.json", adequacy_report_json(result.report, run.manifest_text()));
    run.write(dir / "adequacy.csv", adequacy_report_csv(result.report));
    if (g.format == "csv") {
        out << "gli,covered,total\n";
        for (const auto& gc : result.report.glis) out << gc.name << ',' << gc.covered << ',' << gc.steps.size() << '\n';
    } else {
        ojson s = ojson::object();
        for (const auto& gc : result.report.glis) s[gc.name] = {{"covered", gc.covered}, {"total", gc.steps.size()}};
        out << s.dump(2) << "\n";
    }
    run.finish();
    return kOk;
}

int cmd_project(const SimArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
    Run run("project", g, out, err);
    auto config = sim_config(a, g, run);
    config.keep_snapshots = a.dump_graphs;
    run.config("horizon", config.horizon);
    if (config.start) run.config("start", *config.start);
    run.config("dump_graphs", a.dump_graphs);
    const auto panel = load_panel(a.panel);
    const auto spec = load_model_spec(a.spec);
    const auto fitted = load_fit_report(a.fit);
    const auto trajectories = project(fitted, spec, panel, config);
    const auto dir = run.out_dir();
    ojson paths = ojson::array();
    for (std::size_t r = 0; r < trajectories.size(); ++r) {
        const auto& tr = trajectories[r];
        run.write(dir / ("projection_rep" + std::to_string(r) + ".csv"), trajectory_csv(tr));
        ojson steps = ojson::array();
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            ojson step{{"t", tr.times[k]}};
            const auto v = tr.gli[k].values();
            for (std::size_t i = 0; i < GliVector::kCount; ++i) step[std::string(GliVector::kNames[i])] = v[i];
            steps.push_back(step);
        }
        paths.push_back({{"replicate", r}, {"steps", steps}});
        if (a.dump_graphs) {
            NetworkPanel dumped(panel.risk_set(), tr.snapshots);
            run.write(dir / ("projection_rep" + std::to_string(r) + ".panel.json"), panel_to_text(dumped));
        }
    }
    ojson doc{{"horizon", config.horizon}, {"replicates", config.replicates}, {"paths", paths},
              {"manifest", run.manifest()}};
    run.write(dir / "projection.json", doc.dump(2) + "\n");
    if (g.format == "csv") {
        for (const auto& tr : trajectories) out << trajectory_csv(tr);
    } else {
        out << paths.dump(2) << "\n";
    }
    run.finish();
    return kOk;
}

// -----------------------------------------------------------------------------
// convert / gli / validate / synthesize
// -----------------------------------------------------------------------------

struct ConvertArgs {
    std::string edges;
    std::string presence;
    std::string out;
    std::string vertex_attrs;
    std::string time_attrs;
    std::vector<int> gaps;
};

int cmd_convert(const ConvertArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
    Run run("convert", g, out, err);
    ConvertOptions opts;
    if (!a.vertex_attrs.empty()) opts.vertex_attrs = a.vertex_attrs;
    if (!a.time_attrs.empty()) opts.time_attrs = a.time_attrs;
    opts.gaps = a.gaps;
    const auto panel = convert_edge_list(a.edges, a.presence, opts);
    const fs::path target = a.out.empty() ? run.out_dir() / "panel.json" : fs::path(a.out);
    run.write(target, panel_to_text(panel));
    out << "wrote " << target.string() << " (" << panel.risk_set().size() << " vertices, "
        << panel.snapshots().size() << " snapshots, " << panel.gaps().size() << " gaps)\n";
    run.finish();
    return kOk;
}

int cmd_gli(const std::string& panel_path, const std::vector<int>& times, const Globals& g, std::ostream& out) {
    const auto panel = load_panel(panel_path);
    std::vector<const Snapshot*> snaps;
    if (times.empty()) {
        for (const auto& s : panel.snapshots()) snaps.push_back(&s);
    } else {
        for (int t : times) {
            const auto* s = panel.find(t);
            if (!s) throw RangeError("t=" + std::to_string(t) + " is not an observed snapshot");
            snaps.push_back(s);
        }
    }
    if (g.format == "csv") {
        Trajectory tr;
        for (const auto* s : snaps) {
            tr.times.push_back(s->t);
            tr.gli.push_back(gli_vector(*s));
        }
        out << trajectory_csv(tr);
    } else {
        ojson arr = ojson::array();
        for (const auto* s : snaps) {
            ojson o{{"t", s->t}};
            const auto v = gli_vector(*s).values();
            for (std::size_t i = 0; i < GliVector::kCount; ++i) o[std::string(GliVector::kNames[i])] = v[i];
            arr.push_back(o);
        }
        out << arr.dump(2) << "\n";
    }
    return kOk;
}

int cmd_validate(const std::string& panel_path, const std::string& spec_path, const std::string& lag_policy,
                 std::ostream& out) {
    const auto panel = load_panel(panel_path);
    const auto spec = load_model_spec(spec_path);
    const auto report = validate_model(spec, panel, parse_lag_policy(lag_policy));
    for (const auto& f : report.findings) {
        const char* s = f.severity == Severity::error ? "error" : f.severity == Severity::warning ? "warning" : "info";
        out << s << ": " << f.message << "\n";
    }
    if (report.ok()) {
        out << "columns:";
        for (const auto& n : expand_model(spec, panel).column_names()) out << ' ' << n;
        out << "\n";
    }
    return report.ok() ? kOk : kValidation;
}

int cmd_synthesize(const std::string& out_path, const Globals& g, std::ostream& out, std::ostream& err) {
    Run run("synthesize", g, out, err);
    const auto syn = beach_like_panel(g.seed);
    const fs::path target = out_path.empty() ? run.out_dir() / "beach_like.panel.json" : fs::path(out_path);
    run.write(target, panel_to_text(syn.panel));
    ojson truth = ojson::object();
    const auto names = syn.spec.column_names();
    for (std::size_t k = 0; k < names.size(); ++k) truth[names[k]] = syn.coefficients[k];
    fs::path truth_path = target;
    truth_path.replace_extension();
    truth_path += ".truth.json";
    run.write(truth_path, ojson{{"coefficients", truth}, {"manifest", run.manifest()}}.dump(2) + "\n");
    out << "wrote " << target.string() << " and " << truth_path.string() << "\n";
    run.finish();
    return kOk;
}

// -----------------------------------------------------------------------------
// Errors
// -----------------------------------------------------------------------------

int report_error(std::ostream& err, const char* kind, const std::string& message, int code) {
    ojson e{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
    err << e.dump() << "\n";
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dynamic network logistic regression: fit, check and project temporal network panels", "dynlogit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    if (const char* env = std::getenv("DYNLOGIT_OUT_DIR")) g.out_dir = env;
    app.add_option("--seed", g.seed, "Root seed of every random stream")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker cap (0 = all cores); never changes output")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "Output directory (default $DYNLOGIT_OUT_DIR or .)");
    app.add_option("--format", g.format, "Format of stdout summaries")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    FitArgs fa;
    auto* fit_cmd = app.add_subcommand("fit", "Fit one or more model specs and rank them by BIC");
    fit_cmd->add_option("panel", fa.panel, "Panel file")->required();
    fit_cmd->add_option("--spec,-s", fa.specs, "Model spec file (repeatable)")->required();
    fit_cmd->add_option("--prior", fa.prior, "none | cauchy[:scale=..,df=..] | t:scale=..,df=..,center=..")
        ->capture_default_str();
    fit_cmd->add_option("--tolerance", fa.tolerance, "Gradient norm tolerance")->capture_default_str();
    fit_cmd->add_option("--max-iter", fa.max_iter, "Newton iteration cap")->capture_default_str();
    fit_cmd->add_option("--lag-policy", fa.lag_policy, "exclude | bridge")->capture_default_str();
    fit_cmd->add_flag("--dump-design", fa.dump_design, "Also write the design as sparse triplets");
    fit_cmd->add_flag("--no-parts", fa.no_parts, "Skip the separate vertex and edge fits");

    SimArgs aa;
    auto* adq_cmd = app.add_subcommand("adequacy", "One-step simulation intervals of every GLI");
    adq_cmd->add_option("panel", aa.panel, "Panel file")->required();
    adq_cmd->add_option("--spec,-s", aa.spec, "Model spec file")->required();
    adq_cmd->add_option("--fit,-f", aa.fit, "Fit report of the spec")->required();
    adq_cmd->add_option("--sims", aa.sims, "Replicates per step")->capture_default_str();
    adq_cmd->add_option("--alpha", aa.alpha, "Central coverage level")->capture_default_str();
    adq_cmd->add_option("--mode", aa.mode, "stochastic | threshold50")->capture_default_str();
    adq_cmd->add_option("--lag-policy", aa.lag_policy, "exclude | bridge")->capture_default_str();
    adq_cmd->add_flag("--fixed-vertex-set", aa.fixed_vertex_set, "Pin every sampled vertex set to the risk set");

    SimArgs pa;
    pa.sims = 1;
    auto* prj_cmd = app.add_subcommand("project", "Autoregressive n-step projection");
    prj_cmd->add_option("panel", pa.panel, "Panel file")->required();
    prj_cmd->add_option("--spec,-s", pa.spec, "Model spec file")->required();
    prj_cmd->add_option("--fit,-f", pa.fit, "Fit report of the spec")->required();
    prj_cmd->add_option("--horizon", pa.horizon, "Steps to project")->capture_default_str();
    prj_cmd->add_option("--sims", pa.sims, "Replicate trajectories")->capture_default_str();
    prj_cmd->add_option("--start", pa.start, "First projected time (default: after the last observation)");
    prj_cmd->add_option("--mode", pa.mode, "stochastic | threshold50")->capture_default_str();
    prj_cmd->add_option("--lag-policy", pa.lag_policy, "exclude | bridge")->capture_default_str();
    prj_cmd->add_flag("--fixed-vertex-set", pa.fixed_vertex_set, "Pin every sampled vertex set to the risk set");
    prj_cmd->add_flag("--dump-graphs", pa.dump_graphs, "Write sampled snapshots in panel format");

    ConvertArgs ca;
    auto* cnv_cmd = app.add_subcommand("convert", "Build a panel file from an edge list and a presence list");
    cnv_cmd->add_option("edges", ca.edges, "Edge list: t,label_i,label_j")->required();
    cnv_cmd->add_option("presence", ca.presence, "Presence list: t,label")->required();
    cnv_cmd->add_option("--out,-o", ca.out, "Output panel (default <out-dir>/panel.json)");
    cnv_cmd->add_option("--vertex-attrs", ca.vertex_attrs, "CSV: label,<attr>,...");
    cnv_cmd->add_option("--time-attrs", ca.time_attrs, "CSV: t,<attr>,...");
    cnv_cmd->add_option("--gap", ca.gaps, "Unobserved time index (repeatable)");

    std::string gli_panel;
    std::vector<int> gli_times;
    auto* gli_cmd = app.add_subcommand("gli", "Print the GLI vector of observed snapshots");
    gli_cmd->add_option("panel", gli_panel, "Panel file")->required();
    gli_cmd->add_option("--t", gli_times, "Time index (repeatable; default all)");

    std::string val_panel, val_spec, val_policy = "exclude";
    auto* val_cmd = app.add_subcommand("validate", "Check a model spec against a panel");
    val_cmd->add_option("panel", val_panel, "Panel file")->required();
    val_cmd->add_option("--spec,-s", val_spec, "Model spec file")->required();
    val_cmd->add_option("--lag-policy", val_policy, "exclude | bridge")->capture_default_str();

    std::string syn_out;
    auto* syn_cmd = app.add_subcommand("synthesize", "Write a beach-shaped synthetic panel and its true coefficients");
    syn_cmd->add_option("--out,-o", syn_out, "Output panel (default <out-dir>/beach_like.panel.json)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        return report_error(err, "usage", e.what(), kUsage);
    }

    try {
        if (fit_cmd->parsed()) return cmd_fit(fa, g, out, err);
        if (adq_cmd->parsed()) return cmd_adequacy(aa, g, out, err);
        if (prj_cmd->parsed()) return cmd_project(pa, g, out, err);
        if (cnv_cmd->parsed()) return cmd_convert(ca, g, out, err);
        if (gli_cmd->parsed()) return cmd_gli(gli_panel, gli_times, g, out);
        if (val_cmd->parsed()) return cmd_validate(val_panel, val_spec, val_policy, out);
        if (syn_cmd->parsed()) return cmd_synthesize(syn_out, g, out, err);
    } catch (const ParseError& e) {
        return report_error(err, "parse", e.what(), kParse);
    } catch (const IoError& e) {
        return report_error(err, "io", e.what(), kIo);
    } catch (const Error& e) {
        return report_error(err, "validation", e.what(), kValidation);
    } catch (const std::exception& e) {
        return report_error(err, "internal", e.what(), kValidation);
    }
    return kUsage;
}

}  // namespace dynlogit::cli
