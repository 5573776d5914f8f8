#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dynlogit/gli.hpp"
#include "dynlogit/panel.hpp"
#include "dynlogit/solver.hpp"
#include "dynlogit/terms.hpp"

namespace dynlogit {

/// Random stream of one (seed, replicate, target time) triple.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t replicate, std::int64_t t);
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

enum class SimMode { stochastic, threshold50 };

const char* to_string(SimMode mode);

struct SimConfig {
    std::size_t replicates = 100;
    double alpha = 0.95;
    std::size_t horizon = 1;
    std::uint64_t seed = 1;
    SimMode mode = SimMode::stochastic;
    /// Pins every sampled vertex set to the full risk set.
    bool fixed_vertex_set = false;
    std::size_t threads = 0;
    LagPolicy lag_policy = LagPolicy::exclude;
    /// First projected time; defaults to one past the last panel time.
    std::optional<int> start;
    /// Keep sampled snapshots in projections, not only their GLI paths.
    bool keep_snapshots = false;

    /// Throws RangeError on m < 1, horizon < 1 or alpha outside (0, 1).
    void check() const;
};

/// Plain coefficients bound to a model, for simulating from known parameters.
FitResult fit_from_coefficients(const ModelSpec& expanded, std::vector<double> coefficients);

/// Samples the state at target time `t` from the observed lags of `t`.
Snapshot one_step_sample(const FitResult& fit, const ModelSpec& spec, const NetworkPanel& panel, int t,
                         RngStream& rng, const SimConfig& config = {});

/// Vertex present iff its probability exceeds 0.5, then edges likewise given that vertex set.
Snapshot classify_threshold(const FitResult& fit, const ModelSpec& spec, const NetworkPanel& panel, int t,
                            const SimConfig& config = {});

/// Bounds of the central alpha interval: order statistics floor((1-a)/2 m)+1 and ceil((1+a)/2 m).
std::pair<double, double> central_interval(std::vector<double> draws, double alpha);

struct GliSampleSet {
    std::vector<int> steps;
    std::vector<std::vector<GliVector>> draws;    // [step][replicate]
    std::vector<std::optional<GliVector>> observed;  // per step
};

struct IntervalCheck {
    int t = 0;
    double lower = 0.0;
    double upper = 0.0;
    double observed = 0.0;
    bool inside = false;
};

struct GliCoverage {
    std::string name;
    std::vector<IntervalCheck> steps;
    std::size_t covered = 0;
};

struct AdequacyReport {
    double alpha = 0.95;
    std::size_t replicates = 0;
    SimMode mode = SimMode::stochastic;
    bool fixed_vertex_set = false;
    std::size_t total_steps = 0;
    std::size_t degenerate_draws = 0;  // sampled graphs with fewer than 3 vertices
    std::vector<GliCoverage> glis;     // in GliVector::kNames order
};

struct OneStepResult {
    GliSampleSet samples;
    AdequacyReport report;
};

/// m one-step samples at every usable observed step, with interval coverage of the observed GLIs.
OneStepResult one_step_intervals(const FitResult& fit, const ModelSpec& spec, const NetworkPanel& panel,
                                 const SimConfig& config);

struct Trajectory {
    std::vector<int> times;
    std::vector<GliVector> gli;
    std::vector<Snapshot> snapshots;  // empty unless keep_snapshots
};

/// Autoregressive projection over config.horizon steps, one trajectory per replicate.
std::vector<Trajectory> project(const FitResult& fit, const ModelSpec& spec, const NetworkPanel& panel,
                                const SimConfig& config);

/// The panel extended by one sampled trajectory (replicate 0) of config.horizon steps.
NetworkPanel simulate_panel(const FitResult& fit, const ModelSpec& spec, const NetworkPanel& seed_panel,
                            const SimConfig& config);

std::string adequacy_report_json(const AdequacyReport& report, const std::string& manifest_json = {});
/// step,gli,lower,upper,observed,inside
std::string adequacy_report_csv(const AdequacyReport& report);
/// One row per step: t followed by every GLI.
std::string trajectory_csv(const Trajectory& trajectory);

}  // namespace dynlogit
