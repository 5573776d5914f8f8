#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynlogit/graph.hpp"
#include "dynlogit/panel.hpp"

namespace dynlogit {

// =============================================================================
// Term and model specifications
// =============================================================================

enum class Target { vertex, edge };

enum class TermKind {
    intercept,
    attr_dummy,
    mixing,
    individual_dummy,
    lag_indicator,
    lag_triangle,
    lag_cycle_embed,
    log_size,
    seasonal,
};

/// Pair classes of a mixing term on a binary attribute R.
enum class MixingClass { both, neither, mixed };

const char* to_string(TermKind kind);
const char* to_string(MixingClass mixing);
std::optional<TermKind> term_kind_from_string(const std::string& name);

struct TermParams {
    std::string attr;                  // attr_dummy, mixing; seasonal time attribute (default "day")
    std::optional<AttrValue> value;    // attr_dummy: match this value instead of truthiness
    std::optional<MixingClass> mixing; // unset: expands to all three classes
    std::string label;                 // individual_dummy on one vertex
    std::string group;                 // individual_dummy: one column per vertex with this attribute set
    std::string level;                 // seasonal: one level; empty expands over all levels
    std::string reference = "Monday";  // seasonal: level left out on expansion
    int max_len = 9;                   // lag_cycle_embed: longest cycle counted

    bool operator==(const TermParams&) const = default;
};

/// One sufficient statistic. After `expand_model` every term maps to exactly one column.
struct TermSpec {
    Target target = Target::vertex;
    TermKind kind = TermKind::intercept;
    int lag = 0;
    TermParams params;

    bool lagged() const noexcept;
    /// True when the term stands for several columns (group dummies, unspecified levels).
    bool expands() const noexcept;
    std::string column_name() const;

    bool operator==(const TermSpec&) const = default;
};

/// Throws SpecError when kind, target and parameters are inconsistent.
void check_term(const TermSpec& term);

/// Ordered vertex terms then edge terms; the order fixes the coefficient layout.
struct ModelSpec {
    std::vector<TermSpec> vertex_terms;
    std::vector<TermSpec> edge_terms;

    int max_lag() const noexcept;
    std::size_t column_count() const noexcept { return vertex_terms.size() + edge_terms.size(); }
    std::vector<std::string> column_names() const;
    bool expanded() const noexcept;

    bool operator==(const ModelSpec&) const = default;
};

ModelSpec parse_model_spec(const std::string& text);
ModelSpec load_model_spec(const std::filesystem::path& path);
std::string model_spec_to_text(const ModelSpec& spec);

/// Replaces multi-column terms by their single-column members using the panel's
/// risk set and observed time attributes. Idempotent.
ModelSpec expand_model(const ModelSpec& spec, const NetworkPanel& panel);

// =============================================================================
// Lag windows
// =============================================================================

/// How lags treat unobserved time indices. `exclude` drops any step whose lag
/// window touches a gap; `bridge` reads lag k as the k-th previous observed snapshot.
enum class LagPolicy { exclude, bridge };

const char* to_string(LagPolicy policy);
std::optional<LagPolicy> lag_policy_from_string(const std::string& name);

/// Observed snapshots at lags 1..max_lag of `t` (index k-1 is lag k). Throws GapError.
std::vector<const Snapshot*> lag_window(const NetworkPanel& panel, int t, int max_lag, LagPolicy policy);

/// Observed times whose full lag window is available, ascending.
std::vector<int> usable_times(const NetworkPanel& panel, int max_lag, LagPolicy policy);

// =============================================================================
// Graph statistics
// =============================================================================

/// Unordered neighbor pairs of p that are adjacent.
std::uint64_t triangle_count(const Snapshot& snapshot, VertexIndex p);

/// Simple cycles of length 3..max_len that use i and j as consecutive vertices,
/// counted once each: the number of simple i-j paths with 2..max_len-1 edges.
std::uint64_t pair_cycle_count(const Snapshot& snapshot, VertexIndex i, VertexIndex j, int max_len);

/// Same count over a prebuilt adjacency.
std::uint64_t pair_cycle_count(const Adjacency& adj, VertexIndex i, VertexIndex j, int max_len);

/// A snapshot used as lag input, with the derived counts the model reads from it.
class LaggedGraph {
public:
    LaggedGraph(std::shared_ptr<const Snapshot> snapshot, bool triangles, std::vector<int> cycle_lengths);

    const Snapshot& snapshot() const noexcept { return *snapshot_; }
    bool present(VertexIndex v) const { return snapshot_->present.contains(v); }
    bool has_edge(VertexIndex i, VertexIndex j) const { return snapshot_->has_edge(i, j); }
    std::uint64_t triangles(VertexIndex p) const;
    /// Cycle count of an existing lagged edge; 0 when the lagged edge is absent.
    std::uint64_t edge_cycles(VertexIndex i, VertexIndex j, int max_len) const;

private:
    std::shared_ptr<const Snapshot> snapshot_;
    std::vector<std::uint64_t> triangles_;
    std::vector<std::pair<int, std::vector<std::uint64_t>>> cycles_;  // per max_len, aligned with edges
};

/// Everything the statistics of one step can read.
struct StepContext {
    int t = 0;
    const AttrMap* time_attrs = nullptr;
    std::vector<const LaggedGraph*> lags;  // lags[k-1] is the state at lag k
    std::size_t current_size = 0;          // |V_t|, read by edge statistics only
};

/// Expanded model bound to a risk set, ready for row evaluation.
class CompiledModel {
public:
    CompiledModel(const ModelSpec& expanded, const RiskSet& risk_set);

    const ModelSpec& spec() const noexcept { return spec_; }
    std::size_t vertex_columns() const noexcept { return vertex_.size(); }
    std::size_t edge_columns() const noexcept { return edge_.size(); }
    int max_lag() const noexcept { return max_lag_; }

    bool needs_triangles(int lag) const;
    std::vector<int> cycle_lengths(int lag) const;
    std::shared_ptr<const LaggedGraph> lagged(std::shared_ptr<const Snapshot> snapshot, int lag) const;

    void vertex_features(const StepContext& ctx, VertexIndex p, std::span<double> out) const;
    void edge_features(const StepContext& ctx, VertexIndex i, VertexIndex j, std::span<double> out) const;

    double vertex_eta(const StepContext& ctx, VertexIndex p, std::span<const double> coef) const;
    double edge_eta(const StepContext& ctx, VertexIndex i, VertexIndex j, std::span<const double> coef) const;

private:
    struct Term {
        TermKind kind;
        int lag;
        std::vector<char> flag;  // per-vertex indicator for attribute and identity terms
        VertexIndex who = 0;
        MixingClass mixing = MixingClass::both;
        std::string attr;
        std::string level;
        int max_len = 9;
    };
    double vertex_value(const Term& term, const StepContext& ctx, VertexIndex p) const;
    double edge_value(const Term& term, const StepContext& ctx, VertexIndex i, VertexIndex j) const;

    ModelSpec spec_;
    std::vector<Term> vertex_;
    std::vector<Term> edge_;
    int max_lag_ = 0;
};

/// Attribute values of time `t`: observed attributes when the panel has the
/// snapshot, otherwise weekday names advance cyclically from the nearest
/// earlier observation and other attributes repeat it.
AttrMap time_attrs_at(const NetworkPanel& panel, int t);

/// Builds the step context of observed time `t`, keeping the lag inputs alive in `storage`.
StepContext observed_context(const CompiledModel& model, const NetworkPanel& panel, int t, LagPolicy policy,
                             std::vector<std::shared_ptr<const LaggedGraph>>& storage);

/// Value of one vertex statistic w at time t for vertex p. Throws GapError / SpecError.
double vertex_stat(const TermSpec& term, const NetworkPanel& panel, int t, VertexIndex p,
                   LagPolicy policy = LagPolicy::exclude);

/// Value of one edge statistic u at time t for pair (i, j) given the current presence set.
double edge_stat(const TermSpec& term, const NetworkPanel& panel, int t, VertexIndex i, VertexIndex j,
                 const VertexSet& current_present, LagPolicy policy = LagPolicy::exclude);

// =============================================================================
// Validation
// =============================================================================

enum class Severity { info, warning, error };

struct Finding {
    Severity severity;
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;
    std::vector<int> usable;  // usable transition targets
    bool ok() const;
    std::size_t transition_steps() const noexcept { return usable.size(); }
};

ValidationReport validate_model(const ModelSpec& spec, const NetworkPanel& panel,
                                 LagPolicy policy = LagPolicy::exclude);

}  // namespace dynlogit
