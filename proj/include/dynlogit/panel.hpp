#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace dynlogit {

// =============================================================================
// Attributes
// =============================================================================

/// Vertex- or time-level covariate value. `std::monostate` is an explicit null.
using AttrValue = std::variant<std::monostate, bool, std::int64_t, double, std::string>;
using AttrMap = std::map<std::string, AttrValue>;

/// Dummy-coding rule: null, false, 0 and "" are false; everything else is true.
bool attr_truthy(const AttrValue& value);
std::string attr_to_string(const AttrValue& value);
bool attr_equals(const AttrValue& a, const AttrValue& b);

// =============================================================================
// Vertices
// =============================================================================

using VertexIndex = std::uint32_t;

struct VertexRef {
    VertexIndex index = 0;
    std::string label;

    bool operator==(const VertexRef&) const = default;
};

/// Membership bitset over a risk set.
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(std::size_t universe);
    VertexSet(std::size_t universe, std::span<const VertexIndex> members);

    static VertexSet full(std::size_t universe);

    std::size_t universe() const noexcept { return universe_; }
    bool contains(VertexIndex v) const noexcept {
        return v < universe_ && ((words_[v >> 6] >> (v & 63)) & 1u);
    }
    void insert(VertexIndex v);
    void erase(VertexIndex v);
    std::size_t count() const noexcept;
    bool empty() const noexcept { return count() == 0; }
    std::vector<VertexIndex> members() const;

    bool operator==(const VertexSet&) const = default;

private:
    std::size_t universe_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Undirected edge stored with the smaller index first.
struct Edge {
    VertexIndex i = 0;
    VertexIndex j = 0;

    static Edge make(VertexIndex a, VertexIndex b) { return a < b ? Edge{a, b} : Edge{b, a}; }
    auto operator<=>(const Edge&) const = default;
};

/// The finite vertex universe (V_max) with its static attribute table.
class RiskSet {
public:
    RiskSet() = default;
    /// Throws ValidationError on duplicate labels. Attribute columns present on
    /// any vertex are filled with explicit nulls on the others.
    explicit RiskSet(std::vector<std::string> labels, std::vector<AttrMap> attrs = {});

    std::size_t size() const noexcept { return labels_.size(); }
    const std::string& label(VertexIndex v) const { return labels_.at(v); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const AttrMap& attrs(VertexIndex v) const { return attrs_.at(v); }
    VertexRef ref(VertexIndex v) const { return {v, labels_.at(v)}; }
    std::optional<VertexIndex> find(const std::string& label) const;

    bool has_attribute(const std::string& name) const;
    /// Null when the attribute column does not exist.
    const AttrValue* attr(VertexIndex v, const std::string& name) const;

    bool operator==(const RiskSet& other) const {
        return labels_ == other.labels_ && attrs_ == other.attrs_;
    }

private:
    std::vector<std::string> labels_;
    std::vector<AttrMap> attrs_;
    std::unordered_map<std::string, VertexIndex> index_;
};

// =============================================================================
// Snapshots and panels
// =============================================================================

/// Network state Z_t = (Y_t, V_t) at one observed time index.
struct Snapshot {
    int t = 0;
    VertexSet present;
    std::vector<Edge> edges;  // sorted, i < j, unique
    AttrMap time_attrs;

    bool has_edge(VertexIndex a, VertexIndex b) const;
    /// Position of the edge in `edges`, if present.
    std::optional<std::size_t> edge_position(VertexIndex a, VertexIndex b) const;

    bool operator==(const Snapshot&) const = default;
};

/// Builds a snapshot, canonicalizing edge order. Throws ValidationError on
/// loops, duplicate pairs or edges touching absent vertices.
Snapshot make_snapshot(int t, const VertexSet& present, std::vector<Edge> edges, AttrMap time_attrs = {});

/// Immutable time-ordered panel of snapshots over a fixed risk set.
class NetworkPanel {
public:
    NetworkPanel() = default;
    /// Sorts snapshots and gaps and validates every invariant.
    NetworkPanel(RiskSet risk_set, std::vector<Snapshot> snapshots, std::vector<int> gaps = {},
                 bool directed = false);

    const RiskSet& risk_set() const noexcept { return risk_set_; }
    const std::vector<Snapshot>& snapshots() const noexcept { return snapshots_; }
    const std::vector<int>& gaps() const noexcept { return gaps_; }
    bool directed() const noexcept { return directed_; }

    bool empty() const noexcept { return snapshots_.empty(); }
    const Snapshot* find(int t) const;
    std::optional<std::size_t> position(int t) const;
    bool is_gap(int t) const;

    /// Smallest / largest time index covered by snapshots or gaps.
    int first_time() const;
    int last_time() const;

    bool operator==(const NetworkPanel& other) const = default;

private:
    RiskSet risk_set_;
    std::vector<Snapshot> snapshots_;
    std::vector<int> gaps_;
    bool directed_ = false;
};

// =============================================================================
// File ingestion
// =============================================================================

NetworkPanel load_panel(const std::filesystem::path& path);
void save_panel(const NetworkPanel& panel, const std::filesystem::path& path);

/// Canonical text form written by save_panel.
std::string panel_to_text(const NetworkPanel& panel);
NetworkPanel panel_from_text(const std::string& text);

/// Restriction to [t_from, t_to] with the same risk set. Throws RangeError.
NetworkPanel subpanel(const NetworkPanel& panel, int t_from, int t_to);

struct ConvertOptions {
    /// Optional vertex attribute file: CSV header "label,<attr>,..." fixing risk-set order.
    std::optional<std::filesystem::path> vertex_attrs;
    /// Optional time attribute file: CSV header "t,<attr>,...".
    std::optional<std::filesystem::path> time_attrs;
    std::vector<int> gaps;
};

/// Builds a panel from a 3-column edge list (t, label_i, label_j) and a
/// presence list (t, label). A presence line with only `t` declares an
/// observed time with no vertices present.
NetworkPanel convert_edge_list(const std::filesystem::path& edge_list, const std::filesystem::path& presence,
                               const ConvertOptions& options = {});

}  // namespace dynlogit
