#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "dynlogit/panel.hpp"

namespace dynlogit {

/// Undirected triad census: triples with exactly 0, 1, 2 and 3 edges.
using TriadCensus = std::array<std::uint64_t, 4>;

/// Graph-level indices of one snapshot, computed over present vertices only.
///
/// Degenerate sizes follow fixed conventions so every simulated day yields a
/// finite vector: density is 0 for n < 2, centralization is 0 for n < 3,
/// connectedness is 1 for n <= 1 and the census is all zeros for n < 3.
struct GliVector {
    std::uint64_t size = 0;
    double density = 0.0;
    double mean_degree = 0.0;
    double degree_centralization = 0.0;
    double connectedness = 1.0;
    TriadCensus triad_census{};

    static constexpr std::size_t kCount = 9;
    static constexpr std::array<std::string_view, kCount> kNames = {
        "network_size", "density",  "mean_degree", "degree_centralization", "connectedness",
        "triad_0",      "triad_1",  "triad_2",     "triad_3"};

    std::array<double, kCount> values() const;
    bool operator==(const GliVector&) const = default;
};

double density(const Snapshot& snapshot);
double mean_degree(const Snapshot& snapshot);
double degree_centralization(const Snapshot& snapshot);
double krackhardt_connectedness(const Snapshot& snapshot);
TriadCensus triad_census(const Snapshot& snapshot);
GliVector gli_vector(const Snapshot& snapshot);

/// True when some index of the snapshot falls back to a degenerate-size convention.
bool gli_degenerate(const Snapshot& snapshot);

}  // namespace dynlogit
