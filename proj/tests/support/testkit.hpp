#pragma once

// Brute-force oracles and small generators shared by the unit and acceptance tests.
// Everything here works from a dense adjacency matrix and shares no code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "dynlogit/design.hpp"
#include "dynlogit/panel.hpp"

namespace testkit {

using dynlogit::Edge;
using dynlogit::Snapshot;
using dynlogit::VertexIndex;
using dynlogit::VertexSet;

struct DenseGraph {
    std::size_t n = 0;
    std::vector<std::vector<char>> adj;

    explicit DenseGraph(std::size_t size) : n(size), adj(size, std::vector<char>(size, 0)) {}
    void add(std::size_t a, std::size_t b) { adj[a][b] = adj[b][a] = 1; }
    std::size_t edges() const {
        std::size_t m = 0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) m += adj[a][b];
        return m;
    }
    std::size_t degree(std::size_t v) const {
        std::size_t d = 0;
        for (std::size_t u = 0; u < n; ++u) d += adj[v][u];
        return d;
    }
};

/// Snapshot over `universe` vertices where `members[k]` plays dense vertex k.
inline Snapshot embed(const DenseGraph& g, std::size_t universe, const std::vector<VertexIndex>& members, int t = 1) {
    VertexSet present(universe);
    for (auto v : members) present.insert(v);
    std::vector<Edge> edges;
    for (std::size_t a = 0; a < g.n; ++a)
        for (std::size_t b = a + 1; b < g.n; ++b)
            if (g.adj[a][b]) edges.push_back(Edge::make(members[a], members[b]));
    return dynlogit::make_snapshot(t, present, edges);
}

inline Snapshot embed(const DenseGraph& g) {
    std::vector<VertexIndex> members(g.n);
    for (std::size_t k = 0; k < g.n; ++k) members[k] = static_cast<VertexIndex>(k);
    return embed(g, g.n, members);
}

inline DenseGraph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DenseGraph g(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (u(rng) < p) g.add(a, b);
    return g;
}

inline DenseGraph graph_from_mask(std::size_t n, std::uint64_t mask) {
    DenseGraph g(n);
    std::size_t bit = 0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b, ++bit)
            if ((mask >> bit) & 1u) g.add(a, b);
    return g;
}

// -----------------------------------------------------------------------------
// GLI oracles, straight from the definitions
// -----------------------------------------------------------------------------

inline double oracle_density(const DenseGraph& g) {
    if (g.n < 2) return 0.0;
    return static_cast<double>(g.edges()) / (static_cast<double>(g.n) * static_cast<double>(g.n - 1) / 2.0);
}

inline double oracle_mean_degree(const DenseGraph& g) {
    if (g.n == 0) return 0.0;
    double s = 0.0;
    for (std::size_t v = 0; v < g.n; ++v) s += static_cast<double>(g.degree(v));
    return s / static_cast<double>(g.n);
}

inline double oracle_centralization(const DenseGraph& g) {
    if (g.n < 3) return 0.0;
    std::size_t dmax = 0;
    for (std::size_t v = 0; v < g.n; ++v) dmax = std::max(dmax, g.degree(v));
    double s = 0.0;
    for (std::size_t v = 0; v < g.n; ++v) s += static_cast<double>(dmax - g.degree(v));
    return s / (static_cast<double>(g.n - 1) * static_cast<double>(g.n - 2));
}

inline double oracle_connectedness(const DenseGraph& g) {
    if (g.n <= 1) return 1.0;
    auto reach = g.adj;
    for (std::size_t v = 0; v < g.n; ++v) reach[v][v] = 1;
    for (std::size_t k = 0; k < g.n; ++k)
        for (std::size_t a = 0; a < g.n; ++a)
            for (std::size_t b = 0; b < g.n; ++b)
                if (reach[a][k] && reach[k][b]) reach[a][b] = 1;
    std::size_t pairs = 0;
    std::size_t joined = 0;
    for (std::size_t a = 0; a < g.n; ++a)
        for (std::size_t b = a + 1; b < g.n; ++b) {
            ++pairs;
            joined += reach[a][b];
        }
    return static_cast<double>(joined) / static_cast<double>(pairs);
}

inline std::array<std::uint64_t, 4> oracle_triads(const DenseGraph& g) {
    std::array<std::uint64_t, 4> c{0, 0, 0, 0};
    for (std::size_t a = 0; a < g.n; ++a)
        for (std::size_t b = a + 1; b < g.n; ++b)
            for (std::size_t d = b + 1; d < g.n; ++d) ++c[static_cast<std::size_t>(g.adj[a][b] + g.adj[a][d] + g.adj[b][d])];
    return c;
}

inline std::uint64_t oracle_triangles_at(const DenseGraph& g, std::size_t p) {
    std::uint64_t t = 0;
    for (std::size_t a = 0; a < g.n; ++a)
        for (std::size_t b = a + 1; b < g.n; ++b)
            if (a != p && b != p && g.adj[p][a] && g.adj[p][b] && g.adj[a][b]) ++t;
    return t;
}

// -----------------------------------------------------------------------------
// Cycle oracle: enumerate every simple cycle once in canonical form
// -----------------------------------------------------------------------------

/// Simple cycles of length 3..max_len in which i and j are consecutive.
/// A cycle v0 v1 ... v(L-1) is canonical when v0 is its smallest vertex and v1 < v(L-1).
inline std::uint64_t oracle_pair_cycles(const DenseGraph& g, std::size_t i, std::size_t j, int max_len) {
    std::uint64_t count = 0;
    std::vector<std::size_t> cyc;
    std::vector<char> used(g.n, 0);
    auto consecutive = [&](const std::vector<std::size_t>& c) {
        for (std::size_t k = 0; k < c.size(); ++k) {
            auto a = c[k];
            auto b = c[(k + 1) % c.size()];
            if ((a == i && b == j) || (a == j && b == i)) return true;
        }
        return false;
    };
    auto extend = [&](auto&& self, std::size_t len) -> void {
        if (cyc.size() == len) {
            if (g.adj[cyc.back()][cyc.front()] && cyc[1] < cyc.back() && consecutive(cyc)) ++count;
            return;
        }
        for (std::size_t w = cyc.front() + 1; w < g.n; ++w) {
            if (used[w] || !g.adj[cyc.back()][w]) continue;
            used[w] = 1;
            cyc.push_back(w);
            self(self, len);
            cyc.pop_back();
            used[w] = 0;
        }
    };
    for (int len = 3; len <= max_len; ++len) {
        for (std::size_t s = 0; s < g.n; ++s) {
            cyc.assign(1, s);
            used.assign(g.n, 0);
            used[s] = 1;
            extend(extend, static_cast<std::size_t>(len));
        }
    }
    return count;
}

// -----------------------------------------------------------------------------
// Misc
// -----------------------------------------------------------------------------

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("dynlogit_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

/// Design from dense rows; columns [0, vertex_columns) form the vertex block.
inline dynlogit::DesignMatrix dense_design(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                                           std::size_t vertex_columns = 0) {
    dynlogit::DesignMatrix dm;
    const std::size_t p = x.empty() ? 0 : x.front().size();
    for (std::size_t c = 0; c < p; ++c) dm.column_names.push_back("x" + std::to_string(c));
    dm.vertex_columns = vertex_columns;
    dm.features.cols = p;
    std::vector<std::uint32_t> cols(p);
    for (std::size_t c = 0; c < p; ++c) cols[c] = static_cast<std::uint32_t>(c);
    for (std::size_t r = 0; r < x.size(); ++r) {
        dm.features.push_row(cols, x[r]);
        dm.responses.push_back(static_cast<std::uint8_t>(y[r]));
        dm.tags.push_back({dynlogit::RowKind::edge, 1, 0, static_cast<VertexIndex>(r)});
    }
    return dm;
}

/// Root of a continuous function with a sign change on [lo, hi].
template <class F>
double bisect(F f, double lo, double hi, double tol = 1e-13) {
    double flo = f(lo);
    for (int it = 0; it < 400 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace testkit
