#include "dynlogit/gli.hpp"

#include <algorithm>
#include <numeric>

#include "dynlogit/graph.hpp"

namespace dynlogit {

namespace {

double choose2(double n) { return n * (n - 1.0) / 2.0; }

std::uint64_t choose2u(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }
std::uint64_t choose3u(std::uint64_t n) { return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6; }

std::vector<std::uint64_t> degrees(const Snapshot& s) {
    std::vector<std::uint64_t> d(s.present.universe(), 0);
    for (const auto& e : s.edges) {
        ++d[e.i];
        ++d[e.j];
    }
    return d;
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }
    std::size_t size(std::size_t root) const { return size_[root]; }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

}  // namespace

std::array<double, GliVector::kCount> GliVector::values() const {
    return {static_cast<double>(size),
            density,
            mean_degree,
            degree_centralization,
            connectedness,
            static_cast<double>(triad_census[0]),
            static_cast<double>(triad_census[1]),
            static_cast<double>(triad_census[2]),
            static_cast<double>(triad_census[3])};
}

double density(const Snapshot& snapshot) {
    auto n = static_cast<double>(snapshot.present.count());
    if (n < 2) return 0.0;
    return static_cast<double>(snapshot.edges.size()) / choose2(n);
}

double mean_degree(const Snapshot& snapshot) {
    auto n = snapshot.present.count();
    if (n == 0) return 0.0;
    return 2.0 * static_cast<double>(snapshot.edges.size()) / static_cast<double>(n);
}

double degree_centralization(const Snapshot& snapshot) {
    auto members = snapshot.present.members();
    const auto n = members.size();
    if (n < 3) return 0.0;
    auto d = degrees(snapshot);
    std::uint64_t dmax = 0;
    for (auto v : members) dmax = std::max(dmax, d[v]);
    std::uint64_t total = 0;
    for (auto v : members) total += dmax - d[v];
    return static_cast<double>(total) / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
}

double krackhardt_connectedness(const Snapshot& snapshot) {
    auto members = snapshot.present.members();
    const auto n = members.size();
    if (n <= 1) return 1.0;
    DisjointSets ds(snapshot.present.universe());
    for (const auto& e : snapshot.edges) ds.unite(e.i, e.j);
    std::uint64_t reachable = 0;
    for (auto v : members) {
        if (ds.find(v) == v) reachable += choose2u(ds.size(v));
    }
    return static_cast<double>(reachable) / static_cast<double>(choose2u(n));
}

TriadCensus triad_census(const Snapshot& snapshot) {
    const std::uint64_t n = snapshot.present.count();
    if (n < 3) return {0, 0, 0, 0};
    const std::uint64_t m = snapshot.edges.size();
    Adjacency adj(snapshot);
    auto tri = triangles_per_vertex(adj);
    std::uint64_t t3 = std::accumulate(tri.begin(), tri.end(), std::uint64_t{0}) / 3;
    std::uint64_t two_paths = 0;  // sum over centers of C(d, 2) = t2 + 3 t3
    for (VertexIndex v = 0; v < adj.universe(); ++v) two_paths += choose2u(adj.degree(v));
    const std::uint64_t t2 = two_paths - 3 * t3;
    // Each edge lies in n - 2 triples: m (n - 2) = t1 + 2 t2 + 3 t3.
    const std::uint64_t t1 = m * (n - 2) - 2 * t2 - 3 * t3;
    const std::uint64_t t0 = choose3u(n) - t1 - t2 - t3;
    return {t0, t1, t2, t3};
}

GliVector gli_vector(const Snapshot& snapshot) {
    GliVector g;
    g.size = snapshot.present.count();
    g.density = density(snapshot);
    g.mean_degree = mean_degree(snapshot);
    g.degree_centralization = degree_centralization(snapshot);
    g.connectedness = krackhardt_connectedness(snapshot);
    g.triad_census = triad_census(snapshot);
    return g;
}

bool gli_degenerate(const Snapshot& snapshot) { return snapshot.present.count() < 3; }

}  // namespace dynlogit
