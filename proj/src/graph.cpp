#include "dynlogit/graph.hpp"

#include <algorithm>

namespace dynlogit {

Adjacency::Adjacency(const Snapshot& snapshot) : offsets_(snapshot.present.universe() + 1, 0) {
    for (const auto& e : snapshot.edges) {
        ++offsets_[e.i + 1];
        ++offsets_[e.j + 1];
    }
    for (std::size_t v = 1; v < offsets_.size(); ++v) offsets_[v] += offsets_[v - 1];
    targets_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : snapshot.edges) {
        targets_[fill[e.i]++] = e.j;
        targets_[fill[e.j]++] = e.i;
    }
    for (std::size_t v = 0; v + 1 < offsets_.size(); ++v) {
        std::sort(targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
                  targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
    }
}

bool Adjacency::adjacent(VertexIndex a, VertexIndex b) const {
    if (a >= universe() || b >= universe()) return false;
    if (degree(a) > degree(b)) std::swap(a, b);
    auto n = neighbors(a);
    return std::binary_search(n.begin(), n.end(), b);
}

std::vector<std::uint64_t> triangles_per_vertex(const Adjacency& adj) {
    std::vector<std::uint64_t> tri(adj.universe(), 0);
    // Each triangle u < v < w is found once from its smallest vertex.
    for (VertexIndex u = 0; u < adj.universe(); ++u) {
        auto nu = adj.neighbors(u);
        for (auto v : nu) {
            if (v <= u) continue;
            auto nv = adj.neighbors(v);
            auto a = std::upper_bound(nu.begin(), nu.end(), v);
            auto b = std::upper_bound(nv.begin(), nv.end(), v);
            while (a != nu.end() && b != nv.end()) {
                if (*a < *b) {
                    ++a;
                } else if (*b < *a) {
                    ++b;
                } else {
                    ++tri[u];
                    ++tri[v];
                    ++tri[*a];
                    ++a;
                    ++b;
                }
            }
        }
    }
    return tri;
}

}  // namespace dynlogit
