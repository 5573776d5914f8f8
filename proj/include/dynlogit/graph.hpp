#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dynlogit/panel.hpp"

namespace dynlogit {

/// Compressed sorted adjacency lists of one snapshot, indexed over the whole risk set.
class Adjacency {
public:
    explicit Adjacency(const Snapshot& snapshot);

    std::size_t universe() const noexcept { return offsets_.size() - 1; }
    std::span<const VertexIndex> neighbors(VertexIndex v) const {
        return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
    }
    std::size_t degree(VertexIndex v) const { return offsets_[v + 1] - offsets_[v]; }
    bool adjacent(VertexIndex a, VertexIndex b) const;

private:
    std::vector<std::size_t> offsets_;
    std::vector<VertexIndex> targets_;
};

/// Triangles containing each vertex (zero for vertices outside the snapshot).
std::vector<std::uint64_t> triangles_per_vertex(const Adjacency& adj);

}  // namespace dynlogit
