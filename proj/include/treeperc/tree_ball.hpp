#pragma once

#include <cstdint>
#include <vector>

namespace treeperc {

/// Breadth-first indexing of the ball B_n of the (d+1)-regular tree rooted at
/// x_0 = 0. The root has d+1 children, every other vertex d. Vertex v != 0 is
/// joined to parent(v), so edges are indexed by their child endpoint.
class BallLayout {
public:
    using Index = std::uint32_t;

    BallLayout() = default;
    BallLayout(int d, int depth);

    [[nodiscard]] int d() const { return d_; }
    [[nodiscard]] int depth() const { return depth_; }
    [[nodiscard]] Index size() const { return offsets_.back(); }
    [[nodiscard]] Index level_begin(int k) const { return offsets_[k]; }
    [[nodiscard]] Index level_end(int k) const { return offsets_[k + 1]; }
    [[nodiscard]] Index level_size(int k) const { return offsets_[k + 1] - offsets_[k]; }
    [[nodiscard]] int level(Index v) const;
    [[nodiscard]] Index parent(Index v) const;
    [[nodiscard]] Index first_child(Index v) const;
    [[nodiscard]] int child_count(Index v) const;  ///< 0 on the sphere S_depth
    /// Vertex at distance k along the ray x_0 -> level_begin(1) -> first children.
    [[nodiscard]] Index ray_vertex(int k) const { return offsets_[k]; }

private:
    int d_ = 2;
    int depth_ = 0;
    std::vector<Index> offsets_{0, 1};
};

}  // namespace treeperc
