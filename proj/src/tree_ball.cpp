#include "treeperc/tree_ball.hpp"

#include <algorithm>
#include <string>

#include "treeperc/core_model.hpp"
#include "treeperc/errors.hpp"

namespace treeperc {

BallLayout::BallLayout(int d, int depth) : d_(d), depth_(depth) {
    if (d < 2) {
        throw DomainError("ball layout needs d >= 2");
    }
    if (depth < 0) {
        throw DomainError("ball depth must be >= 0");
    }
    if (ball_size(depth, d) > 0xFFFFFFFFULL) {
        throw ResourceError("ball of depth " + std::to_string(depth) + " exceeds 32-bit indexing");
    }
    offsets_.assign(1, 0);
    for (int k = 0; k <= depth; ++k) {
        offsets_.push_back(offsets_.back() + static_cast<Index>(sphere_size(k, d)));
    }
}

int BallLayout::level(Index v) const {
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), v);
    return static_cast<int>(it - offsets_.begin()) - 1;
}

BallLayout::Index BallLayout::parent(Index v) const {
    const int k = level(v);
    if (k <= 1) {
        return 0;
    }
    return offsets_[k - 1] + (v - offsets_[k]) / static_cast<Index>(d_);
}

BallLayout::Index BallLayout::first_child(Index v) const {
    if (v == 0) {
        return 1;
    }
    const int k = level(v);
    return offsets_[k + 1] + (v - offsets_[k]) * static_cast<Index>(d_);
}

int BallLayout::child_count(Index v) const {
    const int k = level(v);
    if (k >= depth_) {
        return 0;
    }
    return k == 0 ? d_ + 1 : d_;
}

}  // namespace treeperc
