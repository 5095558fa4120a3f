#pragma once

#include <numeric>
#include <vector>

namespace emlouv {

// Disjoint-set forest with path halving and union by rank.
class UnionFind {
public:
    explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)), rank_(static_cast<std::size_t>(n), 0) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int x) {
        while (parent_[static_cast<std::size_t>(x)] != x) {
            parent_[static_cast<std::size_t>(x)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
            x = parent_[static_cast<std::size_t>(x)];
        }
        return x;
    }

    // Returns true if x and y were in different sets.
    bool unite(int x, int y) {
        int rx = find(x), ry = find(y);
        if (rx == ry) return false;
        if (rank_[static_cast<std::size_t>(rx)] < rank_[static_cast<std::size_t>(ry)]) std::swap(rx, ry);
        parent_[static_cast<std::size_t>(ry)] = rx;
        if (rank_[static_cast<std::size_t>(rx)] == rank_[static_cast<std::size_t>(ry)]) ++rank_[static_cast<std::size_t>(rx)];
        return true;
    }

private:
    std::vector<int> parent_;
    std::vector<int> rank_;
};

} // namespace emlouv
