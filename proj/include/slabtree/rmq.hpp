#pragma once

#include <vector>

#include "slabtree/common.hpp"

namespace slabtree {

/// Range min/max with first and last argument positions. Blocked (16 values
/// per block) with a sparse table over blocks; queries are O(1) apart from two
/// bounded in-block scans. Rebuilt from its source array on load, never
/// serialized.
class RangeArg {
public:
    struct Res {
        u32 val = 0;
        u32 first = 0, last = 0;
    };

    RangeArg() = default;

    void build(const std::vector<u32>& vals, bool maximum);

    /// Inclusive range; requires l <= r < size.
    Res query(u32 l, u32 r) const;

    bool empty() const { return vals_.empty(); }

private:
    bool better(u32 a, u32 b) const { return max_ ? a > b : a < b; }

    static constexpr u32 kBlock = 16;
    bool max_ = false;
    std::vector<u32> vals_;
    std::vector<u32> blk_first_, blk_last_; // per block argmin/argmax
    std::vector<u32> sp_first_, sp_last_;   // sparse table over blocks
    u32 levels_ = 0, nblocks_ = 0;
};

/// Level-ancestor queries on an explicit small tree: power-of-two jumps plus
/// ladders (longest-path decomposition doubled upward).
class LadderLA {
public:
    LadderLA() = default;

    /// parents[v] = parent id or kNone for roots (forests allowed).
    void build(const std::vector<u32>& parents);

    u32 depth(u32 v) const { return depth_[v]; }

    /// Ancestor at distance k; requires k <= depth(v).
    u32 anc(u32 v, u32 k) const;

    u32 size() const { return u32(depth_.size()); }

private:
    std::vector<u32> depth_;
    std::vector<u32> ladder_of_, ladder_idx_, ladder_start_;
    std::vector<u32> ladders_;
    std::vector<u32> jump_;
    u32 jlevels_ = 0;
};

} // namespace slabtree
