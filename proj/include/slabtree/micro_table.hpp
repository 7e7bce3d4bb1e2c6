#pragma once

#include <memory>
#include <string>
#include <vector>

#include "slabtree/common.hpp"

namespace slabtree {

inline constexpr u16 kU16None = 0xffff;

/// Precomputed micro-local query answers for one tree shape. Positions are
/// 0-based local preorder ranks. Everything here is a pure function of the
/// balanced-parentheses string, so tables are shared process-wide through the
/// dictionary below and never serialized.
struct MicroTable {
    u32 sz = 0;
    u32 height = 0;    // max local depth
    u32 jlevels = 0;   // power-of-two jump levels

    std::vector<u16> parent;       // kU16None for the root
    std::vector<u16> depthv;
    std::vector<u16> child_start;  // sz+1
    std::vector<u16> child_list;
    std::vector<u16> child_rank;   // 1-based among siblings; 0 for root
    std::vector<u16> last_desc;
    std::vector<u16> local_height;
    std::vector<u16> pre2lo, lo2pre;      // 0-based level-order ranks
    std::vector<u16> pre2post, post2pre;  // 0-based postorder ranks
    std::vector<u16> pref_leaf;      // sz+1; local leaves with pre < p
    std::vector<u16> leaf_sel;       // local leaf index -> position
    std::vector<u16> prev_int_lo;    // by LO rank: previous internal's LO rank
    std::vector<u16> bottom_before;  // sz+1; max-depth positions with pre < p
    std::vector<u16> ladder_of, ladder_idx, ladder_start;
    std::vector<u16> ladders;        // concatenated, top (shallow) first
    std::vector<u16> jump;           // [p * jlevels + j] = 2^j-ancestor
    std::vector<u16> euler;          // 2sz-1
    std::vector<u16> euler_first;
    std::vector<u16> rmq_block;      // per euler block of 8: argmin
    std::vector<u16> rmq_sparse;     // sparse table over block argmins
    u32 rmq_levels = 0;

    explicit MicroTable(const std::string& bp);

    u32 degree(u32 p) const { return u32(child_start[p + 1]) - child_start[p]; }
    u32 child(u32 p, u32 i) const { return child_list[child_start[p] + i - 1]; }

    /// Ancestor at distance k (k <= depth of p), via jump + ladder.
    u32 anc(u32 p, u32 k) const;

    /// Local LCA position (may be the root).
    u32 lca(u32 p, u32 q) const;

    u64 bytes() const;

private:
    u32 euler_argmin(u32 l, u32 r) const;  // inclusive, first minimum
};

/// Process-wide memoized dictionary keyed by shape. Thread-safe, insert-once.
/// Memory is capped by the SLABTREE_TABLE_CACHE environment variable (bytes);
/// once full, lookups fall back to a small thread-local cache of transient
/// tables, trading speed for bounded memory.
class MicroTableDict {
public:
    static MicroTableDict& instance();

    /// Stable pointer valid for the process lifetime (or a transient table
    /// owned by a thread-local cache when over the cap).
    const MicroTable* get(const std::string& bp);

    u64 bytes_used() const;
    u64 capacity() const { return cap_; }
    u64 entries() const;

private:
    MicroTableDict();
    struct Impl;
    std::unique_ptr<Impl> impl_;
    u64 cap_ = 0;
};

} // namespace slabtree
