#pragma once

#include <string>
#include <vector>

#include "slabtree/common.hpp"
#include "slabtree/topology.hpp"

namespace slabtree {

inline constexpr u32 kNone = 0xffffffffu;

/// Decomposition parameters. Tier 1 cuts the tree into slabs of H levels and
/// covers fat slabs with blocks of at most 2B nodes; tier 2 repeats inside
/// each mini tree with (H2, B2).
struct SlabParams {
    u32 H = 3, B = 8, H2 = 3, B2 = 8;

    /// Defaults scale with n and keep B > H >= 3 and B2 > H2 >= 3.
    static SlabParams defaults(u64 n);

    void validate() const {
        require(H >= 3 && B > H, "SlabParams: need B > H >= 3");
        require(H2 >= 3 && B2 > H2, "SlabParams: need B2 > H2 >= 3");
        require(B2 <= 8000, "SlabParams: B2 capped at 8000 (micro tables are 16-bit indexed)");
    }
};

/// Internal node identifier: mini tree, micro tree within it, micro-local
/// preorder rank. All components are 1-based.
struct TauName {
    u32 t1 = 0, t2 = 0, t3 = 0;
    bool operator==(const TauName&) const = default;
    bool operator<(const TauName& o) const {
        if (t1 != o.t1) return t1 < o.t1;
        if (t2 != o.t2) return t2 < o.t2;
        return t3 < o.t3;
    }
};

/// How a position inside a subtree relates to the node it stands for.
enum class PosKind : u8 {
    Orig = 0,     // the canonical occurrence
    RootDup = 1,  // shared subtree root, non-canonical occurrence
    SCopy = 2,    // promoted copy of an s-node (slab boundary)
    ExtCopy = 3,  // promoted endpoint of a covering external edge
    Dummy = 4,    // dummy root entity
};

/// What the top (root or the level right below a dummy root) of a subtree is.
enum class TopKind : u8 { Plain = 0, SNodes1 = 1, SNodes2 = 2 };

/// Which kind of promoted s-copies make up a subtree's lowest level.
enum class BottomKind : u8 { None = 0, Tier1 = 1, Tier2 = 2 };

/// Per-tier input view: an explicit tree with ids 0..m-1 in local preorder.
struct TreeView {
    std::vector<u32> parent;       // kNone for the root (id 0)
    std::vector<u32> child_start;  // CSR, size m+1
    std::vector<u32> children;
    std::vector<u32> depth;

    u32 size() const { return u32(parent.size()); }
    u32 degree(u32 v) const { return child_start[v + 1] - child_start[v]; }
    void build_children();
};

/// One covering subtree. Members are ids of the covered tree plus promoted
/// s-copies; the root may be a dummy entity.
struct CoverComp {
    u32 root = kNone;              // id of the root node; kNone for dummy-rooted comps
    bool skinny = false;           // an entire slab
    u32 slab = 0;
    std::vector<u32> members;      // original member ids (sorted, includes root if real)
    std::vector<u32> scopy_members; // promoted s-node ids attached to their parents here
    u32 ext_from = kNone;          // member with the external edge, if any
    u32 ext_to = kNone;            // its child outside the comp
};

struct SlabCover {
    u32 offset = 1;                 // cut offset o in [1..H]
    u32 slab_count = 0;
    u32 fat_slab_count = 0;
    std::vector<u32> snodes;        // ids on cut levels, increasing
    std::vector<CoverComp> comps;   // ordered by (min member, second member)
};

/// Lemma-style covering of a whole tree into connected subtrees of at most 2B
/// nodes, pairwise disjoint except for shared roots, with at most one
/// non-root external edge each. Runs in O(n).
std::vector<CoverComp> farzan_munro_cover(const TreeView& t, u32 B);

/// Offset o in [1..H] minimizing the number of nodes on cut levels
/// {o, o+H, o+2H, ...}; smallest minimizer wins.
u32 choose_offset(const TreeView& t, u32 H);

/// Cuts the tree into slabs of H levels at the chosen offset, promotes
/// s-node endpoints into the parent slab, keeps small slabs whole (skinny)
/// and covers large ones with farzan_munro_cover(B).
SlabCover slab_cover(const TreeView& t, u32 H, u32 B);

/// The micro-tree type: everything shape-determined that micro-local query
/// tables depend on, plus the position of the promoted external-edge copy.
struct MicroType {
    u32 size = 0;
    std::string bp;                // balanced parentheses of the local shape
    u32 promoted_ext_pre = 0;      // preorder rank of the promoted external copy, 0 if none
    bool lowest_level_promoted = false;
    bool root_is_dummy = false;

    bool operator==(const MicroType&) const = default;
};

struct MicroNode {
    u32 shadow = kNone;   // mini-local id; kNone for tier-2 dummies
    PosKind kind = PosKind::Orig;
};

struct MicroTree {
    u32 size = 0;
    std::vector<u32> parent;      // micro-local, ids 0.. in micro-local preorder
    std::vector<MicroNode> node;
    bool root_is_dummy = false;
    TopKind top = TopKind::Plain;
    BottomKind bottom = BottomKind::None;
    u32 ext_pos = kNone;          // micro-local id of the ExtCopy, if any
    u32 root_depth = 0;           // mini-local depth of the root entity
    u32 slab2 = 0;                // tier-2 slab index inside the mini
    bool skinny2 = false;

    MicroType type() const;
};

struct MiniNode {
    u32 shadow = 0;       // global T node (1-based); 0 for the mini dummy
    PosKind kind = PosKind::Dummy;
};

struct MiniTree {
    std::vector<u32> parent;       // mini-local preorder ids
    std::vector<u32> child_start;
    std::vector<u32> children;
    std::vector<u32> depth;        // mini-local depths (root entity at 0)
    std::vector<MiniNode> node;
    bool root_is_dummy = false;
    TopKind top = TopKind::Plain;
    bool skinny = false;
    u32 slab = 0;
    u32 root_depth_global = 0;     // global depth of the root entity
    u32 ext_pos = kNone;           // mini-local id of the tier-1 ExtCopy, if any

    u32 offset2 = 1;               // tier-2 cut offset
    u32 slab_count2 = 0, fat_slab_count2 = 0;
    std::vector<MicroTree> micros; // τ2 order
    std::vector<u32> snodes2;      // mini-local ids on tier-2 cut levels

    // canonical micro coordinates per mini-local node
    std::vector<u32> micro_of;     // 0-based micro index
    std::vector<u32> pos_in_micro; // 0-based micro-local id

    u32 size() const { return u32(parent.size()); }
};

/// The full two-tier decomposition plus canonical-name maps.
class Decomposition {
public:
    Decomposition(const TreeTopology& t, const SlabParams& p);

    const SlabParams& params() const { return params_; }
    u32 n() const { return n_; }
    u32 offset1() const { return offset1_; }
    u32 slab_count1() const { return slab_count1_; }
    u32 fat_slab_count1() const { return fat_slab_count1_; }
    const std::vector<u32>& snodes1() const { return snodes1_; }

    u32 mini_count() const { return u32(minis_.size()); }
    const MiniTree& mini(u32 t1) const { return minis_[t1 - 1]; }

    /// Canonical τ-name of T node v.
    TauName tau_of(u32 v) const {
        u32 m = mini_of_[v], loc = local_in_mini_[v];
        const MiniTree& mt = minis_[m];
        return TauName{m + 1, mt.micro_of[loc] + 1, mt.pos_in_micro[loc] + 1};
    }

    /// Canonical mini (0-based) and mini-local id of T node v.
    u32 mini_of(u32 v) const { return mini_of_[v]; }
    u32 local_of(u32 v) const { return local_in_mini_[v]; }

    /// The T node a position stands for; 0 for dummies.
    u32 shadow_of(TauName t) const {
        const MiniTree& mt = minis_[t.t1 - 1];
        const MicroTree& mc = mt.micros[t.t2 - 1];
        u32 s = mc.node[t.t3 - 1].shadow;
        return s == kNone ? 0 : mt.node[s].shadow;
    }

    /// Canonical name for any existing position (identity on canonical ones).
    TauName canonical(TauName t) const;

    MicroType micro_type(u32 t1, u32 t2) const {
        require(t1 >= 1 && t1 <= mini_count(), "micro_type: bad mini index");
        require(t2 >= 1 && t2 <= u32(minis_[t1 - 1].micros.size()), "micro_type: bad micro index");
        return minis_[t1 - 1].micros[t2 - 1].type();
    }

private:
    SlabParams params_;
    u32 n_ = 0;
    u32 offset1_ = 1;
    u32 slab_count1_ = 0, fat_slab_count1_ = 0;
    std::vector<u32> snodes1_;
    std::vector<MiniTree> minis_;
    std::vector<u32> mini_of_;        // per T node, 0-based mini index
    std::vector<u32> local_in_mini_;  // per T node, mini-local id of the Orig position
};

} // namespace slabtree
