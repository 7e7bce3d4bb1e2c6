#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "slabtree/bits.hpp"
#include "slabtree/micro_table.hpp"
#include "slabtree/rmq.hpp"
#include "slabtree/slab.hpp"
#include "slabtree/topology.hpp"

namespace slabtree {

struct StatsReport;

/// Succinct ordinal tree over a two-tier slab decomposition. All public
/// operations take and return global preorder ranks in [1..n] and run in a
/// constant number of word operations and table lookups; τ-names are internal.
///
/// Immutable after construction; safe for unlimited concurrent readers.
class SlabTree {
public:
    SlabTree(const TreeTopology& t, const SlabParams& p);
    explicit SlabTree(const TreeTopology& t);

    u32 size() const { return n_; }
    const SlabParams& params() const { return params_; }

    // rank/select in the three supported traversal orders
    TauName node_select_pre(u32 i) const;
    u32 node_rank_pre(TauName t) const;
    u32 node_select_level(u32 i) const;
    u32 node_rank_level(u32 v) const;
    u32 node_select_post(u32 i) const;
    u32 node_rank_post(u32 v) const;

    u32 depth(u32 v) const;
    u32 anc(u32 v, u32 i) const;
    u32 parent(u32 v) const { return anc(v, 1); }

    u32 degree(u32 v) const;
    u32 child(u32 v, u32 i) const;
    u32 child_rank(u32 v) const;
    std::optional<u32> last_child(u32 v) const;

    u64 nbdesc(u32 v) const;  // descendants excluding v itself
    u32 height(u32 v) const;
    u32 lca(u32 u, u32 v) const;

    std::optional<u32> prev_internal(u32 v) const;
    std::optional<u32> next_internal(u32 v) const;

    u32 leftmost_leaf(u32 v) const;
    u32 rightmost_leaf(u32 v) const;
    u64 leaf_rank(u32 v) const;  // leaves with preorder <= v
    u32 leaf_select(u64 i) const;
    u64 leaf_count() const { return leaf_count_; }

    u32 tree_height() const { return tree_height_; }
    u32 level_leftmost(u32 level) const;
    u32 level_rightmost(u32 level) const;
    std::optional<u32> level_pred(u32 v) const;
    std::optional<u32> level_succ(u32 v) const;

    void save(Writer& w) const;
    static SlabTree load(Reader& r);

    void fill_stats(StatsReport& s) const;
    u64 struct_bits() const;

    // decomposition measurements (for bound checks and stats)
    struct Counts {
        u32 minis = 0, micros = 0, types = 0;
        u32 s1 = 0, s2 = 0;
        u64 changers_pre_t1 = 0, changers_pre_t2 = 0;
        u64 changers_post_t1 = 0, changers_post_t2 = 0;
        u64 changers_level_t1 = 0, changers_level_t2 = 0;
    };
    const Counts& counts() const { return counts_; }

    /// Jump-pointer slots for a source at usable depth d: fine strides 1..f
    /// plus coarse multiples of f up to min(cap, d).
    static u32 jump_slots(u32 d, u32 f, u32 cap) {
        u32 nf = std::min(f, d);
        u32 top = std::min(cap, d);
        u32 nc = top >= 2 * f ? top / f - 1 : 0;
        return nf + nc;
    }

private:
    SlabTree() = default;

    struct OrderIndex {
        SparseBitVec t1_marks;  // 0-based X-ranks of tier-1 changers
        SparseBitVec t2_marks;
        SparseBitVec t2_tau;    // τ-space slots, within-micro in local-X order
        PackedArray sel_t1;     // τ1 per tier-1 changer (X order)
        PackedArray sel_t2;     // (τ2 << wpos) | localXRank, per tier-2 changer (X order)
        PackedArray tau_t2;     // global 0-based X-rank [+ level: prev-internal state/ptr]

        void save(Writer& w) const;
        void load(Reader& r);
        u64 bits() const;
    };

    // ---- helpers ----
    struct Pos {  // resolved position
        u32 t1, t2;   // 1-based mini, micro
        u32 q;        // 0-based local preorder
        u32 micro;    // global micro index
        const MicroTable* tab;
    };
    Pos resolve(TauName t) const;
    const MicroTable* table_of(u32 micro) const { return tables_[micro]; }
    u64 tau_slot(const Pos& p, u32 local_rank) const;  // τ-space slot
    u32 micro_of(u32 t1, u32 t2) const {
        return u32(mini_micro_start_.get(t1 - 1)) + t2 - 1;
    }
    u32 preorder_of(TauName t) const { return node_rank_pre(t); }
    TauName canonical_name(TauName t) const;  // resolves copies via the table
    bool is_canonical(const Pos& p) const;
    u32 t_depth_of_pos(const Pos& p) const;   // global depth of a position
    u32 anc_from(TauName start, u32 target_depth) const;
    TauName mini_top_on_chain(const Pos& p) const;  // chain entry at mini top
    u32 jump2_read(u32 src, u32 slot) const;
    u32 jump1_slot_count(u32 d, u32 f, u32 cap) const;
    u32 m2_index_of_top(const Pos& p) const;
    u32 lca_same_mini(u32 t1, TauName uu, TauName vv) const;  // returns preorder
    struct MicroLca { bool dummy; u32 pos; u32 a, b; };
    MicroLca lca_in_micro(const Pos& pu, u32 qa, u32 qb) const;
    u32 rank_level_of_tau(TauName t) const;
    TauName select_level_tau(u32 i) const;

    u32 root_height_of(const Pos& p) const;
    u32 height_at(TauName t) const;

    // ---- geometry ----
    u32 n_ = 0;
    SlabParams params_;
    u32 offset1_ = 1;
    u32 f1_ = 1, cap1_ = 1;  // fine stride, max stride (tier 1)
    u32 f2_ = 1, cap2_ = 1;
    Counts counts_;
    u32 tree_height_ = 0;
    u64 leaf_count_ = 0;
    u64 total_pos_ = 0;

    // per-mini
    PackedArray mini_anchor_;       // global depth of root entity
    PackedArray mini_micro_start_;  // M+1
    PackedArray mini_flags_;        // bit0: root is dummy
    PackedArray mini_root_pos_;     // (τ2 << wpos) | τ3-1 of root entity (real roots)
    PackedArray mini_off2_;
    PackedArray mini_s2_start_;     // M+1
    PackedArray mini_near_s1_;      // s1 index + 1; 0 = none
    PackedArray mini_jump_off_;     // M+1, tier-1 pointer rows for real mini roots
    PackedArray mini_m2_start_;     // M+1
    PackedArray mini_m2_euler_start_;  // M+1

    // tier-1 s-nodes
    SparseBitVec s1_marks_;         // preorder-1 positions
    PackedArray s1_macro_parent_;   // +1; 0 = none
    PackedArray s1_jump_off_;       // S1+1
    PackedArray s1_child_rank_;
    LadderLA s1_la_;                // rebuilt on load

    PackedArray t1_ptrs_;           // full τ packed

    // tier-2 s-nodes (global, grouped per mini, τ-ordered within mini)
    PackedArray s2_pos_;            // (τ2 << wpos) | τ3-1
    PackedArray s2_src_;            // tier-2 source row
    PackedArray s2_child_rank_;
    PackedArray s2_macro_parent_;   // within-mini index + 1; 0 = none
    std::vector<LadderLA> s2_la_;   // per mini with s2 > 0
    std::vector<u32> s2_la_of_;     // mini -> index into s2_la_, kNone if none

    // per-micro
    PackedArray micro_row_;         // tauStart | typeId | rootMiniDepth | flags | extPos
    PackedArray micro_src_start_;   // U+1
    PackedArray src_jump_off_;      // (#src)+1
    PackedArray src_near_s2_;       // within-mini s2 index + 1; 0 = none
    PackedArray t2_ptrs_;           // (τ2 << wpos) | τ3-1
    PackedArray micro_m2_first_;    // first M2 index of the micro's top block
    PackedArray micro_s1_first_;    // s1 index of first depth-1 child (SNodes1 tops)
    PackedArray micro_s2_first_;    // within-mini s2 index of first depth-1 child
    PackedArray micro_b1_;          // root's first-block start child rank (1-based; 0 = none)
    PackedArray micro_b2_;          // (gap local child index << wdeg) | b2 start rank; 0 = single block
    PackedArray micro_root_height_;
    PackedArray micro_bottom_start_;  // U+1
    PackedArray micro_root_rec_;    // root-record index + 1; 0 = none

    // root records
    PackedArray rr_degree_;
    PackedArray rr_child_rank_;
    PackedArray rr_seg_start_;      // R+1
    PackedArray rr_blocks_start_;   // R+1
    SparseBitVec csplit_;
    PackedArray blocks_;            // (micro << wdeg) | startChildRank-1

    // heights
    PackedArray bottom_heights_;
    RangeArg bottom_rmq_;           // max; rebuilt on load

    // canonical map for promoted/duplicate positions
    SparseBitVec copy_marks_;       // τ-space slots of non-canonical positions
    PackedArray copy_payload_;      // disc bit + mini-local or full τ

    // LCA macro structures
    SparseBitVec m1_marks_;         // preorders of M1 nodes
    PackedArray m1_parent_;         // +1 (euler rebuilt on load)
    PackedArray m1_depth_;          // global depths
    std::vector<u32> m1_euler_, m1_first_;
    std::vector<u32> m1_euler_depth_;
    RangeArg m1_rmq_;               // min

    PackedArray m2_pos_;            // (τ2 << wpos) | τ3-1 per M2 node
    PackedArray m2_parent_;         // within-mini index + 1; 0 = root of mini forest
    PackedArray m2_depth_;          // mini-local depth
    std::vector<u32> m2_euler_, m2_first_;  // rebuilt on load (concat per mini)
    std::vector<u32> m2_euler_depth_;
    std::vector<u64> m2_euler_start_;       // M+1
    RangeArg m2_rmq_;               // min

    // traversal indexes
    OrderIndex pre_, post_, lev_;
    PackedArray lev_prevint_t2_;    // (inMini bit, mini-local ptr) per t2 changer, τ side
    PackedArray lev_prevint_t1_;    // preorder of prev internal + 1; 0 = absent
    PackedArray leaf_prefix_;       // per tier-2 pre-changer
    SparseBitVec leaf_sel_bv_;
    SparseBitVec level_starts_;

    // widths
    int wN_ = 1, wP_ = 1, wU_ = 1, wM_ = 1, wT2_ = 1, wPos_ = 1, wD_ = 1, wMD_ = 1,
        wDeg_ = 1, wH_ = 1, wTy_ = 1;

    // type store
    VarCellArray types_;                    // distinct shapes (BP bits; length = 2*size)
    std::vector<const MicroTable*> tables_; // per micro, resolved at build/load
    std::vector<u32> type_of_;              // per micro (duplicated from micro_row_ for speed)

    void finish_load();  // rebuilds RMQ/LA/tables after load or build
    friend struct SlabTreeBuilder;
};

} // namespace slabtree
