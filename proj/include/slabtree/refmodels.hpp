#pragma once

#include <optional>
#include <vector>

#include "slabtree/common.hpp"
#include "slabtree/topology.hpp"

namespace slabtree {

struct IntervalSet;
struct ArcSet;

// Brute-force reference oracles. Deliberately simple and slow; they share no
// code with the succinct structures beyond the input types.

/// Explicit tree model answering every navigation query by plain arrays,
/// linear scans, and textbook traversals.
class RefTree {
public:
    explicit RefTree(const TreeTopology& t);

    u32 size() const { return n_; }
    u32 parent(u32 v) const { return parent_[v]; }
    u32 degree(u32 v) const { return u32(children_[v].size()); }
    u32 child(u32 v, u32 i) const { return children_[v][i - 1]; }
    u32 child_rank(u32 v) const;
    u32 depth(u32 v) const { return depth_[v]; }
    u32 anc(u32 v, u32 i) const;
    u64 nbdesc(u32 v) const { return subtree_size_[v] - 1; }
    u32 height(u32 v) const { return height_[v]; }
    u32 lca(u32 u, u32 v) const;
    std::optional<u32> last_child(u32 v) const;

    u32 node_rank_pre(u32 v) const { return v; }
    u32 node_select_pre(u32 i) const { return i; }
    u32 node_rank_post(u32 v) const { return post_rank_[v]; }
    u32 node_select_post(u32 i) const { return post_seq_[i - 1]; }
    u32 node_rank_level(u32 v) const { return level_rank_[v]; }
    u32 node_select_level(u32 i) const { return level_seq_[i - 1]; }

    std::optional<u32> prev_internal(u32 v) const;
    std::optional<u32> next_internal(u32 v) const;

    u32 leftmost_leaf(u32 v) const;
    u32 rightmost_leaf(u32 v) const;
    u64 leaf_rank(u32 v) const;  // leaves with preorder <= v
    u32 leaf_select(u64 i) const { return leaves_pre_[i - 1]; }
    u64 leaf_count() const { return leaves_pre_.size(); }

    u32 tree_height() const { return height_[1]; }
    u32 level_leftmost(u32 level) const;
    u32 level_rightmost(u32 level) const;
    std::optional<u32> level_pred(u32 v) const;
    std::optional<u32> level_succ(u32 v) const;

private:
    u32 n_ = 0;
    std::vector<u32> parent_;
    std::vector<std::vector<u32>> children_;
    std::vector<u32> depth_;
    std::vector<u64> subtree_size_;
    std::vector<u32> height_;
    std::vector<u32> post_seq_, post_rank_;
    std::vector<u32> level_seq_, level_rank_;
    std::vector<u32> leaves_pre_;
    std::vector<u64> leaf_rank_; // leaves with preorder <= v
};

/// Explicit graph model built by pairwise intersection tests.
class RefGraph {
public:
    static RefGraph from_intervals(const IntervalSet& iv);
    static RefGraph from_arcs(const ArcSet& arcs);

    u32 size() const { return n_; }
    bool adjacent(u32 u, u32 v) const;
    const std::vector<u32>& neighbors(u32 v) const { return adj_[v]; }

    /// Textbook BFS; nullopt when unreachable.
    std::optional<u32> bfs_distance(u32 u, u32 v) const;
    /// All BFS distances from source; UINT32_MAX when unreachable.
    std::vector<u32> bfs_all(u32 u) const;

    bool connected() const;

private:
    u32 n_ = 0;
    std::vector<std::vector<u32>> adj_;
};

// Deterministic generators (SplitMix64-seeded).

enum class TreeShape { Random, Path, Star, Caterpillar, Binary };

TreeTopology gen_tree(TreeShape shape, u32 n, u64 seed);
TreeShape tree_shape_from_name(const std::string& name);

/// Random interval set with all 2n endpoints forming a permutation of [1..2n].
/// density in (0,1): higher keeps more intervals open simultaneously.
IntervalSet gen_intervals(u32 n, u64 seed, double density = 0.5);

/// Proper (no nesting) interval set: closes the oldest open interval first.
IntervalSet gen_proper_intervals(u32 n, u64 seed, double density = 0.5);

/// Connected circular-arc set; retries seeds deterministically until connected.
ArcSet gen_arcs(u32 n, u64 seed, double density = 0.5);

} // namespace slabtree
