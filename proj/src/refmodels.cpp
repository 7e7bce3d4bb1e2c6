#include "slabtree/refmodels.hpp"

#include <algorithm>
#include <deque>

#include "slabtree/interval_set.hpp"

namespace slabtree {

RefTree::RefTree(const TreeTopology& t) {
    n_ = t.size();
    parent_.assign(n_ + 1, 0);
    children_.assign(n_ + 1, {});
    depth_.assign(n_ + 1, 0);
    subtree_size_.assign(n_ + 1, 1);
    height_.assign(n_ + 1, 0);
    for (u32 v = 1; v <= n_; ++v) {
        parent_[v] = t.parent(v);
        children_[v].assign(t.children_begin(v), t.children_end(v));
    }
    for (u32 v = 2; v <= n_; ++v) depth_[v] = depth_[parent_[v]] + 1;
    for (u32 v = n_; v >= 2; --v) {
        subtree_size_[parent_[v]] += subtree_size_[v];
        height_[parent_[v]] = std::max(height_[parent_[v]], height_[v] + 1);
    }

    post_seq_.reserve(n_);
    post_rank_.assign(n_ + 1, 0);
    std::vector<std::pair<u32, u32>> stack = {{1, 0}};
    while (!stack.empty()) {
        auto& [v, ci] = stack.back();
        if (ci < children_[v].size()) {
            u32 c = children_[v][ci++];
            stack.push_back({c, 0});
        } else {
            post_seq_.push_back(v);
            post_rank_[v] = u32(post_seq_.size());
            stack.pop_back();
        }
    }

    level_seq_.reserve(n_);
    level_rank_.assign(n_ + 1, 0);
    std::deque<u32> q = {1};
    while (!q.empty()) {
        u32 v = q.front();
        q.pop_front();
        level_seq_.push_back(v);
        level_rank_[v] = u32(level_seq_.size());
        for (u32 c : children_[v]) q.push_back(c);
    }

    leaf_rank_.assign(n_ + 1, 0);
    for (u32 v = 1; v <= n_; ++v) {
        leaf_rank_[v] = leaf_rank_[v - 1] + (children_[v].empty() ? 1 : 0);
        if (children_[v].empty()) leaves_pre_.push_back(v);
    }
}

u32 RefTree::child_rank(u32 v) const {
    if (v == 1) return 0;
    const auto& sib = children_[parent_[v]];
    for (u32 i = 0; i < sib.size(); ++i)
        if (sib[i] == v) return i + 1;
    return 0;
}

u32 RefTree::anc(u32 v, u32 i) const {
    require(i <= depth_[v], "RefTree::anc: distance above root");
    while (i--) v = parent_[v];
    return v;
}

u32 RefTree::lca(u32 u, u32 v) const {
    while (depth_[u] > depth_[v]) u = parent_[u];
    while (depth_[v] > depth_[u]) v = parent_[v];
    while (u != v) u = parent_[u], v = parent_[v];
    return u;
}

std::optional<u32> RefTree::last_child(u32 v) const {
    if (children_[v].empty()) return std::nullopt;
    return children_[v].back();
}

std::optional<u32> RefTree::prev_internal(u32 v) const {
    for (u32 i = level_rank_[v] - 1; i >= 1; --i) {
        u32 w = level_seq_[i - 1];
        if (!children_[w].empty()) return w;
    }
    return std::nullopt;
}

std::optional<u32> RefTree::next_internal(u32 v) const {
    for (u32 i = level_rank_[v] + 1; i <= n_; ++i) {
        u32 w = level_seq_[i - 1];
        if (!children_[w].empty()) return w;
    }
    return std::nullopt;
}

u32 RefTree::leftmost_leaf(u32 v) const {
    while (!children_[v].empty()) v = children_[v].front();
    return v;
}

u32 RefTree::rightmost_leaf(u32 v) const {
    while (!children_[v].empty()) v = children_[v].back();
    return v;
}

u64 RefTree::leaf_rank(u32 v) const { return leaf_rank_[v]; }

u32 RefTree::level_leftmost(u32 level) const {
    for (u32 v : level_seq_)
        if (depth_[v] == level) return v;
    fail("RefTree::level_leftmost: level out of range");
}

u32 RefTree::level_rightmost(u32 level) const {
    u32 best = 0;
    for (u32 v : level_seq_) {
        if (depth_[v] == level) best = v;
        if (depth_[v] > level) break;
    }
    require(best != 0, "RefTree::level_rightmost: level out of range");
    return best;
}

std::optional<u32> RefTree::level_pred(u32 v) const {
    u32 r = level_rank_[v];
    if (r == 1) return std::nullopt;
    u32 w = level_seq_[r - 2];
    if (depth_[w] != depth_[v]) return std::nullopt;
    return w;
}

std::optional<u32> RefTree::level_succ(u32 v) const {
    u32 r = level_rank_[v];
    if (r == n_) return std::nullopt;
    u32 w = level_seq_[r];
    if (depth_[w] != depth_[v]) return std::nullopt;
    return w;
}

RefGraph RefGraph::from_intervals(const IntervalSet& iv) {
    RefGraph g;
    g.n_ = iv.n;
    g.adj_.assign(g.n_ + 1, {});
    for (u32 u = 1; u <= g.n_; ++u)
        for (u32 v = u + 1; v <= g.n_; ++v) {
            // u < v means left[u] < left[v]; they intersect iff left[v] < right[u]
            if (iv.left[v] < iv.right[u]) {
                g.adj_[u].push_back(v);
                g.adj_[v].push_back(u);
            }
        }
    for (auto& a : g.adj_) std::sort(a.begin(), a.end());
    return g;
}

RefGraph RefGraph::from_arcs(const ArcSet& arcs) {
    auto covers = [&](u32 v, double p) {
        double l = arcs.left[v], r = arcs.right[v];
        if (l < r) return l <= p && p <= r;
        return p >= l || p <= r;
    };
    RefGraph g;
    g.n_ = arcs.n;
    g.adj_.assign(g.n_ + 1, {});
    for (u32 u = 1; u <= g.n_; ++u)
        for (u32 v = u + 1; v <= g.n_; ++v) {
            // arcs intersect iff either contains an endpoint of the other
            bool touch = covers(u, arcs.left[v]) || covers(u, arcs.right[v]) ||
                         covers(v, arcs.left[u]) || covers(v, arcs.right[u]);
            if (touch) {
                g.adj_[u].push_back(v);
                g.adj_[v].push_back(u);
            }
        }
    for (auto& a : g.adj_) std::sort(a.begin(), a.end());
    return g;
}

bool RefGraph::adjacent(u32 u, u32 v) const {
    return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
}

std::vector<u32> RefGraph::bfs_all(u32 u) const {
    std::vector<u32> dist(n_ + 1, UINT32_MAX);
    std::deque<u32> q = {u};
    dist[u] = 0;
    while (!q.empty()) {
        u32 x = q.front();
        q.pop_front();
        for (u32 y : adj_[x])
            if (dist[y] == UINT32_MAX) {
                dist[y] = dist[x] + 1;
                q.push_back(y);
            }
    }
    return dist;
}

std::optional<u32> RefGraph::bfs_distance(u32 u, u32 v) const {
    auto d = bfs_all(u);
    if (d[v] == UINT32_MAX) return std::nullopt;
    return d[v];
}

bool RefGraph::connected() const {
    auto d = bfs_all(1);
    for (u32 v = 1; v <= n_; ++v)
        if (d[v] == UINT32_MAX) return false;
    return true;
}

TreeTopology gen_tree(TreeShape shape, u32 n, u64 seed) {
    require(n >= 1, "gen_tree: n must be positive");
    std::vector<u32> parents(n, 0);
    SplitMix64 rng(seed);
    switch (shape) {
        case TreeShape::Path:
            for (u32 v = 2; v <= n; ++v) parents[v - 1] = v - 1;
            break;
        case TreeShape::Star:
            for (u32 v = 2; v <= n; ++v) parents[v - 1] = 1;
            break;
        case TreeShape::Binary: {
            // complete binary tree renumbered in preorder
            std::vector<u32> pre_of(n + 1, 0);  // heap id -> preorder id
            std::vector<u32> heap_stack = {1};
            u32 next = 0;
            while (!heap_stack.empty()) {
                u32 h = heap_stack.back();
                heap_stack.pop_back();
                pre_of[h] = ++next;
                if (2 * h + 1 <= n) heap_stack.push_back(2 * h + 1);
                if (2 * h <= n) heap_stack.push_back(2 * h);
            }
            for (u32 h = 2; h <= n; ++h) parents[pre_of[h] - 1] = pre_of[h / 2];
            break;
        }
        case TreeShape::Caterpillar: {
            // spine path with leaf legs; each new node is either a leg of the
            // current spine end or extends the spine, keeping preorder valid
            std::vector<u32> p = {0};
            u32 spine = 1;
            for (u32 v = 2; v <= n; ++v) {
                p.push_back(spine);
                if (rng.next() & 1) spine = v;
            }
            parents = p;
            break;
        }
        case TreeShape::Random:
        default:
            // uniform random attachment keeps preorder numbering only if each
            // node attaches to a node on the current rightmost path
            for (u32 v = 2; v <= n; ++v) {
                // pick a random ancestor chain position: attach to any previous
                // node whose subtree still ends at v-1, i.e. rightmost path
                u32 u = u32(rng.next_in(1, v - 1));
                parents[v - 1] = u;
            }
            break;
    }
    if (shape == TreeShape::Random) {
        // repair to preorder consistency: parent must lie on the rightmost
        // path of the tree built so far; walk up from v-1
        std::vector<u32> par(n + 1, 0);
        for (u32 v = 2; v <= n; ++v) {
            u32 want = parents[v - 1];
            u32 c = v - 1;
            // candidates on rightmost path: v-1 and its ancestors
            u32 best = c;
            while (c != 0) {
                if (c <= want) {
                    best = c;
                    break;
                }
                c = par[c];
            }
            par[v] = best;
            parents[v - 1] = best;
        }
    }
    return TreeTopology(parents);
}

TreeShape tree_shape_from_name(const std::string& name) {
    if (name == "random") return TreeShape::Random;
    if (name == "path") return TreeShape::Path;
    if (name == "star") return TreeShape::Star;
    if (name == "caterpillar") return TreeShape::Caterpillar;
    if (name == "binary") return TreeShape::Binary;
    fail("unknown tree shape: " + name);
}

namespace {

/// Open/close walk over 2n positions; `close_random` picks the interval to
/// close uniformly (general sets) or FIFO (proper sets).
IntervalSet gen_interval_walk(u32 n, u64 seed, double density, bool proper) {
    require(n >= 1, "gen_intervals: n must be positive");
    SplitMix64 rng(seed);
    std::vector<std::pair<i64, i64>> raw(n);
    std::vector<u32> open;  // vertex indices (0-based), in opening order
    u32 opened = 0;
    u64 closed = 0;
    for (u32 pos = 1; pos <= 2 * n; ++pos) {
        u64 remaining = 2 * n - pos + 1;
        bool must_close = open.size() == remaining;
        bool may_open = opened < n;
        bool do_open;
        if (must_close || !may_open)
            do_open = false;
        else if (open.empty())
            do_open = true;
        else
            do_open = rng.next_unit() < density;
        if (do_open) {
            raw[opened].first = pos;
            open.push_back(opened);
            ++opened;
        } else {
            size_t k = proper ? 0 : size_t(rng.next_below(open.size()));
            u32 v = open[k];
            open.erase(open.begin() + long(k));
            raw[v].second = pos;
            ++closed;
        }
    }
    require(closed == n && opened == n, "gen_intervals: internal error");
    return IntervalSet::normalize(raw);
}

} // namespace

IntervalSet gen_intervals(u32 n, u64 seed, double density) {
    return gen_interval_walk(n, seed, density, false);
}

IntervalSet gen_proper_intervals(u32 n, u64 seed, double density) {
    return gen_interval_walk(n, seed, density, true);
}

ArcSet gen_arcs(u32 n, u64 seed, double density) {
    require(n >= 1, "gen_arcs: n must be positive");
    for (u64 attempt = 0;; ++attempt) {
        SplitMix64 rng(seed + attempt * 0x9e3779b9ull);
        // random pairing of 2n circle positions, with span control:
        // draw a start and a length biased by density
        std::vector<u32> perm(2 * n);
        for (u32 i = 0; i < 2 * n; ++i) perm[i] = i + 1;
        for (u32 i = 2 * n - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.next_below(i + 1)]);
        std::vector<std::pair<i64, i64>> raw(n);
        for (u32 v = 0; v < n; ++v) raw[v] = {perm[2 * v], perm[2 * v + 1]};
        // density shrinks arcs: with probability (1-density) swap to the
        // shorter orientation
        for (auto& [l, r] : raw) {
            u64 span_fwd = (r >= l) ? u64(r - l) : u64(2 * n - (l - r));
            bool prefer_short = rng.next_unit() > density;
            if (prefer_short && span_fwd > n) std::swap(l, r);
        }
        ArcSet arcs = ArcSet::normalize(raw);
        if (RefGraph::from_arcs(arcs).connected()) return arcs;
    }
}

} // namespace slabtree
