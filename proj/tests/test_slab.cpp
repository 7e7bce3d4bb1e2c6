#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "slabtree/refmodels.hpp"
#include "slabtree/slab.hpp"
#include "slabtree/topology.hpp"

using namespace slabtree;

namespace {

TreeView view_of(const TreeTopology& t) {
    TreeView v;
    u32 n = t.size();
    v.parent.assign(n, kNone);
    v.depth.assign(n, 0);
    for (u32 x = 2; x <= n; ++x) {
        v.parent[x - 1] = t.parent(x) - 1;
        v.depth[x - 1] = v.depth[t.parent(x) - 1] + 1;
    }
    v.build_children();
    return v;
}

// Checks the covering contract on a whole tree: disjoint except shared roots,
// size cap, at most one non-root external edge, consecutive children blocks
// (at most two per comp at a shared root).
void check_cover(const TreeView& t, const std::vector<CoverComp>& comps, u32 B) {
    u32 m = t.size();
    std::vector<u32> owner(m, kNone); // comp of each non-root member
    std::vector<u32> root_count(m, 0);
    std::set<u32> covered;
    for (u32 ci = 0; ci < comps.size(); ++ci) {
        const CoverComp& c = comps[ci];
        REQUIRE(c.members.size() <= 2 * u64(B));
        REQUIRE(!c.members.empty());
        bool saw_root = false;
        for (u32 v : c.members) {
            covered.insert(v);
            if (v == c.root) {
                saw_root = true;
                ++root_count[v];
                continue;
            }
            REQUIRE(owner[v] == kNone); // disjoint except shared roots
            owner[v] = ci;
        }
        REQUIRE((c.root == kNone || saw_root));
        // connectivity: every non-root member's parent is in the comp or the
        // member is a top (child of the dummy)
        std::set<u32> memb(c.members.begin(), c.members.end());
        for (u32 v : c.members) {
            if (v == c.root) continue;
            u32 p = t.parent[v];
            if (c.root == kNone) {
                // glued: tops allowed
                if (p != kNone && memb.count(p)) continue;
            } else {
                REQUIRE((p != kNone));
                if (memb.count(p)) continue;
                REQUIRE(false); // non-root member disconnected from comp
            }
        }
        // at most one external (non-root) cross edge
        u32 ext = 0;
        for (u32 v : c.members) {
            if (v == c.root) continue;
            for (u32 k = t.child_start[v]; k < t.child_start[v + 1]; ++k) {
                u32 ch = t.children[k];
                if (!memb.count(ch)) ++ext;
            }
        }
        REQUIRE(ext <= 1);
        if (ext == 1) REQUIRE(c.ext_from != kNone);
    }
    REQUIRE(covered.size() == m); // every node covered

    // shared-root children blocks: consecutive, at most two per comp
    for (u32 v = 0; v < m; ++v) {
        if (root_count[v] == 0) continue;
        std::map<u32, std::vector<u32>> blocks; // comp -> child indices
        for (u32 k = t.child_start[v]; k < t.child_start[v + 1]; ++k) {
            u32 ch = t.children[k];
            if (owner[ch] != kNone) blocks[owner[ch]].push_back(k - t.child_start[v]);
        }
        for (auto& [ci, idx] : blocks) {
            if (comps[ci].root != v) continue;
            u32 runs = 1;
            for (size_t j = 1; j < idx.size(); ++j)
                if (idx[j] != idx[j - 1] + 1) ++runs;
            CHECK(runs <= 2);
        }
    }
}

u64 count_at_cut_levels(const TreeView& t, u32 H, u32 o) {
    u64 c = 0;
    for (u32 v = 0; v < t.size(); ++v)
        if (t.depth[v] >= o && (t.depth[v] - o) % H == 0) ++c;
    return c;
}

} // namespace

TEST_CASE("cover of a 7-node path with B=3") {
    auto t = gen_tree(TreeShape::Path, 7, 0);
    TreeView v = view_of(t);
    auto comps = farzan_munro_cover(v, 3);
    CHECK(comps.size() >= 2);
    for (auto& c : comps) CHECK(c.members.size() <= 6);
    check_cover(v, comps, 3);
}

TEST_CASE("cover of a 10-leaf star with B=3: shared root, consecutive blocks") {
    auto t = gen_tree(TreeShape::Star, 11, 0);
    TreeView v = view_of(t);
    auto comps = farzan_munro_cover(v, 3);
    check_cover(v, comps, 3);
    for (auto& c : comps) {
        if (c.members.size() > 1) CHECK(c.root == 0); // all share the root
    }
}

TEST_CASE("cover with n <= B is a single comp") {
    auto t = gen_tree(TreeShape::Random, 17, 5);
    TreeView v = view_of(t);
    auto comps = farzan_munro_cover(v, 20);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].members.size() == 17);
    CHECK(comps[0].root == 0);
}

TEST_CASE("cover count is O(n/B) with explicit constant") {
    SplitMix64 rng(77);
    for (int iter = 0; iter < 40; ++iter) {
        u32 n = 50 + u32(rng.next_below(3000));
        u32 B = 3 + u32(rng.next_below(40));
        TreeShape shape = TreeShape(iter % 5);
        auto t = gen_tree(shape, n, rng.next());
        TreeView v = view_of(t);
        auto comps = farzan_munro_cover(v, B);
        check_cover(v, comps, B);
        // big closes + branching remainders + forced closes: <= ~6n/B + O(1)
        CHECK(double(comps.size()) <= 6.0 * n / B + 4.0);
    }
}

TEST_CASE("choose_offset minimizes cut nodes; smallest minimizer wins") {
    SUBCASE("uniform path") {
        auto t = gen_tree(TreeShape::Path, 12, 0);
        TreeView v = view_of(t);
        u32 o = choose_offset(v, 4);
        u64 best = count_at_cut_levels(v, 4, o);
        for (u32 cand = 1; cand <= 4; ++cand) {
            u64 c = count_at_cut_levels(v, 4, cand);
            CHECK(best <= c);
            if (c == best) CHECK(o <= cand);
        }
    }
    SUBCASE("heavy level avoided") {
        // 100 nodes on level 2, few nodes on levels 0..6
        std::vector<u32> parents = {0, 1};           // 1 -> 2
        for (u32 i = 0; i < 100; ++i) parents.push_back(2);  // level-2 fan
        // deep tail below the last level-2 node (last child keeps preorder)
        u32 tail = u32(parents.size());
        for (u32 i = 0; i < 4; ++i) {
            parents.push_back(tail);
            tail = u32(parents.size());
        }
        TreeTopology t(parents);
        TreeView v = view_of(t);
        u32 o = choose_offset(v, 4);
        // cut levels {o, o+4, ...} must avoid level 2
        CHECK(o % 4 != 2);
    }
    SUBCASE("single node") {
        auto t = gen_tree(TreeShape::Path, 1, 0);
        TreeView v = view_of(t);
        CHECK(choose_offset(v, 7) == 1);
    }
}

TEST_CASE("slab cover: s-node count and member bounds") {
    SplitMix64 rng(123);
    for (int iter = 0; iter < 30; ++iter) {
        u32 n = 20 + u32(rng.next_below(4000));
        TreeShape shape = TreeShape(iter % 5);
        auto t = gen_tree(shape, n, rng.next());
        TreeView v = view_of(t);
        u32 H = 3 + u32(rng.next_below(8));
        u32 B = H + 1 + u32(rng.next_below(30));
        SlabCover sc = slab_cover(v, H, B);
        CHECK(sc.snodes.size() <= n / H + 1);
        // each comp: canonical levels span <= H, size incl copies <= 2B
        for (auto& c : sc.comps) {
            u32 dmin = UINT32_MAX, dmax = 0;
            for (u32 x : c.members) {
                dmin = std::min(dmin, v.depth[x]);
                dmax = std::max(dmax, v.depth[x]);
            }
            CHECK(dmax - dmin + 1 <= H);
            CHECK(c.members.size() + c.scopy_members.size() <= 2 * u64(B));
        }
        // canonical membership partitions nodes (except shared roots)
        std::vector<u32> owner(n, kNone);
        u64 owned = 0;
        for (u32 ci = 0; ci < sc.comps.size(); ++ci) {
            for (u32 x : sc.comps[ci].members) {
                if (x == sc.comps[ci].root && owner[x] != kNone) continue;
                if (owner[x] == kNone) {
                    owner[x] = ci;
                    ++owned;
                }
            }
        }
        CHECK(owned == n);
    }
}

TEST_CASE("decomposition: canonical names, Theorem-2 style connection types") {
    SplitMix64 rng(9);
    for (int iter = 0; iter < 60; ++iter) {
        u32 n = 1 + u32(rng.next_below(iter < 30 ? 400 : 4000));
        TreeShape shape = TreeShape(iter % 5);
        auto t = gen_tree(shape, n, rng.next());
        SlabParams p;
        p.H = 3 + u32(rng.next_below(5));
        p.B = p.H + 1 + u32(rng.next_below(20));
        p.H2 = 3;
        p.B2 = std::min(p.B, 4 + u32(rng.next_below(8)));
        if (p.B2 <= p.H2) p.B2 = p.H2 + 1;
        Decomposition d(t, p);

        // every node has exactly one canonical name; canonical is idempotent;
        // union of canonical positions = [1..n]
        std::set<u32> seen;
        for (u32 m = 1; m <= d.mini_count(); ++m) {
            const MiniTree& mt = d.mini(m);
            for (u32 u = 1; u <= u32(mt.micros.size()); ++u) {
                const MicroTree& mc = mt.micros[u - 1];
                CHECK(mc.size <= 2 * p.B2 + 2);
                for (u32 pos = 1; pos <= mc.size; ++pos) {
                    TauName name{m, u, pos};
                    u32 shadow = d.shadow_of(name);
                    if (shadow == 0) continue; // dummy entity
                    TauName c = d.canonical(name);
                    TauName c2 = d.canonical(c);
                    CHECK(c == c2);
                    CHECK(d.shadow_of(c) == shadow);
                    if (c == name) {
                        CHECK(!seen.count(shadow));
                        seen.insert(shadow);
                        CHECK(d.tau_of(shadow) == name);
                    }
                }
            }
        }
        CHECK(seen.size() == n);
    }
}

TEST_CASE("decomposition collapses when n <= B2") {
    auto t = gen_tree(TreeShape::Random, 7, 3);
    SlabParams p{10, 20, 5, 12};
    Decomposition d(t, p);
    REQUIRE(d.mini_count() == 1);
    REQUIRE(d.mini(1).micros.size() == 1);
    for (u32 v = 1; v <= 7; ++v) {
        TauName nm = d.tau_of(v);
        CHECK(nm.t1 == 1);
        CHECK(nm.t2 == 1);
        CHECK(nm.t3 == v);
    }
}

TEST_CASE("Fig-1 regime: B=11 H=4 on a ~60-node tree mixes skinny and fat") {
    // ternary top of depth 3 (40 nodes, fat slab) then a path tail (skinny)
    std::vector<u32> parents;
    struct It { u32 parent, depth; };
    std::vector<It> dfs = {{0, 0}};
    u32 id = 0;
    while (!dfs.empty()) {
        It it = dfs.back();
        dfs.pop_back();
        ++id;
        parents.push_back(it.parent);
        if (it.depth < 3)
            for (int k = 0; k < 3; ++k) dfs.push_back({id, it.depth + 1});
    }
    u32 tail = id;  // last node in preorder may take children
    for (int k = 0; k < 20; ++k) {
        parents.push_back(tail);
        tail = ++id;
    }
    TreeTopology topo(parents);
    TreeView v = view_of(topo);
    SlabCover sc = slab_cover(v, 4, 11);
    bool any_skinny = false, any_fat = false;
    for (auto& c : sc.comps) {
        (c.skinny ? any_skinny : any_fat) = true;
        CHECK(c.members.size() + c.scopy_members.size() <= 22);
        u32 dmin = UINT32_MAX, dmax = 0;
        for (u32 x : c.members) {
            dmin = std::min(dmin, v.depth[x]);
            dmax = std::max(dmax, v.depth[x]);
        }
        CHECK(dmax - dmin + 1 <= 4);
    }
    CHECK(any_skinny);
    CHECK(any_fat);
}
