#include "slabtree/slab.hpp"

#include <algorithm>
#include <cmath>

namespace slabtree {

SlabParams SlabParams::defaults(u64 n) {
    double lg = std::log2(double(std::max<u64>(n, 2)));
    auto ceil_u = [](double x) { return u32(std::ceil(x)); };
    SlabParams p;
    p.H = std::max<u32>(3, ceil_u(lg * lg * lg / 2));
    p.B = std::max<u32>({p.H + 1, 8, ceil_u(lg * lg * lg)});
    p.H2 = std::max<u32>(3, ceil_u(lg * lg / 2));
    p.B2 = std::max<u32>({p.H2 + 1, 8, ceil_u(lg * lg)});
    return p;
}

void TreeView::build_children() {
    u32 m = size();
    child_start.assign(m + 1, 0);
    for (u32 v = 1; v < m; ++v) ++child_start[parent[v] + 1];
    for (u32 v = 0; v < m; ++v) child_start[v + 1] += child_start[v];
    children.assign(m ? m - 1 : 0, 0);
    std::vector<u32> at(child_start.begin(), child_start.end() - 1);
    for (u32 v = 1; v < m; ++v) children[at[parent[v]]++] = v;
}

u32 choose_offset(const TreeView& t, u32 H) {
    std::vector<u64> cnt(H, 0);
    for (u32 v = 0; v < t.size(); ++v)
        if (t.depth[v] >= 1) ++cnt[t.depth[v] % H];
    u32 best = 1;
    for (u32 o = 2; o <= H; ++o)
        if (cnt[o % H] < cnt[best % H]) best = o;
    return best;
}

namespace {

// Open component during the covering walk: an intrusive member chain plus at
// most one pending cross edge (a closed child component hanging below).
struct Bag {
    u32 root = kNone;
    u32 head = kNone, tail = kNone; // chain of non-root members
    u32 size = 0;                   // including root
    u32 pend_from = kNone, pend_to = kNone;
};

struct CoverState {
    const TreeView& t;
    u32 B;
    std::vector<u32> subtree;     // subtree sizes
    std::vector<u32> next;        // intrusive member chains
    std::vector<Bag> child_bag;   // returned bag per node (size 0 = empty)
    std::vector<bool> closed_at;  // some component rooted here was emitted
    std::vector<CoverComp>& out;

    CoverState(const TreeView& t_, u32 B_, std::vector<CoverComp>& out_)
        : t(t_), B(B_), out(out_) {
        u32 m = t.size();
        subtree.assign(m, 1);
        for (u32 v = m; v-- > 1;) subtree[t.parent[v]] += subtree[v];
        next.assign(m, kNone);
        child_bag.assign(m, Bag{});
        closed_at.assign(m, false);
    }

    static Bag fresh(u32 v) { return Bag{v, kNone, kNone, 1, kNone, kNone}; }

    void merge(Bag& acc, Bag& b) {
        // b's root becomes a plain member of acc
        next[b.root] = b.head;
        if (acc.tail == kNone) {
            acc.head = b.root;
        } else {
            next[acc.tail] = b.root;
        }
        acc.tail = (b.tail == kNone) ? b.root : b.tail;
        acc.size += b.size;
        if (b.pend_from != kNone) {
            acc.pend_from = b.pend_from;
            acc.pend_to = b.pend_to;
        }
    }

    void emit(const Bag& bag) {
        CoverComp c;
        c.root = bag.root;
        c.members.push_back(bag.root);
        for (u32 x = bag.head; x != kNone; x = next[x]) c.members.push_back(x);
        std::sort(c.members.begin(), c.members.end());
        if (bag.pend_from != kNone && bag.pend_from != bag.root) {
            c.ext_from = bag.pend_from;
            c.ext_to = bag.pend_to;
        }
        closed_at[bag.root] = true;
        out.push_back(std::move(c));
    }

    void run() {
        // iterative postorder
        u32 m = t.size();
        std::vector<u32> stack = {0};
        std::vector<u32> nextc(m, 0);
        while (!stack.empty()) {
            u32 v = stack.back();
            if (nextc[v] < t.degree(v)) {
                stack.push_back(t.children[t.child_start[v] + nextc[v]++]);
                continue;
            }
            stack.pop_back();
            process(v);
        }
        // the root's bag, if any, must close
        Bag& rb = child_bag[0];
        if (rb.size > 0) {
            if (rb.size > 1 || !closed_at[0]) emit(rb);
            rb = Bag{};
        }
    }

    void process(u32 v) {
        u32 h = 0;
        for (u32 ci = t.child_start[v]; ci < t.child_start[v + 1]; ++ci)
            if (subtree[t.children[ci]] >= B) ++h;

        Bag acc = fresh(v);
        bool closed_here = false;
        for (u32 ci = t.child_start[v]; ci < t.child_start[v + 1]; ++ci) {
            u32 u = t.children[ci];
            Bag& bu = child_bag[u];
            bool heavy = subtree[u] >= B;
            if (h >= 2 && heavy) {
                if (acc.size > 1) {
                    emit(acc);
                    closed_here = true;
                    acc = fresh(v);
                }
                if (bu.size > 0) emit(bu);
                bu = Bag{};
                continue;
            }
            if (heavy && bu.size == 0) {
                // gap child: u closed at itself; the edge v->u stays pending
                acc.pend_from = v;
                acc.pend_to = u;
                continue;
            }
            merge(acc, bu);
            bu = Bag{};
            if (acc.size >= B) {
                emit(acc);
                closed_here = true;
                acc = fresh(v);
            }
        }

        if (v == 0) {
            child_bag[0] = acc;
            return;
        }
        if (h >= 2 || closed_here) {
            if (acc.size > 1 || !closed_at[v]) emit(acc);
            child_bag[v] = Bag{};
        } else {
            child_bag[v] = acc;
        }
    }
};

} // namespace

std::vector<CoverComp> farzan_munro_cover(const TreeView& t, u32 B) {
    require(B >= 3, "farzan_munro_cover: B must be at least 3");
    std::vector<CoverComp> comps;
    if (t.size() == 0) return comps;
    CoverState st(t, B, comps);
    st.run();
    return comps;
}

SlabCover slab_cover(const TreeView& t, u32 H, u32 B) {
    SlabCover res;
    u32 m = t.size();
    u32 o = choose_offset(t, H);
    res.offset = o;

    auto slab_of_depth = [&](u32 d) { return d < o ? 0u : (d - o) / H + 1; };
    auto is_snode = [&](u32 v) {
        u32 d = t.depth[v];
        return d >= o && (d - o) % H == 0;
    };

    u32 nslabs = 0;
    for (u32 v = 0; v < m; ++v) nslabs = std::max(nslabs, slab_of_depth(t.depth[v]) + 1);
    res.slab_count = nslabs;
    for (u32 v = 0; v < m; ++v)
        if (is_snode(v)) res.snodes.push_back(v);

    // bucket canonical nodes by slab, in preorder
    std::vector<u32> cnt(nslabs + 1, 0);
    for (u32 v = 0; v < m; ++v) ++cnt[slab_of_depth(t.depth[v]) + 1];
    for (u32 i = 0; i < nslabs; ++i) cnt[i + 1] += cnt[i];
    std::vector<u32> by_slab(m);
    {
        std::vector<u32> at(cnt.begin(), cnt.end() - 1);
        for (u32 v = 0; v < m; ++v) by_slab[at[slab_of_depth(t.depth[v])]++] = v;
    }

    // per slab: materialize the slab tree (dummy + canonicals + promoted
    // copies of next-cut s-nodes) and cover it
    std::vector<u32> ent_shadow;  // per local entity: id in t
    std::vector<u8> ent_copy;     // 1 = promoted s-copy, 2 = dummy
    std::vector<u32> lparent, ldepth;

    for (u32 slab = 0; slab < nslabs; ++slab) {
        u32 lo = cnt[slab], hi = cnt[slab + 1];
        u32 top_depth = slab == 0 ? 0 : o + (slab - 1) * H;
        std::vector<u32> roots;
        u64 total = hi - lo;
        for (u32 k = lo; k < hi; ++k) {
            u32 v = by_slab[k];
            if (t.depth[v] == top_depth) roots.push_back(v);
            // copies of s-children hanging below the slab's last level
            for (u32 ci = t.child_start[v]; ci < t.child_start[v + 1]; ++ci)
                if (slab_of_depth(t.depth[t.children[ci]]) == slab + 1) ++total;
        }
        bool use_dummy = roots.size() != 1;
        bool skinny = total <= B;
        if (!skinny) ++res.fat_slab_count;

        // local preorder numbering; copies interleave at their true child spots
        ent_shadow.clear();
        ent_copy.clear();
        lparent.clear();
        ldepth.clear();
        auto add_entity = [&](u32 shadow, u8 copy, u32 par, u32 dep) {
            ent_shadow.push_back(shadow);
            ent_copy.push_back(copy);
            lparent.push_back(par);
            ldepth.push_back(dep);
            return u32(ent_shadow.size() - 1);
        };
        if (use_dummy) add_entity(kNone, 2, kNone, 0);
        struct Item { u32 v; u32 lpar; bool copy; };
        std::vector<Item> st2;
        for (u32 ri = u32(roots.size()); ri-- > 0;) st2.push_back({roots[ri], use_dummy ? 0 : kNone, false});
        while (!st2.empty()) {
            Item it = st2.back();
            st2.pop_back();
            u32 dep = it.lpar == kNone ? 0 : ldepth[it.lpar] + 1;
            u32 lid = add_entity(it.v, it.copy ? 1 : 0, it.lpar, dep);
            if (it.copy) continue;
            for (u32 ci = t.child_start[it.v + 1]; ci-- > t.child_start[it.v];) {
                u32 c = t.children[ci];
                bool copy = slab_of_depth(t.depth[c]) != slab;
                st2.push_back({c, lid, copy});
            }
        }

        u32 lm = u32(ent_shadow.size());
        std::vector<CoverComp> local;
        if (skinny) {
            CoverComp c;
            c.root = use_dummy ? kNone : 0;
            c.skinny = true;
            for (u32 e = 0; e < lm; ++e)
                if (ent_copy[e] != 2) c.members.push_back(e);
            local.push_back(std::move(c));
        } else {
            TreeView lt;
            lt.parent = lparent;
            lt.depth = ldepth;
            lt.build_children();
            local = farzan_munro_cover(lt, B);
        }
        // map back: split members into canonical/copies; dummy roots -> kNone
        for (CoverComp& c : local) {
            CoverComp g;
            g.skinny = c.skinny || skinny;
            g.slab = slab;
            if (c.root != kNone && ent_copy[c.root] != 2) g.root = ent_shadow[c.root];
            for (u32 e : c.members) {
                if (ent_copy[e] == 2) continue;
                if (ent_copy[e] == 1)
                    g.scopy_members.push_back(ent_shadow[e]);
                else
                    g.members.push_back(ent_shadow[e]);
            }
            std::sort(g.members.begin(), g.members.end());
            std::sort(g.scopy_members.begin(), g.scopy_members.end());
            if (c.ext_from != kNone) {
                g.ext_from = ent_shadow[c.ext_from];
                g.ext_to = ent_shadow[c.ext_to];
            }
            // a lone dummy root whose children all closed below carries nothing
            if (g.members.empty()) continue;
            res.comps.push_back(std::move(g));
        }
    }

    // deterministic global order: by (first member, second member)
    std::sort(res.comps.begin(), res.comps.end(), [](const CoverComp& a, const CoverComp& b) {
        u32 a2 = a.members.size() > 1 ? a.members[1] : kNone;
        u32 b2 = b.members.size() > 1 ? b.members[1] : kNone;
        if (a.members[0] != b.members[0]) return a.members[0] < b.members[0];
        return a2 < b2;
    });
    return res;
}

MicroType MicroTree::type() const {
    MicroType ty;
    ty.size = size;
    ty.bp.reserve(2 * size);
    // parent array is in local preorder; emit BP by DFS
    std::vector<u32> first_child(size, kNone), next_sib(size, kNone), last(size, kNone);
    for (u32 v = 1; v < size; ++v) {
        u32 p = parent[v];
        if (first_child[p] == kNone)
            first_child[p] = v;
        else
            next_sib[last[p]] = v;
        last[p] = v;
    }
    std::string& bp = ty.bp;
    std::vector<u32> st = {0};
    std::vector<u32> state(size, 0);
    bp.push_back('(');
    while (!st.empty()) {
        u32 x = st.back();
        u32 c = state[x] == 0 ? first_child[x] : next_sib[state[x] - 1];
        if (c != kNone) {
            state[x] = c + 1;
            bp.push_back('(');
            st.push_back(c);
        } else {
            bp.push_back(')');
            st.pop_back();
        }
    }
    ty.promoted_ext_pre = ext_pos == kNone ? 0 : ext_pos + 1;
    ty.lowest_level_promoted = bottom != BottomKind::None;
    ty.root_is_dummy = root_is_dummy;
    return ty;
}

namespace {

/// Induced local trees for every component of a cover, with promoted external
/// copies inserted and canonical positions marked in component order.
struct BuiltComp {
    std::vector<u32> parent;
    std::vector<u32> shadow;  // view id, kNone for the comp's dummy entity
    std::vector<PosKind> kind;
    bool root_is_dummy = false;
    u32 root_depth = 0;  // view depth of the root entity
    u32 ext_pos = kNone;
    u32 slab = 0;
    bool skinny = false;
};

std::vector<BuiltComp> build_comp_trees(const TreeView& view, const SlabCover& cover,
                                        std::vector<u32>& canon_comp,
                                        std::vector<u32>& canon_pos) {
    u32 m = view.size();
    std::vector<u32> comp_of(m, kNone);      // for non-root canonical members
    std::vector<u32> scopy_comp(m, kNone);   // component holding the s-copy of v
    for (u32 ci = 0; ci < cover.comps.size(); ++ci) {
        const CoverComp& c = cover.comps[ci];
        for (u32 v : c.members)
            if (v != c.root) comp_of[v] = ci;
        for (u32 v : c.scopy_members) scopy_comp[v] = ci;
    }

    canon_comp.assign(m, kNone);
    canon_pos.assign(m, kNone);
    std::vector<BuiltComp> out(cover.comps.size());

    std::vector<u8> in_comp(m, 0);
    for (u32 ci = 0; ci < cover.comps.size(); ++ci) {
        const CoverComp& c = cover.comps[ci];
        BuiltComp& b = out[ci];
        b.slab = c.slab;
        b.skinny = c.skinny;
        for (u32 v : c.members) in_comp[v] = 1;
        for (u32 v : c.scopy_members) in_comp[v] = 2;

        auto add = [&](u32 shadow, PosKind k, u32 par) {
            b.shadow.push_back(shadow);
            b.kind.push_back(k);
            b.parent.push_back(par);
            return u32(b.shadow.size() - 1);
        };

        struct Item { u32 v; u32 lpar; PosKind k; };
        std::vector<Item> st;
        if (c.root == kNone) {
            b.root_is_dummy = true;
            add(kNone, PosKind::Dummy, kNone);
            // dummy's children: the comp's top-level members, i.e. members
            // whose parent is outside the comp (the view root's slab children)
            for (u32 k = u32(c.members.size()); k-- > 0;) {
                u32 v = c.members[k];
                u32 p = view.parent[v];
                if (p == kNone || !in_comp[p]) st.push_back({v, 0, PosKind::Orig});
            }
            // root depth: one above the children's depth
            b.root_depth = st.empty() ? 0 : view.depth[st.back().v] - 1;
        } else {
            st.push_back({c.root, kNone, PosKind::Orig});
            b.root_depth = view.depth[c.root];
        }

        while (!st.empty()) {
            Item it = st.back();
            st.pop_back();
            u32 lid = add(it.v, it.k, it.lpar);
            if (it.k == PosKind::SCopy || it.k == PosKind::ExtCopy) continue;
            for (u32 ci2 = view.child_start[it.v + 1]; ci2-- > view.child_start[it.v];) {
                u32 ch = view.children[ci2];
                if (in_comp[ch] == 1 && view.parent[ch] == it.v) {
                    // canonical member child (for a shared root only children
                    // assigned to this comp are in_comp)
                    st.push_back({ch, lid, PosKind::Orig});
                } else if (in_comp[ch] == 2) {
                    st.push_back({ch, lid, PosKind::SCopy});
                } else if (it.v == c.ext_from && ch == c.ext_to) {
                    st.push_back({ch, lid, PosKind::ExtCopy});
                }
            }
        }

        // canonical marks: first occurrence in comp order wins
        for (u32 lid = 0; lid < b.shadow.size(); ++lid) {
            u32 v = b.shadow[lid];
            if (v == kNone || b.kind[lid] != PosKind::Orig) continue;
            if (canon_comp[v] == kNone) {
                canon_comp[v] = ci;
                canon_pos[v] = lid;
            } else {
                b.kind[lid] = PosKind::RootDup;
            }
        }
        for (u32 lid = 0; lid < b.shadow.size(); ++lid)
            if (b.kind[lid] == PosKind::ExtCopy) b.ext_pos = lid;

        for (u32 v : c.members) in_comp[v] = 0;
        for (u32 v : c.scopy_members) in_comp[v] = 0;
    }
    return out;
}

} // namespace

Decomposition::Decomposition(const TreeTopology& t, const SlabParams& p) : params_(p) {
    p.validate();
    n_ = t.size();

    // global view (ids = preorder - 1)
    TreeView gv;
    gv.parent.assign(n_, kNone);
    gv.depth.assign(n_, 0);
    for (u32 v = 2; v <= n_; ++v) {
        gv.parent[v - 1] = t.parent(v) - 1;
        gv.depth[v - 1] = gv.depth[t.parent(v) - 1] + 1;
    }
    gv.build_children();

    SlabCover c1;
    if (n_ <= p.B2) {
        // decomposition collapses: one mini = one micro = whole tree
        CoverComp c;
        c.root = 0;
        c.skinny = true;
        c.members.resize(n_);
        for (u32 v = 0; v < n_; ++v) c.members[v] = v;
        c1.offset = 1;
        c1.slab_count = 1;
        c1.comps.push_back(std::move(c));
    } else {
        c1 = slab_cover(gv, p.H, p.B);
    }
    offset1_ = c1.offset;
    slab_count1_ = c1.slab_count;
    fat_slab_count1_ = c1.fat_slab_count;
    snodes1_.reserve(c1.snodes.size());
    for (u32 v : c1.snodes) snodes1_.push_back(v + 1);

    std::vector<u32> canon_comp, canon_pos;
    auto built = build_comp_trees(gv, c1, canon_comp, canon_pos);

    mini_of_.assign(n_ + 1, kNone);
    local_in_mini_.assign(n_ + 1, kNone);
    for (u32 v = 0; v < n_; ++v) {
        mini_of_[v + 1] = canon_comp[v];
        local_in_mini_[v + 1] = canon_pos[v];
    }

    minis_.resize(built.size());
    for (u32 mi = 0; mi < built.size(); ++mi) {
        BuiltComp& b = built[mi];
        MiniTree& mt = minis_[mi];
        u32 lm = u32(b.shadow.size());
        mt.parent = std::move(b.parent);
        mt.root_is_dummy = b.root_is_dummy;
        mt.skinny = b.skinny;
        mt.slab = b.slab;
        mt.root_depth_global = b.root_depth;
        mt.ext_pos = b.ext_pos;
        mt.node.resize(lm);
        for (u32 i = 0; i < lm; ++i) {
            mt.node[i].shadow = b.shadow[i] == kNone ? 0 : b.shadow[i] + 1;
            mt.node[i].kind = b.kind[i];
        }
        mt.depth.assign(lm, 0);
        for (u32 i = 1; i < lm; ++i) mt.depth[i] = mt.depth[mt.parent[i]] + 1;
        {
            TreeView tv;
            tv.parent = mt.parent;
            tv.depth = mt.depth;
            tv.build_children();
            mt.child_start = std::move(tv.child_start);
            mt.children = std::move(tv.children);
        }
        mt.top = TopKind::Plain;
        if (mt.root_is_dummy) mt.top = TopKind::SNodes1;

        // tier 2 inside the mini
        TreeView mv;
        mv.parent = mt.parent;
        mv.depth = mt.depth;
        mv.child_start = mt.child_start;
        mv.children = mt.children;

        SlabCover c2;
        if (lm <= p.B2) {
            CoverComp c;
            c.root = 0;
            c.skinny = true;
            c.members.resize(lm);
            for (u32 v = 0; v < lm; ++v) c.members[v] = v;
            c2.offset = 1;
            c2.slab_count = 1;
            c2.comps.push_back(std::move(c));
        } else {
            c2 = slab_cover(mv, p.H2, p.B2);
        }
        mt.offset2 = c2.offset;
        mt.slab_count2 = c2.slab_count;
        mt.fat_slab_count2 = c2.fat_slab_count;
        mt.snodes2 = c2.snodes;

        std::vector<u32> cc2, cp2;
        auto built2 = build_comp_trees(mv, c2, cc2, cp2);
        mt.micro_of = std::move(cc2);
        mt.pos_in_micro = std::move(cp2);

        mt.micros.resize(built2.size());
        for (u32 ui = 0; ui < built2.size(); ++ui) {
            BuiltComp& b2 = built2[ui];
            MicroTree& mc = mt.micros[ui];
            mc.size = u32(b2.shadow.size());
            mc.parent = std::move(b2.parent);
            mc.root_depth = b2.root_depth;
            mc.ext_pos = b2.ext_pos;
            mc.slab2 = b2.slab;
            mc.skinny2 = b2.skinny;
            mc.node.resize(mc.size);
            for (u32 i = 0; i < mc.size; ++i) {
                mc.node[i].shadow = b2.shadow[i];
                mc.node[i].kind = b2.kind[i];
            }
            // root entity: tier-2 dummy, or a position shadowing the mini root
            u32 rsh = mc.node[0].shadow;
            mc.root_is_dummy = b2.root_is_dummy ||
                               (rsh != kNone && mt.node[rsh].kind == PosKind::Dummy);
            if (b2.root_is_dummy)
                mc.top = TopKind::SNodes2;
            else if (mc.root_is_dummy)
                mc.top = mt.top; // shadows the mini dummy: children are tier-1 s-nodes
            else
                mc.top = TopKind::Plain;

            // lowest level: promoted s-copies of which tier?
            u32 maxd = 0;
            std::vector<u32> dep(mc.size, 0);
            for (u32 i = 1; i < mc.size; ++i) {
                dep[i] = dep[mc.parent[i]] + 1;
                maxd = std::max(maxd, dep[i]);
            }
            bool all_t2 = true, all_t1 = true, any = false;
            for (u32 i = 0; i < mc.size; ++i) {
                if (dep[i] != maxd) continue;
                any = true;
                bool t2copy = mc.node[i].kind == PosKind::SCopy;
                bool t1copy = mc.node[i].kind == PosKind::Orig && mc.node[i].shadow != kNone &&
                              mt.node[mc.node[i].shadow].kind == PosKind::SCopy;
                all_t2 &= t2copy;
                all_t1 &= t1copy;
            }
            if (any && maxd > 0 && all_t2)
                mc.bottom = BottomKind::Tier2;
            else if (any && maxd > 0 && all_t1)
                mc.bottom = BottomKind::Tier1;
        }
    }
}

TauName Decomposition::canonical(TauName t) const {
    require(t.t1 >= 1 && t.t1 <= mini_count(), "canonical: bad mini index");
    const MiniTree& mt = minis_[t.t1 - 1];
    require(t.t2 >= 1 && t.t2 <= u32(mt.micros.size()), "canonical: bad micro index");
    const MicroTree& mc = mt.micros[t.t2 - 1];
    require(t.t3 >= 1 && t.t3 <= mc.size, "canonical: bad position");
    const MicroNode& p = mc.node[t.t3 - 1];
    require(p.shadow != kNone, "canonical: position is a dummy entity");
    const MiniNode& mn = mt.node[p.shadow];
    require(mn.kind != PosKind::Dummy, "canonical: position is a dummy entity");
    if (mn.kind == PosKind::Orig) {
        if (p.kind == PosKind::Orig) return t;
        return TauName{t.t1, mt.micro_of[p.shadow] + 1, mt.pos_in_micro[p.shadow] + 1};
    }
    return tau_of(mn.shadow);
}

} // namespace slabtree
