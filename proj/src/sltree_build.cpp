#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <unordered_map>

#include "slabtree/sltree.hpp"

namespace slabtree {

namespace {

u32 sqrt_ceil(u32 x) {
    u32 r = u32(std::sqrt(double(x)));
    while (r * r < x) ++r;
    return std::max<u32>(r, 1);
}

u32 jump_slots(u32 d, u32 f, u32 cap) { return SlabTree::jump_slots(d, f, cap); }

} // namespace

struct SlabTreeBuilder {
    SlabTree& s;
    const TreeTopology& topo;
    const Decomposition d;
    u32 n;

    // transient per-node data
    std::vector<u32> depthT, heightT, childRankT;
    std::vector<u32> tau1, tau2loc, tau3loc;  // canonical coordinates (0-based t2/t3)
    std::vector<u32> microIdx;                // global micro index of canonical position
    std::vector<u32> level_seq, post_rank, level_rank;
    std::vector<u32> micro_tau_start;
    std::vector<u32> micro_mini;  // mini (0-based) per micro
    std::vector<const MicroTable*> tabs;
    std::vector<u32> type_ids;
    u32 U = 0;
    u64 P = 0;

    SlabTreeBuilder(SlabTree& s_, const TreeTopology& t_, const SlabParams& p)
        : s(s_), topo(t_), d(t_, p), n(t_.size()) {}

    u32 t_of_position(u32 mini0, const MicroTree& mc, u32 pos) const {
        u32 sh = mc.node[pos].shadow;
        if (sh == kNone) return 0;
        return d.mini(mini0 + 1).node[sh].shadow;
    }

    void build() {
        s.n_ = n;
        s.params_ = d.params();
        s.offset1_ = d.offset1();
        s.f1_ = sqrt_ceil(s.params_.H);
        s.cap1_ = s.params_.H + 2;
        s.f2_ = sqrt_ceil(s.params_.H2);
        s.cap2_ = s.params_.H2 + 2;

        base_arrays();
        enumerate_micros();
        geometry_widths();
        mini_micro_rows();
        changer_indexes();
        copy_table();
        root_records();
        jump_pointers();
        snode_tables();
        macro_lca();
        heights_leaves_levels();
        s.finish_load();
        counts();
    }

    void base_arrays() {
        depthT.assign(n + 1, 0);
        heightT.assign(n + 1, 0);
        childRankT.assign(n + 1, 0);
        for (u32 v = 2; v <= n; ++v) depthT[v] = depthT[topo.parent(v)] + 1;
        for (u32 v = n; v >= 2; --v)
            heightT[topo.parent(v)] = std::max(heightT[topo.parent(v)], heightT[v] + 1);
        for (u32 v = 1; v <= n; ++v) {
            u32 r = 1;
            for (const u32* c = topo.children_begin(v); c != topo.children_end(v); ++c)
                childRankT[*c] = r++;
        }
        s.tree_height_ = heightT[1];

        level_seq.reserve(n);
        level_rank.assign(n + 1, 0);
        std::deque<u32> q = {1};
        while (!q.empty()) {
            u32 v = q.front();
            q.pop_front();
            level_seq.push_back(v);
            level_rank[v] = u32(level_seq.size());
            for (const u32* c = topo.children_begin(v); c != topo.children_end(v); ++c)
                q.push_back(*c);
        }
        post_rank.assign(n + 1, 0);
        {
            std::vector<std::pair<u32, u32>> st = {{1, 0}};
            u32 r = 0;
            while (!st.empty()) {
                auto& [v, ci] = st.back();
                if (ci < topo.degree(v)) {
                    st.push_back({topo.child(v, ++ci), 0});
                    // note: ci already incremented
                } else {
                    post_rank[v] = ++r;
                    st.pop_back();
                }
            }
        }
    }

    void enumerate_micros() {
        // global micro indices in τ-order; type dictionary; canonical names
        std::unordered_map<std::string, u32> type_index;
        std::vector<const std::string*> type_keys;
        micro_tau_start.clear();
        u64 pos_total = 0;
        for (u32 m = 0; m < d.mini_count(); ++m) {
            const MiniTree& mt = d.mini(m + 1);
            for (const MicroTree& mc : mt.micros) {
                micro_tau_start.push_back(u32(pos_total));
                micro_mini.push_back(m);
                pos_total += mc.size;
                MicroType ty = mc.type();
                auto [it, fresh] = type_index.emplace(std::move(ty.bp), u32(type_index.size()));
                type_ids.push_back(it->second);
                if (fresh) type_keys.push_back(&it->first);
            }
        }
        U = u32(micro_mini.size());
        P = pos_total;
        micro_tau_start.push_back(u32(pos_total));
        s.total_pos_ = P;

        // freeze distinct shapes into the type store and resolve tables
        BitWriter bw;
        for (const std::string* bp : type_keys) {
            bw.clear();
            for (char ch : *bp) bw.push(ch == '(' ? 1 : 0, 1);
            s.types_.append(bw.words(), bw.bits());
        }
        s.types_.build();
        tabs.resize(U);
        auto& dict = MicroTableDict::instance();
        std::vector<const MicroTable*> by_type(type_keys.size());
        for (u32 ty = 0; ty < type_keys.size(); ++ty) by_type[ty] = dict.get(*type_keys[ty]);
        for (u32 u = 0; u < U; ++u) tabs[u] = by_type[type_ids[u]];

        tau1.assign(n + 1, 0);
        tau2loc.assign(n + 1, 0);
        tau3loc.assign(n + 1, 0);
        microIdx.assign(n + 1, 0);
        for (u32 v = 1; v <= n; ++v) {
            TauName t = d.tau_of(v);
            tau1[v] = t.t1;
            tau2loc[v] = t.t2 - 1;
            tau3loc[v] = t.t3 - 1;
            u32 mstart = 0;
            // micro index = prefix of minis + t2
            microIdx[v] = mini_micro_base(t.t1 - 1) + t.t2 - 1 + mstart;
        }
    }

    std::vector<u32> mini_micro_base_;
    u32 mini_micro_base(u32 m) {
        if (mini_micro_base_.empty()) {
            mini_micro_base_.assign(d.mini_count() + 1, 0);
            for (u32 i = 0; i < d.mini_count(); ++i)
                mini_micro_base_[i + 1] =
                    mini_micro_base_[i] + u32(d.mini(i + 1).micros.size());
        }
        return mini_micro_base_[m];
    }

    void geometry_widths() {
        u32 max_t2 = 1, max_pos = 1, max_deg = 0, max_minih = 1;
        for (u32 m = 0; m < d.mini_count(); ++m) {
            const MiniTree& mt = d.mini(m + 1);
            max_t2 = std::max<u32>(max_t2, u32(mt.micros.size()));
            for (const MicroTree& mc : mt.micros) {
                max_pos = std::max(max_pos, mc.size);
                max_minih = std::max(max_minih, mc.root_depth + 1);
            }
            for (u32 x : mt.depth) max_minih = std::max(max_minih, x + 1);
        }
        for (u32 v = 1; v <= n; ++v) max_deg = std::max(max_deg, topo.degree(v));
        s.wN_ = bit_width_for(n + 1);
        s.wP_ = bit_width_for(P + 1);
        s.wU_ = bit_width_for(U + 1);
        s.wM_ = bit_width_for(d.mini_count() + 1);
        s.wT2_ = bit_width_for(max_t2 + 1);
        s.wPos_ = bit_width_for(max_pos + 1);
        s.wD_ = bit_width_for(u64(s.tree_height_) + 2);
        s.wMD_ = bit_width_for(u64(max_minih) + 2);
        s.wDeg_ = bit_width_for(u64(max_deg) + 1);
        s.wH_ = bit_width_for(u64(s.tree_height_) + 2);
        s.wTy_ = bit_width_for(s.types_.size() + 1);
    }

    u64 pack_pos(u32 t2_0, u32 t3_0) const {
        return (u64(t2_0) << s.wPos_) | t3_0;
    }
    u64 pack_full(u32 t1_0, u32 t2_0, u32 t3_0) const {
        return (u64(t1_0) << (s.wT2_ + s.wPos_)) | pack_pos(t2_0, t3_0);
    }

    void mini_micro_rows() {
        u32 M = d.mini_count();
        s.mini_anchor_.reset(M, s.wD_);
        s.mini_micro_start_.reset(M + 1, s.wU_);
        s.mini_flags_.reset(M, 1);
        s.mini_root_pos_.reset(M, s.wT2_ + s.wPos_);
        s.mini_off2_.reset(M, bit_width_for(s.params_.H2 + 1));
        s.mini_near_s1_.reset(M, bit_width_for(d.snodes1().size() + 2));

        for (u32 m = 0; m < M; ++m) {
            const MiniTree& mt = d.mini(m + 1);
            s.mini_anchor_.set(m, mt.root_depth_global);
            s.mini_micro_start_.set(m, mini_micro_base(m));
            s.mini_flags_.set(m, mt.root_is_dummy ? 1 : 0);
            if (!mt.root_is_dummy)
                s.mini_root_pos_.set(m, pack_pos(mt.micro_of[0], mt.pos_in_micro[0]));
            s.mini_off2_.set(m, mt.offset2);
        }
        s.mini_micro_start_.set(M, U);

        u32 wflags = 6;
        int roww = s.wP_ + s.wTy_ + s.wMD_ + wflags + s.wPos_;
        s.micro_row_.reset(U, roww);
        for (u32 u = 0; u < U; ++u) {
            u32 m = micro_mini[u];
            const MicroTree& mc = d.mini(m + 1).micros[u - mini_micro_base(m)];
            u64 flags = (mc.root_is_dummy ? 1 : 0) | (u64(u8(mc.top)) << 1) |
                        (u64(u8(mc.bottom)) << 3) | 0;
            bool root_leaf = false;
            if (mc.size == 1 && !mc.root_is_dummy) {
                u32 tv = t_of_position(m, mc, 0);
                if (tv != 0 && topo.degree(tv) == 0) root_leaf = true;
            }
            flags |= u64(root_leaf ? 1 : 0) << 5;
            u64 row = u64(micro_tau_start[u]);
            row |= u64(type_ids[u]) << s.wP_;
            row |= u64(mc.root_depth) << (s.wP_ + s.wTy_);
            row |= flags << (s.wP_ + s.wTy_ + s.wMD_);
            row |= u64(mc.ext_pos == kNone ? 0 : mc.ext_pos + 1)
                   << (s.wP_ + s.wTy_ + s.wMD_ + wflags);
            s.micro_row_.set(u, row);
        }
    }

    // -------- changer machinery --------
    struct Seq {
        const std::vector<u32>* seq;  // X-order sequence of T nodes (1-based entries)
        u32 (SlabTreeBuilder::*local_rank)(u32 v) const;
    };

    u32 local_pre(u32 v) const { return tau3loc[v]; }
    u32 local_lo(u32 v) const { return tabs[microIdx[v]]->pre2lo[tau3loc[v]]; }
    u32 local_post(u32 v) const { return tabs[microIdx[v]]->pre2post[tau3loc[v]]; }

    void build_order(SlabTree::OrderIndex& oi, const std::vector<u32>& seq,
                     u32 (SlabTreeBuilder::*lrank)(u32) const, bool level_extras,
                     u64* t1_count, u64* t2_count) {
        std::vector<u64> t1pos, t2pos;
        std::vector<u32> t1val;            // τ1 per t1 changer
        std::vector<u64> t2sel;            // packed (τ2, localRank)
        std::vector<std::pair<u64, u64>> t2tau;  // (τ slot, X-rank)
        std::vector<u64> prevint2;         // level only, aligned with t2tau order later
        std::vector<std::pair<u64, u64>> t2tau_extra;  // slot -> prev-internal payload
        std::vector<u64> prevint1;         // level only, aligned with t1 changer order
        u32 last_int = 0;                  // last internal node in X order (level only)

        for (u32 i = 0; i < n; ++i) {
            u32 v = seq[i];
            u32 prev = i ? seq[i - 1] : 0;
            bool c1 = i == 0 || tau1[v] != tau1[prev];
            bool c2 = c1 || tau2loc[v] != tau2loc[prev];
            if (c1) {
                t1pos.push_back(i);
                t1val.push_back(tau1[v] - 1);
                if (level_extras) prevint1.push_back(last_int == 0 ? 0 : last_int);
            }
            if (c2) {
                t2pos.push_back(i);
                u32 lr = (this->*lrank)(v);
                t2sel.push_back((u64(tau2loc[v]) << s.wPos_) | lr);
                u64 slot = u64(micro_tau_start[microIdx[v]]) + lr;
                t2tau.push_back({slot, i});
                if (level_extras) {
                    u64 payload = 0;
                    if (last_int != 0 && tau1[last_int] == tau1[v]) {
                        payload = 1 | (pack_pos(tau2loc[last_int], tau3loc[last_int]) << 1);
                    }
                    t2tau_extra.push_back({slot, payload});
                }
            }
            if (level_extras && topo.degree(v) > 0) last_int = v;
        }

        *t1_count = t1pos.size();
        *t2_count = t2pos.size();

        oi.t1_marks.build(t1pos, n);
        oi.t2_marks.build(t2pos, n);
        oi.sel_t1.reset(t1val.size(), s.wM_);
        for (u64 i = 0; i < t1val.size(); ++i) oi.sel_t1.set(i, t1val[i]);
        oi.sel_t2.reset(t2sel.size(), s.wT2_ + s.wPos_);
        for (u64 i = 0; i < t2sel.size(); ++i) oi.sel_t2.set(i, t2sel[i]);

        std::sort(t2tau.begin(), t2tau.end());
        std::vector<u64> slots(t2tau.size());
        for (u64 i = 0; i < t2tau.size(); ++i) slots[i] = t2tau[i].first;
        oi.t2_tau.build(slots, P);
        oi.tau_t2.reset(t2tau.size(), s.wN_);
        for (u64 i = 0; i < t2tau.size(); ++i) oi.tau_t2.set(i, t2tau[i].second);

        if (level_extras) {
            std::sort(t2tau_extra.begin(), t2tau_extra.end());
            s.lev_prevint_t2_.reset(t2tau_extra.size(), 1 + s.wT2_ + s.wPos_);
            for (u64 i = 0; i < t2tau_extra.size(); ++i)
                s.lev_prevint_t2_.set(i, t2tau_extra[i].second);
            s.lev_prevint_t1_.reset(prevint1.size(), s.wN_);
            for (u64 i = 0; i < prevint1.size(); ++i) s.lev_prevint_t1_.set(i, prevint1[i]);
        }
    }

    void changer_indexes() {
        std::vector<u32> pre_seq(n);
        for (u32 v = 1; v <= n; ++v) pre_seq[v - 1] = v;
        std::vector<u32> post_seq(n);
        for (u32 v = 1; v <= n; ++v) post_seq[post_rank[v] - 1] = v;

        build_order(s.pre_, pre_seq, &SlabTreeBuilder::local_pre, false,
                    &s.counts_.changers_pre_t1, &s.counts_.changers_pre_t2);
        build_order(s.post_, post_seq, &SlabTreeBuilder::local_post, false,
                    &s.counts_.changers_post_t1, &s.counts_.changers_post_t2);
        build_order(s.lev_, level_seq, &SlabTreeBuilder::local_lo, true,
                    &s.counts_.changers_level_t1, &s.counts_.changers_level_t2);

        // leaf prefix per tier-2 pre changer + leaf select map
        u64 leaves = 0;
        std::vector<u64> pref;
        std::vector<u64> ls_pos;
        u64 changer_i = 0;
        for (u32 v = 1; v <= n; ++v) {
            bool c2 = v == 1 || tau1[v] != tau1[v - 1] || tau2loc[v] != tau2loc[v - 1];
            if (c2) {
                pref.push_back(leaves);
                ls_pos.push_back(leaves + changer_i);
                ++changer_i;
            }
            if (topo.degree(v) == 0) ++leaves;
        }
        s.leaf_count_ = leaves;
        s.leaf_prefix_.reset(pref.size(), bit_width_for(leaves + 1));
        for (u64 i = 0; i < pref.size(); ++i) s.leaf_prefix_.set(i, pref[i]);
        s.leaf_sel_bv_.build(ls_pos, leaves + changer_i + 1);

        // level starts
        std::vector<u64> starts;
        for (u32 i = 0; i < n; ++i)
            if (i == 0 || depthT[level_seq[i]] != depthT[level_seq[i - 1]]) starts.push_back(i);
        starts.push_back(n);
        s.level_starts_.build(starts, u64(n) + 1);
    }

    void copy_table() {
        std::vector<u64> marks;
        std::vector<u64> payloads;
        for (u32 m = 0; m < d.mini_count(); ++m) {
            const MiniTree& mt = d.mini(m + 1);
            for (u32 ui = 0; ui < mt.micros.size(); ++ui) {
                const MicroTree& mc = mt.micros[ui];
                u32 u = mini_micro_base(m) + ui;
                for (u32 p = 0; p < mc.size; ++p) {
                    const MicroNode& mn = mc.node[p];
                    if (mn.shadow == kNone) continue;  // tier-2 dummy entity
                    const MiniNode& min = mt.node[mn.shadow];
                    if (min.kind == PosKind::Dummy) continue;
                    bool canon2 = mn.kind == PosKind::Orig;
                    bool canon1 = min.kind == PosKind::Orig;
                    if (canon2 && canon1) continue;  // canonical position
                    u64 slot = u64(micro_tau_start[u]) + p;
                    marks.push_back(slot);
                    u64 pay;
                    if (canon1) {
                        // same mini: point at the tier-2 canonical position
                        pay = pack_pos(mt.micro_of[mn.shadow], mt.pos_in_micro[mn.shadow]) << 1;
                    } else {
                        u32 v = min.shadow;
                        pay = (pack_full(tau1[v] - 1, tau2loc[v], tau3loc[v]) << 1) | 1;
                    }
                    payloads.push_back(pay);
                }
            }
        }
        s.copy_marks_.build(marks, P);
        s.copy_payload_.reset(payloads.size(), 1 + s.wM_ + s.wT2_ + s.wPos_);
        for (u64 i = 0; i < payloads.size(); ++i) s.copy_payload_.set(i, payloads[i]);
    }

    void root_records() {
        u32 M = d.mini_count();
        // gather blocks per canonical-rooted T node
        struct Blk {
            u32 start, len;
            u32 micro;
            bool direct;
        };
        std::map<u32, std::vector<Blk>> by_node;  // T node -> blocks (local ones first)
        s.micro_b1_.reset(U, s.wDeg_);
        s.micro_b2_.reset(U, s.wPos_ + s.wDeg_);

        for (u32 m = 0; m < M; ++m) {
            const MiniTree& mt = d.mini(m + 1);
            for (u32 ui = 0; ui < mt.micros.size(); ++ui) {
                const MicroTree& mc = mt.micros[ui];
                u32 u = mini_micro_base(m) + ui;
                if (mc.root_is_dummy) continue;
                u32 v = t_of_position(m, mc, 0);
                if (v == 0) continue;
                // local children of the root position, in order
                std::vector<u32> ranks;
                for (u32 p = 1; p < mc.size; ++p)
                    if (mc.parent[p] == 0) {
                        u32 c = t_of_position(m, mc, p);
                        ranks.push_back(childRankT[c]);
                    }
                if (ranks.empty()) continue;
                // split into consecutive runs (at most two by the covering)
                u32 run_start = 0;
                u32 nruns = 0;
                for (u32 k = 1; k <= ranks.size(); ++k) {
                    if (k == ranks.size() || ranks[k] != ranks[k - 1] + 1) {
                        Blk b{ranks[run_start], k - run_start, u, false};
                        by_node[v].push_back(b);
                        if (nruns == 0)
                            s.micro_b1_.set(u, b.start);
                        else
                            s.micro_b2_.set(u, (u64(run_start + 1) << s.wDeg_) | (b.start - 1));
                        ++nruns;
                        run_start = k;
                    }
                }
                require(nruns <= 2, "root blocks: more than two runs");
            }
        }
        // direct entries for children reachable only as comp roots
        for (auto& [v, blks] : by_node) {
            std::vector<bool> covered(topo.degree(v) + 1, false);
            for (const Blk& b : blks)
                for (u32 k = 0; k < b.len; ++k) covered[b.start + k] = true;
            for (u32 r = 1; r <= topo.degree(v); ++r) {
                if (covered[r]) continue;
                u32 c = topo.child(v, r);
                blks.push_back(Blk{r, 1, microIdx[c], true});
            }
            std::sort(blks.begin(), blks.end(),
                      [](const Blk& a, const Blk& b) { return a.start < b.start; });
        }

        // records only for canonically-rooted micros
        std::vector<u32> rec_micro;
        s.micro_root_rec_.reset(U, bit_width_for(by_node.size() + 1));
        s.micro_root_height_.reset(U, s.wH_);
        u64 seg_total = 0, blk_total = 0;
        std::vector<u64> csp;
        std::vector<u64> rrdeg, rrcr, rrseg, rrblk;
        std::vector<u64> blocks;
        for (u32 u = 0; u < U; ++u) {
            u32 m = micro_mini[u];
            const MicroTree& mc = d.mini(m + 1).micros[u - mini_micro_base(m)];
            if (mc.root_is_dummy) continue;
            u32 v = t_of_position(m, mc, 0);
            if (v == 0) continue;
            s.micro_root_height_.set(u, heightT[v]);
            if (microIdx[v] != u || tau3loc[v] != 0) continue;  // not the canonical root
            auto it = by_node.find(v);
            rrdeg.push_back(topo.degree(v));
            rrcr.push_back(childRankT[v]);
            rrseg.push_back(seg_total);
            rrblk.push_back(blk_total);
            if (it != by_node.end()) {
                for (const Blk& b : it->second) {
                    csp.push_back(seg_total + b.start - 1);
                    blocks.push_back((u64(b.micro) << (s.wDeg_ + 1)) |
                                     (u64(b.start - 1) << 1) | (b.direct ? 1 : 0));
                    ++blk_total;
                }
            }
            seg_total += topo.degree(v);
            s.micro_root_rec_.set(u, rrdeg.size());
        }
        rrseg.push_back(seg_total);
        rrblk.push_back(blk_total);
        s.rr_degree_.reset(rrdeg.size(), s.wDeg_);
        s.rr_child_rank_.reset(rrcr.size(), s.wDeg_);
        s.rr_seg_start_.reset(rrseg.size(), bit_width_for(seg_total + 1));
        s.rr_blocks_start_.reset(rrblk.size(), bit_width_for(blk_total + 1));
        for (u64 i = 0; i < rrdeg.size(); ++i) {
            s.rr_degree_.set(i, rrdeg[i]);
            s.rr_child_rank_.set(i, rrcr[i]);
        }
        for (u64 i = 0; i < rrseg.size(); ++i) s.rr_seg_start_.set(i, rrseg[i]);
        for (u64 i = 0; i < rrblk.size(); ++i) s.rr_blocks_start_.set(i, rrblk[i]);
        s.csplit_.build(csp, seg_total + 1);
        s.blocks_.reset(blocks.size(), s.wU_ + s.wDeg_ + 1);
        for (u64 i = 0; i < blocks.size(); ++i) s.blocks_.set(i, blocks[i]);
    }

    // T-node of each tier-2 jump source, with its mini-local depth
    struct Src {
        u32 tnode;
        u32 mini;
        u32 mini_depth;
    };
    std::vector<Src> t2_sources;

    void jump_pointers() {
        u32 M = d.mini_count();
        // enumerate tier-2 sources: per micro, the real root or the depth-1
        // children of a tier-2 dummy (not of the mini dummy)
        std::vector<u64> src_start(U + 1, 0);
        for (u32 u = 0; u < U; ++u) {
            u32 m = micro_mini[u];
            const MiniTree& mt = d.mini(m + 1);
            const MicroTree& mc = mt.micros[u - mini_micro_base(m)];
            src_start[u] = t2_sources.size();
            if (!mc.root_is_dummy) {
                u32 v = t_of_position(m, mc, 0);
                if (v != 0)
                    t2_sources.push_back({v, m, mc.root_depth});
            } else if (mc.top == TopKind::SNodes2) {
                for (u32 p = 1; p < mc.size; ++p)
                    if (mc.parent[p] == 0) {
                        u32 v = t_of_position(m, mc, p);
                        t2_sources.push_back({v, m, mc.root_depth + 1});
                    }
            }
        }
        src_start[U] = t2_sources.size();
        s.micro_src_start_.reset(U + 1, bit_width_for(t2_sources.size() + 1));
        for (u32 u = 0; u <= U; ++u) s.micro_src_start_.set(u, src_start[u]);

        // pointer rows
        std::vector<u64> joff(t2_sources.size() + 1, 0);
        u64 total = 0;
        for (u64 i = 0; i < t2_sources.size(); ++i) {
            joff[i] = total;
            u32 m = t2_sources[i].mini;
            u32 dmax = t2_sources[i].mini_depth -
                       (d.mini(m + 1).root_is_dummy ? 1 : 0);
            total += jump_slots(dmax, s.f2_, s.cap2_);
        }
        joff[t2_sources.size()] = total;
        s.src_jump_off_.reset(joff.size(), bit_width_for(total + 1));
        for (u64 i = 0; i < joff.size(); ++i) s.src_jump_off_.set(i, joff[i]);
        s.t2_ptrs_.reset(total, s.wT2_ + s.wPos_);
        s.src_near_s2_.reset(t2_sources.size(), bit_width_for(max_s2_per_mini() + 2));

        // fill by walking ancestors with a stack; sources grouped by node via
        // sorted cursors (the DFS first-visits nodes in increasing preorder)
        std::vector<u32> anc_stack(s.tree_height_ + 2, 0);
        std::vector<std::pair<u32, u32>> srcs_sorted;  // (tnode, srcIdx)
        srcs_sorted.reserve(t2_sources.size());
        for (u64 i = 0; i < t2_sources.size(); ++i)
            srcs_sorted.push_back({t2_sources[i].tnode, u32(i)});
        std::sort(srcs_sorted.begin(), srcs_sorted.end());

        // tier-1 sources: real mini roots (per mini) and s1 nodes
        const auto& s1 = d.snodes1();
        std::vector<u32> s1_index(n + 1, kNone);
        for (u32 i = 0; i < s1.size(); ++i) s1_index[s1[i]] = i;
        std::vector<u64> mini_joff(M + 1, 0);
        std::vector<u64> s1_joff(s1.size() + 1, 0);
        u64 t1_total = 0;
        std::vector<u32> mini_root_node(M, 0);
        for (u32 m = 0; m < M; ++m) {
            mini_joff[m] = t1_total;
            const MiniTree& mt = d.mini(m + 1);
            if (!mt.root_is_dummy && mt.node[0].shadow != 0 && s1_index[mt.node[0].shadow] == kNone) {
                mini_root_node[m] = mt.node[0].shadow;
                t1_total += jump_slots(depthT[mt.node[0].shadow], s.f1_, s.cap1_);
            }
        }
        mini_joff[M] = t1_total;
        for (u32 i = 0; i < s1.size(); ++i) {
            s1_joff[i] = t1_total;
            t1_total += jump_slots(depthT[s1[i]], s.f1_, s.cap1_);
        }
        s1_joff[s1.size()] = t1_total;
        s.mini_jump_off_.reset(M + 1, bit_width_for(t1_total + 1));
        for (u32 m = 0; m <= M; ++m) s.mini_jump_off_.set(m, mini_joff[m]);
        s.s1_jump_off_.reset(s1.size() + 1, bit_width_for(t1_total + 1));
        for (u64 i = 0; i < s1_joff.size(); ++i) s.s1_jump_off_.set(i, s1_joff[i]);
        s.t1_ptrs_.reset(t1_total, s.wM_ + s.wT2_ + s.wPos_);

        std::vector<std::pair<u32, std::pair<u64, u32>>> t1rows_sorted;  // (node, (off, depth))
        for (u32 m = 0; m < M; ++m)
            if (mini_root_node[m] != 0)
                t1rows_sorted.push_back(
                    {mini_root_node[m], {mini_joff[m], depthT[mini_root_node[m]]}});
        for (u32 i = 0; i < s1.size(); ++i)
            t1rows_sorted.push_back({s1[i], {s1_joff[i], depthT[s1[i]]}});
        std::sort(t1rows_sorted.begin(), t1rows_sorted.end());

        // single DFS filling all pointer rows
        u64 cur2 = 0, cur1 = 0;
        std::vector<std::pair<u32, u32>> st = {{1, 0}};
        while (!st.empty()) {
            auto& [v, ci] = st.back();
            if (ci == 0) {
                anc_stack[depthT[v]] = v;
                for (; cur2 < srcs_sorted.size() && srcs_sorted[cur2].first == v; ++cur2) {
                    u32 si = srcs_sorted[cur2].second;
                    u32 m = t2_sources[si].mini;
                    const MiniTree& mt = d.mini(m + 1);
                    u32 dmax = t2_sources[si].mini_depth - (mt.root_is_dummy ? 1 : 0);
                    u64 off = s.src_jump_off_.get(si);
                    u32 nf = std::min(s.f2_, dmax);
                    for (u32 k = 1; k <= nf; ++k)
                        s.t2_ptrs_.set(off + k - 1, pos_pack_of(anc_stack[depthT[v] - k], m));
                    u32 top = std::min(s.cap2_, dmax);
                    for (u32 sd = 2 * s.f2_; sd <= top; sd += s.f2_)
                        s.t2_ptrs_.set(off + nf + sd / s.f2_ - 2,
                                       pos_pack_of(anc_stack[depthT[v] - sd], m));
                    s.src_near_s2_.set(si, near_s2_of(v, m, t2_sources[si].mini_depth));
                }
                for (; cur1 < t1rows_sorted.size() && t1rows_sorted[cur1].first == v; ++cur1) {
                    auto [off, dep] = t1rows_sorted[cur1].second;
                    u32 nf = std::min(s.f1_, dep);
                    for (u32 k = 1; k <= nf; ++k)
                        s.t1_ptrs_.set(off + k - 1, full_pack_of(anc_stack[depthT[v] - k]));
                    u32 top = std::min(s.cap1_, dep);
                    for (u32 sd = 2 * s.f1_; sd <= top; sd += s.f1_)
                        s.t1_ptrs_.set(off + nf + sd / s.f1_ - 2,
                                       full_pack_of(anc_stack[depthT[v] - sd]));
                }
            }
            if (ci < topo.degree(v)) {
                u32 c = topo.child(v, ++ci);
                st.push_back({c, 0});
            } else {
                st.pop_back();
            }
        }

        // nearest s1 ancestor of each mini's top entity
        for (u32 m = 0; m < M; ++m) {
            const MiniTree& mt = d.mini(m + 1);
            u32 top_depth = mt.root_depth_global + (mt.root_is_dummy ? 1 : 0);
            // strict ancestor at the highest cut level <= top_depth - 1
            u64 o = s.offset1_;
            if (top_depth >= 1 && top_depth - 1 >= o && n > s.params_.B2) {
                u32 cut = u32(o + ((top_depth - 1 - o) / s.params_.H) * s.params_.H);
                // find the ancestor of the top entity at that depth via walk-up
                // (anchors are per-mini; done with the topology for simplicity)
                u32 x = mt.root_is_dummy ? mt.node[mt.child_start[0]] .shadow
                                         : mt.node[0].shadow;
                // walk up; O(H) per mini at build time
                while (x != 0 && depthT[x] > cut) x = topo.parent(x);
                if (x != 0 && s1_index[x] != kNone) s.mini_near_s1_.set(m, s1_index[x] + 1);
            }
        }
        (void)M;
    }

    u64 pos_pack_of(u32 v, u32 expect_mini) const {
        if (tau1[v] - 1 == expect_mini) return pack_pos(tau2loc[v], tau3loc[v]);
        // a shared mini root canonical elsewhere: use its in-mini occurrence
        const MiniTree& mt = d.mini(expect_mini + 1);
        require(!mt.root_is_dummy && mt.node[0].shadow == v, "jump target outside mini");
        return pack_pos(mt.micro_of[0], mt.pos_in_micro[0]);
    }
    u64 full_pack_of(u32 v) const { return pack_full(tau1[v] - 1, tau2loc[v], tau3loc[v]); }

    u32 max_s2_per_mini_ = 0;
    u32 max_s2_per_mini() {
        if (max_s2_per_mini_ == 0) {
            max_s2_per_mini_ = 1;
            for (u32 m = 0; m < d.mini_count(); ++m)
                max_s2_per_mini_ =
                    std::max(max_s2_per_mini_, u32(d.mini(m + 1).snodes2.size()));
        }
        return max_s2_per_mini_;
    }

    // nearest strict tier-2 s ancestor of T node v (mini-local depth dep) in mini m
    u32 near_s2_of(u32 v, u32 m, u32 dep) const {
        const MiniTree& mt = d.mini(m + 1);
        if (mt.snodes2.empty()) return 0;
        u32 o2 = mt.offset2;
        if (dep == 0 || dep - 1 < o2) return 0;
        u32 cut = o2 + ((dep - 1 - o2) / s.params_.H2) * s.params_.H2;
        // ancestor of v at mini-local depth cut: walk with topology
        u32 x = v;
        u32 dx = dep;
        while (dx > cut) {
            x = topo.parent(x);
            --dx;
        }
        return s2_rank_of(m, x) + 1;
    }

    // maps T node x (a tier-2 s-node of mini m) to its index in mt.snodes2
    u32 s2_rank_of(u32 m, u32 x) const {
        const MiniTree& mt = d.mini(m + 1);
        require(tau1[x] - 1 == m, "node not canonical in expected mini");
        u32 loc = d.local_of(x);
        auto it = std::lower_bound(mt.snodes2.begin(), mt.snodes2.end(), loc);
        require(it != mt.snodes2.end() && *it == loc, "tier-2 s-node lookup failed");
        return u32(it - mt.snodes2.begin());
    }

    void snode_tables() {
        u32 M = d.mini_count();
        const auto& s1 = d.snodes1();
        u32 S1 = u32(s1.size());

        std::vector<u64> spos;
        for (u32 v : s1) spos.push_back(u64(v) - 1);
        s.s1_marks_.build(spos, n);

        s.s1_macro_parent_.reset(S1, bit_width_for(S1 + 1));
        s.s1_child_rank_.reset(S1, s.wDeg_);
        u32 H = s.params_.H, o1 = s.offset1_;
        for (u32 i = 0; i < S1; ++i) {
            u32 v = s1[i];
            s.s1_child_rank_.set(i, childRankT[v]);
            if (depthT[v] >= o1 + H) {
                // ancestor at the previous cut level is itself an s-node
                u32 x = v;
                for (u32 k = 0; k < H; ++k) x = topo.parent(x);
                auto it = std::lower_bound(s1.begin(), s1.end(), x);
                require(it != s1.end() && *it == x, "tier-1 macro parent missing");
                s.s1_macro_parent_.set(i, u32(it - s1.begin()) + 1);
            }
        }

        // tier-2 s-node tables, grouped per mini
        std::vector<u64> s2start(M + 1, 0);
        u32 S2 = 0;
        for (u32 m = 0; m < M; ++m) {
            s2start[m] = S2;
            S2 += u32(d.mini(m + 1).snodes2.size());
        }
        s2start[M] = S2;
        s.mini_s2_start_.reset(M + 1, bit_width_for(S2 + 1));
        for (u32 m = 0; m <= M; ++m) s.mini_s2_start_.set(m, s2start[m]);

        s.s2_pos_.reset(S2, s.wT2_ + s.wPos_);
        s.s2_src_.reset(S2, bit_width_for(t2_sources.size() + 1));
        s.s2_child_rank_.reset(S2, s.wDeg_);
        s.s2_macro_parent_.reset(S2, bit_width_for(max_s2_per_mini() + 1));
        for (u32 m = 0; m < M; ++m) {
            const MiniTree& mt = d.mini(m + 1);
            u32 o2 = mt.offset2, H2 = s.params_.H2;
            for (u32 k = 0; k < mt.snodes2.size(); ++k) {
                u32 loc = mt.snodes2[k];
                u32 gi = u32(s2start[m]) + k;
                u32 t2 = mt.micro_of[loc], t3 = mt.pos_in_micro[loc];
                s.s2_pos_.set(gi, pack_pos(t2, t3));
                // source row: the canonical position must be a tier-2 source
                u32 u = mini_micro_base(m) + t2;
                const MicroTree& mc = mt.micros[t2];
                u64 srow;
                if (!mc.root_is_dummy) {
                    require(t3 == 0, "tier-2 s-node canonical at unexpected position");
                    srow = s.micro_src_start_.get(u);
                } else {
                    srow = s.micro_src_start_.get(u) + tabs[u]->child_rank[t3] - 1;
                }
                s.s2_src_.set(gi, srow);
                u32 tv = mt.node[loc].shadow;
                s.s2_child_rank_.set(gi, tv ? childRankT[tv] : 0);
                if (mt.depth[loc] >= o2 + H2) {
                    u32 x = loc;
                    for (u32 kk = 0; kk < H2; ++kk) x = mt.parent[x];
                    auto it = std::lower_bound(mt.snodes2.begin(), mt.snodes2.end(), x);
                    require(it != mt.snodes2.end() && *it == x, "tier-2 macro parent missing");
                    s.s2_macro_parent_.set(gi, u32(it - mt.snodes2.begin()) + 1);
                }
            }
        }

        // per-micro anchors into s1/s2 tables for depth-1 children
        s.micro_s1_first_.reset(U, bit_width_for(S1 + 1));
        s.micro_s2_first_.reset(U, bit_width_for(max_s2_per_mini() + 1));
        std::vector<u32> s1_index(n + 1, kNone);
        for (u32 i = 0; i < S1; ++i) s1_index[s1[i]] = i;
        for (u32 u = 0; u < U; ++u) {
            u32 m = micro_mini[u];
            const MiniTree& mt = d.mini(m + 1);
            const MicroTree& mc = mt.micros[u - mini_micro_base(m)];
            if (!mc.root_is_dummy) continue;
            // first depth-1 child position
            u32 first = kNone;
            for (u32 p = 1; p < mc.size && first == kNone; ++p)
                if (mc.parent[p] == 0) first = p;
            if (first == kNone) continue;
            if (mc.top == TopKind::SNodes1) {
                u32 tv = t_of_position(m, mc, first);
                if (tv && s1_index[tv] != kNone) s.micro_s1_first_.set(u, s1_index[tv] + 1);
            } else if (mc.top == TopKind::SNodes2) {
                u32 loc = mc.node[first].shadow;
                auto it = std::lower_bound(mt.snodes2.begin(), mt.snodes2.end(), loc);
                require(it != mt.snodes2.end() && *it == loc, "micro_s2_first lookup failed");
                s.micro_s2_first_.set(u, u32(it - mt.snodes2.begin()) + 1);
            }
        }
    }

    void macro_lca() {
        u32 M = d.mini_count();
        const auto& s1 = d.snodes1();
        // M1: real mini roots and tier-1 s-nodes, as T nodes, deduplicated
        std::vector<u64> m1nodes;
        for (u32 m = 0; m < M; ++m) {
            const MiniTree& mt = d.mini(m + 1);
            if (!mt.root_is_dummy && mt.node[0].shadow != 0)
                m1nodes.push_back(mt.node[0].shadow - 1);
        }
        for (u32 v : s1) m1nodes.push_back(u64(v) - 1);
        std::sort(m1nodes.begin(), m1nodes.end());
        m1nodes.erase(std::unique(m1nodes.begin(), m1nodes.end()), m1nodes.end());
        s.m1_marks_.build(m1nodes, n);
        u32 K = u32(m1nodes.size());
        s.m1_parent_.reset(K, bit_width_for(K + 1));
        s.m1_depth_.reset(K, s.wD_);
        // nearest strict M1 ancestor per M1 node, via one DFS
        {
            std::vector<u32> is_m1(n + 1, kNone);
            for (u32 i = 0; i < K; ++i) is_m1[u32(m1nodes[i]) + 1] = i;
            std::vector<std::pair<u32, u32>> st = {{1, 0}};
            std::vector<u32> m1stack;  // M1 indices on the current path
            while (!st.empty()) {
                auto& [v, ci] = st.back();
                if (ci == 0 && is_m1[v] != kNone) {
                    u32 i = is_m1[v];
                    s.m1_parent_.set(i, m1stack.empty() ? 0 : m1stack.back() + 1);
                    s.m1_depth_.set(i, depthT[v]);
                    m1stack.push_back(i);
                }
                if (ci < topo.degree(v)) {
                    st.push_back({topo.child(v, ++ci), 0});
                } else {
                    if (is_m1[v] != kNone) m1stack.pop_back();
                    st.pop_back();
                }
            }
        }

        // M2 per mini: the root entity, tops of dummy-rooted micros, and real
        // micro roots. Pass 1 creates canonical entries (root entity, then the
        // depth-1 children of each dummy-rooted micro, consecutively so that a
        // child rank indexes them); pass 2 maps real-rooted micros onto
        // existing entries or fresh ones.
        std::vector<u64> m2start(M + 1, 0);
        std::vector<u64> m2pos, m2par, m2dep;
        std::vector<u32> m2first_per_micro(U, 0);
        for (u32 m = 0; m < M; ++m) {
            const MiniTree& mt = d.mini(m + 1);
            m2start[m] = m2pos.size();
            std::vector<u32> ent_local;           // mini-local id per entry
            std::vector<u64> ent_pos;
            std::vector<u32> m2_of(mt.size(), kNone);
            auto add_entry = [&](u32 loc, u64 pos) {
                m2_of[loc] = u32(ent_local.size());
                ent_local.push_back(loc);
                ent_pos.push_back(pos);
                return m2_of[loc];
            };
            add_entry(0, pack_pos(mt.micro_of[0], mt.pos_in_micro[0]));
            for (u32 ui = 0; ui < mt.micros.size(); ++ui) {
                const MicroTree& mc = mt.micros[ui];
                u32 u = mini_micro_base(m) + ui;
                if (!mc.root_is_dummy) continue;
                m2first_per_micro[u] = u32(ent_local.size());
                for (u32 p = 1; p < mc.size; ++p)
                    if (mc.parent[p] == 0) add_entry(mc.node[p].shadow, pack_pos(ui, p));
            }
            for (u32 ui = 0; ui < mt.micros.size(); ++ui) {
                const MicroTree& mc = mt.micros[ui];
                u32 u = mini_micro_base(m) + ui;
                if (mc.root_is_dummy) continue;
                u32 loc = mc.node[0].shadow;
                m2first_per_micro[u] =
                    m2_of[loc] != kNone ? m2_of[loc] : add_entry(loc, pack_pos(ui, 0));
            }
            // nearest M2 ancestor-or-self per mini-local node, memoized
            std::vector<u32> near(mt.size(), kNone - 1);
            std::vector<u32> chain;
            for (u32 x = 0; x < mt.size(); ++x) {
                u32 y = x;
                chain.clear();
                u32 val = kNone;
                while (true) {
                    if (near[y] != kNone - 1) {
                        val = near[y];
                        break;
                    }
                    if (m2_of[y] != kNone) {
                        val = m2_of[y];
                        break;
                    }
                    chain.push_back(y);
                    if (mt.parent[y] == kNone) break;
                    y = mt.parent[y];
                }
                if (near[y] == kNone - 1 && m2_of[y] != kNone) near[y] = val;
                for (u32 c : chain) near[c] = val;
            }
            for (u32 i = 0; i < ent_local.size(); ++i) {
                u32 x = ent_local[i];
                u32 par = mt.parent[x] == kNone ? kNone : near[mt.parent[x]];
                m2pos.push_back(ent_pos[i]);
                m2par.push_back(par == kNone ? 0 : par + 1);
                m2dep.push_back(mt.depth[x]);
            }
        }
        m2start[M] = m2pos.size();
        s.mini_m2_start_.reset(M + 1, bit_width_for(m2pos.size() + 1));
        for (u32 m = 0; m <= M; ++m) s.mini_m2_start_.set(m, m2start[m]);
        s.m2_pos_.reset(m2pos.size(), s.wT2_ + s.wPos_);
        s.m2_parent_.reset(m2par.size(), bit_width_for(max_m2_per_mini(m2start) + 1));
        s.m2_depth_.reset(m2dep.size(), s.wMD_);
        for (u64 i = 0; i < m2pos.size(); ++i) {
            s.m2_pos_.set(i, m2pos[i]);
            s.m2_parent_.set(i, m2par[i]);
            s.m2_depth_.set(i, m2dep[i]);
        }
        s.micro_m2_first_.reset(U, bit_width_for(max_m2_per_mini(m2start) + 1));
        for (u32 u = 0; u < U; ++u) s.micro_m2_first_.set(u, m2first_per_micro[u]);
        s.mini_m2_euler_start_.reset(0, 1);  // rebuilt in finish_load
    }

    u32 max_m2_per_mini(const std::vector<u64>& m2start) const {
        u32 mx = 1;
        for (u32 m = 0; m < d.mini_count(); ++m)
            mx = std::max(mx, u32(m2start[m + 1] - m2start[m]));
        return mx;
    }

    void heights_leaves_levels() {
        // bottom-copy heights grouped per micro
        std::vector<u64> bh;
        std::vector<u64> bstart(U + 1, 0);
        for (u32 u = 0; u < U; ++u) {
            bstart[u] = bh.size();
            u32 m = micro_mini[u];
            const MiniTree& mt = d.mini(m + 1);
            const MicroTree& mc = mt.micros[u - mini_micro_base(m)];
            if (mc.bottom == BottomKind::None) continue;
            const MicroTable* tab = tabs[u];
            for (u32 p = 0; p < mc.size; ++p) {
                if (tab->depthv[p] != tab->height) continue;
                u32 tv = t_of_position(m, mc, p);
                bh.push_back(tv ? heightT[tv] : 0);
            }
        }
        bstart[U] = bh.size();
        s.micro_bottom_start_.reset(U + 1, bit_width_for(bh.size() + 1));
        for (u32 u = 0; u <= U; ++u) s.micro_bottom_start_.set(u, bstart[u]);
        s.bottom_heights_.reset(bh.size(), s.wH_);
        for (u64 i = 0; i < bh.size(); ++i) s.bottom_heights_.set(i, bh[i]);
    }
    void counts() {
        s.counts_.minis = d.mini_count();
        s.counts_.micros = U;
        s.counts_.types = u32(s.types_.size());
        s.counts_.s1 = u32(d.snodes1().size());
        u32 s2total = 0;
        for (u32 m = 0; m < d.mini_count(); ++m)
            s2total += u32(d.mini(m + 1).snodes2.size());
        s.counts_.s2 = s2total;
    }
};

SlabTree::SlabTree(const TreeTopology& t, const SlabParams& p) {
    p.validate();
    SlabTreeBuilder b(*this, t, p);
    b.build();
}

SlabTree::SlabTree(const TreeTopology& t)
    : SlabTree(t, SlabParams::defaults(t.size())) {}

} // namespace slabtree
