#include "slabtree/micro_table.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace slabtree {

MicroTable::MicroTable(const std::string& bp) {
    sz = u32(bp.size() / 2);
    require(sz >= 1 && sz <= 60000, "MicroTable: shape out of supported range");
    parent.assign(sz, kU16None);
    depthv.assign(sz, 0);
    {
        std::vector<u16> stack;
        u32 next = 0;
        for (char ch : bp) {
            if (ch == '(') {
                u16 id = u16(next++);
                if (!stack.empty()) {
                    parent[id] = stack.back();
                    depthv[id] = u16(depthv[stack.back()] + 1);
                }
                stack.push_back(id);
            } else {
                stack.pop_back();
            }
        }
        require(next == sz && stack.empty(), "MicroTable: unbalanced shape");
    }
    for (u32 p = 0; p < sz; ++p) height = std::max<u32>(height, depthv[p]);

    child_start.assign(sz + 1, 0);
    for (u32 p = 1; p < sz; ++p) ++child_start[parent[p] + 1];
    for (u32 p = 0; p < sz; ++p) child_start[p + 1] = u16(child_start[p + 1] + child_start[p]);
    child_list.assign(sz ? sz - 1 : 0, 0);
    child_rank.assign(sz, 0);
    {
        std::vector<u16> at(child_start.begin(), child_start.end() - 1);
        for (u32 p = 1; p < sz; ++p) {
            child_rank[p] = u16(at[parent[p]] - child_start[parent[p]] + 1);
            child_list[at[parent[p]]++] = u16(p);
        }
    }

    last_desc.assign(sz, 0);
    local_height.assign(sz, 0);
    for (u32 p = sz; p-- > 0;) {
        u32 last = p;
        u32 h = 0;
        for (u32 c = child_start[p]; c < child_start[p + 1]; ++c) {
            last = std::max<u32>(last, last_desc[child_list[c]]);
            h = std::max<u32>(h, u32(local_height[child_list[c]]) + 1);
        }
        last_desc[p] = u16(last);
        local_height[p] = u16(h);
    }

    // level order
    pre2lo.assign(sz, 0);
    lo2pre.assign(sz, 0);
    {
        std::deque<u16> q = {0};
        u32 r = 0;
        while (!q.empty()) {
            u16 p = q.front();
            q.pop_front();
            pre2lo[p] = u16(r);
            lo2pre[r++] = p;
            for (u32 c = child_start[p]; c < child_start[p + 1]; ++c)
                q.push_back(child_list[c]);
        }
    }
    // postorder
    pre2post.assign(sz, 0);
    post2pre.assign(sz, 0);
    {
        u32 r = 0;
        std::vector<std::pair<u16, u16>> st = {{0, 0}};
        while (!st.empty()) {
            auto& [p, ci] = st.back();
            if (ci < degree(p)) {
                u16 c = child_list[child_start[p] + ci++];
                st.push_back({c, 0});
            } else {
                pre2post[p] = u16(r);
                post2pre[r++] = p;
                st.pop_back();
            }
        }
    }

    pref_leaf.assign(sz + 1, 0);
    for (u32 p = 0; p < sz; ++p) {
        pref_leaf[p + 1] = u16(pref_leaf[p] + (degree(p) == 0 ? 1 : 0));
        if (degree(p) == 0) leaf_sel.push_back(u16(p));
    }

    prev_int_lo.assign(sz, kU16None);
    {
        u16 last = kU16None;
        for (u32 r = 0; r < sz; ++r) {
            prev_int_lo[r] = last;
            if (degree(lo2pre[r]) > 0) last = u16(r);
        }
    }

    bottom_before.assign(sz + 1, 0);
    for (u32 p = 0; p < sz; ++p)
        bottom_before[p + 1] = u16(bottom_before[p] + (depthv[p] == height ? 1 : 0));

    // ladders: longest-path (by local height) decomposition, doubled upward
    ladder_of.assign(sz, 0);
    ladder_idx.assign(sz, 0);
    {
        std::vector<std::vector<u16>> paths;
        std::vector<u16> path_of(sz, kU16None);
        for (u32 p = 0; p < sz; ++p) {
            if (path_of[p] != kU16None) continue;
            // p starts a new path (its parent chose another child or p is root)
            std::vector<u16> path;
            u32 x = p;
            while (true) {
                path.push_back(u16(x));
                path_of[x] = u16(paths.size());
                // descend to the highest child
                u32 best = kNone;
                for (u32 c = child_start[x]; c < child_start[x + 1]; ++c) {
                    u32 ch = child_list[c];
                    if (best == kNone || local_height[ch] > local_height[best]) best = ch;
                }
                if (best == kNone) break;
                x = best;
            }
            paths.push_back(std::move(path));
        }
        // wait: the loop above starts paths at every unvisited node in preorder;
        // a node whose parent's longest path went elsewhere starts its own. The
        // root starts the first path.
        for (auto& path : paths) {
            u16 top = path[0];
            u32 extend = u32(path.size());
            std::vector<u16> lad;
            // climb up to double the path length
            u32 x = top;
            std::vector<u16> ups;
            for (u32 k = 0; k < extend && parent[x] != kU16None; ++k) {
                x = parent[x];
                ups.push_back(u16(x));
            }
            lad.reserve(ups.size() + path.size());
            for (u32 k = u32(ups.size()); k-- > 0;) lad.push_back(ups[k]);
            u32 off = u32(lad.size());
            for (u16 v : path) lad.push_back(v);
            u32 li = u32(ladder_start.size());
            ladder_start.push_back(u16(ladders.size()));
            for (u32 k = 0; k < path.size(); ++k) {
                ladder_of[path[k]] = u16(li);
                ladder_idx[path[k]] = u16(off + k);
            }
            for (u16 v : lad) ladders.push_back(v);
        }
        ladder_start.push_back(u16(ladders.size()));
    }

    jlevels = u32(std::bit_width(std::max<u32>(height, 1)));
    jump.assign(size_t(sz) * jlevels, kU16None);
    for (u32 p = 0; p < sz; ++p) jump[size_t(p) * jlevels] = parent[p];
    for (u32 j = 1; j < jlevels; ++j)
        for (u32 p = 0; p < sz; ++p) {
            u16 half = jump[size_t(p) * jlevels + j - 1];
            jump[size_t(p) * jlevels + j] =
                half == kU16None ? kU16None : jump[size_t(half) * jlevels + j - 1];
        }

    // euler tour for LCA
    euler.reserve(2 * sz - 1);
    euler_first.assign(sz, 0);
    {
        std::vector<std::pair<u16, u16>> st = {{0, 0}};
        euler_first[0] = 0;
        euler.push_back(0);
        while (!st.empty()) {
            auto& [p, ci] = st.back();
            if (ci < degree(p)) {
                u16 c = child_list[child_start[p] + ci++];
                euler_first[c] = u16(euler.size());
                euler.push_back(c);
                st.push_back({c, 0});
            } else {
                st.pop_back();
                if (!st.empty()) euler.push_back(st.back().first);
            }
        }
    }
    u32 m = u32(euler.size());
    u32 nblocks = (m + 7) / 8;
    rmq_block.assign(nblocks, 0);
    for (u32 b = 0; b < nblocks; ++b) {
        u32 best = b * 8;
        for (u32 i = b * 8; i < std::min(m, b * 8 + 8); ++i)
            if (depthv[euler[i]] < depthv[euler[best]]) best = i;
        rmq_block[b] = u16(best);
    }
    rmq_levels = u32(std::bit_width(std::max<u32>(nblocks, 1)));
    rmq_sparse.assign(size_t(nblocks) * rmq_levels, 0);
    for (u32 b = 0; b < nblocks; ++b) rmq_sparse[size_t(b) * rmq_levels] = rmq_block[b];
    for (u32 j = 1; j < rmq_levels; ++j)
        for (u32 b = 0; b + (u32(1) << j) <= nblocks; ++b) {
            u16 a = rmq_sparse[size_t(b) * rmq_levels + j - 1];
            u16 c = rmq_sparse[size_t(b + (u32(1) << (j - 1))) * rmq_levels + j - 1];
            rmq_sparse[size_t(b) * rmq_levels + j] =
                depthv[euler[a]] <= depthv[euler[c]] ? a : c;
        }
}

u32 MicroTable::anc(u32 p, u32 k) const {
    if (k == 0) return p;
    u32 j = u32(std::bit_width(k)) - 1;
    u32 z = jump[size_t(p) * jlevels + j];
    u32 rem = k - (u32(1) << j);
    if (rem == 0) return z;
    // the ladder of z covers at least 2^j > rem levels above z
    u32 li = ladder_of[z];
    return ladders[u32(ladder_start[li]) + ladder_idx[z] - rem];
}

u32 MicroTable::euler_argmin(u32 l, u32 r) const {
    u32 bl = l / 8, br = r / 8;
    u32 best = l;
    if (bl == br) {
        for (u32 i = l; i <= r; ++i)
            if (depthv[euler[i]] < depthv[euler[best]]) best = i;
        return best;
    }
    for (u32 i = l; i < (bl + 1) * 8; ++i)
        if (depthv[euler[i]] < depthv[euler[best]]) best = i;
    for (u32 i = br * 8; i <= r; ++i)
        if (depthv[euler[i]] < depthv[euler[best]]) best = i;
    if (bl + 1 <= br - 1) {
        u32 lo = bl + 1, hi = br - 1;
        u32 j = u32(std::bit_width(hi - lo + 1)) - 1;
        u16 a = rmq_sparse[size_t(lo) * rmq_levels + j];
        u16 b = rmq_sparse[size_t(hi - (u32(1) << j) + 1) * rmq_levels + j];
        u32 cand = depthv[euler[a]] <= depthv[euler[b]] ? a : b;
        if (depthv[euler[cand]] < depthv[euler[best]]) best = cand;
    }
    return best;
}

u32 MicroTable::lca(u32 p, u32 q) const {
    u32 l = euler_first[p], r = euler_first[q];
    if (l > r) std::swap(l, r);
    return euler[euler_argmin(l, r)];
}

u64 MicroTable::bytes() const {
    u64 b = sizeof(*this);
    auto add = [&](const std::vector<u16>& v) { b += v.capacity() * 2; };
    add(parent); add(depthv); add(child_start); add(child_list); add(child_rank);
    add(last_desc); add(local_height); add(pre2lo); add(lo2pre); add(pre2post);
    add(post2pre); add(pref_leaf); add(leaf_sel); add(prev_int_lo); add(bottom_before);
    add(ladder_of); add(ladder_idx); add(ladder_start); add(ladders); add(jump);
    add(euler); add(euler_first); add(rmq_block); add(rmq_sparse);
    return b;
}

struct MicroTableDict::Impl {
    mutable std::shared_mutex mu;
    std::unordered_map<std::string, std::unique_ptr<MicroTable>> map;
    u64 used = 0;
};

MicroTableDict::MicroTableDict() : impl_(new Impl) {
    cap_ = u64(1) << 30;
    if (const char* env = std::getenv("SLABTREE_TABLE_CACHE")) {
        char* end = nullptr;
        u64 v = std::strtoull(env, &end, 10);
        if (end != env && v >= (u64(1) << 20)) cap_ = v;
    }
}

MicroTableDict& MicroTableDict::instance() {
    static MicroTableDict dict;
    return dict;
}

const MicroTable* MicroTableDict::get(const std::string& bp) {
    {
        std::shared_lock lk(impl_->mu);
        auto it = impl_->map.find(bp);
        if (it != impl_->map.end()) return it->second.get();
    }
    auto fresh = std::make_unique<MicroTable>(bp);
    u64 cost = fresh->bytes() + bp.size();
    {
        std::unique_lock lk(impl_->mu);
        auto it = impl_->map.find(bp);
        if (it != impl_->map.end()) return it->second.get();
        if (impl_->used + cost <= cap_) {
            impl_->used += cost;
            auto [ins, ok] = impl_->map.emplace(bp, std::move(fresh));
            return ins->second.get();
        }
    }
    // over the cap: keep a small thread-local pool of transient tables
    thread_local std::vector<std::pair<std::string, std::unique_ptr<MicroTable>>> pool;
    for (auto& [key, tab] : pool)
        if (key == bp) return tab.get();
    if (pool.size() >= 8) pool.erase(pool.begin());
    pool.emplace_back(bp, std::move(fresh));
    return pool.back().second.get();
}

u64 MicroTableDict::bytes_used() const {
    std::shared_lock lk(impl_->mu);
    return impl_->used;
}

u64 MicroTableDict::entries() const {
    std::shared_lock lk(impl_->mu);
    return impl_->map.size();
}

} // namespace slabtree
