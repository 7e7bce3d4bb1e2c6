#include "slabtree/rmq.hpp"

#include <algorithm>

namespace slabtree {

void RangeArg::build(const std::vector<u32>& vals, bool maximum) {
    max_ = maximum;
    vals_ = vals;
    u32 n = u32(vals_.size());
    nblocks_ = (n + kBlock - 1) / kBlock;
    blk_first_.assign(nblocks_, 0);
    blk_last_.assign(nblocks_, 0);
    for (u32 b = 0; b < nblocks_; ++b) {
        u32 end = std::min(n, (b + 1) * kBlock);
        u32 f = b * kBlock;
        for (u32 i = b * kBlock + 1; i < end; ++i)
            if (better(vals_[i], vals_[f])) f = i;
        u32 l = f;
        for (u32 i = f + 1; i < end; ++i)
            if (vals_[i] == vals_[f]) l = i;
        blk_first_[b] = f;
        blk_last_[b] = l;
    }
    levels_ = nblocks_ ? u32(std::bit_width(nblocks_)) : 0;
    sp_first_.assign(size_t(nblocks_) * levels_, 0);
    sp_last_.assign(size_t(nblocks_) * levels_, 0);
    for (u32 b = 0; b < nblocks_; ++b) {
        sp_first_[size_t(b) * levels_] = blk_first_[b];
        sp_last_[size_t(b) * levels_] = blk_last_[b];
    }
    for (u32 j = 1; j < levels_; ++j)
        for (u32 b = 0; b + (u32(1) << j) <= nblocks_; ++b) {
            u32 af = sp_first_[size_t(b) * levels_ + j - 1];
            u32 bf = sp_first_[size_t(b + (u32(1) << (j - 1))) * levels_ + j - 1];
            sp_first_[size_t(b) * levels_ + j] =
                better(vals_[bf], vals_[af]) ? bf : af;
            u32 al = sp_last_[size_t(b) * levels_ + j - 1];
            u32 bl = sp_last_[size_t(b + (u32(1) << (j - 1))) * levels_ + j - 1];
            sp_last_[size_t(b) * levels_ + j] =
                better(vals_[al], vals_[bl]) ? al : bl; // keep right on ties
        }
}

RangeArg::Res RangeArg::query(u32 l, u32 r) const {
    Res res;
    res.val = vals_[l];
    res.first = res.last = l;
    auto feed = [&](u32 i) {
        if (better(vals_[i], res.val)) {
            res.val = vals_[i];
            res.first = res.last = i;
        } else if (vals_[i] == res.val) {
            res.first = std::min(res.first, i);
            res.last = std::max(res.last, i);
        }
    };
    u32 bl = l / kBlock, br = r / kBlock;
    if (bl == br) {
        for (u32 i = l + 1; i <= r; ++i) feed(i);
        return res;
    }
    for (u32 i = l + 1; i < (bl + 1) * kBlock; ++i) feed(i);
    for (u32 i = br * kBlock; i <= r; ++i) feed(i);
    if (bl + 1 <= br - 1) {
        u32 lo = bl + 1, hi = br - 1;
        u32 j = u32(std::bit_width(hi - lo + 1)) - 1;
        feed(sp_first_[size_t(lo) * levels_ + j]);
        feed(sp_first_[size_t(hi - (u32(1) << j) + 1) * levels_ + j]);
        feed(sp_last_[size_t(lo) * levels_ + j]);
        feed(sp_last_[size_t(hi - (u32(1) << j) + 1) * levels_ + j]);
    }
    return res;
}

void LadderLA::build(const std::vector<u32>& parents) {
    u32 n = u32(parents.size());
    depth_.assign(n, 0);
    std::vector<u32> height(n, 0);
    std::vector<u32> order(n);  // nodes in an order where parents precede
    {
        // parents may come in arbitrary id order; compute depths by chasing
        std::vector<u32> state(n, 0);
        u32 k = 0;
        for (u32 v = 0; v < n; ++v) {
            u32 x = v;
            std::vector<u32> chain;
            while (x != kNone && state[x] == 0) {
                state[x] = 1;
                chain.push_back(x);
                x = parents[x];
            }
            for (u32 i = u32(chain.size()); i-- > 0;) {
                u32 c = chain[i];
                depth_[c] = parents[c] == kNone ? 0 : depth_[parents[c]] + 1;
                order[k++] = c;
            }
        }
    }
    for (u32 i = n; i-- > 0;) {
        u32 v = order[i];
        if (parents[v] != kNone)
            height[parents[v]] = std::max(height[parents[v]], height[v] + 1);
    }

    // longest-path decomposition
    std::vector<u32> best_child(n, kNone);
    for (u32 i = 0; i < n; ++i) {
        u32 v = order[i];
        u32 p = parents[v];
        if (p == kNone) continue;
        if (best_child[p] == kNone || height[v] > height[best_child[p]]) best_child[p] = v;
    }
    ladder_of_.assign(n, 0);
    ladder_idx_.assign(n, 0);
    std::vector<bool> on_path(n, false);
    for (u32 i = 0; i < n; ++i) {
        u32 v = order[i];
        if (parents[v] != kNone && best_child[parents[v]] == v) on_path[v] = true;
    }
    for (u32 i = 0; i < n; ++i) {
        u32 top = order[i];
        if (on_path[top]) continue; // not a path head
        std::vector<u32> path;
        u32 x = top;
        while (x != kNone) {
            path.push_back(x);
            x = best_child[x];
        }
        // double upward
        std::vector<u32> ups;
        u32 y = parents[top];
        for (u32 k = 0; k < path.size() && y != kNone; ++k) {
            ups.push_back(y);
            y = parents[y];
        }
        u32 li = u32(ladder_start_.size());
        ladder_start_.push_back(u32(ladders_.size()));
        for (u32 k = u32(ups.size()); k-- > 0;) ladders_.push_back(ups[k]);
        u32 off = u32(ups.size());
        for (u32 k = 0; k < path.size(); ++k) {
            ladders_.push_back(path[k]);
            ladder_of_[path[k]] = li;
            ladder_idx_[path[k]] = off + u32(k);
        }
    }
    ladder_start_.push_back(u32(ladders_.size()));

    u32 maxd = 0;
    for (u32 v = 0; v < n; ++v) maxd = std::max(maxd, depth_[v]);
    jlevels_ = u32(std::bit_width(std::max<u32>(maxd, 1)));
    jump_.assign(size_t(n) * jlevels_, kNone);
    for (u32 v = 0; v < n; ++v) jump_[size_t(v) * jlevels_] = parents[v];
    for (u32 j = 1; j < jlevels_; ++j)
        for (u32 v = 0; v < n; ++v) {
            u32 half = jump_[size_t(v) * jlevels_ + j - 1];
            jump_[size_t(v) * jlevels_ + j] =
                half == kNone ? kNone : jump_[size_t(half) * jlevels_ + j - 1];
        }
}

u32 LadderLA::anc(u32 v, u32 k) const {
    if (k == 0) return v;
    require(k <= depth_[v], "LadderLA::anc: above root");
    u32 j = u32(std::bit_width(k)) - 1;
    u32 z = jump_[size_t(v) * jlevels_ + j];
    u32 rem = k - (u32(1) << j);
    if (rem == 0) return z;
    u32 li = ladder_of_[z];
    return ladders_[ladder_start_[li] + ladder_idx_[z] - rem];
}

} // namespace slabtree
