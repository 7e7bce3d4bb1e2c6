#include "slabtree/bits.hpp"

namespace slabtree {

void BitVec::build() {
    u64 nwords = words_.size();
    if (nbits_ & 63) words_.back() &= (u64(1) << (nbits_ & 63)) - 1;
    nblocks_ = (nbits_ + 511) / 512;
    super_.assign(nblocks_ / 8 + 2, 0);
    sub_.assign(nblocks_ + 2, 0);
    u64 cum = 0;
    for (u64 b = 0; b <= nblocks_; ++b) {
        if ((b & 7) == 0) super_[b >> 3] = cum;
        sub_[b] = u16(cum - super_[b >> 3]);
        for (u64 w = b << 3; w < std::min((b + 1) << 3, nwords); ++w)
            cum += u64(popcount64(words_[w]));
    }
    ones_ = cum;

    sel1_.assign(ones_ ? ((ones_ - 1) >> kSelSampleLog) + 1 : 0, 0);
    u64 zeros = nbits_ - ones_;
    sel0_.assign(zeros ? ((zeros - 1) >> kSelSampleLog) + 1 : 0, 0);
    const u64 step = u64(1) << kSelSampleLog;
    for (u64 b = 0; b < nblocks_; ++b) {
        u64 p1 = ones_before_block(b);
        u64 p2 = (b + 1 < nblocks_) ? ones_before_block(b + 1) : ones_;
        for (u64 next = (p1 + step - 1) / step * step; next < p2; next += step)
            sel1_[next >> kSelSampleLog] = u32(b);
        u64 z1 = zeros_before_block(b);
        u64 z2 = (b + 1 < nblocks_) ? zeros_before_block(b + 1) : zeros;
        for (u64 next = (z1 + step - 1) / step * step; next < z2; next += step)
            sel0_[next >> kSelSampleLog] = u32(b);
    }
}

void BitVec::save(Writer& w) const {
    w.put_u64(nbits_);
    w.put_words(words_);
}

void BitVec::load(Reader& r) {
    nbits_ = r.get_u64();
    words_ = r.get_words();
    require(words_.size() == (nbits_ + 63) / 64, "BitVec::load: corrupt payload");
    build();
}

void SparseBitVec::build(const std::vector<u64>& positions, u64 universe) {
    universe_ = universe;
    m_ = positions.size();
    u64 avg = m_ ? universe / m_ : 1;
    low_width_ = floor_log2(avg);
    low_.reset(m_, low_width_);
    u64 high_len = m_ + (universe >> low_width_) + 1;
    high_.resize(high_len);
    u64 prev = 0;
    bool first = true;
    for (u64 i = 0; i < m_; ++i) {
        u64 p = positions[i];
        require(p < universe, "SparseBitVec: position outside universe");
        require(first || p > prev, "SparseBitVec: positions must be strictly increasing");
        first = false;
        prev = p;
        low_.set(i, p & ((u64(1) << low_width_) - 1));
        high_.set((p >> low_width_) + i);
    }
    high_.build();
    high_zeros_ = high_.size() - high_.ones();
}

void VarCellArray::append(const std::vector<u64>& bits, u64 nbits) {
    u64 word = bits_used_ >> 6, off = bits_used_ & 63;
    u64 need = (bits_used_ + nbits + 63) / 64;
    if (words_.size() < need) words_.resize(need, 0);
    u64 full = nbits >> 6, rem = nbits & 63;
    for (u64 i = 0; i < full; ++i) {
        u64 v = bits[i];
        words_[word + i] |= v << off;
        if (off) words_[word + i + 1] |= v >> (64 - off);
    }
    if (rem) {
        u64 v = bits[full] & ((u64(1) << rem) - 1);
        u64 w2 = word + full;
        words_[w2] |= v << off;
        if (off + rem > 64) words_[w2 + 1] |= v >> (64 - off);
    }
    bits_used_ += nbits;
    ends_.push_back(bits_used_);
    ++count_;
}

void VarCellArray::build() {
    // Record ends are strictly increasing only if every record is non-empty;
    // guard by offsetting each end with its index.
    std::vector<u64> pos(ends_.size());
    for (u64 i = 0; i < ends_.size(); ++i) pos[i] = ends_[i] + i;
    bounds_.build(pos, bits_used_ + count_ + 1);
    ends_.clear();
    ends_.shrink_to_fit();
}

u64 VarCellArray::get(u64 i, std::vector<u64>& out) const {
    u64 s = start(i), e = start(i + 1);
    u64 len = e - s;
    out.assign((len + 63) / 64, 0);
    for (u64 b = 0, k = 0; b < len; b += 64, ++k) {
        int w = int(std::min<u64>(64, len - b));
        out[k] = read_raw(s + b, w);
    }
    return len;
}

} // namespace slabtree
