#pragma once

#include <vector>

#include "slabtree/common.hpp"
#include "slabtree/serialize.hpp"

namespace slabtree {

/// Plain bitvector with constant-time rank and select.
///
/// rank(i, a) counts bits equal to a in positions [0..i) (exclusive of i).
/// select(j, a) is 1-based in j and returns a 0-based position.
/// Rank uses a two-level directory (4096-bit superblocks holding a u64
/// cumulative count, 512-bit basic blocks holding a u16 offset), about 4.7%
/// overhead. Select keeps the block index of every 512th occurrence and walks
/// blocks, then words, from there; intended for dense vectors (sparse content
/// belongs in SparseBitVec).
///
/// Immutable after build(); safe for concurrent readers.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(u64 nbits) { resize(nbits); }

    void resize(u64 nbits) {
        nbits_ = nbits;
        words_.assign((nbits + 63) / 64, 0);
    }

    void set(u64 i) { words_[i >> 6] |= u64(1) << (i & 63); }

    void set_value(u64 i, bool v) {
        if (v)
            words_[i >> 6] |= u64(1) << (i & 63);
        else
            words_[i >> 6] &= ~(u64(1) << (i & 63));
    }

    u64 size() const { return nbits_; }

    bool access(u64 i) const {
        require(i < nbits_, "BitVec::access: index out of range");
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    bool operator[](u64 i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

    /// Builds the rank/select directories. Call once after the last set().
    void build();

    u64 ones() const { return ones_; }

    u64 rank1(u64 i) const {
        require(i <= nbits_, "BitVec::rank: index out of range");
        u64 r = super_[i >> 12] + sub_[i >> 9];
        u64 w = (i >> 9) << 3; // first word of the basic block
        for (u64 end = i >> 6; w < end; ++w) r += u64(popcount64(words_[w]));
        if (i & 63) r += u64(popcount64(words_[i >> 6] & ((u64(1) << (i & 63)) - 1)));
        return r;
    }

    u64 rank0(u64 i) const { return i - rank1(i); }

    u64 rank(u64 i, bool a) const { return a ? rank1(i) : rank0(i); }

    /// Position of the j-th (1 <= j <= ones()) set bit.
    u64 select1(u64 j) const {
        require(j >= 1 && j <= ones_, "BitVec::select1: rank out of range");
        u64 b = sel1_[(j - 1) >> kSelSampleLog];
        while (b + 1 < nblocks_ && ones_before_block(b + 1) < j) ++b;
        u64 r = ones_before_block(b);
        u64 w = b << 3;
        while (true) {
            u64 c = u64(popcount64(words_[w]));
            if (r + c >= j) break;
            r += c;
            ++w;
        }
        return (w << 6) + select_in_word(words_[w], unsigned(j - r));
    }

    u64 select0(u64 j) const {
        require(j >= 1 && j <= nbits_ - ones_, "BitVec::select0: rank out of range");
        u64 b = sel0_[(j - 1) >> kSelSampleLog];
        while (b + 1 < nblocks_ && zeros_before_block(b + 1) < j) ++b;
        u64 r = zeros_before_block(b);
        u64 w = b << 3;
        while (true) {
            u64 c = u64(popcount64(~words_[w]));
            if ((w << 6) + 64 > nbits_) c -= (w << 6) + 64 - nbits_;
            if (r + c >= j) break;
            r += c;
            ++w;
        }
        return (w << 6) + select_in_word(~words_[w], unsigned(j - r));
    }

    u64 select(u64 j, bool a) const { return a ? select1(j) : select0(j); }

    /// Raw payload word; used for extracting short windows.
    u64 word(u64 w) const { return words_[w]; }

    u64 size_bits() const {
        return 64 * (words_.size() + super_.size()) + 16 * sub_.size() +
               32 * (sel1_.size() + sel0_.size());
    }

    void save(Writer& w) const;
    void load(Reader& r);

    bool operator==(const BitVec& o) const {
        return nbits_ == o.nbits_ && words_ == o.words_;
    }

private:
    static constexpr unsigned kSelSampleLog = 9; // sample every 512th occurrence

    u64 ones_before_block(u64 b) const { return super_[b >> 3] + sub_[b]; }
    u64 zeros_before_block(u64 b) const { return (b << 9) - ones_before_block(b); }

    u64 nbits_ = 0;
    u64 ones_ = 0;
    u64 nblocks_ = 0;
    std::vector<u64> words_;
    std::vector<u64> super_;  // cumulative ones per 4096-bit superblock
    std::vector<u16> sub_;    // ones from superblock start, per 512-bit block
    std::vector<u32> sel1_;   // basic-block index of every 512th 1
    std::vector<u32> sel0_;
};

/// Fixed-width packed array; width in [0..64] bits per element.
class PackedArray {
public:
    PackedArray() = default;
    PackedArray(u64 count, int width) { reset(count, width); }

    void reset(u64 count, int width) {
        require(width >= 0 && width <= 64, "PackedArray: bad width");
        n_ = count;
        w_ = width;
        words_.assign(w_ == 0 ? 0 : (count * u64(w_) + 63) / 64, 0);
    }

    u64 size() const { return n_; }
    int width() const { return w_; }

    void set(u64 i, u64 v) {
        if (w_ == 0) return;
        u64 bit = i * u64(w_);
        u64 word = bit >> 6, off = bit & 63;
        u64 mask = (w_ == 64) ? ~u64(0) : ((u64(1) << w_) - 1);
        words_[word] = (words_[word] & ~(mask << off)) | ((v & mask) << off);
        if (off + u64(w_) > 64)
            words_[word + 1] =
                (words_[word + 1] & ~(mask >> (64 - off))) | ((v & mask) >> (64 - off));
    }

    u64 get(u64 i) const {
        if (w_ == 0) return 0;
        u64 bit = i * u64(w_);
        u64 word = bit >> 6, off = bit & 63;
        u64 mask = (w_ == 64) ? ~u64(0) : ((u64(1) << w_) - 1);
        u64 v = words_[word] >> off;
        if (off + u64(w_) > 64) v |= words_[word + 1] << (64 - off);
        return v & mask;
    }

    u64 size_bits() const { return 64 * words_.size(); }

    void save(Writer& w) const {
        w.put_u64(n_);
        w.put_u8(u8(w_));
        w.put_words(words_);
    }
    void load(Reader& r) {
        n_ = r.get_u64();
        w_ = r.get_u8();
        words_ = r.get_words();
    }

private:
    u64 n_ = 0;
    int w_ = 0;
    std::vector<u64> words_;
};

/// Sparse bitvector: a strictly increasing sequence of m positions inside a
/// universe U, stored as a high/low split (upper bits unary in a plain
/// bitvector, lower bits packed). Space is about m*(2 + lg(U/m)) bits plus
/// directories. rank/select agree with an equivalent BitVec; select0 is
/// provided for parity but runs in O(log U).
class SparseBitVec {
public:
    SparseBitVec() = default;

    /// positions strictly increasing, each < universe.
    void build(const std::vector<u64>& positions, u64 universe);

    u64 size() const { return universe_; }
    u64 ones() const { return m_; }

    /// Value of the i-th (1-based) one; equals select1.
    u64 select1(u64 j) const {
        require(j >= 1 && j <= m_, "SparseBitVec::select1: rank out of range");
        u64 h = high_.select1(j);
        return ((h - (j - 1)) << low_width_) | low_.get(j - 1);
    }

    /// Number of ones in [0..i).
    u64 rank1(u64 i) const {
        require(i <= universe_, "SparseBitVec::rank: index out of range");
        if (m_ == 0 || i == 0) return 0;
        u64 bucket = i >> low_width_;
        // ones with upper bits < bucket end before the bucket's unary block
        u64 lo, hi; // candidate index range [lo, hi)
        if (bucket == 0) {
            lo = 0;
        } else {
            lo = high_.select0(bucket) - bucket + 1;
        }
        if (bucket >= high_zeros_) {
            hi = m_;
        } else {
            hi = high_.select0(bucket + 1) - bucket;
        }
        u64 lowpart = i & ((u64(1) << low_width_) - 1);
        while (lo < hi && low_.get(lo) < lowpart) ++lo;
        return lo;
    }

    u64 rank0(u64 i) const { return i - rank1(i); }
    u64 rank(u64 i, bool a) const { return a ? rank1(i) : rank0(i); }

    bool access(u64 i) const {
        require(i < universe_, "SparseBitVec::access: index out of range");
        return rank1(i + 1) > rank1(i);
    }

    /// Position of the j-th zero; binary search over rank0 (test-path only).
    u64 select0(u64 j) const {
        require(j >= 1 && j <= universe_ - m_, "SparseBitVec::select0: rank out of range");
        u64 lo = 0, hi = universe_;
        while (lo < hi) {
            u64 mid = lo + (hi - lo) / 2;
            if (rank0(mid + 1) < j)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

    u64 select(u64 j, bool a) const { return a ? select1(j) : select0(j); }

    u64 size_bits() const { return high_.size_bits() + low_.size_bits() + 192; }

    void save(Writer& w) const {
        w.put_u64(universe_);
        w.put_u64(m_);
        w.put_u8(u8(low_width_));
        high_.save(w);
        low_.save(w);
    }
    void load(Reader& r) {
        universe_ = r.get_u64();
        m_ = r.get_u64();
        low_width_ = r.get_u8();
        high_.load(r);
        low_.load(r);
        high_zeros_ = high_.size() - high_.ones();
    }

private:
    u64 universe_ = 0;
    u64 m_ = 0;
    int low_width_ = 0;
    u64 high_zeros_ = 0;
    BitVec high_;
    PackedArray low_;
};

/// Concatenated variable-width bit records with a sparse boundary index.
class VarCellArray {
public:
    /// Appends a record of `nbits` bits taken little-endian from `bits`.
    void append(const std::vector<u64>& bits, u64 nbits);

    /// Call once after the last append.
    void build();

    u64 size() const { return count_; }

    /// Bit length of record i.
    u64 length(u64 i) const {
        require(i < count_, "VarCellArray: index out of range");
        return start(i + 1) - start(i);
    }

    /// Copies record i into `out` (resized to the needed word count).
    u64 get(u64 i, std::vector<u64>& out) const;

    /// Reads up to 64 bits at `bit` offset inside record i.
    u64 read(u64 i, u64 bit, int width) const {
        return read_raw(start(i) + bit, width);
    }

    u64 payload_bits() const { return bits_used_; }
    u64 size_bits() const { return 64 * words_.size() + bounds_.size_bits(); }

    void save(Writer& w) const {
        w.put_u64(count_);
        w.put_u64(bits_used_);
        w.put_words(words_);
        bounds_.save(w);
    }
    void load(Reader& r) {
        count_ = r.get_u64();
        bits_used_ = r.get_u64();
        words_ = r.get_words();
        bounds_.load(r);
    }

private:
    // bounds_ stores end-of-record bit offsets shifted by their index so that
    // empty records keep the sequence strictly increasing.
    u64 start(u64 i) const { return i == 0 ? 0 : bounds_.select1(i) - (i - 1); }

    u64 read_raw(u64 bit, int width) const {
        if (width == 0) return 0;
        u64 word = bit >> 6, off = bit & 63;
        u64 mask = (width == 64) ? ~u64(0) : ((u64(1) << width) - 1);
        u64 v = words_[word] >> off;
        if (off + u64(width) > 64 && word + 1 < words_.size()) v |= words_[word + 1] << (64 - off);
        return v & mask;
    }

    u64 count_ = 0;
    u64 bits_used_ = 0;
    std::vector<u64> words_;
    std::vector<u64> ends_;  // build-time record end offsets
    SparseBitVec bounds_;    // record end positions (bit offsets, 1-based ends)
};

/// Appends bits to a word buffer; used to assemble VarCellArray records.
class BitWriter {
public:
    void push(u64 v, int width) {
        if (width == 0) return;
        u64 word = nbits_ >> 6, off = nbits_ & 63;
        if (word >= words_.size()) words_.push_back(0);
        u64 mask = (width == 64) ? ~u64(0) : ((u64(1) << width) - 1);
        v &= mask;
        words_[word] |= v << off;
        if (off + u64(width) > 64) {
            words_.push_back(v >> (64 - off));
        }
        nbits_ += u64(width);
    }

    /// Elias gamma code for v >= 1.
    void push_gamma(u64 v) {
        int nb = std::bit_width(v);
        push(0, nb - 1);
        // emit high bit then the nb-1 low bits, LSB-first layout
        push(1, 1);
        push(v & ((u64(1) << (nb - 1)) - 1), nb - 1);
    }

    const std::vector<u64>& words() const { return words_; }
    u64 bits() const { return nbits_; }
    void clear() {
        words_.clear();
        nbits_ = 0;
    }

private:
    std::vector<u64> words_;
    u64 nbits_ = 0;
};

class BitReader {
public:
    BitReader(const std::vector<u64>& words, u64 nbits) : words_(words), nbits_(nbits) {}

    u64 read(int width) {
        if (width == 0) return 0;
        u64 word = pos_ >> 6, off = pos_ & 63;
        u64 mask = (width == 64) ? ~u64(0) : ((u64(1) << width) - 1);
        u64 v = words_[word] >> off;
        if (off + u64(width) > 64 && word + 1 < words_.size()) v |= words_[word + 1] << (64 - off);
        pos_ += u64(width);
        return v & mask;
    }

    u64 read_gamma() {
        int zeros = 0;
        while (read(1) == 0) ++zeros;
        u64 low = read(zeros);
        return (u64(1) << zeros) | low;
    }

    u64 position() const { return pos_; }
    u64 bits() const { return nbits_; }

private:
    const std::vector<u64>& words_;
    u64 nbits_;
    u64 pos_ = 0;
};

} // namespace slabtree
