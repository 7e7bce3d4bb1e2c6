#pragma once

#include <cstring>
#include <iostream>
#include <vector>

#include "slabtree/common.hpp"

namespace slabtree {

// Versioned binary container. Little-endian throughout; the file starts with
// the 8-byte magic "SLBT0001" and a kind tag, then one length-prefixed section
// per structure. See docs/FORMAT.md.

inline constexpr char kMagic[8] = {'S', 'L', 'B', 'T', '0', '0', '0', '1'};

enum class StructKind : u32 {
    SlabTree = 1,
    IntervalOracle = 2,
    ProperOracle = 3,
    CircularOracle = 4,
};

class Writer {
public:
    void put_u8(u8 v) { buf_.push_back(v); }
    void put_u32(u32 v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(u8(v >> (8 * i)));
    }
    void put_u64(u64 v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(u8(v >> (8 * i)));
    }
    void put_words(const std::vector<u64>& words) {
        put_u64(words.size());
        for (u64 w : words) put_u64(w);
    }
    void put_bytes(const void* p, size_t n) {
        const u8* b = static_cast<const u8*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }

    /// Appends a nested, length-prefixed section.
    void put_section(const Writer& w) {
        put_u64(w.buf_.size());
        buf_.insert(buf_.end(), w.buf_.begin(), w.buf_.end());
    }

    const std::vector<u8>& bytes() const { return buf_; }
    u64 size() const { return buf_.size(); }

    void write_file(std::ostream& out, StructKind kind) const {
        out.write(kMagic, 8);
        u32 k = u32(kind);
        char kb[4];
        std::memcpy(kb, &k, 4);
        out.write(kb, 4);
        u64 len = buf_.size();
        char lb[8];
        std::memcpy(lb, &len, 8);
        out.write(lb, 8);
        out.write(reinterpret_cast<const char*>(buf_.data()), std::streamsize(buf_.size()));
        require(bool(out), "serialization: write failed");
    }

private:
    std::vector<u8> buf_;
};

class Reader {
public:
    Reader(const u8* data, u64 size) : data_(data), size_(size) {}
    explicit Reader(const std::vector<u8>& v) : data_(v.data()), size_(v.size()) {}

    u8 get_u8() {
        need(1);
        return data_[pos_++];
    }
    u32 get_u32() {
        need(4);
        u32 v = 0;
        for (int i = 0; i < 4; ++i) v |= u32(data_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    u64 get_u64() {
        need(8);
        u64 v = 0;
        for (int i = 0; i < 8; ++i) v |= u64(data_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }
    std::vector<u64> get_words() {
        u64 n = get_u64();
        require(n <= size_ / 8 + 1, "serialization: corrupt word count");
        std::vector<u64> w(n);
        for (u64 i = 0; i < n; ++i) w[i] = get_u64();
        return w;
    }

    Reader get_section() {
        u64 len = get_u64();
        need(len);
        Reader r(data_ + pos_, len);
        pos_ += len;
        return r;
    }

    bool done() const { return pos_ == size_; }
    u64 remaining() const { return size_ - pos_; }

private:
    void need(u64 n) { require(pos_ + n <= size_, "serialization: truncated input"); }

    const u8* data_;
    u64 size_;
    u64 pos_ = 0;
};

/// Reads a container file; returns its kind and payload bytes.
inline StructKind read_container(std::istream& in, std::vector<u8>& payload) {
    char magic[8];
    in.read(magic, 8);
    require(bool(in) && std::memcmp(magic, kMagic, 8) == 0, "not a SLBT0001 file");
    char kb[4];
    in.read(kb, 4);
    u32 k;
    std::memcpy(&k, kb, 4);
    char lb[8];
    in.read(lb, 8);
    u64 len;
    std::memcpy(&len, lb, 8);
    require(bool(in), "truncated container header");
    payload.resize(len);
    in.read(reinterpret_cast<char*>(payload.data()), std::streamsize(len));
    require(bool(in), "truncated container payload");
    return StructKind(k);
}

} // namespace slabtree
