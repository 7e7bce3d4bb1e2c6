#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "slabtree/bits.hpp"

using namespace slabtree;

namespace {

BitVec from_string(const std::string& s) {
    BitVec bv(s.size());
    for (size_t i = 0; i < s.size(); ++i)
        if (s[i] == '1') bv.set(i);
    bv.build();
    return bv;
}

// Linear-scan oracle used everywhere below.
struct ScanOracle {
    std::vector<bool> bits;

    u64 rank(u64 i, bool a) const {
        u64 c = 0;
        for (u64 j = 0; j < i; ++j) c += (bits[j] == a);
        return c;
    }
    i64 select(u64 j, bool a) const {
        u64 c = 0;
        for (u64 p = 0; p < bits.size(); ++p) {
            if (bits[p] == a && ++c == j) return i64(p);
        }
        return -1;
    }
};

} // namespace

TEST_CASE("access on fixed examples") {
    BitVec bv = from_string("101101");
    CHECK(bv.access(0) == 1);
    CHECK(bv.access(1) == 0);
    BitVec zeros(64);
    zeros.build();
    CHECK(zeros.access(63) == 0);
    CHECK_THROWS_AS(bv.access(6), Error);
}

TEST_CASE("rank on fixed examples") {
    BitVec bv = from_string("101101");
    CHECK(bv.rank(6, 1) == 4);
    CHECK(bv.rank(0, 1) == 0);
    // prefix [0..4) of 101101 is 1,0,1,1: one zero (exclusive-rank convention,
    // which also forces rank0(i) + rank1(i) = i).
    CHECK(bv.rank(4, 0) == 1);
    CHECK(bv.rank(4, 0) + bv.rank(4, 1) == 4);
    CHECK_THROWS_AS(bv.rank(7, 1), Error);
}

TEST_CASE("select on fixed examples") {
    BitVec bv = from_string("101101");
    CHECK(bv.select(3, 1) == 3);
    CHECK(bv.select(1, 1) == 0);
    CHECK(bv.select(2, 0) == 4);
    CHECK_THROWS_AS(bv.select(5, 1), Error);
}

TEST_CASE("rank/select round-trips vs scan oracle") {
    SplitMix64 rng(0x5eed);
    const double densities[] = {0.5, 1.0 / 64, 1.0 / 4096};
    for (int iter = 0; iter < 1000; ++iter) {
        u64 n = 1 + rng.next_below(10000);
        double d = densities[iter % 3];
        ScanOracle oracle;
        oracle.bits.resize(n);
        BitVec bv(n);
        for (u64 i = 0; i < n; ++i) {
            bool b = rng.next_unit() < d;
            oracle.bits[i] = b;
            if (b) bv.set(i);
        }
        bv.build();

        u64 ones = bv.ones();
        u64 zeros = n - ones;
        // sampled positions plus boundaries
        for (int k = 0; k < 32; ++k) {
            u64 i = (k < 2) ? (k ? n : 0) : rng.next_below(n + 1);
            CHECK(bv.rank(i, 1) == oracle.rank(i, 1));
            CHECK(bv.rank(i, 0) == oracle.rank(i, 0));
        }
        for (int k = 0; k < 16 && ones > 0; ++k) {
            u64 j = 1 + rng.next_below(ones);
            u64 p = bv.select(j, 1);
            CHECK(i64(p) == oracle.select(j, 1));
            CHECK(bv.access(p) == 1);
            CHECK(bv.rank(p, 1) == j - 1);
        }
        for (int k = 0; k < 16 && zeros > 0; ++k) {
            u64 j = 1 + rng.next_below(zeros);
            u64 p = bv.select(j, 0);
            CHECK(i64(p) == oracle.select(j, 0));
            CHECK(bv.access(p) == 0);
            CHECK(bv.rank(p, 0) == j - 1);
        }
    }
}

TEST_CASE("sparse and plain agree on identical content") {
    SplitMix64 rng(0xabcdef);
    for (int iter = 0; iter < 60; ++iter) {
        u64 n = 1 + rng.next_below(20000);
        double d = (iter % 2) ? 1.0 / 100 : 0.3;
        std::vector<u64> pos;
        BitVec bv(n);
        for (u64 i = 0; i < n; ++i) {
            if (rng.next_unit() < d) {
                bv.set(i);
                pos.push_back(i);
            }
        }
        bv.build();
        SparseBitVec sv;
        sv.build(pos, n);

        CHECK(sv.ones() == bv.ones());
        for (int k = 0; k < 64; ++k) {
            u64 i = rng.next_below(n);
            CHECK(sv.access(i) == bv.access(i));
            CHECK(sv.rank1(i) == bv.rank1(i));
            CHECK(sv.rank0(i) == bv.rank0(i));
        }
        CHECK(sv.rank1(n) == bv.rank1(n));
        for (u64 j = 1; j <= sv.ones(); j += 1 + sv.ones() / 50)
            CHECK(sv.select1(j) == bv.select1(j));
        u64 zeros = n - sv.ones();
        for (u64 j = 1; j <= zeros; j += 1 + zeros / 20)
            CHECK(sv.select0(j) == bv.select0(j));
    }
}

TEST_CASE("sparse bitvector size bound") {
    SplitMix64 rng(7);
    for (u64 universe : {u64(1000), u64(100000), u64(1000000)}) {
        for (u64 m : {u64(10), u64(1000), universe / 20}) {
            std::vector<u64> pos;
            std::vector<bool> used(universe, false);
            while (pos.size() < m) {
                u64 p = rng.next_below(universe);
                if (!used[p]) used[p] = true, pos.push_back(p);
            }
            std::sort(pos.begin(), pos.end());
            SparseBitVec sv;
            sv.build(pos, universe);
            u64 ceil_log = u64((universe + m - 1) / m == 1 ? 0 : std::bit_width((universe + m - 1) / m - 1));
            CHECK(double(sv.size_bits()) <= double(m) * (2.0 + double(ceil_log) + 0.25) + 1024.0);
        }
    }
}

TEST_CASE("packed array round-trips") {
    SplitMix64 rng(99);
    for (int width : {1, 3, 7, 16, 33, 63, 64}) {
        u64 n = 500;
        PackedArray pa(n, width);
        std::vector<u64> vals(n);
        u64 mask = (width == 64) ? ~u64(0) : ((u64(1) << width) - 1);
        for (u64 i = 0; i < n; ++i) {
            vals[i] = rng.next() & mask;
            pa.set(i, vals[i]);
        }
        for (u64 i = 0; i < n; ++i) CHECK(pa.get(i) == vals[i]);
    }
}

TEST_CASE("var-cell array stores what was appended") {
    SplitMix64 rng(1234);
    VarCellArray vc;
    std::vector<std::pair<std::vector<u64>, u64>> expect;
    for (int i = 0; i < 300; ++i) {
        u64 nbits = rng.next_below(300); // empty records allowed
        std::vector<u64> payload((nbits + 63) / 64);
        for (auto& w : payload) w = rng.next();
        if (nbits & 63) payload.back() &= (u64(1) << (nbits & 63)) - 1;
        if (nbits == 0) payload.clear();
        vc.append(payload, nbits);
        expect.emplace_back(payload, nbits);
    }
    vc.build();
    REQUIRE(vc.size() == expect.size());
    std::vector<u64> out;
    for (size_t i = 0; i < expect.size(); ++i) {
        CHECK(vc.length(i) == expect[i].second);
        u64 len = vc.get(i, out);
        CHECK(len == expect[i].second);
        CHECK(out == expect[i].first);
    }
}

TEST_CASE("bit writer gamma round-trip") {
    BitWriter bw;
    std::vector<u64> vals;
    SplitMix64 rng(5);
    for (int i = 0; i < 200; ++i) {
        u64 v = 1 + rng.next_below(1 << 20);
        vals.push_back(v);
        bw.push_gamma(v);
    }
    BitReader br(bw.words(), bw.bits());
    for (u64 v : vals) CHECK(br.read_gamma() == v);
}

TEST_CASE("bitvec serialization round-trip") {
    SplitMix64 rng(42);
    BitVec bv(5000);
    for (u64 i = 0; i < 5000; ++i)
        if (rng.next() & 1) bv.set(i);
    bv.build();
    Writer w;
    bv.save(w);
    Reader r(w.bytes());
    BitVec bv2;
    bv2.load(r);
    CHECK(bv2 == bv);
    CHECK(bv2.rank1(5000) == bv.rank1(5000));
    for (u64 j = 1; j <= bv.ones(); j += 97) CHECK(bv2.select1(j) == bv.select1(j));
}
