#pragma once

#include <iosfwd>
#include <vector>

#include "slabtree/common.hpp"

namespace slabtree {

/// n intervals with all 2n endpoints distinct and normalized to [1..2n],
/// vertices numbered 1..n by increasing left endpoint.
struct IntervalSet {
    u32 n = 0;
    std::vector<u32> left;   // 1-based by vertex
    std::vector<u32> right;

    /// Rank-reduces arbitrary distinct integer endpoints to [1..2n] and sorts
    /// vertices by left endpoint. Rejects duplicate endpoints and l >= r,
    /// naming the offending vertices (1-based input order).
    static IntervalSet normalize(const std::vector<std::pair<i64, i64>>& raw);

    /// File format: line 1 "n", then n lines "l r".
    static IntervalSet parse(std::istream& in);

    void check() const;
};

/// n circular arcs over positions [1..2n]; vertex v is reversed when
/// left > right, denoting the arc [left..2n] union [1..right].
struct ArcSet {
    u32 n = 0;
    std::vector<u32> left;
    std::vector<u32> right;

    bool reversed(u32 v) const { return left[v] > right[v]; }

    /// Rank-reduces endpoints and relabels by sorted left endpoint.
    static ArcSet normalize(const std::vector<std::pair<i64, i64>>& raw);

    /// File format: line 1 "n", then n lines "l r" (l > r marks a reversed arc).
    static ArcSet parse(std::istream& in);

    void check() const;
};

} // namespace slabtree
