#include "slabtree/interval_set.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <sstream>

namespace slabtree {

namespace {

std::vector<std::pair<i64, i64>> parse_pairs(std::istream& in, const char* what) {
    std::string line;
    u64 n = 0;
    u64 lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        require(bool(ls >> n), std::string(what) + ": first line must be the count");
        break;
    }
    require(n >= 1, std::string(what) + ": count must be positive");
    std::vector<std::pair<i64, i64>> raw;
    raw.reserve(n);
    while (raw.size() < n && std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        i64 l, r;
        require(bool(ls >> l >> r),
                std::string(what) + ": expected 'l r' on line " + std::to_string(lineno));
        raw.emplace_back(l, r);
    }
    require(raw.size() == n, std::string(what) + ": missing intervals");
    return raw;
}

/// Maps all values to their rank in [1..2n]; rejects duplicates.
std::vector<std::pair<u32, u32>> rank_reduce(const std::vector<std::pair<i64, i64>>& raw,
                                             const char* what) {
    std::map<i64, u32> order;
    for (size_t i = 0; i < raw.size(); ++i) {
        auto [itl, okl] = order.emplace(raw[i].first, 0);
        require(okl, std::string(what) + ": duplicate endpoint " +
                         std::to_string(raw[i].first) + " at vertex " + std::to_string(i + 1));
        auto [itr, okr] = order.emplace(raw[i].second, 0);
        require(okr, std::string(what) + ": duplicate endpoint " +
                         std::to_string(raw[i].second) + " at vertex " + std::to_string(i + 1));
    }
    u32 rank = 1;
    for (auto& [val, rk] : order) rk = rank++;
    std::vector<std::pair<u32, u32>> out(raw.size());
    for (size_t i = 0; i < raw.size(); ++i)
        out[i] = {order[raw[i].first], order[raw[i].second]};
    return out;
}

} // namespace

IntervalSet IntervalSet::normalize(const std::vector<std::pair<i64, i64>>& raw) {
    for (size_t i = 0; i < raw.size(); ++i)
        require(raw[i].first < raw[i].second,
                "intervals: l >= r at vertex " + std::to_string(i + 1));
    auto reduced = rank_reduce(raw, "intervals");
    std::sort(reduced.begin(), reduced.end());
    IntervalSet iv;
    iv.n = u32(reduced.size());
    iv.left.resize(iv.n + 1);
    iv.right.resize(iv.n + 1);
    for (u32 v = 1; v <= iv.n; ++v) {
        iv.left[v] = reduced[v - 1].first;
        iv.right[v] = reduced[v - 1].second;
    }
    iv.check();
    return iv;
}

IntervalSet IntervalSet::parse(std::istream& in) {
    return normalize(parse_pairs(in, "intervals"));
}

void IntervalSet::check() const {
    require(n >= 1, "intervals: empty set");
    std::vector<bool> seen(2 * n + 1, false);
    for (u32 v = 1; v <= n; ++v) {
        require(left[v] >= 1 && left[v] <= 2 * n && right[v] >= 1 && right[v] <= 2 * n,
                "intervals: endpoint out of range at vertex " + std::to_string(v));
        require(left[v] < right[v], "intervals: l >= r at vertex " + std::to_string(v));
        require(!seen[left[v]] && !seen[right[v]],
                "intervals: duplicate endpoint at vertex " + std::to_string(v));
        seen[left[v]] = seen[right[v]] = true;
        if (v > 1)
            require(left[v] > left[v - 1], "intervals: vertices not sorted by left endpoint");
    }
}

ArcSet ArcSet::normalize(const std::vector<std::pair<i64, i64>>& raw) {
    auto reduced = rank_reduce(raw, "arcs");
    std::sort(reduced.begin(), reduced.end());
    ArcSet a;
    a.n = u32(reduced.size());
    a.left.resize(a.n + 1);
    a.right.resize(a.n + 1);
    for (u32 v = 1; v <= a.n; ++v) {
        a.left[v] = reduced[v - 1].first;
        a.right[v] = reduced[v - 1].second;
    }
    a.check();
    return a;
}

ArcSet ArcSet::parse(std::istream& in) { return normalize(parse_pairs(in, "arcs")); }

void ArcSet::check() const {
    require(n >= 1, "arcs: empty set");
    std::vector<bool> seen(2 * n + 1, false);
    for (u32 v = 1; v <= n; ++v) {
        require(left[v] >= 1 && left[v] <= 2 * n && right[v] >= 1 && right[v] <= 2 * n &&
                    left[v] != right[v],
                "arcs: endpoint out of range at vertex " + std::to_string(v));
        require(!seen[left[v]] && !seen[right[v]],
                "arcs: duplicate endpoint at vertex " + std::to_string(v));
        seen[left[v]] = seen[right[v]] = true;
        if (v > 1) require(left[v] > left[v - 1], "arcs: vertices not sorted by left endpoint");
    }
}

} // namespace slabtree
