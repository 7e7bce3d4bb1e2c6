#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "slabtree/common.hpp"

namespace slabtree {

/// An ordinal tree given explicitly. Nodes are identified by their global
/// preorder rank 1..n; the root is node 1 and parent(v) < v for every v > 1.
/// Children lists are in left-to-right order.
class TreeTopology {
public:
    TreeTopology() = default;

    /// parents[v-1] = parent of node v (0 for the root, which must be node 1).
    /// Validates that the numbering is the preorder induced by the child order.
    explicit TreeTopology(const std::vector<u32>& parents);

    u32 size() const { return n_; }
    u32 parent(u32 v) const { return parent_[v]; }
    u32 degree(u32 v) const { return child_end_[v] - child_start_[v]; }
    u32 child(u32 v, u32 i) const { return children_[child_start_[v] + i - 1]; }

    const u32* children_begin(u32 v) const { return children_.data() + child_start_[v]; }
    const u32* children_end(u32 v) const { return children_.data() + child_end_[v]; }

    /// Parses the text format: first line n, then n-1 lines "child parent";
    /// alternatively a single balanced-parentheses line such as "((()())())".
    static TreeTopology parse(std::istream& in);
    static TreeTopology from_bp(const std::string& bp);

    void write(std::ostream& out) const;

private:
    void build_children(const std::vector<u32>& parents);

    u32 n_ = 0;
    std::vector<u32> parent_;       // 1-based; parent_[1] = 0
    std::vector<u32> children_;     // concatenated children
    std::vector<u32> child_start_;  // 1-based offsets into children_
    std::vector<u32> child_end_;
};

} // namespace slabtree
