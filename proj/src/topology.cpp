#include "slabtree/topology.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace slabtree {

TreeTopology::TreeTopology(const std::vector<u32>& parents) {
    n_ = u32(parents.size());
    require(n_ >= 1, "TreeTopology: empty tree");
    require(parents[0] == 0, "TreeTopology: node 1 must be the root");
    for (u32 v = 2; v <= n_; ++v)
        require(parents[v - 1] >= 1 && parents[v - 1] < v,
                "TreeTopology: parent rank must precede child rank (node " +
                    std::to_string(v) + ")");
    build_children(parents);

    // The numbering must be the preorder induced by the children order:
    // an iterative DFS must visit 1..n in sequence.
    std::vector<u32> stack = {1};
    std::vector<u32> nextc(n_ + 1, 1);
    u32 expect = 1;
    while (!stack.empty()) {
        u32 v = stack.back();
        if (v != expect && nextc[v] == 1)
            fail("TreeTopology: numbering is not a preorder (node " + std::to_string(v) +
                 " visited out of order)");
        if (nextc[v] == 1) ++expect;
        if (nextc[v] <= degree(v)) {
            stack.push_back(child(v, nextc[v]++));
        } else {
            stack.pop_back();
        }
    }
    require(expect == n_ + 1, "TreeTopology: disconnected input");
}

void TreeTopology::build_children(const std::vector<u32>& parents) {
    parent_.assign(n_ + 1, 0);
    child_start_.assign(n_ + 2, 0);
    child_end_.assign(n_ + 1, 0);
    for (u32 v = 1; v <= n_; ++v) parent_[v] = parents[v - 1];
    std::vector<u32> deg(n_ + 1, 0);
    for (u32 v = 2; v <= n_; ++v) ++deg[parent_[v]];
    u32 off = 0;
    for (u32 v = 1; v <= n_; ++v) {
        child_start_[v] = off;
        child_end_[v] = off;
        off += deg[v];
    }
    children_.assign(off, 0);
    // children in increasing preorder = left-to-right order
    for (u32 v = 2; v <= n_; ++v) children_[child_end_[parent_[v]]++] = v;
}

TreeTopology TreeTopology::parse(std::istream& in) {
    std::string first;
    while (std::getline(in, first)) {
        if (!first.empty() && first.find_first_not_of(" \t\r") != std::string::npos) break;
    }
    require(!first.empty(), "tree input: empty file");
    if (first.find('(') != std::string::npos) return from_bp(first);

    u64 n = 0;
    {
        std::istringstream ls(first);
        require(bool(ls >> n), "tree input: first line must be the node count");
    }
    require(n >= 1, "tree input: node count must be positive");
    std::vector<u32> parents(n, 0);
    std::vector<bool> seen(n + 1, false);
    seen[1] = true;
    std::string line;
    u64 lineno = 1;
    u64 edges = 0;
    while (edges < n - 1 && std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        u64 c = 0, p = 0;
        require(bool(ls >> c >> p),
                "tree input: expected 'child parent' on line " + std::to_string(lineno));
        require(c >= 2 && c <= n && p >= 1 && p < c,
                "tree input: bad edge on line " + std::to_string(lineno));
        require(!seen[c], "tree input: duplicate child on line " + std::to_string(lineno));
        seen[c] = true;
        parents[c - 1] = u32(p);
        ++edges;
    }
    require(edges == n - 1, "tree input: missing edges");
    return TreeTopology(parents);
}

TreeTopology TreeTopology::from_bp(const std::string& bp) {
    std::vector<u32> parents;
    std::vector<u32> stack;
    u32 next = 0;
    for (char ch : bp) {
        if (ch == '(') {
            ++next;
            parents.push_back(stack.empty() ? 0 : stack.back());
            require(stack.empty() ? next == 1 : true, "bp input: forest is not a tree");
            stack.push_back(next);
        } else if (ch == ')') {
            require(!stack.empty(), "bp input: unbalanced parentheses");
            stack.pop_back();
        } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
            continue;
        } else {
            fail("bp input: unexpected character");
        }
    }
    require(stack.empty(), "bp input: unbalanced parentheses");
    require(!parents.empty(), "bp input: empty tree");
    return TreeTopology(parents);
}

void TreeTopology::write(std::ostream& out) const {
    out << n_ << "\n";
    for (u32 v = 2; v <= n_; ++v) out << v << " " << parent_[v] << "\n";
}

} // namespace slabtree
