#pragma once

#include <compare>
#include <string>
#include <vector>

#include "dyadic/check.hpp"
#include "dyadic/constants.hpp"
#include "dyadic/nets.hpp"
#include "dyadic/space.hpp"

namespace dyadic {

// (k, alpha): generation and index into that generation's net.
struct NodeKey {
    int k = 0;
    std::size_t alpha = 0;

    auto operator<=>(const NodeKey&) const = default;
    std::string str() const { return std::to_string(k) + ":" + std::to_string(alpha); }
};

// Which linking rule produced a parent: the close rule (rho < delta^{k-1} / (2 A0))
// or the nearest-center rule (rho < delta^{k-1}).
enum class LinkBranch { near, fallback };
std::string_view to_string(LinkBranch branch);

struct ParentLink {
    std::size_t parent = 0;
    LinkBranch branch = LinkBranch::near;
};

// Parent links between consecutive generations. Generation k_min holds the
// roots; every other node has exactly one parent one generation up.
class OrderTree {
public:
    OrderTree() = default;
    // links[0] must be empty; links[g] has one entry per node of generation k_min + g.
    OrderTree(int k_min, std::vector<std::size_t> counts, std::vector<std::vector<ParentLink>> links);

    int k_min() const noexcept { return k_min_; }
    int k_max() const noexcept { return k_min_ + static_cast<int>(counts_.size()) - 1; }
    std::size_t generations() const noexcept { return counts_.size(); }
    std::size_t count(int k) const { return counts_[index(k)]; }
    bool contains(NodeKey node) const;

    const ParentLink& link(NodeKey node) const;
    NodeKey parent(NodeKey node) const;
    const std::vector<std::size_t>& children(NodeKey node) const;
    std::vector<NodeKey> roots() const;

    // Copy with one parent link replaced.
    OrderTree with_parent(NodeKey child, std::size_t parent, LinkBranch branch) const;

    const std::vector<std::vector<ParentLink>>& links() const noexcept { return links_; }

private:
    std::size_t index(int k) const;

    int k_min_ = 0;
    std::vector<std::size_t> counts_;
    std::vector<std::vector<ParentLink>> links_;
    std::vector<std::vector<std::vector<std::size_t>>> children_;
};

// Throws InvariantError when some center has no candidate within delta^{k-1}.
OrderTree link_generations(const FiniteSpace& space, const std::vector<Net>& nets,
                           const ConstantLedger& ledger);

// Follows parent links up to generation l; ancestor_of(node, node.k) == node.
NodeKey ancestor_of(const OrderTree& tree, NodeKey node, int l);

// Chain from node up to its root, node first.
std::vector<NodeKey> lineage(const OrderTree& tree, NodeKey node);

Json node_json(const FiniteSpace& space, const std::vector<Net>& nets, NodeKey node);

// Checks: order_generation, order_unique_ancestor, order_parent_close,
// order_near_parent, center_drift.
std::vector<CheckResult> verify_order(const FiniteSpace& space, const OrderTree& tree,
                                      const std::vector<Net>& nets, const ConstantLedger& ledger);

// DOT digraph, edges child -> parent; labels "k:alpha:point_id".
std::string tree_to_dot(const FiniteSpace& space, const OrderTree& tree, const std::vector<Net>& nets);
// One line per link: "k:alpha k-1:beta branch".
std::string tree_to_text(const OrderTree& tree);

} // namespace dyadic
