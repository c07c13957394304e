#include "dyadic/order.hpp"

#include <limits>
#include <sstream>

#include "dyadic/errors.hpp"

namespace dyadic {

std::string_view to_string(LinkBranch branch) {
    return branch == LinkBranch::near ? "near" : "fallback";
}

OrderTree::OrderTree(int k_min, std::vector<std::size_t> counts,
                     std::vector<std::vector<ParentLink>> links)
    : k_min_(k_min), counts_(std::move(counts)), links_(std::move(links)) {
    if (counts_.empty()) throw InvariantError("order tree needs at least one generation");
    if (links_.size() != counts_.size() || !links_[0].empty()) {
        throw InvariantError("order tree links do not match its generations");
    }
    children_.resize(counts_.size());
    for (std::size_t g = 0; g < counts_.size(); ++g) {
        children_[g].resize(counts_[g]);
        if (g == 0) continue;
        if (links_[g].size() != counts_[g]) {
            throw InvariantError("generation " + std::to_string(k_min_ + static_cast<int>(g)) +
                                 " has " + std::to_string(links_[g].size()) + " links for " +
                                 std::to_string(counts_[g]) + " nodes");
        }
        for (std::size_t a = 0; a < counts_[g]; ++a) {
            const std::size_t p = links_[g][a].parent;
            if (p >= counts_[g - 1]) {
                throw InvariantError("node " + NodeKey{k_min_ + static_cast<int>(g), a}.str() +
                                     " links to missing parent index " + std::to_string(p));
            }
            children_[g - 1][p].push_back(a);
        }
    }
}

std::size_t OrderTree::index(int k) const {
    if (k < k_min_ || k > k_max()) {
        throw InputError("generation " + std::to_string(k) + " outside [" + std::to_string(k_min_) +
                         ", " + std::to_string(k_max()) + "]");
    }
    return static_cast<std::size_t>(k - k_min_);
}

bool OrderTree::contains(NodeKey node) const {
    return node.k >= k_min_ && node.k <= k_max() && node.alpha < counts_[index(node.k)];
}

const ParentLink& OrderTree::link(NodeKey node) const {
    if (!contains(node)) throw InputError("unknown node " + node.str());
    if (node.k == k_min_) throw InputError("root node " + node.str() + " has no parent");
    return links_[index(node.k)][node.alpha];
}

NodeKey OrderTree::parent(NodeKey node) const { return {node.k - 1, link(node).parent}; }

const std::vector<std::size_t>& OrderTree::children(NodeKey node) const {
    if (!contains(node)) throw InputError("unknown node " + node.str());
    return children_[index(node.k)][node.alpha];
}

std::vector<NodeKey> OrderTree::roots() const {
    std::vector<NodeKey> out;
    for (std::size_t a = 0; a < counts_[0]; ++a) out.push_back({k_min_, a});
    return out;
}

OrderTree OrderTree::with_parent(NodeKey child, std::size_t parent, LinkBranch branch) const {
    link(child);
    auto links = links_;
    links[index(child.k)][child.alpha] = {parent, branch};
    return OrderTree(k_min_, counts_, std::move(links));
}

OrderTree link_generations(const FiniteSpace& space, const std::vector<Net>& nets,
                           const ConstantLedger& ledger) {
    if (nets.empty()) throw InputError("no nets to link");
    std::vector<std::size_t> counts;
    std::vector<std::vector<ParentLink>> links(nets.size());
    for (const auto& net : nets) counts.push_back(net.centers.size());

    for (std::size_t g = 1; g < nets.size(); ++g) {
        const Net& up = nets[g - 1];
        const Net& net = nets[g];
        const double near_radius = up.separation / (2.0 * ledger.quasi_constant);
        links[g].reserve(net.centers.size());
        for (std::size_t a = 0; a < net.centers.size(); ++a) {
            const PointIndex z = net.centers[a];
            // Nearest among close candidates, else nearest within delta^{k-1};
            // ties go to the smaller index.
            std::size_t best_near = up.centers.size(), best_far = up.centers.size();
            double near_d = std::numeric_limits<double>::infinity(), far_d = near_d;
            for (std::size_t b = 0; b < up.centers.size(); ++b) {
                const double d = space.distance(z, up.centers[b]);
                if (space.less(d, near_radius) && d < near_d) {
                    near_d = d;
                    best_near = b;
                }
                if (space.less(d, up.separation) && d < far_d) {
                    far_d = d;
                    best_far = b;
                }
            }
            if (best_near < up.centers.size()) {
                links[g].push_back({best_near, LinkBranch::near});
            } else if (best_far < up.centers.size()) {
                links[g].push_back({best_far, LinkBranch::fallback});
            } else {
                throw InvariantError("center " + space.id(z) + " of generation " +
                                     std::to_string(net.k) + " has no generation " +
                                     std::to_string(up.k) + " center within " +
                                     std::to_string(up.separation) +
                                     "; the coarser net is not maximal");
            }
        }
    }
    return OrderTree(nets.front().k, std::move(counts), std::move(links));
}

NodeKey ancestor_of(const OrderTree& tree, NodeKey node, int l) {
    if (!tree.contains(node)) throw InputError("unknown node " + node.str());
    if (l < tree.k_min() || l > node.k) {
        throw InputError("ancestor generation " + std::to_string(l) + " outside [" +
                         std::to_string(tree.k_min()) + ", " + std::to_string(node.k) + "]");
    }
    while (node.k > l) node = tree.parent(node);
    return node;
}

std::vector<NodeKey> lineage(const OrderTree& tree, NodeKey node) {
    if (!tree.contains(node)) throw InputError("unknown node " + node.str());
    std::vector<NodeKey> chain{node};
    while (node.k > tree.k_min()) {
        node = tree.parent(node);
        chain.push_back(node);
    }
    return chain;
}

Json node_json(const FiniteSpace& space, const std::vector<Net>& nets, NodeKey node) {
    Json j = {{"k", node.k}, {"alpha", node.alpha}};
    if (!nets.empty()) {
        const auto g = static_cast<std::size_t>(node.k - nets.front().k);
        if (g < nets.size() && node.alpha < nets[g].centers.size()) {
            j["center"] = space.id(nets[g].centers[node.alpha]);
        }
    }
    return j;
}

std::vector<CheckResult> verify_order(const FiniteSpace& space, const OrderTree& tree,
                                      const std::vector<Net>& nets, const ConstantLedger& ledger) {
    const double a0 = ledger.quasi_constant;
    auto center = [&](NodeKey n) {
        return nets[static_cast<std::size_t>(n.k - tree.k_min())].centers[n.alpha];
    };
    auto node = [&](NodeKey n) { return node_json(space, nets, n); };

    CheckResult generation("order_generation",
                           "(k,a) relates to (l,b) only when l <= k; links join consecutive generations");
    CheckResult ancestor("order_unique_ancestor",
                         "each (k,a) has exactly one ancestor (l,b) in every generation l <= k");
    CheckResult close("order_parent_close", "(k,a) below (k-1,b) implies rho(z^k_a, z^{k-1}_b) < delta^{k-1}");
    CheckResult near("order_near_parent",
                     "rho(z^k_a, z^{k-1}_b) < delta^{k-1} / (2 A0) implies (k,a) below (k-1,b)");
    CheckResult drift("center_drift", "(l,b) below (k,a) implies rho(z^l_b, z^k_a) <= 2 A0 delta^k");

    if (nets.size() != tree.generations() || nets.front().k != tree.k_min()) {
        generation.fail({{"reason", "tree generations do not match the nets"},
                         {"tree_generations", tree.generations()},
                         {"net_generations", nets.size()}});
        return {generation, ancestor, close, near, drift};
    }

    std::size_t link_count = 0;
    for (std::size_t g = 0; g < nets.size(); ++g) {
        const int k = tree.k_min() + static_cast<int>(g);
        if (tree.count(k) != nets[g].centers.size()) {
            generation.fail({{"reason", "node count differs from net size"},
                             {"k", k},
                             {"nodes", tree.count(k)},
                             {"centers", nets[g].centers.size()}});
        }
        if (g > 0) link_count += tree.links()[g].size();
    }
    generation.numbers["links"] = link_count;

    // Unique ancestor: every chain reaches k_min one generation per hop and
    // composes transitively.
    std::size_t chains = 0;
    for (int k = tree.k_min(); k <= tree.k_max(); ++k) {
        for (std::size_t a = 0; a < tree.count(k); ++a) {
            const NodeKey n{k, a};
            const auto chain = lineage(tree, n);
            ++chains;
            bool ok = chain.size() == static_cast<std::size_t>(k - tree.k_min() + 1);
            for (std::size_t i = 0; ok && i < chain.size(); ++i) {
                ok = chain[i].k == k - static_cast<int>(i) && tree.contains(chain[i]);
            }
            for (std::size_t m = 0; ok && m < chain.size(); ++m) {
                for (std::size_t l = m; ok && l < chain.size(); ++l) {
                    ok = ancestor_of(tree, chain[m], chain[l].k) == chain[l];
                }
            }
            if (!ok) ancestor.fail({{"node", node(n)}, {"chain_length", chain.size()}});
        }
    }
    ancestor.numbers["chains"] = chains;

    double worst_link = 0.0;
    std::size_t near_pairs = 0;
    for (std::size_t g = 1; g < nets.size(); ++g) {
        const int k = tree.k_min() + static_cast<int>(g);
        const double sep_up = nets[g - 1].separation;
        const double near_radius = sep_up / (2.0 * a0);
        for (std::size_t a = 0; a < nets[g].centers.size(); ++a) {
            const NodeKey child{k, a};
            const ParentLink& link = tree.link(child);
            const NodeKey parent{k - 1, link.parent};
            const double d = space.distance(center(child), center(parent));
            worst_link = std::max(worst_link, d / sep_up);
            if (!space.less(d, sep_up)) {
                close.fail({{"child", node(child)}, {"parent", node(parent)}, {"distance", d},
                            {"bound", sep_up}});
            } else if (link.branch == LinkBranch::near && !space.less(d, near_radius)) {
                close.fail({{"child", node(child)}, {"parent", node(parent)}, {"branch", "near"},
                            {"distance", d}, {"bound", near_radius}});
            }
            for (std::size_t b = 0; b < nets[g - 1].centers.size(); ++b) {
                const double e = space.distance(center(child), nets[g - 1].centers[b]);
                if (!space.less(e, near_radius)) continue;
                ++near_pairs;
                if (link.parent != b) {
                    near.fail({{"child", node(child)},
                               {"close_center", node({k - 1, b})},
                               {"distance", e},
                               {"bound", near_radius},
                               {"linked_parent", node(parent)}});
                }
            }
        }
    }
    close.numbers["max_distance_over_scale"] = worst_link;
    near.numbers["close_pairs"] = near_pairs;

    // Drift along every ancestor pair.
    const double delta = ledger.scale_ratio;
    const bool series = delta < 1.0 / (2.0 * a0);
    const double series_factor = a0 / (1.0 - a0 * delta);
    double max_ratio = 0.0;
    double max_distance = 0.0;
    std::size_t pairs = 0;
    for (int l = tree.k_min() + 1; l <= tree.k_max(); ++l) {
        for (std::size_t b = 0; b < tree.count(l); ++b) {
            const NodeKey low{l, b};
            NodeKey up = low;
            while (up.k > tree.k_min()) {
                up = tree.parent(up);
                const double scale = nets[static_cast<std::size_t>(up.k - tree.k_min())].separation;
                const double d = space.distance(center(low), center(up));
                ++pairs;
                max_ratio = std::max(max_ratio, d / scale);
                max_distance = std::max(max_distance, d);
                const double bound = ledger.drift_bound * scale;
                if (!space.less_equal(d, bound)) {
                    drift.fail({{"descendant", node(low)}, {"ancestor", node(up)}, {"distance", d},
                                {"bound", bound}});
                } else if (series && !space.less_equal(d, series_factor * scale)) {
                    drift.fail({{"descendant", node(low)}, {"ancestor", node(up)}, {"distance", d},
                                {"series_bound", series_factor * scale}});
                }
            }
        }
    }
    drift.numbers["pairs"] = pairs;
    drift.numbers["max_distance"] = max_distance;
    drift.numbers["max_ratio"] = max_ratio;
    drift.numbers["bound_factor"] = ledger.drift_bound;
    if (series) drift.numbers["series_factor"] = series_factor;

    return {generation, ancestor, close, near, drift};
}

std::string tree_to_dot(const FiniteSpace& space, const OrderTree& tree, const std::vector<Net>& nets) {
    std::ostringstream os;
    os << "digraph order {\n";
    for (int k = tree.k_min(); k <= tree.k_max(); ++k) {
        const auto& centers = nets[static_cast<std::size_t>(k - tree.k_min())].centers;
        for (std::size_t a = 0; a < tree.count(k); ++a) {
            const NodeKey n{k, a};
            os << "  \"" << n.str() << "\" [label=\"" << n.str() << ":" << space.id(centers[a])
               << "\"];\n";
        }
    }
    for (int k = tree.k_min() + 1; k <= tree.k_max(); ++k) {
        for (std::size_t a = 0; a < tree.count(k); ++a) {
            const NodeKey n{k, a};
            const auto& link = tree.link(n);
            os << "  \"" << n.str() << "\" -> \"" << NodeKey{k - 1, link.parent}.str()
               << "\" [branch=" << to_string(link.branch) << "];\n";
        }
    }
    os << "}\n";
    return os.str();
}

std::string tree_to_text(const OrderTree& tree) {
    std::ostringstream os;
    for (int k = tree.k_min() + 1; k <= tree.k_max(); ++k) {
        for (std::size_t a = 0; a < tree.count(k); ++a) {
            const NodeKey n{k, a};
            const auto& link = tree.link(n);
            os << n.str() << ' ' << NodeKey{k - 1, link.parent}.str() << ' '
               << to_string(link.branch) << '\n';
        }
    }
    return os.str();
}

} // namespace dyadic
