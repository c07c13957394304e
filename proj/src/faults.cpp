#include "dyadic/faults.hpp"

#include <algorithm>
#include <random>

#include "dyadic/errors.hpp"

namespace dyadic {

namespace {

template <typename T>
const T& pick(const std::vector<T>& options, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> dist(0, options.size() - 1);
    return options[dist(rng)];
}

void erase_member(Cube& q, PointIndex x) {
    q.members.erase(std::remove(q.members.begin(), q.members.end(), x), q.members.end());
}

InjectedFault reparent(const Decomposition& dec, std::mt19937_64& rng) {
    const FiniteSpace& s = *dec.space;
    std::vector<NodeKey> nodes;
    for (int k = dec.ladder.k_min + 1; k <= dec.ladder.k_max; ++k) {
        if (dec.tree.count(k - 1) < 2) continue;
        for (std::size_t a = 0; a < dec.tree.count(k); ++a) nodes.push_back({k, a});
    }
    if (nodes.empty()) throw InputError("reparent needs a parent generation with at least two nodes");
    const NodeKey child = pick(nodes, rng);
    const NodeKey old_parent = dec.tree.parent(child);
    // The farthest other node one generation up.
    const auto& up = dec.generation(child.k - 1);
    std::size_t target = old_parent.alpha;
    double far = -1.0;
    for (const auto& q : up) {
        if (q.key.alpha == old_parent.alpha) continue;
        const double d = s.distance(dec.cube(child).center, q.center);
        if (d > far) {
            far = d;
            target = q.key.alpha;
        }
    }
    InjectedFault f{FaultKind::reparent, "", dec};
    f.dec.tree = dec.tree.with_parent(child, target, LinkBranch::fallback);
    f.description = "reparented " + child.str() + " from " + old_parent.str() + " to " +
                    NodeKey{child.k - 1, target}.str();
    return f;
}

InjectedFault delete_member(const Decomposition& dec, std::mt19937_64& rng) {
    const FiniteSpace& s = *dec.space;
    // Prefer a non-center point of a multi-point child, so the child still
    // meets its parent through its center.
    std::vector<std::pair<NodeKey, PointIndex>> shared, leaves;
    for (int k = dec.ladder.k_min + 1; k <= dec.ladder.k_max; ++k) {
        for (const auto& q : dec.generation(k)) {
            for (PointIndex x : q.members) {
                if (x != q.center) shared.push_back({q.key, x});
            }
            leaves.push_back({q.key, q.center});
        }
    }
    const auto& pool = shared.empty() ? leaves : shared;
    if (pool.empty()) throw InputError("delete_member needs at least two generations");
    const auto [child, x] = pick(pool, rng);
    const NodeKey parent = dec.tree.parent(child);
    InjectedFault f{FaultKind::delete_member, "", dec};
    Cube& p = f.dec.cubes[f.dec.generation_index(parent.k)][parent.alpha];
    erase_member(p, x);
    refresh_cube(s, p);
    f.dec.uncovered = uncovered_sets(s, f.dec.cubes);
    f.description = "deleted point " + s.id(x) + " of child " + child.str() + " from parent " +
                    parent.str();
    return f;
}

InjectedFault inflate_ball(const Decomposition& dec, std::mt19937_64& rng) {
    const FiniteSpace& s = *dec.space;
    std::vector<NodeKey> cubes;
    for (const auto& gen : dec.cubes) {
        for (const auto& q : gen) {
            if (q.members.size() < s.size()) cubes.push_back(q.key);
        }
    }
    if (cubes.empty()) throw InputError("inflate_ball needs a cube that is not the whole space");
    const NodeKey key = pick(cubes, rng);
    InjectedFault f{FaultKind::inflate_ball, "", dec};
    Cube& q = f.dec.cubes[f.dec.generation_index(key.k)][key.alpha];
    PointSet outside;
    for (PointIndex x = 0; x < s.size(); ++x) {
        if (!std::binary_search(q.members.begin(), q.members.end(), x)) outside.push_back(x);
    }
    const double radius = 1.5 * distance_to_set(s, q.center, outside);
    PointSet grown;
    const auto ball = ball_members(s, q.center, radius);
    std::set_union(q.members.begin(), q.members.end(), ball.begin(), ball.end(),
                   std::back_inserter(grown));
    const std::size_t added = grown.size() - q.members.size();
    q.members = std::move(grown);
    refresh_cube(s, q);
    f.dec.uncovered = uncovered_sets(s, f.dec.cubes);
    f.description = "inflated " + key.str() + " to the ball of radius " + std::to_string(radius) +
                    " (" + std::to_string(added) + " points added)";
    return f;
}

InjectedFault break_separation(const Decomposition& dec, std::mt19937_64& rng) {
    const FiniteSpace& s = *dec.space;
    std::vector<std::pair<int, PointIndex>> options;
    for (const auto& net : dec.nets) {
        std::vector<char> center(s.size(), 0);
        for (PointIndex z : net.centers) center[z] = 1;
        for (PointIndex x = 0; x < s.size(); ++x) {
            if (!center[x]) options.push_back({net.k, x});
        }
    }
    if (options.empty()) throw InputError("break_separation needs a generation with a non-center point");
    const auto [k, x] = pick(options, rng);
    InjectedFault f{FaultKind::break_separation, "", dec};
    const auto g = f.dec.generation_index(k);
    Net& net = f.dec.nets[g];
    net.centers.push_back(x);
    const std::size_t alpha = net.centers.size() - 1;

    // Keep the tree and the cube table shaped like the nets: the new node
    // hangs off its nearest coarser center and gets its own ball as cube.
    std::vector<std::size_t> counts;
    for (const auto& n : f.dec.nets) counts.push_back(n.centers.size());
    auto links = dec.tree.links();
    if (g > 0) {
        const auto& up = f.dec.nets[g - 1].centers;
        std::size_t best = 0;
        for (std::size_t b = 1; b < up.size(); ++b) {
            if (s.distance(x, up[b]) < s.distance(x, up[best])) best = b;
        }
        links[g].push_back({best, LinkBranch::fallback});
    }
    f.dec.tree = OrderTree(dec.ladder.k_min, counts, std::move(links));
    Cube q;
    q.key = {k, alpha};
    q.center = x;
    q.members = ball_members(s, x, dec.ledger.ball_factor * dec.ladder.scale(k));
    refresh_cube(s, q);
    f.dec.cubes[g].push_back(std::move(q));
    f.dec.uncovered = uncovered_sets(s, f.dec.cubes);
    f.description = "added point " + s.id(x) + " as extra center " + NodeKey{k, alpha}.str();
    return f;
}

InjectedFault zero_weight(const Decomposition& dec, std::mt19937_64& rng) {
    const FiniteSpace& s = *dec.space;
    std::vector<PointIndex> points(s.size());
    for (PointIndex x = 0; x < s.size(); ++x) points[x] = x;
    const PointIndex x = pick(points, rng);
    InjectedFault f{FaultKind::zero_weight, "", dec};
    std::size_t touched = 0;
    for (auto& gen : f.dec.cubes) {
        for (auto& q : gen) {
            if (std::binary_search(q.members.begin(), q.members.end(), x)) {
                q.measure -= s.weight(x);
                ++touched;
            }
        }
    }
    f.description = "zeroed the weight of point " + s.id(x) + " in " + std::to_string(touched) +
                    " stored cube measures";
    return f;
}

} // namespace

std::string_view to_string(FaultKind kind) {
    switch (kind) {
    case FaultKind::reparent: return "reparent";
    case FaultKind::delete_member: return "delete_member";
    case FaultKind::inflate_ball: return "inflate_ball";
    case FaultKind::break_separation: return "break_separation";
    case FaultKind::zero_weight: return "zero_weight";
    }
    return "unknown";
}

FaultKind parse_fault(std::string_view name) {
    for (auto kind : {FaultKind::reparent, FaultKind::delete_member, FaultKind::inflate_ball,
                      FaultKind::break_separation, FaultKind::zero_weight}) {
        if (to_string(kind) == name) return kind;
    }
    throw InputError("unknown fault '" + std::string(name) +
                     "' (reparent, delete_member, inflate_ball, break_separation, zero_weight)");
}

InjectedFault inject_fault(const Decomposition& dec, FaultKind kind, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    switch (kind) {
    case FaultKind::reparent: return reparent(dec, rng);
    case FaultKind::delete_member: return delete_member(dec, rng);
    case FaultKind::inflate_ball: return inflate_ball(dec, rng);
    case FaultKind::break_separation: return break_separation(dec, rng);
    case FaultKind::zero_weight: return zero_weight(dec, rng);
    }
    throw InputError("unknown fault");
}

} // namespace dyadic
