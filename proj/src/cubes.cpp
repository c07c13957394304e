#include "dyadic/cubes.hpp"

#include <algorithm>
#include <iterator>
#include <limits>

#include "dyadic/errors.hpp"

namespace dyadic {

namespace {

PointSet set_union(const PointSet& a, const PointSet& b) {
    PointSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool has_member(const Cube& cube, PointIndex x) {
    return std::binary_search(cube.members.begin(), cube.members.end(), x);
}

std::optional<NodeKey> ball_escape(const Decomposition& dec, const Cube& q, double radius,
                                   const std::vector<char>* in_core, BallInclusion& out) {
    const FiniteSpace& space = *dec.space;
    out.radius = radius;
    for (PointIndex y : ball_members(space, q.center, radius)) {
        if (in_core && !(*in_core)[y]) continue;
        if (has_member(q, y)) continue;
        out.holds = false;
        out.witness = y;
        out.distance = space.distance(q.center, y);
        out.witness_cube = locate_by_scan(dec, y, q.key.k);
        return out.witness_cube;
    }
    return std::nullopt;
}

} // namespace

void refresh_cube(const FiniteSpace& space, Cube& cube) {
    cube.measure = space.measure(cube.members);
    cube.diameter = diameter(space, cube.members);
}

std::size_t Decomposition::generation_index(int k) const {
    if (!ladder.contains(k)) {
        throw InputError("generation " + std::to_string(k) + " outside [" +
                         std::to_string(ladder.k_min) + ", " + std::to_string(ladder.k_max) + "]");
    }
    return ladder.index(k);
}

const Cube& Decomposition::cube(NodeKey key) const {
    const auto& gen = generation(key.k);
    if (key.alpha >= gen.size()) throw InputError("unknown cube " + key.str());
    return gen[key.alpha];
}

std::size_t Decomposition::cube_count() const {
    std::size_t n = 0;
    for (const auto& gen : cubes) n += gen.size();
    return n;
}

Decomposition materialize(std::shared_ptr<const FiniteSpace> space, ScaleLadder ladder,
                          ConstantLedger ledger, std::vector<Net> nets, OrderTree tree) {
    if (!space) throw InputError("materialize needs a space");
    if (nets.size() != static_cast<std::size_t>(ladder.generations()) ||
        tree.generations() != nets.size() || tree.k_min() != ladder.k_min) {
        throw InputError("nets, tree and ladder disagree on the generations");
    }
    Decomposition dec;
    dec.space = space;
    dec.ladder = ladder;
    dec.ledger = ledger;
    dec.nets = std::move(nets);
    dec.tree = std::move(tree);
    dec.cubes.resize(dec.nets.size());

    for (std::size_t g = dec.nets.size(); g-- > 0;) {
        const int k = ladder.k_min + static_cast<int>(g);
        const double radius = ledger.ball_factor * ladder.scale(k);
        auto& gen = dec.cubes[g];
        gen.resize(dec.nets[g].centers.size());
        std::vector<std::size_t> owner(space->size(), std::numeric_limits<std::size_t>::max());
        for (std::size_t a = 0; a < gen.size(); ++a) {
            Cube& q = gen[a];
            q.key = {k, a};
            q.center = dec.nets[g].centers[a];
            q.members = ball_members(*space, q.center, radius);
            if (g + 1 < dec.nets.size()) {
                for (std::size_t c : dec.tree.children(q.key)) {
                    q.members = set_union(q.members, dec.cubes[g + 1][c].members);
                }
            }
            for (PointIndex x : q.members) {
                if (owner[x] != std::numeric_limits<std::size_t>::max()) {
                    throw MaterializationError(
                        "cubes " + NodeKey{k, owner[x]}.str() + " and " + q.key.str() +
                            " both contain point " + space->id(x) +
                            "; same-generation cubes must be disjoint (parameters outside the "
                            "admissible range?)",
                        k, owner[x], a, x);
                }
                owner[x] = a;
            }
            refresh_cube(*space, q);
        }
    }
    dec.uncovered = uncovered_sets(*space, dec.cubes);
    return dec;
}

std::vector<PointSet> uncovered_sets(const FiniteSpace& space,
                                     const std::vector<std::vector<Cube>>& cubes) {
    std::vector<PointSet> out;
    out.reserve(cubes.size());
    for (const auto& gen : cubes) {
        std::vector<char> hit(space.size(), 0);
        for (const auto& q : gen) {
            for (PointIndex x : q.members) hit[x] = 1;
        }
        PointSet rest;
        for (PointIndex x = 0; x < space.size(); ++x) {
            if (!hit[x]) rest.push_back(x);
        }
        out.push_back(std::move(rest));
    }
    return out;
}

const PointSet& uncovered(const Decomposition& dec, int k) {
    return dec.uncovered[dec.generation_index(k)];
}

PointSet covered_core(const Decomposition& dec) {
    std::vector<char> out(dec.space->size(), 0);
    for (const auto& set : dec.uncovered) {
        for (PointIndex x : set) out[x] = 1;
    }
    PointSet core;
    for (PointIndex x = 0; x < out.size(); ++x) {
        if (!out[x]) core.push_back(x);
    }
    return core;
}

std::optional<NodeKey> locate_by_scan(const Decomposition& dec, PointIndex x, int k) {
    dec.space->require_point(x);
    for (const auto& q : dec.generation(k)) {
        if (has_member(q, x)) return q.key;
    }
    return std::nullopt;
}

std::optional<NodeKey> locate_by_lineage(const Decomposition& dec, PointIndex x, int k) {
    dec.space->require_point(x);
    dec.generation_index(k);
    const auto& leaves = dec.nets.back().centers;
    const auto it = std::find(leaves.begin(), leaves.end(), x);
    if (it == leaves.end()) return std::nullopt;
    const NodeKey leaf{dec.ladder.k_max, static_cast<std::size_t>(it - leaves.begin())};
    return ancestor_of(dec.tree, leaf, k);
}

std::optional<NodeKey> locate(const Decomposition& dec, PointIndex x, int k) {
    if (dec.nets.back().centers.size() == dec.space->size()) return locate_by_lineage(dec, x, k);
    return locate_by_scan(dec, x, k);
}

std::vector<const Cube*> children_of(const Decomposition& dec, NodeKey key) {
    dec.cube(key);
    std::vector<const Cube*> out;
    if (key.k == dec.ladder.k_max) return out;
    const auto& finer = dec.generation(key.k + 1);
    for (std::size_t c : dec.tree.children(key)) out.push_back(&finer[c]);
    return out;
}

std::vector<double> exterior_distances(const Decomposition& dec, NodeKey key) {
    const FiniteSpace& space = *dec.space;
    const Cube& q = dec.cube(key);
    PointSet outside;
    outside.reserve(space.size() - q.members.size());
    for (PointIndex x = 0, i = 0; x < space.size(); ++x) {
        if (i < q.members.size() && q.members[i] == x) {
            ++i;
        } else {
            outside.push_back(x);
        }
    }
    std::vector<double> out;
    out.reserve(q.members.size());
    for (PointIndex x : q.members) out.push_back(distance_to_set(space, x, outside));
    return out;
}

BoundaryLayer boundary_layer(const Decomposition& dec, NodeKey key, double t) {
    return boundary_layer(dec, key, t, exterior_distances(dec, key));
}

BoundaryLayer boundary_layer(const Decomposition& dec, NodeKey key, double t,
                             const std::vector<double>& exterior) {
    if (!(t > 0.0)) throw InputError("boundary layer width must be positive");
    const FiniteSpace& space = *dec.space;
    const Cube& q = dec.cube(key);
    if (exterior.size() != q.members.size()) throw InputError("exterior distances do not match cube");
    const double width = t * dec.ladder.scale(key.k);
    BoundaryLayer layer;
    for (std::size_t i = 0; i < q.members.size(); ++i) {
        if (space.less_equal(exterior[i], width)) layer.members.push_back(q.members[i]);
    }
    layer.mass = space.measure(layer.members);
    return layer;
}

InnerBallVerdict strong_inner_ball_check(const Decomposition& dec, NodeKey key) {
    std::vector<char> in_core(dec.space->size(), 0);
    for (PointIndex x : covered_core(dec)) in_core[x] = 1;
    return strong_inner_ball_check(dec, key, in_core);
}

InnerBallVerdict strong_inner_ball_check(const Decomposition& dec, NodeKey key,
                                         const std::vector<char>& in_core) {
    const Cube& q = dec.cube(key);
    const double scale = dec.ladder.scale(key.k);
    InnerBallVerdict v;
    ball_escape(dec, q, dec.ledger.strong_inner_factor * scale, &in_core, v.strong);
    ball_escape(dec, q, dec.ledger.ball_factor * scale, nullptr, v.inner);
    return v;
}

} // namespace dyadic
