#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "dyadic/constants.hpp"
#include "dyadic/nets.hpp"
#include "dyadic/order.hpp"
#include "dyadic/space.hpp"

namespace dyadic {

struct Cube {
    NodeKey key;
    PointIndex center = 0;
    PointSet members;
    double measure = 0.0;
    double diameter = 0.0;
};

// Recomputes measure and diameter from the member list.
void refresh_cube(const FiniteSpace& space, Cube& cube);

struct Decomposition {
    std::shared_ptr<const FiniteSpace> space;
    ScaleLadder ladder;
    ConstantLedger ledger;
    std::vector<Net> nets;
    OrderTree tree;
    std::vector<std::vector<Cube>> cubes; // [generation index][alpha]
    std::vector<PointSet> uncovered;      // [generation index]

    std::size_t generation_index(int k) const;
    const std::vector<Cube>& generation(int k) const { return cubes[generation_index(k)]; }
    const Cube& cube(NodeKey key) const;
    std::size_t cube_count() const;
};

// Bottom-up: the finest cubes are balls B(z, a0 delta^k); each coarser cube
// is its own ball joined with its children. Throws MaterializationError when
// two cubes of one generation share a point.
Decomposition materialize(std::shared_ptr<const FiniteSpace> space, ScaleLadder ladder,
                          ConstantLedger ledger, std::vector<Net> nets, OrderTree tree);

// X minus the union of generation-k cubes, for every generation.
std::vector<PointSet> uncovered_sets(const FiniteSpace& space,
                                     const std::vector<std::vector<Cube>>& cubes);

const PointSet& uncovered(const Decomposition& dec, int k);

// X^: points covered in every generation.
PointSet covered_core(const Decomposition& dec);

// The generation-k cube containing x, or nullopt when x is uncovered at k.
// Uses the leaf lineage when every point is a finest-generation center.
std::optional<NodeKey> locate(const Decomposition& dec, PointIndex x, int k);
std::optional<NodeKey> locate_by_scan(const Decomposition& dec, PointIndex x, int k);
// nullopt when x is not a finest-generation center.
std::optional<NodeKey> locate_by_lineage(const Decomposition& dec, PointIndex x, int k);

std::vector<const Cube*> children_of(const Decomposition& dec, NodeKey key);

// rho(x, X \ Q) for each member x of Q, aligned with Q.members; +infinity
// when Q = X.
std::vector<double> exterior_distances(const Decomposition& dec, NodeKey key);

struct BoundaryLayer {
    PointSet members;
    double mass = 0.0;
};

// { x in Q : rho(x, X \ Q) <= t delta^k }.
BoundaryLayer boundary_layer(const Decomposition& dec, NodeKey key, double t);
BoundaryLayer boundary_layer(const Decomposition& dec, NodeKey key, double t,
                             const std::vector<double>& exterior);

struct BallInclusion {
    bool holds = true;
    double radius = 0.0;
    PointIndex witness = 0; // ball point outside the cube
    double distance = 0.0;
    std::optional<NodeKey> witness_cube; // where the witness actually sits
};

struct InnerBallVerdict {
    BallInclusion strong; // B(z, C3 delta^k) n X^ inside Q
    BallInclusion inner;  // B(z, a0 delta^k) inside Q
    bool passed() const { return strong.holds && inner.holds; }
};

InnerBallVerdict strong_inner_ball_check(const Decomposition& dec, NodeKey key);
InnerBallVerdict strong_inner_ball_check(const Decomposition& dec, NodeKey key,
                                         const std::vector<char>& in_core);

} // namespace dyadic
