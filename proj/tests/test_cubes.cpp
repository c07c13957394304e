#include <limits>

#include "doctest.h"
#include "dyadic/cubes.hpp"
#include "dyadic/errors.hpp"
#include "oracles.hpp"

using namespace dyadic;

TEST_CASE("line cubes") {
    const auto dec = oracle::build("grid:8x1");
    CHECK(dec.cube_count() == 9);
    for (std::size_t a = 0; a < 8; ++a) {
        CHECK(dec.cube({0, a}).members == PointSet{a});
        CHECK(dec.cube({0, a}).measure == 1.0);
    }
    const Cube& root = dec.cube({-1, 0});
    CHECK(root.members.size() == 8);
    CHECK(root.diameter == 7.0);
    CHECK(root.diameter <= dec.ledger.diameter_factor * dec.ladder.scale(-1));
    CHECK(uncovered(dec, -1).empty());
    CHECK(uncovered(dec, 0).empty());
    CHECK(covered_core(dec).size() == 8);
    CHECK(children_of(dec, {-1, 0}).size() == 8);
    CHECK(children_of(dec, {0, 2}).empty());
}

TEST_CASE("single point") {
    const auto dec = oracle::build("line:1");
    CHECK(dec.cube_count() == 1);
    CHECK(dec.cube({0, 0}).members == PointSet{0});
}

TEST_CASE("locate on the line") {
    const auto dec = oracle::build("grid:8x1");
    CHECK(locate(dec, 5, 0) == NodeKey{0, 5});
    CHECK(locate(dec, 5, -1) == NodeKey{-1, 0});
    CHECK(locate_by_scan(dec, 5, 0) == NodeKey{0, 5});
    CHECK(locate_by_lineage(dec, 5, -1) == NodeKey{-1, 0});
}

TEST_CASE("a truncated ladder whose root ball covers X leaves nothing uncovered") {
    auto space = oracle::fixture("grid:8x1");
    const auto ledger = derive_constants(1.0);
    ScaleLadder ladder{ledger.scale_ratio, -1, -1};
    auto nets = build_nets(*space, ladder, NetOrder::by_id());
    OrderTree tree(-1, {nets[0].centers.size()}, {{}});
    const auto dec = materialize(space, ladder, ledger, nets, tree);
    CHECK(uncovered(dec, -1).empty());
}

TEST_CASE("a ball smaller than the gaps leaves points uncovered") {
    // Finest generation at scale 1 with a0 = 1/16 on points spaced 1 apart,
    // but nets built at a coarser separation so that only some are centers.
    auto space = oracle::fixture("grid:8x1");
    const auto ledger = derive_constants(1.0);
    ScaleLadder ladder{ledger.scale_ratio, 0, 0};
    std::vector<Net> nets{build_net(*space, 2.0, NetOrder::by_id(), 0)};
    OrderTree tree(0, {nets[0].centers.size()}, {{}});
    const auto dec = materialize(space, ladder, ledger, nets, tree);
    CHECK(uncovered(dec, 0) == PointSet{1, 3, 5, 7});
    CHECK(!locate(dec, 1, 0));
    CHECK(locate(dec, 2, 0) == NodeKey{0, 1});
    CHECK(covered_core(dec) == PointSet{0, 2, 4, 6});
}

TEST_CASE("overlapping cubes abort materialization") {
    auto space = oracle::fixture("grid:8x1");
    const auto ledger = derive_constants(1.0, 0.4, 0.9, true);
    // Radius 0.9 * 2.5 around every point of a unit-spaced net.
    ScaleLadder ladder{0.4, -1, -1};
    std::vector<Net> nets{build_net(*space, 1.0, NetOrder::by_id(), -1)};
    OrderTree tree(-1, {8}, {{}});
    CHECK_THROWS_AS(materialize(space, ladder, ledger, nets, tree), MaterializationError);
}

TEST_CASE("cubes equal the union of their descendants' balls") {
    for (const auto& spec : oracle::fixtures()) {
        const auto dec = oracle::build(spec);
        for (const auto& gen : dec.cubes) {
            for (const auto& q : gen) {
                CHECK(q.members == oracle::descendant_ball_union(dec, q.key));
                CHECK(q.measure == dec.space->measure(q.members));
            }
        }
    }
}

TEST_CASE("locate agrees with brute-force membership") {
    for (const auto& spec : oracle::fixtures()) {
        const auto dec = oracle::build(spec);
        for (PointIndex x = 0; x < dec.space->size(); ++x) {
            for (int k = dec.ladder.k_min; k <= dec.ladder.k_max; ++k) {
                const long want = oracle::owner(dec, x, k);
                const auto got = locate(dec, x, k);
                const auto scanned = locate_by_scan(dec, x, k);
                CHECK(got == scanned);
                if (want < 0) {
                    CHECK(!got);
                } else {
                    REQUIRE(got);
                    CHECK(got->k == k);
                    CHECK(static_cast<long>(got->alpha) == want);
                }
            }
            const auto leaf = locate(dec, x, dec.ladder.k_max);
            if (!leaf) continue;
            for (int k = dec.ladder.k_min; k <= dec.ladder.k_max; ++k) {
                CHECK(locate(dec, x, k) == ancestor_of(dec.tree, *leaf, k));
            }
        }
    }
}

TEST_CASE("boundary layers") {
    const auto dec = oracle::build("grid:8x1");
    // rho(p3, X \ {p3}) = 1 = t delta^0 at t = 1.
    auto layer = boundary_layer(dec, {0, 3}, 1.0);
    CHECK(layer.members == PointSet{3});
    CHECK(layer.mass == 1.0);
    layer = boundary_layer(dec, {0, 3}, 0.5);
    CHECK(layer.members.empty());
    CHECK(layer.mass == 0.0);
    for (double t : {0.001, 1.0, 1e6}) CHECK(boundary_layer(dec, {-1, 0}, t).members.empty());
    const auto ext = exterior_distances(dec, {-1, 0});
    CHECK(ext.front() == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(boundary_layer(dec, {0, 3}, 0.0), InputError);
}

TEST_CASE("boundary layers are monotone and match the oracle") {
    for (const auto& spec : oracle::fixtures()) {
        const auto dec = oracle::build(spec);
        const double inv = 1.0 / dec.ladder.scale_ratio;
        const std::vector<double> ts{0.0625 * inv, 0.125 * inv, 0.25 * inv, 0.5 * inv};
        for (const auto& gen : dec.cubes) {
            for (const auto& q : gen) {
                double last = 0.0;
                for (double t : ts) {
                    const auto layer = boundary_layer(dec, q.key, t);
                    CHECK(layer.mass == oracle::layer_mass(dec, q.members, q.key.k, t));
                    CHECK(layer.mass >= last);
                    CHECK(layer.mass <= q.measure);
                    last = layer.mass;
                }
            }
        }
    }
}

TEST_CASE("strong inner balls") {
    const auto dec = oracle::build("grid:8x1");
    const auto root = strong_inner_ball_check(dec, {-1, 0});
    CHECK(root.passed());
    CHECK(root.strong.radius == 36.0);
    const auto leaf = strong_inner_ball_check(dec, {0, 3});
    CHECK(leaf.passed());
    CHECK(leaf.strong.radius == 0.25);
    for (const auto& spec : oracle::fixtures()) {
        const auto d = oracle::build(spec);
        for (const auto& gen : d.cubes) {
            for (const auto& q : gen) CHECK(strong_inner_ball_check(d, q.key).passed());
        }
    }
}

TEST_CASE("a violated strong inner ball reports the witness") {
    auto dec = oracle::build("grid:8x1");
    auto& root = dec.cubes[0][0];
    root.members.erase(root.members.begin() + 1); // drop p1, at distance 1 from p0
    refresh_cube(*dec.space, root);
    const auto v = strong_inner_ball_check(dec, {-1, 0});
    CHECK(!v.strong.holds);
    CHECK(!v.inner.holds);
    CHECK(v.strong.witness == 1);
    CHECK(v.strong.distance == 1.0);
    // p1 now sits in no generation -1 cube.
    CHECK(!v.strong.witness_cube);
}
