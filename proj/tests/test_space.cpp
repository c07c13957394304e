#include <cmath>
#include <limits>

#include "doctest.h"
#include "dyadic/errors.hpp"
#include "dyadic/generators.hpp"
#include "dyadic/space.hpp"
#include "oracles.hpp"

using namespace dyadic;

namespace {

FiniteSpace line8() { return generate("grid:8x1"); }

PointSet ids_to_set(const FiniteSpace& s, std::initializer_list<const char*> ids) {
    PointSet out;
    for (const char* id : ids) out.push_back(s.index_of(id));
    return out;
}

} // namespace

TEST_CASE("balls are strict") {
    const auto s = line8();
    CHECK(ball_members(s, 0, 2.0) == ids_to_set(s, {"0", "1"}));
    CHECK(ball_members(s, 3, 0.5) == PointSet{3});
    CHECK(ball_members(s, 0, 100.0).size() == 8);
    CHECK_THROWS_AS(ball_members(s, 0, 0.0), InputError);
    CHECK_THROWS_AS(ball_members(s, 9, 1.0), InputError);
}

TEST_CASE("ball membership agrees with direct comparison") {
    const auto s = generate("uniform:60:7");
    for (PointIndex c = 0; c < s.size(); c += 7) {
        for (double r : {0.05, 0.1, 0.3, 2.0}) {
            const auto members = ball_members(s, c, r);
            for (PointIndex y = 0; y < s.size(); ++y) {
                const bool in = std::binary_search(members.begin(), members.end(), y);
                CHECK(in == (s.distance(c, y) < r));
            }
        }
    }
}

TEST_CASE("set distances") {
    const auto s = line8();
    PointSet all(8);
    for (PointIndex i = 0; i < 8; ++i) all[i] = i;
    CHECK(diameter(s, all) == 7.0);
    CHECK(distance_to_set(s, 3, PointSet{0, 7}) == 3.0);
    CHECK(distance_to_set(s, 3, PointSet{}) == std::numeric_limits<double>::infinity());
    CHECK(set_distance(s, PointSet{0, 1}, PointSet{5, 6}) == 4.0);
    const auto e = pairwise_extent(s);
    CHECK(e.diameter == 7.0);
    CHECK(e.min_separation == 1.0);
    CHECK(pairwise_extent(generate("line:1")).min_separation == 0.0);
}

TEST_CASE("quasi-triangle scan") {
    const auto s = line8();
    const auto r = validate_quasimetric(s, ValidationMode::exhaustive());
    CHECK(r.a0_emp == 1.0);
    CHECK(r.violation_count == 0);
    CHECK(r.clean());

    // rho(x, y) = |x - y|^2 on {0, 1, 2}: 4 / (1 + 1) at (0, 1, 2).
    const auto sq = generate("snowflake(line:3,2)");
    CHECK(sq.declared_a0() == 2.0);
    const auto q = validate_quasimetric(sq, ValidationMode::exhaustive());
    CHECK(q.a0_emp == 2.0);
    REQUIRE(q.witness);
    CHECK(q.witness->y == 1);
    CHECK(std::min(q.witness->x, q.witness->z) == 0);
    CHECK(std::max(q.witness->x, q.witness->z) == 2);
    CHECK(q.violation_count == 0);

    // Declaring too small an A0 produces violations.
    const auto low = validate_quasimetric(sq.with_declared_a0(1.0), ValidationMode::exhaustive());
    CHECK(low.violation_count > 0);
    CHECK(!low.violations.empty());
}

TEST_CASE("quasi-triangle scan matches the brute-force oracle") {
    for (const char* spec : {"uniform:30:3", "snowflake(uniform:25:9,3)", "clustered:30:3:5"}) {
        const auto s = generate(spec);
        const auto r = validate_quasimetric(s, ValidationMode::exhaustive());
        CHECK(r.a0_emp == doctest::Approx(oracle::quasi_constant(s)).epsilon(1e-14));
        CHECK(r.a0_emp <= s.declared_a0() * (1 + 1e-12));
    }
}

TEST_CASE("sampled scan is seeded and never exceeds the exhaustive value") {
    const auto s = generate("snowflake(uniform:40:1,2)");
    const auto full = validate_quasimetric(s, ValidationMode::exhaustive());
    const auto a = validate_quasimetric(s, ValidationMode::sampled(5000, 11));
    const auto b = validate_quasimetric(s, ValidationMode::sampled(5000, 11));
    CHECK(!a.exhaustive);
    CHECK(a.a0_emp == b.a0_emp);
    CHECK(a.a0_emp <= full.a0_emp);
    CHECK(ValidationMode::automatic(512, 1).kind == ValidationMode::Kind::exhaustive);
    CHECK(ValidationMode::automatic(513, 1).kind == ValidationMode::Kind::sampled);
}

TEST_CASE("doubling estimate") {
    const auto s = line8();
    const std::vector<double> grid{1, 2, 4};
    const auto d = estimate_doubling(s, grid);
    CHECK(d.a1_emp == 3.0);
    // (p3, r = 1) attains the maximum; the reported witness is the first maximizer.
    CHECK(doubling_ratio(s, 3, 1.0) == 3.0);
    CHECK(doubling_ratio(s, d.witness_point, d.witness_radius) == 3.0);

    const auto one = generate("line:1");
    CHECK(estimate_doubling(one, grid).a1_emp == 1.0);

    std::vector<double> w(8, 1.0);
    w[3] = 10.0;
    const auto heavy = s.with_weights(w);
    CHECK(doubling_ratio(heavy, 2, 1.0) == 12.0);
    CHECK(estimate_doubling(heavy, std::vector<double>{1.0}).a1_emp >= 12.0);
}

TEST_CASE("doubling estimate matches the oracle on a default grid") {
    const auto s = generate("uniform:40:5");
    const auto d = estimate_doubling(s);
    double best = 1.0;
    for (double r : d.radius_grid) {
        for (PointIndex x = 0; x < s.size(); ++x) {
            best = std::max(best, oracle::ball_mass(s, x, 2 * r) / oracle::ball_mass(s, x, r));
        }
    }
    CHECK(d.a1_emp == best);
}

TEST_CASE("metric tags") {
    for (const char* tag : {"euclidean", "lp:3", "explicit", "snowflake(euclidean,2)", "snowflake(lp:1,1.5)"}) {
        CHECK(MetricSpec::parse(tag).tag() == tag);
    }
    CHECK_THROWS_AS(MetricSpec::parse("manhattan"), InputError);
    CHECK_THROWS_AS(MetricSpec::parse("snowflake(euclidean,0.5)"), InputError);
    CHECK(MetricSpec::euclidean().analytic_a0() == 1.0);
    CHECK(MetricSpec::euclidean().snowflaked(3).analytic_a0() == 4.0);
    CHECK(!MetricSpec::explicit_matrix().analytic_a0());
}

TEST_CASE("explicit matrices") {
    const std::vector<double> m{0, 1, 3, 1, 0, 1, 3, 1, 0};
    const auto s = FiniteSpace::from_matrix(sequential_ids(3), m, {1, 1, 1}, 1.5);
    CHECK(s.distance(0, 2) == 3.0);
    CHECK(s.tolerance() == 0.0);
    CHECK(validate_quasimetric(s, ValidationMode::exhaustive()).a0_emp == 1.5);

    std::vector<double> asym = m;
    asym[1] = 2;
    CHECK_THROWS_AS(FiniteSpace::from_matrix(sequential_ids(3), asym, {1, 1, 1}, 1.0), DataError);
    std::vector<double> nan = m;
    nan[2] = nan[6] = std::nan("");
    CHECK_THROWS_AS(FiniteSpace::from_matrix(sequential_ids(3), nan, {1, 1, 1}, 1.0), DataError);
    CHECK_THROWS_AS(FiniteSpace::from_matrix(sequential_ids(3), m, {1, 0, 1}, 1.0), DataError);
    CHECK_THROWS_AS(FiniteSpace::from_matrix(sequential_ids(3), m, {1, 1, 1}, 0.5), InputError);
    CHECK_THROWS_AS(FiniteSpace::from_matrix(sequential_ids(2), m, {1, 1}, 1.0), InputError);
}

TEST_CASE("ids and weights") {
    const auto s = line8();
    CHECK(s.index_of("5") == 5);
    CHECK_THROWS_AS(s.index_of("p5"), InputError);
    CHECK(s.total_measure() == 8.0);
    CHECK_THROWS_AS(s.with_weights({1, 1}), InputError);
    CHECK_THROWS_AS(FiniteSpace::from_coordinates({"a", "a"}, 1, {0, 1}, MetricSpec::euclidean(), {1, 1}),
                    DataError);
}

TEST_CASE("near-ties are treated as equality for computed metrics") {
    const auto s = line8();
    CHECK(s.near(1.0, 1.0 + 1e-15));
    CHECK(!s.less(1.0 + 1e-15, 1.0));
    CHECK(!s.less(1.0, 1.0 + 1e-15));
    CHECK(s.less_equal(1.0 + 1e-15, 1.0));
    CHECK(!s.near(1.0, 1.0 + 1e-9));
}
