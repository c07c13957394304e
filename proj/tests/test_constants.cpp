#include <cmath>

#include "doctest.h"
#include "dyadic/constants.hpp"
#include "dyadic/errors.hpp"

using namespace dyadic;

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-15 * std::abs(b); }

std::size_t violated(const ConstantLedger& l, const std::string& parameter) {
    std::size_t n = 0;
    for (const auto& b : l.violated_bounds()) n += b.parameter == parameter;
    return n;
}

} // namespace

TEST_CASE("ledger at A0 = 1") {
    const auto l = derive_constants(1.0);
    // (A0 + 3 A0^3 + 2 A0^4) at A0 = 1, as in the diameter estimate.
    CHECK(l.diameter_factor == 6.0);
    CHECK(l.strong_inner_factor == 0.25);
    CHECK(l.boundary_threshold == 0.125);
    CHECK(close(l.scale_ratio_sup, 1.0 / 72));
    CHECK(l.ball_factor_sup == 0.125);
    CHECK(close(l.scale_ratio, 1.0 / 144));
    CHECK(l.ball_factor == 0.0625);
    CHECK(l.drift_bound == 2.0);
    CHECK(l.boundary_cube_factor == 6.125);
    CHECK(l.all_bounds_hold());
    CHECK(l.bounds.size() == 8);
}

TEST_CASE("ledger at A0 = 2") {
    const auto l = derive_constants(2.0);
    CHECK(l.diameter_factor == 58.0);
    CHECK(l.strong_inner_factor == 1.0 / 16);
    CHECK(l.boundary_threshold == 1.0 / 128);
    CHECK(l.ball_factor_sup == 1.0 / 128);
    CHECK(close(l.scale_ratio_sup, (1.0 / 16) / (3 * 8 * 58.0)));
}

TEST_CASE("suprema are the minimum of their bounds") {
    for (double a0 : {1.0, 1.3, 2.0, 4.0, 9.5}) {
        const auto l = derive_constants(a0);
        double ds = 1.0, as = 1.0;
        for (const auto& b : l.bounds) {
            (b.parameter == "delta" ? ds : as) = std::min(b.parameter == "delta" ? ds : as, b.bound);
            CHECK(b.satisfied);
            CHECK(!b.expression.empty());
            CHECK(!b.role.empty());
        }
        CHECK(l.scale_ratio_sup == ds);
        CHECK(l.ball_factor_sup == as);
        CHECK(l.scale_ratio == ds / 2);
        CHECK(l.ball_factor == as / 2);
        CHECK(close(l.boundary_spread_factor(),
                    a0 * (l.diameter_factor + l.boundary_cube_factor) / (l.scale_ratio * l.boundary_threshold)));
    }
}

TEST_CASE("relaxed runs record violated bounds") {
    const auto l = derive_constants(1.0, 0.5, std::nullopt, true);
    CHECK(l.relaxed);
    // 0.5 is not below 1/(2 A0) = 0.5, nor below the three tighter bounds.
    CHECK(violated(l, "delta") == 4);
    CHECK(violated(l, "a0") == 0);

    const auto m = derive_constants(1.0, 0.4, std::nullopt, true);
    CHECK(violated(m, "delta") == 3);
}

TEST_CASE("strict runs refuse inadmissible parameters") {
    CHECK_THROWS_AS(derive_constants(1.0, 0.5), ConstraintError);
    CHECK_THROWS_AS(derive_constants(1.0, std::nullopt, 0.125), ConstraintError);
    CHECK_NOTHROW(derive_constants(1.0, 0.0138, 0.12));
    CHECK_THROWS_AS(derive_constants(0.9), InputError);
    CHECK_THROWS_AS(derive_constants(1.0, 1.5, std::nullopt, true), InputError);
    CHECK_THROWS_AS(derive_constants(1.0, 0.0, std::nullopt, true), InputError);
    CHECK_THROWS_AS(derive_constants(1.0, std::nullopt, -0.1, true), InputError);
}

TEST_CASE("constraint errors name the bound") {
    try {
        derive_constants(1.0, 0.5);
        FAIL("expected ConstraintError");
    } catch (const ConstraintError& e) {
        CHECK(std::string(e.what()).find("1/(2 A0)") != std::string::npos);
    }
}

TEST_CASE("scale ladder") {
    const double d = 1.0 / 144;
    auto l = scale_ladder(d, 7.0, 1.0);
    CHECK(l.k_min == -1);
    CHECK(l.k_max == 0);
    CHECK(l.generations() == 2);
    l = scale_ladder(d, 7.0, 0.5);
    CHECK(l.k_max == 1);
    l = scale_ladder(d, 0.0, 0.0);
    CHECK(l.k_min == 0);
    CHECK(l.k_max == 0);
    CHECK(scale_ladder(0.5, 7.0, 1.0).scale(-3) == 8.0);
    CHECK(scale_ladder(0.5, 7.0, 1.0).k_min == -3);
}

TEST_CASE("ladder endpoints satisfy their defining inequalities") {
    for (double delta : {0.5, 0.3, 0.1, 1.0 / 144}) {
        for (double diam : {0.01, 1.0, 7.0, 1234.5}) {
            for (double sep : {1e-3, 0.01, 0.5}) {
                if (sep > diam) continue;
                const auto l = scale_ladder(delta, diam, sep);
                CHECK(l.scale(l.k_min) > diam);
                CHECK(!(l.scale(l.k_min + 1) > diam));
                CHECK(l.scale(l.k_max) <= sep);
                CHECK(!(l.scale(l.k_max - 1) <= sep));
            }
        }
    }
}
