#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dyadic {

// One admissibility bound on a construction parameter, e.g. "delta < 1/(8 A0^3)".
struct ParameterBound {
    std::string parameter;  // "delta" or "a0"
    std::string expression; // human-readable bound
    std::string role;       // which construction step needs it
    double bound = 0.0;
    double value = 0.0;
    bool satisfied = false;
};

// Every constant the construction depends on, derived from the quasi-triangle
// constant A0 together with the chosen scale ratio delta and ball factor a0.
struct ConstantLedger {
    double quasi_constant = 1.0;       // A0
    double diameter_factor = 0.0;      // C1: diam(Q^k) <= C1 delta^k
    double strong_inner_factor = 0.0;  // C3: B(z, C3 delta^k) n X^ inside Q^k
    double boundary_cube_factor = 0.0; // C4 = A0^2 (C1 + C5)
    double boundary_threshold = 0.0;   // C5 = 1 / (8 A0^4)
    double drift_bound = 0.0;          // 2 A0: rho(z^l, z^k) <= 2 A0 delta^k along a chain
    double scale_ratio_sup = 0.0;      // delta must stay below this
    double ball_factor_sup = 0.0;      // a0 must stay below this
    double scale_ratio = 0.0;          // delta
    double ball_factor = 0.0;          // a0
    bool relaxed = false;
    std::vector<ParameterBound> bounds;

    // C6 = A0 (C1 + C4) / (delta C5); depends on delta so it is not stored.
    double boundary_spread_factor() const;
    bool all_bounds_hold() const;
    std::vector<ParameterBound> violated_bounds() const;
};

// Throws InputError for A0 < 1 or parameters outside (0, 1), and
// ConstraintError (naming the bound) for non-relaxed parameters at or above
// their suprema. Omitted parameters default to half their supremum.
ConstantLedger derive_constants(double quasi_constant, std::optional<double> scale_ratio = {},
                                std::optional<double> ball_factor = {}, bool relaxed = false);

// Generations k_min (coarsest) .. k_max (finest) with scale(k) = delta^k.
struct ScaleLadder {
    double scale_ratio = 0.5;
    int k_min = 0;
    int k_max = 0;

    double scale(int k) const;
    int generations() const { return k_max - k_min + 1; }
    bool contains(int k) const { return k >= k_min && k <= k_max; }
    std::size_t index(int k) const { return static_cast<std::size_t>(k - k_min); }
};

// k_min: largest k with delta^k > diam. k_max: smallest k with
// delta^k <= min_sep. A single point (min_sep == 0) gets (0, 0).
ScaleLadder scale_ladder(double scale_ratio, double diam, double min_sep);

} // namespace dyadic
