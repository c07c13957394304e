#include "dyadic/constants.hpp"

#include <cmath>
#include <sstream>

#include "dyadic/errors.hpp"

namespace dyadic {

namespace {

constexpr int kLadderLimit = 100000;

std::string describe(const ParameterBound& b) {
    std::ostringstream os;
    os.precision(17);
    os << b.parameter << " = " << b.value << " violates " << b.expression << " (bound " << b.bound
       << ", needed for " << b.role << ")";
    return os.str();
}

} // namespace

double ConstantLedger::boundary_spread_factor() const {
    return quasi_constant * (diameter_factor + boundary_cube_factor) /
           (scale_ratio * boundary_threshold);
}

bool ConstantLedger::all_bounds_hold() const {
    for (const auto& b : bounds) {
        if (!b.satisfied) return false;
    }
    return true;
}

std::vector<ParameterBound> ConstantLedger::violated_bounds() const {
    std::vector<ParameterBound> out;
    for (const auto& b : bounds) {
        if (!b.satisfied) out.push_back(b);
    }
    return out;
}

ConstantLedger derive_constants(double quasi_constant, std::optional<double> scale_ratio,
                                std::optional<double> ball_factor, bool relaxed) {
    if (!(quasi_constant >= 1.0) || !std::isfinite(quasi_constant)) {
        throw InputError("quasi-triangle constant A0 must be a finite real >= 1");
    }
    const double a = quasi_constant;
    const double a2 = a * a, a3 = a2 * a, a4 = a3 * a;

    ConstantLedger l;
    l.quasi_constant = a;
    l.relaxed = relaxed;
    l.diameter_factor = a + 3.0 * a3 + 2.0 * a4;
    l.strong_inner_factor = 1.0 / (4.0 * a2);
    l.boundary_threshold = 1.0 / (8.0 * a4);
    l.boundary_cube_factor = a2 * (l.diameter_factor + l.boundary_threshold);
    l.drift_bound = 2.0 * a;

    const double c1 = l.diameter_factor;
    const double c3 = l.strong_inner_factor;
    struct Spec {
        const char* parameter;
        const char* expression;
        const char* role;
        double bound;
    };
    const Spec specs[] = {
        {"delta", "delta < 1/(2 A0)", "center drift along ancestor chains", 1.0 / (2.0 * a)},
        {"delta", "delta < 1/(8 A0^3)", "same-generation disjointness", 1.0 / (8.0 * a3)},
        {"delta", "delta < 1/(4 A0^2 C1)", "strong inner ball", 1.0 / (4.0 * a2 * c1)},
        {"delta", "delta < C3/(3 A0^3 C1)", "chain separation near cube boundaries",
         c3 / (3.0 * a3 * c1)},
        {"a0", "a0 < 1/(2 A0)", "same-generation disjointness", 1.0 / (2.0 * a)},
        {"a0", "a0 < 1/(8 A0^3)", "same-generation disjointness across generations",
         1.0 / (8.0 * a3)},
        {"a0", "a0 < 3/(4 A0)", "strong inner ball", 3.0 / (4.0 * a)},
        {"a0", "a0 < 1/(8 A0^4)", "boundary layers covered by deep descendants", 1.0 / (8.0 * a4)},
    };

    l.scale_ratio_sup = 1.0;
    l.ball_factor_sup = 1.0;
    for (const auto& s : specs) {
        double& sup = std::string_view(s.parameter) == "delta" ? l.scale_ratio_sup : l.ball_factor_sup;
        sup = std::min(sup, s.bound);
    }

    l.scale_ratio = scale_ratio.value_or(l.scale_ratio_sup / 2.0);
    l.ball_factor = ball_factor.value_or(l.ball_factor_sup / 2.0);
    if (!(l.scale_ratio > 0.0 && l.scale_ratio < 1.0)) {
        throw InputError("delta must lie in (0, 1)");
    }
    if (!(l.ball_factor > 0.0 && l.ball_factor < 1.0)) {
        throw InputError("a0 must lie in (0, 1)");
    }

    for (const auto& s : specs) {
        ParameterBound b;
        b.parameter = s.parameter;
        b.expression = s.expression;
        b.role = s.role;
        b.bound = s.bound;
        b.value = b.parameter == "delta" ? l.scale_ratio : l.ball_factor;
        b.satisfied = b.value < b.bound;
        l.bounds.push_back(std::move(b));
    }

    if (!relaxed && !l.all_bounds_hold()) {
        std::string message = "parameter constraints violated:";
        for (const auto& b : l.violated_bounds()) message += "\n  " + describe(b);
        throw ConstraintError(message);
    }
    return l;
}

double ScaleLadder::scale(int k) const {
    if (k >= 0) return std::pow(scale_ratio, k);
    return std::pow(1.0 / scale_ratio, -k);
}

ScaleLadder scale_ladder(double scale_ratio, double diam, double min_sep) {
    if (!(scale_ratio > 0.0 && scale_ratio < 1.0)) throw InputError("delta must lie in (0, 1)");
    ScaleLadder ladder;
    ladder.scale_ratio = scale_ratio;
    if (min_sep == 0.0) return ladder; // single point
    if (!(min_sep > 0.0) || !(min_sep <= diam) || !std::isfinite(diam)) {
        throw InputError("scale ladder needs 0 < min_sep <= diam");
    }

    int k = 0;
    if (ladder.scale(0) > diam) {
        while (ladder.scale(k + 1) > diam && k < kLadderLimit) ++k;
    } else {
        while (!(ladder.scale(k) > diam) && k > -kLadderLimit) --k;
    }
    ladder.k_min = k;

    k = 0;
    if (ladder.scale(0) <= min_sep) {
        while (ladder.scale(k - 1) <= min_sep && k > -kLadderLimit) --k;
    } else {
        while (!(ladder.scale(k) <= min_sep) && k < kLadderLimit) ++k;
    }
    ladder.k_max = k;
    if (std::abs(ladder.k_min) >= kLadderLimit || std::abs(ladder.k_max) >= kLadderLimit) {
        throw InputError("scale ladder does not terminate for these extents");
    }
    return ladder;
}

} // namespace dyadic
