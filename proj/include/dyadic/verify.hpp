#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dyadic/check.hpp"
#include "dyadic/cubes.hpp"

namespace dyadic {

struct VerifyOptions {
    std::optional<double> doubling_constant; // A1; estimated from the space when absent
    std::vector<double> t_grid;              // boundary widths; default_t_grid(delta) when empty
    std::uint64_t seed = 0;                  // for sampled quasi-triangle scans (n > 512)
    std::size_t sampled_triples = 1'000'000;
};

// {0.5, 0.25, 0.125, 0.0625} / delta: layer widths of half a parent scale
// down to a sixteenth of it.
std::vector<double> default_t_grid(double delta);

struct MeasureRatio {
    double doubling_constant = 1.0; // A1 used
    int exponent = 0;               // d: smallest with 2^d a0 >= A0 delta^{-1} (1 + C1)
    double bound = 1.0;             // A1^d
    double max_ratio = 0.0;         // max mu(parent) / mu(child)
    std::optional<NodeKey> parent, child;
    CheckStatus status = CheckStatus::not_applicable;
};

int measure_ratio_exponent(const ConstantLedger& ledger);
MeasureRatio check_parent_child_measure(const Decomposition& dec, double doubling_constant);

struct FitRow {
    NodeKey key;
    double t = 0.0;
    double mass = 0.0;
    double cube_measure = 0.0;
    double normalized = 0.0; // mass / cube_measure
    bool used = false;       // entered the regression
};

struct BoundaryFit {
    CheckStatus status = CheckStatus::not_applicable;
    std::optional<double> eta;
    std::optional<double> c2;
    std::size_t usable = 0;
    std::vector<int> generations; // generations pooled into the fit
    std::vector<FitRow> table;
    std::string note;
};

// Least squares of log m(t) against log t over rows with 0 < m(t) < 1 from
// intermediate generations (all generations when there are none between
// the coarsest and the finest). eta is the slope, C2 = exp(intercept).
BoundaryFit fit_boundary_exponent(const Decomposition& dec, std::span<const double> t_grid);

struct VerificationReport {
    std::vector<CheckResult> checks;
    Json constants = Json::object();
    std::vector<std::string> warnings;

    bool any_failed() const;
    const CheckResult* find(std::string_view name) const;
    Json to_json() const;
    std::string to_text() const;
};

// Names of the suite's checks, in report order.
const std::vector<std::string>& suite_check_names();

VerificationReport run_suite(const Decomposition& dec, const VerifyOptions& options = {});

Json ledger_json(const ConstantLedger& ledger);
std::string ledger_text(const ConstantLedger& ledger);

} // namespace dyadic
