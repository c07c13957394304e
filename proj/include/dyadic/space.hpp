#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dyadic {

using PointIndex = std::size_t;

// Sorted, duplicate-free list of point indices.
using PointSet = std::vector<PointIndex>;

enum class BaseMetric { euclidean, lp, explicit_matrix };

// Distance oracle description: a base metric optionally raised to a power
// (the snowflake transform rho^eps, eps >= 1).
struct MetricSpec {
    BaseMetric base = BaseMetric::euclidean;
    double p = 2.0;
    double exponent = 1.0;

    static MetricSpec euclidean() { return {}; }
    static MetricSpec lp(double p) { return {BaseMetric::lp, p, 1.0}; }
    static MetricSpec explicit_matrix() { return {BaseMetric::explicit_matrix, 2.0, 1.0}; }
    MetricSpec snowflaked(double eps) const;

    // "euclidean", "lp:3", "explicit", "snowflake(euclidean,2)".
    std::string tag() const;
    static MetricSpec parse(std::string_view tag);

    // Quasi-triangle constant known in closed form, if any. Explicit
    // matrices have none.
    std::optional<double> analytic_a0() const;

    bool operator==(const MetricSpec&) const = default;
};

// A finite quasi-metric measure space: ordered points, a distance oracle and
// strictly positive point masses. Immutable after construction.
class FiniteSpace {
public:
    static FiniteSpace from_coordinates(std::vector<std::string> ids, std::size_t dimension,
                                        std::vector<double> coordinates, MetricSpec metric,
                                        std::vector<double> weights,
                                        std::optional<double> declared_a0 = std::nullopt);

    // Matrix is row-major n*n. Must be symmetric with zero diagonal and
    // strictly positive off-diagonal entries.
    static FiniteSpace from_matrix(std::vector<std::string> ids, std::vector<double> matrix,
                                   std::vector<double> weights, double declared_a0,
                                   double exponent = 1.0);

    std::size_t size() const noexcept { return ids_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }
    bool has_coordinates() const noexcept { return metric_.base != BaseMetric::explicit_matrix; }

    const std::string& id(PointIndex i) const { return ids_[i]; }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    PointIndex index_of(std::string_view id) const;
    void require_point(PointIndex i) const;

    std::span<const double> coordinates(PointIndex i) const;
    std::span<const double> matrix() const noexcept { return matrix_; }

    double weight(PointIndex i) const { return weights_[i]; }
    std::span<const double> weights() const noexcept { return weights_; }
    double measure(std::span<const PointIndex> points) const;
    double total_measure() const;

    double distance(PointIndex a, PointIndex b) const;

    const MetricSpec& metric() const noexcept { return metric_; }
    double declared_a0() const noexcept { return declared_a0_; }

    // Relative tolerance for distance comparisons: zero for explicit
    // matrices, 1e-12 for computed metrics.
    double tolerance() const noexcept { return tolerance_; }
    bool near(double a, double b) const;
    // d < r, with near-ties treated as equality.
    bool less(double d, double r) const { return d < r && !near(d, r); }
    // d <= r, with near-ties treated as equality.
    bool less_equal(double d, double r) const { return d <= r || near(d, r); }

    FiniteSpace with_declared_a0(double a0) const;
    FiniteSpace with_weights(std::vector<double> weights) const;

private:
    FiniteSpace() = default;
    void index_ids();
    void check_weights() const;

    std::vector<std::string> ids_;
    std::unordered_map<std::string, PointIndex> lookup_;
    std::size_t dimension_ = 0;
    std::vector<double> coordinates_;
    std::vector<double> matrix_;
    std::vector<double> weights_;
    MetricSpec metric_;
    double declared_a0_ = 1.0;
    double tolerance_ = 0.0;
};

std::vector<std::string> sequential_ids(std::size_t n);

// B(x, r) = { y : rho(x, y) < r }.
PointSet ball_members(const FiniteSpace& space, PointIndex center, double radius);

double diameter(const FiniteSpace& space, std::span<const PointIndex> set);
// +infinity for the empty set.
double distance_to_set(const FiniteSpace& space, PointIndex x, std::span<const PointIndex> set);
double set_distance(const FiniteSpace& space, std::span<const PointIndex> a,
                    std::span<const PointIndex> b);

struct Extent {
    double diameter = 0.0;
    double min_separation = 0.0; // smallest nonzero pairwise distance; 0 for one point
};
Extent pairwise_extent(const FiniteSpace& space);

struct ValidationMode {
    enum class Kind { exhaustive, sampled };
    static constexpr std::size_t kExhaustiveLimit = 512;

    Kind kind = Kind::exhaustive;
    std::size_t triples = 0;
    std::uint64_t seed = 0;

    static ValidationMode exhaustive() { return {}; }
    static ValidationMode sampled(std::size_t triples, std::uint64_t seed) {
        return {Kind::sampled, triples, seed};
    }
    // Exhaustive up to kExhaustiveLimit points, seeded sampling above.
    static ValidationMode automatic(std::size_t n, std::uint64_t seed,
                                    std::size_t triples = 1'000'000);
};

struct Triple {
    PointIndex x = 0, y = 0, z = 0;
    double ratio = 0.0;
};

struct PairDefect {
    PointIndex a = 0, b = 0;
    double forward = 0.0;
    double backward = 0.0;
};

struct QuasimetricReport {
    double a0_emp = 1.0;
    std::optional<Triple> witness;
    std::size_t violation_count = 0;
    std::vector<Triple> violations; // first few triples with ratio > declared A0
    std::vector<PairDefect> asymmetric;
    std::vector<PairDefect> identity; // zero distance between distinct points, or nonzero self-distance
    std::size_t triples_scanned = 0;
    bool exhaustive = true;

    bool clean() const { return violation_count == 0 && asymmetric.empty() && identity.empty(); }
};

// Scans ratios rho(x,z) / (rho(x,y) + rho(y,z)) over ordered triples with x != z.
QuasimetricReport validate_quasimetric(const FiniteSpace& space, const ValidationMode& mode);

struct DoublingEstimate {
    double a1_emp = 1.0;
    PointIndex witness_point = 0;
    double witness_radius = 0.0;
    std::vector<double> radius_grid;
};

// Max over x and r in the grid of mu(B(x,2r)) / mu(B(x,r)).
DoublingEstimate estimate_doubling(const FiniteSpace& space, std::span<const double> radius_grid);
// Default grid: every distinct pairwise distance and the midpoints between
// consecutive ones.
DoublingEstimate estimate_doubling(const FiniteSpace& space);
double doubling_ratio(const FiniteSpace& space, PointIndex x, double radius);

} // namespace dyadic
