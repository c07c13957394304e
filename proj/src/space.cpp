#include "dyadic/space.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "dyadic/errors.hpp"

namespace dyadic {

namespace {

constexpr double kComputedTolerance = 1e-12;

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double parse_number(std::string_view text, std::string_view what) {
    std::string s(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InputError("cannot parse " + std::string(what) + " from '" + s + "'");
    }
    if (used != s.size()) {
        throw InputError("trailing characters in " + std::string(what) + " '" + s + "'");
    }
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

// ---------------------------------------------------------------- MetricSpec

MetricSpec MetricSpec::snowflaked(double eps) const {
    if (!(eps >= 1.0) || !std::isfinite(eps)) {
        throw InputError("snowflake exponent must be a finite real >= 1, got " + format_number(eps));
    }
    MetricSpec out = *this;
    out.exponent *= eps;
    return out;
}

std::string MetricSpec::tag() const {
    std::string base_tag;
    switch (base) {
    case BaseMetric::euclidean: base_tag = "euclidean"; break;
    case BaseMetric::lp: base_tag = "lp:" + format_number(p); break;
    case BaseMetric::explicit_matrix: base_tag = "explicit"; break;
    }
    if (exponent == 1.0) return base_tag;
    return "snowflake(" + base_tag + "," + format_number(exponent) + ")";
}

MetricSpec MetricSpec::parse(std::string_view tag) {
    tag = trim(tag);
    if (tag == "euclidean") return euclidean();
    if (tag == "explicit") return explicit_matrix();
    if (tag.starts_with("lp:")) {
        double p = parse_number(tag.substr(3), "l_p exponent");
        if (!(p > 0.0) || !std::isfinite(p)) throw InputError("l_p exponent must be positive");
        return lp(p);
    }
    if (tag.starts_with("snowflake(") && tag.ends_with(")")) {
        auto inner = tag.substr(10, tag.size() - 11);
        auto comma = inner.rfind(',');
        if (comma == std::string_view::npos) {
            throw InputError("snowflake metric needs '(base,exponent)': " + std::string(tag));
        }
        return parse(inner.substr(0, comma))
            .snowflaked(parse_number(trim(inner.substr(comma + 1)), "snowflake exponent"));
    }
    throw InputError("unknown metric '" + std::string(tag) + "'");
}

std::optional<double> MetricSpec::analytic_a0() const {
    double base_constant = 1.0;
    switch (base) {
    case BaseMetric::euclidean: break;
    case BaseMetric::lp:
        // (sum |t_i|^p)^(1/p) for p < 1 satisfies the quasi-triangle
        // inequality with constant 2^(1/p - 1).
        if (p < 1.0) base_constant = std::pow(2.0, 1.0 / p - 1.0);
        break;
    case BaseMetric::explicit_matrix: return std::nullopt;
    }
    // (a + b)^eps <= 2^(eps - 1) (a^eps + b^eps) for eps >= 1.
    return std::pow(base_constant, exponent) * std::pow(2.0, exponent - 1.0);
}

// --------------------------------------------------------------- FiniteSpace

std::vector<std::string> sequential_ids(std::size_t n) {
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
    return ids;
}

void FiniteSpace::index_ids() {
    if (ids_.empty()) throw InputError("a space needs at least one point");
    lookup_.reserve(ids_.size());
    for (PointIndex i = 0; i < ids_.size(); ++i) {
        if (!lookup_.emplace(ids_[i], i).second) {
            throw DataError("duplicate point id '" + ids_[i] + "'");
        }
    }
}

void FiniteSpace::check_weights() const {
    if (weights_.size() != ids_.size()) {
        throw InputError("expected " + std::to_string(ids_.size()) + " weights, got " +
                         std::to_string(weights_.size()));
    }
    for (PointIndex i = 0; i < weights_.size(); ++i) {
        if (!std::isfinite(weights_[i]) || !(weights_[i] > 0.0)) {
            throw DataError("weight of point '" + ids_[i] + "' must be finite and > 0, got " +
                            format_number(weights_[i]));
        }
    }
}

FiniteSpace FiniteSpace::from_coordinates(std::vector<std::string> ids, std::size_t dimension,
                                          std::vector<double> coordinates, MetricSpec metric,
                                          std::vector<double> weights,
                                          std::optional<double> declared_a0) {
    if (metric.base == BaseMetric::explicit_matrix) {
        throw InputError("coordinate spaces need a computed metric, not 'explicit'");
    }
    if (dimension == 0) throw InputError("coordinate dimension must be positive");
    FiniteSpace s;
    s.ids_ = std::move(ids);
    s.index_ids();
    if (coordinates.size() != s.ids_.size() * dimension) {
        throw InputError("coordinate array does not match point count and dimension");
    }
    for (double c : coordinates) {
        if (!std::isfinite(c)) throw DataError("non-finite coordinate");
    }
    s.dimension_ = dimension;
    s.coordinates_ = std::move(coordinates);
    s.weights_ = std::move(weights);
    s.check_weights();
    s.metric_ = metric;
    s.tolerance_ = kComputedTolerance;
    double a0 = declared_a0.value_or(metric.analytic_a0().value_or(1.0));
    if (!(a0 >= 1.0) || !std::isfinite(a0)) throw InputError("declared A0 must be >= 1");
    s.declared_a0_ = a0;
    return s;
}

FiniteSpace FiniteSpace::from_matrix(std::vector<std::string> ids, std::vector<double> matrix,
                                     std::vector<double> weights, double declared_a0,
                                     double exponent) {
    FiniteSpace s;
    s.ids_ = std::move(ids);
    s.index_ids();
    const std::size_t n = s.ids_.size();
    if (matrix.size() != n * n) throw InputError("distance matrix must be n x n");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double v = matrix[i * n + j];
            auto where = [&] { return "(" + s.ids_[i] + ", " + s.ids_[j] + ")"; };
            if (!std::isfinite(v)) throw DataError("non-finite distance at " + where());
            if (i == j && v != 0.0) throw DataError("nonzero diagonal entry at " + where());
            if (i != j && !(v > 0.0)) {
                throw DataError("off-diagonal distance must be > 0 at " + where());
            }
            if (j > i && v != matrix[j * n + i]) {
                throw DataError("asymmetric distance at " + where() + ": " + format_number(v) +
                                " vs " + format_number(matrix[j * n + i]));
            }
        }
    }
    s.matrix_ = std::move(matrix);
    s.weights_ = std::move(weights);
    s.check_weights();
    s.metric_ = MetricSpec::explicit_matrix().snowflaked(exponent);
    s.tolerance_ = exponent == 1.0 ? 0.0 : kComputedTolerance;
    if (!(declared_a0 >= 1.0) || !std::isfinite(declared_a0)) {
        throw InputError("declared A0 must be >= 1");
    }
    s.declared_a0_ = declared_a0;
    return s;
}

PointIndex FiniteSpace::index_of(std::string_view id) const {
    auto it = lookup_.find(std::string(id));
    if (it == lookup_.end()) throw InputError("unknown point id '" + std::string(id) + "'");
    return it->second;
}

void FiniteSpace::require_point(PointIndex i) const {
    if (i >= size()) {
        throw InputError("point index " + std::to_string(i) + " outside a space of " +
                         std::to_string(size()) + " points");
    }
}

std::span<const double> FiniteSpace::coordinates(PointIndex i) const {
    if (!has_coordinates()) return {};
    return std::span<const double>(coordinates_).subspan(i * dimension_, dimension_);
}

double FiniteSpace::measure(std::span<const PointIndex> points) const {
    double total = 0.0;
    for (PointIndex p : points) total += weights_[p];
    return total;
}

double FiniteSpace::total_measure() const {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

double FiniteSpace::distance(PointIndex a, PointIndex b) const {
    double d = 0.0;
    switch (metric_.base) {
    case BaseMetric::explicit_matrix: d = matrix_[a * size() + b]; break;
    case BaseMetric::euclidean: {
        const double* x = coordinates_.data() + a * dimension_;
        const double* y = coordinates_.data() + b * dimension_;
        double sum = 0.0;
        for (std::size_t i = 0; i < dimension_; ++i) sum += (x[i] - y[i]) * (x[i] - y[i]);
        d = std::sqrt(sum);
        break;
    }
    case BaseMetric::lp: {
        const double* x = coordinates_.data() + a * dimension_;
        const double* y = coordinates_.data() + b * dimension_;
        double sum = 0.0;
        for (std::size_t i = 0; i < dimension_; ++i) sum += std::pow(std::abs(x[i] - y[i]), metric_.p);
        d = metric_.p == 1.0 ? sum : std::pow(sum, 1.0 / metric_.p);
        break;
    }
    }
    if (metric_.exponent == 1.0) return d;
    if (metric_.exponent == 2.0) return d * d;
    return std::pow(d, metric_.exponent);
}

bool FiniteSpace::near(double a, double b) const {
    if (a == b) return true;
    if (tolerance_ == 0.0 || !std::isfinite(a) || !std::isfinite(b)) return false;
    return std::abs(a - b) <= tolerance_ * std::max(std::abs(a), std::abs(b));
}

FiniteSpace FiniteSpace::with_declared_a0(double a0) const {
    if (!(a0 >= 1.0) || !std::isfinite(a0)) throw InputError("declared A0 must be >= 1");
    FiniteSpace copy = *this;
    copy.declared_a0_ = a0;
    return copy;
}

FiniteSpace FiniteSpace::with_weights(std::vector<double> weights) const {
    FiniteSpace copy = *this;
    copy.weights_ = std::move(weights);
    copy.check_weights();
    return copy;
}

// ------------------------------------------------------------------ geometry

namespace {

void require_points(const FiniteSpace& space, std::span<const PointIndex> set) {
    for (PointIndex p : set) space.require_point(p);
}

} // namespace

PointSet ball_members(const FiniteSpace& space, PointIndex center, double radius) {
    space.require_point(center);
    if (!(radius > 0.0)) throw InputError("ball radius must be positive");
    PointSet out;
    for (PointIndex y = 0; y < space.size(); ++y) {
        if (space.less(space.distance(center, y), radius)) out.push_back(y);
    }
    return out;
}

double diameter(const FiniteSpace& space, std::span<const PointIndex> set) {
    if (set.empty()) throw InputError("diameter of an empty set is undefined");
    require_points(space, set);
    double best = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        for (std::size_t j = i + 1; j < set.size(); ++j) {
            best = std::max(best, space.distance(set[i], set[j]));
        }
    }
    return best;
}

double distance_to_set(const FiniteSpace& space, PointIndex x, std::span<const PointIndex> set) {
    space.require_point(x);
    require_points(space, set);
    double best = std::numeric_limits<double>::infinity();
    for (PointIndex y : set) best = std::min(best, space.distance(x, y));
    return best;
}

double set_distance(const FiniteSpace& space, std::span<const PointIndex> a,
                    std::span<const PointIndex> b) {
    if (a.empty() || b.empty()) throw InputError("set distance needs nonempty sets");
    double best = std::numeric_limits<double>::infinity();
    for (PointIndex x : a) best = std::min(best, distance_to_set(space, x, b));
    return best;
}

Extent pairwise_extent(const FiniteSpace& space) {
    Extent e;
    double min_sep = std::numeric_limits<double>::infinity();
    for (PointIndex i = 0; i < space.size(); ++i) {
        for (PointIndex j = i + 1; j < space.size(); ++j) {
            double d = space.distance(i, j);
            e.diameter = std::max(e.diameter, d);
            if (d > 0.0) min_sep = std::min(min_sep, d);
        }
    }
    e.min_separation = std::isfinite(min_sep) ? min_sep : 0.0;
    return e;
}

// ---------------------------------------------------------------- validation

ValidationMode ValidationMode::automatic(std::size_t n, std::uint64_t seed, std::size_t triples) {
    if (n <= kExhaustiveLimit) return exhaustive();
    return sampled(triples, seed);
}

QuasimetricReport validate_quasimetric(const FiniteSpace& space, const ValidationMode& mode) {
    const std::size_t n = space.size();
    if (n < 2) throw InputError("quasi-metric validation needs at least two points");

    QuasimetricReport report;
    report.exhaustive = mode.kind == ValidationMode::Kind::exhaustive;
    const double declared = space.declared_a0();
    constexpr std::size_t kMaxListed = 64;

    auto check_pair = [&](PointIndex a, PointIndex b, double forward) {
        if (!std::isfinite(forward)) {
            throw DataError("non-finite distance between '" + space.id(a) + "' and '" +
                            space.id(b) + "'");
        }
        if ((a == b) != (forward == 0.0) && report.identity.size() < kMaxListed) {
            report.identity.push_back({a, b, forward, forward});
        }
        if (a < b) {
            double backward = space.distance(b, a);
            if (!space.near(forward, backward) && report.asymmetric.size() < kMaxListed) {
                report.asymmetric.push_back({a, b, forward, backward});
            }
        }
    };

    auto visit = [&](PointIndex x, PointIndex y, PointIndex z, double xy, double yz, double xz) {
        double denominator = xy + yz;
        double ratio = 0.0;
        if (denominator > 0.0) {
            ratio = xz / denominator;
        } else if (xz > 0.0) {
            ratio = std::numeric_limits<double>::infinity();
        }
        ++report.triples_scanned;
        if (!report.witness || ratio > report.witness->ratio) report.witness = Triple{x, y, z, ratio};
        if (ratio > declared && !space.near(ratio, declared)) {
            ++report.violation_count;
            if (report.violations.size() < kMaxListed) report.violations.push_back({x, y, z, ratio});
        }
    };

    if (report.exhaustive) {
        std::vector<double> d(n * n);
        for (PointIndex a = 0; a < n; ++a) {
            for (PointIndex b = 0; b < n; ++b) d[a * n + b] = space.distance(a, b);
        }
        for (PointIndex a = 0; a < n; ++a) {
            for (PointIndex b = 0; b < n; ++b) check_pair(a, b, d[a * n + b]);
        }
        for (PointIndex x = 0; x < n; ++x) {
            for (PointIndex y = 0; y < n; ++y) {
                for (PointIndex z = 0; z < n; ++z) {
                    if (x == z) continue;
                    visit(x, y, z, d[x * n + y], d[y * n + z], d[x * n + z]);
                }
            }
        }
    } else {
        std::mt19937_64 rng(mode.seed);
        std::uniform_int_distribution<PointIndex> pick(0, n - 1);
        for (std::size_t i = 0; i < mode.triples; ++i) {
            PointIndex x = pick(rng), y = pick(rng), z = pick(rng);
            if (x == z) continue;
            double xy = space.distance(x, y), yz = space.distance(y, z), xz = space.distance(x, z);
            check_pair(x, y, xy);
            check_pair(y, z, yz);
            check_pair(x, z, xz);
            visit(x, y, z, xy, yz, xz);
        }
    }
    report.a0_emp = report.witness ? report.witness->ratio : 1.0;
    return report;
}

// ------------------------------------------------------------------ doubling

namespace {

// Distances from one point, sorted, with prefix sums of weights.
struct RadialProfile {
    std::vector<double> distances;
    std::vector<double> prefix; // prefix[i] = weight of the i closest points

    RadialProfile(const FiniteSpace& space, PointIndex x) {
        std::vector<std::pair<double, PointIndex>> entries;
        entries.reserve(space.size());
        for (PointIndex y = 0; y < space.size(); ++y) entries.emplace_back(space.distance(x, y), y);
        std::sort(entries.begin(), entries.end());
        distances.reserve(entries.size());
        prefix.assign(1, 0.0);
        for (const auto& [d, y] : entries) {
            distances.push_back(d);
            prefix.push_back(prefix.back() + space.weight(y));
        }
    }

    double ball_measure(const FiniteSpace& space, double radius) const {
        auto it = std::partition_point(distances.begin(), distances.end(),
                                       [&](double d) { return space.less(d, radius); });
        return prefix[static_cast<std::size_t>(it - distances.begin())];
    }
};

void check_grid(std::span<const double> grid) {
    if (grid.empty()) throw InputError("doubling estimate needs a nonempty radius grid");
    for (double r : grid) {
        if (!(r > 0.0) || !std::isfinite(r)) throw InputError("grid radii must be positive and finite");
    }
}

} // namespace

double doubling_ratio(const FiniteSpace& space, PointIndex x, double radius) {
    double inner = space.measure(ball_members(space, x, radius));
    double outer = space.measure(ball_members(space, x, 2.0 * radius));
    return outer / inner;
}

DoublingEstimate estimate_doubling(const FiniteSpace& space, std::span<const double> radius_grid) {
    check_grid(radius_grid);
    DoublingEstimate est;
    est.radius_grid.assign(radius_grid.begin(), radius_grid.end());
    bool first = true;
    for (PointIndex x = 0; x < space.size(); ++x) {
        RadialProfile profile(space, x);
        for (double r : radius_grid) {
            double ratio = profile.ball_measure(space, 2.0 * r) / profile.ball_measure(space, r);
            if (first || ratio > est.a1_emp) {
                est.a1_emp = ratio;
                est.witness_point = x;
                est.witness_radius = r;
                first = false;
            }
        }
    }
    return est;
}

DoublingEstimate estimate_doubling(const FiniteSpace& space) {
    const std::size_t n = space.size();
    if (n == 1) {
        const double unit = 1.0;
        return estimate_doubling(space, std::span<const double>(&unit, 1));
    }
    std::vector<double> all;
    all.reserve(n * (n - 1) / 2);
    for (PointIndex i = 0; i < n; ++i) {
        for (PointIndex j = i + 1; j < n; ++j) all.push_back(space.distance(i, j));
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    DoublingEstimate est;
    est.radius_grid.reserve(2 * all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        est.radius_grid.push_back(all[i]);
        if (i + 1 < all.size()) est.radius_grid.push_back(0.5 * (all[i] + all[i + 1]));
    }

    // mu(B(x, r)) is constant for r in (d_i, d_{i+1}] while mu(B(x, 2r)) only
    // grows, so the supremum over all radii is attained at a distance from x.
    // Every such distance belongs to the grid, hence scanning each point's own
    // distances yields the grid maximum.
    bool first = true;
    for (PointIndex x = 0; x < n; ++x) {
        RadialProfile profile(space, x);
        double previous = -1.0;
        for (double r : profile.distances) {
            if (r == previous || r == 0.0) continue;
            previous = r;
            double ratio = profile.ball_measure(space, 2.0 * r) / profile.ball_measure(space, r);
            if (first || ratio > est.a1_emp) {
                est.a1_emp = ratio;
                est.witness_point = x;
                est.witness_radius = r;
                first = false;
            }
        }
    }
    return est;
}

} // namespace dyadic
