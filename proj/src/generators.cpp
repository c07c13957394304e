#include "dyadic/generators.hpp"

#include <charconv>
#include <random>
#include <string>
#include <vector>

#include "dyadic/errors.hpp"

namespace dyadic {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

[[noreturn]] void malformed(std::string_view spec, std::string_view why) {
    throw InputError("malformed generator '" + std::string(spec) + "': " + std::string(why));
}

std::uint64_t parse_count(std::string_view spec, std::string_view text, std::string_view what) {
    text = trim(text);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        malformed(spec, std::string(what) + " must be a non-negative integer");
    }
    return v;
}

double parse_real(std::string_view spec, std::string_view text, std::string_view what) {
    const std::string s(trim(text));
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        malformed(spec, std::string(what) + " must be a number");
    }
    if (used != s.size() || !std::isfinite(v)) malformed(spec, std::string(what) + " must be a number");
    return v;
}

FiniteSpace planar(std::vector<double> coords) {
    const std::size_t n = coords.size() / 2;
    return FiniteSpace::from_coordinates(sequential_ids(n), 2, std::move(coords),
                                         MetricSpec::euclidean(), std::vector<double>(n, 1.0));
}

std::size_t positive(std::string_view spec, std::uint64_t v, std::string_view what) {
    if (v == 0) malformed(spec, std::string(what) + " must be positive");
    if (v > 1'000'000) malformed(spec, std::string(what) + " is too large");
    return static_cast<std::size_t>(v);
}

} // namespace

FiniteSpace generate(std::string_view spec) {
    spec = trim(spec);
    if (spec.starts_with("snowflake(")) {
        if (!spec.ends_with(")")) malformed(spec, "missing ')'");
        const auto inner = spec.substr(10, spec.size() - 11);
        const auto comma = inner.rfind(',');
        if (comma == std::string_view::npos) malformed(spec, "expected snowflake(inner,eps)");
        const FiniteSpace base = generate(inner.substr(0, comma));
        const double eps = parse_real(spec, inner.substr(comma + 1), "exponent");
        const MetricSpec metric = base.metric().snowflaked(eps);
        std::vector<double> coords;
        for (PointIndex i = 0; i < base.size(); ++i) {
            const auto c = base.coordinates(i);
            coords.insert(coords.end(), c.begin(), c.end());
        }
        return FiniteSpace::from_coordinates(base.ids(), base.dimension(), std::move(coords), metric,
                                             std::vector<double>(base.weights().begin(),
                                                                 base.weights().end()));
    }

    const auto parts = split(spec, ':');
    const auto kind = parts.front();
    if (kind == "grid") {
        if (parts.size() < 2 || parts.size() > 3) malformed(spec, "expected grid:WxH[:spacing]");
        const auto dims = split(parts[1], 'x');
        if (dims.size() != 2) malformed(spec, "expected WxH");
        const std::size_t w = positive(spec, parse_count(spec, dims[0], "width"), "width");
        const std::size_t h = positive(spec, parse_count(spec, dims[1], "height"), "height");
        const double spacing = parts.size() == 3 ? parse_real(spec, parts[2], "spacing") : 1.0;
        if (!(spacing > 0.0)) malformed(spec, "spacing must be positive");
        if (w * h > 1'000'000) malformed(spec, "grid is too large");
        std::vector<double> coords;
        coords.reserve(2 * w * h);
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                coords.push_back(static_cast<double>(x) * spacing);
                coords.push_back(static_cast<double>(y) * spacing);
            }
        }
        return planar(std::move(coords));
    }
    if (kind == "line") {
        if (parts.size() != 2) malformed(spec, "expected line:N");
        const std::size_t n = positive(spec, parse_count(spec, parts[1], "N"), "N");
        std::vector<double> coords(n);
        for (std::size_t i = 0; i < n; ++i) coords[i] = static_cast<double>(i);
        return FiniteSpace::from_coordinates(sequential_ids(n), 1, std::move(coords),
                                             MetricSpec::euclidean(), std::vector<double>(n, 1.0));
    }
    if (kind == "uniform") {
        if (parts.size() != 3) malformed(spec, "expected uniform:N:seed");
        const std::size_t n = positive(spec, parse_count(spec, parts[1], "N"), "N");
        std::mt19937_64 rng(parse_count(spec, parts[2], "seed"));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> coords(2 * n);
        for (auto& v : coords) v = unit(rng);
        return planar(std::move(coords));
    }
    if (kind == "clustered") {
        if (parts.size() != 4) malformed(spec, "expected clustered:N:clusters:seed");
        const std::size_t n = positive(spec, parse_count(spec, parts[1], "N"), "N");
        const std::size_t m = positive(spec, parse_count(spec, parts[2], "clusters"), "clusters");
        std::mt19937_64 rng(parse_count(spec, parts[3], "seed"));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> spread(0.0, 0.03);
        std::vector<double> centers(2 * m);
        for (auto& v : centers) v = unit(rng);
        std::vector<double> coords(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = i % m;
            coords[2 * i] = centers[2 * c] + spread(rng);
            coords[2 * i + 1] = centers[2 * c + 1] + spread(rng);
        }
        return planar(std::move(coords));
    }
    malformed(spec, "unknown generator (grid, line, uniform, clustered, snowflake)");
}

} // namespace dyadic
