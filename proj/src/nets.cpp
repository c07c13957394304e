#include "dyadic/nets.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <random>

#include "dyadic/errors.hpp"

namespace dyadic {

std::string NetOrder::tag() const {
    if (kind == Kind::by_id) return "by_id";
    return "shuffle:" + std::to_string(seed);
}

NetOrder NetOrder::parse(std::string_view tag) {
    if (tag == "by_id") return by_id();
    constexpr std::string_view prefix = "shuffle:";
    if (tag.substr(0, prefix.size()) == prefix) {
        const std::string digits(tag.substr(prefix.size()));
        if (!digits.empty() && std::all_of(digits.begin(), digits.end(), ::isdigit)) {
            try {
                return seeded_shuffle(std::stoull(digits));
            } catch (const std::out_of_range&) {
            }
        }
    }
    throw InputError("unknown net order '" + std::string(tag) + "' (expected by_id or shuffle:<seed>)");
}

std::vector<PointIndex> NetOrder::permutation(std::size_t n) const {
    std::vector<PointIndex> perm(n);
    std::iota(perm.begin(), perm.end(), PointIndex{0});
    if (kind == Kind::seeded_shuffle) {
        std::mt19937_64 rng(seed);
        std::shuffle(perm.begin(), perm.end(), rng);
    }
    return perm;
}

Net build_net(const FiniteSpace& space, double separation, const NetOrder& order, int k,
              std::span<const PointIndex> priority) {
    if (!(separation > 0.0)) throw InputError("net separation must be positive");
    Net net;
    net.k = k;
    net.separation = separation;
    net.construction_order = order.tag();

    std::vector<char> seen(space.size(), 0);
    auto admit = [&](PointIndex x) {
        if (seen[x]) return;
        seen[x] = 1;
        for (PointIndex z : net.centers) {
            if (space.less(space.distance(x, z), separation)) return;
        }
        net.centers.push_back(x);
    };
    for (PointIndex x : priority) {
        space.require_point(x);
        admit(x);
    }
    for (PointIndex x : order.permutation(space.size())) admit(x);
    return net;
}

std::vector<Net> build_nets(const FiniteSpace& space, const ScaleLadder& ladder,
                            const NetOrder& order, bool nested) {
    std::vector<Net> nets;
    nets.reserve(static_cast<std::size_t>(ladder.generations()));
    for (int k = ladder.k_min; k <= ladder.k_max; ++k) {
        std::span<const PointIndex> priority;
        if (nested && !nets.empty()) priority = nets.back().centers;
        nets.push_back(build_net(space, ladder.scale(k), order, k, priority));
        if (nested) nets.back().construction_order += "+nested";
    }
    return nets;
}

SeparationVerdict check_maximal_separated(const FiniteSpace& space,
                                          std::span<const PointIndex> subset, double separation) {
    SeparationVerdict v;
    std::vector<char> in_subset(space.size(), 0);
    for (std::size_t i = 0; i < subset.size(); ++i) {
        space.require_point(subset[i]);
        if (in_subset[subset[i]]) {
            return {SeparationVerdict::Kind::separation_violated, subset[i], subset[i], 0.0};
        }
        in_subset[subset[i]] = 1;
        for (std::size_t j = 0; j < i; ++j) {
            const double d = space.distance(subset[j], subset[i]);
            if (space.less(d, separation)) {
                return {SeparationVerdict::Kind::separation_violated, subset[j], subset[i], d};
            }
        }
    }
    for (PointIndex x = 0; x < space.size(); ++x) {
        if (in_subset[x]) continue;
        double nearest = std::numeric_limits<double>::infinity();
        for (PointIndex z : subset) nearest = std::min(nearest, space.distance(x, z));
        if (!space.less(nearest, separation)) {
            return {SeparationVerdict::Kind::not_maximal, x, x, nearest};
        }
    }
    return v;
}

std::size_t packing_count(const FiniteSpace& space, const Net& net, PointIndex x, double factor) {
    space.require_point(x);
    const double radius = factor * net.separation;
    std::size_t count = 0;
    for (PointIndex z : net.centers) {
        if (space.less(space.distance(x, z), radius)) ++count;
    }
    return count;
}

} // namespace dyadic
