#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dyadic/constants.hpp"
#include "dyadic/space.hpp"

namespace dyadic {

// Scan order for greedy admission.
struct NetOrder {
    enum class Kind { by_id, seeded_shuffle };
    Kind kind = Kind::by_id;
    std::uint64_t seed = 0;

    static NetOrder by_id() { return {}; }
    static NetOrder seeded_shuffle(std::uint64_t seed) { return {Kind::seeded_shuffle, seed}; }

    // "by_id" or "shuffle:<seed>".
    std::string tag() const;
    static NetOrder parse(std::string_view tag);
    // The permutation of [0, n) this order scans.
    std::vector<PointIndex> permutation(std::size_t n) const;

    bool operator==(const NetOrder&) const = default;
};

// One generation's centers. centers[alpha] is z^k_alpha, in admission order.
struct Net {
    int k = 0;
    double separation = 1.0;
    std::vector<PointIndex> centers;
    std::string construction_order;
};

// Greedy first-fit: admit a point iff its distance to every admitted center
// is >= separation (ties admit). `priority` points are scanned first.
Net build_net(const FiniteSpace& space, double separation, const NetOrder& order, int k = 0,
              std::span<const PointIndex> priority = {});

// One net per generation of the ladder, coarsest first. With `nested`, each
// scan is seeded by the previous generation's centers so that Z_k sits
// inside Z_{k+1}.
std::vector<Net> build_nets(const FiniteSpace& space, const ScaleLadder& ladder,
                            const NetOrder& order, bool nested = false);

struct SeparationVerdict {
    enum class Kind { pass, separation_violated, not_maximal };
    Kind kind = Kind::pass;
    PointIndex first = 0;  // violating pair, or the addable point
    PointIndex second = 0;
    double distance = 0.0;

    bool passed() const { return kind == Kind::pass; }
};

// Fails with the first close pair, else with the first addable point.
SeparationVerdict check_maximal_separated(const FiniteSpace& space,
                                          std::span<const PointIndex> subset, double separation);

// |{ z in net : rho(x, z) < K * separation }|.
std::size_t packing_count(const FiniteSpace& space, const Net& net, PointIndex x, double factor);

} // namespace dyadic
