#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "dyadic/cubes.hpp"

namespace dyadic {

// Deliberate corruptions of a materialized decomposition, for exercising
// the verifier.
enum class FaultKind { reparent, delete_member, inflate_ball, break_separation, zero_weight };

std::string_view to_string(FaultKind kind);
FaultKind parse_fault(std::string_view name);

struct InjectedFault {
    FaultKind kind;
    std::string description; // what was changed, with ids
    Decomposition dec;
};

// Picks the target with a generator seeded by `seed`. Throws InputError
// when the decomposition has no suitable target (e.g. reparenting needs a
// generation whose parent generation has two nodes).
InjectedFault inject_fault(const Decomposition& dec, FaultKind kind, std::uint64_t seed);

} // namespace dyadic
