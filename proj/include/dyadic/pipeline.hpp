#pragma once

#include <memory>
#include <optional>

#include "dyadic/cubes.hpp"
#include "dyadic/nets.hpp"

namespace dyadic {

struct BuildOptions {
    std::optional<double> scale_ratio; // delta; default half its supremum
    std::optional<double> ball_factor; // a0; default half its supremum
    bool relaxed = false;
    NetOrder order;
    bool nested = false;
};

// Constants from the space's declared A0, ladder from its extent, then nets,
// parent links and cubes.
Decomposition decompose(std::shared_ptr<const FiniteSpace> space, const BuildOptions& options = {});

} // namespace dyadic
