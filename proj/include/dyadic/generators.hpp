#pragma once

#include <string_view>

#include "dyadic/space.hpp"

namespace dyadic {

// Deterministic fixtures with unit weights and ids "0".."n-1":
//   grid:WxH[:spacing]          W*H lattice points, row-major, Euclidean
//   line:N                      0, 1, ..., N-1 on the real line
//   uniform:N:seed              N points uniform in the unit square
//   clustered:N:clusters:seed   N points around `clusters` random centers
//   snowflake(inner,eps)        inner fixture with rho^eps
FiniteSpace generate(std::string_view spec);

} // namespace dyadic
