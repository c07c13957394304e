#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dyadic {

// Malformed arguments, unknown point ids, unparsable files.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Well-formed input whose values break a structural invariant
// (non-finite distance, non-positive weight, asymmetric matrix, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A parameter lies outside the admissible range of the constant ledger.
class ConstraintError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two cubes of one generation share a point; construction cannot continue.
class MaterializationError : public std::runtime_error {
public:
    MaterializationError(const std::string& what, int generation, std::size_t first,
                         std::size_t second, std::size_t point)
        : std::runtime_error(what), generation(generation), first(first), second(second),
          point(point) {}

    int generation;
    std::size_t first;
    std::size_t second;
    std::size_t point;
};

// An internal invariant failed, e.g. a net that is not maximal left a node
// without a parent candidate.
class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dyadic
