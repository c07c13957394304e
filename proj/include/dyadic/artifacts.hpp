#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "dyadic/check.hpp"
#include "dyadic/cubes.hpp"
#include "dyadic/verify.hpp"

namespace dyadic {

// Header `id,x1,...,xd[,weight]`; weight defaults to 1.
FiniteSpace read_csv(const std::filesystem::path& path, const MetricSpec& metric,
                     std::optional<double> declared_a0 = std::nullopt);

// First line n, then n rows of n reals. Ids are "0".."n-1"; weights come from
// an optional `id weight` file, else 1.
FiniteSpace read_matrix(const std::filesystem::path& path, double declared_a0,
                        const std::optional<std::filesystem::path>& weights = std::nullopt,
                        double exponent = 1.0);

// %.17g: reloads reproduce the same double.
std::string format_double(double v);

// What produced a decomposition; stored as manifest.json next to the dumps.
struct BuildManifest {
    std::string source;  // generator spec or input path
    std::string a0_mode; // "declared", "estimate" or "value"
    std::optional<std::uint64_t> seed;
    bool nested = false;
    std::string order = "by_id";
    std::string fault; // description of an injected fault, if any

    Json to_json(const Decomposition& dec) const;
};

// Writes manifest.json, ledger.{json,txt}, the space (space.csv or
// space.matrix + weights.txt), nets.txt, tree.{dot,txt}, cubes.txt and
// members.txt into dir.
void write_artifacts(const Decomposition& dec, const BuildManifest& manifest,
                     const std::filesystem::path& dir);

void write_report(const VerificationReport& report, const std::filesystem::path& dir);

struct LoadedArtifacts {
    Decomposition dec;
    Json manifest;
};

// Rebuilds a decomposition exactly as dumped; cube records are taken as
// stored so that the verifier sees any tampering. Missing or malformed
// files raise InputError.
LoadedArtifacts load_artifacts(const std::filesystem::path& dir);

} // namespace dyadic
