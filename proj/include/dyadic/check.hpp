#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace dyadic {

using Json = nlohmann::ordered_json;

enum class CheckStatus { pass, fail, not_applicable };

std::string_view to_string(CheckStatus status);

// Outcome of one named property check. Failures keep a bounded list of
// witnesses; `violations` counts all of them.
struct CheckResult {
    static constexpr std::size_t kMaxWitnesses = 16;

    std::string name;
    std::string property;
    CheckStatus status = CheckStatus::pass;
    std::size_t violations = 0;
    std::vector<Json> witnesses;
    Json numbers = Json::object();
    std::string note;

    CheckResult() = default;
    CheckResult(std::string name, std::string property)
        : name(std::move(name)), property(std::move(property)) {}

    void fail(Json witness) {
        status = CheckStatus::fail;
        ++violations;
        if (witnesses.size() < kMaxWitnesses) {
            witnesses.push_back(std::move(witness));
        }
    }

    void not_applicable(std::string reason) {
        status = CheckStatus::not_applicable;
        note = std::move(reason);
    }

    bool passed() const { return status == CheckStatus::pass; }
    bool failed() const { return status == CheckStatus::fail; }

    Json to_json() const;
};

} // namespace dyadic
