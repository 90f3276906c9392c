#pragma once

#include "factorarg/network.hpp"

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace factorarg {

/// Human-readable phrases for variables and their outcomes.
///
/// Sidecar JSON layout:
///   { "lung": { "phrase": "lung cancer",
///               "outcomes": { "yes": "the patient has lung cancer" } } }
/// Lookups that miss fall back to "<VAR> is <STATE>" / the variable name.
class DescriptionDictionary {
public:
    std::string clause(std::string_view variable, std::string_view state) const;
    std::string phrase(std::string_view variable) const;

    bool has_clause(std::string_view variable, std::string_view state) const;

    void set_clause(std::string variable, std::string state, std::string text);
    void set_phrase(std::string variable, std::string text);

    /// Variables named in the dictionary but absent from `net`, and outcome
    /// keys that are not states of their variable.
    std::vector<std::string> unknown_entries(const DiscreteNetwork& net) const;

private:
    std::map<std::string, std::string, std::less<>> phrases_;
    std::map<std::pair<std::string, std::string>, std::string, std::less<>> clauses_;
};

/// Throws std::invalid_argument on malformed JSON or a non-conforming layout.
DescriptionDictionary load_descriptions(std::string_view json_text);

} // namespace factorarg
