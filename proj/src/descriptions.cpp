#include "factorarg/descriptions.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <stdexcept>

namespace factorarg {

std::string DescriptionDictionary::clause(std::string_view variable, std::string_view state) const {
    auto it = clauses_.find(std::pair<std::string, std::string>(variable, state));
    if (it != clauses_.end()) return it->second;
    return std::string(variable) + " is " + std::string(state);
}

std::string DescriptionDictionary::phrase(std::string_view variable) const {
    auto it = phrases_.find(variable);
    return it != phrases_.end() ? it->second : std::string(variable);
}

bool DescriptionDictionary::has_clause(std::string_view variable, std::string_view state) const {
    return clauses_.count(std::pair<std::string, std::string>(variable, state)) > 0;
}

void DescriptionDictionary::set_clause(std::string variable, std::string state, std::string text) {
    clauses_[{std::move(variable), std::move(state)}] = std::move(text);
}

void DescriptionDictionary::set_phrase(std::string variable, std::string text) {
    phrases_[std::move(variable)] = std::move(text);
}

std::vector<std::string> DescriptionDictionary::unknown_entries(const DiscreteNetwork& net) const {
    std::vector<std::string> out;
    for (const auto& [var, _] : phrases_)
        if (!net.find(var)) out.push_back(var);
    for (const auto& [key, _] : clauses_) {
        auto idx = net.find(key.first);
        if (!idx) {
            if (!phrases_.count(key.first)) out.push_back(key.first);
        } else if (!net.variable(*idx).has_state(key.second)) {
            out.push_back(key.first + "=" + key.second);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

DescriptionDictionary load_descriptions(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("description dictionary: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("description dictionary must be a JSON object");

    DescriptionDictionary dict;
    for (const auto& [var, entry] : doc.items()) {
        if (!entry.is_object())
            throw std::invalid_argument("description entry for '" + var + "' must be an object");
        if (auto p = entry.find("phrase"); p != entry.end()) {
            if (!p->is_string()) throw std::invalid_argument("phrase for '" + var + "' must be a string");
            dict.set_phrase(var, p->get<std::string>());
        }
        if (auto o = entry.find("outcomes"); o != entry.end()) {
            if (!o->is_object()) throw std::invalid_argument("outcomes for '" + var + "' must be an object");
            for (const auto& [state, text] : o->items()) {
                if (!text.is_string())
                    throw std::invalid_argument("outcome '" + var + "=" + state + "' must be a string");
                dict.set_clause(var, state, text.get<std::string>());
            }
        }
    }
    return dict;
}

} // namespace factorarg
