#pragma once

#include "factorarg/argument.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace factorarg {

struct MiningConfig {
    double threshold = 0.5;                       ///< approximate-independence distance
    std::optional<std::size_t> max_path_length;   ///< in factor-graph edges
    std::optional<std::size_t> complexity_limit;  ///< simple arguments per combination

    /// Threshold 0.5; no caps up to 12 variables, otherwise (7, 3).
    static MiningConfig defaults_for(const DiscreteNetwork& net);
    void validate() const;
};

struct ScoredArgument {
    Argument argument;
    Factor effect;    ///< unnormalized effect on the target
    double strength;  ///< implied logodds of the queried outcome
};

/// Chain arguments along every factor-graph simple path from an observed
/// variable to `target` that does not pass through another observed variable.
/// Sorted by canonical form.
std::vector<Argument> all_simple_arguments(const FactorGraph& graph, std::size_t target,
                                           const EvidenceSet& evidence,
                                           std::optional<std::size_t> max_path_length = std::nullopt);

/// Relevant, approximately independent arguments for `target = outcome`,
/// sorted by decreasing absolute strength.
///
/// Unions of up to `complexity_limit` simple arguments are kept when proper;
/// the maximal ones are then merged pairwise while any two fail pairwise
/// independence. Arguments with no effect on the target are dropped.
std::vector<ScoredArgument> all_local_arguments(const FactorGraph& graph, std::size_t target,
                                                std::size_t outcome, const EvidenceSet& evidence,
                                                const MiningConfig& config);

/// Nodes, edges, premises, target, normalized target effect and strength.
nlohmann::json argument_json(const ScoredArgument& scored, const FactorGraph& graph);

/// Keeps only arguments that are not a subargument of another one (and dedups).
std::vector<Argument> remove_subarguments(std::vector<Argument> args);

} // namespace factorarg
