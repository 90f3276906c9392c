#pragma once

#include "factorarg/network.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace factorarg {

/// Evidence that assigns zero probability somewhere: a belief or the
/// evidence likelihood vanished.
class ContradictionError : public std::runtime_error {
public:
    ContradictionError(const std::string& variable, const std::string& msg)
        : std::runtime_error(msg), variable_(variable) {}
    const std::string& variable() const { return variable_; }

private:
    std::string variable_;
};

/// Potentials and in-flight messages of one message passing run.
/// `inbox[x][k]` holds the message sent to node x by `graph.neighbors(x)[k]`;
/// its scope is the variable shared by the two nodes.
struct MessageState {
    const FactorGraph* graph = nullptr;
    std::vector<Factor> potentials;
    std::vector<std::vector<Factor>> inbox;
};

struct BeliefTable {
    std::vector<Factor> beliefs;  ///< normalized posterior per variable index
    bool converged = false;
    std::size_t iterations = 0;
    double last_change = 0.0;

    const Factor& belief(std::size_t variable) const { return beliefs.at(variable); }
};

struct MessagePassingOptions {
    std::size_t max_iters = 200;
    double tol = 1e-8;
    bool normalize_messages = true;
};

MessageState init_potentials(const FactorGraph& graph, const EvidenceSet& evidence);

/// Synchronous flooding schedule: every message is recomputed from the
/// previous sweep, nodes visited in index order. Stops when the largest
/// entry change is below `tol` or after `max_iters` sweeps; in the latter
/// case the beliefs are returned with `converged == false`.
/// Throws ContradictionError when a belief has zero mass.
BeliefTable run_message_passing(MessageState& state, const MessagePassingOptions& opts = {});

BeliefTable posterior_beliefs(const FactorGraph& graph, const EvidenceSet& evidence,
                              const MessagePassingOptions& opts = {});

/// Exact posterior over `target` by summing the full joint. Refuses joints
/// larger than `max_joint` assignments.
Factor enumerate_posterior(const DiscreteNetwork& net, const EvidenceSet& evidence,
                           std::string_view target, std::size_t max_joint = 10'000'000);

/// beta(t_o) / sum of beta over the other outcomes; +inf if that sum is zero.
double odds_of(const Factor& distribution, std::size_t outcome);

/// Odds of `outcome` under the no-evidence message passing marginal of `target`.
double prior_odds(const FactorGraph& graph, std::string_view target, std::string_view outcome);

} // namespace factorarg
