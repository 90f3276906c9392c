#pragma once

#include "factorarg/argument.hpp"
#include "factorarg/descriptions.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace factorarg {

enum class StepKind { Causal, Evidential, Intercausal };
enum class ExplanationMode { Direct, Contrastive, Overview };

std::string_view to_string(StepKind kind);
std::string_view to_string(ExplanationMode mode);
/// Throws std::invalid_argument on an unknown name.
ExplanationMode parse_mode(std::string_view name);

inline constexpr double kModerateFrom = 0.5;
inline constexpr double kStrongFrom = 1.5;
inline constexpr double kFavoredFraction = 0.8;

/// "weak", "moderate" or "strong" from the magnitude of a logodds.
std::string_view strength_qualifier(double logodds);

/// States whose effect is at least kFavoredFraction of the largest one, in
/// declaration order.
std::vector<std::size_t> favored_outcomes(const Factor& effect);

/// One rule application: `rule` (a factor node) draws `conclusion` from `premises`.
struct Step {
    std::size_t rule = 0;
    std::vector<std::size_t> premises;
    std::size_t conclusion = 0;
    Factor effect;
};

struct StepClassification {
    StepKind kind = StepKind::Causal;
    std::vector<std::size_t> favored_outcomes;
    double step_logodds = 0.0;  ///< implied logodds of the first favored state
};

/// Purely structural: causal when the conclusion is the child of the rule's
/// CPT; evidential when the only premise is that child; intercausal otherwise.
StepKind step_kind(const FactorGraph& graph, std::size_t rule, std::span<const std::size_t> premises,
                   std::size_t conclusion);

StepClassification classify_step(const FactorGraph& graph, const Step& step);

/// Steps of `arg` in rendering order: conclusions by depth then name, and
/// steps sharing a conclusion by their ordered premises.
struct ArgumentSteps {
    std::vector<Step> steps;
    EffectTable effects;
};

struct ExplanationOptions {
    ExplanationMode mode = ExplanationMode::Direct;
    /// Observation order used to list premises that sit at the same depth;
    /// variables not listed follow in name order.
    std::vector<std::string> evidence_order;
};

struct ExplanationLine {
    std::string text;
    std::string role;  ///< observation, step, counterfactual, cumulative or overview
    nlohmann::json meta = nlohmann::json::object();
};

ArgumentSteps argument_steps(const Argument& arg, const FactorGraph& graph, const ExplanationOptions& opts = {});

/// Text for one step; contrastive mode renders intercausal steps with a
/// child premise as two lines.
std::vector<ExplanationLine> explain_step(const Argument& arg, const FactorGraph& graph, const ArgumentSteps& all,
                                          const Step& step, const DescriptionDictionary& dict,
                                          const ExplanationOptions& opts);

std::vector<ExplanationLine> explain_lines(const Argument& arg, const FactorGraph& graph,
                                           const DescriptionDictionary& dict, const ExplanationOptions& opts = {});

/// Lines joined with '\n', no trailing newline.
std::string explain_argument(const Argument& arg, const FactorGraph& graph, const DescriptionDictionary& dict,
                             const ExplanationOptions& opts = {});

nlohmann::json explanation_json(const std::vector<ExplanationLine>& lines);

/// "A", "A and B", "A, B and C".
std::string join_clauses(const std::vector<std::string>& clauses);

} // namespace factorarg
