#pragma once

#include "factorarg/inference.hpp"
#include "factorarg/mining.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace factorarg {

struct QuerySpec {
    std::size_t id = 0;
    EvidenceSet evidence;
    std::vector<std::string> evidence_order;  ///< order in which variables were drawn
    std::size_t target = 0;
    std::size_t outcome = 0;
};

/// Per query: target uniform; evidence size k uniform in {1..min(5, |V|-1)};
/// evidence variables uniform without replacement; states and outcome uniform.
/// Query i uses its own generator seeded from (seed, i).
std::vector<QuerySpec> sample_queries(const DiscreteNetwork& net, std::size_t n, std::uint64_t seed);

/// prior_odds times the implied odds ratio of every argument's effect at `outcome`.
double approximate_posterior_odds(double prior_odds, std::span<const ScoredArgument> arguments,
                                  std::size_t outcome);
double approximate_posterior_odds(const FactorGraph& graph, std::span<const ScoredArgument> arguments,
                                  std::size_t target, std::size_t outcome);

double odds_to_probability(double odds);

struct QueryRecord {
    QuerySpec query;
    bool ok = false;
    std::string error;
    double exact_logodds = 0.0;
    double approx_logodds = 0.0;
    double baseline_logodds = 0.0;
    double exact_p = 0.0;
    double approx_p = 0.0;
    double baseline_p = 0.0;
    std::size_t n_arguments = 0;
    bool converged = false;
};

struct ErrorSummary {
    double q05 = 0.0, median = 0.0, q95 = 0.0, mean = 0.0;
    std::size_t count = 0;     ///< finite values summarized
    std::size_t infinite = 0;  ///< excluded because infinite
};

struct MethodSummary {
    ErrorSummary logodds;
    ErrorSummary probability;
    double exact_match = 0.0;  ///< share of queries with probability error < 1e-6
};

struct EvalReport {
    std::vector<QueryRecord> records;
    MethodSummary argument;
    MethodSummary baseline;
    std::size_t failed = 0;
};

struct StudyOptions {
    std::size_t n = 200;
    std::uint64_t seed = 42;
    MiningConfig mining;
    MessagePassingOptions message_passing;
    unsigned threads = 0;  ///< 0 picks the hardware concurrency
};

/// Linear interpolation between order statistics; `sorted` ascending, non-empty.
double quantile(std::span<const double> sorted, double p);

ErrorSummary summarize_errors(std::vector<double> errors);

/// Absolute logodds difference; equal infinities give 0, unequal ones +inf.
double logodds_error(double a, double b);

EvalReport run_study(const FactorGraph& graph, const StudyOptions& opts);

/// RFC 4180 CSV, one row per query, header first.
std::string report_csv(const EvalReport& report, const FactorGraph& graph);

nlohmann::json report_summary(const EvalReport& report, const StudyOptions& opts, const FactorGraph& graph);

} // namespace factorarg
