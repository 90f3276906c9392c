#include "factorarg/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace factorarg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMatch = 1e-6;

std::string number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

nlohmann::json summary_json(const ErrorSummary& s) {
    return {{"q05", s.q05}, {"median", s.median}, {"q95", s.q95}, {"mean", s.mean},
            {"count", s.count}, {"infinite", s.infinite}};
}

nlohmann::json method_json(const MethodSummary& m) {
    return {{"logodds_error", summary_json(m.logodds)},
            {"probability_error", summary_json(m.probability)},
            {"exact_match", m.exact_match}};
}

} // namespace

std::vector<QuerySpec> sample_queries(const DiscreteNetwork& net, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (net.size() < 2) throw std::invalid_argument("network needs at least two variables");
    const std::size_t V = net.size();
    const std::size_t kmax = std::min<std::size_t>(5, V - 1);
    std::vector<QuerySpec> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
        std::mt19937_64 rng(sq);
        auto uniform = [&](std::size_t lo, std::size_t hi) {
            return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
        };
        QuerySpec q;
        q.id = i;
        q.target = uniform(0, V - 1);
        const std::size_t k = uniform(1, kmax);
        std::vector<std::size_t> pool;
        for (std::size_t v = 0; v < V; ++v)
            if (v != q.target) pool.push_back(v);
        // partial Fisher-Yates
        for (std::size_t j = 0; j < k; ++j) {
            std::swap(pool[j], pool[uniform(j, pool.size() - 1)]);
            const auto& var = net.variable(pool[j]);
            q.evidence[var.name()] = var.states()[uniform(0, var.cardinality() - 1)];
            q.evidence_order.push_back(var.name());
        }
        q.outcome = uniform(0, net.variable(q.target).cardinality() - 1);
        out.push_back(std::move(q));
    }
    return out;
}

double approximate_posterior_odds(double prior_odds, std::span<const ScoredArgument> arguments,
                                  std::size_t outcome) {
    double odds = prior_odds;
    for (const auto& a : arguments) odds *= std::exp(implied_logodds(a.effect, outcome));
    // 0 * inf from opposing certain arguments has no meaningful value
    return std::isnan(odds) ? kInf : odds;
}

double approximate_posterior_odds(const FactorGraph& graph, std::span<const ScoredArgument> arguments,
                                  std::size_t target, std::size_t outcome) {
    const auto prior = posterior_beliefs(graph, {});
    return approximate_posterior_odds(odds_of(prior.belief(target), outcome), arguments, outcome);
}

double odds_to_probability(double odds) {
    if (std::isinf(odds)) return 1.0;
    return odds / (1.0 + odds);
}

double quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

ErrorSummary summarize_errors(std::vector<double> errors) {
    ErrorSummary s;
    std::vector<double> finite;
    for (double e : errors) {
        if (std::isfinite(e)) finite.push_back(e);
        else ++s.infinite;
    }
    s.count = finite.size();
    if (finite.empty()) return s;
    std::sort(finite.begin(), finite.end());
    s.q05 = quantile(finite, 0.05);
    s.median = quantile(finite, 0.5);
    s.q95 = quantile(finite, 0.95);
    double sum = 0.0;
    for (double e : finite) sum += e;
    s.mean = sum / static_cast<double>(finite.size());
    return s;
}

double logodds_error(double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return a == b ? 0.0 : kInf;
    return std::abs(a - b);
}

EvalReport run_study(const FactorGraph& graph, const StudyOptions& opts) {
    const auto& net = graph.network();
    opts.mining.validate();
    const auto queries = sample_queries(net, opts.n, opts.seed);
    const auto prior = posterior_beliefs(graph, {}, opts.message_passing);

    EvalReport report;
    report.records.resize(queries.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < queries.size(); i = next++) {
            QueryRecord r;
            r.query = queries[i];
            const auto& q = r.query;
            try {
                const auto post = posterior_beliefs(graph, q.evidence, opts.message_passing);
                const auto args = all_local_arguments(graph, q.target, q.outcome, q.evidence, opts.mining);
                const double exact = odds_of(post.belief(q.target), q.outcome);
                const double base = odds_of(prior.belief(q.target), q.outcome);
                const double approx = approximate_posterior_odds(base, args, q.outcome);
                r.exact_logodds = std::log(exact);
                r.baseline_logodds = std::log(base);
                r.approx_logodds = std::log(approx);
                r.exact_p = post.belief(q.target)[q.outcome];
                r.baseline_p = prior.belief(q.target)[q.outcome];
                r.approx_p = odds_to_probability(approx);
                r.n_arguments = args.size();
                r.converged = post.converged;
                r.ok = true;
            } catch (const std::exception& e) {
                r.error = e.what();
            }
            report.records[i] = std::move(r);
        }
    };
    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, queries.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<double> alo, ap, blo, bp;
    std::size_t amatch = 0, bmatch = 0, ok = 0;
    for (const auto& r : report.records) {
        if (!r.ok) {
            ++report.failed;
            continue;
        }
        ++ok;
        alo.push_back(logodds_error(r.approx_logodds, r.exact_logodds));
        blo.push_back(logodds_error(r.baseline_logodds, r.exact_logodds));
        ap.push_back(std::abs(r.approx_p - r.exact_p));
        bp.push_back(std::abs(r.baseline_p - r.exact_p));
        amatch += ap.back() < kMatch;
        bmatch += bp.back() < kMatch;
    }
    report.argument = {summarize_errors(alo), summarize_errors(ap), ok ? double(amatch) / double(ok) : 0.0};
    report.baseline = {summarize_errors(blo), summarize_errors(bp), ok ? double(bmatch) / double(ok) : 0.0};
    return report;
}

std::string report_csv(const EvalReport& report, const FactorGraph& graph) {
    const auto& net = graph.network();
    std::ostringstream os;
    os << "query_id,target,outcome,evidence,exact_logodds,approx_logodds,baseline_logodds,exact_p,approx_p,"
          "n_arguments,converged,error\r\n";
    for (const auto& r : report.records) {
        const auto& q = r.query;
        nlohmann::json ev = nlohmann::json::object();
        for (const auto& [k, v] : q.evidence) ev[k] = v;
        const auto& t = net.variable(q.target);
        os << q.id << ',' << csv_field(t.name()) << ',' << csv_field(t.states()[q.outcome]) << ','
           << csv_field(ev.dump()) << ',';
        if (r.ok) {
            os << number(r.exact_logodds) << ',' << number(r.approx_logodds) << ',' << number(r.baseline_logodds)
               << ',' << number(r.exact_p) << ',' << number(r.approx_p) << ',' << r.n_arguments << ','
               << (r.converged ? "true" : "false") << ",";
        } else {
            os << ",,,,,,," << csv_field(r.error);
        }
        os << "\r\n";
    }
    return os.str();
}

nlohmann::json report_summary(const EvalReport& report, const StudyOptions& opts, const FactorGraph& graph) {
    nlohmann::json cfg;
    cfg["threshold"] = opts.mining.threshold;
    cfg["max_path_length"] = opts.mining.max_path_length ? nlohmann::json(*opts.mining.max_path_length) : nlohmann::json(nullptr);
    cfg["complexity_limit"] = opts.mining.complexity_limit ? nlohmann::json(*opts.mining.complexity_limit) : nlohmann::json(nullptr);
    nlohmann::json j;
    j["network"] = graph.network().name();
    j["n"] = opts.n;
    j["seed"] = opts.seed;
    j["sampling"] = "target uniform; evidence size uniform in 1..min(5, V-1); evidence variables uniform "
                    "without replacement; states and outcome uniform";
    j["match_tolerance"] = kMatch;
    j["mining"] = cfg;
    j["failed"] = report.failed;
    std::size_t unconverged = 0;
    for (const auto& r : report.records) unconverged += r.ok && !r.converged;
    j["unconverged"] = unconverged;
    j["methods"] = {{"arguments", method_json(report.argument)}, {"baseline", method_json(report.baseline)}};
    return j;
}

} // namespace factorarg
