#include "factorarg/explanation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace factorarg {

std::string_view to_string(StepKind kind) {
    switch (kind) {
    case StepKind::Causal: return "causal";
    case StepKind::Evidential: return "evidential";
    case StepKind::Intercausal: return "intercausal";
    }
    return "";
}

std::string_view to_string(ExplanationMode mode) {
    switch (mode) {
    case ExplanationMode::Direct: return "direct";
    case ExplanationMode::Contrastive: return "contrastive";
    case ExplanationMode::Overview: return "overview";
    }
    return "";
}

ExplanationMode parse_mode(std::string_view name) {
    if (name == "direct") return ExplanationMode::Direct;
    if (name == "contrastive") return ExplanationMode::Contrastive;
    if (name == "overview") return ExplanationMode::Overview;
    throw std::invalid_argument("unknown explanation mode '" + std::string(name) + "'");
}

std::string_view strength_qualifier(double logodds) {
    const double a = std::abs(logodds);
    if (a < kModerateFrom) return "weak";
    if (a < kStrongFrom) return "moderate";
    return "strong";
}

std::vector<std::size_t> favored_outcomes(const Factor& effect) {
    double best = 0.0;
    for (std::size_t i = 0; i < effect.size(); ++i) best = std::max(best, effect[i]);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < effect.size(); ++i)
        if (effect[i] >= kFavoredFraction * best) out.push_back(i);
    return out;
}

std::string join_clauses(const std::vector<std::string>& clauses) {
    std::string out;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        if (i > 0) out += i + 1 == clauses.size() ? " and " : ", ";
        out += clauses[i];
    }
    return out;
}

StepKind step_kind(const FactorGraph& graph, std::size_t rule, std::span<const std::size_t> premises,
                   std::size_t conclusion) {
    const std::size_t child = graph.factor_owner(rule);
    if (conclusion == child) return StepKind::Causal;
    if (premises.size() == 1 && premises[0] == child) return StepKind::Evidential;
    return StepKind::Intercausal;
}

StepClassification classify_step(const FactorGraph& graph, const Step& step) {
    StepClassification c;
    c.kind = step_kind(graph, step.rule, step.premises, step.conclusion);
    c.favored_outcomes = favored_outcomes(step.effect);
    c.step_logodds = implied_logodds(step.effect, c.favored_outcomes.front());
    return c;
}

namespace {

std::map<std::size_t, std::size_t> node_depths(const Argument& arg) {
    std::map<std::size_t, std::size_t> depth;
    for (auto n : arg.topological_order()) {
        std::size_t d = 0;
        for (auto p : arg.predecessors(n)) d = std::max(d, depth.at(p) + 1);
        depth[n] = d;
    }
    return depth;
}

// Sort key for listing variables: depth, then observation order, then name.
struct VariableOrder {
    const FactorGraph& graph;
    std::map<std::size_t, std::size_t> depth;
    std::map<std::string, std::size_t, std::less<>> rank;

    VariableOrder(const Argument& arg, const FactorGraph& g, const std::vector<std::string>& order)
        : graph(g), depth(node_depths(arg)) {
        for (std::size_t i = 0; i < order.size(); ++i) rank.emplace(order[i], i);
    }

    auto key(std::size_t v) const {
        const auto& name = graph.network().variable(v).name();
        auto it = rank.find(name);
        return std::make_tuple(depth.at(v), it == rank.end() ? rank.size() : it->second, name);
    }
    bool operator()(std::size_t a, std::size_t b) const { return key(a) < key(b); }
};

std::string state_clause(const FactorGraph& graph, const DescriptionDictionary& dict, std::size_t v,
                         const std::vector<std::size_t>& states) {
    const auto& var = graph.network().variable(v);
    std::string out;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (i) out += " or ";
        out += dict.clause(var.name(), var.states()[states[i]]);
    }
    return out;
}

// Observed premises are described by their observation, derived nodes by
// the states their effect favours.
std::string node_clause(const Argument& arg, const FactorGraph& graph, const ArgumentSteps& all,
                        const DescriptionDictionary& dict, std::size_t v) {
    if (auto p = arg.premises().find(v); p != arg.premises().end())
        return state_clause(graph, dict, v, {p->second});
    return state_clause(graph, dict, v, favored_outcomes(all.effects.at(v)));
}

std::vector<std::string> premise_clauses(const Argument& arg, const FactorGraph& graph, const ArgumentSteps& all,
                                         const DescriptionDictionary& dict, std::span<const std::size_t> vars) {
    std::vector<std::string> out;
    for (auto v : vars) out.push_back(node_clause(arg, graph, all, dict, v));
    return out;
}

std::string qualified(std::string_view q) { return " (" + std::string(q) + " inference)."; }

nlohmann::json step_meta(const FactorGraph& graph, const Step& step, const StepClassification& c) {
    const auto& net = graph.network();
    nlohmann::json premises = nlohmann::json::array();
    for (auto p : step.premises) premises.push_back(net.variable(p).name());
    nlohmann::json favored = nlohmann::json::array();
    for (auto s : c.favored_outcomes) favored.push_back(net.variable(step.conclusion).states()[s]);
    nlohmann::json j;
    j["rule"] = graph.node_label(step.rule);
    j["premises"] = premises;
    j["conclusion"] = net.variable(step.conclusion).name();
    j["kind"] = to_string(c.kind);
    j["favored"] = favored;
    j["logodds"] = std::isfinite(c.step_logodds) ? nlohmann::json(c.step_logodds) : nlohmann::json(nullptr);
    j["qualifier"] = strength_qualifier(c.step_logodds);
    return j;
}

} // namespace

ArgumentSteps argument_steps(const Argument& arg, const FactorGraph& graph, const ExplanationOptions& opts) {
    ArgumentSteps out;
    out.effects = argument_effect(arg, graph);
    const VariableOrder order(arg, graph, opts.evidence_order);
    const auto& net = graph.network();

    for (auto f : arg.nodes()) {
        if (!graph.is_factor(f)) continue;
        auto prem = arg.predecessors(f);
        std::sort(prem.begin(), prem.end(), order);
        std::vector<Factor> ins;
        for (auto p : prem) ins.push_back(out.effects.at(p));
        for (auto c : arg.successors(f))
            out.steps.push_back(Step{f, prem, c, step_effect(graph.factor(f), ins, net.variable(c))});
    }
    std::sort(out.steps.begin(), out.steps.end(), [&](const Step& a, const Step& b) {
        if (a.conclusion != b.conclusion) return order(a.conclusion, b.conclusion);
        const auto n = std::min(a.premises.size(), b.premises.size());
        for (std::size_t i = 0; i < n; ++i)
            if (a.premises[i] != b.premises[i]) return order(a.premises[i], b.premises[i]);
        if (a.premises.size() != b.premises.size()) return a.premises.size() < b.premises.size();
        return graph.node_label(a.rule) < graph.node_label(b.rule);
    });
    return out;
}

std::vector<ExplanationLine> explain_step(const Argument& arg, const FactorGraph& graph, const ArgumentSteps& all,
                                          const Step& step, const DescriptionDictionary& dict,
                                          const ExplanationOptions& opts) {
    const auto c = classify_step(graph, step);
    const auto meta = step_meta(graph, step, c);
    const auto conclusion = state_clause(graph, dict, step.conclusion, c.favored_outcomes);
    const auto q = strength_qualifier(c.step_logodds);
    const std::size_t child = graph.factor_owner(step.rule);
    const bool child_premise = std::find(step.premises.begin(), step.premises.end(), child) != step.premises.end();

    if (opts.mode == ExplanationMode::Contrastive && c.kind == StepKind::Intercausal && child_premise) {
        const auto& net = graph.network();
        const Factor only_child[] = {all.effects.at(child)};
        const Factor cf = step_effect(graph.factor(step.rule), only_child, net.variable(step.conclusion));
        const auto cf_favored = favored_outcomes(cf);
        const double before = implied_logodds(cf, cf_favored.front());
        const double after = implied_logodds(step.effect, cf_favored.front());
        std::vector<std::size_t> coparents;
        for (auto p : step.premises)
            if (p != child) coparents.push_back(p);

        ExplanationLine usual{"Usually, if " + node_clause(arg, graph, all, dict, child) + " then " +
                                  state_clause(graph, dict, step.conclusion, cf_favored) + ".",
                              "counterfactual", meta};
        usual.meta["counterfactual_logodds"] = std::isfinite(before) ? nlohmann::json(before) : nlohmann::json(nullptr);
        ExplanationLine since{"Since " + join_clauses(premise_clauses(arg, graph, all, dict, coparents)) +
                                  ", we can be " + (after > before ? "more" : "less") +
                                  " certain than this is the case" + qualified(q),
                              "step", meta};
        return {std::move(usual), std::move(since)};
    }

    const std::string verb = c.kind == StepKind::Causal ? " causes that " : " is evidence that ";
    return {ExplanationLine{"That " + join_clauses(premise_clauses(arg, graph, all, dict, step.premises)) + verb +
                                conclusion + qualified(q),
                            "step", meta}};
}

std::vector<ExplanationLine> explain_lines(const Argument& arg, const FactorGraph& graph,
                                           const DescriptionDictionary& dict, const ExplanationOptions& opts) {
    const auto all = argument_steps(arg, graph, opts);
    const VariableOrder order(arg, graph, opts.evidence_order);
    std::vector<std::size_t> observed;
    for (const auto& [v, s] : arg.premises()) observed.push_back(v);
    std::sort(observed.begin(), observed.end(), order);
    const auto observations = join_clauses(premise_clauses(arg, graph, all, dict, observed));

    const auto& target_effect = all.effects.at(arg.target());
    const auto target_favored = favored_outcomes(target_effect);
    const double target_logodds = implied_logodds(target_effect, target_favored.front());

    if (opts.mode == ExplanationMode::Overview) {
        ExplanationLine line{"Since " + observations + ", we infer that " +
                                 state_clause(graph, dict, arg.target(), target_favored) +
                                 qualified(strength_qualifier(target_logodds)),
                             "overview", nlohmann::json::object()};
        line.meta["target"] = graph.network().variable(arg.target()).name();
        line.meta["logodds"] = std::isfinite(target_logodds) ? nlohmann::json(target_logodds) : nlohmann::json(nullptr);
        return {std::move(line)};
    }

    std::vector<ExplanationLine> out;
    out.push_back({"We have observed that " + observations + ".", "observation", nlohmann::json::object()});
    for (std::size_t i = 0; i < all.steps.size(); ++i) {
        for (auto& l : explain_step(arg, graph, all, all.steps[i], dict, opts)) out.push_back(std::move(l));
        const auto y = all.steps[i].conclusion;
        const bool last_of_group = i + 1 == all.steps.size() || all.steps[i + 1].conclusion != y;
        const bool multi = i > 0 && all.steps[i - 1].conclusion == y;
        if (!last_of_group || !multi) continue;
        const auto& eff = all.effects.at(y);
        const auto fav = favored_outcomes(eff);
        const double lo = implied_logodds(eff, fav.front());
        ExplanationLine cum{"All in all, this is evidence that " + state_clause(graph, dict, y, fav) +
                                qualified(strength_qualifier(lo)),
                            "cumulative", nlohmann::json::object()};
        cum.meta["conclusion"] = graph.network().variable(y).name();
        cum.meta["logodds"] = std::isfinite(lo) ? nlohmann::json(lo) : nlohmann::json(nullptr);
        out.push_back(std::move(cum));
    }
    return out;
}

std::string explain_argument(const Argument& arg, const FactorGraph& graph, const DescriptionDictionary& dict,
                             const ExplanationOptions& opts) {
    std::string out;
    for (const auto& l : explain_lines(arg, graph, dict, opts)) {
        if (!out.empty()) out += '\n';
        out += l.text;
    }
    return out;
}

nlohmann::json explanation_json(const std::vector<ExplanationLine>& lines) {
    auto arr = nlohmann::json::array();
    for (const auto& l : lines) {
        nlohmann::json j = l.meta;
        j["text"] = l.text;
        j["role"] = l.role;
        arr.push_back(std::move(j));
    }
    return arr;
}

} // namespace factorarg
