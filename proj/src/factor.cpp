#include "factorarg/factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace factorarg {

Variable::Variable(std::string name, std::vector<std::string> states)
    : data_(std::make_shared<const Data>(Data{std::move(name), std::move(states)})) {
    if (data_->states.size() < 2)
        throw FactorError("variable '" + data_->name + "' needs at least two states");
    for (std::size_t i = 0; i < data_->states.size(); ++i)
        for (std::size_t j = i + 1; j < data_->states.size(); ++j)
            if (data_->states[i] == data_->states[j])
                throw FactorError("variable '" + data_->name + "' repeats state '" +
                                  data_->states[i] + "'");
}

std::size_t Variable::state_index(std::string_view label) const {
    const auto& s = states();
    auto it = std::find(s.begin(), s.end(), label);
    if (it == s.end())
        throw FactorError("variable '" + name() + "' has no state '" + std::string(label) + "'");
    return static_cast<std::size_t>(it - s.begin());
}

bool Variable::has_state(std::string_view label) const {
    const auto& s = states();
    return std::find(s.begin(), s.end(), label) != s.end();
}

bool Variable::same_as(const Variable& other) const {
    if (data_ == other.data_) return true;
    if (!data_ || !other.data_) return false;
    return data_->name == other.data_->name && data_->states == other.data_->states;
}

namespace {

std::size_t table_size(const std::vector<Variable>& scope) {
    std::size_t n = 1;
    for (const auto& v : scope) n *= v.cardinality();
    return n;
}

std::vector<std::size_t> strides_of(const std::vector<Variable>& scope) {
    std::vector<std::size_t> s(scope.size(), 1);
    for (std::size_t i = scope.size(); i-- > 1;) s[i - 1] = s[i] * scope[i].cardinality();
    return s;
}

// Position of a variable with the same name, checking the state lists agree.
std::size_t find_checked(const std::vector<Variable>& scope, const Variable& v) {
    for (std::size_t i = 0; i < scope.size(); ++i) {
        if (scope[i].name() != v.name()) continue;
        if (!scope[i].same_as(v))
            throw FactorError("variable '" + v.name() + "' appears with mismatched state lists");
        return i;
    }
    return Factor::npos;
}

// Walks every assignment of `scope` in row-major order while maintaining
// flat offsets into up to two other tables.
template <class Fn>
void for_each_assignment(const std::vector<Variable>& scope,
                         const std::vector<std::size_t>& stride_a,
                         const std::vector<std::size_t>& stride_b, Fn&& fn) {
    const std::size_t n = scope.size();
    std::vector<std::size_t> counter(n, 0);
    std::size_t ia = 0, ib = 0;
    const std::size_t total = table_size(scope);
    for (std::size_t flat = 0; flat < total; ++flat) {
        fn(flat, ia, ib);
        for (std::size_t k = n; k-- > 0;) {
            if (++counter[k] < scope[k].cardinality()) {
                ia += stride_a[k];
                ib += stride_b[k];
                break;
            }
            ia -= stride_a[k] * (scope[k].cardinality() - 1);
            ib -= stride_b[k] * (scope[k].cardinality() - 1);
            counter[k] = 0;
        }
    }
}

// Stride of each variable of `outer` inside `inner` (0 if absent).
std::vector<std::size_t> projected_strides(const std::vector<Variable>& outer,
                                           const std::vector<Variable>& inner) {
    auto inner_strides = strides_of(inner);
    std::vector<std::size_t> s(outer.size(), 0);
    for (std::size_t i = 0; i < outer.size(); ++i) {
        auto p = find_checked(inner, outer[i]);
        if (p != Factor::npos) s[i] = inner_strides[p];
    }
    return s;
}

} // namespace

Factor::Factor(std::vector<Variable> scope, std::vector<double> values)
    : scope_(std::move(scope)), values_(std::move(values)) {
    for (std::size_t i = 0; i < scope_.size(); ++i)
        for (std::size_t j = i + 1; j < scope_.size(); ++j)
            if (scope_[i].name() == scope_[j].name())
                throw FactorError("variable '" + scope_[i].name() + "' repeated in factor scope");
    if (values_.size() != table_size(scope_))
        throw FactorError("factor table has " + std::to_string(values_.size()) +
                          " entries, scope requires " + std::to_string(table_size(scope_)));
    for (double v : values_)
        if (!(v >= 0.0) || std::isinf(v))
            throw FactorError("factor entries must be finite and nonnegative");
}

Factor Factor::scalar(double value) { return Factor({}, {value}); }

bool Factor::contains(const Variable& v) const { return position(v) != npos; }

std::size_t Factor::position(const Variable& v) const {
    for (std::size_t i = 0; i < scope_.size(); ++i)
        if (scope_[i].name() == v.name()) return i;
    return npos;
}

double Factor::at(std::span<const std::size_t> assignment) const {
    if (assignment.size() != scope_.size()) throw FactorError("assignment arity mismatch");
    std::size_t flat = 0;
    for (std::size_t i = 0; i < scope_.size(); ++i) {
        if (assignment[i] >= scope_[i].cardinality()) throw FactorError("state index out of range");
        flat = flat * scope_[i].cardinality() + assignment[i];
    }
    return values_[flat];
}

double Factor::total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

bool Factor::is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

std::string Factor::describe_assignment(std::size_t flat) const {
    std::vector<std::size_t> idx(scope_.size());
    for (std::size_t k = scope_.size(); k-- > 0;) {
        idx[k] = flat % scope_[k].cardinality();
        flat /= scope_[k].cardinality();
    }
    std::ostringstream os;
    for (std::size_t k = 0; k < scope_.size(); ++k) {
        if (k) os << ", ";
        os << scope_[k].name() << '=' << scope_[k].states()[idx[k]];
    }
    return os.str();
}

Factor constant_factor(const Variable& var) {
    return Factor({var}, std::vector<double>(var.cardinality(), 1.0));
}

Factor indicator_factor(const Variable& var, std::string_view state) {
    std::vector<double> v(var.cardinality(), 0.0);
    v[var.state_index(state)] = 1.0;
    return Factor({var}, std::move(v));
}

Factor product(const Factor& a, const Factor& b) {
    std::vector<Variable> scope = a.scope();
    for (const auto& v : b.scope())
        if (find_checked(a.scope(), v) == Factor::npos) scope.push_back(v);
    auto sa = projected_strides(scope, a.scope());
    auto sb = projected_strides(scope, b.scope());
    std::vector<double> out(table_size(scope));
    auto av = a.values();
    auto bv = b.values();
    for_each_assignment(scope, sa, sb, [&](std::size_t flat, std::size_t ia, std::size_t ib) {
        out[flat] = av[ia] * bv[ib];
    });
    return Factor(std::move(scope), std::move(out));
}

Factor divide(const Factor& a, const Factor& b) {
    for (const auto& v : b.scope())
        if (find_checked(a.scope(), v) == Factor::npos)
            throw FactorError("divide: '" + v.name() + "' is not in the numerator scope");
    auto sb = projected_strides(a.scope(), b.scope());
    std::vector<std::size_t> unit(a.scope().size(), 0);
    std::vector<double> out(a.size());
    auto av = a.values();
    auto bv = b.values();
    for_each_assignment(a.scope(), unit, sb, [&](std::size_t flat, std::size_t, std::size_t ib) {
        const double num = av[flat];
        const double den = bv[ib];
        if (den == 0.0) {
            if (num != 0.0)
                throw FactorError("divide: positive value over zero at " + a.describe_assignment(flat));
            out[flat] = 0.0;
        } else {
            out[flat] = num / den;
        }
    });
    return Factor(a.scope(), std::move(out));
}

Factor marginalize(const Factor& a, std::span<const Variable> keep) {
    std::vector<Variable> scope(keep.begin(), keep.end());
    for (const auto& v : scope)
        if (find_checked(a.scope(), v) == Factor::npos)
            throw FactorError("marginalize: '" + v.name() + "' is not in the factor scope");
    auto st = projected_strides(a.scope(), scope);
    std::vector<std::size_t> unit(a.scope().size(), 0);
    std::vector<double> out(table_size(scope), 0.0);
    auto av = a.values();
    for_each_assignment(a.scope(), unit, st, [&](std::size_t flat, std::size_t, std::size_t it) {
        out[it] += av[flat];
    });
    return Factor(std::move(scope), std::move(out));
}

Factor normalize(const Factor& a) {
    const double z = a.total();
    if (!(z > 0.0)) throw FactorError("cannot normalize a factor with zero total mass");
    std::vector<double> out(a.values().begin(), a.values().end());
    for (double& v : out) v /= z;
    return Factor(a.scope(), std::move(out));
}

Factor reorder(const Factor& a, std::span<const Variable> order) {
    if (order.size() != a.scope().size()) throw FactorError("reorder: not a permutation of the scope");
    return marginalize(a, order);
}

double implied_logodds(const Factor& a, std::size_t outcome_index) {
    if (a.scope().size() != 1) throw FactorError("implied logodds needs a single-variable factor");
    const std::size_t n = a.size();
    if (outcome_index >= n) throw FactorError("outcome index out of range");
    double rest = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (i != outcome_index) rest += a[i];
    rest /= static_cast<double>(n - 1);
    const double num = a[outcome_index];
    if (num == 0.0 && rest == 0.0) throw FactorError("implied logodds of an all-zero factor");
    if (rest == 0.0) return std::numeric_limits<double>::infinity();
    if (num == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(num / rest);
}

double implied_logodds(const Factor& a, std::string_view outcome) {
    if (a.scope().size() != 1) throw FactorError("implied logodds needs a single-variable factor");
    return implied_logodds(a, a.scope()[0].state_index(outcome));
}

double factor_distance(const Factor& a, const Factor& b) {
    if (a.scope().size() != 1 || b.scope().size() != 1 || !a.scope()[0].same_as(b.scope()[0]))
        throw FactorError("factor distance needs two factors over the same single variable");
    std::vector<double> ratio;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i], y = b[i];
        if (x == 0.0 && y == 0.0) continue;
        if (x == 0.0 || y == 0.0) return std::numeric_limits<double>::infinity();
        ratio.push_back(x / y);
    }
    if (ratio.size() < 2) return 0.0;
    double worst = 0.0;
    const double sum = std::accumulate(ratio.begin(), ratio.end(), 0.0);
    for (double r : ratio) {
        const double rest = (sum - r) / static_cast<double>(ratio.size() - 1);
        worst = std::max(worst, std::abs(std::log(r / rest)));
    }
    return worst;
}

bool approx_equal(const Factor& a, const Factor& b, double tol) {
    if (a.scope().size() != b.scope().size()) return false;
    for (const auto& v : a.scope())
        if (!b.contains(v)) return false;
    Factor bb = reorder(b, a.scope());
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - bb[i]) > tol) return false;
    return true;
}

} // namespace factorarg
