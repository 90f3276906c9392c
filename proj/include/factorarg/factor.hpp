#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace factorarg {

class FactorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A named discrete random variable with an ordered list of state labels.
///
/// Variables are cheap handles onto shared immutable data. Two handles
/// denote the same variable when their names match; a name match with
/// different state lists is a modelling error and is reported by the
/// factor operations that combine them.
class Variable {
public:
    Variable() = default;
    Variable(std::string name, std::vector<std::string> states);

    const std::string& name() const { return data_->name; }
    const std::vector<std::string>& states() const { return data_->states; }
    std::size_t cardinality() const { return data_->states.size(); }

    /// Index of `label` in the state list; throws FactorError when absent.
    std::size_t state_index(std::string_view label) const;
    bool has_state(std::string_view label) const;

    bool same_as(const Variable& other) const;

    friend bool operator==(const Variable& a, const Variable& b) { return a.same_as(b); }

private:
    struct Data {
        std::string name;
        std::vector<std::string> states;
    };
    std::shared_ptr<const Data> data_;
};

/// Dense nonnegative table over an ordered scope of variables.
/// Values are stored row-major: the last scope variable varies fastest.
class Factor {
public:
    Factor() = default;
    Factor(std::vector<Variable> scope, std::vector<double> values);

    /// Scalar factor over the empty scope.
    static Factor scalar(double value);

    const std::vector<Variable>& scope() const { return scope_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    bool contains(const Variable& v) const;
    /// Position of `v` in the scope, or npos.
    std::size_t position(const Variable& v) const;

    double at(std::span<const std::size_t> assignment) const;
    double operator[](std::size_t flat) const { return values_[flat]; }

    double total() const;
    bool is_zero() const;

    /// Renders an assignment like "A=yes, B=no" for diagnostics.
    std::string describe_assignment(std::size_t flat) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::vector<Variable> scope_;
    std::vector<double> values_;
};

Factor constant_factor(const Variable& var);
Factor indicator_factor(const Variable& var, std::string_view state);

Factor product(const Factor& a, const Factor& b);

/// Entrywise a / b with 0/0 = 0. Requires scope(b) to be a subset of scope(a).
Factor divide(const Factor& a, const Factor& b);

/// Sums out every variable not in `keep`. The result scope follows `keep` order.
Factor marginalize(const Factor& a, std::span<const Variable> keep);

Factor normalize(const Factor& a);

/// Same values laid out over `order`, which must be a permutation of the scope.
Factor reorder(const Factor& a, std::span<const Variable> order);

/// log( a(outcome) / mean of a over the other outcomes ) for a single-variable
/// factor. Returns +inf / -inf when the denominator / numerator vanishes.
double implied_logodds(const Factor& a, std::string_view outcome);
double implied_logodds(const Factor& a, std::size_t outcome_index);

/// Largest absolute implied logodds of a/b over the outcomes of the shared
/// single variable. Outcomes where both factors vanish are skipped; an outcome
/// where only one vanishes makes the distance infinite.
double factor_distance(const Factor& a, const Factor& b);

/// Entrywise comparison after aligning scopes.
bool approx_equal(const Factor& a, const Factor& b, double tol = 1e-12);

} // namespace factorarg
