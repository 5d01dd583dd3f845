#pragma once

#include <cstddef>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace robrisk {

// Tolerance on |sum(p) - 1| for probability and measure weight vectors.
inline constexpr double kProbabilityTolerance = 1e-12;

/// Finite outcome set with strictly positive base probabilities.
///
/// Construction validates the vector and renormalizes it when the sum is
/// off by at most kProbabilityTolerance; larger drift is rejected. Every
/// other measure on the same outcomes is a MeasureWeights vector, which is
/// automatically absolutely continuous with respect to this one.
class FiniteScenarioSpace {
public:
    explicit FiniteScenarioSpace(std::vector<double> probabilities);

    static std::shared_ptr<const FiniteScenarioSpace> uniform(std::size_t n);
    static std::shared_ptr<const FiniteScenarioSpace>
    make(std::vector<double> probabilities);

    std::size_t size() const noexcept { return p_.size(); }
    double probability(std::size_t i) const { return p_.at(i); }
    std::span<const double> probabilities() const noexcept { return p_; }
    double min_probability() const noexcept;

    // True when all probabilities agree with 1/n within kProbabilityTolerance.
    bool is_uniform() const noexcept;

private:
    std::vector<double> p_;
};

using SpacePtr = std::shared_ptr<const FiniteScenarioSpace>;

/// Probability weights q on the outcomes of some space (q_i >= 0, sum 1).
class MeasureWeights {
public:
    explicit MeasureWeights(std::vector<double> weights);

    // The base measure of a space as weights.
    static MeasureWeights of(const FiniteScenarioSpace& space);

    std::size_t size() const noexcept { return q_.size(); }
    double operator[](std::size_t i) const { return q_[i]; }
    std::span<const double> values() const noexcept { return q_; }

private:
    std::vector<double> q_;
};

/// A random variable on a finite space: one finite real per outcome.
class ScenarioVariable {
public:
    ScenarioVariable(SpacePtr space, std::vector<double> values);

    // Constant variable c on every outcome.
    static ScenarioVariable constant(SpacePtr space, double c);

    const SpacePtr& space() const noexcept { return space_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    bool is_constant() const noexcept;
    double range() const noexcept;

    ScenarioVariable operator-() const;
    ScenarioVariable& operator+=(const ScenarioVariable& other);
    ScenarioVariable& operator-=(const ScenarioVariable& other);
    ScenarioVariable& operator+=(double c);
    ScenarioVariable& operator*=(double c);

private:
    SpacePtr space_;
    std::vector<double> values_;
};

ScenarioVariable operator+(ScenarioVariable lhs, const ScenarioVariable& rhs);
ScenarioVariable operator-(ScenarioVariable lhs, const ScenarioVariable& rhs);
ScenarioVariable operator+(ScenarioVariable lhs, double c);
ScenarioVariable operator+(double c, ScenarioVariable rhs);
ScenarioVariable operator-(ScenarioVariable lhs, double c);
ScenarioVariable operator*(double c, ScenarioVariable rhs);

// E_q[X] = sum_i q_i X_i.
double expectation(const ScenarioVariable& x, const MeasureWeights& q);
// E_P[X] under the variable's own base measure.
double expectation(const ScenarioVariable& x);

// Left quantile inf{x : F_q(x) >= alpha}; equal values are merged before
// cumulating. alpha must lie in (0,1).
double left_quantile(const ScenarioVariable& x, const MeasureWeights& q, double alpha);
double left_quantile(const ScenarioVariable& x, double alpha);

// (essinf, esssup); on a finite space with p_i > 0 these are min and max.
std::pair<double, double> ess_bounds(const ScenarioVariable& x);

/// Named columns sharing one scenario space, as read from CSV.
struct ScenarioTable {
    SpacePtr space;
    std::vector<std::string> names;
    std::vector<ScenarioVariable> columns;

    const ScenarioVariable& column(const std::string& name) const;
    std::size_t index_of(const std::string& name) const;
};

// CSV ingestion: header row, one row per outcome. An optional first column
// named `prob` carries probabilities; without it the weights are uniform.
ScenarioTable read_scenario_csv(std::istream& in);
ScenarioTable read_scenario_csv_file(const std::string& path);

} // namespace robrisk
