#pragma once

#include "robrisk/risk_measures.hpp"
#include "robrisk/scenario.hpp"
#include "robrisk/scores.hpp"

#include <cstdint>
#include <vector>

namespace robrisk {

/// Result of minimizing rho(-S(Y, mu + sum_i beta_i X_i)) over (mu, beta).
struct RegressionFit {
    double mu_star = 0.0;
    std::vector<double> betas;
    double objective = 0.0;     // conditional deviation
    double cd = 1.0;            // 1 - objective / D(Y)
    double foc_residual = 0.0;  // largest coordinate-wise difference-quotient violation
    std::int64_t iterations = 0;
};

enum class FitMode {
    Strict,   // score must be smooth_strictly_convex (unique minimizer)
    Relaxed,  // any score; a minimizer is returned without uniqueness claim
    Auto,     // Strict when the score allows it, Relaxed otherwise
};

// Regressors must share the scenario space of Y. A design whose equilibrated
// Gram matrix [1, X]' diag(p) [1, X] has condition number above 1e12 throws
// SingularDesignError. With no regressors the fit is the unconditional solve.
RegressionFit fit(const CoherentRiskMeasure& rho, const ScoreFunction& s, const ScenarioVariable& y,
                  const std::vector<ScenarioVariable>& regressors, double tol = 1e-8,
                  FitMode mode = FitMode::Strict);

// -(mu* + sum_i beta*_i x_i).
double conditional_risk_row(const RegressionFit& fit, const std::vector<double>& x_row);

// 1 - fit.objective / D(Y); throws DomainError for constant Y.
double cd_metric(const CoherentRiskMeasure& rho, const ScoreFunction& s, const ScenarioVariable& y,
                 const std::vector<ScenarioVariable>& regressors, const RegressionFit& fit);

} // namespace robrisk
