#pragma once

#include "robrisk/risk_measures.hpp"
#include "robrisk/scenario.hpp"
#include "robrisk/scores.hpp"

#include <cstdint>

namespace robrisk {

/// Minimizer interval and value of y -> rho(-S(X, y)).
struct SolveResult {
    double d_value = 0.0;    // minimum value (deviation)
    double argmin_lo = 0.0;  // leftmost minimizer
    double argmin_hi = 0.0;  // rightmost minimizer
    double r_value = 0.0;    // -argmin_lo
    double tol_achieved = 0.0;
    std::int64_t evaluations = 0;
};

// g(y) = rho(-S(X, y)).
double robust_objective(const CoherentRiskMeasure& rho, const ScoreFunction& s,
                        const ScenarioVariable& x, double y);

// Exact minimization of g. Endpoints are located to adjacent doubles by
// bisecting on the sign of the one-sided derivatives E_Q*[dS/dy], Q* the
// worst-case measure of rho at -S(X, y). The result is then certified with
// difference quotients of step max(tol, 1e-9 * range(X)); a failed
// certificate throws ContractError.
SolveResult solve(const CoherentRiskMeasure& rho, const ScoreFunction& s,
                  const ScenarioVariable& x, double tol = 1e-8);

// Grid scan of g over [min X - range/10, max X + range/10]. Uses objective
// values only. The minimum value is refined by golden-section search inside
// the grid cells next to the grid minimum.
SolveResult brute_force_oracle(const CoherentRiskMeasure& rho, const ScoreFunction& s,
                               const ScenarioVariable& x, double grid_step);

// -R/D when R < 0 < D, +inf when R <= 0 and D = 0, 0 otherwise.
double acceptability_index(const CoherentRiskMeasure& rho, const ScoreFunction& s,
                           const ScenarioVariable& x);

struct MinimaxReport {
    double d_value = 0.0;        // from solve
    double extreme_max = 0.0;    // max of the inner minimum over enumerated extreme points
    double sampled_max = 0.0;    // max over extreme points, P, random mixtures and ascent
    double upper_bound = 0.0;    // certified bound on the supremum from the ascent
    std::int64_t measures_tried = 0;
    bool passed = false;
};

// Compares D(X) with sup over the dual set of min_y E_Q[S(X, y)]. Supported
// for EL and for ES(alpha) on uniform spaces with n <= 8 and alpha*n an
// integer; anything else throws DomainError. Passes when the sampled maximum
// is within `tolerance` of D and never exceeds it.
MinimaxReport minimax_report(const CoherentRiskMeasure& rho, const ScoreFunction& s,
                             const ScenarioVariable& x, int n_extreme_samples,
                             double tolerance = 1e-4, std::uint64_t seed = 1);

bool minimax_check(const CoherentRiskMeasure& rho, const ScoreFunction& s,
                   const ScenarioVariable& x, int n_extreme_samples, double tolerance = 1e-4);

} // namespace robrisk
