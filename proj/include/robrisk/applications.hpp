#pragma once

#include "robrisk/conditional.hpp"

#include <string_view>
#include <vector>

namespace robrisk {

struct PortfolioWeights {
    std::vector<double> w;  // sums to one
};

struct PortfolioResult {
    PortfolioWeights weights;
    double deviation = 0.0;
};

enum class PortfolioMethod {
    Direct,      // budget substituted out, joint minimization over (w_1..w_{n-1}, y)
    Regression,  // equal-weight average regressed on its excess over each asset
};

PortfolioMethod parse_portfolio_method(std::string_view name);

// Minimum-deviation fully invested portfolio. Needs n >= 2; assets that are
// constant shifts of one another make the design singular.
PortfolioResult min_deviation_portfolio(const CoherentRiskMeasure& rho, const ScoreFunction& s,
                                        const std::vector<ScenarioVariable>& assets,
                                        PortfolioMethod method, double tol = 1e-8);

struct HedgeResult {
    double mu = 0.0;
    std::vector<double> w;
    double residual_deviation = 0.0;
};

// Optimal replication of Y by cash plus the instruments.
HedgeResult optimal_hedge(const CoherentRiskMeasure& rho, const ScoreFunction& s, const ScenarioVariable& y,
                          const std::vector<ScenarioVariable>& instruments, double tol = 1e-8,
                          FitMode mode = FitMode::Auto);

} // namespace robrisk
