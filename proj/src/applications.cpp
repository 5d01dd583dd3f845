#include "robrisk/applications.hpp"

#include "robrisk/errors.hpp"

#include <numeric>
#include <string>

namespace robrisk {

PortfolioMethod parse_portfolio_method(std::string_view name) {
    if (name == "direct") return PortfolioMethod::Direct;
    if (name == "regression") return PortfolioMethod::Regression;
    throw ParseError("unknown portfolio method '" + std::string(name) + "' (direct|regression)");
}

PortfolioResult min_deviation_portfolio(const CoherentRiskMeasure& rho, const ScoreFunction& s,
                                        const std::vector<ScenarioVariable>& assets,
                                        PortfolioMethod method, double tol) {
    const std::size_t n = assets.size();
    if (n < 2) throw DomainError("portfolio: at least two assets are required");
    for (const auto& a : assets)
        if (a.size() != assets.front().size()) throw DimensionError("portfolio: asset lengths differ");

    PortfolioResult out;
    if (method == PortfolioMethod::Direct) {
        // sum w_i X_i - y = X_n - (y + sum_{i<n} w_i (X_n - X_i))
        const ScenarioVariable& last = assets.back();
        std::vector<ScenarioVariable> regressors;
        for (std::size_t i = 0; i + 1 < n; ++i) regressors.push_back(last - assets[i]);
        const auto f = fit(rho, s, last, regressors, tol, FitMode::Auto);
        out.weights.w = f.betas;
        out.weights.w.push_back(1.0 - std::accumulate(f.betas.begin(), f.betas.end(), 0.0));
        out.deviation = f.objective;
        return out;
    }

    ScenarioVariable average = assets.front();
    for (std::size_t i = 1; i < n; ++i) average += assets[i];
    average *= 1.0 / static_cast<double>(n);
    // Y - X_1, ..., Y - X_n sum to zero; the last one is dropped (w'_n = 0).
    std::vector<ScenarioVariable> regressors;
    for (std::size_t i = 0; i + 1 < n; ++i) regressors.push_back(average - assets[i]);
    const auto f = fit(rho, s, average, regressors, tol, FitMode::Auto);
    std::vector<double> w_prime = f.betas;
    w_prime.push_back(0.0);
    const double shift = (1.0 - std::accumulate(w_prime.begin(), w_prime.end(), 0.0)) / static_cast<double>(n);
    for (double& w : w_prime) w += shift;
    out.weights.w = std::move(w_prime);
    out.deviation = f.objective;
    return out;
}

HedgeResult optimal_hedge(const CoherentRiskMeasure& rho, const ScoreFunction& s, const ScenarioVariable& y,
                          const std::vector<ScenarioVariable>& instruments, double tol, FitMode mode) {
    const auto f = fit(rho, s, y, instruments, tol, mode);
    return HedgeResult{f.mu_star, f.betas, f.objective};
}

} // namespace robrisk
