#pragma once

#include "robrisk/scenario.hpp"

#include <span>
#include <string>
#include <string_view>

namespace robrisk {

/// Coherent risk measure on a finite scenario space.
///
/// Every kind is evaluated exactly and exposes a worst-case measure from its
/// dual set, i.e. weights q with rho(Z) = E_q[-Z].
class CoherentRiskMeasure {
public:
    enum class Kind { ExpectedLoss, ExpectedShortfall, ExpectileVaR, MeanSemiDeviation, MaximumLoss };

    static CoherentRiskMeasure expected_loss();
    static CoherentRiskMeasure expected_shortfall(double alpha);   // alpha in (0,1)
    static CoherentRiskMeasure expectile_var(double alpha);        // alpha in (0,0.5]
    static CoherentRiskMeasure mean_semi_deviation(double beta);   // beta in [0,1]
    static CoherentRiskMeasure maximum_loss();

    Kind kind() const noexcept { return kind_; }
    double parameter() const noexcept { return param_; }
    bool has_dual_maximizer() const noexcept { return true; }

    double evaluate(const ScenarioVariable& z) const;

    // Weights q in the dual set attaining rho(Z) = E_q[-Z]. Ties are broken
    // deterministically by (value, outcome index).
    MeasureWeights dual_maximizer(const ScenarioVariable& z) const;

    // Worst-case measure at Z + eps D for eps -> 0+, which is worst-case at Z
    // as well. ES and ML break ties in Z by D; the other kinds either have a
    // unique maximizer or fall back to the plain tie rule.
    MeasureWeights dual_maximizer(const ScenarioVariable& z, std::span<const double> direction) const;

    std::string spec() const;

    friend bool operator==(const CoherentRiskMeasure&, const CoherentRiskMeasure&) = default;

private:
    CoherentRiskMeasure(Kind kind, double param) : kind_(kind), param_(param) {}

    Kind kind_;
    double param_;
};

// The alpha-expectile of Z under its base measure: unique root of
// alpha E[(Z-x)+] - (1-alpha) E[(x-Z)+].
double expectile_value(const ScenarioVariable& z, double alpha);

// Parses `el`, `es:0.05`, `evar:0.25`, `msd:0.5`, `ml`.
CoherentRiskMeasure parse_risk(std::string_view spec);

std::string risk_catalog();

} // namespace robrisk
