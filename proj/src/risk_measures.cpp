#include "robrisk/risk_measures.hpp"

#include "robrisk/errors.hpp"
#include "spec_parsing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

namespace robrisk {

namespace {

// Ascending by value, then by `tie` when given, then by index.
std::vector<std::size_t> ascending_order(const ScenarioVariable& z, std::span<const double> tie = {}) {
    std::vector<std::size_t> order(z.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (z[a] != z[b] || tie.empty()) return z[a] < z[b];
        return tie[a] < tie[b];
    });
    return order;
}

std::vector<double> expected_shortfall_weights(const ScenarioVariable& z, double alpha,
                                               std::span<const double> tie = {}) {
    const auto p = z.space()->probabilities();
    std::vector<double> q(z.size(), 0.0);
    double remaining = alpha;
    for (std::size_t i : ascending_order(z, tie)) {
        if (remaining <= 0.0) break;
        const double take = std::min(p[i], remaining);
        q[i] = take / alpha;
        remaining -= take;
    }
    return q;
}

double semi_deviation(const ScenarioVariable& z, double mean) {
    const auto p = z.space()->probabilities();
    double acc = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double d = std::max(mean - z[i], 0.0);
        acc += p[i] * d * d;
    }
    return std::sqrt(acc);
}

std::size_t argmin_lowest_index(const ScenarioVariable& z) {
    const auto v = z.values();
    return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

} // namespace

CoherentRiskMeasure CoherentRiskMeasure::expected_loss() { return {Kind::ExpectedLoss, 0.0}; }

CoherentRiskMeasure CoherentRiskMeasure::expected_shortfall(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("es: alpha must lie in (0,1)");
    return {Kind::ExpectedShortfall, alpha};
}

CoherentRiskMeasure CoherentRiskMeasure::expectile_var(double alpha) {
    if (!(alpha > 0.0 && alpha <= 0.5)) throw DomainError("evar: alpha must lie in (0,0.5] to be coherent");
    return {Kind::ExpectileVaR, alpha};
}

CoherentRiskMeasure CoherentRiskMeasure::mean_semi_deviation(double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("msd: beta must lie in [0,1]");
    return {Kind::MeanSemiDeviation, beta};
}

CoherentRiskMeasure CoherentRiskMeasure::maximum_loss() { return {Kind::MaximumLoss, 0.0}; }

double expectile_value(const ScenarioVariable& z, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("expectile: alpha must lie in (0,1)");
    const auto p = z.space()->probabilities();
    const auto order = ascending_order(z);
    const std::size_t n = order.size();

    // Prefix sums over the sorted outcomes: mass and first moment of {Z <= v_k}.
    std::vector<double> mass(n), moment(n);
    double m = 0.0, s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        m += p[order[k]];
        s += p[order[k]] * z[order[k]];
        mass[k] = m;
        moment[k] = s;
    }
    const double total_mass = mass.back();
    const double total_moment = moment.back();

    // On the piece where {Z <= x} = first k+1 sorted outcomes the expectile
    // equation is A - B x with the coefficients below.
    const auto coeff = [&](std::size_t k) {
        const double below_mass = mass[k], below_moment = moment[k];
        const double above_mass = total_mass - below_mass, above_moment = total_moment - below_moment;
        const double a = alpha * above_moment + (1.0 - alpha) * below_moment;
        const double b = alpha * above_mass + (1.0 - alpha) * below_mass;
        return std::pair{a, b};
    };
    const auto g_at = [&](std::size_t k) {
        const auto [a, b] = coeff(k);
        return a - b * z[order[k]];
    };

    // g is non-increasing in x: find the last sorted value with g >= 0.
    std::size_t lo = 0, hi = n - 1;
    if (g_at(hi) >= 0.0) return z[order[hi]];
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        (g_at(mid) >= 0.0 ? lo : hi) = mid;
    }
    const auto [a, b] = coeff(lo);
    const double root = a / b;
    return std::clamp(root, z[order[lo]], z[order[hi]]);
}

double CoherentRiskMeasure::evaluate(const ScenarioVariable& z) const {
    switch (kind_) {
    case Kind::ExpectedLoss:
        return -expectation(z);
    case Kind::ExpectedShortfall:
        return -expectation(z, MeasureWeights(expected_shortfall_weights(z, param_)));
    case Kind::ExpectileVaR:
        return -expectile_value(z, param_);
    case Kind::MeanSemiDeviation: {
        const double mean = expectation(z);
        return -mean + param_ * semi_deviation(z, mean);
    }
    case Kind::MaximumLoss:
        return -ess_bounds(z).first;
    }
    return 0.0;
}

MeasureWeights CoherentRiskMeasure::dual_maximizer(const ScenarioVariable& z) const {
    const auto p = z.space()->probabilities();
    const std::size_t n = z.size();
    switch (kind_) {
    case Kind::ExpectedLoss:
        return MeasureWeights::of(*z.space());
    case Kind::ExpectedShortfall:
        return MeasureWeights(expected_shortfall_weights(z, param_));
    case Kind::ExpectileVaR: {
        // density proportional to alpha above the expectile, 1-alpha below
        const double e = expectile_value(z, param_);
        std::vector<double> q(n);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            q[i] = p[i] * (z[i] > e ? param_ : 1.0 - param_);
            total += q[i];
        }
        for (double& v : q) v /= total;
        return MeasureWeights(std::move(q));
    }
    case Kind::MeanSemiDeviation: {
        const double mean = expectation(z);
        const double sd = semi_deviation(z, mean);
        if (sd == 0.0 || param_ == 0.0) return MeasureWeights::of(*z.space());
        // q = p (1 + beta (V - E V)) with V = (Z - EZ)^- / ||(Z - EZ)^-||_2
        std::vector<double> v(n);
        double ev = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = std::max(mean - z[i], 0.0) / sd;
            ev += p[i] * v[i];
        }
        std::vector<double> q(n);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            q[i] = std::max(p[i] * (1.0 + param_ * (v[i] - ev)), 0.0);
            total += q[i];
        }
        for (double& w : q) w /= total;
        return MeasureWeights(std::move(q));
    }
    case Kind::MaximumLoss: {
        std::vector<double> q(n, 0.0);
        q[argmin_lowest_index(z)] = 1.0;
        return MeasureWeights(std::move(q));
    }
    }
    throw CapabilityError("dual_maximizer: unsupported risk measure");
}

MeasureWeights CoherentRiskMeasure::dual_maximizer(const ScenarioVariable& z,
                                                   std::span<const double> direction) const {
    if (direction.size() != z.size())
        throw DimensionError("dual_maximizer: direction length differs from the variable");
    switch (kind_) {
    case Kind::ExpectedShortfall:
        return MeasureWeights(expected_shortfall_weights(z, param_, direction));
    case Kind::MaximumLoss: {
        std::vector<double> q(z.size(), 0.0);
        q[ascending_order(z, direction).front()] = 1.0;
        return MeasureWeights(std::move(q));
    }
    default:
        return dual_maximizer(z);
    }
}

std::string CoherentRiskMeasure::spec() const {
    using detail::format_param;
    switch (kind_) {
    case Kind::ExpectedLoss: return "el";
    case Kind::ExpectedShortfall: return "es:" + format_param(param_);
    case Kind::ExpectileVaR: return "evar:" + format_param(param_);
    case Kind::MeanSemiDeviation: return "msd:" + format_param(param_);
    case Kind::MaximumLoss: return "ml";
    }
    return {};
}

CoherentRiskMeasure parse_risk(std::string_view spec) {
    const auto parts = detail::split_spec(spec);
    const auto need = [&](const char* name) {
        if (!parts.param) throw ParseError(std::string("risk measure '") + name + "' needs a parameter, e.g. " + name + ":0.25");
        return *parts.param;
    };
    const auto none = [&](const char* name) {
        if (parts.param) throw ParseError(std::string("risk measure '") + name + "' takes no parameter");
    };
    if (parts.name == "el") { none("el"); return CoherentRiskMeasure::expected_loss(); }
    if (parts.name == "ml") { none("ml"); return CoherentRiskMeasure::maximum_loss(); }
    if (parts.name == "es") return CoherentRiskMeasure::expected_shortfall(need("es"));
    if (parts.name == "evar") return CoherentRiskMeasure::expectile_var(need("evar"));
    if (parts.name == "msd") return CoherentRiskMeasure::mean_semi_deviation(need("msd"));
    throw ParseError("unknown risk measure '" + std::string(spec) + "'; available:\n" + risk_catalog());
}

std::string risk_catalog() {
    return "  el                 expected loss E[-X]\n"
           "  es:<a>             expected shortfall, a in (0,1)\n"
           "  evar:<a>           expectile value at risk, a in (0,0.5]\n"
           "  msd:<b>            mean plus semi-deviation, b in [0,1]\n"
           "  ml                 maximum loss -min X\n";
}

} // namespace robrisk
