#include "robrisk/scores.hpp"

#include "robrisk/errors.hpp"
#include "spec_parsing.hpp"

#include <algorithm>
#include <cmath>

namespace robrisk {

namespace {

void require_open_unit(double a, const char* what) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError(std::string(what) + ": parameter must lie in (0,1)");
}

void require_positive(double a, const char* what) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError(std::string(what) + ": parameter must be > 0");
}

double checked(double v) {
    if (!std::isfinite(v)) throw DomainError("score value is not finite (overflow)");
    return v;
}

// e^{-t} + t - 1 without cancellation near t = 0.
double linex_core(double t) {
    if (std::abs(t) < 1e-3) {
        const double t2 = t * t;
        return t2 * (0.5 - t / 6.0 + t2 / 24.0 - t2 * t / 120.0 + t2 * t2 / 720.0);
    }
    return std::expm1(-t) + t;
}

} // namespace

ScoreFunction ScoreFunction::squared() { return {Kind::Squared, 0.0, false, true, true, true}; }

ScoreFunction ScoreFunction::pinball(double alpha) {
    require_open_unit(alpha, "pinball");
    return {Kind::Pinball, alpha, true, false, false, false};
}

ScoreFunction ScoreFunction::absolute() { return {Kind::Absolute, 0.0, true, false, false, false}; }

ScoreFunction ScoreFunction::huber(double beta) {
    require_positive(beta, "huber");
    // f' is constant outside [-beta, beta]: not strictly increasing, and the
    // truncation is neither convex nor concave.
    return {Kind::Huber, beta, false, false, false, false};
}

ScoreFunction ScoreFunction::linex(double gamma) {
    require_positive(gamma, "linex");
    // f'(u) = gamma (1 - e^{-gamma u}) is concave.
    return {Kind::Linex, gamma, false, true, false, true};
}

ScoreFunction ScoreFunction::expectile(double alpha) {
    require_open_unit(alpha, "expectile");
    // f' is piecewise linear with slopes 2(1-alpha) | 2 alpha.
    return {Kind::Expectile, alpha, false, true, alpha >= 0.5, alpha <= 0.5};
}

ScoreFunction ScoreFunction::barron(double shape) {
    if (!(shape >= 1.0) || !std::isfinite(shape))
        throw DomainError("barron: shape must be >= 1 (the loss is not convex below 1)");
    const bool quadratic = shape == 2.0;
    return {Kind::Barron, shape, false, shape > 1.0, quadratic, quadratic};
}

ScoreFunction ScoreFunction::cost(double g) {
    require_open_unit(g, "cost");
    return {Kind::Cost, g, true, false, false, false};
}

double ScoreFunction::f(double u) const {
    if (!std::isfinite(u)) throw DomainError("score evaluated at a non-finite point");
    switch (kind_) {
    case Kind::Squared:
        return checked(u * u);
    case Kind::Pinball:
    case Kind::Cost:
        return u >= 0.0 ? param_ * u : -(1.0 - param_) * u;
    case Kind::Absolute:
        return std::abs(u);
    case Kind::Huber: {
        const double a = std::abs(u);
        return a >= param_ ? a - 0.5 * param_ : u * u / (2.0 * param_);
    }
    case Kind::Linex:
        return checked(linex_core(param_ * u));
    case Kind::Expectile:
        return checked((u > 0.0 ? param_ : 1.0 - param_) * u * u);
    case Kind::Barron: {
        if (param_ == 2.0) return checked(0.5 * u * u);
        const double c = std::abs(param_ - 2.0);
        return checked(c / param_ * std::expm1(0.5 * param_ * std::log1p(u * u / c)));
    }
    }
    return 0.0;
}

double ScoreFunction::df_plus(double u) const {
    if (!std::isfinite(u)) throw DomainError("score derivative at a non-finite point");
    switch (kind_) {
    case Kind::Pinball:
    case Kind::Cost:
        return u >= 0.0 ? param_ : -(1.0 - param_);
    case Kind::Absolute:
        return u >= 0.0 ? 1.0 : -1.0;
    default:
        break;
    }
    // remaining kinds are continuously differentiable
    switch (kind_) {
    case Kind::Squared:
        return 2.0 * u;
    case Kind::Huber:
        return std::clamp(u / param_, -1.0, 1.0);
    case Kind::Linex:
        return checked(-param_ * std::expm1(-param_ * u));
    case Kind::Expectile:
        return 2.0 * (u > 0.0 ? param_ : 1.0 - param_) * u;
    case Kind::Barron: {
        if (param_ == 2.0) return u;
        const double c = std::abs(param_ - 2.0);
        return checked(u * std::exp(0.5 * (param_ - 2.0) * std::log1p(u * u / c)));
    }
    default:
        return 0.0;
    }
}

double ScoreFunction::df_minus(double u) const {
    switch (kind_) {
    case Kind::Pinball:
    case Kind::Cost:
        if (!std::isfinite(u)) throw DomainError("score derivative at a non-finite point");
        return u > 0.0 ? param_ : -(1.0 - param_);
    case Kind::Absolute:
        if (!std::isfinite(u)) throw DomainError("score derivative at a non-finite point");
        return u > 0.0 ? 1.0 : -1.0;
    default:
        return df_plus(u);
    }
}

double ScoreFunction::evaluate(double x, double y) const {
    if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("score evaluated at a non-finite point");
    return f(x - y);
}

double ScoreFunction::dplus_y(double x, double y) const {
    if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("score derivative at a non-finite point");
    return -df_minus(x - y);
}

double ScoreFunction::dminus_y(double x, double y) const {
    if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("score derivative at a non-finite point");
    return -df_plus(x - y);
}

std::string ScoreFunction::spec() const {
    using detail::format_param;
    switch (kind_) {
    case Kind::Squared: return "squared";
    case Kind::Pinball: return "pinball:" + format_param(param_);
    case Kind::Absolute: return "absolute";
    case Kind::Huber: return "huber:" + format_param(param_);
    case Kind::Linex: return "linex:" + format_param(param_);
    case Kind::Expectile: return "expectile:" + format_param(param_);
    case Kind::Barron: return "barron:" + format_param(param_);
    case Kind::Cost: return "cost:" + format_param(param_);
    }
    return {};
}

ScoreFunction parse_score(std::string_view spec) {
    const auto parts = detail::split_spec(spec);
    const auto need = [&](const char* name) {
        if (!parts.param) throw ParseError(std::string("score '") + name + "' needs a parameter, e.g. " + name + ":0.5");
        return *parts.param;
    };
    const auto none = [&](const char* name) {
        if (parts.param) throw ParseError(std::string("score '") + name + "' takes no parameter");
    };
    if (parts.name == "squared") { none("squared"); return ScoreFunction::squared(); }
    if (parts.name == "absolute") { none("absolute"); return ScoreFunction::absolute(); }
    if (parts.name == "pinball") return ScoreFunction::pinball(need("pinball"));
    if (parts.name == "huber") return ScoreFunction::huber(need("huber"));
    if (parts.name == "linex") return ScoreFunction::linex(need("linex"));
    if (parts.name == "expectile") return ScoreFunction::expectile(need("expectile"));
    if (parts.name == "barron") return ScoreFunction::barron(need("barron"));
    if (parts.name == "cost") return ScoreFunction::cost(need("cost"));
    throw ParseError("unknown score '" + std::string(spec) + "'; available:\n" + score_catalog());
}

std::string score_catalog() {
    return "  squared            f(u) = u^2\n"
           "  pinball:<a>        a in (0,1), f(u) = a u+ + (1-a) u-\n"
           "  absolute           f(u) = |u|\n"
           "  huber:<b>          b > 0\n"
           "  linex:<g>          g > 0, f(u) = exp(-g u) + g u - 1\n"
           "  expectile:<a>      a in (0,1), f(u) = a (u+)^2 + (1-a) (u-)^2\n"
           "  barron:<s>         shape s >= 1\n"
           "  cost:<G>           G in (0,1), same as pinball:G\n";
}

} // namespace robrisk
