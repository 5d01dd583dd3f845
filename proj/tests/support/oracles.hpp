#pragma once

// Reference computations used to check the library. Each one works on raw
// vectors with its own method and shares no code with the solver paths.

#include <boost/math/tools/toms748_solve.hpp>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

inline double mean(const Vec& x, const Vec& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += p[i] * x[i];
    return s;
}

inline double variance(const Vec& x, const Vec& p) {
    const double m = mean(x, p);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += p[i] * (x[i] - m) * (x[i] - m);
    return s;
}

inline double covariance(const Vec& x, const Vec& y, const Vec& p) {
    const double mx = mean(x, p), my = mean(y, p);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += p[i] * (x[i] - mx) * (y[i] - my);
    return s;
}

// (1/g) log E[exp(-g X)], via log-sum-exp.
inline double entropic(const Vec& x, const Vec& p, double g) {
    double top = -std::numeric_limits<double>::infinity();
    for (double v : x) top = std::max(top, -g * v);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += p[i] * std::exp(-g * x[i] - top);
    return (top + std::log(s)) / g;
}

// Root of a E[(X-e)+] - (1-a) E[(e-X)+] by TOMS 748 on [min X, max X].
inline double expectile(const Vec& x, const Vec& p, double a) {
    const auto g = [&](double e) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += p[i] * (x[i] > e ? a * (x[i] - e) : -(1.0 - a) * (e - x[i]));
        return s;
    };
    const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    double lo = *lo_it, hi = *hi_it;
    if (lo == hi) return lo;
    if (g(lo) == 0.0) return lo;
    if (g(hi) == 0.0) return hi;
    std::uintmax_t iters = 500;
    const auto r = boost::math::tools::toms748_solve(
        g, lo, hi, [](double u, double v) { return std::fabs(u - v) <= 1e-15 * std::max(1.0, std::fabs(u)); },
        iters);
    return 0.5 * (r.first + r.second);
}

// ES^a(X) as a minimum of the Rockafellar-Uryasev function of the loss -X;
// the minimum of that piecewise-linear function sits at an outcome.
inline double expected_shortfall(const Vec& x, const Vec& p, double a) {
    double best = std::numeric_limits<double>::infinity();
    for (double c_neg : x) {
        const double c = -c_neg;
        double tail = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) tail += p[i] * std::max(-x[i] - c, 0.0);
        best = std::min(best, c + tail / a);
    }
    return best;
}

// Left quantile by scanning candidate values.
inline double left_quantile(const Vec& x, const Vec& p, double a) {
    Vec cand = x;
    std::sort(cand.begin(), cand.end());
    for (double c : cand) {
        double f = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] <= c) f += p[i];
        if (f >= a - 1e-12) return c;
    }
    return cand.back();
}

// Weighted least squares [1, X] b = Y by QR of diag(sqrt p) [1, X].
inline Vec normal_equations(const Vec& y, const std::vector<Vec>& xs, const Vec& p) {
    const auto n = static_cast<Eigen::Index>(y.size());
    const auto d = static_cast<Eigen::Index>(xs.size()) + 1;
    Eigen::MatrixXd a(n, d);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = std::sqrt(p[static_cast<std::size_t>(i)]);
        a(i, 0) = w;
        for (Eigen::Index j = 1; j < d; ++j) a(i, j) = w * xs[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)];
        b[i] = w * y[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(b);
    return Vec(sol.data(), sol.data() + sol.size());
}

// 1 - SSR/SST under weights p.
inline double r_squared(const Vec& y, const std::vector<Vec>& xs, const Vec& p) {
    const Vec b = normal_equations(y, xs, p);
    double ssr = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double fitted = b[0];
        for (std::size_t j = 0; j < xs.size(); ++j) fitted += b[j + 1] * xs[j][i];
        ssr += p[i] * (y[i] - fitted) * (y[i] - fitted);
    }
    return 1.0 - ssr / variance(y, p);
}

// Global minimum-variance weights: Sigma^-1 1 / (1' Sigma^-1 1).
inline Vec gmvp(const std::vector<Vec>& assets, const Vec& p) {
    const auto n = static_cast<Eigen::Index>(assets.size());
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            cov(i, j) = covariance(assets[static_cast<std::size_t>(i)], assets[static_cast<std::size_t>(j)], p);
    const Eigen::VectorXd z = cov.fullPivLu().solve(Eigen::VectorXd::Ones(n));
    const Eigen::VectorXd w = z / z.sum();
    return Vec(w.data(), w.data() + w.size());
}

struct LineFit {
    double mu;
    double beta;
    double objective;
};

// Best line through two sample points for E[pinball_a(Y - mu - beta X)].
inline LineFit pinball_pairs(const Vec& y, const Vec& x, const Vec& p, double a) {
    LineFit best{0.0, 0.0, std::numeric_limits<double>::infinity()};
    const auto loss = [&](double mu, double beta) {
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double r = y[i] - mu - beta * x[i];
            s += p[i] * (r > 0 ? a * r : -(1.0 - a) * r);
        }
        return s;
    };
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = i + 1; j < y.size(); ++j) {
            if (x[i] == x[j]) continue;
            const double beta = (y[j] - y[i]) / (x[j] - x[i]);
            const double mu = y[i] - beta * x[i];
            const double v = loss(mu, beta);
            if (v < best.objective) best = {mu, beta, v};
        }
    return best;
}

} // namespace oracle
