#include "robrisk/robust_solver.hpp"

#include "robrisk/errors.hpp"
#include "ellipsoid.hpp"
#include "ordered_bisection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

namespace robrisk {

namespace {

constexpr double kSignSlack = 1e-12;
constexpr double kCertificateSlack = 1e-9;
constexpr double kGolden = 0.6180339887498949;

ScenarioVariable negative_scores(const ScoreFunction& s, const ScenarioVariable& x, double y) {
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = -s.evaluate(x[i], y);
    return ScenarioVariable(x.space(), std::move(z));
}

struct Slopes {
    double plus;
    double minus;
    double scale;  // sum_i q_i |dS/dy|, magnitude for the sign slack
};

// One-sided derivatives of g at y. Moving y by +-eps moves -S(X, y) by
// -eps d+S/dy or +eps d-S/dy, and the worst-case measure along that
// perturbation gives the exact one-sided derivative.
Slopes slopes_at(const CoherentRiskMeasure& rho, const ScoreFunction& s,
                 const ScenarioVariable& x, double y) {
    const std::size_t n = x.size();
    std::vector<double> up(n), down(n), neg_up(n);
    for (std::size_t i = 0; i < n; ++i) {
        up[i] = s.dplus_y(x[i], y);
        down[i] = s.dminus_y(x[i], y);
        neg_up[i] = -up[i];
    }
    const auto z = negative_scores(s, x, y);
    const auto q_right = rho.dual_maximizer(z, neg_up);
    const auto q_left = rho.dual_maximizer(z, down);
    Slopes out{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = std::max(std::fabs(up[i]), std::fabs(down[i]));
        out.plus += q_right[i] * up[i];
        out.minus += q_left[i] * down[i];
        out.scale += 0.5 * (q_right[i] + q_left[i]) * mag;
    }
    return out;
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string(what) + " must be a positive finite number");
}

double golden_minimum(const auto& g, double a, double b, std::int64_t& evals) {
    double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
    double gc = g(c), gd = g(d);
    evals += 2;
    for (int it = 0; it < 200 && b - a > 4 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(a), std::fabs(b)); ++it) {
        if (gc <= gd) {
            b = d; d = c; gd = gc;
            c = b - kGolden * (b - a);
            gc = g(c);
        } else {
            a = c; c = d; gc = gd;
            d = a + kGolden * (b - a);
            gd = g(d);
        }
        ++evals;
    }
    return std::min(gc, gd);
}

// E_Q[d-S/dy] <= 0 <= E_Q[d+S/dy] at y for some worst-case Q. The worst-case
// measures just left and right of y are both worst-case at y, and a mixture of
// them satisfies the condition when their slopes straddle zero.
bool first_order_holds(const CoherentRiskMeasure& rho, const ScoreFunction& s, const ScenarioVariable& x,
                       double y, double h, double g_y) {
    const auto sl = slopes_at(rho, s, x, y);
    // one-ulp change of the slope: the minimizer need not be a double
    const auto before = slopes_at(rho, s, x, std::nextafter(y, -std::numeric_limits<double>::infinity()));
    const double resolution = std::max(0.0, sl.plus - before.plus);
    const double allow = kCertificateSlack * sl.scale + resolution;
    if (sl.minus <= allow && sl.plus >= -allow) return true;

    const auto along = [&](const MeasureWeights& q, double& value) {
        double slope = 0.0, scale = 0.0;
        value = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            slope += q[i] * s.dplus_y(x[i], y);
            scale += q[i] * std::fabs(s.dplus_y(x[i], y));
            value += q[i] * s.evaluate(x[i], y);
        }
        return std::pair{slope, scale};
    };
    double v_left = 0.0, v_right = 0.0;
    const auto [a, a_scale] = along(rho.dual_maximizer(negative_scores(s, x, y - h)), v_left);
    const auto [b, b_scale] = along(rho.dual_maximizer(negative_scores(s, x, y + h)), v_right);
    const double value_slack = kCertificateSlack * std::fabs(g_y);
    return v_left >= g_y - value_slack && v_right >= g_y - value_slack &&
           a <= kCertificateSlack * a_scale + resolution && b >= -kCertificateSlack * b_scale - resolution;
}

} // namespace

double robust_objective(const CoherentRiskMeasure& rho, const ScoreFunction& s,
                        const ScenarioVariable& x, double y) {
    return rho.evaluate(negative_scores(s, x, y));
}

SolveResult solve(const CoherentRiskMeasure& rho, const ScoreFunction& s,
                  const ScenarioVariable& x, double tol) {
    require_positive(tol, "tol");
    const auto [xmin, xmax] = ess_bounds(x);
    SolveResult out;
    std::int64_t evals = 0;
    if (xmin == xmax) {
        out.argmin_lo = out.argmin_hi = xmin;
        out.r_value = -xmin;
        return out;
    }

    const double range = xmax - xmin;
    const double left = xmin - 0.1 * range;
    const double right = xmax + 0.1 * range;

    // Flat stretches need a rounding allowance on the zero test; with a
    // smooth score the minimizer is unique and the plain sign is exact.
    const double slack = s.smooth_strictly_convex() ? 0.0 : kSignSlack;
    const auto reaches_zero = [&](double y) {
        ++evals;
        const auto sl = slopes_at(rho, s, x, y);
        return sl.plus >= -slack * sl.scale;
    };
    const auto below_zero = [&](double y) {
        ++evals;
        const auto sl = slopes_at(rho, s, x, y);
        return sl.minus <= slack * sl.scale;
    };

    if (!reaches_zero(right) || !below_zero(left))
        throw ContractError("solve: objective is not increasing beyond the data range");

    const double lo = reaches_zero(left) ? left : detail::first_true(left, right, reaches_zero);
    double hi = below_zero(right) ? right : detail::last_true(left, right, below_zero);
    if (hi < lo) hi = lo;

    const auto g = [&](double y) {
        ++evals;
        return robust_objective(rho, s, x, y);
    };
    const double g_lo = g(lo);
    const double g_hi = g(hi);
    const double g_mid = hi > lo ? g(lo + 0.5 * (hi - lo)) : g_lo;

    // Difference-quotient certificate: stepping outwards must not decrease g.
    const double h = std::max(tol, 1e-9 * range);
    const auto check_outside = [&](double at, double g_at, double step, const char* side) {
        const double g_out = g(at + step);
        if (g_out < g_at - kCertificateSlack * std::fabs(g_at)) {
            std::ostringstream os;
            os.precision(17);
            os << "solve: " << side << " minimizer " << at << " not certified (g=" << g_at
               << ", g outside=" << g_out << ") for " << rho.spec() << " / " << s.spec();
            throw ContractError(os.str());
        }
    };
    check_outside(lo, g_lo, -h, "leftmost");
    check_outside(hi, g_hi, h, "rightmost");

    if (s.smooth_strictly_convex() && !first_order_holds(rho, s, x, lo, h, g_lo))
        throw ContractError("solve: first-order condition fails at the minimizer for " + rho.spec() +
                            " / " + s.spec());
    evals += 3;

    out.d_value = std::max(0.0, std::min({g_lo, g_hi, g_mid}));
    out.tol_achieved = std::max(std::nextafter(lo, right) - lo, std::nextafter(hi, right) - hi);
    if (s.smooth_strictly_convex()) {
        // Unique minimizer; [lo, hi] is only the rounding plateau of the slope.
        const double mid = lo + 0.5 * (hi - lo);
        out.tol_achieved = std::max(out.tol_achieved, 0.5 * (hi - lo));
        out.argmin_lo = out.argmin_hi = mid;
    } else {
        out.argmin_lo = lo;
        out.argmin_hi = hi;
    }
    out.r_value = -out.argmin_lo;
    out.evaluations = evals;
    return out;
}

SolveResult brute_force_oracle(const CoherentRiskMeasure& rho, const ScoreFunction& s,
                               const ScenarioVariable& x, double grid_step) {
    require_positive(grid_step, "grid_step");
    const auto [xmin, xmax] = ess_bounds(x);
    SolveResult out;
    std::int64_t evals = 0;
    if (xmin == xmax) {
        out.argmin_lo = out.argmin_hi = xmin;
        out.r_value = -xmin;
        out.evaluations = 1;
        return out;
    }
    const double range = xmax - xmin;
    const double left = xmin - 0.1 * range;
    const double right = xmax + 0.1 * range;
    const auto count = static_cast<std::size_t>(std::floor((right - left) / grid_step)) + 1;

    const auto g = [&](double y) { return robust_objective(rho, s, x, y); };
    std::vector<double> grid(count), values(count);
    for (std::size_t j = 0; j < count; ++j) {
        grid[j] = left + static_cast<double>(j) * grid_step;
        values[j] = g(grid[j]);
    }
    evals += static_cast<std::int64_t>(count);

    const auto k = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    const double g_min = values[k];

    // Points tied with the grid minimum up to its smaller neighbouring
    // increment (or rounding level on flat stretches) form the argmin set.
    double rise = std::numeric_limits<double>::infinity();
    if (k > 0) rise = std::min(rise, values[k - 1] - g_min);
    if (k + 1 < count) rise = std::min(rise, values[k + 1] - g_min);
    const double threshold = g_min + std::max(rise, 1e-12 * (1.0 + std::fabs(g_min)));

    std::size_t first = k, last = k;
    for (std::size_t j = 0; j < count; ++j) {
        if (values[j] <= threshold) {
            first = std::min(first, j);
            last = std::max(last, j);
        }
    }

    const double a = grid[k > 0 ? k - 1 : k];
    const double b = grid[k + 1 < count ? k + 1 : k];
    const double refined = b > a ? golden_minimum(g, a, b, evals) : g_min;

    out.argmin_lo = grid[first];
    out.argmin_hi = grid[last];
    out.r_value = -out.argmin_lo;
    out.d_value = std::max(0.0, std::min(g_min, refined));
    out.tol_achieved = grid_step;
    out.evaluations = evals;
    return out;
}

double acceptability_index(const CoherentRiskMeasure& rho, const ScoreFunction& s,
                           const ScenarioVariable& x) {
    const auto res = solve(rho, s, x);
    const double r = res.r_value, d = res.d_value;
    if (r < 0.0 && d > 0.0) return -r / d;
    if (r <= 0.0 && d == 0.0) return std::numeric_limits<double>::infinity();
    return 0.0;
}

namespace {

struct InnerSolution {
    double value;
    double argmin;
};

// min_y E_q[S(X, y)], solved exactly on the support of q.
InnerSolution inner_solution(const ScoreFunction& s, const ScenarioVariable& x, const std::vector<double>& q) {
    std::vector<double> w, v;
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] > 0.0) {
            w.push_back(q[i]);
            v.push_back(x[i]);
            total += q[i];
        }
    }
    for (double& wi : w) wi /= total;
    const ScenarioVariable restricted(FiniteScenarioSpace::make(std::move(w)), std::move(v));
    const auto res = solve(CoherentRiskMeasure::expected_loss(), s, restricted, 1e-12);
    return {res.d_value, res.argmin_lo};
}

void for_each_subset(std::size_t n, std::size_t k, const auto& visit) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        visit(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

} // namespace

MinimaxReport minimax_report(const CoherentRiskMeasure& rho, const ScoreFunction& s,
                             const ScenarioVariable& x, int n_extreme_samples, double tolerance,
                             std::uint64_t seed) {
    const std::size_t n = x.size();
    const auto p = x.space()->probabilities();
    std::size_t k = n;
    if (rho.kind() == CoherentRiskMeasure::Kind::ExpectedShortfall) {
        const double an = rho.parameter() * static_cast<double>(n);
        k = static_cast<std::size_t>(std::lround(an));
        if (!x.space()->is_uniform() || n > 8 || std::fabs(an - static_cast<double>(k)) > 1e-9 || k == 0)
            throw DomainError("minimax_check: ES needs a uniform space with n <= 8 and alpha*n integer");
    } else if (rho.kind() != CoherentRiskMeasure::Kind::ExpectedLoss) {
        throw DomainError("minimax_check: only EL and ES are supported");
    }
    if (n_extreme_samples < 0) throw DomainError("minimax_check: sample count must be >= 0");

    MinimaxReport rep;
    rep.d_value = solve(rho, s, x, 1e-12).d_value;

    // Extreme points of {q : q_i <= p_i / alpha}: uniform weight on k-subsets.
    // The EL dual set is P alone.
    std::vector<std::vector<double>> extremes;
    if (rho.kind() == CoherentRiskMeasure::Kind::ExpectedLoss) {
        extremes.emplace_back(p.begin(), p.end());
    } else {
        for_each_subset(n, k, [&](const std::vector<std::size_t>& idx) {
            std::vector<double> q(n, 0.0);
            for (std::size_t i : idx) q[i] = 1.0 / static_cast<double>(k);
            extremes.push_back(std::move(q));
        });
    }

    const auto inner = [&](const std::vector<double>& q) {
        ++rep.measures_tried;
        return inner_solution(s, x, q).value;
    };

    std::vector<double> best_q(p.begin(), p.end());
    double best = inner(best_q);
    rep.extreme_max = -std::numeric_limits<double>::infinity();
    for (const auto& q : extremes) {
        const double v = inner(q);
        rep.extreme_max = std::max(rep.extreme_max, v);
        if (v > best) {
            best = v;
            best_q = q;
        }
    }

    // Random sparse mixtures of extreme points.
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> gamma(1.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, extremes.size() - 1);
    for (int it = 0; it < n_extreme_samples; ++it) {
        const int parts = 2 + it % 3;
        std::vector<double> q(n, 0.0);
        double total = 0.0;
        for (int j = 0; j < parts; ++j) {
            const double w = gamma(rng);
            total += w;
            const auto& e = extremes[pick(rng)];
            for (std::size_t i = 0; i < n; ++i) q[i] += w * e[i];
        }
        for (double& qi : q) qi /= total;
        const double v = inner(q);
        if (v > best) {
            best = v;
            best_q = std::move(q);
        }
    }

    // Ascent over the whole dual set. The inner minimum is concave in q with
    // supergradient S(X, y*(q)); q_n is eliminated by the budget.
    if (extremes.size() > 1 && n >= 2) {
        const double cap = 1.0 / static_cast<double>(k);
        const auto dim = static_cast<Eigen::Index>(n - 1);
        const auto full = [&](const Eigen::VectorXd& z) {
            std::vector<double> q(n);
            double sum = 0.0;
            for (Eigen::Index i = 0; i < dim; ++i) sum += (q[static_cast<std::size_t>(i)] = z[i]);
            q[n - 1] = 1.0 - sum;
            return q;
        };
        const auto oracle = [&](const Eigen::VectorXd& z, Eigen::VectorXd& g) -> std::optional<double> {
            g.setZero(dim);
            const double sum = z.sum();
            for (Eigen::Index i = 0; i < dim; ++i) {
                if (z[i] < 0.0) { g[i] = -1.0; return std::nullopt; }
                if (z[i] > cap) { g[i] = 1.0; return std::nullopt; }
            }
            if (sum > 1.0) { g.setOnes(); return std::nullopt; }
            if (1.0 - sum > cap) { g.setConstant(-1.0); return std::nullopt; }
            auto q = full(z);
            for (double& v : q) v = std::max(v, 0.0);
            ++rep.measures_tried;
            const auto sol = inner_solution(s, x, q);
            const double last = s.evaluate(x[n - 1], sol.argmin);
            for (Eigen::Index i = 0; i < dim; ++i) g[i] = -(s.evaluate(x[static_cast<std::size_t>(i)], sol.argmin) - last);
            return -sol.value;
        };
        Eigen::VectorXd start(dim);
        for (Eigen::Index i = 0; i < dim; ++i) start[i] = best_q[static_cast<std::size_t>(i)];
        const double radius = std::sqrt(static_cast<double>(dim)) * cap * 1.01;
        const auto found = detail::ellipsoid_minimize(oracle, start, radius, 400 * dim * (dim + 1) + 400, 1e-12);
        if (-found.f_best > best) {
            best = -found.f_best;
            best_q = full(found.best);
        }
        rep.upper_bound = -found.lower;
    } else {
        rep.upper_bound = best;
    }

    rep.sampled_max = best;
    rep.passed = rep.sampled_max >= rep.d_value - tolerance &&
                 rep.sampled_max <= rep.d_value + 1e-9 * (1.0 + std::fabs(rep.d_value));
    return rep;
}

bool minimax_check(const CoherentRiskMeasure& rho, const ScoreFunction& s,
                   const ScenarioVariable& x, int n_extreme_samples, double tolerance) {
    return minimax_report(rho, s, x, n_extreme_samples, tolerance).passed;
}

} // namespace robrisk
