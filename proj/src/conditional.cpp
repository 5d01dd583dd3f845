#include "robrisk/conditional.hpp"

#include "robrisk/errors.hpp"
#include "robrisk/robust_solver.hpp"
#include "ellipsoid.hpp"
#include "ordered_bisection.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace robrisk {

namespace {

constexpr double kSignSlack = 1e-12;
constexpr double kMaxCondition = 1e12;

// F(phi) = rho(-S(Y, B phi)) in coordinates where B' diag(p) B = I.
class DesignObjective {
public:
    DesignObjective(const CoherentRiskMeasure& rho, const ScoreFunction& s, const ScenarioVariable& y,
                    Eigen::MatrixXd basis)
        : rho_(rho), s_(s), y_(y), basis_(std::move(basis)) {}

    Eigen::Index dim() const { return basis_.cols(); }
    // Relative allowance on zero tests of directional derivatives.
    double sign_slack() const { return s_.smooth_strictly_convex() ? 0.0 : kSignSlack; }

    double value(const Eigen::VectorXd& phi) const {
        ++evaluations_;
        return rho_.evaluate(negative_scores(residuals(phi)));
    }

    // Value and a subgradient -sum_i q_i f'_+(r_i) B_i along the worst-case q.
    double value_and_subgradient(const Eigen::VectorXd& phi, Eigen::VectorXd& grad) const {
        ++evaluations_;
        const Eigen::VectorXd r = residuals(phi);
        const auto z = negative_scores(r);
        const auto q = rho_.dual_maximizer(z);
        grad.setZero(dim());
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            if (q[i] == 0.0) continue;
            grad -= (q[i] * s_.df_plus(r[i])) * basis_.row(i).transpose();
        }
        return rho_.evaluate(z);
    }

    struct Directional {
        double right;  // derivative along +e_j
        double left;   // derivative along -e_j, negated
        double scale;
    };

    Directional directional(const Eigen::VectorXd& phi, Eigen::Index j) const {
        ++evaluations_;
        const Eigen::VectorXd r = residuals(phi);
        const auto q = rho_.dual_maximizer(negative_scores(r));
        Directional out{0.0, 0.0, 0.0};
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            const double b = basis_(i, j);
            if (q[i] == 0.0 || b == 0.0) continue;
            const double up = s_.df_plus(r[i]), down = s_.df_minus(r[i]);
            // r_i moves by -b t
            out.right += q[i] * -b * (b > 0.0 ? down : up);
            out.left += q[i] * -b * (b > 0.0 ? up : down);
            out.scale += q[i] * std::fabs(b) * std::max(std::fabs(up), std::fabs(down));
        }
        return out;
    }

    std::int64_t evaluations() const { return evaluations_; }

private:
    Eigen::VectorXd residuals(const Eigen::VectorXd& phi) const {
        return Eigen::Map<const Eigen::VectorXd>(y_.values().data(), y_.size()) - basis_ * phi;
    }

    ScenarioVariable negative_scores(const Eigen::VectorXd& r) const {
        std::vector<double> z(static_cast<std::size_t>(r.size()));
        for (Eigen::Index i = 0; i < r.size(); ++i) z[static_cast<std::size_t>(i)] = -s_.f(r[i]);
        return ScenarioVariable(y_.space(), std::move(z));
    }

    const CoherentRiskMeasure& rho_;
    const ScoreFunction& s_;
    const ScenarioVariable& y_;
    Eigen::MatrixXd basis_;
    mutable std::int64_t evaluations_ = 0;
};

struct Design {
    Eigen::MatrixXd a;  // [1, X]
    Eigen::MatrixXd m;  // theta = m * phi
};

Design build_design(const ScenarioVariable& y, const std::vector<ScenarioVariable>& regressors) {
    const auto ns = static_cast<Eigen::Index>(y.size());
    const auto d = static_cast<Eigen::Index>(regressors.size()) + 1;
    const auto p = y.space()->probabilities();
    Design out;
    out.a.resize(ns, d);
    out.a.col(0).setOnes();
    for (Eigen::Index j = 1; j < d; ++j) {
        const auto& x = regressors[static_cast<std::size_t>(j - 1)];
        if (x.size() != y.size()) throw DimensionError("fit: regressor length differs from the target");
        const auto px = x.space()->probabilities();
        if (x.space() != y.space() && !std::equal(p.begin(), p.end(), px.begin()))
            throw DomainError("fit: regressors must share the target's scenario space");
        for (Eigen::Index i = 0; i < ns; ++i) out.a(i, j) = x[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(p.data(), ns);
    const Eigen::MatrixXd gram = out.a.transpose() * w.asDiagonal() * out.a;

    Eigen::VectorXd unscale(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        if (!(gram(j, j) > 0.0)) throw SingularDesignError("fit: regressor " + std::to_string(j) + " is identically zero");
        unscale[j] = 1.0 / std::sqrt(gram(j, j));
    }
    const Eigen::MatrixXd scaled = unscale.asDiagonal() * gram * unscale.asDiagonal();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff(), lmax = eig.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin > kMaxCondition)
        throw SingularDesignError("fit: design is collinear (regressors are affinely dependent)");

    const Eigen::LLT<Eigen::MatrixXd> llt(scaled);
    if (llt.info() != Eigen::Success) throw SingularDesignError("fit: design Gram matrix is not positive definite");
    // theta = D^-1/2 L^-T phi
    const Eigen::MatrixXd lt_inv = llt.matrixU().solve(Eigen::MatrixXd::Identity(d, d));
    out.m = unscale.asDiagonal() * lt_inv;
    return out;
}

// Cyclic exact coordinate minimization: each coordinate moves to the nearest
// point where its one-sided derivatives bracket zero.
void coordinate_polish(const DesignObjective& obj, Eigen::VectorXd& phi, double length_scale,
                       std::int64_t& iterations) {
    const Eigen::Index d = obj.dim();
    const double slack = obj.sign_slack();
    double f_cur = obj.value(phi);
    for (int sweep = 0; sweep < 100; ++sweep) {
        bool moved = false;
        for (Eigen::Index j = 0; j < d; ++j) {
            ++iterations;
            const auto at = [&](double u) {
                Eigen::VectorXd trial = phi;
                trial[j] = u;
                return trial;
            };
            const auto here = obj.directional(phi, j);
            const double origin = phi[j];
            double target = origin;
            if (here.right < -slack * here.scale) {
                const auto reaches = [&](double u) {
                    const auto dir = obj.directional(at(u), j);
                    return dir.right >= -slack * dir.scale;
                };
                double step = 1e-8 * (length_scale + std::fabs(origin));
                double far = origin + step;
                for (int e = 0; e < 200 && !reaches(far); ++e) far = origin + (step *= 2.0);
                if (!reaches(far)) continue;
                target = detail::first_true(origin, far, reaches);
            } else if (here.left > slack * here.scale) {
                const auto stays = [&](double u) {
                    const auto dir = obj.directional(at(u), j);
                    return dir.left <= slack * dir.scale;
                };
                double step = 1e-8 * (length_scale + std::fabs(origin));
                double far = origin - step;
                for (int e = 0; e < 200 && !stays(far); ++e) far = origin - (step *= 2.0);
                if (!stays(far)) continue;
                target = detail::last_true(far, origin, stays);
            }
            if (target == origin) continue;
            const Eigen::VectorXd trial = at(target);
            const double f_new = obj.value(trial);
            // Near the optimum value differences drown in rounding; the
            // derivative bracket decides and the value only guards.
            if (f_new <= f_cur + 1e-15 * std::fabs(f_cur)) {
                moved = moved || std::fabs(target - origin) > 1e-15 * (std::fabs(origin) + length_scale);
                phi = trial;
                f_cur = std::min(f_cur, f_new);
            }
        }
        if (!moved) break;
    }
}

double residual_objective(const CoherentRiskMeasure& rho, const ScoreFunction& s, const ScenarioVariable& y,
                          const Eigen::MatrixXd& a, const Eigen::VectorXd& theta) {
    const Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(y.values().data(), y.size()) - a * theta;
    std::vector<double> z(static_cast<std::size_t>(r.size()));
    for (Eigen::Index i = 0; i < r.size(); ++i) z[static_cast<std::size_t>(i)] = -s.f(r[i]);
    return rho.evaluate(ScenarioVariable(y.space(), std::move(z)));
}

} // namespace

RegressionFit fit(const CoherentRiskMeasure& rho, const ScoreFunction& s, const ScenarioVariable& y,
                  const std::vector<ScenarioVariable>& regressors, double tol, FitMode mode) {
    if (!(tol > 0.0) || !std::isfinite(tol)) throw DomainError("tol must be a positive finite number");
    if (mode == FitMode::Strict && !s.smooth_strictly_convex())
        throw UnsupportedScoreError("fit: score '" + s.spec() +
                                    "' is not smooth and strictly convex; use relaxed mode");

    const std::size_t n = regressors.size();
    RegressionFit out;
    out.betas.assign(n, 0.0);

    if (n == 0) {
        const auto res = solve(rho, s, y, tol);
        out.mu_star = res.argmin_lo;
        out.objective = res.d_value;
        out.cd = res.d_value > 0.0 ? 0.0 : 1.0;
        out.iterations = res.evaluations;
        return out;
    }

    const Design design = build_design(y, regressors);
    const auto [ymin, ymax] = ess_bounds(y);
    if (ymin == ymax) {
        out.mu_star = ymin;
        return out;
    }

    const auto base = solve(rho, s, y, tol);
    const double d0 = base.d_value;
    DesignObjective obj(rho, s, y, design.a * design.m);

    Eigen::VectorXd theta0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + 1));
    theta0[0] = base.argmin_lo;
    const Eigen::VectorXd phi0 = design.m.partialPivLu().solve(theta0);

    // Rigorous ball around phi0 holding a minimizer: at any minimizer every
    // residual is bounded by `bound` (loadedness + convex growth of f).
    const double t = ymax - ymin;
    const double growth = std::min(s.f(t), s.f(-t));
    const double bound = t * std::max(1.0, d0 / (y.space()->min_probability() * growth));
    double y_norm = 0.0;
    {
        const auto p = y.space()->probabilities();
        for (std::size_t i = 0; i < y.size(); ++i) y_norm += p[i] * y[i] * y[i];
        y_norm = std::sqrt(y_norm);
    }
    const double radius = phi0.norm() + y_norm + bound;

    std::int64_t iterations = 0;
    const Eigen::Index d = obj.dim();
    const auto found = detail::ellipsoid_minimize(
        [&](const Eigen::VectorXd& at, Eigen::VectorXd& grad) -> std::optional<double> {
            return obj.value_and_subgradient(at, grad);
        },
        phi0, radius, 80 * d * (d + 1) + 200, 1e-15);
    iterations += found.iterations;
    Eigen::VectorXd phi = found.best;
    if (obj.value(phi) > d0) phi = phi0;
    coordinate_polish(obj, phi, t, iterations);

    Eigen::VectorXd theta = design.m * phi;

    // Location: leftmost minimizer for the residual Y - sum beta X.
    std::vector<double> resid(y.values().begin(), y.values().end());
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < y.size(); ++i) resid[i] -= theta[static_cast<Eigen::Index>(j + 1)] * regressors[j][i];
    const auto loc = solve(rho, s, ScenarioVariable(y.space(), std::move(resid)), tol);
    theta[0] = loc.argmin_lo;

    out.mu_star = theta[0];
    for (std::size_t j = 0; j < n; ++j) out.betas[j] = theta[static_cast<Eigen::Index>(j + 1)];
    out.objective = loc.d_value;
    out.cd = 1.0 - out.objective / d0;
    out.iterations = iterations;

    const double f_star = residual_objective(rho, s, y, design.a, theta);
    double worst = 0.0;
    for (Eigen::Index j = 0; j <= static_cast<Eigen::Index>(n); ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(theta.size());
        e[j] = tol;
        const double fwd = (residual_objective(rho, s, y, design.a, theta + e) - f_star) / tol;
        const double bwd = (f_star - residual_objective(rho, s, y, design.a, theta - e)) / tol;
        worst = std::max({worst, -fwd, bwd});
    }
    out.foc_residual = worst;
    return out;
}

double conditional_risk_row(const RegressionFit& fit, const std::vector<double>& x_row) {
    if (x_row.size() != fit.betas.size())
        throw DimensionError("conditional_risk_row: row has " + std::to_string(x_row.size()) +
                             " entries, fit has " + std::to_string(fit.betas.size()) + " regressors");
    double v = fit.mu_star;
    for (std::size_t i = 0; i < x_row.size(); ++i) v += fit.betas[i] * x_row[i];
    return -v;
}

double cd_metric(const CoherentRiskMeasure& rho, const ScoreFunction& s, const ScenarioVariable& y,
                 const std::vector<ScenarioVariable>& regressors, const RegressionFit& fit) {
    if (regressors.size() != fit.betas.size())
        throw DimensionError("cd_metric: regressor count does not match the fit");
    if (y.is_constant()) throw DomainError("cd_metric: target is constant, unconditional deviation is zero");
    return 1.0 - fit.objective / solve(rho, s, y).d_value;
}

} // namespace robrisk
