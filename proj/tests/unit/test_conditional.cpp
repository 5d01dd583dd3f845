#include "catch_amalgamated.hpp"

#include "generators.hpp"
#include "oracles.hpp"
#include "robrisk/conditional.hpp"
#include "robrisk/errors.hpp"
#include "robrisk/robust_solver.hpp"

#include <Eigen/Dense>

using namespace robrisk;
using Catch::Matchers::WithinAbs;

namespace {

using R = CoherentRiskMeasure;
using S = ScoreFunction;

std::vector<ScenarioVariable> regressors(gen::Rng& rng, const SpacePtr& sp, std::size_t k) {
    std::vector<ScenarioVariable> xs;
    for (std::size_t j = 0; j < k; ++j) xs.push_back(gen::variable(rng, sp));
    return xs;
}

ScenarioVariable fitted(const RegressionFit& f, const std::vector<ScenarioVariable>& xs, const SpacePtr& sp) {
    auto out = ScenarioVariable::constant(sp, f.mu_star);
    for (std::size_t j = 0; j < xs.size(); ++j) out += f.betas[j] * xs[j];
    return out;
}

std::vector<double> row(const std::vector<ScenarioVariable>& xs, std::size_t i) {
    std::vector<double> r;
    for (const auto& x : xs) r.push_back(x[i]);
    return r;
}

} // namespace

TEST_CASE("affine target is fitted exactly", "[conditional]") {
    gen::Rng rng(51);
    const auto sp = gen::space(rng, 12);
    const auto x = gen::variable(rng, sp);
    const auto y = 2.0 + 3.0 * x;
    const auto f = fit(R::expected_loss(), S::squared(), y, {x});
    CHECK_THAT(f.mu_star, WithinAbs(2.0, 1e-9));
    CHECK_THAT(f.betas[0], WithinAbs(3.0, 1e-9));
    CHECK_THAT(f.objective, WithinAbs(0.0, 1e-12));
    CHECK_THAT(f.cd, WithinAbs(1.0, 1e-12));
    CHECK_THAT(cd_metric(R::expected_loss(), S::squared(), y, {x}, f), WithinAbs(1.0, 1e-12));
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK_THAT(conditional_risk_row(f, {x[i]}), WithinAbs(-y[i], 1e-9));
}

TEST_CASE("conditional risk rows", "[conditional]") {
    RegressionFit f;
    f.mu_star = 2.0;
    f.betas = {3.0};
    CHECK(conditional_risk_row(f, {1.0}) == -5.0);
    f.betas = {0.0, 0.0};
    CHECK(conditional_risk_row(f, {4.0, -9.0}) == -2.0);
    CHECK_THROWS_AS(conditional_risk_row(f, {1.0}), DimensionError);
}

TEST_CASE("squared loss under EL is weighted least squares", "[conditional][oracle]") {
    gen::Rng rng(52);
    for (int t = 0; t < 20; ++t) {
        const auto sp = gen::space(rng, gen::integer(rng, 8, 50));
        const auto xs = regressors(rng, sp, gen::integer(rng, 1, 3));
        const auto y = gen::variable(rng, sp);
        const auto f = fit(R::expected_loss(), S::squared(), y, xs);
        std::vector<std::vector<double>> cols;
        for (const auto& x : xs) cols.push_back(gen::values(x));
        const auto b = oracle::normal_equations(gen::values(y), cols, gen::probs(y));
        CHECK_THAT(f.mu_star, WithinAbs(b[0], 1e-6));
        for (std::size_t j = 0; j < xs.size(); ++j) CHECK_THAT(f.betas[j], WithinAbs(b[j + 1], 1e-6));
        CHECK_THAT(f.cd, WithinAbs(oracle::r_squared(gen::values(y), cols, gen::probs(y)), 1e-6));
    }
}

TEST_CASE("relaxed quantile fit matches pair enumeration", "[conditional][oracle]") {
    gen::Rng rng(53);
    for (int t = 0; t < 40; ++t) {
        const double a = t % 2 == 0 ? 0.3 : 0.7;
        const auto sp = gen::space(rng, 4);
        const auto x = gen::variable(rng, sp), y = gen::variable(rng, sp);
        const auto f = fit(R::expected_loss(), S::pinball(a), y, {x}, 1e-8, FitMode::Relaxed);
        const auto o = oracle::pinball_pairs(gen::values(y), gen::values(x), gen::probs(y), a);
        CHECK_THAT(f.objective, WithinAbs(o.objective, 1e-6));
    }
}

TEST_CASE("fit equivariance", "[conditional][property]") {
    gen::Rng rng(54);
    const std::vector<std::pair<R, S>> combos{{R::expected_loss(), S::squared()},
                                              {R::expected_shortfall(0.3), S::linex(1.0)},
                                              {R::mean_semi_deviation(0.5), S::expectile(0.3)}};
    for (const auto& [rho, s] : combos) {
        INFO(rho.spec() << " / " << s.spec());
        for (int t = 0; t < 8; ++t) {
            const auto sp = gen::space(rng, gen::integer(rng, 8, 25));
            const std::size_t k = gen::integer(rng, 1, 2);
            const auto xs = regressors(rng, sp, k);
            const auto y = gen::variable(rng, sp);
            const auto base = fit(rho, s, y, xs);
            CHECK(base.objective >= 0.0);
            CHECK(base.cd <= 1.0);

            // mu* is minus the risk of the residual after the slope terms.
            auto slope_part = y;
            for (std::size_t j = 0; j < k; ++j) slope_part -= base.betas[j] * xs[j];
            CHECK_THAT(base.mu_star, WithinAbs(-solve(rho, s, slope_part).r_value, 1e-6));

            const double c = gen::uniform(rng, -3, 3);
            const auto moved = fit(rho, s, y + c, xs);
            CHECK_THAT(moved.mu_star, WithinAbs(base.mu_star + c, 1e-5));

            std::vector<double> cvec(k);
            auto shifted = y;
            for (std::size_t j = 0; j < k; ++j) shifted += (cvec[j] = gen::uniform(rng, -2, 2)) * xs[j];
            const auto sh = fit(rho, s, shifted, xs);
            for (std::size_t j = 0; j < k; ++j) CHECK_THAT(sh.betas[j], WithinAbs(base.betas[j] + cvec[j], 1e-5));

            // Reparameterization X -> X A.
            Eigen::MatrixXd a = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
            a += 2.0 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
            std::vector<ScenarioVariable> mixed;
            for (std::size_t j = 0; j < k; ++j) {
                auto col = ScenarioVariable::constant(sp, 0.0);
                for (std::size_t i = 0; i < k; ++i)
                    col += a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * xs[i];
                mixed.push_back(col);
            }
            const auto rp = fit(rho, s, y, mixed);
            Eigen::VectorXd b(static_cast<Eigen::Index>(k));
            for (std::size_t j = 0; j < k; ++j) b[static_cast<Eigen::Index>(j)] = base.betas[j];
            const Eigen::VectorXd expected = a.lu().solve(b);
            for (std::size_t j = 0; j < k; ++j)
                CHECK_THAT(rp.betas[j], WithinAbs(expected[static_cast<Eigen::Index>(j)], 1e-5));

            // The residual has nothing left to explain.
            const auto eps = y - fitted(base, xs, sp);
            const auto re = fit(rho, s, eps, xs);
            CHECK_THAT(re.mu_star, WithinAbs(0.0, 1e-5));
            for (double bj : re.betas) CHECK_THAT(bj, WithinAbs(0.0, 1e-5));
        }
    }
}

TEST_CASE("quantile fit is positively homogeneous", "[conditional][property]") {
    gen::Rng rng(55);
    for (int t = 0; t < 10; ++t) {
        const auto sp = gen::space(rng, gen::integer(rng, 5, 12));
        const auto xs = regressors(rng, sp, 1);
        const auto y = gen::variable(rng, sp);
        const auto s = S::pinball(0.3);
        const auto base = fit(R::expected_loss(), s, y, xs, 1e-8, FitMode::Relaxed);
        for (double lam : {0.5, 3.0}) {
            const auto sc = fit(R::expected_loss(), s, lam * y, xs, 1e-8, FitMode::Relaxed);
            CHECK_THAT(sc.objective, WithinAbs(lam * base.objective, 1e-6));
        }
    }
}

TEST_CASE("conditional risk is not monotone pointwise", "[conditional]") {
    // Y <= Z but the least-squares fit of Z dips below that of Y at the last
    // row, so R(Z|X) > R(Y|X) there.
    const auto sp = FiniteScenarioSpace::uniform(3);
    const ScenarioVariable x(sp, {0, 1, 2});
    const ScenarioVariable y(sp, {0, 0, 0});
    const ScenarioVariable z(sp, {1, 0, 0});
    const auto fy = fit(R::expected_loss(), S::squared(), y, {x});
    const auto fz = fit(R::expected_loss(), S::squared(), z, {x});
    CHECK_THAT(fz.mu_star, WithinAbs(5.0 / 6.0, 1e-9));
    CHECK_THAT(fz.betas[0], WithinAbs(-0.5, 1e-9));
    CHECK(conditional_risk_row(fz, {2.0}) > conditional_risk_row(fy, {2.0}) + 0.1);
}

TEST_CASE("unrelated regressor explains almost nothing", "[conditional]") {
    gen::Rng rng(56);
    const auto sp = FiniteScenarioSpace::uniform(400);
    const auto x = gen::variable(rng, sp), y = gen::variable(rng, sp);
    const auto f = fit(R::expected_loss(), S::squared(), y, {x});
    const double cd = cd_metric(R::expected_loss(), S::squared(), y, {x}, f);
    CHECK(cd >= -0.05);
    CHECK(cd <= 0.1);
    CHECK_THAT(cd, WithinAbs(f.cd, 1e-12));
}

TEST_CASE("no regressors reduces to the unconditional solve", "[conditional]") {
    gen::Rng rng(57);
    const auto y = gen::variable(rng, gen::space(rng, 10));
    const auto f = fit(R::expected_shortfall(0.4), S::linex(1.0), y, {});
    const auto u = solve(R::expected_shortfall(0.4), S::linex(1.0), y);
    CHECK(f.mu_star == u.argmin_lo);
    CHECK(f.objective == u.d_value);
    CHECK(f.cd == 0.0);
}

TEST_CASE("fit errors", "[conditional]") {
    gen::Rng rng(58);
    const auto sp = FiniteScenarioSpace::uniform(6);
    const auto x = gen::variable(rng, sp), y = gen::variable(rng, sp);
    const auto el = R::expected_loss();
    CHECK_THROWS_AS(fit(el, S::squared(), y, {x, 2.0 * x + 1.0}), SingularDesignError);
    CHECK_THROWS_AS(fit(el, S::squared(), y, {ScenarioVariable::constant(sp, 3.0)}), SingularDesignError);
    CHECK_THROWS_AS(fit(el, S::squared(), y, {ScenarioVariable::constant(sp, 0.0)}), SingularDesignError);
    CHECK_THROWS_AS(fit(el, S::pinball(0.5), y, {x}), UnsupportedScoreError);
    CHECK_THROWS_AS(fit(el, S::huber(1.0), y, {x}, 1e-8, FitMode::Strict), UnsupportedScoreError);
    CHECK_NOTHROW(fit(el, S::huber(1.0), y, {x}, 1e-8, FitMode::Auto));
    CHECK_THROWS_AS(fit(el, S::squared(), y, {gen::variable(rng, FiniteScenarioSpace::uniform(5))}), DimensionError);
    CHECK_THROWS_AS(fit(el, S::squared(), y, {x}, 0.0), DomainError);
    const auto f = fit(el, S::squared(), y, {x});
    CHECK_THROWS_AS(cd_metric(el, S::squared(), ScenarioVariable::constant(sp, 1.0), {x}, f), DomainError);
    CHECK_THROWS_AS(cd_metric(el, S::squared(), y, {}, f), DimensionError);
}
