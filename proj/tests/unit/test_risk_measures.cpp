#include "catch_amalgamated.hpp"

#include "generators.hpp"
#include "oracles.hpp"
#include "robrisk/errors.hpp"
#include "robrisk/risk_measures.hpp"

#include <algorithm>

using namespace robrisk;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

using R = CoherentRiskMeasure;

ScenarioVariable uniform_variable(std::vector<double> v) {
    const auto sp = FiniteScenarioSpace::uniform(v.size());
    return ScenarioVariable(sp, std::move(v));
}

std::vector<R> measures() {
    return {R::expected_loss(),         R::expected_shortfall(0.05), R::expected_shortfall(0.5),
            R::expected_shortfall(0.9), R::expectile_var(0.1),       R::expectile_var(0.5),
            R::mean_semi_deviation(0),  R::mean_semi_deviation(0.6), R::mean_semi_deviation(1),
            R::maximum_loss()};
}

// Random q with q_i <= p_i / alpha: a convex mixture of the extreme points of
// the ES dual set taken from random outcome orders.
std::vector<double> random_es_measure(gen::Rng& rng, const std::vector<double>& p, double alpha) {
    const std::size_t n = p.size();
    std::vector<double> q(n, 0.0);
    double total = 0.0;
    for (int part = 0; part < 3; ++part) {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        const double w = gen::uniform(rng, 0.1, 1.0);
        double left = 1.0;
        for (std::size_t i : order) {
            const double take = std::min(left, p[i] / alpha);
            q[i] += w * take;
            left -= take;
        }
        total += w;
    }
    for (double& v : q) v /= total;
    return q;
}

} // namespace

TEST_CASE("risk measure examples", "[risk]") {
    CHECK_THAT(R::expected_loss().evaluate(uniform_variable({1, 2, 3})), WithinAbs(-2.0, 1e-15));
    CHECK_THAT(R::expected_shortfall(0.5).evaluate(uniform_variable({1, 2, 3, 4})), WithinAbs(-1.5, 1e-15));
    CHECK(R::maximum_loss().evaluate(uniform_variable({-3, 0, 7})) == 3.0);
    gen::Rng rng(31);
    for (int t = 0; t < 50; ++t) {
        const auto z = gen::variable(rng, gen::space(rng, gen::integer(rng, 1, 20)));
        CHECK_THAT(R::expectile_var(0.5).evaluate(z), WithinAbs(R::expected_loss().evaluate(z), 1e-12));
    }
}

TEST_CASE("dual maximizer examples", "[risk]") {
    const auto z = ScenarioVariable(FiniteScenarioSpace::make({0.1, 0.2, 0.3, 0.4}), {4, -1, 2, 0});
    const auto q_el = R::expected_loss().dual_maximizer(z);
    for (std::size_t i = 0; i < 4; ++i) CHECK(q_el[i] == z.space()->probability(i));

    const auto q_es = R::expected_shortfall(0.5).dual_maximizer(uniform_variable({1, 2, 3, 4}));
    CHECK(std::vector<double>(q_es.values().begin(), q_es.values().end()) == std::vector<double>{0.5, 0.5, 0, 0});

    const auto q_ml = R::maximum_loss().dual_maximizer(uniform_variable({-3, 0, 7}));
    CHECK(std::vector<double>(q_ml.values().begin(), q_ml.values().end()) == std::vector<double>{1, 0, 0});
}

TEST_CASE("closed forms against independent oracles", "[risk][oracle]") {
    gen::Rng rng(32);
    for (int t = 0; t < 100; ++t) {
        const auto z = gen::variable(rng, gen::space(rng, gen::integer(rng, 1, 40)));
        const auto v = gen::values(z), p = gen::probs(z);
        const double a = gen::uniform(rng, 0.01, 0.99);
        const double e = gen::uniform(rng, 0.02, 0.5);
        const double b = gen::uniform(rng, 0, 1);
        CHECK_THAT(R::expected_shortfall(a).evaluate(z), WithinAbs(oracle::expected_shortfall(v, p, a), 1e-12));
        CHECK_THAT(R::expectile_var(e).evaluate(z), WithinAbs(-oracle::expectile(v, p, e), 1e-10));
        CHECK_THAT(expectile_value(z, a), WithinAbs(oracle::expectile(v, p, a), 1e-10));
        double semi = 0.0;
        const double m = oracle::mean(v, p);
        for (std::size_t i = 0; i < v.size(); ++i) semi += p[i] * std::max(m - v[i], 0.0) * std::max(m - v[i], 0.0);
        CHECK_THAT(R::mean_semi_deviation(b).evaluate(z), WithinAbs(-m + b * std::sqrt(semi), 1e-12));
        CHECK(R::maximum_loss().evaluate(z) == -*std::min_element(v.begin(), v.end()));
    }
}

TEST_CASE("coherence axioms", "[risk][property]") {
    gen::Rng rng(33);
    for (const auto& rho : measures()) {
        INFO(rho.spec());
        for (int t = 0; t < 100; ++t) {
            const auto sp = gen::space(rng, gen::integer(rng, 1, 25));
            const auto z = gen::variable(rng, sp), w = gen::variable(rng, sp);
            const double c = gen::uniform(rng, -4, 4), lam = gen::uniform(rng, 0, 5);
            auto above = gen::values(z);
            for (double& x : above) x += gen::uniform(rng, 0, 1);
            CHECK(rho.evaluate(z) >= rho.evaluate(ScenarioVariable(sp, above)) - 1e-12);
            CHECK_THAT(rho.evaluate(z + c), WithinAbs(rho.evaluate(z) - c, 1e-10));
            CHECK_THAT(rho.evaluate(lam * z), WithinAbs(lam * rho.evaluate(z), 1e-10));
            CHECK(rho.evaluate(z + w) <= rho.evaluate(z) + rho.evaluate(w) + 1e-10);
            CHECK(rho.evaluate(z) >= R::expected_loss().evaluate(z) - 1e-12);
        }
    }
}

TEST_CASE("dual maximizer attains the value and is feasible", "[risk][property]") {
    gen::Rng rng(34);
    for (const auto& rho : measures()) {
        INFO(rho.spec());
        for (int t = 0; t < 100; ++t) {
            const auto sp = gen::space(rng, gen::integer(rng, 1, 25));
            const auto z = t % 3 == 0 ? gen::lattice_variable(rng, sp) : gen::variable(rng, sp);
            const auto q = rho.dual_maximizer(z);
            CHECK_THAT(expectation(-z, q), WithinAbs(rho.evaluate(z), 1e-10));
            double sum = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) {
                CHECK(q[i] >= 0.0);
                sum += q[i];
                if (rho.kind() == R::Kind::ExpectedShortfall)
                    CHECK(q[i] <= sp->probability(i) / rho.parameter() * (1 + 1e-12));
            }
            CHECK_THAT(sum, WithinAbs(1.0, 1e-12));
        }
    }
}

TEST_CASE("random feasible ES measures never beat the maximizer", "[risk][property]") {
    gen::Rng rng(35);
    for (int t = 0; t < 100; ++t) {
        const auto sp = gen::space(rng, gen::integer(rng, 2, 15));
        const auto z = gen::variable(rng, sp);
        const double a = gen::uniform(rng, 0.05, 0.95);
        const auto rho = R::expected_shortfall(a);
        const auto p = gen::probs(z);
        for (int k = 0; k < 100; ++k)
            CHECK(expectation(-z, MeasureWeights(random_es_measure(rng, p, a))) <= rho.evaluate(z) + 1e-10);
    }
}

TEST_CASE("risk measure parameters and parsing", "[risk][parse]") {
    CHECK_THROWS_AS(R::expected_shortfall(0), DomainError);
    CHECK_THROWS_AS(R::expected_shortfall(1), DomainError);
    CHECK_THROWS_AS(R::expectile_var(0.6), DomainError);
    CHECK_THROWS_AS(R::mean_semi_deviation(1.5), DomainError);
    CHECK_THROWS_AS(expectile_value(uniform_variable({1, 2}), 1.0), DomainError);
    for (const auto& rho : measures()) CHECK(parse_risk(rho.spec()) == rho);
    CHECK(parse_risk("es:0.05") == R::expected_shortfall(0.05));
    CHECK(parse_risk("ml").kind() == R::Kind::MaximumLoss);
    CHECK_THROWS_AS(parse_risk("es"), ParseError);
    CHECK_THROWS_AS(parse_risk("el:0.5"), ParseError);
    CHECK_THROWS_WITH(parse_risk("cvar:0.1"), ContainsSubstring("available") && ContainsSubstring("msd"));
    CHECK_THAT(risk_catalog(), ContainsSubstring("evar"));
}

TEST_CASE("directional dual maximizer breaks ties by the direction", "[risk]") {
    const auto z = uniform_variable({-1, 0, -1, 2});
    const std::vector<double> d{1.0, 0.0, -1.0, 0.0};
    const auto es = R::expected_shortfall(0.25).dual_maximizer(z, d);
    CHECK(std::vector<double>(es.values().begin(), es.values().end()) == std::vector<double>{0, 0, 1, 0});
    const auto es_plain = R::expected_shortfall(0.25).dual_maximizer(z);
    CHECK(es_plain[0] == 1.0);
    const auto ml = R::maximum_loss().dual_maximizer(z, d);
    CHECK(ml[2] == 1.0);
    // Away from ties the direction is irrelevant.
    const auto half = R::expected_shortfall(0.5).dual_maximizer(z, d);
    CHECK(std::vector<double>(half.values().begin(), half.values().end()) == std::vector<double>{0.5, 0, 0.5, 0});
    CHECK_THROWS_AS(R::expected_loss().dual_maximizer(z, std::vector<double>{1.0}), DimensionError);

    gen::Rng rng(36);
    for (const auto& rho : measures()) {
        for (int t = 0; t < 50; ++t) {
            const auto sp = gen::space(rng, gen::integer(rng, 1, 12));
            const auto v = gen::lattice_variable(rng, sp);
            std::vector<double> dir(v.size());
            for (double& x : dir) x = gen::uniform(rng, -1, 1);
            CHECK_THAT(expectation(-v, rho.dual_maximizer(v, dir)), WithinAbs(rho.evaluate(v), 1e-12));
        }
    }
}
