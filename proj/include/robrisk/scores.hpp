#pragma once

#include <string>
#include <string_view>

namespace robrisk {

/// Scoring function S(x, y) = f(x - y) with f convex, f(0) = 0 and f > 0
/// elsewhere.
///
/// Besides values, each score exposes exact one-sided derivatives of f
/// (closed form, piece by piece) and flags describing which structural
/// hypotheses it satisfies. The flags are conservative: they gate solver
/// paths and property checks, so a flag is only set when it holds for the
/// whole parameter range.
class ScoreFunction {
public:
    enum class Kind { Squared, Pinball, Absolute, Huber, Linex, Expectile, Barron, Cost };

    static ScoreFunction squared();
    static ScoreFunction pinball(double alpha);
    static ScoreFunction absolute();
    static ScoreFunction huber(double beta);
    static ScoreFunction linex(double gamma);
    static ScoreFunction expectile(double alpha);
    static ScoreFunction barron(double shape);
    // Cost score with constant over/under-estimation costs G and 1-G; the
    // same function as pinball(G).
    static ScoreFunction cost(double g);

    Kind kind() const noexcept { return kind_; }
    double parameter() const noexcept { return param_; }

    // f(u) and its one-sided derivatives.
    double f(double u) const;
    double df_plus(double u) const;
    double df_minus(double u) const;

    // S(x, y) = f(x - y).
    double evaluate(double x, double y) const;
    // One-sided derivatives in y: d+/dy S = -f'_-(x - y), d-/dy S = -f'_+(x - y).
    double dplus_y(double x, double y) const;
    double dminus_y(double x, double y) const;

    bool positively_homogeneous() const noexcept { return ph_; }
    // y -> S(x, y) differentiable with strictly increasing derivative.
    bool smooth_strictly_convex() const noexcept { return smooth_; }
    bool derivative_convex() const noexcept { return dconvex_; }
    bool derivative_concave() const noexcept { return dconcave_; }

    // Canonical specification string, e.g. "pinball:0.05".
    std::string spec() const;

    friend bool operator==(const ScoreFunction&, const ScoreFunction&) = default;

private:
    ScoreFunction(Kind kind, double param, bool ph, bool smooth, bool dconvex, bool dconcave)
        : kind_(kind), param_(param), ph_(ph), smooth_(smooth), dconvex_(dconvex),
          dconcave_(dconcave) {}

    Kind kind_;
    double param_;
    bool ph_;
    bool smooth_;
    bool dconvex_;
    bool dconcave_;
};

// Parses `squared`, `pinball:0.05`, `huber:1.5`, `linex:2.0`,
// `expectile:0.25`, `barron:1.5`, `absolute`, `cost:0.3`.
ScoreFunction parse_score(std::string_view spec);

// Human-readable list of accepted score specifications.
std::string score_catalog();

} // namespace robrisk
