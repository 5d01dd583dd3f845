#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

namespace robrisk::detail {

struct EllipsoidResult {
    Eigen::VectorXd best;
    double f_best = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();  // valid lower bound on the minimum
    std::int64_t iterations = 0;
};

// Central-cut ellipsoid method for a convex function on a convex set, started
// from a ball that holds a minimizer. `oracle(x, g)` returns f(x) and a
// subgradient in g when x is feasible, or nullopt with g the normal of a
// separating halfspace {z : g'(z - x) <= 0} containing the feasible set.
// Stops at `cap` iterations or when the gap falls below rel_gap * |f_best|.
template <class Oracle>
EllipsoidResult ellipsoid_minimize(Oracle&& oracle, Eigen::VectorXd center, double radius, std::int64_t cap,
                                   double rel_gap) {
    const Eigen::Index d = center.size();
    const double dd = static_cast<double>(d);
    Eigen::MatrixXd shape = Eigen::MatrixXd::Identity(d, d) * (radius * radius);
    Eigen::VectorXd grad(d);
    EllipsoidResult out;
    out.best = center;

    for (std::int64_t k = 0; k < cap; ++k) {
        ++out.iterations;
        const std::optional<double> f = oracle(center, grad);
        if (f && *f < out.f_best) {
            out.f_best = *f;
            out.best = center;
        }
        const Eigen::VectorXd pg = shape * grad;
        const double gpg = grad.dot(pg);
        if (!(gpg > 0.0)) {
            if (f) break;  // zero subgradient: center is optimal
            return out;    // degenerate cut
        }
        const double width = std::sqrt(gpg);
        if (f) {
            out.lower = std::max(out.lower, std::min(out.f_best, *f - width));
            if (out.f_best - out.lower <= rel_gap * std::fabs(out.f_best)) break;
        }
        if (std::sqrt(shape.trace()) <= 1e-15 * (center.norm() + 1e-300)) break;

        const Eigen::VectorXd step = pg / width;
        if (d == 1) {
            center -= 0.5 * step;
            shape *= 0.25;
        } else {
            center -= step / (dd + 1.0);
            shape = (dd * dd / (dd * dd - 1.0)) * (shape - (2.0 / (dd + 1.0)) * step * step.transpose());
            shape = 0.5 * (shape + shape.transpose());
        }
    }
    return out;
}

} // namespace robrisk::detail
