#pragma once

#include <functional>
#include <vector>

namespace vflow {

/** Gauss-Legendre rule on [-1, 1]; nodes/weights computed once per order by
 *  Newton iteration on the Legendre polynomial (deterministic to the ulp). */
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
    explicit GaussLegendre(int order);

    /** Integral of f over [a, b] with a single panel. */
    double integrate(const std::function<double(double)>& f, double a, double b) const;
};

/** Adaptive Gauss-Kronrod (G7, K15) quadrature on [a, b].  Throws
 *  QuadratureFailure when the tolerance cannot be met within max_depth
 *  bisection levels. */
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-12, int max_depth = 40);

} // namespace vflow
