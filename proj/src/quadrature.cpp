#include "vflow/quadrature.hpp"

#include <cmath>

#include "vflow/errors.hpp"

namespace vflow {

GaussLegendre::GaussLegendre(int order) {
    nodes.resize(order);
    weights.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-like initial guess, then Newton on P_order
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
}

double GaussLegendre::integrate(const std::function<double(double)>& f, double a,
                                double b) const {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(c + h * nodes[i]);
    return h * s;
}

namespace {

// Gauss 7 / Kronrod 15 abscissae and weights on [-1,1] (symmetric half listed).
constexpr double xk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                          0.741531185599394, 0.586087235467691, 0.405845151377397,
                          0.207784955007898, 0.0};
constexpr double wk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                          0.140653259715525, 0.169004726639267, 0.190350578064785,
                          0.204432940075298, 0.209482141084728};
constexpr double wg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                          0.417959183673469};

struct GK {
    double integral;
    double error;
};

GK gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double resk = wk[7] * f(c);
    double resg = wg[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const double fv = f(c - h * xk[i]) + f(c + h * xk[i]);
        resk += wk[i] * fv;
        if (i % 2 == 1) resg += wg[i / 2] * fv;
    }
    return {resk * h, std::abs(resk - resg) * h};
}

double adapt(const std::function<double(double)>& f, double a, double b, double tol,
             int depth, int max_depth) {
    const GK r = gk15(f, a, b);
    if (r.error <= tol || r.error <= 1e-16 * std::abs(r.integral)) return r.integral;
    if (depth >= max_depth)
        throw QuadratureFailure("adaptive quadrature did not reach the requested tolerance");
    const double c = 0.5 * (a + b);
    return adapt(f, a, c, tol / 2, depth + 1, max_depth) +
           adapt(f, c, b, tol / 2, depth + 1, max_depth);
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
    return adapt(f, a, b, abs_tol, 0, max_depth);
}

} // namespace vflow
