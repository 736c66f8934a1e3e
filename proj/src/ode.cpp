#include "vflow/ode.hpp"

#include <algorithm>
#include <cmath>

#include "vflow/errors.hpp"

namespace vflow {

namespace {

// Dormand-Prince 5(4) tableau (Hairer, Norsett & Wanner, DOPRI5).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kMinStep = 1e-12;

} // namespace

void DenseStep::eval(double t, State& y) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    y.resize(r1.size());
    for (std::size_t i = 0; i < r1.size(); ++i)
        y[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
}

double DenseStep::eval_component(double t, std::size_t i) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    return r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
}

Dopri5::Dopri5(RhsFn rhs, OdeOptions opt) : rhs_(std::move(rhs)), opt_(opt) {
    if (!(opt_.rel_tol > 1e-14 && opt_.rel_tol < 1e-2) ||
        !(opt_.abs_tol > 1e-14 && opt_.abs_tol < 1e-2))
        throw ConfigError("integration tolerances must lie in (1e-14, 1e-2)");
}

OdeStats Dopri5::integrate(double t0, State y, double t_end,
                           const std::function<bool(const DenseStep&)>& on_step) {
    const std::size_t n = y.size();
    OdeStats stats;
    if (t_end == t0)
        return stats;
    const double dir = (t_end > t0) ? 1.0 : -1.0;

    State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y1(n);
    rhs_(t0, y, k1);

    double t = t0;

    // initial step size: standard two-derivative heuristic
    double h = opt_.initial_step;
    if (h == 0.0) {
        double d0 = 0.0, dd1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = opt_.abs_tol + opt_.rel_tol * std::abs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            dd1 += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / n);
        dd1 = std::sqrt(dd1 / n);
        double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
        h0 = std::min(h0, std::abs(t_end - t0));
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dir * h0 * k1[i];
        rhs_(t + dir * h0, ytmp, k2);
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = opt_.abs_tol + opt_.rel_tol * std::abs(y[i]);
            d2 += ((k2[i] - k1[i]) / sc) * ((k2[i] - k1[i]) / sc);
        }
        d2 = std::sqrt(d2 / n) / h0;
        const double dmax = std::max(dd1, d2);
        const double h1 = (dmax <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                          : std::pow(0.01 / dmax, 1.0 / 5.0);
        h = std::min(100.0 * h0, h1);
    }
    h = std::abs(h);
    if (opt_.max_step > 0.0)
        h = std::min(h, opt_.max_step);

    bool rejected = false;
    DenseStep ds;
    ds.r1.resize(n);
    ds.r2.resize(n);
    ds.r3.resize(n);
    ds.r4.resize(n);
    ds.r5.resize(n);

    while (dir * (t_end - t) > 0.0) {
        if (h < kMinStep)
            throw StepUnderflow("step size underflow in time integration");
        if (dir * (t + dir * h - t_end) > 0.0)
            h = dir * (t_end - t);
        const double hs = dir * h;

        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * a21 * k1[i];
        rhs_(t + c2 * hs, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        rhs_(t + c3 * hs, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs_(t + c4 * hs, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs_(t + c5 * hs, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] +
                      hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs_(t + hs, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            y1[i] = y[i] +
                    hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        rhs_(t + hs, y1, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                    e6 * k6[i] + e7 * k7[i]);
            const double sc = opt_.abs_tol + opt_.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / n);

        if (err <= 1.0) {
            ds.t0 = t;
            ds.h = hs;
            for (std::size_t i = 0; i < n; ++i) {
                const double ydiff = y1[i] - y[i];
                const double bspl = hs * k1[i] - ydiff;
                ds.r1[i] = y[i];
                ds.r2[i] = ydiff;
                ds.r3[i] = bspl;
                ds.r4[i] = ydiff - hs * k7[i] - bspl;
                ds.r5[i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                                 d7 * k7[i]);
            }
            t += hs;
            y.swap(y1);
            k1.swap(k7); // FSAL
            ++stats.accepted;
            if (!on_step(ds))
                return stats;
            double fac = 0.9 * std::pow(err > 0.0 ? err : 1e-10, -0.2);
            fac = std::min(rejected ? 1.0 : 10.0, std::max(0.2, fac));
            h *= fac;
            if (opt_.max_step > 0.0)
                h = std::min(h, opt_.max_step);
            rejected = false;
        } else {
            const double fac = std::min(1.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
            h *= fac;
            rejected = true;
            ++stats.rejected;
        }
    }
    return stats;
}

} // namespace vflow
