#include "vflow/planar.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "vflow/errors.hpp"
#include "vflow/ode.hpp"

namespace vflow::planar {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
using cplx = std::complex<double>;

// log(2 cosh s - 2 cos t), written to survive large |s|
double log_2cosh_2cos(double s, double t) {
    const double as = std::abs(s);
    if (as > 20.0) {
        const double e = std::exp(-as);
        return as + std::log1p(e * e - 2.0 * std::cos(t) * e);
    }
    return std::log(2.0 * std::cosh(s) - 2.0 * std::cos(t));
}

double gfun(double s, double t) {
    return -log_2cosh_2cos(s, t) / (4.0 * kPi);
}

double gfun_s(double s, double t) {
    const double as = std::abs(s);
    if (as > 20.0) {
        const double e = std::exp(-as);
        const double num = (s > 0 ? 1.0 : -1.0) * (1.0 - e * e);
        return -num / (1.0 + e * e - 2.0 * std::cos(t) * e) / (4.0 * kPi);
    }
    return -std::sinh(s) / (std::cosh(s) - std::cos(t)) / (4.0 * kPi);
}

double gfun_t(double s, double t) {
    const double as = std::abs(s);
    if (as > 20.0) {
        const double e = std::exp(-as);
        return -std::sin(t) * e / (1.0 + e * e - 2.0 * std::cos(t) * e) / (2.0 * kPi);
    }
    return -std::sin(t) / (std::cosh(s) - std::cos(t)) / (4.0 * kPi);
}

} // namespace

GreenEval green_electro_disk(Vec2 z, Vec2 w) {
    if (z.norm() >= 1.0 || w.norm() >= 1.0)
        throw OutsideDomain("disk green function requires both points strictly inside");
    if ((z - w).norm() < 1e-12)
        throw CoincidentPoints("green evaluation at coincident points");
    const cplx zc{z.x, z.y}, wc{w.x, w.y};
    const cplx num = zc - wc;
    const cplx den = 1.0 - zc * std::conj(wc);

    GreenEval out;
    out.value = -(std::log(std::abs(num)) - std::log(std::abs(den))) / kTwoPi;
    const cplx a = 1.0 / num + std::conj(wc) / den; // d/dz of log num - log den
    out.grad = Vec2{a.real(), -a.imag()} * (-1.0 / kTwoPi);
    return out;
}

double double_disk_weight(Vec2 p) {
    const double n2 = p.norm2();
    return n2 <= 1.0 ? 1.0 : 1.0 / (n2 * n2);
}

namespace {

// A(p) and its radial structure for the doubled disk
double pancake_a(Vec2 p) {
    const double n2 = p.norm2();
    if (n2 <= 1.0)
        return n2;
    return 1.0 / n2 + 2.0 * std::log(n2);
}

Vec2 pancake_a_grad(Vec2 p) {
    const double n2 = p.norm2();
    if (n2 <= 1.0)
        return p * 2.0;
    return p * (-2.0 / (n2 * n2) + 4.0 / n2);
}

} // namespace

GreenEval green_double_disk(Vec2 z, Vec2 w) {
    if ((z - w).norm() < 1e-12)
        throw CoincidentPoints("green evaluation at coincident points");
    GreenEval out;
    const Vec2 d = z - w;
    out.value = (-4.0 * std::log(d.norm()) + pancake_a(z) + pancake_a(w) - 1.5) / (8.0 * kPi);
    out.grad = (d * (-4.0 / d.norm2()) + pancake_a_grad(z)) * (1.0 / (8.0 * kPi));
    return out;
}

double electro_from_double_residual(Vec2 z, Vec2 w) {
    const Vec2 w_mirror = w * (1.0 / w.norm2());
    const double recovered = green_double_disk(z, w).value - green_double_disk(z, w_mirror).value;
    return std::abs(recovered - green_electro_disk(z, w).value);
}

GreenEval green_sphere(Vec2 z, Vec2 w) {
    if ((z - w).norm() < 1e-12)
        throw CoincidentPoints("green evaluation at coincident points");
    const Vec2 d = z - w;
    const double cz = 1.0 + z.norm2(), cw = 1.0 + w.norm2();

    GreenEval out;
    out.value = -(std::log(d.norm2() / (cz * cw)) + 1.0) / (4.0 * kPi);
    out.grad = (d * (2.0 / d.norm2()) - z * (2.0 / cz)) * (-1.0 / (4.0 * kPi));
    return out;
}

Annulus::Annulus(double r_, double R_) : r(r_), R(R_) {
    if (!(r > 0.0) || !(R > r) || !std::isfinite(R))
        throw ConfigError("annulus radii must satisfy 0 < r < R");
    L = std::log(R / r);
}

bool Annulus::contains(Vec2 z, double clearance) const {
    const double n = z.norm();
    return n > r + clearance && n < R - clearance;
}

double Annulus::capacity_P() const {
    return kPi / L;
}

double Annulus::capacity_Q() const {
    return L / kPi;
}

ScalarField harmonic_measure(const Annulus& an, Vec2 z) {
    const double n2 = z.norm2();
    const double n = std::sqrt(n2);
    if (!(n >= an.r * (1.0 - 1e-12)) || !(n <= an.R * (1.0 + 1e-12)))
        throw OutsideDomain("harmonic measure evaluated outside the closed annulus");
    ScalarField out;
    out.value = std::log(an.R / std::sqrt(n2)) / an.L;
    out.grad = z * (-1.0 / (an.L * n2));
    return out;
}

GreenEval green_electro_annulus(const Annulus& an, Vec2 z, Vec2 w, double tol) {
    // allow evaluation on the closed annulus: the walls are regular points of
    // the series (where the value vanishes), only genuine exterior is an error
    if (!an.contains(z, -1e-12) || !an.contains(w, -1e-12))
        throw OutsideDomain("annulus green function requires both points inside");
    if ((z - w).norm() < 1e-12)
        throw CoincidentPoints("green evaluation at coincident points");

    const double L = an.L;
    const double lz = 0.5 * std::log(z.norm2());
    const double lw = 0.5 * std::log(w.norm2());
    const double A = lz - lw;
    const double B = lz + lw - 2.0 * std::log(an.R);
    const double th = std::atan2(z.y, z.x) - std::atan2(w.y, w.x);

    const Vec2 grad_log = z * (1.0 / z.norm2());        // of A and of B
    const Vec2 grad_th = Vec2{-z.y, z.x} * (1.0 / z.norm2());

    auto term = [&](int n, double& val, Vec2& grad) {
        const double sa = A - 2.0 * n * L;
        const double sb = B - 2.0 * n * L;
        val = gfun(sa, th) - gfun(sb, th);
        grad = grad_log * (gfun_s(sa, th) - gfun_s(sb, th)) +
               grad_th * (gfun_t(sa, th) - gfun_t(sb, th));
    };

    GreenEval out;
    double v;
    Vec2 g;
    term(0, v, g);
    out.value = v;
    out.grad = g;

    int quiet = 0;
    bool converged = false;
    for (int n = 1; n <= 400; ++n) {
        double vp, vm;
        Vec2 gp, gm;
        term(n, vp, gp);
        term(-n, vm, gm);
        out.value += vp + vm;
        out.grad = out.grad + gp + gm;
        if (std::abs(vp + vm) < tol) {
            if (++quiet >= 2) {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    if (!converged)
        throw SeriesNotConverged("annulus image series did not reach tolerance");

    const ScalarField uz = harmonic_measure(an, z);
    const ScalarField uw = harmonic_measure(an, w);
    out.value -= (L / kTwoPi) * uz.value * uw.value;
    out.grad = out.grad - uz.grad * ((L / kTwoPi) * uw.value);
    return out;
}

ScalarField robin_electro_annulus(const Annulus& an, Vec2 z, double tol) {
    if (!an.contains(z))
        throw OutsideDomain("annulus robin function requires a point strictly inside");

    const double L = an.L;
    const double B0 = std::log(z.norm2() / (an.R * an.R));
    const Vec2 grad_b0 = z * (2.0 / z.norm2());

    ScalarField out;
    out.value = 0.5 * std::log(z.norm2()) / kTwoPi - gfun(B0, 0.0);
    double gs_sum = -gfun_s(B0, 0.0);

    int quiet = 0;
    bool converged = false;
    for (int n = 1; n <= 400; ++n) {
        const double bracket =
            2.0 * gfun(2.0 * n * L, 0.0) - gfun(B0 - 2.0 * n * L, 0.0) - gfun(B0 + 2.0 * n * L, 0.0);
        out.value += bracket;
        gs_sum += -gfun_s(B0 - 2.0 * n * L, 0.0) - gfun_s(B0 + 2.0 * n * L, 0.0);
        if (std::abs(bracket) < tol) {
            if (++quiet >= 2) {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    if (!converged)
        throw SeriesNotConverged("annulus image series did not reach tolerance");

    const ScalarField u = harmonic_measure(an, z);
    out.value -= (L / kTwoPi) * u.value * u.value;
    out.grad = z * (1.0 / (kTwoPi * z.norm2())) + grad_b0 * gs_sum -
               u.grad * ((L / kPi) * u.value);
    return out;
}

GreenEval green_hydro_annulus(const Annulus& an, Vec2 z, Vec2 w, double p, double tol) {
    GreenEval out = green_electro_annulus(an, z, w, tol);
    const double q = an.capacity_Q();
    const ScalarField uz = harmonic_measure(an, z);
    const ScalarField uw = harmonic_measure(an, w);
    out.value += 0.5 * q * (uz.value - p) * (uw.value - p);
    out.grad = out.grad + uz.grad * (0.5 * q * (uw.value - p));
    return out;
}

ScalarField robin_hydro_annulus(const Annulus& an, Vec2 z, double p, double tol) {
    ScalarField out = robin_electro_annulus(an, z, tol);
    const double q = an.capacity_Q();
    const ScalarField u = harmonic_measure(an, z);
    out.value += 0.5 * q * (u.value - p) * (u.value - p);
    out.grad = out.grad + u.grad * (q * (u.value - p));
    return out;
}

double flux_clockwise(double c, const std::function<Vec2(Vec2)>& grad_field, int n) {
    // counterclockwise flux integral of the radial derivative, negated
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double th = kTwoPi * (i + 0.5) / n;
        const Vec2 rhat{std::cos(th), std::sin(th)};
        acc += dot(grad_field(rhat * c), rhat);
    }
    return -acc * c * kTwoPi / n;
}

double reduced_hamiltonian(const Annulus& an, const AnnulusVortexState& st) {
    const std::size_t n = st.z.size();
    double h = 0.25 * an.capacity_Q() * st.B * st.B;
    for (std::size_t j = 0; j < n; ++j) {
        h += 0.5 * st.gamma[j] * st.gamma[j] * robin_electro_annulus(an, st.z[j]).value;
        for (std::size_t k = j + 1; k < n; ++k)
            h += st.gamma[j] * st.gamma[k] * green_electro_annulus(an, st.z[j], st.z[k]).value;
    }
    return h;
}

double lin_hamiltonian(const Annulus& an, const std::vector<Vec2>& z,
                       const std::vector<double>& gamma, double p) {
    const double q = an.capacity_Q();
    const std::size_t n = z.size();
    double h = 0.0;
    std::vector<double> u(n);
    for (std::size_t j = 0; j < n; ++j)
        u[j] = harmonic_measure(an, z[j]).value;
    for (std::size_t j = 0; j < n; ++j) {
        h += 0.5 * gamma[j] * gamma[j] *
             (robin_electro_annulus(an, z[j]).value + 0.5 * q * u[j] * u[j]);
        for (std::size_t k = j + 1; k < n; ++k)
            h += gamma[j] * gamma[k] *
                 (green_electro_annulus(an, z[j], z[k]).value + 0.5 * q * u[j] * u[k]);
        h += gamma[j] * (-0.5 * q * p * u[j]); // circulating-flow stream term
    }
    return h;
}

AnnulusTrajectory integrate_annulus(const Annulus& an, const std::vector<Vec2>& z0,
                                    const std::vector<double>& gamma,
                                    const AnnulusOptions& opt) {
    if (z0.size() != gamma.size())
        throw ConfigError("vortex positions and strengths disagree in count");
    if (z0.empty())
        throw ConfigError("at least one vortex is required");
    if (!(opt.sample_dt > 0.0))
        throw ConfigError("sample_dt must be positive");
    if (!(opt.t_end > 0.0))
        throw ConfigError("t_end must be positive");
    for (const Vec2& z : z0)
        if (!an.contains(z, opt.wall_clearance))
            throw OutsideDomain("initial vortex position outside the annulus");

    const std::size_t n = z0.size();
    const double q = an.capacity_Q();

    double p = opt.p;
    double measures0 = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        measures0 += gamma[j] * harmonic_measure(an, z0[j]).value;
    if (opt.impulsive_start)
        p = measures0;

    State y0(2 * n + 1);
    for (std::size_t j = 0; j < n; ++j) {
        y0[2 * j] = z0[j].x;
        y0[2 * j + 1] = z0[j].y;
    }
    y0[2 * n] = p - measures0;

    auto rhs = [&](double, const State& y, State& dy) {
        dy.assign(2 * n + 1, 0.0);
        const double B = y[2 * n];
        double bdot = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const Vec2 s{y[2 * j], y[2 * j + 1]};
            Vec2 grad = robin_electro_annulus(an, s, opt.series_tol).grad * (0.5 * gamma[j]);
            for (std::size_t k = 0; k < n; ++k) {
                if (k == j)
                    continue;
                const Vec2 sk{y[2 * k], y[2 * k + 1]};
                grad = grad + green_electro_annulus(an, s, sk, opt.series_tol).grad * gamma[k];
            }
            const ScalarField u = harmonic_measure(an, s);
            grad = grad - u.grad * (0.5 * q * B);
            const Vec2 v{grad.y, -grad.x};
            dy[2 * j] = v.x;
            dy[2 * j + 1] = v.y;
            bdot -= gamma[j] * dot(u.grad, v);
        }
        dy[2 * n] = bdot;
    };

    OdeOptions oo;
    oo.rel_tol = opt.rel_tol;
    oo.abs_tol = opt.abs_tol;
    Dopri5 stepper(rhs, oo);

    AnnulusTrajectory out;
    out.gamma = gamma;
    out.p = p;
    out.t.push_back(0.0);
    out.y.push_back(y0);
    out.t_final = 0.0;

    auto bad_state = [&](const State& y, std::string& reason) {
        for (std::size_t j = 0; j < n; ++j) {
            const Vec2 s{y[2 * j], y[2 * j + 1]};
            if (!an.contains(s, opt.wall_clearance)) {
                reason = "wall_contact";
                return true;
            }
            for (std::size_t k = j + 1; k < n; ++k) {
                const Vec2 sk{y[2 * k], y[2 * k + 1]};
                if ((s - sk).norm() < opt.collision_threshold) {
                    reason = "collision";
                    return true;
                }
            }
        }
        return false;
    };

    long next_sample = 1;
    State ys, yend;
    std::string halt;

    stepper.integrate(0.0, y0, opt.t_end, [&](const DenseStep& ds) {
        double ts = next_sample * opt.sample_dt;
        while (ts <= ds.t1() + 1e-14 * std::max(1.0, std::abs(ds.t1()))) {
            ds.eval(std::min(ts, ds.t1()), ys);
            out.t.push_back(ts);
            out.y.push_back(ys);
            ++next_sample;
            ts = next_sample * opt.sample_dt;
        }
        ds.eval(ds.t1(), yend);
        out.t_final = ds.t1();
        if (bad_state(yend, halt)) {
            if (out.t.empty() || out.t.back() < ds.t1() - 1e-14) {
                out.t.push_back(ds.t1());
                out.y.push_back(yend);
            }
            return false;
        }
        return true;
    });

    if (!halt.empty()) {
        out.halt_reason = halt;
        return out;
    }
    if (out.t.back() < opt.t_end - 1e-12 * std::max(1.0, opt.t_end)) {
        out.t.push_back(opt.t_end);
        out.y.push_back(yend);
    }
    out.t_final = opt.t_end;
    return out;
}

AnnulusReport annulus_report(const Annulus& an, const AnnulusTrajectory& traj) {
    if (traj.t.empty())
        throw ConfigError("empty trajectory");
    const std::size_t n = traj.gamma.size();

    AnnulusReport rep;
    rep.P = an.capacity_P();
    rep.Q = an.capacity_Q();
    rep.p_initial = traj.p;

    double h0 = 0.0;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        AnnulusVortexState st;
        st.gamma = traj.gamma;
        st.t = traj.t[i];
        st.B = traj.y[i][2 * n];
        double measures = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            st.z.push_back({traj.y[i][2 * j], traj.y[i][2 * j + 1]});
            measures += traj.gamma[j] * harmonic_measure(an, st.z[j]).value;
        }
        const double h = reduced_hamiltonian(an, st);
        if (i == 0)
            h0 = h;
        rep.h_drift_max = std::max(rep.h_drift_max, std::abs(h - h0));
        rep.p_drift_max = std::max(rep.p_drift_max, std::abs(st.B + measures - traj.p));
    }
    return rep;
}

} // namespace vflow::planar
