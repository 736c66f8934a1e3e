#include "vflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vflow/errors.hpp"
#include "vflow/quadrature.hpp"

namespace vflow {

HamiltonianParts hamiltonian_parts(const Surface& srf, const VortexState& st, double threshold) {
    const std::size_t n = st.size();
    HamiltonianParts out;

    std::vector<Vec2> s(n);
    std::vector<double> phi_at(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        s[j] = st.xy(srf.lat, j);
        if (!srf.is_flat)
            phi_at[j] = srf.phi(s[j]).value;
    }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
            if (srf.lat.reduce_xy(s[j] - s[k]).norm() < threshold)
                throw CollisionError("vortex pair closer than the collision threshold");

    // The self-energy uses the Robin field as configured on the surface; its
    // additive constant is a reporting convention, shared by every vortex, and
    // does not affect the dynamics.
    const double pair_c = srf.phi.pair_constant();
    for (std::size_t j = 0; j < n; ++j)
        out.vortex += 0.5 * st.gamma[j] * st.gamma[j] * srf.rob(s[j]).value;

    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            const double g_flat = srf.flat.eval(s[j], s[k]).value;
            out.vortex += st.gamma[j] * st.gamma[k] * (g_flat + phi_at[j] + phi_at[k] + pair_c);
        }
    }

    out.harmonic = 0.5 * st.eta.norm2();
    out.total = out.vortex + out.harmonic;
    return out;
}

double hamiltonian(const Surface& srf, const VortexState& st, double threshold) {
    return hamiltonian_parts(srf, st, threshold).total;
}

VortexSystem::VortexSystem(const Surface& srf, std::vector<double> gamma, RhsKind kind)
    : srf_(srf), gamma_(std::move(gamma)), kind_(kind) {
    for (double g : gamma_)
        total_gamma_ += g;
}

void VortexSystem::operator()(double, const State& y, State& dydt) const {
    const std::size_t n = gamma_.size();
    dydt.assign(2 * n + 2, 0.0);
    const Vec2 eta{y[2 * n], y[2 * n + 1]};

    std::vector<Vec2> s(n), force(n);
    for (std::size_t j = 0; j < n; ++j)
        s[j] = srf_.lat.to_xy({y[2 * j], y[2 * j + 1]});

    if (!srf_.is_flat) {
        for (std::size_t j = 0; j < n; ++j) {
            force[j] = srf_.rob(s[j]).grad * (0.5 * gamma_[j]);
            force[j] = force[j] + srf_.phi(s[j]).grad * (total_gamma_ - gamma_[j]);
        }
    }
    // pair interactions evaluated once so the two members see exactly
    // opposite gradients
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            const Vec2 g = srf_.flat.eval(s[j], s[k]).grad;
            force[j] = force[j] + g * gamma_[k];
            force[k] = force[k] - g * gamma_[j];
        }
    }

    double sum_gx = 0.0, sum_gy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = srf_.is_flat ? 1.0 : srf_.rho(s[j]).value;
        const double vx = (force[j].y + eta.x) / rho;
        const double vy = (-force[j].x + eta.y) / rho;
        const Vec2 duv = srf_.lat.to_uv({vx, vy});
        dydt[2 * j] = duv.x;
        dydt[2 * j + 1] = duv.y;
        sum_gx += gamma_[j] * vx;
        sum_gy += gamma_[j] * vy;
    }

    if (kind_ == RhsKind::complete && !srf_.is_flat) {
        dydt[2 * n] = sum_gy - total_gamma_ * eta.y;
        dydt[2 * n + 1] = -sum_gx + total_gamma_ * eta.x;
    }
}

State VortexSystem::pack(const VortexState& st) const {
    State y(2 * st.size() + 2);
    for (std::size_t j = 0; j < st.size(); ++j) {
        y[2 * j] = st.uv[j].x;
        y[2 * j + 1] = st.uv[j].y;
    }
    y[2 * st.size()] = st.eta.x;
    y[2 * st.size() + 1] = st.eta.y;
    return y;
}

VortexState VortexSystem::unpack(double t, const State& y) const {
    VortexState st;
    st.gamma = gamma_;
    st.t = t;
    const std::size_t n = gamma_.size();
    st.uv.resize(n);
    for (std::size_t j = 0; j < n; ++j)
        st.uv[j] = {y[2 * j], y[2 * j + 1]};
    st.eta = {y[2 * n], y[2 * n + 1]};
    return st;
}

double VortexSystem::min_pair_distance(const State& y) const {
    const std::size_t n = gamma_.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        const Vec2 sj = srf_.lat.to_xy({y[2 * j], y[2 * j + 1]});
        for (std::size_t k = j + 1; k < n; ++k) {
            const Vec2 sk = srf_.lat.to_xy({y[2 * k], y[2 * k + 1]});
            best = std::min(best, srf_.lat.reduce_xy(sj - sk).norm());
        }
    }
    return best;
}

Trajectory integrate(const Surface& srf, const VortexState& init, const IntegrateOptions& opt) {
    if (init.uv.size() != init.gamma.size())
        throw ConfigError("vortex positions and strengths disagree in count");
    if (init.uv.empty())
        throw ConfigError("at least one vortex is required");
    if (!(opt.sample_dt > 0.0))
        throw ConfigError("sample_dt must be positive");
    if (!(opt.t_end > init.t))
        throw ConfigError("t_end must exceed the initial time");

    VortexSystem sys(srf, init.gamma, opt.kind);
    OdeOptions oo;
    oo.rel_tol = opt.rel_tol;
    oo.abs_tol = opt.abs_tol;
    Dopri5 stepper([&sys](double t, const State& y, State& dy) { sys(t, y, dy); }, oo);

    Trajectory out;
    out.gamma = init.gamma;
    State y0 = sys.pack(init);
    if (init.uv.size() > 1 && sys.min_pair_distance(y0) < opt.collision_threshold)
        throw CollisionError("initial vortex pair closer than the collision threshold");
    out.t.push_back(init.t);
    out.y.push_back(y0);
    out.t_final = init.t;

    long next_sample = 1;
    State ys, yend;
    bool collided = false;

    const OdeStats stats = stepper.integrate(init.t, y0, opt.t_end, [&](const DenseStep& ds) {
        double ts = init.t + next_sample * opt.sample_dt;
        while (ts <= ds.t1() + 1e-14 * std::max(1.0, std::abs(ds.t1()))) {
            ds.eval(std::min(ts, ds.t1()), ys);
            if (sys.min_pair_distance(ys) < opt.collision_threshold) {
                collided = true;
                out.t_final = ts;
                return false;
            }
            out.t.push_back(ts);
            out.y.push_back(ys);
            ++next_sample;
            ts = init.t + next_sample * opt.sample_dt;
        }
        ds.eval(ds.t1(), yend);
        out.t_final = ds.t1();
        if (sys.min_pair_distance(yend) < opt.collision_threshold) {
            collided = true;
            return false;
        }
        return true;
    });
    out.steps_accepted = stats.accepted;
    out.steps_rejected = stats.rejected;

    if (collided) {
        out.halt_reason = "collision";
        return out;
    }
    if (out.t.back() < opt.t_end - 1e-12 * std::max(1.0, std::abs(opt.t_end))) {
        out.t.push_back(opt.t_end);
        out.y.push_back(yend);
    }
    out.t_final = opt.t_end;
    return out;
}

namespace {

struct LoopIntegrals {
    double circulation = 0.0; // loop integral of nu
    double flux = 0.0;        // loop integral of star nu
};

LoopIntegrals loop_integrals(const Surface& srf, const std::vector<Vec2>& curve,
                             const std::vector<Vec2>& s, const std::vector<double>& gamma,
                             Vec2 eta, double clearance) {
    static const GaussLegendre gl(64);
    const double total_gamma = [&] {
        double t = 0.0;
        for (double g : gamma)
            t += g;
        return t;
    }();

    LoopIntegrals out;
    // segments between consecutive vertices; the caller closes the loop,
    // possibly across the lattice (non-contractible cycles)
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const Vec2 p0 = curve[i];
        const Vec2 p1 = curve[i + 1];
        const Vec2 dir = p1 - p0;
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double x = 0.5 * (gl.nodes[q] + 1.0);
            const Vec2 z = p0 + dir * x;

            Vec2 w{};
            for (std::size_t k = 0; k < s.size(); ++k) {
                if (srf.lat.reduce_xy(z - s[k]).norm() < clearance)
                    throw CurveTooCloseToVortex("loop passes within the clearance of a vortex");
                w = w + srf.flat.eval(z, s[k]).grad * gamma[k];
            }
            if (!srf.is_flat)
                w = w + srf.phi(z).grad * total_gamma;
            const Vec2 nu = Vec2{w.y, -w.x} + eta;

            const double wgt = 0.5 * gl.weights[q];
            out.circulation += wgt * dot(nu, dir);
            out.flux += wgt * dot(nu.perp(), dir);
        }
    }
    return out;
}

} // namespace

ConservedReport conserved_report(const Surface& srf, const Trajectory& traj,
                                 const std::vector<Vec2>& curve, double curve_clearance) {
    if (traj.t.empty())
        throw ConfigError("empty trajectory");

    VortexSystem sys(srf, traj.gamma, RhsKind::complete);
    const std::size_t n = traj.gamma.size();
    const double total_gamma = [&] {
        double t = 0.0;
        for (double g : traj.gamma)
            t += g;
        return t;
    }();

    ConservedReport rep;
    const HamiltonianParts parts0 = hamiltonian_parts(srf, sys.unpack(traj.t[0], traj.y[0]));
    rep.h0 = parts0.total;
    rep.h_vort0 = parts0.vortex;
    rep.h_harm0 = parts0.harmonic;

    rep.momentum_defined = std::abs(total_gamma) < 1e-14;
    Vec2 p0{};
    std::vector<double> circ, flux;

    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const VortexState st = sys.unpack(traj.t[i], traj.y[i]);
        rep.h_drift_max =
            std::max(rep.h_drift_max, std::abs(hamiltonian(srf, st) - rep.h0));

        if (rep.momentum_defined) {
            Vec2 p = st.eta;
            for (std::size_t j = 0; j < n; ++j) {
                const Vec2 sj = st.xy(srf.lat, j); // unwrapped
                p.x -= st.gamma[j] * sj.y;
                p.y += st.gamma[j] * sj.x;
            }
            if (i == 0)
                p0 = p;
            rep.momentum_drift_max =
                std::max({rep.momentum_drift_max, std::abs(p.x - p0.x), std::abs(p.y - p0.y)});
        }

        if (curve.size() >= 2) {
            std::vector<Vec2> s(n);
            for (std::size_t j = 0; j < n; ++j)
                s[j] = st.xy(srf.lat, j);
            const LoopIntegrals li =
                loop_integrals(srf, curve, s, st.gamma, st.eta, curve_clearance);
            circ.push_back(li.circulation);
            flux.push_back(li.flux);
        }
    }

    if (curve.size() >= 2 && traj.t.size() >= 5) {
        // uniform prefix of the sample grid (the appended final point may be off it)
        const double dt = traj.t[1] - traj.t[0];
        std::size_t m = traj.t.size();
        for (std::size_t i = 2; i < traj.t.size(); ++i) {
            if (std::abs(traj.t[i] - (traj.t[0] + i * dt)) > 1e-9) {
                m = i;
                break;
            }
        }
        for (std::size_t i = 2; i + 2 < m; ++i) {
            const double didt =
                (circ[i - 2] - 8.0 * circ[i - 1] + 8.0 * circ[i + 1] - circ[i + 2]) / (12.0 * dt);
            const double resid = std::abs(didt - total_gamma * flux[i]);
            rep.rubicon_residual.push_back(resid);
            rep.rubicon_max = std::max(rep.rubicon_max, resid);
        }
    }
    return rep;
}

} // namespace vflow
