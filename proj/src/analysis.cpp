#include "vflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "vflow/errors.hpp"

namespace vflow {

PoincareOrbit poincare_section(const Surface& srf, SectionSeed seed, double gamma,
                               const PoincareOptions& opt) {
    const double r0 = srf.rob(srf.lat.to_xy({0.0, seed.y})).value;
    const double eta_x2 = 2.0 * (opt.h_level - 0.5 * gamma * gamma * r0) - seed.eta_y * seed.eta_y;
    if (eta_x2 < 0.0)
        throw ConfigError("section seed incompatible with the energy level");

    VortexState init;
    init.uv = {{0.0, seed.y}};
    init.gamma = {gamma};
    init.eta = {std::sqrt(eta_x2), seed.eta_y};

    PoincareOrbit orbit;
    orbit.seed = seed;
    orbit.eta_x0 = init.eta.x;

    VortexSystem sys(srf, init.gamma, RhsKind::complete);
    OdeOptions oo;
    oo.rel_tol = opt.rel_tol;
    oo.abs_tol = opt.abs_tol;
    Dopri5 stepper([&sys](double t, const State& y, State& dy) { sys(t, y, dy); }, oo);

    const double h0 = hamiltonian(srf, init);
    State yc;

    stepper.integrate(0.0, sys.pack(init), opt.t_max, [&](const DenseStep& ds) {
        const double u0 = ds.eval_component(ds.t0, 0);
        const double u1 = ds.eval_component(ds.t1(), 0);
        if (u1 > u0) {
            for (long m = static_cast<long>(std::floor(u0)) + 1;
                 m <= static_cast<long>(std::floor(u1)); ++m) {
                // bisection for u(t) = m inside this step
                double lo = ds.t0, hi = ds.t1();
                while (hi - lo > opt.bisect_tol) {
                    const double mid = 0.5 * (lo + hi);
                    if (ds.eval_component(mid, 0) < m)
                        lo = mid;
                    else
                        hi = mid;
                }
                const double tc = 0.5 * (lo + hi);
                ds.eval(tc, yc);
                const double eta_x = yc[2];
                if (eta_x > 0.0) {
                    orbit.points.push_back({frac(yc[1]), yc[3]});
                    const double h = hamiltonian(srf, sys.unpack(tc, yc));
                    orbit.max_energy_error =
                        std::max(orbit.max_energy_error, std::abs(h - h0));
                    orbit.t_last = tc;
                    if (static_cast<int>(orbit.points.size()) >= opt.crossings)
                        return false;
                }
            }
        }
        return true;
    });

    if (orbit.points.empty())
        throw NoCrossings("orbit never returned to the section");
    return orbit;
}

double box_occupancy(const std::vector<Vec2>& points, double eta_bound, int grid) {
    std::set<long> filled;
    for (const Vec2& p : points) {
        const long col = static_cast<long>(std::floor(frac(p.x) * grid));
        double s = (p.y + eta_bound) / (2.0 * eta_bound);
        s = std::min(std::max(s, 0.0), 1.0 - 1e-12);
        const long row = static_cast<long>(std::floor(s * grid));
        filled.insert(row * grid + col);
    }
    return static_cast<double>(filled.size()) / (static_cast<double>(grid) * grid);
}

std::vector<Equilibrium> find_equilibria(const ConformalFactor& cf, const Lattice& lat,
                                         int seeds_per_axis, int* diverged_seeds) {
    if (cf.modes.empty())
        throw NoIsolatedEquilibria("the robin function of the flat metric is constant");

    const RobinField rob(cf, lat);
    std::vector<Equilibrium> found;
    if (diverged_seeds)
        *diverged_seeds = 0;

    for (int i = 0; i < seeds_per_axis; ++i) {
        for (int j = 0; j < seeds_per_axis; ++j) {
            Vec2 uv{(i + 0.5) / seeds_per_axis, (j + 0.5) / seeds_per_axis};
            bool ok = false;
            for (int it = 0; it < 60; ++it) {
                const RobinField::Eval e = rob(lat.to_xy(uv));
                if (e.grad.norm() < 1e-13) {
                    ok = true;
                    break;
                }
                const double det = e.hess.det();
                if (std::abs(det) < 1e-14)
                    break;
                // newton step in cartesian coordinates, capped to stay local
                Vec2 step{(-e.hess.m11 * e.grad.x + e.hess.m01 * e.grad.y) / det,
                          (e.hess.m10 * e.grad.x - e.hess.m00 * e.grad.y) / det};
                if (step.norm() > 0.25)
                    step = step * (0.25 / step.norm());
                const Vec2 xy = lat.to_xy(uv) + step;
                uv = lat.to_uv(xy);
            }
            if (!ok) {
                if (diverged_seeds)
                    ++*diverged_seeds;
                continue;
            }

            Vec2 wrapped{frac(uv.x), frac(uv.y)};
            bool dup = false;
            for (const Equilibrium& eq : found) {
                if (lat.reduce_xy(lat.to_xy(wrapped) - lat.to_xy(eq.uv)).norm() < 1e-6) {
                    dup = true;
                    break;
                }
            }
            if (dup)
                continue;

            Equilibrium eq;
            eq.uv = wrapped;
            eq.xy = lat.to_xy(wrapped);
            const RobinField::Eval e = rob(eq.xy);
            eq.grad_norm = e.grad.norm();
            eq.hess_det = e.hess.det();
            eq.hess_trace = e.hess.trace();
            if (std::abs(eq.hess_det) < 1e-12)
                eq.type = "degenerate";
            else if (eq.hess_det < 0.0)
                eq.type = "saddle";
            else
                eq.type = (eq.hess_trace < 0.0) ? "max" : "min";
            found.push_back(eq);
        }
    }

    if (found.empty())
        throw NoIsolatedEquilibria("no critical point of the robin function was found");

    // order by (u, v) with a tolerance so that coordinates pinned to the same
    // symmetry line compare equal regardless of rounding, and a point that
    // converged just below 1 counts as 0
    const auto coord = [](double c) { return c > 1.0 - 1e-7 ? c - 1.0 : c; };
    std::sort(found.begin(), found.end(), [&](const Equilibrium& a, const Equilibrium& b) {
        const double ax = coord(a.uv.x), bx = coord(b.uv.x);
        if (std::abs(ax - bx) > 1e-7)
            return ax < bx;
        return coord(a.uv.y) < coord(b.uv.y);
    });
    return found;
}

namespace {

// geodesic flow of ds^2 = rho (dx^2 + dy^2), state [x, y, vx, vy]
void geodesic_rhs(const Surface& srf, const State& y, State& dy) {
    const Density rho = srf.rho({y[0], y[1]});
    const double vx = y[2], vy = y[3];
    const double gx = rho.grad.x / (2.0 * rho.value);
    const double gy = rho.grad.y / (2.0 * rho.value);
    dy.assign(4, 0.0);
    dy[0] = vx;
    dy[1] = vy;
    dy[2] = -(gx * (vx * vx - vy * vy) + 2.0 * gy * vx * vy);
    dy[3] = -(gy * (vy * vy - vx * vx) + 2.0 * gx * vx * vy);
}

} // namespace

DipoleProbeResult dipole_probe(const Surface& srf, Vec2 start_xy, Vec2 direction,
                               const DipoleProbeOptions& opt) {
    if (!(opt.d > 0.0))
        throw ConfigError("pair separation must be positive");
    if (direction.norm() < 1e-14)
        throw ConfigError("launch direction must be nonzero");

    const Vec2 that = direction * (1.0 / direction.norm());
    const Vec2 nhat = that.perp();

    VortexState init;
    init.gamma = {1.0, -1.0};
    init.uv = {srf.lat.to_uv(start_xy + nhat * (0.5 * opt.d)),
               srf.lat.to_uv(start_xy - nhat * (0.5 * opt.d))};
    init.eta = {0.0, 0.0};

    // matched initial velocity of the midpoint
    VortexSystem sys(srf, init.gamma, RhsKind::complete);
    State dy0;
    sys(0.0, sys.pack(init), dy0);
    const Vec2 v0 = (srf.lat.to_xy({dy0[0], dy0[1]}) + srf.lat.to_xy({dy0[2], dy0[3]})) * 0.5;
    const double speed0 = v0.norm();
    if (speed0 < 1e-12)
        throw NumericalError("pair does not translate");

    // The pair moves at speed ~ 1/d, so a fixed time horizon would cover an
    // arc that grows as the pair tightens.  Measure the horizon in arc length
    // instead: run for physical time t_end / speed so every separation is
    // compared over the same stretch of geodesic.
    IntegrateOptions io;
    io.t_end = opt.t_end / speed0;
    io.rel_tol = opt.rel_tol;
    io.abs_tol = opt.abs_tol;
    io.sample_dt = opt.sample_dt / speed0;
    io.kind = RhsKind::complete;
    const Trajectory traj = integrate(srf, init, io);
    if (traj.halt_reason == "collision")
        throw NumericalError("pair collapsed during the probe");

    OdeOptions go;
    go.rel_tol = std::max(opt.rel_tol * 0.1, 1.1e-14);
    go.abs_tol = std::max(opt.abs_tol * 0.1, 1.1e-14);
    Dopri5 geo([&srf](double, const State& y, State& dy) { geodesic_rhs(srf, y, dy); }, go);

    // sample the geodesic on the same time grid
    std::vector<Vec2> gpos;
    gpos.reserve(traj.t.size());
    gpos.push_back(start_xy);
    {
        std::size_t next = 1;
        State ys;
        geo.integrate(0.0, {start_xy.x, start_xy.y, v0.x, v0.y}, traj.t.back(),
                      [&](const DenseStep& ds) {
                          while (next < traj.t.size() && traj.t[next] <= ds.t1() + 1e-14) {
                              ds.eval(std::min(traj.t[next], ds.t1()), ys);
                              gpos.push_back({ys[0], ys[1]});
                              ++next;
                          }
                          return true;
                      });
        while (gpos.size() < traj.t.size())
            gpos.push_back(gpos.back());
    }

    DipoleProbeResult res;
    res.d = opt.d;
    res.initial_speed = v0.norm();
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const Vec2 s1 = srf.lat.to_xy({traj.y[i][0], traj.y[i][1]});
        const Vec2 s2 = srf.lat.to_xy({traj.y[i][2], traj.y[i][3]});
        const double sep = srf.lat.reduce_xy(s1 - s2).norm();
        res.final_separation = sep;
        if (sep > opt.dissociation_factor * opt.d)
            throw PairDissociated("pair separation exceeded the dissociation bound");
        const Vec2 mid = (s1 + s2) * 0.5;
        const double dev = srf.lat.reduce_xy(mid - gpos[i]).norm();
        res.max_deviation = std::max(res.max_deviation, dev);
    }
    return res;
}

CompareResult complete_vs_incomplete(const Surface& srf, const VortexState& init,
                                     const IntegrateOptions& opt) {
    IntegrateOptions oc = opt;
    oc.kind = RhsKind::complete;
    IntegrateOptions oi = opt;
    oi.kind = RhsKind::incomplete;

    const Trajectory tc = integrate(srf, init, oc);
    const Trajectory ti = integrate(srf, init, oi);
    const std::size_t m = std::min(tc.t.size(), ti.t.size());
    const std::size_t n = init.uv.size();

    VortexSystem sys(srf, init.gamma, RhsKind::complete);

    CompareResult out;
    bool first = true;
    for (std::size_t i = 0; i < m; ++i) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const Vec2 a = srf.lat.to_xy({tc.y[i][2 * j], tc.y[i][2 * j + 1]});
            const Vec2 b = srf.lat.to_xy({ti.y[i][2 * j], ti.y[i][2 * j + 1]});
            d2 += srf.lat.reduce_xy(a - b).norm2();
        }
        const Vec2 ea{tc.y[i][2 * n], tc.y[i][2 * n + 1]};
        const Vec2 eb{ti.y[i][2 * n], ti.y[i][2 * n + 1]};
        d2 += (ea - eb).norm2();

        out.t.push_back(tc.t[i]);
        out.phase_distance.push_back(std::sqrt(d2));
        out.phase_distance_max = std::max(out.phase_distance_max, out.phase_distance.back());

        const HamiltonianParts hp = hamiltonian_parts(srf, sys.unpack(tc.t[i], tc.y[i]));
        if (first) {
            out.h_vort_min = out.h_vort_max = hp.vortex;
            out.h_harm_min = out.h_harm_max = hp.harmonic;
            first = false;
        } else {
            out.h_vort_min = std::min(out.h_vort_min, hp.vortex);
            out.h_vort_max = std::max(out.h_vort_max, hp.vortex);
            out.h_harm_min = std::min(out.h_harm_min, hp.harmonic);
            out.h_harm_max = std::max(out.h_harm_max, hp.harmonic);
        }
    }
    return out;
}

} // namespace vflow
