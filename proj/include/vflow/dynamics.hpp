#pragma once

#include <string>
#include <vector>

#include "vflow/greens.hpp"
#include "vflow/ode.hpp"
#include "vflow/surface.hpp"

namespace vflow {

/** Everything needed to evaluate the point-vortex dynamics on one torus:
 *  lattice, conformal density, flat Green function, deformation potential
 *  and Robin function, built once and shared. */
struct Surface {
    Lattice lat;
    ConformalFactor cf;
    FlatGreen flat;
    PoissonSolution phi;
    RobinField rob;
    bool is_flat = false;

    Surface(const ConformalFactor& cf_, const Lattice& lat_)
        : lat(lat_), cf(cf_), flat(lat_), phi(cf_, lat_), rob(cf_, lat_), is_flat(cf_.modes.empty()) {}

    Density rho(Vec2 xy) const { return eval_rho(cf, lat, xy); }
};

/** Phase-space point: N vortices (unwrapped lattice coordinates and
 *  strengths) plus the harmonic covector eta = (eta_x, eta_y). */
struct VortexState {
    std::vector<Vec2> uv;       // unwrapped lattice coordinates
    std::vector<double> gamma;
    Vec2 eta{};
    double t = 0.0;

    std::size_t size() const { return uv.size(); }
    Vec2 uv_wrapped(std::size_t j) const { return {frac(uv[j].x), frac(uv[j].y)}; }
    Vec2 xy(const Lattice& lat, std::size_t j) const { return lat.to_xy(uv[j]); }
    double total_gamma() const {
        double s = 0.0;
        for (double c : gamma)
            s += c;
        return s;
    }
};

struct HamiltonianParts {
    double vortex = 0.0;
    double harmonic = 0.0;
    double total = 0.0;
};

/** H = sum_j (gamma_j^2/2) R(s_j) + sum_{j<k} gamma_j gamma_k G(s_j, s_k)
 *      + |eta|^2 / 2, where R is the surface's Robin field (whatever additive
 *  constant it was built with) and G the deformed-metric Green function.
 *  Throws CollisionError when any pair is closer than `threshold` on the
 *  torus. */
HamiltonianParts hamiltonian_parts(const Surface& srf, const VortexState& st,
                                   double threshold = 1e-6);
double hamiltonian(const Surface& srf, const VortexState& st, double threshold = 1e-6);

enum class RhsKind { complete, incomplete };

/** The equations of motion on the packed state
 *  y = [u1, v1, ..., uN, vN, eta_x, eta_y]:
 *    rho(s_j) dx_j/dt = +d/dy_j [ (gamma_j/2) R + sum_{k!=j} gamma_k G ] + eta_x
 *    rho(s_j) dy_j/dt = -d/dx_j [ ... ] + eta_y
 *  and, for the complete system,
 *    d eta_x/dt = sum gamma_j dy_j/dt - Gamma eta_y
 *    d eta_y/dt = -sum gamma_j dx_j/dt + Gamma eta_x
 *  (identically zero on the flat torus, and taken as exactly zero there).
 *  The incomplete system freezes eta. */
class VortexSystem {
public:
    VortexSystem(const Surface& srf, std::vector<double> gamma, RhsKind kind);

    void operator()(double t, const State& y, State& dydt) const;

    State pack(const VortexState& st) const;
    VortexState unpack(double t, const State& y) const;

    /** Shortest-representative distance of the closest vortex pair. */
    double min_pair_distance(const State& y) const;

    std::size_t n_vortices() const { return gamma_.size(); }
    const std::vector<double>& gamma() const { return gamma_; }
    const Surface& surface() const { return srf_; }
    RhsKind kind() const { return kind_; }

private:
    const Surface& srf_;
    std::vector<double> gamma_;
    double total_gamma_ = 0.0;
    RhsKind kind_;
};

struct IntegrateOptions {
    double t_end = 1.0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double sample_dt = 0.01;
    RhsKind kind = RhsKind::complete;
    double collision_threshold = 1e-6;
};

/** Sampled trajectory.  halt_reason is empty when t_end was reached,
 *  "collision" when two vortices came within the collision threshold; the
 *  record then ends at the last sample before the violation and t_final is
 *  the detection time, so every recorded state is evaluable. */
struct Trajectory {
    std::vector<double> t;
    std::vector<State> y;
    std::vector<double> gamma;
    std::string halt_reason;
    double t_final = 0.0;
    long steps_accepted = 0;
    long steps_rejected = 0;
};

/** Throws CollisionError when the initial state already violates the
 *  collision threshold. */
Trajectory integrate(const Surface& srf, const VortexState& init, const IntegrateOptions& opt);

/** Conservation diagnostics over a sampled trajectory: energy drift, the two
 *  translation invariants of neutral systems, and the circulation-transport
 *  identity d/dt (loop integral of nu) = Gamma * (loop integral of star nu)
 *  checked on a user polyline.  The polyline is traversed segment by segment
 *  and is NOT closed automatically: the last vertex must equal the first one
 *  modulo the lattice, which admits non-contractible cycles (e.g. {(c,0),
 *  (c,1)} is the vertical cycle at x = c). */
struct ConservedReport {
    double h_drift_max = 0.0;
    double h0 = 0.0, h_vort0 = 0.0, h_harm0 = 0.0;
    bool momentum_defined = false; // only for total strength zero
    double momentum_drift_max = 0.0;
    double rubicon_max = 0.0;      // empty curve: stays 0
    std::vector<double> rubicon_residual;
};

ConservedReport conserved_report(const Surface& srf, const Trajectory& traj,
                                 const std::vector<Vec2>& curve = {},
                                 double curve_clearance = 0.05);

} // namespace vflow
