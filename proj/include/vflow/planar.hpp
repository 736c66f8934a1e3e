#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vflow/geometry.hpp"
#include "vflow/greens.hpp"

namespace vflow::planar {

struct ScalarField {
    double value = 0.0;
    Vec2 grad{};
};

/** Dirichlet Green function of the unit disk,
 *  -(1/2pi) log |(z-w)/(1 - z conj(w))|, gradient in z. */
GreenEval green_electro_disk(Vec2 z, Vec2 w);

/** Green function of the doubled disk (two faces glued along |z| = 1; the
 *  back face is charted by inversion, so |p| > 1 means the mirror point):
 *  8 pi G = 4 log(1/|z-w|) + A(z) + A(w) - 3/2 with A(p) = |p|^2 inside and
 *  |p|^{-2} + 4 log|p| outside.  C^1 across the seam. */
GreenEval green_double_disk(Vec2 z, Vec2 w);

/** Area weight of the doubled disk in the plane chart: 1 inside,
 *  1/|p|^4 outside (the pullback of the mirror face's area element). */
double double_disk_weight(Vec2 p);

/** |G_disk(z,w) - [G_double(z,w) - G_double(z, w/|w|^2)]|: the boundary
 *  Green function recovered by the method of the doubled surface. */
double electro_from_double_residual(Vec2 z, Vec2 w);

/** Green function of the round sphere in the stereographic chart:
 *  -(1/4pi) [ log( |z-w|^2 / ((1+|z|^2)(1+|w|^2)) ) + 1 ]. */
GreenEval green_sphere(Vec2 z, Vec2 w);

/** Concentric annulus r < |z| < R. */
struct Annulus {
    double r = 0.0;
    double R = 0.0;
    double L = 0.0; // log(R/r)

    Annulus(double r_, double R_);

    bool contains(Vec2 z, double clearance = 0.0) const;
    double capacity_P() const; // pi / L
    double capacity_Q() const; // L / pi  (= 1/P)
};

/** Harmonic measure of the inner boundary: u = log(R/|z|)/log(R/r);
 *  1 on |z| = r, 0 on |z| = R. */
ScalarField harmonic_measure(const Annulus& an, Vec2 z);

/** Dirichlet Green function of the annulus by the reflected-image series in
 *  the log chart; vanishes on both walls.  Images are summed in +/- pairs
 *  until a pair contributes less than tol twice in a row
 *  (SeriesNotConverged past 400 pairs). */
GreenEval green_electro_annulus(const Annulus& an, Vec2 z, Vec2 w, double tol = 1e-10);

/** Robin function of the annulus Green function (the regular part on the
 *  diagonal, with -(1/2pi) log of distance removed analytically). */
ScalarField robin_electro_annulus(const Annulus& an, Vec2 z, double tol = 1e-10);

/** Hydrodynamic Green function with prescribed inner circulation parameter p:
 *  G_h = G_e + (Q/2)(u(z) - p)(u(w) - p).  Constant on each wall, and the
 *  clockwise flux through the inner wall is -p. */
GreenEval green_hydro_annulus(const Annulus& an, Vec2 z, Vec2 w, double p, double tol = 1e-10);
ScalarField robin_hydro_annulus(const Annulus& an, Vec2 z, double p, double tol = 1e-10);

/** Loop integral of star d(field) along |z| = c traversed clockwise (the
 *  orientation of the inner boundary), from the field's gradient. */
double flux_clockwise(double c, const std::function<Vec2(Vec2)>& grad_field, int n = 512);

/** Reduced vortex state on the annulus: positions, strengths and the
 *  auxiliary flux variable B (= p minus the strength-weighted harmonic
 *  measures; exactly conserved in combination with them). */
struct AnnulusVortexState {
    std::vector<Vec2> z;
    std::vector<double> gamma;
    double B = 0.0;
    double t = 0.0;
};

/** H_red = sum (gamma^2/2) R_e + sum_{j<k} gamma gamma G_e + (Q/4) B^2. */
double reduced_hamiltonian(const Annulus& an, const AnnulusVortexState& st);

/** The fixed-circulation Hamiltonian built from G_e + (Q/2) u u, the matching
 *  Robin function, and the circulating-flow stream term -(Q/2) p u per unit
 *  strength.  Differs from the reduced Hamiltonian by exactly (Q/4) p^2. */
double lin_hamiltonian(const Annulus& an, const std::vector<Vec2>& z,
                       const std::vector<double>& gamma, double p);

struct AnnulusOptions {
    double t_end = 1.0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double sample_dt = 0.01;
    double p = 0.0;
    bool impulsive_start = false; // overrides p with sum gamma_k u(s_k(0))
    double collision_threshold = 1e-6;
    double wall_clearance = 1e-6;
    double series_tol = 1e-12;
};

struct AnnulusTrajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> y; // x1, y1, ..., xN, yN, B
    std::vector<double> gamma;
    double p = 0.0;           // the circulation target fixed at t = 0
    std::string halt_reason;  // "", "collision" or "wall_contact"
    double t_final = 0.0;
};

AnnulusTrajectory integrate_annulus(const Annulus& an, const std::vector<Vec2>& z0,
                                    const std::vector<double>& gamma,
                                    const AnnulusOptions& opt);

struct AnnulusReport {
    double P = 0.0, Q = 0.0;
    double p_initial = 0.0;
    double p_drift_max = 0.0; // max |B + sum gamma u - p(0)|
    double h_drift_max = 0.0; // max |H_red(t) - H_red(0)|
};

AnnulusReport annulus_report(const Annulus& an, const AnnulusTrajectory& traj);

} // namespace vflow::planar
