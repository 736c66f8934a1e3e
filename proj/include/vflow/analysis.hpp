#pragma once

#include <string>
#include <vector>

#include "vflow/dynamics.hpp"

namespace vflow {

struct PoincareOptions {
    double h_level = 0.0;   // energy level the seed is completed to
    int crossings = 1000;   // stop after this many recorded points
    double t_max = 2e5;     // give up (NoCrossings if nothing was found)
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double bisect_tol = 1e-10; // in time, for the crossing instant
};

/** Seed on the section x = 0: full state is (u, v, eta_x, eta_y) =
 *  (0, y, completed from the energy level, eta_y). */
struct SectionSeed {
    double y = 0.0;
    double eta_y = 0.0;
};

struct PoincareOrbit {
    SectionSeed seed;
    double eta_x0 = 0.0;          // the completed component
    std::vector<Vec2> points;     // (v mod 1, eta_y) at the crossings
    double max_energy_error = 0.0;
    double t_last = 0.0;
};

/** Single-vortex return map to the surface {u = 0 mod 1, eta_x > 0}: the
 *  unwrapped u coordinate is watched for upward integer crossings, each
 *  located by bisection on the dense output, and kept when eta_x > 0
 *  there. */
PoincareOrbit poincare_section(const Surface& srf, SectionSeed seed, double gamma,
                               const PoincareOptions& opt);

/** Fraction of a grid x grid box partition of [0,1) x [-eta_bound, eta_bound]
 *  visited by the section points. */
double box_occupancy(const std::vector<Vec2>& points, double eta_bound, int grid = 100);

struct Equilibrium {
    Vec2 uv{};   // wrapped to [0,1)^2
    Vec2 xy{};
    std::string type; // "max", "min", "saddle" or "degenerate"
    double grad_norm = 0.0;
    double hess_det = 0.0;
    double hess_trace = 0.0;
};

/** Critical points of the Robin function by damped Newton iteration from a
 *  grid of seeds, deduplicated on the torus.  Seeds whose iteration fails to
 *  converge are skipped (counted in *diverged_seeds when non-null).  Throws
 *  NoIsolatedEquilibria for the flat metric (the Robin function is constant
 *  there). */
std::vector<Equilibrium> find_equilibria(const ConformalFactor& cf, const Lattice& lat,
                                         int seeds_per_axis = 4,
                                         int* diverged_seeds = nullptr);

struct DipoleProbeOptions {
    double d = 0.01;        // initial pair separation
    double t_end = 1.0;     // arc length to traverse (unit-speed time)
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double sample_dt = 0.005; // sampling step, also in arc length
    double dissociation_factor = 10.0; // PairDissociated past factor*d
};

struct DipoleProbeResult {
    double d = 0.0;
    double max_deviation = 0.0;   // midpoint vs geodesic, same arc parameter
    double final_separation = 0.0;
    double initial_speed = 0.0;
};

/** Launches an antisymmetric +1/-1 pair straddling `start_xy` perpendicular
 *  to `direction` and compares the pair midpoint against the geodesic of
 *  ds^2 = rho (dx^2 + dy^2) with matched initial velocity (integrated ten
 *  times tighter).  A tight pair translates at speed ~ 1/d, so the horizon
 *  is measured in arc length: both curves run for physical time
 *  t_end / initial_speed, covering the same stretch of geodesic regardless
 *  of d.  The deviation must shrink as the pair tightens. */
DipoleProbeResult dipole_probe(const Surface& srf, Vec2 start_xy, Vec2 direction,
                               const DipoleProbeOptions& opt);

struct CompareResult {
    std::vector<double> t;
    std::vector<double> phase_distance; // positions on the torus + eta gap
    double phase_distance_max = 0.0;
    double h_vort_min = 0.0, h_vort_max = 0.0;
    double h_harm_min = 0.0, h_harm_max = 0.0;
};

/** Integrates the same initial data with evolving and with frozen harmonic
 *  component and reports how far the two runs drift apart, plus the energy
 *  exchange between the vortex and harmonic parts along the evolving run. */
CompareResult complete_vs_incomplete(const Surface& srf, const VortexState& init,
                                     const IntegrateOptions& opt);

} // namespace vflow
