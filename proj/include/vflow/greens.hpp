#pragma once

#include <complex>
#include <vector>

#include "vflow/surface.hpp"

namespace vflow {

/** Green function value and its gradient in the first argument. */
struct GreenEval {
    double value = 0.0;
    Vec2 grad{};
};

enum class GreenMethod { spectral_sum, accelerated };

/** Laplace Green function of the flat unit-area torus:
 *  positive Laplacian applied to G(., w) gives the delta at w minus 1,
 *  with zero mean over the cell and G(z, w) = G(w, z).
 *
 *  The accelerated evaluation is the elliptic closed form
 *      G = -(1/2pi) log|theta1(pi(u + tau v) | tau)| + (Im tau / 2) v^2
 *          + (1/2pi) log|eta(tau)|
 *  on a Lagrange-reduced basis (fast nome, analytic everywhere off the
 *  diagonal, zero mean built in).  The direct truncated double Fourier sum is
 *  kept as the slow cross-check (`eval_direct`).
 */
class FlatGreen {
public:
    explicit FlatGreen(const Lattice& lat);

    /** Accelerated evaluation; throws CoincidentPoints when the reduced
     *  displacement is shorter than 1e-12. */
    GreenEval eval(Vec2 z, Vec2 w) const;

    /** Direct spectral sum over |m|,|n| <= kmax, same zero-mean convention. */
    GreenEval eval_direct(Vec2 z, Vec2 w, int kmax) const;

    /** Robin constant of the flat metric: lim [G + (1/2pi) log l]. */
    double robin_constant() const;

    const Lattice& lattice() const { return lat_; }

private:
    GreenEval eval_displacement(Vec2 xy) const;

    Lattice lat_;               // as given (used by the direct sum)
    Lattice red_;               // Lagrange-reduced basis (used by theta)
    std::complex<double> tau_;  // red_.b / red_.a as a complex number
    double im_tau_ = 0.0;
    double log_abs_eta_ = 0.0;  // log|eta(tau)|
    double robin_const_ = 0.0;
    std::vector<std::complex<double>> cn_; // (-1)^n q^{(n+1/2)^2}
    friend class HarmonicCycleField;
};

/** Convenience wrapper around FlatGreen. */
GreenEval green_flat(const Lattice& lat, Vec2 z, Vec2 w,
                     GreenMethod method = GreenMethod::accelerated, int kmax = 400);

/** Zero-mean solution of  (d^2/dx^2 + d^2/dy^2) phi = rho - 1  on the torus,
 *  termwise in the spectral basis:  phi_mn = -c_mn / (4 pi^2 q_mn)  with
 *  q_mn the Gram quadratic form of the mode. */
class PoissonSolution {
public:
    PoissonSolution() = default; // flat density: phi == 0
    PoissonSolution(const ConformalFactor& cf, const Lattice& lat);

    struct Eval {
        double value = 0.0;
        Vec2 grad{};
        Mat2 hess{};
    };
    Eval operator()(Vec2 xy) const;

    /** Coefficient phi_mn (zero when the mode is absent). */
    std::complex<double> coeff(int m, int n) const;

    /** The zero-mean constant of the deformed-metric Green function:
     *  - integral of (rho - 1) phi over the cell = sum |c_mn|^2/(4 pi^2 q_mn). */
    double pair_constant() const { return pair_constant_; }

    bool zero() const { return modes_.empty(); }
    const std::vector<FourierMode>& modes() const { return modes_; }

private:
    std::vector<FourierMode> modes_;
    Lattice lat_;
    double pair_constant_ = 0.0;
};

PoissonSolution poisson_solve(const ConformalFactor& cf, const Lattice& lat);

/** Robin function of the conformally deformed metric:
 *  R = (1/4pi) log rho + 2 phi + constant.  The constant is a reporting
 *  convention (default 0) and does not affect gradients or dynamics. */
class RobinField {
public:
    RobinField(const ConformalFactor& cf, const Lattice& lat, double constant = 0.0);

    struct Eval {
        double value = 0.0;
        Vec2 grad{};
        Mat2 hess{};
    };
    Eval operator()(Vec2 xy) const;

    double constant() const { return constant_; }
    const Lattice& lattice() const { return lat_; }
    const ConformalFactor& conformal() const { return cf_; }
    const PoissonSolution& potential() const { return phi_; }

private:
    ConformalFactor cf_;
    Lattice lat_;
    PoissonSolution phi_;
    double constant_;
};

RobinField robin(const ConformalFactor& cf, const Lattice& lat, double constant = 0.0);

/** Green function of the conformally deformed metric (unit total area):
 *  G_rho(z, w) = G_flat(z - w) + phi(z) + phi(w) + pair constant, which has
 *  zero mean against the deformed area element. */
class ConformalGreen {
public:
    ConformalGreen(const ConformalFactor& cf, const Lattice& lat);

    GreenEval eval(Vec2 z, Vec2 w) const;
    double constant() const { return phi_.pair_constant(); }
    const FlatGreen& flat_green() const { return flat_; }
    const PoissonSolution& potential() const { return phi_; }

private:
    FlatGreen flat_;
    PoissonSolution phi_;
};

struct PointVortex {
    Vec2 pos{};     // Cartesian
    double gamma = 0.0;
};

/** The two metric-deformation terms of the vortex Hamiltonian:
 *  sum_j (gamma_j^2 / 8pi) log rho(s_j) + Gamma * sum_j gamma_j phi(s_j),
 *  with Gamma the total strength (the second term vanishes for neutral
 *  systems and for the flat metric). */
double conformal_hamiltonian_terms(const ConformalFactor& cf, const Lattice& lat,
                                   const std::vector<PointVortex>& vortices);

enum class Cycle { a, b };

/** Differential of the cycle-integral field U(s) = loop integral over the
 *  cycle of star dG(., s), checked against the dual harmonic covector
 *  (a-cycle -> beta, b-cycle -> -alpha), plus the unit jump of U across the
 *  cycle. */
struct HatTrickResult {
    std::vector<Vec2> du;      // measured differential at each base point
    Vec2 expected{};           // the constant covector it must equal
    double max_grad_error = 0; // max |du - expected| over base points
    double jump = 0.0;         // measured transverse jump of U (should be 1)
};

/** base_points are Cartesian and must stay farther than 1e-6 from the cycle
 *  (QuadratureFailure otherwise). */
HatTrickResult hat_trick_check(const Lattice& lat, Cycle cycle,
                               const std::vector<Vec2>& base_points);

} // namespace vflow
