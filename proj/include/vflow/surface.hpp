#pragma once

#include <complex>
#include <vector>

#include "vflow/geometry.hpp"

namespace vflow {

/** Unit-area period lattice of a flat torus.
 *
 *  Positions on the torus are handled in two charts:
 *   - Cartesian (x, y), where the metric is dx^2 + dy^2 (times the conformal
 *     factor when one is attached);
 *   - lattice coordinates (u, v) with position = u*a + v*b, in which the
 *     fundamental cell is [0,1)^2.
 *  The charts are related by the dual covectors alpha = (b.y, -b.x) and
 *  beta = (-a.y, a.x): u = alpha . p, v = beta . p.
 */
struct Lattice {
    Vec2 a{1.0, 0.0};
    Vec2 b{0.0, 1.0};

    Vec2 to_xy(Vec2 uv) const { return uv.x * a + uv.y * b; }
    Vec2 to_uv(Vec2 xy) const {
        return {b.y * xy.x - b.x * xy.y, -a.y * xy.x + a.x * xy.y};
    }
    /** Covector alpha with alpha(a)=1, alpha(b)=0. */
    Vec2 alpha() const { return {b.y, -b.x}; }
    /** Covector beta with beta(a)=0, beta(b)=1. */
    Vec2 beta() const { return {-a.y, a.x}; }

    /** Shortest representative of the displacement xy modulo the lattice. */
    Vec2 reduce_xy(Vec2 xy) const {
        Vec2 uv = to_uv(xy);
        return to_xy({center_frac(uv.x), center_frac(uv.y)});
    }
};

/** Validates the generators.  With rescale set, both are scaled by
 *  det^{-1/2} to reach unit cell area; otherwise the determinant must already
 *  be 1 within 1e-12.  Throws DegenerateLattice when |det| < 1e-14 and
 *  DetNotOne when unit area is not (or cannot be) met; a negatively oriented
 *  pair always lands there, since rescaling cannot flip the sign. */
Lattice make_lattice(Vec2 a, Vec2 b, bool rescale = false);

/** Gram matrix of the dual harmonic basis:
 *  [[|b|^2, -a.b], [-a.b, |a|^2]].  Row/col order matches (alpha, beta). */
Mat2 gram_matrix(const Lattice& lat);

/** Cycle periods (A, B) = (a . eta, b . eta) of a harmonic covector eta. */
Vec2 harmonic_coords(const Lattice& lat, Vec2 eta);

/** Inverse of harmonic_coords: eta with prescribed cycle periods. */
Vec2 harmonic_field(const Lattice& lat, Vec2 periods);

/** Residual of the Hodge-star block identity.  With P = |b|^2, Q = |a|^2,
 *  R = -a.b the matrix S = [[-R, P], [-Q, R]] represents the star on the
 *  (alpha, beta) basis and must square to -I.  Returns kron(S,I2)^2 + I4,
 *  which is zero (to rounding) exactly when the identity holds. */
Mat4 riemann_block_check(const Lattice& lat);

/** One Fourier mode of the conformal density:  c * exp(2*pi*i*(m*u + n*v)). */
struct FourierMode {
    int m = 0;
    int n = 0;
    std::complex<double> c;
};

/** Spectral description of a conformal density rho = 1 + sum of modes.
 *  Invariants established by make_conformal: no (0,0) mode (unit mean), the
 *  mode set is closed under (m,n) -> (-m,-n) with conjugate coefficients
 *  (rho is real), all indices within `truncation`, and rho > 0 sampled on a
 *  128x128 grid of the fundamental cell. */
struct ConformalFactor {
    int truncation = 64;
    std::vector<FourierMode> modes;

    bool flat() const { return modes.empty(); }
};

/** Validates and closes the mode list under conjugation.  Throws ConfigError
 *  for structural violations ((0,0) mode, index out of range, inconsistent
 *  conjugate pairs) and NonPositiveDensity when the sampled density is not
 *  strictly positive. */
ConformalFactor make_conformal(int truncation, const std::vector<FourierMode>& modes);

/** Density value with first and second Cartesian derivatives. */
struct Density {
    double value = 1.0;
    Vec2 grad{};
    Mat2 hess{};
};

/** Evaluates rho at a Cartesian point; throws NonPositiveDensity if the
 *  rounded spectral sum is not positive there. */
Density eval_rho(const ConformalFactor& cf, const Lattice& lat, Vec2 xy);

} // namespace vflow
