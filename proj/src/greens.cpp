#include "vflow/greens.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "vflow/errors.hpp"
#include "vflow/quadrature.hpp"

namespace vflow {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
using cplx = std::complex<double>;

// Lagrange-reduce a unimodular basis: shortest first vector, orientation kept.
Lattice reduce_basis(const Lattice& lat) {
    Vec2 w1 = lat.a, w2 = lat.b;
    for (int iter = 0; iter < 64; ++iter) {
        if (w1.norm2() > w2.norm2()) {
            Vec2 t = w1;
            w1 = w2;
            w2 = Vec2{-t.x, -t.y}; // (a,b) -> (b,-a) keeps det = +1
        }
        double t = std::round(dot(w2, w1) / w1.norm2());
        if (t == 0.0)
            break;
        w2 = w2 - w1 * t;
    }
    return Lattice{w1, w2};
}

} // namespace

FlatGreen::FlatGreen(const Lattice& lat) : lat_(lat), red_(reduce_basis(lat)) {
    const cplx w1{red_.a.x, red_.a.y};
    const cplx w2{red_.b.x, red_.b.y};
    tau_ = w2 / w1;
    im_tau_ = tau_.imag(); // = det / |w1|^2 = 1 / |w1|^2 > 0
    const cplx itau = cplx{0.0, 1.0} * (kPi * tau_);

    // Coefficients (-1)^n q^{(n+1/2)^2}; the series for theta1 and its
    // derivative then only needs powers of e^{i z}.
    double sign = 1.0;
    bool tail_small = false;
    for (int n = 0; n <= 40; ++n) {
        const double s = (n + 0.5) * (n + 0.5);
        cn_.push_back(sign * std::exp(itau * s));
        sign = -sign;
        // worst-case term size at |Im z| = pi*Im(tau)/2
        if (n >= 2 && -kPi * im_tau_ * (s - (n + 0.5)) < std::log(1e-22)) {
            tail_small = true;
            break;
        }
    }
    // Basis reduction guarantees Im(tau) >= sqrt(3)/2, for which five
    // coefficients already suffice; this guards the evaluator's accuracy
    // claim should that ever change.
    if (!tail_small)
        throw ToleranceNotReached("theta series tail bound not met within 41 terms");

    // log|eta(tau)| = -pi Im(tau)/12 + sum log|1 - q^{2n}|
    log_abs_eta_ = -kPi * im_tau_ / 12.0;
    const cplx q2 = std::exp(itau * 2.0);
    cplx p = q2;
    for (int n = 0; n < 200 && std::abs(p) > 1e-20; ++n) {
        log_abs_eta_ += std::log(std::abs(1.0 - p));
        p *= q2;
    }

    robin_const_ = -(std::log(kTwoPi) + 2.0 * log_abs_eta_ - std::log(red_.a.norm())) / kTwoPi;
}

GreenEval FlatGreen::eval_displacement(Vec2 xy) const {
    const Vec2 uv = red_.to_uv(xy);
    const double uc = center_frac(uv.x);
    const double vc = center_frac(uv.y);
    const Vec2 nearest = red_.to_xy({uc, vc});
    if (nearest.norm() < 1e-12)
        throw CoincidentPoints("green evaluation at coincident points");

    const cplx z = kPi * (cplx{uc, 0.0} + tau_ * vc);
    const cplx E = std::exp(cplx{0.0, 1.0} * z);
    const cplx Einv = 1.0 / E;
    const cplx E2 = E * E, Ei2 = Einv * Einv;

    cplx th{0.0, 0.0}, dth{0.0, 0.0};
    cplx Ek = E, Eik = Einv;
    for (std::size_t n = 0; n < cn_.size(); ++n) {
        const double k = 2.0 * static_cast<double>(n) + 1.0;
        th += cn_[n] * (Ek - Eik);
        dth += cn_[n] * k * (Ek + Eik);
        Ek *= E2;
        Eik *= Ei2;
    }
    // theta1 = -i*th, theta1' = dth  =>  theta1'/theta1 = i*dth/th
    const cplx L = cplx{0.0, 1.0} * dth / th;

    GreenEval out;
    out.value = -std::log(std::abs(th)) / kTwoPi + 0.5 * im_tau_ * vc * vc + log_abs_eta_ / kTwoPi;
    const double dGdu = -0.5 * L.real();
    const double dGdv = -0.5 * (tau_ * L).real() + im_tau_ * vc;
    out.grad = red_.alpha() * dGdu + red_.beta() * dGdv;
    return out;
}

GreenEval FlatGreen::eval(Vec2 z, Vec2 w) const {
    return eval_displacement(z - w);
}

GreenEval FlatGreen::eval_direct(Vec2 z, Vec2 w, int kmax) const {
    const Vec2 d = z - w;
    if (red_.reduce_xy(d).norm() < 1e-12)
        throw CoincidentPoints("green evaluation at coincident points");
    const Vec2 uv = lat_.to_uv(d);
    const Mat2 M = gram_matrix(lat_);
    const Vec2 al = lat_.alpha(), be = lat_.beta();

    GreenEval out;
    for (int m = -kmax; m <= kmax; ++m) {
        for (int n = -kmax; n <= kmax; ++n) {
            if (m == 0 && n == 0)
                continue;
            const double q = m * m * M.m00 + 2.0 * m * n * M.m01 + n * n * M.m11;
            const double ph = kTwoPi * (m * uv.x + n * uv.y);
            out.value += std::cos(ph) / (4.0 * kPi * kPi * q);
            out.grad = out.grad - (al * static_cast<double>(m) + be * static_cast<double>(n)) *
                                      (std::sin(ph) / (kTwoPi * q));
        }
    }
    return out;
}

double FlatGreen::robin_constant() const {
    return robin_const_;
}

GreenEval green_flat(const Lattice& lat, Vec2 z, Vec2 w, GreenMethod method, int kmax) {
    FlatGreen g(lat);
    if (method == GreenMethod::spectral_sum)
        return g.eval_direct(z, w, kmax);
    return g.eval(z, w);
}

PoissonSolution::PoissonSolution(const ConformalFactor& cf, const Lattice& lat) : lat_(lat) {
    const Mat2 M = gram_matrix(lat);
    for (const FourierMode& mode : cf.modes) {
        const double q = mode.m * mode.m * M.m00 + 2.0 * mode.m * mode.n * M.m01 +
                         mode.n * mode.n * M.m11;
        FourierMode pm;
        pm.m = mode.m;
        pm.n = mode.n;
        pm.c = -mode.c / (4.0 * kPi * kPi * q);
        modes_.push_back(pm);
        pair_constant_ += (-mode.c * std::conj(pm.c)).real();
    }
}

PoissonSolution::Eval PoissonSolution::operator()(Vec2 xy) const {
    Eval out;
    if (modes_.empty())
        return out;
    const Vec2 uv = lat_.to_uv(xy);
    const Vec2 al = lat_.alpha(), be = lat_.beta();
    for (const FourierMode& mode : modes_) {
        const Vec2 k = (al * static_cast<double>(mode.m) + be * static_cast<double>(mode.n)) * kTwoPi;
        const double ph = kTwoPi * (mode.m * uv.x + mode.n * uv.y);
        const cplx e = mode.c * cplx{std::cos(ph), std::sin(ph)};
        out.value += e.real();
        out.grad = out.grad - k * e.imag();
        out.hess.m00 -= e.real() * k.x * k.x;
        out.hess.m01 -= e.real() * k.x * k.y;
        out.hess.m10 -= e.real() * k.y * k.x;
        out.hess.m11 -= e.real() * k.y * k.y;
    }
    return out;
}

std::complex<double> PoissonSolution::coeff(int m, int n) const {
    for (const FourierMode& mode : modes_)
        if (mode.m == m && mode.n == n)
            return mode.c;
    return {0.0, 0.0};
}

PoissonSolution poisson_solve(const ConformalFactor& cf, const Lattice& lat) {
    return PoissonSolution(cf, lat);
}

RobinField::RobinField(const ConformalFactor& cf, const Lattice& lat, double constant)
    : cf_(cf), lat_(lat), phi_(cf, lat), constant_(constant) {}

RobinField::Eval RobinField::operator()(Vec2 xy) const {
    const Density rho = eval_rho(cf_, lat_, xy);
    const PoissonSolution::Eval phi = phi_(xy);

    Eval out;
    out.value = std::log(rho.value) / (4.0 * kPi) + 2.0 * phi.value + constant_;
    out.grad = rho.grad * (1.0 / (4.0 * kPi * rho.value)) + phi.grad * 2.0;
    const double inv = 1.0 / (4.0 * kPi * rho.value);
    const double inv2 = 1.0 / (4.0 * kPi * rho.value * rho.value);
    out.hess.m00 = rho.hess.m00 * inv - rho.grad.x * rho.grad.x * inv2 + 2.0 * phi.hess.m00;
    out.hess.m01 = rho.hess.m01 * inv - rho.grad.x * rho.grad.y * inv2 + 2.0 * phi.hess.m01;
    out.hess.m10 = out.hess.m01;
    out.hess.m11 = rho.hess.m11 * inv - rho.grad.y * rho.grad.y * inv2 + 2.0 * phi.hess.m11;
    return out;
}

RobinField robin(const ConformalFactor& cf, const Lattice& lat, double constant) {
    return RobinField(cf, lat, constant);
}

ConformalGreen::ConformalGreen(const ConformalFactor& cf, const Lattice& lat)
    : flat_(lat), phi_(cf, lat) {}

GreenEval ConformalGreen::eval(Vec2 z, Vec2 w) const {
    GreenEval out = flat_.eval(z, w);
    const PoissonSolution::Eval pz = phi_(z);
    const PoissonSolution::Eval pw = phi_(w);
    out.value += pz.value + pw.value + phi_.pair_constant();
    out.grad = out.grad + pz.grad;
    return out;
}

double conformal_hamiltonian_terms(const ConformalFactor& cf, const Lattice& lat,
                                   const std::vector<PointVortex>& vortices) {
    const PoissonSolution phi(cf, lat);
    double total_gamma = 0.0;
    for (const PointVortex& v : vortices)
        total_gamma += v.gamma;

    double h = 0.0;
    for (const PointVortex& v : vortices) {
        const double rho = eval_rho(cf, lat, v.pos).value;
        h += v.gamma * v.gamma / (8.0 * kPi) * std::log(rho);
        h += total_gamma * v.gamma * phi(v.pos).value;
    }
    return h;
}

namespace {

// Integrand of the loop integral U(s) = cycle integral of star dG(., s):
// on the curve r(t) = t g the pullback of star dG is dot(perp(grad G), g) dt.
double cycle_integrand(const FlatGreen& fg, Vec2 g, double t, Vec2 s) {
    const GreenEval ge = fg.eval(g * t, s);
    return dot(ge.grad.perp(), g);
}

double u_field_trapezoid(const FlatGreen& fg, Vec2 g, Vec2 s, int n) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        sum += cycle_integrand(fg, g, (i + 0.5) / n, s);
    return sum / n;
}

// Graded-panel quadrature for base points a distance ~eps from the cycle:
// geometrically growing panels away from the near-parameter t0.
double u_field_graded(const FlatGreen& fg, Vec2 g, Vec2 s, double t0, double eps_param) {
    static const GaussLegendre gl(16);
    auto f = [&](double t) { return cycle_integrand(fg, g, t, s); };

    double sum = gl.integrate(f, t0 - eps_param, t0 + eps_param);
    for (int side = -1; side <= 1; side += 2) {
        double lo = eps_param;
        while (lo < 0.5) {
            const double hi = std::min(2.0 * lo, 0.5);
            if (side > 0)
                sum += gl.integrate(f, t0 + lo, t0 + hi);
            else
                sum += gl.integrate(f, t0 - hi, t0 - lo);
            lo = hi;
        }
    }
    return sum;
}

} // namespace

HatTrickResult hat_trick_check(const Lattice& lat, Cycle cycle,
                               const std::vector<Vec2>& base_points) {
    const FlatGreen fg(lat);
    const Vec2 g = (cycle == Cycle::a) ? lat.a : lat.b;

    HatTrickResult res;
    res.expected = (cycle == Cycle::a) ? lat.beta() : (lat.alpha() * -1.0);

    // distance of s to the cycle (the a cycle sits on v = 0 mod 1, b on
    // u = 0; parallel copies of the line {t g} are spaced det/|g| apart)
    auto cycle_distance = [&](Vec2 s) {
        const Vec2 uv = lat.to_uv(s);
        const double transverse = (cycle == Cycle::a) ? uv.y : uv.x;
        return std::abs(center_frac(transverse)) / g.norm();
    };

    const double fd_h = 1e-5;
    for (const Vec2& s : base_points) {
        const double dist = cycle_distance(s);
        if (dist < 1e-6)
            throw QuadratureFailure("base point within 1e-6 of the cycle");
        const int n = std::min(16384, std::max(256, static_cast<int>(std::ceil(40.0 / dist))));
        auto U = [&](Vec2 p) { return u_field_trapezoid(fg, g, p, n); };

        Vec2 du;
        du.x = (U({s.x - 2 * fd_h, s.y}) - 8.0 * U({s.x - fd_h, s.y}) +
                8.0 * U({s.x + fd_h, s.y}) - U({s.x + 2 * fd_h, s.y})) /
               (12.0 * fd_h);
        du.y = (U({s.x, s.y - 2 * fd_h}) - 8.0 * U({s.x, s.y - fd_h}) +
                8.0 * U({s.x, s.y + fd_h}) - U({s.x, s.y + 2 * fd_h})) /
               (12.0 * fd_h);
        res.du.push_back(du);
        res.max_grad_error = std::max(res.max_grad_error, (du - res.expected).norm());
    }

    // unit jump across the cycle, measured just off an interior point
    const double t0 = 0.37;
    const double eps = 1e-5;
    const Vec2 base = g * t0;
    const Vec2 nhat = g.perp() * (1.0 / g.norm());
    const double eps_param = eps / g.norm();
    const double u_minus = u_field_graded(fg, g, base - nhat * eps, t0, eps_param);
    const double u_plus = u_field_graded(fg, g, base + nhat * eps, t0, eps_param);
    res.jump = u_minus - u_plus;
    return res;
}

} // namespace vflow
