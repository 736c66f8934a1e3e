#include "vflow/surface.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "vflow/errors.hpp"

namespace vflow {

Lattice make_lattice(Vec2 a, Vec2 b, bool rescale) {
    const double d = cross(a, b);
    if (std::abs(d) < 1e-14) {
        std::ostringstream os;
        os << "lattice generators are (numerically) dependent, det = " << d;
        throw DegenerateLattice(os.str());
    }
    if (d < 0.0) {
        std::ostringstream os;
        os << "lattice determinant is " << d << "; generators must be positively oriented";
        throw DetNotOne(os.str());
    }
    Lattice lat{a, b};
    if (rescale) {
        const double s = 1.0 / std::sqrt(d);
        lat = {s * a, s * b};
    } else if (std::abs(d - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "lattice determinant is " << d << ", not 1 (pass rescale to normalize)";
        throw DetNotOne(os.str());
    }
    return lat;
}

Mat2 gram_matrix(const Lattice& lat) {
    const double ab = dot(lat.a, lat.b);
    return {norm2(lat.b), -ab, -ab, norm2(lat.a)};
}

Vec2 harmonic_coords(const Lattice& lat, Vec2 eta) {
    return {dot(lat.a, eta), dot(lat.b, eta)};
}

Vec2 harmonic_field(const Lattice& lat, Vec2 periods) {
    const double A = periods.x, B = periods.y;
    return {A * lat.b.y - B * lat.a.y, -A * lat.b.x + B * lat.a.x};
}

Mat4 riemann_block_check(const Lattice& lat) {
    const Mat2 M = gram_matrix(lat);
    const double P = M.m00, Q = M.m11, R = M.m01;
    const Mat2 S{-R, P, -Q, R};
    const Mat2 S2 = S * S;
    // kron(S, I2)^2 + I4 = kron(S^2 + I2, I2)
    const Mat2 res = S2 + Mat2{1.0, 0.0, 0.0, 1.0};
    Mat4 out{};
    const double r[2][2] = {{res.m00, res.m01}, {res.m10, res.m11}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                out[2 * i + k][2 * j + k] = r[i][j];
    return out;
}

ConformalFactor make_conformal(int truncation, const std::vector<FourierMode>& modes) {
    if (truncation < 1) throw ConfigError("conformal truncation order must be >= 1");
    std::map<std::pair<int, int>, std::complex<double>> table;
    for (const auto& md : modes) {
        if (md.m == 0 && md.n == 0)
            throw ConfigError("conformal mode (0,0) is not allowed; the density has unit mean");
        if (std::abs(md.m) > truncation || std::abs(md.n) > truncation) {
            std::ostringstream os;
            os << "conformal mode (" << md.m << "," << md.n
               << ") exceeds truncation order " << truncation;
            throw ConfigError(os.str());
        }
        auto [it, inserted] = table.emplace(std::make_pair(md.m, md.n), md.c);
        if (!inserted) it->second += md.c;
    }
    // close under conjugation; reject inconsistent explicit pairs
    for (auto& [key, c] : table) {
        const auto conj_key = std::make_pair(-key.first, -key.second);
        auto it = table.find(conj_key);
        if (it == table.end()) {
            table.emplace(conj_key, std::conj(c));
        } else {
            const double scale = std::max(1.0, std::abs(c));
            if (std::abs(it->second - std::conj(c)) > 1e-12 * scale) {
                std::ostringstream os;
                os << "modes (" << key.first << "," << key.second << ") and ("
                   << conj_key.first << "," << conj_key.second
                   << ") are not conjugate; the density would not be real";
                throw ConfigError(os.str());
            }
        }
    }
    ConformalFactor cf;
    cf.truncation = truncation;
    cf.modes.reserve(table.size());
    for (const auto& [key, c] : table) cf.modes.push_back({key.first, key.second, c});

    // positivity, sampled on the fundamental cell
    if (!cf.modes.empty()) {
        constexpr int n = 128;
        double min_rho = 1e300;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double u = double(i) / n, v = double(j) / n;
                double rho = 1.0;
                for (const auto& md : cf.modes) {
                    const double ph = 2.0 * M_PI * (md.m * u + md.n * v);
                    rho += md.c.real() * std::cos(ph) - md.c.imag() * std::sin(ph);
                }
                min_rho = std::min(min_rho, rho);
            }
        }
        if (min_rho <= 0.0) {
            std::ostringstream os;
            os << "conformal density reaches " << min_rho
               << " on a 128x128 sample of the cell; it must be strictly positive";
            throw NonPositiveDensity(os.str());
        }
    }
    return cf;
}

Density eval_rho(const ConformalFactor& cf, const Lattice& lat, Vec2 xy) {
    Density out;
    if (cf.flat()) return out;
    const Vec2 uv = lat.to_uv(xy);
    const Vec2 al = lat.alpha(), be = lat.beta();
    double val = 1.0;
    Vec2 grad{};
    Mat2 hess{};
    for (const auto& md : cf.modes) {
        // wavevector of the mode in Cartesian coordinates
        const Vec2 k = 2.0 * M_PI * (double(md.m) * al + double(md.n) * be);
        const double ph = 2.0 * M_PI * (md.m * uv.x + md.n * uv.y);
        const double re = md.c.real() * std::cos(ph) - md.c.imag() * std::sin(ph);
        const double im = md.c.real() * std::sin(ph) + md.c.imag() * std::cos(ph);
        val += re;
        grad += -im * k; // Re(i*k*c*e) = -Im(c*e)*k
        hess = hess + (-re) * Mat2{k.x * k.x, k.x * k.y, k.y * k.x, k.y * k.y};
    }
    if (val <= 0.0) {
        std::ostringstream os;
        os << "density evaluates to " << val << " at (" << xy.x << "," << xy.y << ")";
        throw NonPositiveDensity(os.str());
    }
    out.value = val;
    out.grad = grad;
    out.hess = hess;
    return out;
}

} // namespace vflow
