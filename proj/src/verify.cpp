#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "vflow/analysis.hpp"
#include "vflow/dynamics.hpp"
#include "vflow/planar.hpp"
#include "vflow/runner.hpp"

namespace vflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

ConformalFactor example_metric() {
    // rho = 1 + (1/4)(cos 2 pi x + sin 2 pi y)
    std::vector<FourierMode> modes;
    modes.push_back({1, 0, {0.125, 0.0}});
    modes.push_back({-1, 0, {0.125, 0.0}});
    modes.push_back({0, 1, {0.0, -0.125}});
    modes.push_back({0, -1, {0.0, 0.125}});
    return make_conformal(64, modes);
}

struct Check {
    std::string name;
    std::function<bool(std::string&)> body;
};

bool close(double a, double b, double tol, std::string& detail) {
    if (std::abs(a - b) <= tol)
        return true;
    detail = "got " + std::to_string(a) + ", want " + std::to_string(b) + " within " +
             std::to_string(tol);
    return false;
}

} // namespace

int run_verify_checks(double robin_constant_offset) {
    const Lattice square = make_lattice({1, 0}, {0, 1});
    const ConformalFactor cf = example_metric();
    const RobinField rob(cf, square, robin_constant_offset);

    std::vector<Check> checks;

    checks.push_back({"gram_matrix_shear", [](std::string& d) {
        const Mat2 m = gram_matrix(make_lattice({1, 0}, {0.5, 1}));
        return close(m.m00, 1.25, 1e-15, d) && close(m.m01, -0.5, 1e-15, d) &&
               close(m.m10, -0.5, 1e-15, d) && close(m.m11, 1.0, 1e-15, d);
    }});

    checks.push_back({"riemann_block_relation", [](std::string& d) {
        for (const Lattice& lat :
             {make_lattice({1, 0}, {0, 1}), make_lattice({1, 0}, {0.5, 1})}) {
            const Mat4 r = riemann_block_check(lat);
            for (const auto& row : r)
                for (double v : row)
                    if (!close(v, 0.0, 1e-12, d))
                        return false;
        }
        return true;
    }});

    checks.push_back({"poisson_first_mode", [&](std::string& d) {
        const PoissonSolution phi(cf, square);
        const std::complex<double> c = phi.coeff(1, 0);
        return close(c.real(), -0.125 / (4.0 * kPi * kPi), 1e-15, d) &&
               close(c.imag(), 0.0, 1e-15, d);
    }});

    checks.push_back({"robin_at_peak", [&](std::string& d) {
        return close(rob(square.to_xy({0.0, 0.25})).value, 0.006935592192767605, 1e-9, d);
    }});

    checks.push_back({"robin_at_min_closed_form", [&](std::string& d) {
        const double want = std::log(0.5) / (4.0 * kPi) + 1.0 / (4.0 * kPi * kPi);
        return close(rob(square.to_xy({0.5, 0.75})).value, want, 1e-9, d);
    }});

    checks.push_back({"deformation_energy_single", [&](std::string& d) {
        const double h = conformal_hamiltonian_terms(cf, square, {{square.to_xy({0.0, 0.25}), 1.0}});
        return close(h, 0.0034677960963838024, 1e-9, d) &&
               close(h, 0.5 * rob(square.to_xy({0.0, 0.25})).value, 1e-12, d);
    }});

    checks.push_back({"deformation_energy_neutral_pair", [&](std::string& d) {
        const Vec2 z1 = square.to_xy({0.13, 0.41});
        const Vec2 z2 = square.to_xy({0.67, 0.89});
        const double h = conformal_hamiltonian_terms(cf, square, {{z1, 1.0}, {z2, -1.0}});
        const double local = std::log(eval_rho(cf, square, z1).value) / (8.0 * kPi) +
                             std::log(eval_rho(cf, square, z2).value) / (8.0 * kPi);
        return close(h, local, 1e-15, d);
    }});

    checks.push_back({"deformation_energy_flat_zero", [&](std::string& d) {
        const ConformalFactor flat = make_conformal(64, {});
        return close(conformal_hamiltonian_terms(flat, square, {{{0.3, 0.4}, 2.0}}), 0.0, 0.0, d);
    }});

    checks.push_back({"flat_green_two_methods", [&](std::string& d) {
        const FlatGreen fg(square);
        for (const Vec2 z : {Vec2{0.31, 0.17}, Vec2{0.05, 0.62}}) {
            const double a = fg.eval(z, {0.0, 0.0}).value;
            const double b = fg.eval_direct(z, {0.0, 0.0}, 300).value;
            if (!close(a, b, 1e-6, d))
                return false;
        }
        return true;
    }});

    checks.push_back({"disk_green_value", [](std::string& d) {
        const double g = planar::green_electro_disk({0.5, 0.0}, {0.0, 0.0}).value;
        return close(g, std::log(2.0) / (2.0 * kPi), 1e-12, d);
    }});

    checks.push_back({"doubled_disk_value", [](std::string& d) {
        const double g = planar::green_double_disk({0.25, 0.0}, {0.5, 0.0}).value;
        const double want = (4.0 * std::log(4.0) + 0.0625 + 0.25 - 1.5) / (8.0 * kPi);
        return close(g, want, 1e-12, d);
    }});

    checks.push_back({"disk_from_double", [](std::string& d) {
        const Vec2 zs[] = {{0.3, 0.2}, {-0.5, 0.1}, {0.0, 0.7}, {0.2, -0.4}, {-0.1, -0.6}};
        const Vec2 ws[] = {{0.1, 0.1}, {0.4, -0.3}, {-0.2, 0.5}, {0.6, 0.0}, {0.05, 0.3}};
        for (int i = 0; i < 5; ++i)
            if (!close(planar::electro_from_double_residual(zs[i], ws[i]), 0.0, 1e-12, d))
                return false;
        return true;
    }});

    checks.push_back({"sphere_values", [](std::string& d) {
        const double g1 = planar::green_sphere({0.0, 0.0}, {1.0, 0.0}).value;
        const double g2 = planar::green_sphere({0.5, 0.0}, {-2.0, 0.0}).value;
        return close(g1, -(1.0 - std::log(2.0)) / (4.0 * kPi), 1e-12, d) &&
               close(g2, -1.0 / (4.0 * kPi), 1e-12, d);
    }});

    checks.push_back({"annulus_measure_midline", [](std::string& d) {
        const planar::Annulus an(0.5, 2.0);
        return close(planar::harmonic_measure(an, {0.0, 1.0}).value, 0.5, 1e-15, d);
    }});

    checks.push_back({"annulus_capacity", [](std::string& d) {
        const planar::Annulus an(0.5, 2.0);
        return close(an.capacity_Q(), std::log(4.0) / kPi, 1e-15, d) &&
               close(an.capacity_P() * an.capacity_Q(), 1.0, 1e-15, d);
    }});

    checks.push_back({"annulus_impulsive_circulation", [](std::string& d) {
        const planar::Annulus an(0.5, 2.0);
        return close(planar::harmonic_measure(an, {1.0, 0.0}).value, 0.5, 1e-12, d);
    }});

    checks.push_back({"hydro_flux_through_hole", [](std::string& d) {
        const planar::Annulus an(0.5, 2.0);
        const Vec2 w{1.3, 0.4};
        for (double p : {0.0, 0.3}) {
            auto grad = [&](Vec2 z) { return planar::green_hydro_annulus(an, z, w, p).grad; };
            if (!close(planar::flux_clockwise(0.9, grad), -p, 1e-6, d))
                return false;
        }
        return true;
    }});

    checks.push_back({"cycle_integral_differential", [&](std::string& d) {
        const HatTrickResult r =
            hat_trick_check(square, Cycle::a, {{0.3, 0.4}, {0.7, 0.25}});
        return close(r.max_grad_error, 0.0, 1e-6, d) && close(r.jump, 1.0, 1e-4, d);
    }});

    int failures = 0;
    for (const Check& c : checks) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (ok) {
            std::printf("ok   %s\n", c.name.c_str());
        } else {
            std::printf("FAIL %s: %s\n", c.name.c_str(), detail.c_str());
            ++failures;
        }
    }
    std::printf("%zu checks, %d failed\n", checks.size(), failures);
    return failures;
}

} // namespace vflow
