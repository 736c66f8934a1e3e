#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "vflow/analysis.hpp"
#include "vflow/dynamics.hpp"
#include "vflow/errors.hpp"
#include "vflow/surface.hpp"

using namespace vflow;

namespace {

ConformalFactor example_metric(double scale = 1.0) {
    // rho = 1 + (scale/4)(cos 2 pi x + sin 2 pi y)
    return make_conformal(64, {{1, 0, {0.125 * scale, 0.0}},
                               {-1, 0, {0.125 * scale, 0.0}},
                               {0, 1, {0.0, -0.125 * scale}},
                               {0, -1, {0.0, 0.125 * scale}}});
}

const Lattice& square() {
    static const Lattice sq = make_lattice({1, 0}, {0, 1});
    return sq;
}

const Surface& metric_surface() {
    static const Surface srf(example_metric(), square());
    return srf;
}

const Surface& flat_surface() {
    static const Surface srf(make_conformal(64, {}), square());
    return srf;
}

} // namespace

TEST_CASE("linear flow crossings land on the golden-ratio ladder") {
    // flat torus: the vortex rides (eta_x, eta_y) = (1, phi-fraction), so
    // successive upward crossings of x = 0 step y by eta_y/eta_x
    const double golden = 0.61803398874989484820;
    const double h = 0.5 * (1.0 + golden * golden); // R/2 + |eta|^2/2 with flat R = 0
    PoincareOptions opt;
    opt.h_level = h;
    opt.crossings = 144;
    opt.t_max = 1000.0;
    const PoincareOrbit orb = poincare_section(flat_surface(), {0.2, golden}, 1.0, opt);
    REQUIRE(orb.points.size() == 144);
    CHECK(orb.eta_x0 == doctest::Approx(1.0).epsilon(1e-12));
    double worst_gap = 0, worst_eta = 0;
    for (std::size_t i = 0; i < orb.points.size(); ++i) {
        worst_eta = std::max(worst_eta, std::abs(orb.points[i].y - golden));
        if (i > 0) {
            const double gap = frac(orb.points[i].x - orb.points[i - 1].x);
            worst_gap = std::max(worst_gap, std::abs(gap - golden));
        }
    }
    CHECK(worst_eta < 1e-12);
    CHECK(worst_gap < 1e-9);
    CHECK(orb.max_energy_error < 1e-9);
}

TEST_CASE("section points respect the energy level on the example metric") {
    const double h = 0.12754602582503802; // H(x=0, y=1/2, |eta|=1/2)
    PoincareOptions opt;
    opt.h_level = h;
    opt.crossings = 200;
    opt.t_max = 2e4;
    const PoincareOrbit orb = poincare_section(metric_surface(), {0.5, 0.25}, 1.0, opt);
    REQUIRE(orb.points.size() == 200);
    CHECK(orb.max_energy_error < 1e-7);
    CHECK(orb.eta_x0 > 0.0);
    for (const Vec2& p : orb.points) {
        CHECK(p.x >= 0.0);
        CHECK(p.x < 1.0);
    }
}

TEST_CASE("the paper family seed reproduces the prescribed energy") {
    const Surface& srf = metric_surface();
    VortexState st;
    st.uv = {{0.0, 0.5}};
    st.gamma = {1.0};
    st.eta = {0.5, 0.0};
    CHECK(hamiltonian(srf, st) == doctest::Approx(0.12754602582503802).epsilon(1e-13));
}

TEST_CASE("an equilibrium seed never crosses the section") {
    const Surface& srf = metric_surface();
    PoincareOptions opt;
    opt.h_level = 0.5 * srf.rob({0.0, 0.25}).value;
    opt.t_max = 50.0;
    opt.crossings = 10;
    CHECK_THROWS_AS(poincare_section(srf, {0.25, 0.0}, 1.0, opt), NoCrossings);
}

TEST_CASE("a seed that cannot meet the energy level is rejected") {
    PoincareOptions opt;
    opt.h_level = -0.01; // below the vortex self-energy everywhere
    CHECK_THROWS_AS(poincare_section(metric_surface(), {0.5, 0.0}, 1.0, opt), ConfigError);
}

TEST_CASE("box occupancy counts distinct cells") {
    std::vector<Vec2> pts(500, Vec2{0.3, 0.1});
    CHECK(box_occupancy(pts, 0.5) == doctest::Approx(1.0 / (100.0 * 100.0)).epsilon(1e-12));
    pts.clear();
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j)
            pts.push_back({(i + 0.5) / 100.0, ((j + 0.5) / 100.0 - 0.5) * 2 * 0.5});
    CHECK(box_occupancy(pts, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(box_occupancy({}, 0.5) == 0.0);
}

TEST_CASE("the example metric has exactly the four symmetry equilibria") {
    int diverged = -1;
    const auto eq = find_equilibria(example_metric(), square(), 4, &diverged);
    REQUIRE(eq.size() == 4);
    CHECK(diverged == 0);

    const Vec2 expected[4] = {{0.0, 0.25}, {0.0, 0.75}, {0.5, 0.25}, {0.5, 0.75}};
    const char* types[4] = {"max", "saddle", "saddle", "min"};
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(eq[i].uv.x - expected[i].x) < 1e-8);
        CHECK(std::abs(eq[i].uv.y - expected[i].y) < 1e-8);
        CHECK(eq[i].type == types[i]);
        CHECK(eq[i].grad_norm < 1e-10);
    }

    // each equilibrium is a fixed point of the full dynamics
    VortexSystem sys(metric_surface(), {1.0}, RhsKind::complete);
    for (const auto& e : eq) {
        VortexState st;
        st.uv = {e.uv};
        st.gamma = {1.0};
        State dy;
        sys(0.0, sys.pack(st), dy);
        double norm = 0;
        for (double v : dy)
            norm = std::max(norm, std::abs(v));
        CHECK(norm < 1e-8);
    }
}

TEST_CASE("a flat metric has no isolated equilibria") {
    CHECK_THROWS_AS(find_equilibria(make_conformal(64, {}), square(), 4),
                    NoIsolatedEquilibria);
}

TEST_CASE("scaling the metric keeps the symmetry-pinned equilibria") {
    const auto eq = find_equilibria(example_metric(0.9), square(), 4);
    REQUIRE(eq.size() == 4);
    const Vec2 expected[4] = {{0.0, 0.25}, {0.0, 0.75}, {0.5, 0.25}, {0.5, 0.75}};
    const char* types[4] = {"max", "saddle", "saddle", "min"};
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(eq[i].uv.x - expected[i].x) < 1e-8);
        CHECK(std::abs(eq[i].uv.y - expected[i].y) < 1e-8);
        CHECK(eq[i].type == types[i]);
    }
}

TEST_CASE("a flat dipole shadows its straight geodesic to roundoff") {
    DipoleProbeOptions opt;
    opt.d = 0.01;
    const auto res = dipole_probe(flat_surface(), {0.2, 0.3}, {1.0, 0.4}, opt);
    CHECK(res.max_deviation < 1e-8);
    CHECK(res.initial_speed > 1.0);
    CHECK(res.final_separation == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("dipole deviation shrinks quadratically as the pair tightens") {
    DipoleProbeOptions opt;
    std::vector<double> devs;
    for (const double d : {0.02, 0.01, 0.005}) {
        opt.d = d;
        const auto res = dipole_probe(metric_surface(), {0.2, 0.3}, {1.0, 0.4}, opt);
        devs.push_back(res.max_deviation);
        CHECK(res.final_separation < 2.0 * d);
        CHECK(res.final_separation > 0.5 * d);
    }
    CHECK(devs[0] >= devs[1]);
    CHECK(devs[1] >= devs[2]);
    const double ratio = devs[1] / devs[2];
    CHECK(ratio > 2.6);
    CHECK(ratio < 6.0);
}

TEST_CASE("dipole probe validates its arguments") {
    DipoleProbeOptions opt;
    opt.d = -1.0;
    CHECK_THROWS_AS(dipole_probe(flat_surface(), {0.2, 0.3}, {1.0, 0.0}, opt), ConfigError);
    opt.d = 0.01;
    CHECK_THROWS_AS(dipole_probe(flat_surface(), {0.2, 0.3}, {0.0, 0.0}, opt), ConfigError);
}

TEST_CASE("freezing the harmonic part changes nothing on the flat torus") {
    VortexState st;
    st.uv = {{0.2, 0.3}, {0.6, 0.75}};
    st.gamma = {1.0, -0.5};
    st.eta = {0.3, 0.1};
    IntegrateOptions o;
    o.t_end = 3.0;
    const CompareResult c = complete_vs_incomplete(flat_surface(), st, o);
    CHECK(c.phase_distance_max == 0.0);
}

TEST_CASE("freezing the harmonic part changes nothing at an equilibrium") {
    VortexState st;
    st.uv = {{0.0, 0.25}};
    st.gamma = {1.0};
    IntegrateOptions o;
    o.t_end = 5.0;
    const CompareResult c = complete_vs_incomplete(metric_surface(), st, o);
    CHECK(c.phase_distance_max < 1e-9);
}

TEST_CASE("generic metric states drift apart once eta is frozen") {
    VortexState st;
    st.uv = {{0.3, 0.6}};
    st.gamma = {1.0};
    st.eta = {0.5, 0.0};
    IntegrateOptions o;
    o.t_end = 10.0;
    o.sample_dt = 0.05;
    const CompareResult c = complete_vs_incomplete(metric_surface(), st, o);
    CHECK(c.phase_distance_max > 1e-2);
    REQUIRE(c.t.size() == c.phase_distance.size());
    CHECK(c.phase_distance.front() == 0.0);
    // the complete run trades energy between the vortex and harmonic parts
    CHECK(c.h_harm_max - c.h_harm_min > 1e-3);
    CHECK(c.h_vort_max - c.h_vort_min > 1e-3);
    // distances are reported against monotone time
    for (std::size_t i = 1; i < c.t.size(); ++i)
        CHECK(c.t[i] > c.t[i - 1]);
}
