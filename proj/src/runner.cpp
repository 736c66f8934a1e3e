#include "vflow/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vflow/analysis.hpp"
#include "vflow/dynamics.hpp"
#include "vflow/errors.hpp"
#include "vflow/io.hpp"
#include "vflow/planar.hpp"
#include "vflow/runconfig.hpp"

namespace vflow {

using nlohmann::json;

namespace {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads <= 1) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(i)] = std::current_exception();
                }
            }
        });
    }
    for (std::thread& th : pool)
        th.join();
    for (const std::exception_ptr& e : errors)
        if (e)
            std::rethrow_exception(e);
}

std::string out_path(const RunOptions& opt, const std::string& name) {
    return (std::filesystem::path(opt.out_dir) / name).string();
}

struct ParsedVortices {
    std::vector<Vec2> pos;
    std::vector<double> gamma;
};

ParsedVortices parse_vortices(const json& j) {
    if (!j.contains("vortices") || !j.at("vortices").is_array() || j.at("vortices").empty())
        throw ConfigError("config needs a non-empty vortices array");
    ParsedVortices out;
    for (const json& v : j.at("vortices")) {
        out.pos.push_back({require_double(v, "x"), require_double(v, "y")});
        out.gamma.push_back(require_double(v, "gamma"));
    }
    return out;
}

int run_simulate(const RunOptions& opt) {
    const json j = load_json(opt.config_path);
    const SurfaceConfig sc = parse_surface(j.contains("surface") ? j.at("surface") : json::object());
    const Surface srf(sc.cf, sc.lat);
    const ParsedVortices pv = parse_vortices(j);

    VortexState init;
    init.uv = pv.pos; // lattice coordinates
    init.gamma = pv.gamma;
    if (j.contains("eta")) {
        const json& e = j.at("eta");
        if (!e.is_array() || e.size() != 2)
            throw ConfigError("eta must be [eta_x, eta_y]");
        init.eta = {e[0].get<double>(), e[1].get<double>()};
    }

    IntegrateOptions io;
    io.t_end = require_double(j, "t_end");
    io.rel_tol = get_double(j, "rel_tol", 1e-10);
    io.abs_tol = get_double(j, "abs_tol", 1e-12);
    io.sample_dt = get_double(j, "sample_dt", 0.01);
    const std::string kind = j.contains("rhs") ? j.at("rhs").get<std::string>() : "complete";
    if (kind == "complete")
        io.kind = RhsKind::complete;
    else if (kind == "incomplete")
        io.kind = RhsKind::incomplete;
    else
        throw ConfigError("rhs must be \"complete\" or \"incomplete\"");

    const Trajectory traj = integrate(srf, init, io);
    VortexSystem sys(srf, init.gamma, io.kind);

    std::string csv = "t";
    for (std::size_t k = 1; k <= init.uv.size(); ++k)
        csv += ",x" + std::to_string(k) + ",y" + std::to_string(k);
    csv += ",eta_x,eta_y,H,Hvort,Hharm\n";
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const HamiltonianParts hp = hamiltonian_parts(srf, sys.unpack(traj.t[i], traj.y[i]));
        std::vector<double> row;
        row.push_back(traj.t[i]);
        for (double v : traj.y[i])
            row.push_back(v);
        row.push_back(hp.total);
        row.push_back(hp.vortex);
        row.push_back(hp.harmonic);
        csv += csv_row(row);
    }
    write_file_atomic(out_path(opt, "trajectory.csv"), csv);

    const ConservedReport rep = conserved_report(srf, traj);
    json summary;
    summary["t_final"] = traj.t_final;
    summary["halt_reason"] = traj.halt_reason;
    summary["samples"] = traj.t.size();
    summary["steps_accepted"] = traj.steps_accepted;
    summary["steps_rejected"] = traj.steps_rejected;
    summary["rel_tol"] = io.rel_tol;
    summary["abs_tol"] = io.abs_tol;
    summary["H0"] = rep.h0;
    summary["H_drift_max"] = rep.h_drift_max;
    summary["momentum_defined"] = rep.momentum_defined;
    if (rep.momentum_defined)
        summary["momentum_drift_max"] = rep.momentum_drift_max;
    write_file_atomic(out_path(opt, "summary.json"), summary.dump(2) + "\n");
    return 0;
}

int run_section(const RunOptions& opt) {
    const json j = load_json(opt.config_path);
    const SurfaceConfig sc = parse_surface(j.contains("surface") ? j.at("surface") : json::object());
    const Surface srf(sc.cf, sc.lat);
    const double gamma = get_double(j, "gamma", 1.0);

    PoincareOptions po;
    po.h_level = require_double(j, "h_level");
    po.crossings = get_int(j, "crossings", 1000);
    po.t_max = get_double(j, "t_max", 2e5);
    po.rel_tol = get_double(j, "rel_tol", 1e-10);
    po.abs_tol = get_double(j, "abs_tol", 1e-12);

    if (!j.contains("seeds") || !j.at("seeds").is_array() || j.at("seeds").empty())
        throw ConfigError("config needs a non-empty seeds array");
    std::vector<SectionSeed> seeds;
    for (const json& s : j.at("seeds"))
        seeds.push_back({require_double(s, "y"), require_double(s, "eta_y")});

    double eta_bound = get_double(j, "eta_bound", 0.0);
    if (eta_bound <= 0.0) {
        double rmin = srf.rob(srf.lat.to_xy({0.0, 0.0})).value;
        for (int i = 1; i < 512; ++i)
            rmin = std::min(rmin, srf.rob(srf.lat.to_xy({0.0, i / 512.0})).value);
        const double b2 = 2.0 * po.h_level - gamma * gamma * rmin;
        if (b2 <= 0.0)
            throw ConfigError("energy level leaves no room on the section");
        eta_bound = std::sqrt(b2);
    }

    std::vector<PoincareOrbit> orbits(seeds.size());
    parallel_for(static_cast<int>(seeds.size()), opt.threads,
                 [&](int i) { orbits[i] = poincare_section(srf, seeds[i], gamma, po); });

    json manifest;
    manifest["h_level"] = po.h_level;
    manifest["gamma"] = gamma;
    manifest["eta_bound"] = eta_bound;
    manifest["orbits"] = json::array();
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "orbit_%03zu.csv", i);
        std::string csv = "y,eta_y\n";
        for (const Vec2& p : orbits[i].points)
            csv += csv_row({p.x, p.y});
        write_file_atomic(out_path(opt, name), csv);

        json o;
        o["file"] = name;
        o["y0"] = orbits[i].seed.y;
        o["eta_y0"] = orbits[i].seed.eta_y;
        o["eta_x0"] = orbits[i].eta_x0;
        o["points"] = orbits[i].points.size();
        o["occupancy"] = box_occupancy(orbits[i].points, eta_bound);
        o["max_energy_error"] = orbits[i].max_energy_error;
        manifest["orbits"].push_back(o);
    }
    write_file_atomic(out_path(opt, "manifest.json"), manifest.dump(2) + "\n");
    return 0;
}

int run_equilibria(const RunOptions& opt) {
    const json j = load_json(opt.config_path);
    const SurfaceConfig sc = parse_surface(j.contains("surface") ? j.at("surface") : json::object());
    int diverged = 0;
    const std::vector<Equilibrium> eqs =
        find_equilibria(sc.cf, sc.lat, get_int(j, "seeds_per_axis", 4), &diverged);

    json out;
    out["count"] = eqs.size();
    out["diverged_seeds"] = diverged;
    out["points"] = json::array();
    for (const Equilibrium& e : eqs) {
        json p;
        p["u"] = e.uv.x;
        p["v"] = e.uv.y;
        p["x"] = e.xy.x;
        p["y"] = e.xy.y;
        p["type"] = e.type;
        p["grad_norm"] = e.grad_norm;
        out["points"].push_back(p);
    }
    write_file_atomic(out_path(opt, "equilibria.json"), out.dump(2) + "\n");
    return 0;
}

int run_greens_table(const RunOptions& opt) {
    const json j = load_json(opt.config_path);
    const SurfaceConfig sc = parse_surface(j.contains("surface") ? j.at("surface") : json::object());
    const std::string field = j.contains("field") ? j.at("field").get<std::string>() : "green";

    std::vector<Vec2> pts;
    if (j.contains("points")) {
        for (const json& p : j.at("points")) {
            if (!p.is_array() || p.size() != 2)
                throw ConfigError("each table point must be [u, v]");
            pts.push_back({p[0].get<double>(), p[1].get<double>()});
        }
    }
    if (j.contains("grid")) {
        const int nx = get_int(j.at("grid"), "nx", 16);
        const int ny = get_int(j.at("grid"), "ny", 16);
        if (nx < 1 || ny < 1)
            throw ConfigError("grid sizes must be positive");
        for (int a = 0; a < nx; ++a)
            for (int b = 0; b < ny; ++b)
                pts.push_back({(a + 0.5) / nx, (b + 0.5) / ny});
    }
    if (pts.empty())
        throw ConfigError("greens-table needs points or a grid");

    std::string csv;
    if (field == "green") {
        Vec2 w{0.0, 0.0};
        if (j.contains("w")) {
            const json& ww = j.at("w");
            if (!ww.is_array() || ww.size() != 2)
                throw ConfigError("w must be [u, v]");
            w = {ww[0].get<double>(), ww[1].get<double>()};
        }
        const ConformalGreen green(sc.cf, sc.lat);
        const Vec2 wxy = sc.lat.to_xy(w);
        csv = "x,y,G,Gx,Gy\n";
        for (const Vec2& p : pts) {
            const GreenEval ge = green.eval(sc.lat.to_xy(p), wxy);
            csv += csv_row({p.x, p.y, ge.value, ge.grad.x, ge.grad.y});
        }
    } else if (field == "robin") {
        const RobinField rob(sc.cf, sc.lat);
        csv = "x,y,R,Rx,Ry\n";
        for (const Vec2& p : pts) {
            const RobinField::Eval e = rob(sc.lat.to_xy(p));
            csv += csv_row({p.x, p.y, e.value, e.grad.x, e.grad.y});
        }
    } else {
        throw ConfigError("field must be \"green\" or \"robin\"");
    }
    write_file_atomic(out_path(opt, "table.csv"), csv);
    return 0;
}

int run_annulus(const RunOptions& opt) {
    const json j = load_json(opt.config_path);
    const planar::Annulus an(require_double(j, "r"), require_double(j, "R"));
    const ParsedVortices pv = parse_vortices(j); // cartesian positions here

    planar::AnnulusOptions ao;
    ao.t_end = require_double(j, "t_end");
    ao.rel_tol = get_double(j, "rel_tol", 1e-10);
    ao.abs_tol = get_double(j, "abs_tol", 1e-12);
    ao.sample_dt = get_double(j, "sample_dt", 0.01);
    if (j.contains("p") && j.at("p").is_string()) {
        if (j.at("p").get<std::string>() != "impulsive")
            throw ConfigError("p must be a number or \"impulsive\"");
        ao.impulsive_start = true;
    } else {
        ao.p = get_double(j, "p", 0.0);
    }

    const planar::AnnulusTrajectory traj = planar::integrate_annulus(an, pv.pos, pv.gamma, ao);
    const planar::AnnulusReport rep = planar::annulus_report(an, traj);

    std::string csv = "t";
    for (std::size_t k = 1; k <= pv.pos.size(); ++k)
        csv += ",x" + std::to_string(k) + ",y" + std::to_string(k);
    csv += ",B\n";
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        std::vector<double> row;
        row.push_back(traj.t[i]);
        for (double v : traj.y[i])
            row.push_back(v);
        csv += csv_row(row);
    }
    write_file_atomic(out_path(opt, "trajectory.csv"), csv);

    json summary;
    summary["P"] = rep.P;
    summary["Q"] = rep.Q;
    summary["p_initial"] = rep.p_initial;
    summary["p_drift_max"] = rep.p_drift_max;
    summary["H_drift_max"] = rep.h_drift_max;
    summary["t_final"] = traj.t_final;
    summary["halt_reason"] = traj.halt_reason;
    write_file_atomic(out_path(opt, "summary.json"), summary.dump(2) + "\n");
    return 0;
}

void emit_error(const std::string& code, const std::string& message) {
    json e;
    e["error"]["code"] = code;
    e["error"]["message"] = message;
    std::fprintf(stderr, "%s\n", e.dump().c_str());
}

} // namespace

int dispatch(const std::string& command, const RunOptions& opt) {
    try {
        if (command == "simulate")
            return run_simulate(opt);
        if (command == "section")
            return run_section(opt);
        if (command == "equilibria")
            return run_equilibria(opt);
        if (command == "greens-table")
            return run_greens_table(opt);
        if (command == "annulus")
            return run_annulus(opt);
        if (command == "verify")
            return run_verify_checks() == 0 ? 0 : 3;
        throw ConfigError("unknown command: " + command);
    } catch (const ConfigError& e) {
        emit_error(e.code, e.what());
        return 2;
    } catch (const Error& e) {
        emit_error(e.code, e.what());
        return 3;
    } catch (const std::exception& e) {
        emit_error("InternalError", e.what());
        return 3;
    }
}

} // namespace vflow
