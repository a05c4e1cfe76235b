#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "hotplate/analytic1d.hpp"
#include "hotplate/calibration.hpp"
#include "hotplate/compensation.hpp"
#include "hotplate/device.hpp"
#include "hotplate/electro.hpp"
#include "hotplate/field_io.hpp"
#include "hotplate/scenario.hpp"
#include "hotplate/serpentine.hpp"
#include "hotplate/thermal.hpp"
#include "hotplate/version.hpp"

namespace hotplate {

// exit codes, documented in the README
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_solver_error = 3;
inline constexpr int exit_other_error = 1;

struct RunContext {
    std::filesystem::path out_dir = "out";
    bool quiet = false;
    std::ostream* log = &std::cout;

    std::ostream& out() const { return *log; }
};

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

/// Tracks files created by one command; on failure everything written so far
/// is removed so a failed run leaves no partial outputs behind.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    std::ofstream open(const std::string& name) {
        std::filesystem::path p = dir_ / name;
        std::ofstream f(p, std::ios::binary);
        if (!f) throw config_error("cannot write output file '" + p.string() + "'");
        written_.push_back(p);
        return f;
    }

    void discard_all() {
        for (const auto& p : written_) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
        written_.clear();
    }

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> written_;
};

}  // namespace detail

// ============================================================================
// Device construction from a scenario
// ============================================================================

struct BuiltDevice {
    std::vector<HeaterLayout> layouts;
    DeviceModel device;
    std::map<std::string, double> drive;  // electrode name -> volts
};

inline BuiltDevice build_device(const Scenario& sc) {
    BuiltDevice b;
    if (sc.dual) {
        auto [a, bb] = build_dual_serpentine(sc.spec, "R1", "R2");
        b.layouts.push_back(std::move(a));
        b.layouts.push_back(std::move(bb));
    } else {
        std::string name = sc.geometry_preset == "custom" ? "R1" : sc.geometry_preset;
        b.layouts.push_back(build_serpentine(sc.spec, name));
    }

    VoxelizeOptions opt;
    opt.h = sc.h;
    opt.z_cells_per_layer = sc.z_cells_per_layer;
    opt.pad_temperature = sc.pad_temperature;
    opt.bottom_face_fixed = sc.bottom_face_fixed;
    opt.bottom_temperature = sc.bottom_temperature;
    opt.convection = sc.convection;
    opt.convection_ambient = sc.convection_ambient;
    b.device = voxelize(b.layouts, sc.stack, sc.materials, opt);

    if (sc.parallel) {
        for (const auto& l : b.layouts) {
            b.drive[l.name + "_a"] = 0.0;
            b.drive[l.name + "_b"] = sc.drive_volts;
        }
    } else {
        std::string name = b.layouts.size() > 1
                               ? "R" + std::to_string(sc.drive_resistor)
                               : b.layouts[0].name;
        b.drive[name + "_a"] = 0.0;
        b.drive[name + "_b"] = sc.drive_volts;
    }
    return b;
}

// ============================================================================
// analytic: closed-form report
// ============================================================================

struct AnalyticRow {
    std::string name;
    double length, width, thickness, resistance_ohm, volts;
    double rise_half_k, rise_full_k;  // both closed-form variants, at midpoint
};

inline std::vector<AnalyticRow> analytic_rows(const Scenario& sc) {
    std::vector<std::pair<std::string, SerpentineSpec>> specs;
    if (sc.geometry_preset == "dual") {
        specs.emplace_back("R1", serpentine_preset("R1"));
        specs.emplace_back("R2", serpentine_preset("R2"));
    } else if (sc.geometry_preset == "custom") {
        specs.emplace_back("custom", sc.spec);
    } else {
        specs.emplace_back(sc.geometry_preset, sc.spec);
    }

    const Material& poly = sc.materials.has("PolySi") ? sc.materials.lookup("PolySi")
                                                      : sc.materials.lookup(
                                                            sc.stack.layers[0].material);
    std::vector<AnalyticRow> rows;
    for (const auto& [name, spec] : specs) {
        HeaterLayout layout = build_serpentine(spec, name);
        Heater1D h;
        h.length = total_path_length(layout);
        h.width = spec.trace_width;
        h.thickness = spec.trace_thickness;
        h.k = poly.k;
        h.sheet_res = sc.sheet_res;
        h.t_amb = sc.pad_temperature;
        AnalyticRow row;
        row.name = name;
        row.length = h.length;
        row.width = h.width;
        row.thickness = h.thickness;
        row.resistance_ohm = resistance(h);
        row.volts = sc.drive_volts;
        row.rise_half_k = midpoint_rise(h, sc.drive_volts, ProfileVariant::half_power);
        row.rise_full_k = midpoint_rise(h, sc.drive_volts, ProfileVariant::full_power);
        rows.push_back(row);
    }
    return rows;
}

inline int cmd_analytic(const Scenario& sc, const RunContext& ctx) {
    detail::OutputSet out(ctx.out_dir);
    try {
        std::vector<AnalyticRow> rows = analytic_rows(sc);
        std::ofstream csv = out.open("analytic.csv");
        csv << sc.provenance_line(version_string) << '\n';
        csv << "name,L_um,w_um,t_um,R_ohm,V,rise_half_K,T_half_K,rise_full_K,T_full_K\n";
        char buf[300];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf,
                          "%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                          r.name.c_str(), units::to_um(r.length), units::to_um(r.width),
                          units::to_um(r.thickness), r.resistance_ohm, r.volts,
                          r.rise_half_k, sc.pad_temperature + r.rise_half_k,
                          r.rise_full_k, sc.pad_temperature + r.rise_full_k);
            csv << buf;
        }
        if (!ctx.quiet) {
            ctx.out() << "name      L_um        R_ohm       V      rise_half_K  rise_full_K\n";
            for (const auto& r : rows) {
                std::snprintf(buf, sizeof buf, "%-8s  %-10.6g  %-10.6g  %-5.4g  %-11.6g  %-11.6g\n",
                              r.name.c_str(), units::to_um(r.length), r.resistance_ohm,
                              r.volts, r.rise_half_k, r.rise_full_k);
                ctx.out() << buf;
            }
        }
        return exit_ok;
    } catch (...) {
        out.discard_all();
        throw;
    }
}

// ============================================================================
// solve: field solves plus exports
// ============================================================================

struct SolveSummary {
    std::map<std::string, std::string> entries;  // ordered, byte-stable

    void put(const std::string& key, double v) { entries[key] = detail::fmt(v); }
    void put(const std::string& key, const std::string& v) { entries[key] = v; }

    void write(std::ostream& os, const std::string& provenance) const {
        os << provenance << '\n';
        for (const auto& [k, v] : entries) os << k << " = " << v << '\n';
    }
};

inline SolveSummary solve_summary(const Scenario& sc, const BuiltDevice& b,
                                  const CoupledSolution& sol) {
    SolveSummary s;
    const DeviceModel& dev = b.device;
    s.put("geometry.preset", sc.geometry_preset);
    s.put("drive.mode", sc.parallel ? "parallel" : "single");
    s.put("grid.nx", static_cast<double>(dev.grid.nx));
    s.put("grid.ny", static_cast<double>(dev.grid.ny));
    s.put("grid.nz", static_cast<double>(dev.grid.nz));
    s.put("grid.h_um", units::to_um(dev.grid.hx));
    for (const auto& [name, volts] : sol.electrical.applied_volts)
        s.put("drive.volts." + name, volts);

    double lumped = std::numeric_limits<double>::quiet_NaN();
    try {
        lumped = lumped_resistance(sol.electrical);
    } catch (const std::exception&) { /* zero current or not a two-level drive */ }
    s.put("electrical.lumped_resistance_ohm", lumped);
    for (const auto& [name, amps] : sol.electrical.pad_currents)
        s.put("electrical.pad_current_A." + name, amps);
    s.put("electrical.total_power_W", sol.electrical.total_power);
    s.put("electrical.energy_residual_rel", sol.electrical.energy_residual_rel);
    s.put("electrical.max_divergence_rel", sol.electrical.max_divergence_rel);
    s.put("electrical.cg_iterations", static_cast<double>(sol.electrical.cg_iterations));

    Vec3 center = dev.center_probe();
    CurrentStats cs = current_density_stats(dev, sol.electrical, center);
    s.put("current_density.center_mA_per_um2", cs.at_probe / units::ma_per_um2);
    s.put("current_density.max_mA_per_um2", cs.max / units::ma_per_um2);
    s.put("current_density.max_x_um", units::to_um(cs.max_location.x));
    s.put("current_density.max_y_um", units::to_um(cs.max_location.y));

    s.put("thermal.max_temperature_K", sol.thermal.max_temperature);
    s.put("thermal.max_x_um", units::to_um(sol.thermal.max_location.x));
    s.put("thermal.max_y_um", units::to_um(sol.thermal.max_location.y));
    s.put("thermal.min_temperature_K", sol.thermal.min_temperature);
    s.put("thermal.center_temperature_K", probe(sol.thermal, center));
    for (const auto& [name, w] : sol.thermal.boundary_flux)
        s.put("thermal.boundary_flux_W." + name, w);
    s.put("thermal.source_power_W", sol.thermal.source_power);
    s.put("thermal.energy_residual_rel", sol.thermal.energy_residual_rel);
    s.put("thermal.cg_iterations", static_cast<double>(sol.thermal.cg_iterations));
    return s;
}

inline int cmd_solve(const Scenario& sc, const RunContext& ctx) {
    detail::OutputSet out(ctx.out_dir);
    try {
        BuiltDevice b = build_device(sc);
        SolveOptions opt{sc.tol, sc.max_iters, sc.threads};
        CoupledSolution sol = run_coupled(b.device, b.drive, opt);
        std::string prov = sc.provenance_line(version_string);

        SolveSummary summary = solve_summary(sc, b, sol);
        {
            std::ofstream f = out.open("summary.txt");
            summary.write(f, prov);
        }
        if (sc.write_fields) {
            {
                std::ofstream f = out.open("potential.csv");
                write_field_csv(sol.electrical.potential, "potential_V", f, prov);
            }
            {
                std::ofstream f = out.open("current_density.csv");
                write_vector_field_csv(sol.electrical.current_density, "J_A_per_m2", f, prov);
            }
            {
                std::ofstream f = out.open("heat_density.csv");
                write_field_csv(sol.electrical.heat_density, "q_W_per_m3", f, prov);
            }
            {
                std::ofstream f = out.open("temperature.csv");
                write_field_csv(sol.thermal.temperature, "T_K", f, prov);
            }
            {
                std::ofstream f = out.open("temperature.grid");
                write_rectilinear(sol.thermal.temperature, "temperature_K", f, prov);
            }
            {
                std::ofstream f = out.open("potential.grid");
                write_rectilinear(sol.electrical.potential, "potential_V", f, prov);
            }
            {
                std::ofstream f = out.open("voxels.csv");
                write_voxels_csv(b.device, f, prov);
            }
            for (int k : sc.svg_slices) {
                if (k < 0 || k >= b.device.grid.nz) continue;
                std::ofstream f = out.open("temperature_k" + std::to_string(k) + ".svg");
                write_svg_heatmap(sol.thermal.temperature, k, "temperature", "K", f, prov);
            }
        }
        if (!ctx.quiet) {
            summary.write(ctx.out(), prov);
        }
        return exit_ok;
    } catch (...) {
        out.discard_all();
        throw;
    }
}

// ============================================================================
// calibrate: fit the built-in or external sample sets
// ============================================================================

inline int cmd_calibrate(const Scenario& sc, const RunContext& ctx) {
    detail::OutputSet out(ctx.out_dir);
    try {
        std::string prov = sc.provenance_line(version_string);
        struct Job {
            std::string name;
            CalibrationModel reference;  // sample generator
            int degree;
        };
        std::vector<Job> jobs;
        if (!sc.samples_csv.empty()) {
            std::ifstream f(sc.samples_csv);
            if (!f) throw config_error("cannot open samples file '" + sc.samples_csv + "'");
            std::vector<CalibrationSample> samples = read_samples_csv(f);
            FitReport rep = fit_polynomial(samples, sc.fit_degree);
            std::ofstream mf = out.open("fit_custom.model");
            save_model(rep.model, mf, prov);
            std::ofstream rf = out.open("fit_custom_residuals.txt");
            rf << prov << '\n';
            rf << "rms = " << detail::fmt(rep.residual_rms) << '\n';
            rf << "max = " << detail::fmt(rep.residual_max) << '\n';
            if (!ctx.quiet)
                ctx.out() << "fit_custom: degree " << rep.model.degree()
                          << ", rms residual " << detail::fmt(rep.residual_rms) << "\n";
        }
        auto want = [&](const char* n) {
            return sc.calibration_builtin == "all" || sc.calibration_builtin == n;
        };
        if (sc.calibration_builtin != "none") {
            if (want("voltage_cubic"))
                jobs.push_back({"voltage_cubic", builtin_voltage_model(), 3});
            if (want("resistance_linear"))
                jobs.push_back({"resistance_linear", builtin_resistance_model(), 1});
            if (want("parallel_quadratic"))
                jobs.push_back({"parallel_quadratic", builtin_parallel_voltage_model(), 2});
            if (jobs.empty() && sc.samples_csv.empty())
                throw config_error("calibration.builtin: unknown selection '" +
                                   sc.calibration_builtin + "'");
        }
        for (const auto& job : jobs) {
            std::vector<CalibrationSample> samples = synthesize_samples(
                job.reference, sc.sample_points, sc.noise_std_c, sc.seed);
            FitReport rep = fit_polynomial(samples, job.degree, job.reference.input_unit);
            {
                std::ofstream f = out.open("samples_" + job.name + ".csv");
                write_samples_csv(samples, f, prov + " synthetic");
            }
            {
                std::ofstream f = out.open("fit_" + job.name + ".model");
                save_model(rep.model, f, prov);
            }
            {
                std::ofstream f = out.open("fit_" + job.name + "_residuals.txt");
                f << prov << '\n';
                f << "rms = " << detail::fmt(rep.residual_rms) << '\n';
                f << "max = " << detail::fmt(rep.residual_max) << '\n';
            }
            if (!ctx.quiet) {
                ctx.out() << "fit_" << job.name << ": coefficients";
                for (double c : rep.model.coefficients)
                    ctx.out() << ' ' << detail::fmt(c);
                ctx.out() << "\n";
            }
        }
        return exit_ok;
    } catch (...) {
        out.discard_all();
        throw;
    }
}

// ============================================================================
// oven: compensated vs uncompensated ambient sweeps
// ============================================================================

inline int cmd_oven(const Scenario& sc, const RunContext& ctx) {
    detail::OutputSet out(ctx.out_dir);
    try {
        std::string prov = sc.provenance_line(version_string);
        CompensationReport uncomp = run_sweep(sc.resonator, nullptr, sc.usweep_lo_c,
                                              sc.usweep_hi_c, sc.sweep_steps);
        CompensationReport comp = run_sweep(sc.resonator, &sc.oven, sc.sweep_lo_c,
                                            sc.sweep_hi_c, sc.sweep_steps);
        comp.reduction_factor = reduction_factor(uncomp, comp);
        {
            std::ofstream f = out.open("uncompensated.csv");
            write_report_csv(uncomp, f, prov);
        }
        {
            std::ofstream f = out.open("compensated.csv");
            write_report_csv(comp, f, prov);
        }
        {
            std::ofstream f = out.open("summary.txt");
            f << prov << '\n';
            f << "uncompensated_tcf_ppm_per_C = "
              << detail::fmt(uncomp.effective_tcf_ppm_per_c) << '\n';
            f << "compensated_tcf_ppm_per_C = "
              << detail::fmt(comp.effective_tcf_ppm_per_c) << '\n';
            f << "reduction_factor = " << detail::fmt(*comp.reduction_factor) << '\n';
            f << "oven_mode = " << comp.mode_note << '\n';
        }
        if (!ctx.quiet) {
            ctx.out() << "uncompensated TCF: "
                      << detail::fmt(uncomp.effective_tcf_ppm_per_c) << " ppm/C\n";
            ctx.out() << "compensated TCF:   "
                      << detail::fmt(comp.effective_tcf_ppm_per_c) << " ppm/C ("
                      << comp.mode_note << ")\n";
            ctx.out() << "reduction factor:  " << detail::fmt(*comp.reduction_factor)
                      << "\n";
        }
        return exit_ok;
    } catch (...) {
        out.discard_all();
        throw;
    }
}

// ============================================================================
// materials: effective property table
// ============================================================================

inline int cmd_materials(const Scenario& sc, const RunContext& ctx) {
    detail::OutputSet out(ctx.out_dir);
    try {
        std::ofstream f = out.open("materials.csv");
        f << sc.provenance_line(version_string) << '\n';
        f << "name,k_W_per_mK,c_J_per_kgK,rho_kg_per_m3,sigma_S_per_m,sheet_res_ohm_per_sq\n";
        char buf[240];
        for (const std::string& name : sc.materials.names()) {
            const Material& m = sc.materials.lookup(name);
            std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g,%.9g,%.9g,%.9g\n", name.c_str(),
                          m.k, m.c, m.rho, m.sigma.value_or(0.0), m.sheet_res.value_or(0.0));
            f << buf;
            if (!ctx.quiet) ctx.out() << buf;
        }
        return exit_ok;
    } catch (...) {
        out.discard_all();
        throw;
    }
}

/// Top-level dispatcher with exception-to-exit-code mapping.
inline int run_command(const std::string& command, const Scenario& sc,
                       const RunContext& ctx) {
    try {
        if (command == "analytic") return cmd_analytic(sc, ctx);
        if (command == "solve") return cmd_solve(sc, ctx);
        if (command == "calibrate") return cmd_calibrate(sc, ctx);
        if (command == "oven") return cmd_oven(sc, ctx);
        if (command == "materials") return cmd_materials(sc, ctx);
        throw config_error("unknown command '" + command + "'");
    } catch (const config_error& e) {
        ctx.out() << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const geometry_error& e) {
        ctx.out() << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const solver_error& e) {
        ctx.out() << "solver error: " << e.what() << "\n";
        return exit_solver_error;
    } catch (const std::exception& e) {
        ctx.out() << "error: " << e.what() << "\n";
        return exit_other_error;
    }
}

}  // namespace hotplate
