#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hotplate/fvm.hpp"

namespace hotplate {

struct SolveOptions {
    double tol = 1e-12;  // well inside the 1e-9 contract; keeps discrete conservation tight
    int max_iters = 0;  // 0 = default 50*sqrt(n)
    int threads = 1;
};

/// Steady-state electrical conduction result on the voxel grid.
struct PotentialSolution {
    ScalarField potential;        // V; NaN outside the solved conductor
    VectorField current_density;  // A/m^2, face-averaged reconstruction
    ScalarField heat_density;     // W/m^3, conservative face-split
    std::map<std::string, double> pad_currents;   // A, net current into device
    std::map<std::string, double> applied_volts;  // the driven electrodes
    double total_power = 0.0;          // W, sum of pad V*I
    double energy_residual_rel = 0.0;  // |sum Q dV - total_power| / total_power
    double max_divergence_rel = 0.0;   // worst interior net current / mean face current
    int cg_iterations = 0;
};

/// Solve div(sigma * grad V) = 0 with pad faces at prescribed voltages.
/// Conductor components without a driven pad stay at V = 0 carrying no
/// current. Current density J = -sigma grad V per cell; Joule heat per cell
/// by conservative splitting of face dissipation.
inline PotentialSolution solve_potential(const DeviceModel& dev,
                                         const std::map<std::string, double>& pad_voltages,
                                         const SolveOptions& opt = {}) {
    if (pad_voltages.size() < 2)
        throw std::invalid_argument("solve_potential: need at least two driven electrodes");

    std::vector<fvm::DirichletSet> sets;
    for (const auto& [name, volts] : pad_voltages) {
        const Electrode& e = dev.electrode(name);
        sets.push_back(fvm::DirichletSet{name, volts, &e.faces});
    }

    auto sigma = [&dev](std::size_t c) { return dev.sigma(c); };
    std::vector<std::uint8_t> include = fvm::reachable_from(dev, sigma, sets);
    fvm::System sys = fvm::assemble(dev, sigma, sets, include);

    // equal prescribed voltages: the exact solution is that constant and the
    // fields vanish identically
    bool all_equal = true;
    for (const auto& [name, volts] : pad_voltages)
        all_equal = all_equal && volts == pad_voltages.begin()->second;

    std::vector<double> v;
    CgResult res{0, 0.0};
    if (all_equal) {
        v.assign(sys.cell_of.size(), pad_voltages.begin()->second);
    } else {
        CgOptions cg{opt.tol, opt.max_iters, opt.threads};
        res = pcg_jacobi(sys.A, sys.rhs, v, cg);
    }

    PotentialSolution sol;
    sol.applied_volts = pad_voltages;
    sol.cg_iterations = res.iterations;
    sol.potential = ScalarField(dev.grid, std::numeric_limits<double>::quiet_NaN());
    sol.current_density = VectorField(dev.grid);
    sol.heat_density = ScalarField(dev.grid, 0.0);

    const StructuredGrid& g = dev.grid;
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        if (include[c])
            sol.potential[c] = v[sys.unknown_of[c]];
        else if (dev.is_conductor(c))
            sol.potential[c] = 0.0;  // undriven floating component
    }

    // face fluxes -> cell-centered J, conservative Joule split, divergence
    std::vector<double> flux_sum_x(g.cell_count(), 0.0), flux_sum_y(g.cell_count(), 0.0),
        flux_sum_z(g.cell_count(), 0.0);
    std::vector<double> net(g.cell_count(), 0.0);
    std::vector<double> cell_heat(g.cell_count(), 0.0);
    double face_mag_sum = 0.0;
    std::size_t face_count = 0;

    for (const auto& f : sys.faces) {
        double dv = sol.potential[f.c1] - sol.potential[f.c2];
        double cur = f.g * dv;  // current c1 -> c2 (A), +axis direction
        int k1, k2, i, j;
        g.decompose(f.c1, i, j, k1);
        g.decompose(f.c2, i, j, k2);
        double area = fvm::geom::face_area(g, std::min(k1, k2), f.axis);
        double jf = cur / area;
        (f.axis == 0 ? flux_sum_x : f.axis == 1 ? flux_sum_y : flux_sum_z)[f.c1] += jf;
        (f.axis == 0 ? flux_sum_x : f.axis == 1 ? flux_sum_y : flux_sum_z)[f.c2] += jf;
        net[f.c1] -= cur;
        net[f.c2] += cur;
        double diss = f.g * dv * dv;
        cell_heat[f.c1] += 0.5 * diss;
        cell_heat[f.c2] += 0.5 * diss;
        face_mag_sum += std::abs(cur);
        ++face_count;
    }

    std::set<std::size_t> boundary_cells;
    for (const auto& bf : sys.boundary) {
        double dv = sol.potential[bf.cell] - bf.value;
        double cur_out = bf.g * dv;  // current leaving through the pad face
        int i, j, k;
        g.decompose(bf.cell, i, j, k);
        int axis = bf.dir / 2;
        double area = fvm::geom::face_area(g, k, axis);
        double jf = cur_out / area;
        double sign = (bf.dir % 2 == 0) ? -1.0 : 1.0;  // outward on -side points -axis
        // face current expressed along +axis, counted like an interior face
        (axis == 0 ? flux_sum_x : axis == 1 ? flux_sum_y : flux_sum_z)[bf.cell] += sign * jf;
        net[bf.cell] -= cur_out;
        cell_heat[bf.cell] += bf.g * dv * dv;
        boundary_cells.insert(bf.cell);
        face_mag_sum += std::abs(cur_out);
        ++face_count;
    }
    // pad currents: net current INTO the device through each driven electrode
    for (auto& [name, volts] : sol.applied_volts) sol.pad_currents[name] = 0.0;
    for (const auto& bf : sys.boundary) {
        double cur_in = bf.g * (bf.value - sol.potential[bf.cell]);
        sol.pad_currents[sets[bf.set].name] += cur_in;
    }

    double total_q = 0.0;
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        if (!include[c]) continue;
        int i, j, k;
        g.decompose(c, i, j, k);
        double vol = g.cell_volume(k);
        sol.current_density.x[c] = 0.5 * flux_sum_x[c];
        sol.current_density.y[c] = 0.5 * flux_sum_y[c];
        sol.current_density.z[c] = 0.5 * flux_sum_z[c];
        sol.heat_density[c] = cell_heat[c] / vol;
        total_q += cell_heat[c];
    }

    for (const auto& [name, volts] : pad_voltages)
        sol.total_power += volts * sol.pad_currents[name];

    double denom = std::abs(sol.total_power);
    sol.energy_residual_rel = denom > 0 ? std::abs(total_q - sol.total_power) / denom : 0.0;

    double mean_face = face_count ? face_mag_sum / face_count : 0.0;
    if (mean_face > 0.0) {
        double worst = 0.0;
        for (std::size_t c = 0; c < g.cell_count(); ++c) {
            if (!include[c] || boundary_cells.count(c)) continue;
            worst = std::max(worst, std::abs(net[c]));
        }
        sol.max_divergence_rel = worst / mean_face;
    }
    return sol;
}

/// Applied voltage difference over net pad current. Requires the drive to
/// have exactly two distinct voltage levels.
inline double lumped_resistance(const PotentialSolution& sol) {
    std::map<double, double> current_by_level;  // volts -> summed pad current
    for (const auto& [name, volts] : sol.applied_volts)
        current_by_level[volts] += sol.pad_currents.at(name);
    if (current_by_level.size() != 2)
        throw std::invalid_argument("lumped_resistance: drive must have exactly "
                                    "two distinct voltage levels");
    auto lo = current_by_level.begin();
    auto hi = std::prev(current_by_level.end());
    double dv = hi->first - lo->first;
    double i_in = hi->second;  // net current entering at the high side
    if (std::abs(i_in) <= 0.0)
        throw solver_error("lumped_resistance: zero pad current");
    return dv / i_in;
}

struct CurrentStats {
    double at_probe = 0.0;  // |J| at the conductor cell nearest the probe
    double max = 0.0;       // max |J| over conductor cells
    Vec3 max_location;
};

inline CurrentStats current_density_stats(const DeviceModel& dev,
                                          const PotentialSolution& sol,
                                          const Vec3& probe) {
    const StructuredGrid& g = dev.grid;
    if (!g.contains_point(probe))
        throw std::domain_error("current_density_stats: probe outside grid");
    CurrentStats st;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        if (!dev.is_conductor(c)) continue;
        double mag = sol.current_density.magnitude(c);
        int i, j, k;
        g.decompose(c, i, j, k);
        Vec3 cc = g.cell_center(i, j, k);
        if (mag > st.max) {
            st.max = mag;
            st.max_location = cc;
        }
        double d2 = (cc.x - probe.x) * (cc.x - probe.x) +
                    (cc.y - probe.y) * (cc.y - probe.y) +
                    (cc.z - probe.z) * (cc.z - probe.z);
        if (d2 < best) {
            best = d2;
            st.at_probe = mag;
        }
    }
    return st;
}

}  // namespace hotplate
