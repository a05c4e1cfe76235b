#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "hotplate/electro.hpp"
#include "hotplate/fvm.hpp"

namespace hotplate {

/// Steady-state heat conduction result.
struct ThermalSolution {
    ScalarField temperature;  // K; NaN on void cells
    double max_temperature = 0.0;
    Vec3 max_location;
    double min_temperature = 0.0;
    std::map<std::string, double> boundary_flux;  // W out through each fixed-T set
    double source_power = 0.0;                    // W, integral of the heat field
    double energy_residual_rel = 0.0;             // |sum flux - source| / source
    int cg_iterations = 0;
};

/// Solve div(k * grad T) = -Q with fixed-temperature face sets; every other
/// exterior face is adiabatic.
inline ThermalSolution solve_temperature(const DeviceModel& dev,
                                         const ScalarField& heat_density,
                                         const SolveOptions& opt = {}) {
    if (heat_density.values.size() != dev.grid.cell_count())
        throw std::invalid_argument("solve_temperature: heat field grid mismatch");

    std::vector<fvm::DirichletSet> sets;
    for (const auto& bc : dev.thermal_bcs)
        if (bc.type == BcType::fixed_temperature)
            sets.push_back(fvm::DirichletSet{bc.name, bc.value, &bc.faces, 0.0});
    if (sets.empty())
        throw solver_error("solve_temperature: no fixed-temperature boundary; "
                           "system would be singular");
    for (const auto& bc : dev.thermal_bcs)
        if (bc.type == BcType::convection && bc.film > 0.0)
            sets.push_back(fvm::DirichletSet{bc.name, bc.value, &bc.faces, bc.film});

    auto cond = [&dev](std::size_t c) { return dev.conductivity(c); };
    std::vector<std::uint8_t> include = fvm::reachable_from(dev, cond, sets);
    fvm::System sys = fvm::assemble(dev, cond, sets, include);

    const StructuredGrid& g = dev.grid;
    fvm::add_source(sys, [&](std::size_t c) {
        int i, j, k;
        g.decompose(c, i, j, k);
        return heat_density[c] * g.cell_volume(k);
    });

    std::vector<double> t;
    CgOptions cg{opt.tol, opt.max_iters, opt.threads};
    CgResult res = pcg_jacobi(sys.A, sys.rhs, t, cg);

    ThermalSolution sol;
    sol.cg_iterations = res.iterations;
    sol.temperature = ScalarField(g, std::numeric_limits<double>::quiet_NaN());
    sol.max_temperature = -std::numeric_limits<double>::infinity();
    sol.min_temperature = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        if (!include[c]) continue;
        double val = t[sys.unknown_of[c]];
        sol.temperature[c] = val;
        sol.min_temperature = std::min(sol.min_temperature, val);
        if (val > sol.max_temperature) {
            sol.max_temperature = val;
            int i, j, k;
            g.decompose(c, i, j, k);
            sol.max_location = g.cell_center(i, j, k);
        }
    }

    for (const auto& s : sets) sol.boundary_flux[s.name] = 0.0;
    for (const auto& bf : sys.boundary)
        sol.boundary_flux[sets[bf.set].name] +=
            bf.g * (sol.temperature[bf.cell] - bf.value);

    for (std::size_t u = 0; u < sys.cell_of.size(); ++u) {
        std::size_t c = sys.cell_of[u];
        int i, j, k;
        g.decompose(c, i, j, k);
        sol.source_power += heat_density[c] * g.cell_volume(k);
    }
    double flux_total = 0.0;
    for (const auto& [name, w] : sol.boundary_flux) flux_total += w;
    sol.energy_residual_rel = sol.source_power > 0.0
                                  ? std::abs(flux_total - sol.source_power) / sol.source_power
                                  : std::abs(flux_total);
    return sol;
}

/// Trilinear probe of the temperature field (solid cells only; nearest solid
/// value if the whole stencil is void).
inline double probe(const ThermalSolution& sol, const Vec3& point) {
    return interpolate(sol.temperature, point,
                       [&](std::size_t c) { return !std::isnan(sol.temperature[c]); });
}

struct CoupledSolution {
    PotentialSolution electrical;
    ThermalSolution thermal;
};

/// One-way chain: electrical solve, Joule heat, thermal solve.
inline CoupledSolution run_coupled(const DeviceModel& dev,
                                   const std::map<std::string, double>& pad_voltages,
                                   const SolveOptions& opt = {}) {
    CoupledSolution out;
    out.electrical = solve_potential(dev, pad_voltages, opt);
    out.thermal = solve_temperature(dev, out.electrical.heat_density, opt);
    return out;
}

}  // namespace hotplate
