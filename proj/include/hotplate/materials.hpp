#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hotplate/error.hpp"
#include "hotplate/units.hpp"

namespace hotplate {

/// Bulk properties of one layer material, SI units throughout.
struct Material {
    std::string name;
    double k = 0.0;    // thermal conductivity, W/(m K)
    double c = 0.0;    // specific heat, J/(kg K)
    double rho = 0.0;  // mass density, kg/m^3
    std::optional<double> sigma;      // electrical conductivity, S/m (conductors only)
    std::optional<double> sheet_res;  // sheet resistance, ohm/sq, at reference thickness

    bool is_conductor() const { return sigma.has_value() && *sigma > 0.0; }

    void validate() const {
        if (name.empty()) throw std::invalid_argument("material name must not be empty");
        if (!(k > 0.0)) throw std::invalid_argument("material '" + name + "': k must be > 0");
        if (!(c > 0.0)) throw std::invalid_argument("material '" + name + "': c must be > 0");
        if (!(rho > 0.0)) throw std::invalid_argument("material '" + name + "': rho must be > 0");
        if (sigma && !(*sigma > 0.0))
            throw std::invalid_argument("material '" + name + "': sigma must be > 0 when present");
    }

    /// sheet_res * sigma * t == 1 for a conductor of thickness t.
    bool sheet_consistent(double thickness, double rel_tol = 1e-12) const {
        if (!sigma || !sheet_res) return true;
        double product = *sheet_res * *sigma * thickness;
        return std::abs(product - 1.0) <= rel_tol;
    }
};

inline double sigma_from_sheet_res(double sheet_res, double thickness) {
    if (!(sheet_res > 0.0) || !(thickness > 0.0))
        throw std::invalid_argument("sheet resistance and thickness must be > 0");
    return 1.0 / (sheet_res * thickness);
}

inline double sheet_res_from_sigma(double sigma, double thickness) {
    if (!(sigma > 0.0) || !(thickness > 0.0))
        throw std::invalid_argument("sigma and thickness must be > 0");
    return 1.0 / (sigma * thickness);
}

/// Sheet resistance implied by a measured trace resistance: R * w / L.
inline double effective_sheet_resistance(double r_measured, double length, double width) {
    if (!(r_measured > 0.0)) throw std::invalid_argument("measured resistance must be > 0");
    if (!(length > 0.0)) throw std::invalid_argument("length must be > 0");
    if (!(width > 0.0)) throw std::invalid_argument("width must be > 0");
    return r_measured * width / length;
}

/// Named material collection. Lookup is case-sensitive.
class MaterialTable {
public:
    void add(Material m) {
        m.validate();
        entries_.insert_or_assign(m.name, std::move(m));
    }

    bool has(const std::string& name) const { return entries_.count(name) != 0; }

    const Material& lookup(const std::string& name) const {
        auto it = entries_.find(name);
        if (it == entries_.end())
            throw config_error("unknown material '" + name + "'");
        return it->second;
    }

    Material& edit(const std::string& name) {
        auto it = entries_.find(name);
        if (it == entries_.end())
            throw config_error("unknown material '" + name + "'");
        return it->second;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : entries_) out.push_back(k);
        return out;
    }

    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, Material> entries_;
};

// Polysilicon sheet resistance: process-nominal value, and the effective value
// implied by the preset trace dimensions and their nominal lumped resistances
// (5.05 kohm over 4088x12 um and 4.99 kohm over 3993x12 um give 14.8-15.0).
inline constexpr double poly_sheet_res_nominal = 22.8;           // ohm/sq
inline constexpr double poly_sheet_res_table1_effective = 14.9;  // ohm/sq
inline constexpr double poly_thickness_default = 0.3 * units::um;

/// CMOS heater stack: PolySi / SiO2 / Al.
inline MaterialTable builtin_table() {
    MaterialTable t;
    Material poly{"PolySi", 20.0, 678.0, 2330.0, std::nullopt, std::nullopt};
    poly.sheet_res = poly_sheet_res_nominal;
    poly.sigma = sigma_from_sheet_res(poly_sheet_res_nominal, poly_thickness_default);
    t.add(poly);
    t.add(Material{"SiO2", 1.2, 730.0, 2270.0, std::nullopt, std::nullopt});
    t.add(Material{"Al", 190.0, 963.0, 2699.0, std::nullopt, std::nullopt});
    return t;
}

}  // namespace hotplate
