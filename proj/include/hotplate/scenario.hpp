#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hotplate/compensation.hpp"
#include "hotplate/device.hpp"
#include "hotplate/error.hpp"
#include "hotplate/materials.hpp"
#include "hotplate/serpentine.hpp"

namespace hotplate {

/// Fully resolved job configuration. Internal values are SI; the `resolved`
/// echo lists every effective key (defaults filled in) in canonical order.
struct Scenario {
    // geometry
    std::string geometry_preset;  // R1 | R2 | dual | bar | custom
    bool dual = false;
    SerpentineSpec spec;

    // stack / grid / boundary
    LayerStack stack;
    bool bottom_face_fixed = false;
    double bottom_temperature = 300.0;
    double h = 2.0 * units::um;
    int z_cells_per_layer = 1;
    double pad_temperature = 300.0;
    double convection = 0.0;  // W/(m^2 K), 0 = adiabatic free faces
    double convection_ambient = 300.0;

    // drive
    double drive_volts = 0.0;
    bool parallel = false;
    int drive_resistor = 1;

    // conductor sheet resistance (applied to the trace material)
    double sheet_res = poly_sheet_res_nominal;

    // solver
    double tol = 1e-12;
    int max_iters = 0;
    int threads = 1;
    std::vector<int> svg_slices{0};
    bool write_fields = true;

    // materials (builtin + overrides, trace sigma consistent with sheet_res)
    MaterialTable materials;

    // calibration
    std::string calibration_builtin = "all";  // voltage_cubic | resistance_linear |
                                              // parallel_quadratic | all | none
    std::string samples_csv;                  // optional external samples
    int fit_degree = 3;
    int sample_points = 26;
    double noise_std_c = 0.0;
    std::uint64_t seed = 42;

    // compensation
    ResonatorModel resonator;
    OvenModel oven;
    double sweep_lo_c = 30.0, sweep_hi_c = 40.0;
    int sweep_steps = 11;
    double usweep_lo_c = 32.0, usweep_hi_c = 42.0;

    std::vector<std::pair<std::string, std::string>> resolved;
    std::string hash_hex;

    std::string provenance_line(const char* version) const {
        return std::string("# hotplate ") + version + " scenario=" + hash_hex;
    }
};

namespace detail {

inline std::string trim(std::string s) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
}

struct RawConfig {
    std::map<std::string, std::string> values;
    std::map<std::string, int> lines;
};

inline RawConfig read_key_values(std::istream& is) {
    RawConfig raw;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno) +
                               ": expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw config_error("line " + std::to_string(lineno) + ": empty key");
        if (raw.values.count(key))
            throw config_error("line " + std::to_string(lineno) + ": duplicate key '" +
                               key + "' (first set on line " +
                               std::to_string(raw.lines[key]) + ")");
        raw.values[key] = val;
        raw.lines[key] = lineno;
    }
    return raw;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

class ConfigReader {
public:
    explicit ConfigReader(RawConfig raw) : raw_(std::move(raw)) {}

    bool present(const std::string& key) const { return raw_.values.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& def) {
        consumed_.insert(key);
        auto it = raw_.values.find(key);
        std::string v = it == raw_.values.end() ? def : it->second;
        echo_[key] = v;
        return v;
    }

    std::string require_string(const std::string& key) {
        consumed_.insert(key);
        auto it = raw_.values.find(key);
        if (it == raw_.values.end()) {
            missing_.push_back(key);
            return "";
        }
        echo_[key] = it->second;
        return it->second;
    }

    double get_double(const std::string& key, double def) {
        consumed_.insert(key);
        auto it = raw_.values.find(key);
        if (it == raw_.values.end()) {
            echo_[key] = format_double(def);
            return def;
        }
        echo_[key] = it->second;
        return parse_double(key, it->second);
    }

    double require_double(const std::string& key) {
        consumed_.insert(key);
        auto it = raw_.values.find(key);
        if (it == raw_.values.end()) {
            missing_.push_back(key);
            return 0.0;
        }
        echo_[key] = it->second;
        return parse_double(key, it->second);
    }

    int get_int(const std::string& key, int def) {
        consumed_.insert(key);
        auto it = raw_.values.find(key);
        if (it == raw_.values.end()) {
            echo_[key] = std::to_string(def);
            return def;
        }
        echo_[key] = it->second;
        try {
            std::size_t pos = 0;
            int v = std::stoi(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            fail_line(key, "expected an integer, got '" + it->second + "'");
        }
    }

    bool get_bool(const std::string& key, bool def) {
        consumed_.insert(key);
        auto it = raw_.values.find(key);
        if (it == raw_.values.end()) {
            echo_[key] = def ? "true" : "false";
            return def;
        }
        echo_[key] = it->second;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        fail_line(key, "expected true/false, got '" + it->second + "'");
    }

    std::vector<std::string> keys_with_prefix(const std::string& prefix) const {
        std::vector<std::string> out;
        for (const auto& [k, v] : raw_.values)
            if (k.rfind(prefix, 0) == 0) out.push_back(k);
        return out;
    }

    /// Throws for missing required keys (all listed at once), then for any
    /// key that nothing consumed.
    void finish() const {
        if (!missing_.empty()) {
            std::string msg = "missing required key(s):";
            for (const auto& k : missing_) msg += " " + k;
            throw config_error(msg);
        }
        for (const auto& [k, v] : raw_.values)
            if (!consumed_.count(k))
                throw config_error("line " + std::to_string(raw_.lines.at(k)) +
                                   ": unknown key '" + k + "'");
    }

    [[noreturn]] void fail_line(const std::string& key, const std::string& what) const {
        int line = raw_.lines.count(key) ? raw_.lines.at(key) : 0;
        throw config_error("line " + std::to_string(line) + ": key '" + key + "': " + what);
    }

    double parse_double(const std::string& key, const std::string& s) const {
        try {
            std::size_t pos = 0;
            double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            fail_line(key, "expected a number, got '" + s + "'");
        }
    }

    static std::string format_double(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return buf;
    }

    const std::map<std::string, std::string>& echo() const { return echo_; }
    void add_echo(const std::string& key, const std::string& value) { echo_[key] = value; }
    void mark_consumed(const std::string& key) { consumed_.insert(key); }

private:
    RawConfig raw_;
    std::map<std::string, std::string> echo_;
    std::set<std::string> consumed_;
    std::vector<std::string> missing_;
};

inline LayerStack parse_stack_layers(const std::string& text) {
    LayerStack stack;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw config_error("stack.layers: expected 'Material:thickness_um', got '" +
                               item + "'");
        std::string mat = trim(item.substr(0, colon));
        double th = 0.0;
        try {
            th = std::stod(item.substr(colon + 1));
        } catch (const std::exception&) {
            throw config_error("stack.layers: bad thickness in '" + item + "'");
        }
        stack.layers.push_back({mat, units::from_um(th)});
    }
    if (stack.layers.empty()) throw config_error("stack.layers: empty list");
    return stack;
}

/// material.<Name>.<prop> overrides; creates new entries when k/c/rho are
/// all given, patches builtin entries otherwise.
inline void apply_material_overrides(ConfigReader& cfg, MaterialTable& table) {
    std::map<std::string, std::map<std::string, double>> by_name;
    for (const std::string& key : cfg.keys_with_prefix("material.")) {
        std::string rest = key.substr(9);
        auto dot = rest.find('.');
        if (dot == std::string::npos)
            cfg.fail_line(key, "expected material.<Name>.<property>");
        std::string name = rest.substr(0, dot);
        std::string prop = rest.substr(dot + 1);
        static const std::set<std::string> known{"k_W_per_mK", "c_J_per_kgK",
                                                 "rho_kg_per_m3", "sheet_res_ohm_per_sq",
                                                 "thickness_um"};
        if (!known.count(prop))
            cfg.fail_line(key, "unknown material property '" + prop + "'");
        by_name[name][prop] = cfg.get_double(key, 0.0);
        cfg.mark_consumed(key);
    }
    for (const auto& [name, props] : by_name) {
        Material m;
        if (table.has(name)) {
            m = table.lookup(name);
        } else {
            if (!props.count("k_W_per_mK") || !props.count("c_J_per_kgK") ||
                !props.count("rho_kg_per_m3"))
                throw config_error("material." + name +
                                   ": new materials need k_W_per_mK, c_J_per_kgK "
                                   "and rho_kg_per_m3");
            m.name = name;
        }
        if (auto it = props.find("k_W_per_mK"); it != props.end()) m.k = it->second;
        if (auto it = props.find("c_J_per_kgK"); it != props.end()) m.c = it->second;
        if (auto it = props.find("rho_kg_per_m3"); it != props.end()) m.rho = it->second;
        if (auto it = props.find("sheet_res_ohm_per_sq"); it != props.end()) {
            m.sheet_res = it->second;
            double thickness = props.count("thickness_um")
                                   ? units::from_um(props.at("thickness_um"))
                                   : poly_thickness_default;
            m.sigma = sigma_from_sheet_res(it->second, thickness);
        }
        table.add(m);
    }
}

}  // namespace detail

inline Scenario parse_scenario_stream(std::istream& is) {
    detail::ConfigReader cfg(detail::read_key_values(is));
    Scenario sc;

    // required
    std::string preset = cfg.require_string("geometry.preset");
    sc.drive_volts = cfg.require_double("drive.volts");

    // geometry
    bool custom = preset == "custom";
    const char* dim_keys[] = {"geometry.leg_length_um", "geometry.leg_count",
                              "geometry.trace_width_um", "geometry.pitch_um",
                              "geometry.trace_thickness_um", "geometry.pad_size_um"};
    if (custom) {
        sc.spec.leg_length = units::from_um(cfg.require_double("geometry.leg_length_um"));
        sc.spec.leg_count = cfg.get_int("geometry.leg_count", 1);
        sc.spec.trace_width = units::from_um(cfg.require_double("geometry.trace_width_um"));
        sc.spec.pitch = units::from_um(cfg.get_double("geometry.pitch_um", 24.0));
        sc.spec.trace_thickness =
            units::from_um(cfg.get_double("geometry.trace_thickness_um", 0.3));
        sc.spec.pad_size = units::from_um(cfg.get_double("geometry.pad_size_um", 12.0));
    } else {
        for (const char* k : dim_keys)
            if (cfg.present(k))
                cfg.fail_line(k, "only valid with geometry.preset = custom");
    }
    sc.dual = cfg.get_bool("geometry.dual", preset == "dual");

    // stack
    std::string stack_preset_name = cfg.get_string("stack.preset", "poly_only");
    std::string stack_layers = cfg.get_string("stack.layers", "");
    sc.bottom_face_fixed = cfg.get_bool("stack.bottom_face_fixed", false);
    sc.bottom_temperature = cfg.get_double("stack.bottom_temperature_K", 300.0);

    // grid / boundary
    sc.h = units::from_um(cfg.get_double("grid.h_um", 2.0));
    sc.z_cells_per_layer = cfg.get_int("grid.z_cells_per_layer", 1);
    sc.pad_temperature = cfg.get_double("bc.pad_temperature_K", 300.0);
    sc.convection = cfg.get_double("bc.convection_W_per_m2K", 0.0);
    sc.convection_ambient = cfg.get_double("bc.convection_ambient_K", 300.0);

    // drive
    std::string drive_mode = cfg.get_string("drive.mode", "single");
    sc.drive_resistor = cfg.get_int("drive.resistor", 1);

    // sheet resistance
    std::string sheet_preset = cfg.get_string("sheet.preset", "nominal");
    double sheet_default = sheet_preset == "table1_effective"
                               ? poly_sheet_res_table1_effective
                               : poly_sheet_res_nominal;
    sc.sheet_res = cfg.get_double("sheet.res_ohm_per_sq", sheet_default);

    // solver
    sc.tol = cfg.get_double("solve.tol", 1e-12);
    sc.max_iters = cfg.get_int("solve.max_iters", 0);
    sc.threads = cfg.get_int("threads", 1);
    sc.write_fields = cfg.get_bool("solve.write_fields", true);
    std::string slices = cfg.get_string("solve.svg_slices", "0");

    // calibration
    sc.calibration_builtin = cfg.get_string("calibration.builtin", "all");
    sc.samples_csv = cfg.get_string("calibration.samples_csv", "");
    sc.fit_degree = cfg.get_int("calibration.degree", 3);
    sc.sample_points = cfg.get_int("calibration.points", 26);
    sc.noise_std_c = cfg.get_double("calibration.noise_std_C", 0.0);
    sc.seed = static_cast<std::uint64_t>(cfg.get_int("calibration.seed", 42));

    // resonator / oven / sweeps
    sc.resonator.f0_hz = cfg.get_double("resonator.f0_hz", 1e9);
    sc.resonator.t0_c = cfg.get_double("resonator.t0_C", 30.0);
    sc.resonator.tcf_ppm_per_c = cfg.get_double("resonator.tcf_ppm_per_C", -97.2);
    std::string oven_mode = cfg.get_string("oven.mode", "kappa");
    sc.oven.setpoint_c = cfg.get_double("oven.setpoint_C", 56.0);
    sc.oven.kappa = cfg.get_double("oven.kappa", 23.19 / 97.2);
    sc.oven.t_amb_ref_c = cfg.get_double("oven.t_amb_ref_C", 30.0);
    sc.oven.v_applied = cfg.get_double("oven.v_applied", 23.0);
    sc.oven.v_max = cfg.get_double("oven.v_max", 30.0);
    sc.oven.r_th_k_per_w = cfg.get_double("oven.r_th_K_per_W", 187.86);
    sc.oven.heater.r0_ohm = cfg.get_double("oven.heater_r0_ohm", 3725.0);
    sc.oven.heater.alpha_per_c = cfg.get_double("oven.heater_alpha_per_C", 1e-3);
    sc.oven.heater.t0_c = cfg.get_double("oven.heater_t0_C", 30.0);
    sc.sweep_lo_c = cfg.get_double("sweep.start_C", 30.0);
    sc.sweep_hi_c = cfg.get_double("sweep.end_C", 40.0);
    sc.sweep_steps = cfg.get_int("sweep.steps", 11);
    sc.usweep_lo_c = cfg.get_double("sweep.uncompensated_start_C", 32.0);
    sc.usweep_hi_c = cfg.get_double("sweep.uncompensated_end_C", 42.0);

    // materials
    sc.materials = builtin_table();
    detail::apply_material_overrides(cfg, sc.materials);

    cfg.finish();  // missing-required first, then unknown keys

    // ---- interpretation ------------------------------------------------
    sc.geometry_preset = preset;
    if (!custom) sc.spec = serpentine_preset(preset);

    if (!stack_layers.empty())
        sc.stack = detail::parse_stack_layers(stack_layers);
    else
        sc.stack = stack_preset(stack_preset_name);

    if (drive_mode == "parallel")
        sc.parallel = true;
    else if (drive_mode != "single")
        throw config_error("drive.mode must be 'single' or 'parallel'");
    if (sc.parallel && !sc.dual)
        throw config_error("drive.mode = parallel requires a dual-trace geometry");
    if (sc.drive_resistor != 1 && sc.drive_resistor != 2)
        throw config_error("drive.resistor must be 1 or 2");

    if (oven_mode == "fixed_voltage") sc.oven.mode = OvenMode::fixed_voltage;
    else if (oven_mode == "closed_loop") sc.oven.mode = OvenMode::closed_loop;
    else if (oven_mode == "kappa") sc.oven.mode = OvenMode::kappa_override;
    else throw config_error("oven.mode must be fixed_voltage, closed_loop or kappa");

    {
        std::istringstream ss(slices);
        std::string item;
        sc.svg_slices.clear();
        while (std::getline(ss, item, ',')) {
            item = detail::trim(item);
            if (item.empty()) continue;
            try {
                sc.svg_slices.push_back(std::stoi(item));
            } catch (const std::exception&) {
                throw config_error("solve.svg_slices: bad slice index '" + item + "'");
            }
        }
    }

    if (!(sc.h > 0)) throw config_error("grid.h_um must be > 0");
    if (sc.threads < 1) throw config_error("threads must be >= 1");
    if (sc.sweep_steps < 2) throw config_error("sweep.steps must be >= 2");

    // adjust the stack's conductor material to the configured sheet resistance
    for (const auto& layer : sc.stack.layers) {
        if (!sc.materials.has(layer.material)) continue;
        Material& m = sc.materials.edit(layer.material);
        if (m.is_conductor() || layer.material == "PolySi") {
            m.sheet_res = sc.sheet_res;
            m.sigma = sigma_from_sheet_res(sc.sheet_res, sc.spec.trace_thickness);
            break;
        }
    }

    // canonical echo + scenario hash
    std::string canonical;
    for (const auto& [k, v] : cfg.echo()) {
        sc.resolved.emplace_back(k, v);
        canonical += k;
        canonical += '=';
        canonical += v;
        canonical += '\n';
    }
    char hex[24];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a64(canonical)));
    sc.hash_hex = hex;
    return sc;
}

inline Scenario parse_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot open scenario file '" + path + "'");
    return parse_scenario_stream(f);
}

}  // namespace hotplate
