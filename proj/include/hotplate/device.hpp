#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hotplate/error.hpp"
#include "hotplate/grid.hpp"
#include "hotplate/materials.hpp"
#include "hotplate/serpentine.hpp"

namespace hotplate {

/// Ordered layer stack, bottom to top. Thickness in metres; materials must
/// resolve against the MaterialTable handed to voxelize().
struct LayerStack {
    struct Layer {
        std::string material;
        double thickness = 0;
    };
    std::vector<Layer> layers;

    void validate(const MaterialTable& table) const {
        if (layers.empty()) throw config_error("layer stack is empty");
        for (const auto& l : layers) {
            if (!(l.thickness > 0))
                throw config_error("layer '" + l.material + "': thickness must be > 0");
            table.lookup(l.material);
        }
    }

    double total_thickness() const {
        double t = 0;
        for (const auto& l : layers) t += l.thickness;
        return t;
    }
};

inline LayerStack stack_preset(std::string_view name) {
    using units::um;
    if (name == "poly_only") return {{{"PolySi", 0.3 * um}}};
    if (name == "composite")
        return {{{"PolySi", 0.3 * um}, {"SiO2", 0.6 * um}, {"Al", 1.5 * um}}};
    throw config_error("unknown stack preset '" + std::string(name) + "'");
}

// face directions: 0:-x 1:+x 2:-y 3:+y 4:-z 5:+z
struct Face {
    std::size_t cell;
    std::uint8_t dir;
};

struct Electrode {
    std::string name;
    std::vector<Face> faces;
};

enum class BcType { fixed_temperature, adiabatic, convection };

struct ThermalBc {
    std::string name;
    BcType type = BcType::fixed_temperature;
    double value = 300.0;  // K (sink or film ambient)
    double film = 0.0;     // W/(m^2 K), convection only
    std::vector<Face> faces;
};

constexpr std::uint16_t kVoid = 0;

/// Voxelized device: per-cell material ids, electrode face sets, thermal
/// boundary face sets. Immutable once built; shareable across solves.
struct DeviceModel {
    StructuredGrid grid;
    std::vector<std::uint16_t> material;   // 0 = void, else 1 + index into mats
    std::vector<Material> mats;            // resolved, index = id - 1
    std::vector<std::int8_t> trace;        // trace index per cell, -1 = none
    std::vector<Electrode> electrodes;
    std::vector<ThermalBc> thermal_bcs;
    double ambient = 300.0;                // K

    bool is_void(std::size_t c) const { return material[c] == kVoid; }

    const Material* material_of(std::size_t c) const {
        return material[c] == kVoid ? nullptr : &mats[material[c] - 1];
    }

    double sigma(std::size_t c) const {
        const Material* m = material_of(c);
        return (m && m->sigma) ? *m->sigma : 0.0;
    }

    double conductivity(std::size_t c) const {
        const Material* m = material_of(c);
        return m ? m->k : 0.0;
    }

    bool is_conductor(std::size_t c) const { return sigma(c) > 0.0; }

    const Electrode& electrode(const std::string& name) const {
        for (const auto& e : electrodes)
            if (e.name == name) return e;
        throw config_error("unknown electrode '" + name + "'");
    }

    /// Footprint centroid at the mid-plane of the conductor layer; the
    /// default probe location for device-center statistics.
    Vec3 center_probe() const {
        double zc = grid.zc.empty() ? 0.0 : grid.zc[0];
        for (int k = 0; k < grid.nz; ++k) {
            // first slab containing conductor cells
            bool any = false;
            for (int j = 0; j < grid.ny && !any; ++j)
                for (int i = 0; i < grid.nx && !any; ++i)
                    any = is_conductor(grid.index(i, j, k));
            if (any) { zc = grid.zc[k]; break; }
        }
        return {0.5 * (grid.x0 + grid.x_max()), 0.5 * (grid.y0 + grid.y_max()), zc};
    }
};

struct VoxelizeOptions {
    double h = 2.0 * units::um;      // lateral cell size
    int z_cells_per_layer = 1;
    double pad_temperature = 300.0;  // K; pads double as thermal sinks
    bool bottom_face_fixed = false;  // optional extra sink under the stack
    double bottom_temperature = 300.0;
    double convection = 0.0;         // W/(m^2 K) on free exterior faces, 0 = off
    double convection_ambient = 300.0;
};

namespace detail {

inline void gather_pad_faces(const DeviceModel& dev, const Rect& region, int dir,
                             std::vector<Face>& out) {
    const StructuredGrid& g = dev.grid;
    const double eps = 1e-12;
    const int di[4] = {-1, 1, 0, 0};
    const int dj[4] = {0, 0, -1, 1};
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                std::size_t c = g.index(i, j, k);
                if (!dev.is_conductor(c)) continue;
                Vec3 cc = g.cell_center(i, j, k);
                if (cc.x < region.x0 - eps || cc.x > region.x1 + eps ||
                    cc.y < region.y0 - eps || cc.y > region.y1 + eps)
                    continue;
                int ni = i + di[dir], nj = j + dj[dir];
                bool exterior = !g.in_bounds(ni, nj, k) ||
                                !dev.is_conductor(g.index(ni, nj, k));
                if (exterior) out.push_back(Face{c, static_cast<std::uint8_t>(dir)});
            }
}

}  // namespace detail

/// Rasterize heater layouts and the layer stack onto a structured grid.
/// Traces land in the (single) conductor layer; every other layer fills the
/// full footprint as a continuous plate. Default boundary conditions: pads
/// held at pad_temperature, every other exterior face adiabatic.
inline DeviceModel voxelize(std::span<const HeaterLayout> layouts,
                            const LayerStack& stack, const MaterialTable& table,
                            const VoxelizeOptions& opt) {
    if (layouts.empty()) throw geometry_error("voxelize: no layouts");
    stack.validate(table);

    double w_min = layouts[0].width;
    for (const auto& l : layouts) w_min = std::min(w_min, l.width);
    if (!(opt.h > 0) || opt.h > w_min / 3.0 + 1e-15)
        throw geometry_error("grid resolution too coarse: need h <= trace_width/3");
    if (opt.z_cells_per_layer < 1)
        throw geometry_error("z_cells_per_layer must be >= 1");

    // conductor layer = unique layer whose material carries sigma
    int trace_layer = -1;
    for (std::size_t li = 0; li < stack.layers.size(); ++li) {
        if (table.lookup(stack.layers[li].material).is_conductor()) {
            if (trace_layer >= 0)
                throw config_error("stack has more than one conductor layer");
            trace_layer = static_cast<int>(li);
        }
    }
    if (trace_layer < 0)
        throw config_error("stack has no conductor layer for the traces");

    Rect bbox = layouts[0].bounding_box();
    for (const auto& l : layouts) {
        Rect b = l.bounding_box();
        bbox.x0 = std::min(bbox.x0, b.x0);
        bbox.y0 = std::min(bbox.y0, b.y0);
        bbox.x1 = std::max(bbox.x1, b.x1);
        bbox.y1 = std::max(bbox.y1, b.y1);
    }

    DeviceModel dev;
    dev.ambient = opt.pad_temperature;
    StructuredGrid& g = dev.grid;
    g.hx = g.hy = opt.h;
    g.x0 = bbox.x0;
    g.y0 = bbox.y0;
    g.z0 = 0.0;
    g.nx = static_cast<int>(std::ceil(bbox.width() / opt.h - 1e-9));
    g.ny = static_cast<int>(std::ceil(bbox.height() / opt.h - 1e-9));
    g.nz = static_cast<int>(stack.layers.size()) * opt.z_cells_per_layer;
    g.dz.clear();
    for (const auto& layer : stack.layers)
        for (int s = 0; s < opt.z_cells_per_layer; ++s)
            g.dz.push_back(layer.thickness / opt.z_cells_per_layer);
    g.finalize();

    // material ids in stack order, deduplicated by name
    std::map<std::string, std::uint16_t> id_of;
    std::vector<std::uint16_t> layer_id(stack.layers.size());
    for (std::size_t li = 0; li < stack.layers.size(); ++li) {
        const std::string& mn = stack.layers[li].material;
        auto it = id_of.find(mn);
        if (it == id_of.end()) {
            dev.mats.push_back(table.lookup(mn));
            id_of.emplace(mn, static_cast<std::uint16_t>(dev.mats.size()));
            layer_id[li] = static_cast<std::uint16_t>(dev.mats.size());
        } else {
            layer_id[li] = it->second;
        }
    }

    dev.material.assign(g.cell_count(), kVoid);
    dev.trace.assign(g.cell_count(), -1);
    for (int k = 0; k < g.nz; ++k) {
        int layer = k / opt.z_cells_per_layer;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                std::size_t c = g.index(i, j, k);
                if (layer != trace_layer) {
                    dev.material[c] = layer_id[layer];
                    continue;
                }
                Vec3 cc = g.cell_center(i, j, k);
                for (std::size_t t = 0; t < layouts.size(); ++t) {
                    if (layouts[t].covers(cc.x, cc.y)) {
                        dev.material[c] = layer_id[layer];
                        dev.trace[c] = static_cast<std::int8_t>(t);
                        break;
                    }
                }
            }
    }

    // one electrode (and matching thermal sink) per pad
    for (std::size_t t = 0; t < layouts.size(); ++t) {
        const char* suffix[2] = {"_a", "_b"};
        for (int pi = 0; pi < 2; ++pi) {
            Electrode e;
            e.name = layouts[t].name + suffix[pi];
            detail::gather_pad_faces(dev, layouts[t].pads[pi].region,
                                     layouts[t].pads[pi].dir, e.faces);
            if (e.faces.empty())
                throw geometry_error("pad '" + e.name +
                                     "' produced no electrode faces at this resolution");
            dev.thermal_bcs.push_back(ThermalBc{e.name, BcType::fixed_temperature,
                                                opt.pad_temperature, 0.0, e.faces});
            dev.electrodes.push_back(std::move(e));
        }
    }
    if (opt.bottom_face_fixed) {
        ThermalBc bc{"bottom", BcType::fixed_temperature, opt.bottom_temperature, 0.0, {}};
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                std::size_t c = g.index(i, j, 0);
                if (!dev.is_void(c)) bc.faces.push_back(Face{c, 4});
            }
        dev.thermal_bcs.push_back(std::move(bc));
    }
    if (opt.convection > 0.0) {
        // free exterior faces of solid cells, minus faces already claimed by a
        // fixed-temperature set
        std::set<std::pair<std::size_t, std::uint8_t>> claimed;
        for (const auto& bc : dev.thermal_bcs)
            for (const auto& f : bc.faces) claimed.emplace(f.cell, f.dir);
        ThermalBc bc{"convection", BcType::convection, opt.convection_ambient,
                     opt.convection, {}};
        const int di[6] = {-1, 1, 0, 0, 0, 0};
        const int dj[6] = {0, 0, -1, 1, 0, 0};
        const int dk[6] = {0, 0, 0, 0, -1, 1};
        for (int k = 0; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    std::size_t c = g.index(i, j, k);
                    if (dev.is_void(c)) continue;
                    for (int d = 0; d < 6; ++d) {
                        int ni = i + di[d], nj = j + dj[d], nk = k + dk[d];
                        bool exterior = !g.in_bounds(ni, nj, nk) ||
                                        dev.is_void(g.index(ni, nj, nk));
                        if (!exterior) continue;
                        if (claimed.count({c, static_cast<std::uint8_t>(d)})) continue;
                        bc.faces.push_back(Face{c, static_cast<std::uint8_t>(d)});
                    }
                }
        dev.thermal_bcs.push_back(std::move(bc));
    }

    // conductor connectivity: every conductor cell reachable from an electrode
    {
        std::vector<std::uint8_t> seen(g.cell_count(), 0);
        std::deque<std::size_t> queue;
        for (const auto& e : dev.electrodes)
            for (const auto& f : e.faces)
                if (!seen[f.cell]) {
                    seen[f.cell] = 1;
                    queue.push_back(f.cell);
                }
        const int di[6] = {-1, 1, 0, 0, 0, 0};
        const int dj[6] = {0, 0, -1, 1, 0, 0};
        const int dk[6] = {0, 0, 0, 0, -1, 1};
        while (!queue.empty()) {
            std::size_t c = queue.front();
            queue.pop_front();
            int i, j, k;
            g.decompose(c, i, j, k);
            for (int d = 0; d < 6; ++d) {
                int ni = i + di[d], nj = j + dj[d], nk = k + dk[d];
                if (!g.in_bounds(ni, nj, nk)) continue;
                std::size_t n = g.index(ni, nj, nk);
                if (!dev.is_conductor(n) || seen[n]) continue;
                if (dev.trace[n] != dev.trace[c])
                    throw geometry_error("traces merge at this resolution: gap "
                                         "between layouts is under one cell");
                seen[n] = 1;
                queue.push_back(n);
            }
        }
        for (std::size_t c = 0; c < g.cell_count(); ++c)
            if (dev.is_conductor(c) && !seen[c])
                throw geometry_error("disconnected conductor: cells not reachable "
                                     "from any electrode");
    }

    return dev;
}

/// CSV voxel dump: x_um, y_um, z_um, material.
inline void write_voxels_csv(const DeviceModel& dev, std::ostream& os,
                             const std::string& provenance_line) {
    if (!provenance_line.empty()) os << provenance_line << '\n';
    os << "x_um,y_um,z_um,material\n";
    char buf[160];
    const StructuredGrid& g = dev.grid;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                std::size_t c = g.index(i, j, k);
                if (dev.is_void(c)) continue;
                Vec3 cc = g.cell_center(i, j, k);
                std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%s\n",
                              units::to_um(cc.x), units::to_um(cc.y),
                              units::to_um(cc.z), dev.material_of(c)->name.c_str());
                os << buf;
            }
}

}  // namespace hotplate
