#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <stdexcept>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hotplate/error.hpp"
#include "hotplate/grid.hpp"
#include "hotplate/units.hpp"

namespace hotplate {

/// Cell-centered CSV dump (x_um, y_um, z_um, value); NaN cells are skipped.
inline void write_field_csv(const ScalarField& f, const std::string& value_name,
                            std::ostream& os, const std::string& provenance_line = "") {
    if (!provenance_line.empty()) os << provenance_line << '\n';
    os << "x_um,y_um,z_um," << value_name << '\n';
    const StructuredGrid& g = f.grid;
    char buf[160];
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double v = f.at(i, j, k);
                if (std::isnan(v)) continue;
                Vec3 c = g.cell_center(i, j, k);
                std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g\n",
                              units::to_um(c.x), units::to_um(c.y), units::to_um(c.z), v);
                os << buf;
            }
}

inline void write_vector_field_csv(const VectorField& f, const std::string& name,
                                   std::ostream& os,
                                   const std::string& provenance_line = "") {
    if (!provenance_line.empty()) os << provenance_line << '\n';
    os << "x_um,y_um,z_um," << name << "_x," << name << "_y," << name << "_z,"
       << name << "_mag\n";
    const StructuredGrid& g = f.grid;
    char buf[240];
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                std::size_t c = g.index(i, j, k);
                double mag = f.magnitude(c);
                if (mag == 0.0) continue;
                Vec3 cc = g.cell_center(i, j, k);
                std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                              units::to_um(cc.x), units::to_um(cc.y), units::to_um(cc.z),
                              f.x[c], f.y[c], f.z[c], mag);
                os << buf;
            }
}

/// Rectilinear text format: header (dims, spacing, origin, slab centers),
/// then one value per line, i fastest, j, then k. NaN printed as "nan".
inline void write_rectilinear(const ScalarField& f, const std::string& field_name,
                              std::ostream& os, const std::string& provenance_line = "") {
    if (!provenance_line.empty()) os << provenance_line << '\n';
    const StructuredGrid& g = f.grid;
    char buf[120];
    os << "dims " << g.nx << ' ' << g.ny << ' ' << g.nz << '\n';
    std::snprintf(buf, sizeof buf, "spacing_um %.9g %.9g\n", units::to_um(g.hx),
                  units::to_um(g.hy));
    os << buf;
    std::snprintf(buf, sizeof buf, "origin_um %.9g %.9g %.9g\n", units::to_um(g.x0),
                  units::to_um(g.y0), units::to_um(g.z0));
    os << buf;
    os << "z_centers_um";
    for (double z : g.zc) {
        std::snprintf(buf, sizeof buf, " %.9g", units::to_um(z));
        os << buf;
    }
    os << '\n' << "field " << field_name << '\n';
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                std::snprintf(buf, sizeof buf, "%.9g\n", f.at(i, j, k));
                os << buf;
            }
}

namespace detail {

// compact five-stop ramp, dark blue -> teal -> green -> yellow (viridis-like)
inline void colormap(double t, int& r, int& gch, int& b) {
    static const double stops[5][3] = {{0.267, 0.005, 0.329},
                                       {0.229, 0.322, 0.546},
                                       {0.127, 0.566, 0.551},
                                       {0.369, 0.789, 0.383},
                                       {0.993, 0.906, 0.144}};
    if (t < 0) t = 0;
    if (t > 1) t = 1;
    double s = t * 4.0;
    int i = static_cast<int>(s);
    if (i >= 4) i = 3;
    double f = s - i;
    r = static_cast<int>(255.0 * (stops[i][0] + f * (stops[i + 1][0] - stops[i][0])));
    gch = static_cast<int>(255.0 * (stops[i][1] + f * (stops[i + 1][1] - stops[i][1])));
    b = static_cast<int>(255.0 * (stops[i][2] + f * (stops[i + 1][2] - stops[i][2])));
}

}  // namespace detail

/// SVG heatmap of one z-slice. Undefined (NaN) cells render light gray; the
/// ramp and min/max are annotated so the figure is self-describing.
inline void write_svg_heatmap(const ScalarField& f, int k_slice, const std::string& title,
                              const std::string& units_label, std::ostream& os,
                              const std::string& provenance_line = "") {
    const StructuredGrid& g = f.grid;
    if (k_slice < 0 || k_slice >= g.nz)
        throw std::domain_error("svg heatmap: slice index out of range");

    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double v = f.at(i, j, k_slice);
            if (std::isnan(v)) continue;
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    if (!(vmin <= vmax)) {
        vmin = 0;
        vmax = 0;
    }

    const int width = 800;
    const double scale = static_cast<double>(width) / g.nx;
    const int height = static_cast<int>(g.ny * scale);
    const int header_px = 40;

    char buf[300];
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    if (!provenance_line.empty()) os << "<!-- " << provenance_line << " -->\n";
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\">\n",
                  width, height + header_px);
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"4\" y=\"14\" font-family=\"monospace\" font-size=\"12\">%s "
                  "(slice k=%d)</text>\n",
                  title.c_str(), k_slice);
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"4\" y=\"30\" font-family=\"monospace\" font-size=\"12\">min=%.6g "
                  "max=%.6g %s</text>\n",
                  vmin, vmax, units_label.c_str());
    os << buf;

    double range = vmax - vmin;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double v = f.at(i, j, k_slice);
            int r = 230, gc = 230, b = 230;
            if (!std::isnan(v))
                detail::colormap(range > 0 ? (v - vmin) / range : 0.5, r, gc, b);
            double x = i * scale;
            double y = header_px + (g.ny - 1 - j) * scale;  // y up
            std::snprintf(buf, sizeof buf,
                          "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                          "fill=\"rgb(%d,%d,%d)\"/>\n",
                          x, y, scale + 0.05, scale + 0.05, r, gc, b);
            os << buf;
        }
    os << "</svg>\n";
}

// ============================================================================
// Generic CSV reading (round-trip support for the emitted files)
// ============================================================================

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    /// one column parsed as numbers
    std::vector<double> numeric(const std::string& name) const {
        std::size_t idx = columns.size();
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) idx = i;
        if (idx == columns.size())
            throw config_error("csv: no column '" + name + "'");
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& row : rows) {
            try {
                out.push_back(std::stod(row[idx]));
            } catch (const std::exception&) {
                throw config_error("csv: non-numeric cell '" + row[idx] +
                                   "' in column '" + name + "'");
            }
        }
        return out;
    }
};

/// Reads CSV with one header line; '#' lines are skipped.
inline CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string cell;
        if (t.columns.empty()) {
            while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
            continue;
        }
        std::vector<std::string> row;
        while (std::getline(ss, cell, ',')) row.push_back(cell);
        if (row.size() != t.columns.size())
            throw config_error("csv line " + std::to_string(lineno) +
                               ": column count mismatch");
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace hotplate
