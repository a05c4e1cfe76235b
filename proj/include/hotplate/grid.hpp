#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hotplate {

struct Vec3 {
    double x = 0, y = 0, z = 0;
};

/// Structured cell-centered grid: uniform lateral spacing, per-slab z
/// thickness (one slab per stack layer by default).
struct StructuredGrid {
    int nx = 0, ny = 0, nz = 0;
    double hx = 0, hy = 0;
    std::vector<double> dz;  // slab thickness, size nz
    double x0 = 0, y0 = 0, z0 = 0;  // min corner
    std::vector<double> zc;  // cached slab center z, size nz

    void finalize() {
        zc.resize(dz.size());
        double z = z0;
        for (std::size_t k = 0; k < dz.size(); ++k) {
            zc[k] = z + 0.5 * dz[k];
            z += dz[k];
        }
    }

    std::size_t cell_count() const {
        return static_cast<std::size_t>(nx) * ny * nz;
    }

    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(k) * nx * ny +
               static_cast<std::size_t>(j) * nx + i;
    }

    void decompose(std::size_t cell, int& i, int& j, int& k) const {
        k = static_cast<int>(cell / (static_cast<std::size_t>(nx) * ny));
        std::size_t rem = cell % (static_cast<std::size_t>(nx) * ny);
        j = static_cast<int>(rem / nx);
        i = static_cast<int>(rem % nx);
    }

    bool in_bounds(int i, int j, int k) const {
        return i >= 0 && i < nx && j >= 0 && j < ny && k >= 0 && k < nz;
    }

    Vec3 cell_center(int i, int j, int k) const {
        return {x0 + (i + 0.5) * hx, y0 + (j + 0.5) * hy, zc[k]};
    }

    double cell_volume(int k) const { return hx * hy * dz[k]; }

    double x_max() const { return x0 + nx * hx; }
    double y_max() const { return y0 + ny * hy; }
    double z_max() const {
        double z = z0;
        for (double t : dz) z += t;
        return z;
    }

    bool contains_point(const Vec3& p) const {
        return p.x >= x0 && p.x <= x_max() && p.y >= y0 && p.y <= y_max() &&
               p.z >= z0 && p.z <= z_max();
    }
};

/// Cell-centered scalar values; NaN marks cells where the field is undefined.
struct ScalarField {
    StructuredGrid grid;
    std::vector<double> values;

    explicit ScalarField() = default;
    explicit ScalarField(const StructuredGrid& g, double fill = 0.0)
        : grid(g), values(g.cell_count(), fill) {}

    double& operator[](std::size_t c) { return values[c]; }
    double operator[](std::size_t c) const { return values[c]; }
    double& at(int i, int j, int k) { return values[grid.index(i, j, k)]; }
    double at(int i, int j, int k) const { return values[grid.index(i, j, k)]; }
};

/// Cell-centered vector values (one array per component).
struct VectorField {
    StructuredGrid grid;
    std::vector<double> x, y, z;

    explicit VectorField() = default;
    explicit VectorField(const StructuredGrid& g)
        : grid(g), x(g.cell_count(), 0.0), y(g.cell_count(), 0.0), z(g.cell_count(), 0.0) {}

    double magnitude(std::size_t c) const {
        return std::sqrt(x[c] * x[c] + y[c] * y[c] + z[c] * z[c]);
    }
};

/// Trilinear interpolation of cell-centered samples. Cells where `defined`
/// is false are excluded and the remaining stencil weights renormalized; if
/// the whole stencil is undefined the nearest defined cell value is used.
template <typename DefinedFn>
double interpolate(const ScalarField& f, const Vec3& p, DefinedFn defined) {
    const StructuredGrid& g = f.grid;
    if (!g.contains_point(p))
        throw std::domain_error("probe point outside grid");

    // lateral stencil
    double fx = (p.x - g.x0) / g.hx - 0.5;
    double fy = (p.y - g.y0) / g.hy - 0.5;
    int i0 = static_cast<int>(std::floor(fx));
    int j0 = static_cast<int>(std::floor(fy));
    double wx = fx - i0;
    double wy = fy - j0;
    if (i0 < 0) { i0 = 0; wx = 0.0; }
    if (j0 < 0) { j0 = 0; wy = 0.0; }
    if (i0 >= g.nx - 1) { i0 = g.nx - 1; wx = 0.0; }
    if (j0 >= g.ny - 1) { j0 = g.ny - 1; wy = 0.0; }

    // z stencil on non-uniform slab centers
    int k0 = 0;
    while (k0 + 1 < g.nz && g.zc[k0 + 1] <= p.z) ++k0;
    double wz = 0.0;
    if (k0 + 1 < g.nz && p.z > g.zc[k0])
        wz = (p.z - g.zc[k0]) / (g.zc[k0 + 1] - g.zc[k0]);
    if (p.z <= g.zc[0]) { k0 = 0; wz = 0.0; }

    double wsum = 0.0, vsum = 0.0;
    for (int dk = 0; dk < 2; ++dk) {
        int k = k0 + dk;
        if (k >= g.nz) continue;
        double wk = dk == 0 ? 1.0 - wz : wz;
        if (wk == 0.0 && dk == 1) continue;
        for (int dj = 0; dj < 2; ++dj) {
            int j = std::min(j0 + dj, g.ny - 1);
            double wj = dj == 0 ? 1.0 - wy : wy;
            for (int di = 0; di < 2; ++di) {
                int i = std::min(i0 + di, g.nx - 1);
                double wi = di == 0 ? 1.0 - wx : wx;
                double w = wi * wj * wk;
                if (w == 0.0) continue;
                std::size_t c = g.index(i, j, k);
                if (!defined(c)) continue;
                wsum += w;
                vsum += w * f[c];
            }
        }
    }
    if (wsum > 0.0) return vsum / wsum;

    // whole stencil undefined: fall back to nearest defined cell center
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_cell = 0;
    bool found = false;
    for (std::size_t c = 0; c < f.values.size(); ++c) {
        if (!defined(c)) continue;
        int i, j, k;
        g.decompose(c, i, j, k);
        Vec3 cc = g.cell_center(i, j, k);
        double d2 = (cc.x - p.x) * (cc.x - p.x) + (cc.y - p.y) * (cc.y - p.y) +
                    (cc.z - p.z) * (cc.z - p.z);
        if (d2 < best) {
            best = d2;
            best_cell = c;
            found = true;
        }
    }
    if (!found) throw std::domain_error("field has no defined cells");
    return f[best_cell];
}

}  // namespace hotplate
