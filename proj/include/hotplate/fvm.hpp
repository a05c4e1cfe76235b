#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hotplate/cg.hpp"
#include "hotplate/device.hpp"

namespace hotplate {
namespace fvm {

constexpr std::size_t kExcluded = std::numeric_limits<std::size_t>::max();

struct DirichletSet {
    std::string name;
    double value = 0.0;
    const std::vector<Face>* faces = nullptr;
    double film = 0.0;  // > 0: Robin film coefficient (W/m^2K) in series with
                        // the half-cell conduction; 0: pure Dirichlet face
};

struct InteriorFace {
    std::size_t c1, c2;   // cell pair, c1 < c2 in scan order
    double g;             // face conductance (W/K or S)
    std::uint8_t axis;    // 0:x 1:y 2:z
};

struct BoundaryFace {
    std::size_t cell;
    int set;              // index into the DirichletSet span
    double g;             // half-cell conductance to the prescribed value
    double value;
    std::uint8_t dir;     // 0..5
};

/// Assembled 7-point diffusion system over the cells where coef > 0.
struct System {
    std::vector<std::size_t> unknown_of;  // per cell; kExcluded outside
    std::vector<std::size_t> cell_of;     // per unknown
    Csr A;
    std::vector<double> rhs;
    std::vector<InteriorFace> faces;
    std::vector<BoundaryFace> boundary;
};

namespace geom {

inline double face_area(const StructuredGrid& g, int k, int axis) {
    switch (axis) {
        case 0: return g.hy * g.dz[k];
        case 1: return g.hx * g.dz[k];
        default: return g.hx * g.hy;
    }
}

inline double half_distance(const StructuredGrid& g, int k, int axis) {
    switch (axis) {
        case 0: return 0.5 * g.hx;
        case 1: return 0.5 * g.hy;
        default: return 0.5 * g.dz[k];
    }
}

/// Series (harmonic-mean) conductance between two adjacent cell centers.
inline double face_conductance(const StructuredGrid& g, int k1, int k2, int axis,
                               double coef1, double coef2) {
    if (!(coef1 > 0.0) || !(coef2 > 0.0)) return 0.0;
    double r = half_distance(g, k1, axis) / coef1 + half_distance(g, k2, axis) / coef2;
    return face_area(g, std::min(k1, k2), axis) / r;  // areas match across z faces
}

}  // namespace geom

/// Cells with coef > 0 reachable from the given Dirichlet faces through
/// positive-coef cells.
inline std::vector<std::uint8_t> reachable_from(
    const DeviceModel& dev, const std::function<double(std::size_t)>& coef,
    std::span<const DirichletSet> sets) {
    const StructuredGrid& g = dev.grid;
    std::vector<std::uint8_t> seen(g.cell_count(), 0);
    std::deque<std::size_t> queue;
    for (const auto& s : sets)
        for (const auto& f : *s.faces)
            if (coef(f.cell) > 0.0 && !seen[f.cell]) {
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
            if (seen[n] || !(coef(n) > 0.0)) continue;
            seen[n] = 1;
            queue.push_back(n);
        }
    }
    return seen;
}

/// Assemble div(coef * grad(u)) = -source with Dirichlet faces applied as
/// half-cell fluxes; all other exterior faces are natural (zero flux).
inline System assemble(const DeviceModel& dev,
                       const std::function<double(std::size_t)>& coef,
                       std::span<const DirichletSet> sets,
                       const std::vector<std::uint8_t>& include) {
    const StructuredGrid& g = dev.grid;
    System sys;
    sys.unknown_of.assign(g.cell_count(), kExcluded);
    for (std::size_t c = 0; c < g.cell_count(); ++c)
        if (include[c]) {
            sys.unknown_of[c] = sys.cell_of.size();
            sys.cell_of.push_back(c);
        }

    const std::size_t n = sys.cell_of.size();
    std::vector<double> diag(n, 0.0);
    sys.rhs.assign(n, 0.0);

    // interior faces (+x, +y, +z neighbor of each included cell)
    const int di[3] = {1, 0, 0};
    const int dj[3] = {0, 1, 0};
    const int dk[3] = {0, 0, 1};
    for (std::size_t u = 0; u < n; ++u) {
        std::size_t c = sys.cell_of[u];
        int i, j, k;
        g.decompose(c, i, j, k);
        for (int axis = 0; axis < 3; ++axis) {
            int ni = i + di[axis], nj = j + dj[axis], nk = k + dk[axis];
            if (!g.in_bounds(ni, nj, nk)) continue;
            std::size_t nc = g.index(ni, nj, nk);
            if (!include[nc]) continue;
            double gf = geom::face_conductance(g, k, nk, axis, coef(c), coef(nc));
            if (!(gf > 0.0)) continue;
            sys.faces.push_back(InteriorFace{c, nc, gf, static_cast<std::uint8_t>(axis)});
        }
    }

    // Dirichlet / Robin faces
    for (std::size_t si = 0; si < sets.size(); ++si) {
        for (const auto& f : *sets[si].faces) {
            if (!include[f.cell]) continue;
            int i, j, k;
            g.decompose(f.cell, i, j, k);
            int axis = f.dir / 2;
            double cc = coef(f.cell);
            if (!(cc > 0.0)) continue;
            double area = geom::face_area(g, k, axis);
            double resist = geom::half_distance(g, k, axis) / cc;
            if (sets[si].film > 0.0) resist += 1.0 / sets[si].film;
            sys.boundary.push_back(BoundaryFace{f.cell, static_cast<int>(si),
                                                area / resist, sets[si].value, f.dir});
        }
    }

    // CSR assembly: diagonal entry first, then off-diagonals in face order
    std::vector<std::vector<std::pair<std::size_t, double>>> off(n);
    for (const auto& f : sys.faces) {
        std::size_t u1 = sys.unknown_of[f.c1], u2 = sys.unknown_of[f.c2];
        diag[u1] += f.g;
        diag[u2] += f.g;
        off[u1].emplace_back(u2, -f.g);
        off[u2].emplace_back(u1, -f.g);
    }
    for (const auto& bf : sys.boundary) {
        std::size_t u = sys.unknown_of[bf.cell];
        diag[u] += bf.g;
        sys.rhs[u] += bf.g * bf.value;
    }

    sys.A.rows = n;
    sys.A.row_ptr.assign(n + 1, 0);
    for (std::size_t u = 0; u < n; ++u) sys.A.row_ptr[u + 1] = sys.A.row_ptr[u] + 1 + off[u].size();
    sys.A.col.resize(sys.A.row_ptr[n]);
    sys.A.val.resize(sys.A.row_ptr[n]);
    for (std::size_t u = 0; u < n; ++u) {
        std::size_t idx = sys.A.row_ptr[u];
        sys.A.col[idx] = u;
        sys.A.val[idx] = diag[u];
        ++idx;
        for (const auto& [c, v] : off[u]) {
            sys.A.col[idx] = c;
            sys.A.val[idx] = v;
            ++idx;
        }
    }
    return sys;
}

/// Add volumetric sources (value in W per cell) to the right-hand side.
inline void add_source(System& sys, const std::function<double(std::size_t)>& cell_power) {
    for (std::size_t u = 0; u < sys.cell_of.size(); ++u)
        sys.rhs[u] += cell_power(sys.cell_of[u]);
}

}  // namespace fvm
}  // namespace hotplate
