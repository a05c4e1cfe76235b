#include <catch2/catch_amalgamated.hpp>

#include <deque>
#include <set>
#include <sstream>

#include "hotplate/device.hpp"
#include "test_helpers.hpp"

using namespace hotplate;
using namespace hotplate::units;
using Catch::Approx;

namespace {

double conductor_volume(const DeviceModel& dev) {
    double vol = 0;
    for (std::size_t c = 0; c < dev.grid.cell_count(); ++c) {
        if (!dev.is_conductor(c)) continue;
        int i, j, k;
        dev.grid.decompose(c, i, j, k);
        vol += dev.grid.cell_volume(k);
    }
    return vol;
}

// independent connectivity oracle: breadth-first search from one pad
std::size_t reachable_conductors(const DeviceModel& dev, const Electrode& from) {
    std::set<std::size_t> seen;
    std::deque<std::size_t> q;
    for (const auto& f : from.faces)
        if (seen.insert(f.cell).second) q.push_back(f.cell);
    const int di[6] = {-1, 1, 0, 0, 0, 0};
    const int dj[6] = {0, 0, -1, 1, 0, 0};
    const int dk[6] = {0, 0, 0, 0, -1, 1};
    while (!q.empty()) {
        std::size_t c = q.front();
        q.pop_front();
        int i, j, k;
        dev.grid.decompose(c, i, j, k);
        for (int d = 0; d < 6; ++d) {
            int ni = i + di[d], nj = j + dj[d], nk = k + dk[d];
            if (!dev.grid.in_bounds(ni, nj, nk)) continue;
            std::size_t n = dev.grid.index(ni, nj, nk);
            if (dev.is_conductor(n) && seen.insert(n).second) q.push_back(n);
        }
    }
    return seen.size();
}

}  // namespace

TEST_CASE("straight bar voxel counts", "[device]") {
    DeviceModel dev = test_helpers::bar_device(2.0);
    CHECK(dev.grid.nx == 50);
    CHECK(dev.grid.ny == 6);
    CHECK(dev.grid.nz == 1);
    int conductors = 0;
    for (std::size_t c = 0; c < dev.grid.cell_count(); ++c)
        conductors += dev.is_conductor(c);
    CHECK(conductors == 300);
    CHECK(dev.grid.dz[0] == Approx(0.3 * um));
}

TEST_CASE("serpentine connectivity from both pads", "[device]") {
    DeviceModel dev = test_helpers::serpentine_device("R2", "poly_only", 4.0);
    std::size_t total = 0;
    for (std::size_t c = 0; c < dev.grid.cell_count(); ++c)
        total += dev.is_conductor(c);
    CHECK(reachable_conductors(dev, dev.electrode("R2_a")) == total);
    CHECK(reachable_conductors(dev, dev.electrode("R2_b")) == total);
}

TEST_CASE("voxelized conductor volume approximates L*w*t", "[device]") {
    SerpentineSpec s = serpentine_preset("R2");
    double ref = s.closed_form_length() * s.trace_width * s.trace_thickness;

    DeviceModel dev2 = test_helpers::serpentine_device("R2", "poly_only", 2.0);
    double err2 = std::abs(conductor_volume(dev2) - ref) / ref;
    CHECK(err2 < 0.05);

    // refinement converges toward the exact volume (noise floor escape for
    // resolutions where the footprint happens to align with the grid)
    DeviceModel dev1 = test_helpers::serpentine_device("R2", "poly_only", 1.0);
    double err1 = std::abs(conductor_volume(dev1) - ref) / ref;
    CHECK((err1 <= err2 / 1.5 || err1 < 1e-4));
}

TEST_CASE("coarse grids are rejected", "[device]") {
    SerpentineSpec s = serpentine_preset("R2");
    std::vector<HeaterLayout> lays{build_serpentine(s, "R2")};
    VoxelizeOptions opt;
    opt.h = 5 * um;  // > trace_width / 3
    CHECK_THROWS_AS(voxelize(lays, stack_preset("poly_only"), builtin_table(), opt),
                    geometry_error);
}

TEST_CASE("dual traces voxelize to disjoint, non-adjacent cell sets", "[device]") {
    DeviceModel dev = test_helpers::serpentine_device("dual", "poly_only", 2.0);
    const StructuredGrid& g = dev.grid;
    // voxelize() itself throws if the traces merge; verify disjointness here
    // with an independent sweep over neighbouring cell pairs
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                std::size_t c = g.index(i, j, k);
                if (!dev.is_conductor(c)) continue;
                if (i + 1 < g.nx) {
                    std::size_t n = g.index(i + 1, j, k);
                    if (dev.is_conductor(n)) REQUIRE(dev.trace[c] == dev.trace[n]);
                }
                if (j + 1 < g.ny) {
                    std::size_t n = g.index(i, j + 1, k);
                    if (dev.is_conductor(n)) REQUIRE(dev.trace[c] == dev.trace[n]);
                }
            }
}

TEST_CASE("composite stack fills plates above the traces", "[device]") {
    DeviceModel dev = test_helpers::serpentine_device("R2", "composite", 4.0);
    REQUIRE(dev.grid.nz == 3);
    // conductor layer has voids between legs; plate layers are full
    for (int j = 0; j < dev.grid.ny; ++j)
        for (int i = 0; i < dev.grid.nx; ++i) {
            CHECK_FALSE(dev.is_void(dev.grid.index(i, j, 1)));
            CHECK_FALSE(dev.is_void(dev.grid.index(i, j, 2)));
        }
    CHECK(dev.material_of(dev.grid.index(0, 0, 1))->name == "SiO2");
    CHECK(dev.material_of(dev.grid.index(0, 0, 2))->name == "Al");
    CHECK(dev.grid.dz[0] == Approx(0.3 * um));
    CHECK(dev.grid.dz[1] == Approx(0.6 * um));
    CHECK(dev.grid.dz[2] == Approx(1.5 * um));
}

TEST_CASE("pads become electrodes and thermal sinks", "[device]") {
    DeviceModel dev = test_helpers::serpentine_device("R2", "poly_only", 2.0);
    REQUIRE(dev.electrodes.size() == 2);
    CHECK_FALSE(dev.electrode("R2_a").faces.empty());
    CHECK_FALSE(dev.electrode("R2_b").faces.empty());
    REQUIRE(dev.thermal_bcs.size() == 2);
    for (const auto& bc : dev.thermal_bcs) {
        CHECK(bc.type == BcType::fixed_temperature);
        CHECK(bc.value == 300.0);
    }
    CHECK_THROWS_AS(dev.electrode("nope"), config_error);
}

TEST_CASE("voxel CSV dump round-trips through the CSV reader", "[device]") {
    DeviceModel dev = test_helpers::bar_device(2.0);
    std::ostringstream os;
    write_voxels_csv(dev, os, "# test");
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "# test");
    std::getline(is, line);
    CHECK(line == "x_um,y_um,z_um,material");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 300);
}

TEST_CASE("z refinement subdivides layers", "[device]") {
    SerpentineSpec s = serpentine_preset("bar");
    std::vector<HeaterLayout> lays{build_serpentine(s, "bar")};
    VoxelizeOptions opt;
    opt.h = 2 * um;
    opt.z_cells_per_layer = 3;
    DeviceModel dev = voxelize(lays, stack_preset("poly_only"), builtin_table(), opt);
    CHECK(dev.grid.nz == 3);
    CHECK(dev.grid.dz[0] == Approx(0.1 * um));
}
