#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hotplate/materials.hpp"

using namespace hotplate;
using Catch::Approx;

TEST_CASE("builtin table carries the stack properties", "[materials]") {
    MaterialTable t = builtin_table();

    const Material& poly = t.lookup("PolySi");
    CHECK(poly.k == 20.0);
    CHECK(poly.c == 678.0);
    CHECK(poly.rho == 2330.0);
    REQUIRE(poly.sheet_res.has_value());
    CHECK(*poly.sheet_res == 22.8);
    REQUIRE(poly.sigma.has_value());
    CHECK(*poly.sigma == Approx(1.462e5).epsilon(1e-3));

    const Material& oxide = t.lookup("SiO2");
    CHECK(oxide.k == 1.2);
    CHECK(oxide.c == 730.0);
    CHECK(oxide.rho == 2270.0);
    CHECK_FALSE(oxide.is_conductor());

    const Material& al = t.lookup("Al");
    CHECK(al.k == 190.0);
    CHECK(al.c == 963.0);
    CHECK(al.rho == 2699.0);
}

TEST_CASE("sheet resistance, sigma and thickness stay consistent", "[materials]") {
    MaterialTable t = builtin_table();
    const Material& poly = t.lookup("PolySi");
    CHECK(poly.sheet_consistent(poly_thickness_default, 1e-12));
    CHECK(*poly.sheet_res * *poly.sigma * poly_thickness_default ==
          Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lookup is case-sensitive and names missing keys", "[materials]") {
    MaterialTable t = builtin_table();
    CHECK_THROWS_WITH(t.lookup("polysi"), Catch::Matchers::ContainsSubstring("polysi"));
    CHECK_THROWS_AS(t.lookup("ZnO"), config_error);
}

TEST_CASE("effective sheet resistance from measured traces", "[materials]") {
    using units::um;
    // nominal lumped values of the two preset traces
    CHECK(effective_sheet_resistance(5050.0, 4088 * um, 12 * um) ==
          Approx(14.82).epsilon(1e-3));
    CHECK(effective_sheet_resistance(4990.0, 3993 * um, 12 * um) ==
          Approx(15.00).epsilon(1e-3));
    // one square is the identity
    CHECK(effective_sheet_resistance(22.8, 5 * um, 5 * um) == Approx(22.8).epsilon(1e-12));

    CHECK_THROWS_AS(effective_sheet_resistance(-1.0, 1e-6, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(effective_sheet_resistance(1.0, 0.0, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(effective_sheet_resistance(1.0, 1e-6, -1e-6), std::invalid_argument);
}

TEST_CASE("sheet resistance round trip", "[materials][property]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> len(1e-6, 1e-2), rs(0.1, 1000.0);
    for (int i = 0; i < 200; ++i) {
        double rho_s = rs(rng), length = len(rng), width = len(rng);
        double r = rho_s * length / width;
        CHECK(effective_sheet_resistance(r, length, width) ==
              Approx(rho_s).epsilon(1e-12));
    }
}

TEST_CASE("both sheet-resistance presets are exposed", "[materials]") {
    CHECK(poly_sheet_res_nominal == 22.8);
    CHECK(poly_sheet_res_table1_effective == 14.9);
}

TEST_CASE("material validation rejects unphysical values", "[materials]") {
    MaterialTable t;
    CHECK_THROWS_AS(t.add(Material{"bad", -1.0, 700.0, 2000.0}), std::invalid_argument);
    CHECK_THROWS_AS(t.add(Material{"bad", 1.0, 0.0, 2000.0}), std::invalid_argument);
    Material neg_sigma{"bad", 1.0, 700.0, 2000.0};
    neg_sigma.sigma = -5.0;
    CHECK_THROWS_AS(t.add(neg_sigma), std::invalid_argument);
}
