#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "hotplate/scenario.hpp"

using namespace hotplate;
using Catch::Approx;

namespace {

Scenario parse(const std::string& text) {
    std::istringstream is(text);
    return parse_scenario_stream(is);
}

}  // namespace

TEST_CASE("minimal scenario resolves the preset geometry", "[scenario]") {
    Scenario sc = parse("geometry.preset = R2\ndrive.volts = 1\n");
    CHECK(sc.geometry_preset == "R2");
    CHECK(sc.drive_volts == 1.0);
    CHECK(sc.spec.leg_count == 13);
    CHECK(sc.spec.trace_width == Approx(12e-6));
    CHECK(sc.spec.closed_form_length() == Approx(3993e-6).epsilon(1e-9));
    CHECK_FALSE(sc.dual);
    // defaults filled
    CHECK(sc.h == Approx(2e-6));
    CHECK(sc.threads == 1);
    CHECK(sc.sheet_res == 22.8);
    CHECK_FALSE(sc.hash_hex.empty());
}

TEST_CASE("unknown keys are hard errors naming the key", "[scenario]") {
    CHECK_THROWS_WITH(
        parse("geometry.preset = R2\ndrive.volts = 1\nthikness_um = 0.3\n"),
        Catch::Matchers::ContainsSubstring("thikness_um"));
}

TEST_CASE("empty scenario lists the required keys", "[scenario]") {
    try {
        parse("");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        std::string msg = e.what();
        CHECK(msg.find("geometry.preset") != std::string::npos);
        CHECK(msg.find("drive.volts") != std::string::npos);
    }
}

TEST_CASE("value and structure errors carry line context", "[scenario]") {
    CHECK_THROWS_WITH(parse("geometry.preset = R2\ndrive.volts = fast\n"),
                      Catch::Matchers::ContainsSubstring("line 2"));
    CHECK_THROWS_WITH(parse("geometry.preset R2\n"),
                      Catch::Matchers::ContainsSubstring("line 1"));
    CHECK_THROWS_WITH(
        parse("geometry.preset = R2\ngeometry.preset = R1\ndrive.volts = 1\n"),
        Catch::Matchers::ContainsSubstring("duplicate"));
}

TEST_CASE("micrometre inputs are converted to SI", "[scenario]") {
    Scenario sc = parse(
        "geometry.preset = custom\n"
        "geometry.leg_length_um = 100\n"
        "geometry.leg_count = 1\n"
        "geometry.trace_width_um = 12\n"
        "geometry.pad_size_um = 0\n"
        "grid.h_um = 4\n"
        "drive.volts = 2\n");
    CHECK(sc.spec.leg_length == Approx(100e-6));
    CHECK(sc.spec.pad_size == 0.0);
    CHECK(sc.h == Approx(4e-6));
}

TEST_CASE("geometry dimension keys require the custom preset", "[scenario]") {
    CHECK_THROWS_WITH(
        parse("geometry.preset = R2\ngeometry.leg_length_um = 10\ndrive.volts = 1\n"),
        Catch::Matchers::ContainsSubstring("custom"));
}

TEST_CASE("stack selection and overrides", "[scenario]") {
    Scenario sc = parse(
        "geometry.preset = R2\ndrive.volts = 1\nstack.preset = composite\n");
    REQUIRE(sc.stack.layers.size() == 3);
    CHECK(sc.stack.layers[2].material == "Al");

    Scenario sc2 = parse(
        "geometry.preset = R2\ndrive.volts = 1\n"
        "stack.layers = PolySi:0.3, SiO2:1.2\n");
    REQUIRE(sc2.stack.layers.size() == 2);
    CHECK(sc2.stack.layers[1].thickness == Approx(1.2e-6));
}

TEST_CASE("sheet-resistance presets adjust the conductor", "[scenario]") {
    Scenario sc = parse(
        "geometry.preset = R2\ndrive.volts = 1\nsheet.preset = table1_effective\n");
    CHECK(sc.sheet_res == 14.9);
    const Material& poly = sc.materials.lookup("PolySi");
    CHECK(*poly.sheet_res == 14.9);
    CHECK(*poly.sigma == Approx(1.0 / (14.9 * 0.3e-6)).epsilon(1e-12));

    Scenario sc2 = parse(
        "geometry.preset = R2\ndrive.volts = 1\nsheet.res_ohm_per_sq = 18.0\n");
    CHECK(sc2.sheet_res == 18.0);
}

TEST_CASE("material overrides patch and extend the table", "[scenario]") {
    Scenario sc = parse(
        "geometry.preset = R2\ndrive.volts = 1\n"
        "material.Al.k_W_per_mK = 200\n"
        "material.Si.k_W_per_mK = 150\n"
        "material.Si.c_J_per_kgK = 700\n"
        "material.Si.rho_kg_per_m3 = 2329\n");
    CHECK(sc.materials.lookup("Al").k == 200.0);
    CHECK(sc.materials.lookup("Si").k == 150.0);

    CHECK_THROWS_AS(parse("geometry.preset = R2\ndrive.volts = 1\n"
                          "material.Si.k_W_per_mK = 150\n"),
                    config_error);  // incomplete new material
    CHECK_THROWS_WITH(parse("geometry.preset = R2\ndrive.volts = 1\n"
                            "material.Al.bogus = 1\n"),
                      Catch::Matchers::ContainsSubstring("bogus"));
}

TEST_CASE("drive modes", "[scenario]") {
    Scenario sc = parse(
        "geometry.preset = dual\ndrive.volts = 10\ndrive.mode = parallel\n");
    CHECK(sc.parallel);
    CHECK(sc.dual);
    CHECK_THROWS_AS(parse("geometry.preset = R2\ndrive.volts = 1\ndrive.mode = parallel\n"),
                    config_error);
    CHECK_THROWS_AS(parse("geometry.preset = R2\ndrive.volts = 1\ndrive.mode = x\n"),
                    config_error);
    CHECK_THROWS_AS(parse("geometry.preset = R2\ndrive.volts = 1\ndrive.resistor = 3\n"),
                    config_error);
}

TEST_CASE("oven keys resolve the lumped model", "[scenario]") {
    Scenario sc = parse(
        "geometry.preset = bar\ndrive.volts = 0\n"
        "oven.mode = fixed_voltage\noven.v_applied = 23\n"
        "oven.heater_alpha_per_C = 0.002\n");
    CHECK(sc.oven.mode == OvenMode::fixed_voltage);
    CHECK(sc.oven.heater.alpha_per_c == 0.002);
    // kappa default reproduces the reference ratio
    CHECK(*sc.oven.kappa == Approx(23.19 / 97.2).epsilon(1e-12));
    CHECK_THROWS_AS(parse("geometry.preset = bar\ndrive.volts = 0\noven.mode = pid\n"),
                    config_error);
}

TEST_CASE("resolved echo is canonical and hashed", "[scenario]") {
    Scenario a = parse("geometry.preset = R2\ndrive.volts = 1\n");
    Scenario b = parse("drive.volts = 1\n# comment\ngeometry.preset = R2\n");
    CHECK(a.hash_hex == b.hash_hex);  // ordering and comments do not matter
    Scenario c = parse("geometry.preset = R1\ndrive.volts = 1\n");
    CHECK(a.hash_hex != c.hash_hex);

    // every default is echoed
    bool saw_h = false;
    for (const auto& [k, v] : a.resolved)
        if (k == "grid.h_um") saw_h = true;
    CHECK(saw_h);
}

TEST_CASE("missing scenario file", "[scenario]") {
    CHECK_THROWS_AS(parse_scenario("/nonexistent/path.cfg"), config_error);
}
