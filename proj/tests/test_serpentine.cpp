#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "hotplate/serpentine.hpp"

using namespace hotplate;
using namespace hotplate::units;
using Catch::Approx;

TEST_CASE("preset path lengths hit the nominal trace lengths", "[serpentine]") {
    HeaterLayout r1 = build_serpentine(serpentine_preset("R1"), "R1");
    HeaterLayout r2 = build_serpentine(serpentine_preset("R2"), "R2");
    CHECK(total_path_length(r1) == Approx(4088e-6).epsilon(0.005));
    CHECK(total_path_length(r2) == Approx(3993e-6).epsilon(0.005));
    // construction is exact, not just within the band
    CHECK(total_path_length(r1) == Approx(4088e-6).epsilon(1e-9));
    CHECK(total_path_length(r2) == Approx(3993e-6).epsilon(1e-9));
}

TEST_CASE("path length equals the closed form", "[serpentine]") {
    for (const char* p : {"R1", "R2", "bar"}) {
        SerpentineSpec s = serpentine_preset(p);
        HeaterLayout l = build_serpentine(s, p);
        CHECK(total_path_length(l) == Approx(s.closed_form_length()).epsilon(1e-12));
    }
}

TEST_CASE("single leg with no pads is a straight bar", "[serpentine]") {
    SerpentineSpec s = serpentine_preset("bar");
    REQUIRE(s.leg_count == 1);
    REQUIRE(s.pad_size == 0.0);
    HeaterLayout l = build_serpentine(s, "bar");
    CHECK(total_path_length(l) == Approx(s.leg_length).epsilon(1e-12));
    CHECK(l.centerline.size() == 1);
}

TEST_CASE("overlapping pitch is rejected", "[serpentine]") {
    SerpentineSpec s = serpentine_preset("R2");
    s.pitch = 10 * um;  // < trace width 12 um
    CHECK_THROWS_AS(build_serpentine(s), geometry_error);
}

TEST_CASE("footprint fits the promised bounding box", "[serpentine]") {
    SerpentineSpec s = serpentine_preset("R1");
    HeaterLayout l = build_serpentine(s, "R1");
    Rect bb = l.bounding_box();
    CHECK(bb.width() <= s.leg_length + 2 * s.pad_size + 1e-12);
    CHECK(bb.height() <= s.leg_count * s.pitch + 1e-12);
}

TEST_CASE("construction is deterministic", "[serpentine]") {
    SerpentineSpec s = serpentine_preset("R1");
    HeaterLayout a = build_serpentine(s, "R1");
    HeaterLayout b = build_serpentine(s, "R1");
    REQUIRE(a.centerline.size() == b.centerline.size());
    for (std::size_t i = 0; i < a.centerline.size(); ++i) {
        CHECK(a.centerline[i].x0 == b.centerline[i].x0);
        CHECK(a.centerline[i].y0 == b.centerline[i].y0);
        CHECK(a.centerline[i].x1 == b.centerline[i].x1);
        CHECK(a.centerline[i].y1 == b.centerline[i].y1);
    }
}

TEST_CASE("dual traces interleave with the promised clearance", "[serpentine]") {
    SerpentineSpec s = serpentine_preset("dual");
    auto [a, b] = build_dual_serpentine(s);

    // minimum clearance is exactly pitch/2 - trace_width
    CHECK(min_gap(a, b) == Approx(s.pitch / 2 - s.trace_width).epsilon(1e-9));

    // equal leg counts (parity preserved), equal path lengths
    CHECK(total_path_length(a) == Approx(total_path_length(b)).epsilon(1e-12));

    // no footprint overlap anywhere
    for (const auto& ra : a.footprint)
        for (const auto& rb : b.footprint) CHECK_FALSE(ra.intersects(rb));
}

TEST_CASE("dual leg rows alternate through the footprint", "[serpentine]") {
    SerpentineSpec s = serpentine_preset("dual");
    auto [a, b] = build_dual_serpentine(s);
    // collect horizontal leg centerlines sorted by y; traces must interleave
    // (never more than two consecutive rows from the same trace)
    std::vector<std::pair<double, int>> rows;
    auto gather = [&](const HeaterLayout& l, int id) {
        for (const auto& seg : l.centerline)
            if (seg.horizontal() && seg.length() > s.leg_length / 2)
                rows.emplace_back(seg.y0, id);
    };
    gather(a, 0);
    gather(b, 1);
    std::sort(rows.begin(), rows.end());
    REQUIRE(rows.size() == 2 * static_cast<std::size_t>(s.leg_count));
    int run = 1;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        run = rows[i].second == rows[i - 1].second ? run + 1 : 1;
        CHECK(run <= 2);
        // uniform interleaved spacing pitch/2
        CHECK(rows[i].first - rows[i - 1].first == Approx(s.pitch / 2).epsilon(1e-9));
    }
}

TEST_CASE("dual requires room for the second trace", "[serpentine]") {
    SerpentineSpec s = serpentine_preset("dual");
    s.pitch = 20 * um;  // < 2 * 12 um
    CHECK_THROWS_AS(build_dual_serpentine(s), geometry_error);
}

TEST_CASE("rect distance and intersection primitives", "[serpentine]") {
    Rect a{0, 0, 1, 1}, b{2, 0, 3, 1}, c{0.5, 0.5, 1.5, 1.5}, d{1, 0, 2, 1};
    CHECK(a.distance(b) == Approx(1.0));
    CHECK(a.intersects(c));
    CHECK_FALSE(a.intersects(d));  // edge contact is not overlap
    CHECK(a.distance(d) == 0.0);
}
