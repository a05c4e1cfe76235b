#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hotplate/error.hpp"
#include "hotplate/units.hpp"

namespace hotplate {

// ============================================================================
// Planar primitives (axis-aligned, metres)
// ============================================================================

struct Rect {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // x0 <= x1, y0 <= y1

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }

    /// Half-open containment so a point on a shared edge belongs to one rect.
    bool contains(double x, double y) const {
        return x >= x0 && x < x1 && y >= y0 && y < y1;
    }

    /// Strict interior overlap; rects that only touch along an edge do not intersect.
    bool intersects(const Rect& o) const {
        return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
    }

    double distance(const Rect& o) const {
        double dx = std::max({0.0, o.x0 - x1, x0 - o.x1});
        double dy = std::max({0.0, o.y0 - y1, y0 - o.y1});
        return std::hypot(dx, dy);
    }
};

struct Segment {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // axis-aligned centerline

    bool horizontal() const { return y0 == y1; }
    double length() const { return std::abs(x1 - x0) + std::abs(y1 - y0); }
};

namespace detail {

/// Trace footprint of one segment: centerline +/- w/2, optionally extended
/// w/2 behind the start vertex (elbow cap). With butt ends elsewhere this cap
/// convention tiles elbows exactly once, so union area == path length * w.
inline Rect segment_rect(const Segment& s, double w, bool start_cap) {
    double hw = 0.5 * w;
    Rect r{std::min(s.x0, s.x1), std::min(s.y0, s.y1),
           std::max(s.x0, s.x1), std::max(s.y0, s.y1)};
    if (s.horizontal()) {
        r.y0 -= hw;
        r.y1 += hw;
        if (start_cap) {
            if (s.x1 > s.x0) r.x0 -= hw; else r.x1 += hw;
        }
    } else {
        r.x0 -= hw;
        r.x1 += hw;
        if (start_cap) {
            if (s.y1 > s.y0) r.y0 -= hw; else r.y1 += hw;
        }
    }
    return r;
}

}  // namespace detail

// ============================================================================
// Serpentine specification and layout
// ============================================================================

/// Serpentine trace parameters. Lengths in metres.
struct SerpentineSpec {
    double leg_length = 0;      // straight leg span
    int leg_count = 1;
    double trace_width = 0;     // w
    double pitch = 0;           // center-to-center leg spacing
    double trace_thickness = 0; // t
    double pad_size = 0;        // pad square side; 0 = bare trace ends

    void validate() const {
        if (leg_count < 1) throw geometry_error("leg_count must be >= 1");
        if (!(leg_length > 0)) throw geometry_error("leg_length must be > 0");
        if (!(trace_width > 0)) throw geometry_error("trace_width must be > 0");
        if (!(pitch > 0)) throw geometry_error("pitch must be > 0");
        if (!(trace_thickness > 0)) throw geometry_error("trace_thickness must be > 0");
        if (pad_size < 0) throw geometry_error("pad_size must be >= 0");
        if (pitch < trace_width)
            throw geometry_error("pitch < trace_width: serpentine legs would overlap");
    }

    /// Closed-form total path length: n*leg + (n-1)*pitch + two pad stubs.
    double closed_form_length() const {
        return leg_count * leg_length + (leg_count - 1) * pitch + 2.0 * pad_size;
    }
};

/// Pad attachment region and the outward face direction used for electrodes.
struct Pad {
    Rect region;
    int dir = 0;  // 0:-x 1:+x 2:-y 3:+y (outward normal)
};

struct HeaterLayout {
    std::string name;
    std::vector<Segment> centerline;  // connected end-to-end
    double width = 0;
    double thickness = 0;
    std::array<Pad, 2> pads;
    std::vector<Rect> footprint;      // segment rects followed by pad rects

    Rect bounding_box() const {
        Rect bb = footprint.front();
        for (const auto& r : footprint) {
            bb.x0 = std::min(bb.x0, r.x0);
            bb.y0 = std::min(bb.y0, r.y0);
            bb.x1 = std::max(bb.x1, r.x1);
            bb.y1 = std::max(bb.y1, r.y1);
        }
        return bb;
    }

    bool covers(double x, double y) const {
        for (const auto& r : footprint)
            if (r.contains(x, y)) return true;
        return false;
    }
};

inline double total_path_length(const HeaterLayout& layout) {
    double sum = 0;
    for (const auto& s : layout.centerline) sum += s.length();
    return sum;
}

namespace detail {

inline void append_segment(std::vector<Segment>& segs, double x0, double y0,
                           double x1, double y1) {
    // merge collinear continuations so elbow caps stay well-defined
    if (!segs.empty()) {
        Segment& last = segs.back();
        if (last.x1 == x0 && last.y1 == y0) {
            bool both_h = last.y0 == last.y1 && y0 == y1;
            bool both_v = last.x0 == last.x1 && x0 == x1;
            if ((both_h && y0 == last.y0) || (both_v && x0 == last.x0)) {
                last.x1 = x1;
                last.y1 = y1;
                return;
            }
        }
    }
    segs.push_back(Segment{x0, y0, x1, y1});
}

inline std::vector<Rect> trace_rects(const std::vector<Segment>& segs, double w) {
    std::vector<Rect> rects;
    rects.reserve(segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i)
        rects.push_back(segment_rect(segs[i], w, /*start_cap=*/i > 0));
    return rects;
}

/// Non-consecutive footprint rects of one trace must not overlap.
inline void check_self_overlap(const HeaterLayout& layout) {
    const auto& segs = layout.centerline;
    std::vector<Rect> rects = trace_rects(segs, layout.width);
    for (std::size_t i = 0; i < rects.size(); ++i)
        for (std::size_t j = i + 2; j < rects.size(); ++j)
            if (rects[i].intersects(rects[j]))
                throw geometry_error("layout '" + layout.name +
                                     "': trace self-overlap between segments " +
                                     std::to_string(i) + " and " + std::to_string(j));
}

inline Pad make_pad(double attach_x, double attach_y, int dir, double pad_size,
                    double trace_width) {
    // Region anchored at the trace end; degenerate pad_size falls back to the
    // last trace_width of the trace itself.
    double side = pad_size > 0 ? pad_size : trace_width;
    Pad p;
    p.dir = dir;
    double half = 0.5 * side;
    switch (dir) {
        case 0: p.region = Rect{attach_x, attach_y - half, attach_x + side, attach_y + half}; break;
        case 1: p.region = Rect{attach_x - side, attach_y - half, attach_x, attach_y + half}; break;
        case 2: p.region = Rect{attach_x - half, attach_y, attach_x + half, attach_y + side}; break;
        default: p.region = Rect{attach_x - half, attach_y - side, attach_x + half, attach_y}; break;
    }
    return p;
}

inline void finalize_layout(HeaterLayout& layout, double pad_size) {
    layout.footprint = trace_rects(layout.centerline, layout.width);
    if (pad_size > layout.width) {
        layout.footprint.push_back(layout.pads[0].region);
        layout.footprint.push_back(layout.pads[1].region);
    }
    check_self_overlap(layout);
}

}  // namespace detail

// ============================================================================
// Builders
// ============================================================================

/// Boustrophedon serpentine: legs run along x at y = i*pitch, joined by
/// alternating-side verticals; pad stubs extend outward at both free ends.
inline HeaterLayout build_serpentine(const SerpentineSpec& spec,
                                     std::string name = "R") {
    spec.validate();
    const double ll = spec.leg_length;
    const double p = spec.pitch;
    const double pad = spec.pad_size;
    const int n = spec.leg_count;

    HeaterLayout layout;
    layout.name = std::move(name);
    layout.width = spec.trace_width;
    layout.thickness = spec.trace_thickness;

    auto yleg = [&](int i) { return i * p; };
    std::vector<Segment>& segs = layout.centerline;

    detail::append_segment(segs, -pad, yleg(0), 0.0, yleg(0));  // west stub
    double cur_x = 0.0;
    for (int i = 0; i < n; ++i) {
        double to_x = (i % 2 == 0) ? ll : 0.0;
        detail::append_segment(segs, cur_x, yleg(i), to_x, yleg(i));
        cur_x = to_x;
        if (i + 1 < n) detail::append_segment(segs, cur_x, yleg(i), cur_x, yleg(i + 1));
    }
    double exit_x = cur_x + ((n - 1) % 2 == 0 ? pad : -pad);
    detail::append_segment(segs, cur_x, yleg(n - 1), exit_x, yleg(n - 1));

    layout.pads[0] = detail::make_pad(-pad, yleg(0), 0, pad, spec.trace_width);
    layout.pads[1] = detail::make_pad(exit_x, yleg(n - 1),
                                      (n - 1) % 2 == 0 ? 1 : 0, pad, spec.trace_width);
    detail::finalize_layout(layout, pad);
    return layout;
}

/// Two serpentine traces snaking together through the same footprint.
/// Leg rows interleave at pitch/2 spacing; at every U-turn the outer/inner
/// roles swap, so the two path lengths come out identical. The minimum
/// clearance between the traces is pitch/2 - trace_width everywhere.
inline std::pair<HeaterLayout, HeaterLayout> build_dual_serpentine(
    const SerpentineSpec& spec, std::string name_a = "R1",
    std::string name_b = "R2") {
    spec.validate();
    if (spec.pitch < 2.0 * spec.trace_width)
        throw geometry_error("dual serpentine requires pitch >= 2*trace_width "
                             "to interleave the second trace");

    const double ll = spec.leg_length;
    const double p = spec.pitch;
    const double d = 0.5 * p;       // interleaved leg spacing
    const double dlt = 0.25 * p;    // offset of each trace from the pair row
    const double pad = spec.pad_size;
    const int n = spec.leg_count;

    const double x_west = -d;       // shared free-end column, west
    const double x_east = ll + d;   // shared free-end column, east

    // Per-trace turn columns. Trace A turns inside on the right and outside
    // on the left; trace B the other way around.
    struct TraceDef {
        double leg_offset_sign;  // leg y = j*p + sign * (j even ? +dlt : -dlt)
        double right_col, left_col;
    };
    const TraceDef defs[2] = {
        {+1.0, ll, -d},       // A: right-inner, left-outer
        {-1.0, ll + d, 0.0},  // B: right-outer, left-inner
    };

    std::array<HeaterLayout, 2> out;
    for (int t = 0; t < 2; ++t) {
        const TraceDef& def = defs[t];
        HeaterLayout& layout = out[t];
        layout.name = (t == 0) ? name_a : name_b;
        layout.width = spec.trace_width;
        layout.thickness = spec.trace_thickness;

        auto yleg = [&](int j) {
            double off = (j % 2 == 0) ? dlt : -dlt;
            return j * p + def.leg_offset_sign * off;
        };

        std::vector<Segment>& segs = layout.centerline;
        detail::append_segment(segs, x_west - pad, yleg(0), x_west, yleg(0));
        double cur_x = x_west;
        for (int j = 0; j < n; ++j) {
            bool east_bound = (j % 2 == 0);
            double to_x;
            if (j + 1 < n)
                to_x = east_bound ? def.right_col : def.left_col;
            else
                to_x = east_bound ? x_east : x_west;  // free end
            detail::append_segment(segs, cur_x, yleg(j), to_x, yleg(j));
            cur_x = to_x;
            if (j + 1 < n) detail::append_segment(segs, cur_x, yleg(j), cur_x, yleg(j + 1));
        }
        double exit_x = cur_x + ((n - 1) % 2 == 0 ? pad : -pad);
        detail::append_segment(segs, cur_x, yleg(n - 1), exit_x, yleg(n - 1));

        layout.pads[0] = detail::make_pad(x_west - pad, yleg(0), 0, pad, spec.trace_width);
        layout.pads[1] = detail::make_pad(exit_x, yleg(n - 1),
                                          (n - 1) % 2 == 0 ? 1 : 0, pad, spec.trace_width);
        detail::finalize_layout(layout, pad);
    }

    // The two traces must never overlap each other.
    for (const auto& ra : out[0].footprint)
        for (const auto& rb : out[1].footprint)
            if (ra.intersects(rb))
                throw geometry_error("dual serpentine traces overlap");

    return {std::move(out[0]), std::move(out[1])};
}

/// Minimum clearance between the footprints of two layouts.
inline double min_gap(const HeaterLayout& a, const HeaterLayout& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ra : a.footprint)
        for (const auto& rb : b.footprint)
            best = std::min(best, ra.distance(rb));
    return best;
}

// ============================================================================
// Presets
// ============================================================================

// Trace length targets for the shipped presets (metres).
inline constexpr double preset_r1_length = 4088.0 * units::um;
inline constexpr double preset_r2_length = 3993.0 * units::um;

/// Shipped geometries: "R1"/"R2" single serpentines hitting the nominal trace
/// lengths, "dual" the interleaved pair, "bar" a plain straight validation bar.
inline SerpentineSpec serpentine_preset(std::string_view name) {
    SerpentineSpec s;
    s.leg_count = 13;
    s.pitch = 24.0 * units::um;
    s.trace_width = 12.0 * units::um;
    s.trace_thickness = 0.3 * units::um;
    s.pad_size = 12.0 * units::um;
    if (name == "R1") {
        // leg length chosen so closed_form_length() == preset_r1_length
        s.leg_length = (preset_r1_length - 12 * s.pitch - 2 * s.pad_size) / 13.0;
        return s;
    }
    if (name == "R2") {
        s.leg_length = (preset_r2_length - 12 * s.pitch - 2 * s.pad_size) / 13.0;
        return s;
    }
    if (name == "dual") {
        // pitch/2 - w = 4 um clearance between the interleaved traces
        s.pitch = 32.0 * units::um;
        s.leg_length = 262.0 * units::um;
        return s;
    }
    if (name == "bar") {
        s.leg_count = 1;
        s.leg_length = 100.0 * units::um;
        s.pad_size = 0.0;
        return s;
    }
    throw config_error("unknown geometry preset '" + std::string(name) + "'");
}

}  // namespace hotplate
