#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hotplate/error.hpp"

namespace hotplate {

/// Lumped resonator: linear frequency-temperature law around the reference.
struct ResonatorModel {
    double f0_hz = 1e9;            // resonant frequency at t0_c
    double t0_c = 30.0;            // reference ("room") temperature
    double tcf_ppm_per_c = -97.2;  // temperature coefficient of frequency

    void validate() const {
        if (!(f0_hz > 0)) throw std::invalid_argument("resonator: f0 must be > 0");
    }
};

/// Two-point temperature coefficient of frequency in ppm/degC:
/// (df / f_ref) / dT.
inline double tcf_two_point(double f_ref, double f_low, double t_low, double f_high,
                            double t_high) {
    if (!(f_ref > 0)) throw std::invalid_argument("tcf: f_ref must be > 0");
    if (t_high == t_low) throw std::invalid_argument("tcf: zero temperature span");
    return ((f_high - f_low) / f_ref) / (t_high - t_low) * 1e6;
}

inline double resonator_frequency(const ResonatorModel& m, double t_c) {
    m.validate();
    return m.f0_hz * (1.0 + m.tcf_ppm_per_c * 1e-6 * (t_c - m.t0_c));
}

// ============================================================================
// Lumped oven model
// ============================================================================

enum class OvenMode { fixed_voltage, closed_loop, kappa_override };

/// Heater electrical model with linear temperature coefficient of resistance.
struct HeaterElectrical {
    double r0_ohm = 0.0;        // resistance at t0_c
    double alpha_per_c = 1e-3;  // TCR
    double t0_c = 30.0;

    double resistance(double t_c) const {
        return r0_ohm * (1.0 + alpha_per_c * (t_c - t0_c));
    }
};

struct OvenModel {
    double r_th_k_per_w = 0.0;  // device-to-ambient thermal resistance
    HeaterElectrical heater;
    OvenMode mode = OvenMode::fixed_voltage;
    double setpoint_c = 56.0;       // closed_loop / kappa_override
    double v_applied = 23.0;        // fixed_voltage
    double v_max = 30.0;            // closed_loop actuator limit
    std::optional<double> kappa;    // kappa_override: d(t_dev)/d(t_amb)
    double t_amb_ref_c = 30.0;      // kappa_override reference ambient

    void validate() const {
        if (!(r_th_k_per_w > 0)) throw std::invalid_argument("oven: r_th must be > 0");
        if (!(heater.r0_ohm > 0)) throw std::invalid_argument("oven: heater r0 must be > 0");
        if (kappa && (*kappa < 0.0 || *kappa > 1.0))
            throw std::invalid_argument("oven: kappa must be in [0, 1]");
    }
};

struct OvenState {
    double t_dev_c = 0.0;
    double v_required = 0.0;       // drive achieving t_dev
    double power_w = 0.0;
    bool setpoint_reached = true;  // false when clamped by v_max (closed loop)
};

namespace detail {

/// Fixed point of t = t_amb + r_th * v^2 / R(t), damped iteration.
inline double oven_fixed_point(const OvenModel& oven, double t_amb_c, double volts) {
    const double damping = 0.5;
    double t = t_amb_c;
    for (int it = 0; it < 10000; ++it) {
        double r = oven.heater.resistance(t);
        if (!(r > 0))
            throw solver_error("oven: heater resistance became non-positive at " +
                               std::to_string(t) + " degC");
        double next = t_amb_c + oven.r_th_k_per_w * volts * volts / r;
        if (std::abs(next - t) <= 1e-6) return next;
        t = t + damping * (next - t);
    }
    throw solver_error("oven: fixed-point iteration did not converge");
}

}  // namespace detail

inline OvenState oven_solve(const OvenModel& oven, double t_amb_c) {
    oven.validate();
    OvenState st;
    switch (oven.mode) {
        case OvenMode::fixed_voltage: {
            st.t_dev_c = detail::oven_fixed_point(oven, t_amb_c, oven.v_applied);
            st.v_required = oven.v_applied;
            st.power_w = oven.v_applied * oven.v_applied /
                         oven.heater.resistance(st.t_dev_c);
            break;
        }
        case OvenMode::closed_loop: {
            double attainable = detail::oven_fixed_point(oven, t_amb_c, oven.v_max);
            double target = std::max(t_amb_c, std::min(oven.setpoint_c, attainable));
            st.setpoint_reached = target >= oven.setpoint_c || oven.setpoint_c <= t_amb_c;
            st.t_dev_c = target;
            double rise = target - t_amb_c;
            st.v_required = rise > 0
                ? std::sqrt(rise * oven.heater.resistance(target) / oven.r_th_k_per_w)
                : 0.0;
            st.power_w = rise / oven.r_th_k_per_w;
            break;
        }
        case OvenMode::kappa_override: {
            if (!oven.kappa)
                throw config_error("oven: kappa_override mode requires kappa");
            st.t_dev_c = oven.setpoint_c + *oven.kappa * (t_amb_c - oven.t_amb_ref_c);
            double rise = st.t_dev_c - t_amb_c;
            st.v_required = rise > 0
                ? std::sqrt(rise * oven.heater.resistance(st.t_dev_c) / oven.r_th_k_per_w)
                : 0.0;
            st.power_w = std::max(rise, 0.0) / oven.r_th_k_per_w;
            break;
        }
    }
    return st;
}

inline double device_temperature(const OvenModel& oven, double t_amb_c) {
    return oven_solve(oven, t_amb_c).t_dev_c;
}

// ============================================================================
// Ambient sweeps
// ============================================================================

struct SweepPoint {
    double t_amb_c = 0.0;
    double t_dev_c = 0.0;
    double f_hz = 0.0;
};

struct CompensationReport {
    std::vector<SweepPoint> sweep;            // sorted by ambient
    double effective_tcf_ppm_per_c = 0.0;     // least-squares slope
    double f_ref_hz = 0.0;                    // resonator frequency at its reference T
    std::optional<double> reduction_factor;   // |uncompensated| / |compensated|
    std::string mode_note;
};

inline double least_squares_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("least_squares_slope: need matching n >= 2");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0)) throw std::invalid_argument("least_squares_slope: degenerate x");
    return sxy / sxx;
}

/// Sweep the ambient and report frequency drift. Without an oven the device
/// follows the ambient directly. The effective TCF is the least-squares slope
/// of (f/f_ref - 1)/1e-6 against ambient, with f_ref the resonator frequency
/// at its reference temperature; for two points this reduces to the two-point
/// coefficient.
inline CompensationReport run_sweep(const ResonatorModel& resonator, const OvenModel* oven,
                                    double t_lo_c, double t_hi_c, int steps) {
    resonator.validate();
    if (steps < 2) throw std::invalid_argument("run_sweep: need at least 2 steps");
    if (!(t_hi_c > t_lo_c)) throw std::invalid_argument("run_sweep: empty ambient range");

    CompensationReport rep;
    rep.f_ref_hz = resonator.f0_hz;
    std::vector<double> xs(steps), ys(steps);
    for (int i = 0; i < steps; ++i) {
        SweepPoint pt;
        pt.t_amb_c = t_lo_c + (t_hi_c - t_lo_c) * i / (steps - 1);
        pt.t_dev_c = oven ? device_temperature(*oven, pt.t_amb_c) : pt.t_amb_c;
        pt.f_hz = resonator_frequency(resonator, pt.t_dev_c);
        xs[i] = pt.t_amb_c;
        ys[i] = (pt.f_hz / rep.f_ref_hz - 1.0) / 1e-6;
        rep.sweep.push_back(pt);
    }
    rep.effective_tcf_ppm_per_c = least_squares_slope(xs, ys);
    if (oven) {
        switch (oven->mode) {
            case OvenMode::fixed_voltage:
                rep.mode_note = "fixed-voltage drive with heater TCR self-regulation";
                break;
            case OvenMode::closed_loop:
                rep.mode_note = "ideal closed-loop setpoint hold";
                break;
            case OvenMode::kappa_override:
                rep.mode_note = "kappa-override: residual ambient coupling set by "
                                "construction, not derived from device physics";
                break;
        }
    }
    return rep;
}

inline double reduction_factor(const CompensationReport& uncompensated,
                               const CompensationReport& compensated) {
    double denom = std::abs(compensated.effective_tcf_ppm_per_c);
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(uncompensated.effective_tcf_ppm_per_c) / denom;
}

/// CSV export: T_amb_C, T_dev_C, f_Hz rows plus a summary block.
inline void write_report_csv(const CompensationReport& rep, std::ostream& os,
                             const std::string& provenance_line = "") {
    if (!provenance_line.empty()) os << provenance_line << '\n';
    os << "T_amb_C,T_dev_C,f_Hz\n";
    char buf[120];
    for (const auto& pt : rep.sweep) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", pt.t_amb_c, pt.t_dev_c, pt.f_hz);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "# effective_tcf_ppm_per_C = %.9g\n",
                  rep.effective_tcf_ppm_per_c);
    os << buf;
    if (rep.reduction_factor) {
        std::snprintf(buf, sizeof buf, "# reduction_factor = %.9g\n", *rep.reduction_factor);
        os << buf;
    }
    if (!rep.mode_note.empty()) os << "# mode: " << rep.mode_note << '\n';
}

}  // namespace hotplate
