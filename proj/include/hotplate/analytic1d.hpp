#pragma once

#include <cmath>
#include <stdexcept>

namespace hotplate {

/// Closed-form 1-D heater: a straight resistive bar of length L, width w,
/// thickness t with both ends held at ambient.
struct Heater1D {
    double length = 0;     // m
    double width = 0;      // m
    double thickness = 0;  // m
    double k = 20.0;       // W/(m K)
    double sheet_res = 0;  // ohm/sq
    double t_amb = 300.0;  // K

    void validate() const {
        if (!(length > 0) || !(width > 0) || !(thickness > 0) || !(k > 0) ||
            !(sheet_res > 0))
            throw std::invalid_argument("Heater1D: all parameters must be > 0");
    }
};

/// The printed closed form assumes only half the dissipated power heats the
/// span (denominator 4*L*w*t*k); the standard both-ends-sunk derivation keeps
/// the full power (denominator 2*L*w*t*k). The field solver realizes the
/// full-power physics; both variants are reported side by side.
enum class ProfileVariant { half_power, full_power };

inline double resistance(const Heater1D& h) {
    h.validate();
    return h.sheet_res * h.length / h.width;
}

inline double joule_power(double volts, double resistance_ohm) {
    if (!(resistance_ohm > 0)) throw std::invalid_argument("resistance must be > 0");
    return volts * volts / resistance_ohm;
}

/// Parabolic steady-state profile, x measured from the heater midpoint.
inline double temperature_rise(const Heater1D& h, double power, double x,
                               ProfileVariant variant = ProfileVariant::half_power) {
    h.validate();
    double half = 0.5 * h.length;
    if (std::abs(x) > half * (1.0 + 1e-12))
        throw std::domain_error("temperature_profile: |x| exceeds L/2");
    double denom_factor = variant == ProfileVariant::half_power ? 4.0 : 2.0;
    double coef = power / (denom_factor * h.length * h.width * h.thickness * h.k);
    return coef * (half * half - x * x);
}

inline double temperature_profile(const Heater1D& h, double power, double x,
                                  ProfileVariant variant = ProfileVariant::half_power) {
    return h.t_amb + temperature_rise(h, power, x, variant);
}

inline double midpoint_rise(const Heater1D& h, double volts,
                            ProfileVariant variant = ProfileVariant::half_power) {
    double p = joule_power(volts, resistance(h));
    return temperature_rise(h, p, 0.0, variant);
}

inline double midpoint_temperature(const Heater1D& h, double volts,
                                   ProfileVariant variant = ProfileVariant::half_power) {
    return h.t_amb + midpoint_rise(h, volts, variant);
}

}  // namespace hotplate
