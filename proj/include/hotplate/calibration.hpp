#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hotplate/error.hpp"

namespace hotplate {

enum class InputUnit { volt, kilo_ohm };

inline const char* to_string(InputUnit u) {
    return u == InputUnit::volt ? "volt" : "kilo_ohm";
}

struct CalibrationSample {
    double input = 0.0;   // volt or kilo-ohm
    double output = 0.0;  // celsius
};

/// Polynomial map from an electrical reading to temperature in celsius.
/// Coefficients ascending: c0 + c1*x + ... + cn*x^n.
struct CalibrationModel {
    std::vector<double> coefficients;
    InputUnit input_unit = InputUnit::volt;
    double valid_lo = 0.0;
    double valid_hi = 0.0;

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }

    bool in_range(double x) const { return x >= valid_lo && x <= valid_hi; }

    /// Horner evaluation. Evaluates outside the interval too; callers decide
    /// whether to warn (see in_range).
    double evaluate(double x) const {
        double acc = 0.0;
        for (std::size_t i = coefficients.size(); i-- > 0;)
            acc = acc * x + coefficients[i];
        return acc;
    }
};

inline double evaluate(const CalibrationModel& m, double x) { return m.evaluate(x); }

struct FitReport {
    CalibrationModel model;
    std::vector<double> residuals;  // fitted minus observed, per sample
    double residual_rms = 0.0;
    double residual_max = 0.0;
};

namespace detail {

/// Householder QR least squares: minimizes ||A c - y||_2 for the (degree+1)
/// column Vandermonde of the scaled inputs. Throws on rank deficiency.
inline std::vector<double> qr_least_squares(std::vector<std::vector<double>>& a,
                                            std::vector<double>& y, int cols) {
    const int m = static_cast<int>(a.size());
    double max_diag = 0.0;
    for (int kcol = 0; kcol < cols; ++kcol) {
        double norm = 0.0;
        for (int i = kcol; i < m; ++i) norm += a[i][kcol] * a[i][kcol];
        norm = std::sqrt(norm);
        if (kcol == 0) max_diag = norm;
        if (!(norm > 1e-12 * (max_diag > 0 ? max_diag : 1.0)))
            throw std::invalid_argument(
                "fit_polynomial: rank-deficient system (duplicate inputs?)");
        double alpha = a[kcol][kcol] > 0 ? -norm : norm;
        std::vector<double> v(m, 0.0);
        for (int i = kcol; i < m; ++i) v[i] = a[i][kcol];
        v[kcol] -= alpha;
        double vtv = 0.0;
        for (int i = kcol; i < m; ++i) vtv += v[i] * v[i];
        if (vtv > 0.0) {
            for (int j = kcol; j < cols; ++j) {
                double dot = 0.0;
                for (int i = kcol; i < m; ++i) dot += v[i] * a[i][j];
                double f = 2.0 * dot / vtv;
                for (int i = kcol; i < m; ++i) a[i][j] -= f * v[i];
            }
            double doty = 0.0;
            for (int i = kcol; i < m; ++i) doty += v[i] * y[i];
            double f = 2.0 * doty / vtv;
            for (int i = kcol; i < m; ++i) y[i] -= f * v[i];
        }
    }
    std::vector<double> c(cols, 0.0);
    for (int i = cols - 1; i >= 0; --i) {
        double s = y[i];
        for (int j = i + 1; j < cols; ++j) s -= a[i][j] * c[j];
        c[i] = s / a[i][i];
    }
    return c;
}

/// Expand p(t) with t = sx * x + tx into coefficients of x.
inline std::vector<double> unscale_coefficients(const std::vector<double>& in_t,
                                                double sx, double tx) {
    std::vector<double> out(in_t.size(), 0.0);
    std::vector<double> pow_t{1.0};  // (sx*x + tx)^j, ascending in x
    for (std::size_t j = 0; j < in_t.size(); ++j) {
        for (std::size_t i = 0; i < pow_t.size(); ++i) out[i] += in_t[j] * pow_t[i];
        // next power
        std::vector<double> next(pow_t.size() + 1, 0.0);
        for (std::size_t i = 0; i < pow_t.size(); ++i) {
            next[i] += tx * pow_t[i];
            next[i + 1] += sx * pow_t[i];
        }
        pow_t = std::move(next);
    }
    return out;
}

}  // namespace detail

/// Least-squares polynomial fit. Inputs are affinely mapped to [-1, 1]
/// before solving to keep the Vandermonde well conditioned; reported
/// coefficients are in raw input units.
inline FitReport fit_polynomial(std::span<const CalibrationSample> samples, int degree,
                                InputUnit unit = InputUnit::volt) {
    if (degree < 0) throw std::invalid_argument("fit_polynomial: degree must be >= 0");
    if (static_cast<int>(samples.size()) < degree + 1)
        throw std::invalid_argument("fit_polynomial: need at least degree+1 samples");
    for (const auto& s : samples)
        if (!std::isfinite(s.input) || !std::isfinite(s.output))
            throw std::invalid_argument("fit_polynomial: non-finite sample");

    double lo = samples[0].input, hi = samples[0].input;
    for (const auto& s : samples) {
        lo = std::min(lo, s.input);
        hi = std::max(hi, s.input);
    }
    double span = hi - lo;
    // degenerate span only fits degree 0
    double sx = (span > 0 && degree > 0) ? 2.0 / span : 1.0;
    double tx = (span > 0 && degree > 0) ? -(hi + lo) / span : 0.0;

    const int cols = degree + 1;
    std::vector<std::vector<double>> a(samples.size(), std::vector<double>(cols));
    std::vector<double> y(samples.size());
    for (std::size_t r = 0; r < samples.size(); ++r) {
        double t = sx * samples[r].input + tx;
        double p = 1.0;
        for (int j = 0; j < cols; ++j) {
            a[r][j] = p;
            p *= t;
        }
        y[r] = samples[r].output;
    }

    std::vector<double> ct = detail::qr_least_squares(a, y, cols);

    FitReport report;
    report.model.coefficients = detail::unscale_coefficients(ct, sx, tx);
    report.model.input_unit = unit;
    report.model.valid_lo = lo;
    report.model.valid_hi = hi;
    report.residuals.resize(samples.size());
    double ss = 0.0;
    for (std::size_t r = 0; r < samples.size(); ++r) {
        double res = report.model.evaluate(samples[r].input) - samples[r].output;
        report.residuals[r] = res;
        ss += res * res;
        report.residual_max = std::max(report.residual_max, std::abs(res));
    }
    report.residual_rms = std::sqrt(ss / samples.size());
    return report;
}

// ============================================================================
// Built-in calibration models (single-heater cubic, thermistor line,
// parallel-drive quadratic)
// ============================================================================

/// T(V) = 0.0015 V^3 - 0.0278 V^2 + 0.4614 V + 26.594, V in [0, 25].
inline CalibrationModel builtin_voltage_model() {
    return {{26.594, 0.4614, -0.0278, 0.0015}, InputUnit::volt, 0.0, 25.0};
}

/// T(R) = 167.68 R - 766.04 with R in kilo-ohm.
inline CalibrationModel builtin_resistance_model() {
    return {{-766.04, 167.68}, InputUnit::kilo_ohm, 4.72, 4.96};
}

/// T2(V2) = 0.0679 V2^2 - 0.3046 V2 + 28.455, both heaters driven, V2 in [0, 23].
inline CalibrationModel builtin_parallel_voltage_model() {
    return {{28.455, -0.3046, 0.0679}, InputUnit::volt, 0.0, 23.0};
}

/// Thermistor reading: resistance in kilo-ohm to celsius.
inline double temperature_from_resistance(double r_kohm) {
    if (!(r_kohm > 0)) throw std::invalid_argument("resistance must be > 0");
    return builtin_resistance_model().evaluate(r_kohm);
}

struct ResistanceReading {
    double celsius = 0.0;
    bool extrapolated = false;  // outside the calibration interval
};

inline ResistanceReading temperature_from_resistance_checked(double r_kohm) {
    CalibrationModel m = builtin_resistance_model();
    if (!(r_kohm > 0)) throw std::invalid_argument("resistance must be > 0");
    return {m.evaluate(r_kohm), !m.in_range(r_kohm)};
}

/// Voltage that produces the target temperature, by bisection over the
/// valid interval. The target's level set must contain exactly one root.
inline double invert_for_voltage(const CalibrationModel& m, double target_c) {
    if (!(m.valid_hi > m.valid_lo))
        throw std::invalid_argument("invert_for_voltage: degenerate interval");
    const int kScan = 4096;
    const double a = m.valid_lo, b = m.valid_hi;
    const double step = (b - a) / kScan;
    auto sign_at = [&](double x) {
        double f = m.evaluate(x) - target_c;
        return f > 0 ? 1 : (f < 0 ? -1 : 0);
    };

    // count level crossings; samples landing exactly on the level are roots
    // themselves (a run of consecutive zeros counts once)
    int roots = 0;
    double exact_root = 0.0;
    bool have_exact = false;
    double bra = a, brb = b;
    int prev_nonzero = 0;
    bool in_zero_run = false;
    for (int i = 0; i <= kScan; ++i) {
        double x = a + i * step;
        int s = sign_at(x);
        if (s == 0) {
            if (!in_zero_run) {
                ++roots;
                exact_root = x;
                have_exact = true;
                in_zero_run = true;
            }
            continue;
        }
        if (prev_nonzero != 0 && s != prev_nonzero && !in_zero_run) {
            ++roots;
            bra = x - step;
            brb = x;
        }
        prev_nonzero = s;
        in_zero_run = false;
    }
    if (roots == 0)
        throw std::domain_error("invert_for_voltage: target temperature not "
                                "reached on the valid interval");
    if (roots > 1)
        throw std::invalid_argument("invert_for_voltage: interval is not monotone "
                                    "at this level (multiple roots)");
    if (have_exact) return exact_root;

    double fa = m.evaluate(bra) - target_c;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (bra + brb);
        double fm = m.evaluate(mid) - target_c;
        if (std::abs(fm) <= 0.01 || 0.5 * (brb - bra) < 1e-12)
            return mid;
        if ((fm > 0) == (fa > 0)) {
            bra = mid;
            fa = fm;
        } else {
            brb = mid;
        }
    }
    return 0.5 * (bra + brb);
}

/// Noise-free or noisy samples drawn from a model; for demos and tests only,
/// never a stand-in for measured data.
inline std::vector<CalibrationSample> synthesize_samples(const CalibrationModel& m,
                                                         int count, double noise_std = 0.0,
                                                         std::uint64_t seed = 42) {
    if (count < 2) throw std::invalid_argument("synthesize_samples: count must be >= 2");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_std > 0 ? noise_std : 1.0);
    std::vector<CalibrationSample> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        double x = m.valid_lo + (m.valid_hi - m.valid_lo) * i / (count - 1);
        double y = m.evaluate(x);
        if (noise_std > 0) y += noise(rng);
        out.push_back({x, y});
    }
    return out;
}

// ============================================================================
// Serialization
// ============================================================================

inline void save_model(const CalibrationModel& m, std::ostream& os,
                       const std::string& provenance_line = "") {
    if (!provenance_line.empty()) os << provenance_line << '\n';
    char buf[64];
    os << "degree = " << m.degree() << '\n';
    os << "input_unit = " << to_string(m.input_unit) << '\n';
    os << "output_unit = celsius\n";
    std::snprintf(buf, sizeof buf, "%.17g", m.valid_lo);
    os << "valid_lo = " << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", m.valid_hi);
    os << "valid_hi = " << buf << '\n';
    for (std::size_t i = 0; i < m.coefficients.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", m.coefficients[i]);
        os << 'c' << i << " = " << buf << '\n';
    }
}

inline CalibrationModel load_model(std::istream& is) {
    CalibrationModel m;
    int degree = -1;
    std::string line;
    std::vector<std::pair<int, double>> coefs;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("calibration model: malformed line '" + line + "'");
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
            return s;
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "degree") degree = std::stoi(val);
        else if (key == "input_unit")
            m.input_unit = val == "kilo_ohm" ? InputUnit::kilo_ohm : InputUnit::volt;
        else if (key == "output_unit") { /* celsius only */ }
        else if (key == "valid_lo") m.valid_lo = std::stod(val);
        else if (key == "valid_hi") m.valid_hi = std::stod(val);
        else if (key.size() > 1 && key[0] == 'c')
            coefs.emplace_back(std::stoi(key.substr(1)), std::stod(val));
        else
            throw config_error("calibration model: unknown key '" + key + "'");
    }
    if (degree < 0) throw config_error("calibration model: missing degree");
    m.coefficients.assign(degree + 1, 0.0);
    for (auto [i, v] : coefs) {
        if (i < 0 || i > degree) throw config_error("calibration model: stray coefficient");
        m.coefficients[i] = v;
    }
    return m;
}

// ============================================================================
// Sample CSV I/O (input,output header)
// ============================================================================

inline std::vector<CalibrationSample> read_samples_csv(std::istream& is) {
    std::vector<CalibrationSample> out;
    std::string line;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {  // first non-comment line is the header
            header_seen = true;
            continue;
        }
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw config_error("samples CSV line " + std::to_string(lineno) +
                               ": expected 'input,output'");
        try {
            out.push_back({std::stod(a), std::stod(b)});
        } catch (const std::exception&) {
            throw config_error("samples CSV line " + std::to_string(lineno) +
                               ": non-numeric value");
        }
    }
    return out;
}

inline void write_samples_csv(std::span<const CalibrationSample> samples,
                              std::ostream& os, const std::string& provenance_line = "") {
    if (!provenance_line.empty()) os << provenance_line << '\n';
    os << "input,output\n";
    char buf[80];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.input, s.output);
        os << buf;
    }
}

}  // namespace hotplate
