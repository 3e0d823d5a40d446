#ifndef ETRAP_SPECTRA_HPP
#define ETRAP_SPECTRA_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "etrap/errors.hpp"

namespace etrap {

/// Two-port transmission trace: frequency samples (Hz, strictly increasing)
/// and power magnitude |S21|^2, linear or dB (10 log10), flagged.
struct SpectrumTrace {
    std::vector<double> f;
    std::vector<double> s;
    bool is_db = false;

    void validate() const;
    SpectrumTrace to_linear() const;
};

/// Trace CSV: header flag line `# units=db|linear`, then `freq_hz, mag` rows.
SpectrumTrace read_trace_csv(std::istream& is);
SpectrumTrace read_trace_csv(const std::string& path);

struct LorentzianSeed {
    double f0;
    double kappa;
    double peak;
    double baseline;
};

/// Fitted resonance with the symmetric two-port Q split
/// (on-resonance transmission amplitude = kappa_ext / kappa_tot):
/// 1/Q_tot = 1/Q_int + 1/Q_ext holds by construction.
struct LorentzianFit {
    double f0;           // Hz
    double kappa_tot;    // Hz, FWHM
    double q_tot;
    double q_int;
    double q_ext;
    double amplitude;    // peak power above baseline
    double baseline;
    double residual_rms;
    double stderr_f0;    // covariance diagnostics
    double stderr_kappa;
    int iterations;
    bool span_warning;     // trace narrower than 3 linewidths
    bool boundary_warning; // peak within a linewidth of the trace edge
};

/// Least-squares fit of B + P (k/2)^2 / ((f-f0)^2 + (k/2)^2) by damped
/// Gauss-Newton with the analytic Jacobian; converged when the relative
/// parameter step drops below 1e-8, capped at 200 iterations. Flat or
/// peak-free traces raise fit_error instead of returning a fabricated fit.
LorentzianFit fit_lorentzian(const SpectrumTrace& trace,
                             std::optional<LorentzianSeed> seed = std::nullopt);

/// Fit output JSON record: f0_hz, q_tot, q_int, q_ext, kappa_hz, residual_rms.
void write_fit_json(std::ostream& os, const LorentzianFit& fit);

struct ModePeak {
    double freq;       // Hz
    double height;
    double prominence;
    int harmonic_index; // n in (2n+1) lambda/4 against the base frequency
};

/// Local maxima above `threshold`, ordered by decreasing prominence. Each
/// peak carries a nearest-ratio harmonic guess n for (2n+1) lambda/4 modes;
/// the base frequency defaults to the lowest-frequency peak found.
std::vector<ModePeak> find_modes(const SpectrumTrace& trace, double threshold,
                                 std::optional<double> base_frequency = std::nullopt);

} // namespace etrap

#endif
