#ifndef ETRAP_DISPERSIVE_HPP
#define ETRAP_DISPERSIVE_HPP

#include <iosfwd>
#include <vector>

#include "etrap/hamiltonians.hpp"

namespace etrap {

enum class ZetaRegime { dispersive, near_resonant };

/// One evaluation of the phonon-qubit dispersive coupling at a given
/// phonon frequency. zeta_numeric is flagged, never silently dropped,
/// when the extraction sits too close to a phonon-cavity resonance.
struct ZetaPoint {
    double omega_e = 0.0;        // rad/s
    double zeta_analytic = 0.0;  // rad/s, closed form (NaN on a pole)
    double zeta_approx = 0.0;    // rad/s, -g_ec^2/delta (NaN at delta = 0)
    double zeta_numeric = 0.0;   // rad/s, from diagonalization
    ZetaRegime regime = ZetaRegime::dispersive;
    bool ambiguous_assignment = false;
    bool converged = true;       // +2 Fock-truncation check passed
};

/// Noise floor and minimum detectable phonon number of the electrical
/// readout chain.
struct ReadoutBudget {
    double noise_w_per_hz;   // k_B T_N
    double noise_dbm_per_hz; // 10 log10(noise / 1 mW)
    double noise_temperature; // K
    double emission_rate;    // 1/s, cavity-enhanced 4 g_ec^2 / kappa
    double extraction_eff;   // kappa_ext / kappa
    double n_min;            // phonons at unity SNR
};

/// Closed form 2 g_ec^2 g_sc^2 D_sc / (g_sc^4 - D_ec^2 D_sc^2).
/// Throws singularity_error on (or numerically at) either pole
/// D_ec = +- g_sc^2 / |D_sc|, naming both pole frequencies.
double zeta_analytic(const CircuitParams& p);

/// -g_ec^2 / delta, valid for |delta| >> g_ec. Throws at delta = 0.
double zeta_approx(const CircuitParams& p);

/// Phonon-number splitting of the qubit transition extracted from the full
/// diagonalization: [E(e,1) - E(e,0) - E(g,1) + E(g,0)] / hbar, with E(s,n)
/// the dressed-state energy assigned to bare |n phonons, 0 photons, qubit s>.
/// Runs the same extraction at n_fock + 2 and clears `converged` when the
/// value moves by 1% or more. `energy_offset` (J) adds a multiple of the
/// identity before extraction; the result must not depend on it.
ZetaPoint zeta_numeric(const CircuitParams& p, int n_fock, double energy_offset = 0.0);

/// All three estimates over a strictly increasing phonon-frequency grid.
std::vector<ZetaPoint> zeta_sweep(const CircuitParams& p,
                                  const std::vector<double>& omega_e_grid,
                                  int n_fock = 6);

/// CSV emission: omega_e_hz, zeta_analytic_hz, zeta_approx_hz,
/// zeta_numeric_hz, regime (values divided by 2 pi).
void write_zeta_csv(std::ostream& os, const CircuitParams& p,
                    const std::vector<ZetaPoint>& points);

/// Dressed phonon frequency pull [E(1 phonon) - E(0)]/hbar - omega_e of the
/// plain two-mode problem; far detuned this approaches -g_ec^2 / Delta_ec.
double phonon_shift_numeric(const CircuitParams& p, int n_fock);

/// Link budget of the electrical readout: rates in 1/s (angular linewidths),
/// T_N in kelvin.
ReadoutBudget readout_budget(double omega_mw, double g_ec, double kappa_int,
                             double kappa_ext, double noise_temperature);

} // namespace etrap

#endif
