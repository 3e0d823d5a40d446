#ifndef ETRAP_HAMILTONIANS_HPP
#define ETRAP_HAMILTONIANS_HPP

#include "etrap/constants.hpp"
#include "etrap/qcore.hpp"

namespace etrap {

/// Frequencies and couplings of the electron--cavity--transmon system.
/// All values in rad/s.
struct CircuitParams {
    double omega_e;  // electron phonon
    double omega_mw; // readout cavity
    double omega_q;  // transmon
    double g_ec;     // phonon-cavity coupling
    double g_sc;     // qubit-cavity coupling

    double delta_sc() const { return omega_mw - omega_q; }
    double delta_ec() const { return omega_mw - omega_e; }
    double chi() const { return g_sc * g_sc / delta_sc(); }
    double delta() const { return delta_ec() - chi(); }

    bool dispersive_regime() const { return std::abs(delta_sc()) >= 10.0 * g_sc; }

    void validate() const;
};

/// Masses, secular frequencies and geometry of the electron-ion pair.
/// beta and alpha_k are trap-nonlinearity inputs (rad/s); they default to
/// zero because no published values exist for them.
struct ElectronIonParams {
    double omega_e;                    // rad/s
    double omega_i;                    // rad/s
    double m_electron = constants::m_e; // kg
    double m_ion = constants::m_be9;    // kg
    double L;                          // m, trap-center separation
    double beta = 0.0;                 // rad/s, second-order trap nonlinearity
    double alpha_k = 0.0;              // rad/s, third-order trap nonlinearity

    double x_zpf() const { return std::sqrt(constants::hbar / (2.0 * m_electron * omega_e)); }
    double y_zpf() const { return std::sqrt(constants::hbar / (2.0 * m_ion * omega_i)); }

    void validate() const;
};

/// Thermal environment of a mode: temperature, bath coupling rate and an
/// anomalous heating rate in quanta per second.
struct ThermalEnv {
    double temperature = 0.0;  // K
    double gamma_th = 0.0;     // 1/s
    double lambda_heat = 0.0;  // quanta/s

    void validate() const;
};

/// hbar w_e a'a + hbar w_MW b'b + hbar g_ec (a'b + a b') on dims [n_e, n_mw].
HilbertOp build_H_ec(const CircuitParams& p, int n_fock_e, int n_fock_mw);

/// Readout Hamiltonian on dims [n_e, n_mw, 2]: the phonon-cavity part plus
/// hbar w_MW b'b + (hbar w_q / 2) s_z + hbar g_sc (b' s- + b s+).
/// Conserves the total excitation number (rotating-wave form).
HilbertOp build_H_read(const CircuitParams& p, int n_fock_e, int n_fock_mw);

/// Total excitation number a'a + b'b + s+s- on the build_H_read layout.
HilbertOp excitation_number_read(int n_fock_e, int n_fock_mw);

/// hbar w_e a'a + hbar w_i c'c - hbar g0 a'a (c' + c) - (hbar alpha / 2) a'a'aa
/// on dims [n_e, n_i]. Commutes with the electron phonon number.
HilbertOp build_H_electron_ion(const ElectronIonParams& p, double g0, double alpha,
                               int n_e, int n_i);

/// Product-basis labels for a dims list, e.g. "|2,0,1>"; factor 0 slowest.
std::vector<std::string> product_basis_labels(const std::vector<int>& dims);

/// Excess energy hc/lambda - hc/lambda_th of a photoelectron released by a
/// photon of wavelength lambda_laser (m), with the ionization threshold at
/// 389.81 nm. Negative below threshold. Returned in J.
double photoionization_excess_energy(double lambda_laser);

inline double joules_to_mev(double e_joule) {
    return e_joule / constants::e_charge * 1e3;
}

} // namespace etrap

#endif
