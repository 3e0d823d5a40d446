#ifndef ETRAP_COOLING_HPP
#define ETRAP_COOLING_HPP

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "etrap/hamiltonians.hpp"

namespace etrap {

/// Bose-Einstein occupation 1/(exp(hbar w / k T) - 1); 0 at T = 0.
double bose_einstein(double omega, double temperature);

/// Equilibrium occupation of a mode cooled at rate gamma_c against a thermal
/// bath and an anomalous heating rate:
/// (gamma_c * n_BE(omega, T) + lambda_heat) / gamma_c.
double cavity_cooling_equilibrium(double gamma_c, const ThermalEnv& env, double omega);

/// Pulse and measurement parameters of the measurement-based reset cycle.
/// Rabi frequencies in rad/s; one cycle is swap |g,n>-|f,n-1>, swap
/// |f,n>-|e,n>, qubit readout with conditional reset, thermal refill.
struct CoolingProtocolParams {
    double rabi_gf = constants::twopi * 4e6;
    double rabi_ef = constants::twopi * 4e6;
    double rabi_ge = constants::twopi * 10e6;
    double t_meas = 1e-6;       // s
    double pulse_error = 0.01;  // per pi pulse
    double readout_error = 0.01;
    int n_cavity_max = 60;
    bool ladder_approx = true;  // extend the g-f pulse to all n >= 1
    bool refill = true;
    double omega_cavity = constants::twopi * 1e9; // rad/s, refill target mode
    ThermalEnv env;             // refill environment

    double cycle_time() const {
        return constants::pi / rabi_gf + constants::pi / rabi_ef + t_meas +
               constants::pi / rabi_ge;
    }
    void validate() const;
};

/// Diagonal populations p(qubit level, cavity Fock number). Rows are the
/// qubit levels g, e, f; columns the Fock ladder 0..n_max.
struct PopulationState {
    Eigen::MatrixXd p; // 3 x (n_max + 1)
    double time = 0.0;

    static PopulationState ground(int n_max);
    /// Thermal distribution with mean nbar in the qubit ground level.
    static PopulationState thermal(int n_max, double nbar);

    double total() const { return p.sum(); }
    double mean_n() const;
    double p_g0() const { return p(0, 0); }
    double purity_proxy() const { return p.array().square().sum(); }
    void normalize();
    void require_normalized() const;
};

/// Runs n_cycles of the reset protocol. Returns the trajectory including the
/// initial state (length n_cycles + 1). Probability is conserved to 1e-9 per
/// substep and each recorded state is renormalized.
std::vector<PopulationState> run_cooling_protocol(const CoolingProtocolParams& p,
                                                  const PopulationState& init,
                                                  int n_cycles);

/// Relax populations toward the Bose-Einstein distribution of (omega, env.T)
/// at rate env.gamma_th, plus anomalous heating env.lambda_heat, for time t.
/// Exposed for the detailed-balance checks.
void thermal_refill(Eigen::MatrixXd& p, const ThermalEnv& env, double omega, double t);

/// Trajectory CSV: cycle, time_s, mean_n_cavity, p_g0, purity_proxy.
void write_trajectory_csv(std::ostream& os, const std::vector<PopulationState>& traj);

/// Linearized sideband-cooling inputs: g = g0 sqrt(n_d), ion cooling rate
/// Gamma_i, electron bath rate, and bath occupation.
struct SympatheticParams {
    double g;          // rad/s
    double gamma_i;    // 1/s
    double gamma_th_e; // 1/s
    double n_th;       // bath occupation of the electron mode
};

struct SympatheticResult {
    double n_e_steady;
    double gamma_down;     // 4 g^2 / Gamma_i
    double gamma_th_prime; // gamma_th_e + gamma_i
    bool weak_coupling_valid; // Gamma_i > g, the regime the formula assumes
};

/// Steady state n_th * G' / (G_down + G'), with the Gamma_i > g validity
/// flag attached rather than enforced. Throws divergence_error at Gamma_i = 0.
SympatheticResult sympathetic_steady_state(const SympatheticParams& p);

} // namespace etrap

#endif
