#include "etrap/cooling.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace etrap {

using constants::hbar;
using constants::k_B;

double bose_einstein(double omega, double temperature) {
    if (omega <= 0)
        throw contract_violation("bose_einstein: omega must be > 0");
    if (temperature < 0)
        throw contract_violation("bose_einstein: temperature must be >= 0");
    if (temperature == 0.0) return 0.0;
    const double x = hbar * omega / (k_B * temperature);
    return 1.0 / std::expm1(x);
}

double cavity_cooling_equilibrium(double gamma_c, const ThermalEnv& env, double omega) {
    env.validate();
    if (gamma_c <= 0)
        throw divergence_error("cavity_cooling_equilibrium: gamma_c must be > 0");
    return (gamma_c * bose_einstein(omega, env.temperature) + env.lambda_heat) / gamma_c;
}

void CoolingProtocolParams::validate() const {
    if (rabi_gf <= 0 || rabi_ef <= 0 || rabi_ge <= 0)
        throw contract_violation("CoolingProtocolParams: Rabi frequencies must be > 0");
    if (t_meas < 0)
        throw contract_violation("CoolingProtocolParams: t_meas must be >= 0");
    if (pulse_error < 0 || pulse_error >= 1 || readout_error < 0 || readout_error >= 1)
        throw contract_violation("CoolingProtocolParams: errors must lie in [0,1)");
    if (n_cavity_max < 1)
        throw contract_violation("CoolingProtocolParams: n_cavity_max must be >= 1");
    env.validate();
}

PopulationState PopulationState::ground(int n_max) {
    PopulationState s;
    s.p = Eigen::MatrixXd::Zero(3, n_max + 1);
    s.p(0, 0) = 1.0;
    return s;
}

PopulationState PopulationState::thermal(int n_max, double nbar) {
    PopulationState s;
    s.p = Eigen::MatrixXd::Zero(3, n_max + 1);
    if (nbar <= 0) {
        s.p(0, 0) = 1.0;
        return s;
    }
    const double r = nbar / (nbar + 1.0);
    double w = 1.0 / (nbar + 1.0);
    for (int n = 0; n <= n_max; ++n) {
        s.p(0, n) = w;
        w *= r;
    }
    s.normalize();
    return s;
}

double PopulationState::mean_n() const {
    double m = 0.0;
    for (int n = 0; n < p.cols(); ++n)
        m += n * (p(0, n) + p(1, n) + p(2, n));
    return m;
}

void PopulationState::normalize() {
    p = p.cwiseMax(0.0);
    double t = p.sum();
    if (t <= 0)
        throw contract_violation("PopulationState: vanishing total probability");
    p /= t;
}

void PopulationState::require_normalized() const {
    if (p.minCoeff() < -1e-12)
        throw contract_violation("PopulationState: negative probability");
    if (std::abs(p.sum() - 1.0) > 1e-9)
        throw contract_violation("PopulationState: probabilities must sum to 1 within 1e-9");
}

namespace {

constexpr int LVL_G = 0;
constexpr int LVL_E = 1;
constexpr int LVL_F = 2;

// Classical mixture of a pi pulse succeeding with probability q:
// populations at the two connected labels swap with weight q.
void mix_swap(double& a, double& b, double q) {
    const double na = (1.0 - q) * a + q * b;
    const double nb = (1.0 - q) * b + q * a;
    a = na;
    b = nb;
}

// Detailed-balance rate matrix of a damped thermal mode plus an anomalous
// heating term, acting on a Fock-ladder population column.
Eigen::MatrixXd refill_generator(int n_levels, double gamma, double nbar, double lambda) {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n_levels, n_levels);
    auto add_rate = [&Q](int from, int to, double rate) {
        Q(to, from) += rate;
        Q(from, from) -= rate;
    };
    for (int n = 0; n < n_levels; ++n) {
        if (n + 1 < n_levels) {
            add_rate(n, n + 1, gamma * nbar * (n + 1) + lambda * (n + 1));
        }
        if (n > 0) {
            add_rate(n, n - 1, gamma * (nbar + 1.0) * n + lambda * n);
        }
    }
    return Q;
}

} // namespace

void thermal_refill(Eigen::MatrixXd& p, const ThermalEnv& env, double omega, double t) {
    if (t <= 0) return;
    if (env.gamma_th <= 0 && env.lambda_heat <= 0) return;
    const int n_levels = static_cast<int>(p.cols());
    const double nbar = bose_einstein(omega, env.temperature);
    Eigen::MatrixXd Q =
        refill_generator(n_levels, env.gamma_th, nbar, env.lambda_heat);

    double max_rate = 0.0;
    for (int n = 0; n < n_levels; ++n) max_rate = std::max(max_rate, -Q(n, n));
    int steps = std::max(1, static_cast<int>(std::ceil(t * max_rate / 0.05)));
    const double dt = t / steps;

    // RK4 on dp/dt = Q p, one qubit row at a time.
    for (int row = 0; row < p.rows(); ++row) {
        Eigen::VectorXd v = p.row(row).transpose();
        for (int s = 0; s < steps; ++s) {
            Eigen::VectorXd k1 = Q * v;
            Eigen::VectorXd k2 = Q * (v + 0.5 * dt * k1);
            Eigen::VectorXd k3 = Q * (v + 0.5 * dt * k2);
            Eigen::VectorXd k4 = Q * (v + dt * k3);
            v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        p.row(row) = v.transpose();
    }
}

std::vector<PopulationState> run_cooling_protocol(const CoolingProtocolParams& params,
                                                  const PopulationState& init,
                                                  int n_cycles) {
    params.validate();
    init.require_normalized();
    if (n_cycles < 0)
        throw contract_violation("run_cooling_protocol: n_cycles must be >= 0");

    const int n_max = static_cast<int>(init.p.cols()) - 1;
    const double q_pulse = 1.0 - params.pulse_error;
    const double t_cycle = params.cycle_time();

    std::vector<PopulationState> traj;
    traj.reserve(n_cycles + 1);
    traj.push_back(init);

    PopulationState st = init;
    for (int cyc = 0; cyc < n_cycles; ++cyc) {
        Eigen::MatrixXd& p = st.p;

        // (i) |g,n> <-> |f,n-1> transfer
        if (params.ladder_approx) {
            for (int n = n_max; n >= 1; --n)
                mix_swap(p(LVL_G, n), p(LVL_F, n - 1), q_pulse);
        } else {
            mix_swap(p(LVL_G, 1), p(LVL_F, 0), q_pulse);
        }

        // (ii) |f,n> <-> |e,n>
        for (int n = 0; n <= n_max; ++n)
            mix_swap(p(LVL_F, n), p(LVL_E, n), q_pulse);

        // (iii) qubit readout, outcome "e" triggers the e<->g reset pulse.
        // Split each column into the reported-e and reported-not-e branches,
        // apply the conditional swap in the first, then recombine.
        const double ro = params.readout_error;
        for (int n = 0; n <= n_max; ++n) {
            double ge = ro * p(LVL_G, n);        // g misread as e
            double gn = p(LVL_G, n) - ge;
            double ee = (1.0 - ro) * p(LVL_E, n);
            double en = p(LVL_E, n) - ee;
            mix_swap(ee, ge, q_pulse);
            p(LVL_G, n) = gn + ge;
            p(LVL_E, n) = en + ee;
        }

        // (iv) thermal refill over the cycle duration
        if (params.refill)
            thermal_refill(p, params.env, params.omega_cavity, t_cycle);

        st.time += t_cycle;
        if (std::abs(st.total() - 1.0) > 1e-9)
            throw contract_violation("run_cooling_protocol: probability leak in cycle");
        st.normalize();
        traj.push_back(st);
    }
    return traj;
}

void write_trajectory_csv(std::ostream& os, const std::vector<PopulationState>& traj) {
    os << "cycle,time_s,mean_n_cavity,p_g0,purity_proxy\n";
    char buf[160];
    for (size_t k = 0; k < traj.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%.12g,%.12g\n", k, traj[k].time,
                      traj[k].mean_n(), traj[k].p_g0(), traj[k].purity_proxy());
        os << buf;
    }
}

SympatheticResult sympathetic_steady_state(const SympatheticParams& p) {
    if (p.g < 0 || p.gamma_i < 0 || p.gamma_th_e < 0 || p.n_th < 0)
        throw contract_violation("sympathetic_steady_state: rates must be >= 0");
    if (p.gamma_i == 0)
        throw divergence_error("sympathetic_steady_state: Gamma_i = 0");

    SympatheticResult r;
    r.gamma_down = 4.0 * p.g * p.g / p.gamma_i;
    r.gamma_th_prime = p.gamma_th_e + p.gamma_i;
    r.n_e_steady = p.n_th * r.gamma_th_prime / (r.gamma_down + r.gamma_th_prime);
    r.weak_coupling_valid = p.gamma_i > p.g;
    return r;
}

} // namespace etrap
