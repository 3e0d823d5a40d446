#include "etrap/hamiltonians.hpp"

#include <cmath>

namespace etrap {

using constants::hbar;

void CircuitParams::validate() const {
    if (omega_e <= 0 || omega_mw <= 0 || omega_q <= 0)
        throw contract_violation("CircuitParams: all mode frequencies must be > 0");
    if (g_ec < 0 || g_sc < 0)
        throw contract_violation("CircuitParams: couplings must be >= 0");
}

void ElectronIonParams::validate() const {
    if (L <= 0)
        throw contract_violation("ElectronIonParams: separation L must be > 0");
    if (omega_e <= 0 || omega_i <= 0)
        throw contract_violation("ElectronIonParams: secular frequencies must be > 0");
    if (omega_e == omega_i)
        throw contract_violation("ElectronIonParams: omega_e must differ from omega_i");
    if (x_zpf() >= L / 10.0 || y_zpf() >= L / 10.0)
        throw contract_violation(
            "ElectronIonParams: zero-point spread too large for the |x-y| << L expansion");
}

void ThermalEnv::validate() const {
    if (temperature < 0)
        throw contract_violation("ThermalEnv: temperature must be >= 0");
    if (gamma_th < 0 || lambda_heat < 0)
        throw contract_violation("ThermalEnv: rates must be >= 0");
}

namespace {

void require_truncation(int n, const char* who) {
    if (n < 2)
        throw invalid_dimension_error(std::string(who) + ": Fock truncation must be >= 2");
}

} // namespace

HilbertOp build_H_ec(const CircuitParams& p, int n_fock_e, int n_fock_mw) {
    p.validate();
    require_truncation(n_fock_e, "build_H_ec");
    require_truncation(n_fock_mw, "build_H_ec");

    std::vector<int> dims{n_fock_e, n_fock_mw};
    auto [a, adag] = ladder(n_fock_e);
    auto [b, bdag] = ladder(n_fock_mw);

    HilbertOp A = embed(a, 0, dims);
    HilbertOp Ad = embed(adag, 0, dims);
    HilbertOp B = embed(b, 1, dims);
    HilbertOp Bd = embed(bdag, 1, dims);

    Eigen::MatrixXcd H = hbar * p.omega_e * (Ad.mat * A.mat)
                       + hbar * p.omega_mw * (Bd.mat * B.mat)
                       + hbar * p.g_ec * (Ad.mat * B.mat + A.mat * Bd.mat);
    return HilbertOp(dims, std::move(H));
}

HilbertOp build_H_read(const CircuitParams& p, int n_fock_e, int n_fock_mw) {
    p.validate();
    require_truncation(n_fock_e, "build_H_read");
    require_truncation(n_fock_mw, "build_H_read");

    std::vector<int> dims{n_fock_e, n_fock_mw, 2};
    auto [a, adag] = ladder(n_fock_e);
    auto [b, bdag] = ladder(n_fock_mw);

    HilbertOp A = embed(a, 0, dims);
    HilbertOp Ad = embed(adag, 0, dims);
    HilbertOp B = embed(b, 1, dims);
    HilbertOp Bd = embed(bdag, 1, dims);
    HilbertOp Sz = embed(sigma_z(), 2, dims);
    HilbertOp Sp = embed(sigma_plus(), 2, dims);
    HilbertOp Sm = embed(sigma_minus(), 2, dims);

    Eigen::MatrixXcd H = hbar * p.omega_e * (Ad.mat * A.mat)
                       + hbar * p.g_ec * (Ad.mat * B.mat + A.mat * Bd.mat)
                       + hbar * p.omega_mw * (Bd.mat * B.mat)
                       + 0.5 * hbar * p.omega_q * Sz.mat
                       + hbar * p.g_sc * (Bd.mat * Sm.mat + B.mat * Sp.mat);
    return HilbertOp(dims, std::move(H));
}

HilbertOp excitation_number_read(int n_fock_e, int n_fock_mw) {
    std::vector<int> dims{n_fock_e, n_fock_mw, 2};
    HilbertOp Na = embed(number_op(n_fock_e), 0, dims);
    HilbertOp Nb = embed(number_op(n_fock_mw), 1, dims);
    HilbertOp Nq = embed(sigma_plus() * sigma_minus(), 2, dims);
    return Na + Nb + Nq;
}

HilbertOp build_H_electron_ion(const ElectronIonParams& p, double g0, double alpha,
                               int n_e, int n_i) {
    p.validate();
    require_truncation(n_e, "build_H_electron_ion");
    require_truncation(n_i, "build_H_electron_ion");

    std::vector<int> dims{n_e, n_i};
    auto [a, adag] = ladder(n_e);
    auto [c, cdag] = ladder(n_i);

    HilbertOp A = embed(a, 0, dims);
    HilbertOp Ad = embed(adag, 0, dims);
    HilbertOp C = embed(c, 1, dims);
    HilbertOp Cd = embed(cdag, 1, dims);

    Eigen::MatrixXcd Na = Ad.mat * A.mat;
    Eigen::MatrixXcd H = hbar * p.omega_e * Na
                       + hbar * p.omega_i * (Cd.mat * C.mat)
                       - hbar * g0 * Na * (Cd.mat + C.mat)
                       - 0.5 * hbar * alpha * (Ad.mat * Ad.mat * A.mat * A.mat);
    return HilbertOp(dims, std::move(H));
}

std::vector<std::string> product_basis_labels(const std::vector<int>& dims) {
    int n = 1;
    for (int d : dims) n *= d;
    std::vector<std::string> labels(n);
    for (int idx = 0; idx < n; ++idx) {
        int rem = idx;
        std::vector<int> ks(dims.size());
        for (int s = static_cast<int>(dims.size()) - 1; s >= 0; --s) {
            ks[s] = rem % dims[s];
            rem /= dims[s];
        }
        std::string lab = "|";
        for (size_t s = 0; s < ks.size(); ++s) {
            lab += std::to_string(ks[s]);
            lab += (s + 1 < ks.size()) ? "," : ">";
        }
        labels[idx] = lab;
    }
    return labels;
}

double photoionization_excess_energy(double lambda_laser) {
    if (lambda_laser <= 0)
        throw contract_violation("photoionization_excess_energy: wavelength must be > 0");
    constexpr double lambda_th = 389.81e-9; // m, threshold from the 1P1 state
    const double hc = constants::h_planck * constants::c_light;
    return hc / lambda_laser - hc / lambda_th;
}

} // namespace etrap
