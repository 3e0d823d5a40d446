#include "etrap/dispersive.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace etrap {

using constants::hbar;
using constants::twopi;

double zeta_analytic(const CircuitParams& p) {
    p.validate();
    const double dsc = p.delta_sc();
    const double dec = p.delta_ec();
    const double g4 = std::pow(p.g_sc, 4);
    const double denom = g4 - dec * dec * dsc * dsc;
    const double scale = std::max(g4, dec * dec * dsc * dsc);
    if (scale == 0.0 || std::abs(denom) <= 1e-9 * scale) {
        const double pole = p.g_sc * p.g_sc / std::abs(dsc);
        const double f1 = (p.omega_mw - pole) / twopi;
        const double f2 = (p.omega_mw + pole) / twopi;
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "zeta_analytic: on a pole; poles sit at omega_e/2pi = %.6g Hz and %.6g Hz",
                      f1, f2);
        throw singularity_error(msg);
    }
    return 2.0 * p.g_ec * p.g_ec * p.g_sc * p.g_sc * dsc / denom;
}

double zeta_approx(const CircuitParams& p) {
    p.validate();
    const double d = p.delta();
    if (d == 0.0)
        throw singularity_error("zeta_approx: delta = 0");
    return -p.g_ec * p.g_ec / d;
}

namespace {

// Distance of the phonon from the two qubit-state-dependent cavity
// resonances. delta itself measures one of them; the other sits 2 chi away.
bool near_either_resonance(const CircuitParams& p, double margin) {
    const double d1 = p.delta();
    const double d2 = p.delta() + 2.0 * p.chi();
    return std::abs(d1) < margin || std::abs(d2) < margin;
}

struct ZetaExtraction {
    double zeta;
    bool ambiguous;
};

// Index of bare |n_e, n_mw, qubit> in the [n, n, 2] product basis.
int bare_index(int n_e, int n_mw, int qubit, int n_fock) {
    return (n_e * n_fock + n_mw) * 2 + qubit;
}

ZetaExtraction extract_zeta(const CircuitParams& p, int n_fock, double offset) {
    HilbertOp H = build_H_read(p, n_fock, n_fock);
    const int n = H.total_dim();
    if (offset != 0.0) H.mat += offset * Eigen::MatrixXcd::Identity(n, n);
    // Center the spectrum; keeps the extraction invariant under a global
    // energy offset and improves the conditioning of the tiny differences.
    const std::complex<double> mean = H.mat.trace() / static_cast<double>(n);
    H.mat -= mean * Eigen::MatrixXcd::Identity(n, n);

    EigenResult r = eig_hermitian(H, product_basis_labels(H.dims));

    const int ig0 = bare_index(0, 0, 0, n_fock);
    const int ig1 = bare_index(1, 0, 0, n_fock);
    const int ie0 = bare_index(0, 0, 1, n_fock);
    const int ie1 = bare_index(1, 0, 1, n_fock);

    bool ambiguous = false;
    const double thresh = 1.0 / std::sqrt(2.0);
    double E[4];
    const int bare[4] = {ig0, ig1, ie0, ie1};
    for (int k = 0; k < 4; ++k) {
        if (r.overlaps[bare[k]] < thresh) ambiguous = true;
        E[k] = r.eigenvalues(r.assignments[bare[k]]);
    }
    // E[0]=g0, E[1]=g1, E[2]=e0, E[3]=e1
    const double zeta = ((E[3] - E[2]) - (E[1] - E[0])) / hbar;
    return {zeta, ambiguous};
}

} // namespace

ZetaPoint zeta_numeric(const CircuitParams& p, int n_fock, double energy_offset) {
    p.validate();
    if (n_fock < 4)
        throw invalid_dimension_error("zeta_numeric: n_fock must be >= 4");

    ZetaExtraction z1 = extract_zeta(p, n_fock, energy_offset);
    ZetaExtraction z2 = extract_zeta(p, n_fock + 2, energy_offset);

    ZetaPoint pt;
    pt.omega_e = p.omega_e;
    pt.zeta_numeric = z1.zeta;
    pt.ambiguous_assignment = z1.ambiguous || z2.ambiguous;

    const double floor = 1e-3 * std::max(p.g_ec, 1e-30);
    const double change = std::abs(z2.zeta - z1.zeta);
    pt.converged = change < 0.01 * std::max(std::abs(z2.zeta), floor);

    pt.regime = (pt.ambiguous_assignment || near_either_resonance(p, 3.0 * p.g_ec))
                    ? ZetaRegime::near_resonant
                    : ZetaRegime::dispersive;
    return pt;
}

std::vector<ZetaPoint> zeta_sweep(const CircuitParams& p,
                                  const std::vector<double>& omega_e_grid,
                                  int n_fock) {
    for (size_t i = 1; i < omega_e_grid.size(); ++i)
        if (omega_e_grid[i] <= omega_e_grid[i - 1])
            throw contract_violation("zeta_sweep: grid must be strictly increasing");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<ZetaPoint> out;
    out.reserve(omega_e_grid.size());
    for (double w : omega_e_grid) {
        CircuitParams q = p;
        q.omega_e = w;
        ZetaPoint pt = zeta_numeric(q, n_fock);
        try {
            pt.zeta_analytic = zeta_analytic(q);
        } catch (const singularity_error&) {
            pt.zeta_analytic = nan;
            pt.regime = ZetaRegime::near_resonant;
        }
        try {
            pt.zeta_approx = zeta_approx(q);
        } catch (const singularity_error&) {
            pt.zeta_approx = nan;
            pt.regime = ZetaRegime::near_resonant;
        }
        out.push_back(pt);
    }
    return out;
}

void write_zeta_csv(std::ostream& os, const CircuitParams& p,
                    const std::vector<ZetaPoint>& points) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "# omega_mw_hz=%.12g omega_q_hz=%.12g g_ec_hz=%.12g g_sc_hz=%.12g\n",
                  p.omega_mw / twopi, p.omega_q / twopi, p.g_ec / twopi, p.g_sc / twopi);
    os << buf;
    os << "omega_e_hz,zeta_analytic_hz,zeta_approx_hz,zeta_numeric_hz,regime\n";
    for (const auto& pt : points) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%s\n",
                      pt.omega_e / twopi, pt.zeta_analytic / twopi,
                      pt.zeta_approx / twopi, pt.zeta_numeric / twopi,
                      pt.regime == ZetaRegime::dispersive ? "dispersive" : "near-resonant");
        os << buf;
    }
}

double phonon_shift_numeric(const CircuitParams& p, int n_fock) {
    p.validate();
    if (n_fock < 4)
        throw invalid_dimension_error("phonon_shift_numeric: n_fock must be >= 4");
    HilbertOp H = build_H_ec(p, n_fock, n_fock);
    EigenResult r = eig_hermitian(H, product_basis_labels(H.dims));
    const int i0 = 0 * n_fock + 0;
    const int i1 = 1 * n_fock + 0;
    const double E0 = r.eigenvalues(r.assignments[i0]);
    const double E1 = r.eigenvalues(r.assignments[i1]);
    return (E1 - E0) / hbar - p.omega_e;
}

ReadoutBudget readout_budget(double omega_mw, double g_ec, double kappa_int,
                             double kappa_ext, double noise_temperature) {
    if (omega_mw <= 0 || kappa_int <= 0 || kappa_ext <= 0)
        throw contract_violation("readout_budget: rates and frequency must be > 0");
    if (noise_temperature <= 0)
        throw contract_violation("readout_budget: noise temperature must be > 0");

    const double kappa = kappa_int + kappa_ext;
    ReadoutBudget b;
    b.noise_temperature = noise_temperature;
    b.noise_w_per_hz = constants::k_B * noise_temperature;
    b.noise_dbm_per_hz = 10.0 * std::log10(b.noise_w_per_hz / 1e-3);
    b.emission_rate = 4.0 * g_ec * g_ec / kappa;
    b.extraction_eff = kappa_ext / kappa;
    b.n_min = constants::k_B * noise_temperature / (hbar * omega_mw * b.extraction_eff);
    return b;
}

} // namespace etrap
