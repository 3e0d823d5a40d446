#ifndef ETRAP_COULOMB_HPP
#define ETRAP_COULOMB_HPP

#include <iosfwd>
#include <vector>

#include "etrap/cooling.hpp"
#include "etrap/hamiltonians.hpp"

namespace etrap {

enum class Provenance { closed_form, oracle };

/// Coupling constants of the electron-ion pair derived from the Coulomb
/// expansion, rad/s throughout.
struct CouplingSet {
    double g0;       // optomechanical coupling
    double g_c;      // cross second-order term, from the oracle's c[1][1]
    double alpha;    // self-Kerr of the electron mode
    double alpha_c;  // Coulomb part of alpha
    double g_max;    // saturation bound g0^2 / |alpha|
    double x_zpf;    // m
    double y_zpf;    // m
    Provenance g_c_source = Provenance::oracle;
    Provenance g0_source = Provenance::closed_form;
    Provenance alpha_source = Provenance::closed_form;
};

/// Taylor coefficients c[i][j] of x^i y^j in the expansion of
/// V(x,y) = -k / (L - y + x) about the trap centers, for i + j <= order.
struct TaylorCoeffs {
    int order;
    std::vector<std::vector<double>> c; // c[i][j], j index ragged to order-i

    double at(int i, int j) const;
};

/// Analytic closed form for a coefficient: -(k / L^{i+j+1}) binom(i+j, i) (-1)^i.
double taylor_coeff_analytic(double L, int i, int j);

/// Central finite differences of the pair potential on a stencil with step
/// h = 1e-4 L, one Richardson step, evaluated in extended precision so the
/// fourth-order coefficients survive to the 1e-6 self-check against the
/// analytic pattern. Throws step_size_error on degenerate steps.
TaylorCoeffs taylor_oracle(const ElectronIonParams& p, int order);

/// All coupling constants of the Coulomb expansion. The cross term g_C is
/// taken from the oracle's c[1][1]; everything else from closed forms.
/// Throws divergence_error when alpha = 0 makes g_max undefined.
CouplingSet coupling_constants(const ElectronIonParams& p);

/// Back-solves the trap nonlinearity beta that reproduces a target g0
/// through the cross-term correction (linear in beta, single root).
double backsolve_beta(const ElectronIonParams& p, double target_g0);

enum class DriveSideband { two_mode_squeeze, beam_splitter };

/// Linearized drive coupling g = g0 sqrt(n_d); the sideband tag records
/// whether the drive sits at omega_e + omega_i or omega_e - omega_i.
struct LinearizedCoupling {
    double g;
    DriveSideband sideband;
};
LinearizedCoupling linearized_coupling(double g0, double n_d, DriveSideband mode);

/// One row of the comparison table: trap inputs plus the published values
/// for the side-by-side columns.
struct Table2Row {
    ElectronIonParams params;
    double gamma_i;      // 1/s
    double gamma_th_e;   // 1/s
    double temperature;  // K
    double g0_published;     // rad/s
    double alpha_published;  // rad/s
    double ne_published;     // dimensionless
};

struct Table2Result {
    Table2Row row;
    CouplingSet calc;
    double n_th;
    double ne_calc;      // steady state with g = computed g0 (n_d = 1 drive)
    bool weak_coupling_valid;
};

/// The four default rows (omega_i/2pi = 2 MHz, Be-9, 300 mK, Gamma_i/2pi =
/// 10 kHz, Gamma_th = 10/s) with the published comparison columns.
std::vector<Table2Row> default_table2_rows();

std::vector<Table2Result> table2_report(const std::vector<Table2Row>& rows);

/// CSV: omega_e_hz, L_um, g0_calc_khz, g0_paper_khz, alpha_calc_khz,
/// alpha_paper_khz, gmax_khz, ne_calc, ne_published.
void write_table2_csv(std::ostream& os, const std::vector<Table2Result>& results);

} // namespace etrap

#endif
