#include "etrap/coulomb.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace etrap {

using constants::coulomb_k;
using constants::hbar;
using constants::twopi;

double TaylorCoeffs::at(int i, int j) const {
    if (i < 0 || j < 0 || i + j > order)
        throw shape_error("TaylorCoeffs: index outside expansion order");
    return c[i][j];
}

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Central-difference weights (2nd-order accurate) for derivative order 0..4,
// offsets -2..2.
const std::array<std::array<double, 5>, 5> kStencil = {{
    {0.0, 0.0, 1.0, 0.0, 0.0},
    {0.0, -0.5, 0.0, 0.5, 0.0},
    {0.0, 1.0, -2.0, 1.0, 0.0},
    {-0.5, 1.0, 0.0, -1.0, 0.5},
    {1.0, -4.0, 6.0, -4.0, 1.0},
}};

#if defined(__SIZEOF_FLOAT128__)
using wide_t = __float128;
#else
using wide_t = long double;
#endif

// d^{i+j} V / dx^i dy^j at the origin for step h. The fourth differences of
// V cancel 16 digits of the function value, hence the wide accumulator.
double mixed_derivative(wide_t k_over, double L, int i, int j, double h) {
    const wide_t kL = static_cast<wide_t>(-1.0) * k_over;
    wide_t sum = 0;
    for (int a = -2; a <= 2; ++a) {
        const double wx = kStencil[i][a + 2];
        if (wx == 0.0) continue;
        for (int b = -2; b <= 2; ++b) {
            const double wy = kStencil[j][b + 2];
            if (wy == 0.0) continue;
            const wide_t denom = static_cast<wide_t>(L) + static_cast<wide_t>(a) * h -
                                 static_cast<wide_t>(b) * h;
            sum += static_cast<wide_t>(wx) * static_cast<wide_t>(wy) * (kL / denom);
        }
    }
    wide_t hp = 1;
    for (int n = 0; n < i + j; ++n) hp *= static_cast<wide_t>(h);
    return static_cast<double>(sum / hp);
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

} // namespace

double taylor_coeff_analytic(double L, int i, int j) {
    const int n = i + j;
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    return -coulomb_k / std::pow(L, n + 1) * binom(n, i) * sign;
}

TaylorCoeffs taylor_oracle(const ElectronIonParams& p, int order) {
    p.validate();
    if (order < 4)
        throw contract_violation("taylor_oracle: order must be >= 4");
    if (order > 4)
        throw contract_violation("taylor_oracle: stencils provided up to order 4");

    const double L = p.L;
    const double h = 1e-4 * L;
    if (!(h > 0.0) || L - 8.0 * h <= 0.0)
        throw step_size_error("taylor_oracle: degenerate finite-difference step");

    TaylorCoeffs tc;
    tc.order = order;
    tc.c.resize(order + 1);
    for (int i = 0; i <= order; ++i) tc.c[i].resize(order - i + 1);

    for (int i = 0; i <= order; ++i) {
        for (int j = 0; j + i <= order; ++j) {
            // one Richardson step on the O(h^2) stencils
            const double d_h = mixed_derivative(coulomb_k, L, i, j, h);
            const double d_2h = mixed_derivative(coulomb_k, L, i, j, 2.0 * h);
            const double deriv = (4.0 * d_h - d_2h) / 3.0;
            tc.c[i][j] = deriv / (factorial(i) * factorial(j));

            const double ref = taylor_coeff_analytic(L, i, j);
            if (std::abs(tc.c[i][j] - ref) > 1e-6 * std::abs(ref))
                throw contract_violation(
                    "taylor_oracle: self-check against the analytic pattern failed");
        }
    }
    return tc;
}

CouplingSet coupling_constants(const ElectronIonParams& p) {
    p.validate();

    CouplingSet cs;
    cs.x_zpf = p.x_zpf();
    cs.y_zpf = p.y_zpf();

    TaylorCoeffs tc = taylor_oracle(p, 4);
    // c[1][1] equals the mixed second derivative (1!1! = 1)
    cs.g_c = tc.at(1, 1) * cs.x_zpf * cs.y_zpf / hbar;
    cs.g_c_source = Provenance::oracle;

    const double L4 = std::pow(p.L, 4);
    const double coulomb_term = coulomb_k * 6.0 * cs.x_zpf * cs.x_zpf * cs.y_zpf / L4;
    cs.g0 = (coulomb_term - 2.0 * hbar * cs.g_c * p.beta / (p.omega_e - p.omega_i)) / hbar;

    cs.alpha_c = coulomb_k * 12.0 * std::pow(cs.x_zpf, 4) / (hbar * std::pow(p.L, 5));
    cs.alpha = cs.alpha_c + p.alpha_k - 6.0 * p.beta * p.beta / p.omega_e;

    if (cs.alpha == 0.0)
        throw divergence_error("coupling_constants: alpha = 0 leaves g_max undefined");
    cs.g_max = cs.g0 * cs.g0 / std::abs(cs.alpha);
    return cs;
}

double backsolve_beta(const ElectronIonParams& p, double target_g0) {
    ElectronIonParams q = p;
    q.beta = 0.0;
    CouplingSet cs = coupling_constants(q);
    // g0 = g0_coulomb - 2 g_C beta / (omega_e - omega_i)
    if (cs.g_c == 0.0)
        throw divergence_error("backsolve_beta: cross term vanishes");
    return (cs.g0 - target_g0) * (p.omega_e - p.omega_i) / (2.0 * cs.g_c);
}

LinearizedCoupling linearized_coupling(double g0, double n_d, DriveSideband mode) {
    if (n_d < 0)
        throw contract_violation("linearized_coupling: n_d must be >= 0");
    return {g0 * std::sqrt(n_d), mode};
}

std::vector<Table2Row> default_table2_rows() {
    auto make = [](double f_e_mhz, double L_um, double g0_khz, double alpha_khz,
                   double ne) {
        Table2Row r;
        r.params.omega_e = twopi * f_e_mhz * 1e6;
        r.params.omega_i = twopi * 2e6;
        r.params.L = L_um * 1e-6;
        r.gamma_i = twopi * 10e3;
        r.gamma_th_e = 10.0;
        r.temperature = 0.3;
        r.g0_published = twopi * g0_khz * 1e3;
        r.alpha_published = twopi * alpha_khz * 1e3;
        r.ne_published = ne;
        return r;
    };
    return {
        make(800, 10, 33.0, -33.0, 5.3e-2),
        make(800, 50, 0.39, -34.0, 5.9),
        make(500, 10, 39.0, -2.6e3, 3.8e-2),
        make(500, 7, 1.6e3, -2.5e3, 2.2e-3),
    };
}

std::vector<Table2Result> table2_report(const std::vector<Table2Row>& rows) {
    std::vector<Table2Result> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        Table2Result r;
        r.row = row;
        r.calc = coupling_constants(row.params);
        r.n_th = bose_einstein(row.params.omega_e, row.temperature);

        SympatheticParams sp;
        sp.g = linearized_coupling(r.calc.g0, 1.0, DriveSideband::beam_splitter).g;
        sp.gamma_i = row.gamma_i;
        sp.gamma_th_e = row.gamma_th_e;
        sp.n_th = r.n_th;
        SympatheticResult ss = sympathetic_steady_state(sp);
        r.ne_calc = ss.n_e_steady;
        r.weak_coupling_valid = ss.weak_coupling_valid;
        out.push_back(r);
    }
    return out;
}

void write_table2_csv(std::ostream& os, const std::vector<Table2Result>& results) {
    os << "omega_e_hz,L_um,g0_calc_khz,g0_paper_khz,alpha_calc_khz,alpha_paper_khz,"
          "gmax_khz,ne_calc,ne_paper\n";
    char buf[256];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf,
                      "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      r.row.params.omega_e / twopi, r.row.params.L * 1e6,
                      r.calc.g0 / twopi / 1e3, r.row.g0_published / twopi / 1e3,
                      r.calc.alpha / twopi / 1e3, r.row.alpha_published / twopi / 1e3,
                      r.calc.g_max / twopi / 1e3, r.ne_calc, r.row.ne_published);
        os << buf;
    }
}

} // namespace etrap
