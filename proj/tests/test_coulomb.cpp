#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "etrap/coulomb.hpp"

using namespace etrap;
using constants::coulomb_k;
using constants::twopi;

namespace {
ElectronIonParams pair_params(double f_e_mhz, double L_um) {
    ElectronIonParams p;
    p.omega_e = twopi * f_e_mhz * 1e6;
    p.omega_i = twopi * 2e6;
    p.L = L_um * 1e-6;
    return p;
}
} // namespace

TEST_CASE("finite-difference oracle matches the analytic pattern") {
    for (double L_um : {7.0, 10.0, 50.0}) {
        ElectronIonParams p = pair_params(800, L_um);
        TaylorCoeffs tc = taylor_oracle(p, 4);
        for (int i = 0; i <= 4; ++i)
            for (int j = 0; i + j <= 4; ++j) {
                const double ref = taylor_coeff_analytic(p.L, i, j);
                CHECK(tc.at(i, j) == doctest::Approx(ref).epsilon(1e-6));
            }
    }

    SUBCASE("low-order signs and values") {
        const double L = 10e-6;
        ElectronIonParams p = pair_params(800, 10);
        TaylorCoeffs tc = taylor_oracle(p, 4);
        CHECK(tc.at(1, 0) == doctest::Approx(coulomb_k / (L * L)).epsilon(1e-9));
        CHECK(tc.at(1, 1) == doctest::Approx(2.0 * coulomb_k / std::pow(L, 3)).epsilon(1e-9));
        CHECK(tc.at(2, 0) == doctest::Approx(-coulomb_k / std::pow(L, 3)).epsilon(1e-9));
        CHECK(tc.at(0, 1) == doctest::Approx(-coulomb_k / (L * L)).epsilon(1e-9));
    }

    SUBCASE("order guard") {
        ElectronIonParams p = pair_params(800, 10);
        CHECK_THROWS_AS(taylor_oracle(p, 3), contract_violation);
        CHECK_THROWS_AS(taylor_oracle(p, 2), contract_violation);
    }
}

TEST_CASE("coupling constants from the expansion") {
    ElectronIonParams p = pair_params(800, 10);
    CouplingSet cs = coupling_constants(p);

    SUBCASE("zero-point fluctuations") {
        CHECK(cs.x_zpf == doctest::Approx(1.07311e-7).epsilon(1e-4));
        CHECK(cs.y_zpf == doctest::Approx(1.67449e-8).epsilon(1e-4));
    }
    SUBCASE("coulomb-only couplings") {
        CHECK(cs.g0 / twopi == doctest::Approx(40283.6).epsilon(1e-4));
        CHECK(cs.alpha_c / twopi == doctest::Approx(5540.67).epsilon(1e-4));
        CHECK(cs.alpha == cs.alpha_c); // beta = alpha_k = 0
        CHECK(cs.g_max == doctest::Approx(cs.g0 * cs.g0 / cs.alpha_c).epsilon(1e-12));
    }
    SUBCASE("sign structure") {
        CHECK(cs.alpha_c > 0);
        CHECK(cs.g0 > 0);
        CHECK(cs.g_c > 0);
    }
    SUBCASE("provenance") {
        CHECK(cs.g_c_source == Provenance::oracle);
        CHECK(cs.g0_source == Provenance::closed_form);
    }
    SUBCASE("alpha = 0 leaves g_max undefined") {
        ElectronIonParams q = p;
        q.alpha_k = -cs.alpha_c;
        CHECK_THROWS_AS(coupling_constants(q), divergence_error);
    }
}

TEST_CASE("scaling laws by log-log regression") {
    auto slope = [](const std::vector<double>& x, const std::vector<double>& y) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const size_t n = x.size();
        for (size_t i = 0; i < n; ++i) {
            sx += std::log(x[i]);
            sy += std::log(y[i]);
            sxx += std::log(x[i]) * std::log(x[i]);
            sxy += std::log(x[i]) * std::log(y[i]);
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };

    SUBCASE("g0 ~ L^-4 and alpha_c ~ L^-5") {
        std::vector<double> L = {5, 10, 20, 40, 80};
        std::vector<double> g0, ac;
        for (double l : L) {
            CouplingSet cs = coupling_constants(pair_params(800, l));
            g0.push_back(cs.g0);
            ac.push_back(cs.alpha_c);
        }
        CHECK(slope(L, g0) == doctest::Approx(-4.0).epsilon(1e-3));
        CHECK(slope(L, ac) == doctest::Approx(-5.0).epsilon(1e-3));
    }
    SUBCASE("x_zpf ~ omega^-1/2") {
        std::vector<double> f = {100, 200, 400, 800, 1600};
        std::vector<double> x;
        for (double fe : f) x.push_back(pair_params(fe, 10).x_zpf());
        CHECK(slope(f, x) == doctest::Approx(-0.5).epsilon(1e-3));
    }
}

TEST_CASE("beta back-solve reproduces a target coupling") {
    ElectronIonParams p = pair_params(800, 10);
    const double target = twopi * 33e3;
    const double beta = backsolve_beta(p, target);
    ElectronIonParams q = p;
    q.beta = beta;
    CHECK(coupling_constants(q).g0 == doctest::Approx(target).epsilon(1e-10));
}

TEST_CASE("linearized drive coupling") {
    CHECK(linearized_coupling(twopi * 40e3, 0.0, DriveSideband::beam_splitter).g == 0.0);
    CHECK(linearized_coupling(twopi * 40e3, 1.0, DriveSideband::two_mode_squeeze).g ==
          doctest::Approx(twopi * 40e3));
    CHECK_THROWS_AS(linearized_coupling(twopi * 40e3, -1.0, DriveSideband::beam_splitter),
                    contract_violation);

    SUBCASE("saturation drive level from published row values") {
        const double g0 = 39.0, g_max = 39.0 * 39.0 / 2600.0; // kHz
        const double n_d = (g_max / g0) * (g_max / g0);
        CHECK(n_d == doctest::Approx(2.25e-4).epsilon(1e-6));
        CHECK(linearized_coupling(twopi * g0 * 1e3, n_d, DriveSideband::beam_splitter).g ==
              doctest::Approx(twopi * g_max * 1e3).epsilon(1e-12));
    }
}

TEST_CASE("comparison table") {
    auto results = table2_report(default_table2_rows());
    REQUIRE(results.size() == 4);

    SUBCASE("published columns echoed") {
        CHECK(results[0].row.g0_published / twopi == doctest::Approx(33e3));
        CHECK(results[3].row.alpha_published / twopi == doctest::Approx(-2.5e6));
        CHECK(results[3].row.ne_published == doctest::Approx(2.2e-3));
    }
    SUBCASE("computed occupations stay within a factor three of published") {
        for (const auto& r : results) {
            const double ratio = r.ne_calc / r.row.ne_published;
            CHECK(ratio > 1.0 / 3.0);
            CHECK(ratio < 3.0);
        }
    }
    SUBCASE("computed couplings, frozen values") {
        CHECK(results[0].calc.g0 / twopi == doctest::Approx(40283.6).epsilon(1e-4));
        CHECK(results[1].calc.g0 / twopi == doctest::Approx(64.4537).epsilon(1e-4));
        CHECK(results[2].calc.g0 / twopi == doctest::Approx(64453.7).epsilon(1e-4));
        CHECK(results[3].calc.g0 / twopi == doctest::Approx(268445.0).epsilon(1e-3));
    }
    SUBCASE("csv schema") {
        std::ostringstream os;
        write_table2_csv(os, results);
        const std::string text = os.str();
        CHECK(text.rfind("omega_e_hz,L_um,g0_calc_khz,g0_paper_khz,alpha_calc_khz,"
                         "alpha_paper_khz,gmax_khz,ne_calc,ne_paper\n",
                         0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 5);
    }
}
