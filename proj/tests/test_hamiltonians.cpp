#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "etrap/hamiltonians.hpp"

using namespace etrap;
using constants::hbar;
using constants::twopi;

namespace {
CircuitParams table1(double omega_e) {
    return {omega_e, twopi * 1e9, twopi * 4e9, twopi * 33e3, twopi * 200e6};
}
} // namespace

TEST_CASE("phonon-cavity Hamiltonian") {
    SUBCASE("decoupled spectrum is the bare grid") {
        CircuitParams p = table1(twopi * 900e6);
        p.g_ec = 0;
        HilbertOp H = build_H_ec(p, 3, 3);
        EigenResult r = eig_hermitian(H);
        std::vector<double> expect;
        for (int n = 0; n < 3; ++n)
            for (int m = 0; m < 3; ++m)
                expect.push_back(hbar * (p.omega_e * n + p.omega_mw * m));
        std::sort(expect.begin(), expect.end());
        for (int k = 0; k < 9; ++k)
            CHECK(r.eigenvalues(k) == doctest::Approx(expect[k]).epsilon(1e-12));
    }

    SUBCASE("resonant normal modes sit at omega -+ g") {
        CircuitParams p = table1(twopi * 1e9); // omega_e = omega_mw
        HilbertOp H = build_H_ec(p, 3, 3);
        EigenResult r = eig_hermitian(H);
        // single-excitation pair above the ground state
        CHECK(r.eigenvalues(1) / hbar ==
              doctest::Approx(twopi * (1e9 - 33e3)).epsilon(1e-12));
        CHECK(r.eigenvalues(2) / hbar ==
              doctest::Approx(twopi * (1e9 + 33e3)).epsilon(1e-12));
        CHECK((r.eigenvalues(2) - r.eigenvalues(1)) / hbar ==
              doctest::Approx(2 * p.g_ec).epsilon(1e-10));
    }

    SUBCASE("Hermitian and validated") {
        CHECK(build_H_ec(table1(twopi * 9e8), 4, 5).is_hermitian());
        CHECK_THROWS_AS(build_H_ec(table1(twopi * 9e8), 1, 4), invalid_dimension_error);
        CircuitParams bad = table1(-1.0);
        CHECK_THROWS_AS(build_H_ec(bad, 4, 4), contract_violation);
    }
}

TEST_CASE("readout Hamiltonian") {
    SUBCASE("zero couplings separate") {
        CircuitParams p = table1(twopi * 900e6);
        p.g_ec = 0;
        p.g_sc = 0;
        HilbertOp H = build_H_read(p, 2, 2);
        EigenResult r = eig_hermitian(H);
        std::vector<double> expect;
        for (int n = 0; n < 2; ++n)
            for (int m = 0; m < 2; ++m)
                for (int s = -1; s <= 1; s += 2)
                    expect.push_back(hbar * (p.omega_e * n + p.omega_mw * m +
                                             0.5 * p.omega_q * s));
        std::sort(expect.begin(), expect.end());
        for (int k = 0; k < 8; ++k)
            CHECK(r.eigenvalues(k) == doctest::Approx(expect[k]).epsilon(1e-12));
    }

    SUBCASE("conserves the total excitation number") {
        CircuitParams p = table1(twopi * 986e6);
        HilbertOp H = build_H_read(p, 4, 4);
        HilbertOp N = excitation_number_read(4, 4);
        const double scale = H.mat.cwiseAbs().maxCoeff();
        CHECK(commutator(H, N).mat.cwiseAbs().maxCoeff() <= 1e-10 * scale);
    }

    SUBCASE("qubit-state-dependent cavity pull in the dispersive regime") {
        CircuitParams p = table1(twopi * 900e6);
        p.g_ec = 0;
        CHECK(p.dispersive_regime());
        HilbertOp H = build_H_read(p, 2, 8);
        EigenResult r = eig_hermitian(H, product_basis_labels(H.dims));
        auto energy = [&](int n_mw, int qubit) {
            const int idx = (0 * 8 + n_mw) * 2 + qubit;
            return r.eigenvalues(r.assignments[idx]);
        };
        const double pull_g = (energy(1, 0) - energy(0, 0)) / hbar - p.omega_mw;
        const double pull_e = (energy(1, 1) - energy(0, 1)) / hbar - p.omega_mw;
        const double chi_mag = p.g_sc * p.g_sc / std::abs(p.delta_sc());
        // qubit above the cavity: ground sector pulled down, excited up
        CHECK(pull_g < 0);
        CHECK(pull_e > 0);
        CHECK(std::abs(pull_g) == doctest::Approx(chi_mag).epsilon(0.02));
        CHECK(std::abs(pull_e) == doctest::Approx(chi_mag).epsilon(0.02));
    }
}

TEST_CASE("electron-ion Hamiltonian") {
    ElectronIonParams p;
    p.omega_e = twopi * 100e6;
    p.omega_i = twopi * 2e6;
    p.L = 10e-6;

    SUBCASE("decoupled") {
        HilbertOp H = build_H_electron_ion(p, 0, 0, 2, 3);
        EigenResult r = eig_hermitian(H);
        std::vector<double> expect;
        for (int n = 0; n < 2; ++n)
            for (int m = 0; m < 3; ++m)
                expect.push_back(hbar * (p.omega_e * n + p.omega_i * m));
        std::sort(expect.begin(), expect.end());
        for (int k = 0; k < 6; ++k)
            CHECK(r.eigenvalues(k) == doctest::Approx(expect[k]).epsilon(1e-12));
    }

    SUBCASE("electron number is conserved") {
        const double g0 = twopi * 0.2e6;
        HilbertOp H = build_H_electron_ion(p, g0, twopi * 1e6, 3, 8);
        HilbertOp Na = embed(number_op(3), 0, {3, 8});
        const double scale = H.mat.cwiseAbs().maxCoeff();
        CHECK(commutator(H, Na).mat.cwiseAbs().maxCoeff() <= 1e-10 * scale);
    }

    SUBCASE("polaron shift of the displaced ion") {
        // exact displaced-oscillator oracle: sector ground at -hbar g0^2 n^2 / w_i
        const double g0 = twopi * 0.2e6; // g0 / omega_i = 0.1
        HilbertOp H = build_H_electron_ion(p, g0, 0, 4, 30);
        EigenResult r = eig_hermitian(H, product_basis_labels(H.dims));
        for (int n = 1; n <= 3; ++n) {
            const int bare = n * 30 + 0;
            const double e_sector = r.eigenvalues(r.assignments[bare]);
            const double shift = e_sector - hbar * p.omega_e * n;
            const double oracle = -hbar * g0 * g0 * n * n / p.omega_i;
            CHECK(shift == doctest::Approx(oracle).epsilon(0.01));
        }
    }

    SUBCASE("Kerr ladder anharmonicity") {
        const double alpha = twopi * 1e6;
        HilbertOp H = build_H_electron_ion(p, 0, alpha, 4, 2);
        EigenResult r = eig_hermitian(H, product_basis_labels(H.dims));
        auto sector_energy = [&](int n) {
            return r.eigenvalues(r.assignments[n * 2 + 0]);
        };
        const double e0 = sector_energy(0), e1 = sector_energy(1), e2 = sector_energy(2);
        CHECK((e2 - 2 * e1 + e0) / hbar == doctest::Approx(-alpha).epsilon(1e-10));
    }

    SUBCASE("expansion validity guard") {
        ElectronIonParams bad = p;
        bad.L = 5e-7; // x_zpf no longer << L
        CHECK_THROWS_AS(bad.validate(), contract_violation);
        ElectronIonParams same = p;
        same.omega_i = same.omega_e;
        CHECK_THROWS_AS(same.validate(), contract_violation);
    }
}

TEST_CASE("photoionization excess energy") {
    CHECK(photoionization_excess_energy(389.81e-9) == doctest::Approx(0.0).epsilon(1e-12));

    SUBCASE("just above threshold") {
        const double e = photoionization_excess_energy(389.5e-9);
        CHECK(joules_to_mev(e) == doctest::Approx(2.531).epsilon(0.01));
    }
    SUBCASE("below threshold is negative") {
        CHECK(photoionization_excess_energy(390.5e-9) < 0.0);
    }
    SUBCASE("bad wavelength") {
        CHECK_THROWS_AS(photoionization_excess_energy(0.0), contract_violation);
    }
}

TEST_CASE("derived circuit accessors") {
    CircuitParams p = table1(twopi * 986e6);
    CHECK(p.delta_sc() == doctest::Approx(-twopi * 3e9));
    CHECK(p.delta_ec() == doctest::Approx(twopi * 14e6));
    CHECK(p.chi() == doctest::Approx(-twopi * 13.3333333333e6).epsilon(1e-9));
    CHECK(p.delta() == doctest::Approx(twopi * 27.3333333333e6).epsilon(1e-9));
    CHECK(p.dispersive_regime());
}
