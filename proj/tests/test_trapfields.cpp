#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "etrap/trapfields.hpp"

using namespace etrap;
using constants::e_charge;
using constants::m_e;
using constants::twopi;

TEST_CASE("strip potential and field") {
    Strip s{-25e-6, 25e-6, 10.0, ElectrodeRole::MW};
    ElectrodeLayout lay;
    lay.strips = {s};
    lay.drive_mw = twopi * 4e9;

    SUBCASE("on-axis closed form") {
        for (double z : {5e-6, 25e-6, 100e-6}) {
            const double expect = 10.0 / constants::pi * 2.0 * std::atan(25e-6 / z);
            CHECK(strip_potential(s, 0.0, z) == doctest::Approx(expect).epsilon(1e-12));
        }
    }

    SUBCASE("infinitely wide strip approaches the plate value") {
        Strip wide{-1e3, 1e3, 7.0, ElectrodeRole::MW};
        CHECK(strip_potential(wide, 0.0, 1e-4) == doctest::Approx(7.0).epsilon(1e-6));
    }

    SUBCASE("harmonic: numerical Laplacian stays at rounding level") {
        for (double x : {-40e-6, -10e-6, 0.0, 15e-6, 35e-6}) {
            for (double z : {10e-6, 30e-6, 80e-6}) {
                const double h = 3e-4 * z;
                auto phi = [&](double xx, double zz) { return strip_potential(s, xx, zz); };
                const double lap =
                    (phi(x + h, z) - 2 * phi(x, z) + phi(x - h, z)) / (h * h) +
                    (phi(x, z + h) - 2 * phi(x, z) + phi(x, z - h)) / (h * h);
                CHECK(std::abs(lap) <= 1e-6 * std::abs(phi(x, z)) / (z * z));
            }
        }
    }

    SUBCASE("field is the analytic gradient") {
        const double x = 12e-6, z = 40e-6, h = 1e-11;
        FieldVec f = strip_field(lay, ElectrodeRole::MW, x, z);
        const double ex_fd =
            -(strip_potential(s, x + h, z) - strip_potential(s, x - h, z)) / (2 * h);
        const double ez_fd =
            -(strip_potential(s, x, z + h) - strip_potential(s, x, z - h)) / (2 * h);
        CHECK(f.ex == doctest::Approx(ex_fd).epsilon(1e-6));
        CHECK(f.ez == doctest::Approx(ez_fd).epsilon(1e-6));
    }

    SUBCASE("half-space guard") {
        CHECK_THROWS_AS(strip_field(lay, ElectrodeRole::MW, 0.0, 0.0), contract_violation);
        CHECK_THROWS_AS(strip_potential(s, 0.0, -1e-6), contract_violation);
    }
}

TEST_CASE("pseudopotential formula") {
    CHECK(pseudopotential(0.0, m_e, twopi * 4e9, e_charge) == 0.0);
    CHECK_THROWS_AS(pseudopotential(1.0, m_e, 0.0, e_charge), divergence_error);

    SUBCASE("linear-gradient field gives the textbook secular frequency") {
        const double G = 1e7, omega = twopi * 1e9;
        for (double r : {1e-6, 5e-6, 20e-6}) {
            const double u = pseudopotential(G * G * r * r, m_e, omega, e_charge);
            const double w_sec = e_charge * G / (std::sqrt(2.0) * m_e * omega);
            CHECK(u == doctest::Approx(0.5 * m_e * w_sec * w_sec * r * r).epsilon(1e-12));
        }
    }

    SUBCASE("species ratio explains the two-frequency design") {
        const double e2 = 1e8;
        const double m_i = constants::m_be9;
        const double w_rf = twopi * 40e6, w_mw = twopi * 4e9;
        const double ratio = pseudopotential(e2, m_e, w_mw, e_charge) /
                             pseudopotential(e2, m_i, w_rf, e_charge);
        CHECK(ratio ==
              doctest::Approx((m_i / m_e) * (w_rf / w_mw) * (w_rf / w_mw)).epsilon(1e-12));
    }
}

TEST_CASE("five-rail characterization lands on the published design point") {
    ElectrodeLayout lay = five_rail_layout();

    SUBCASE("electron above the microwave pair") {
        TrapCharacter tc = characterize_trap(lay, ElectrodeRole::MW, electron_species());
        REQUIRE(tc.found);
        CHECK(tc.min_position[0] == doctest::Approx(0.0).scale(1e-6).epsilon(1.0));
        CHECK(tc.min_position[1] == doctest::Approx(56.0e-6).epsilon(0.02));
        CHECK(tc.secular_omega[0] / twopi == doctest::Approx(798.1e6).epsilon(0.01));
        CHECK(tc.secular_omega[1] / twopi == doctest::Approx(798.1e6).epsilon(0.01));
        CHECK(tc.depth_ev() * 1e3 == doctest::Approx(14.51).epsilon(0.02));
        CHECK(tc.q[0] == doctest::Approx(0.564).epsilon(0.01));
        // within a factor 3 of the published 800 MHz / 40 meV
        for (double w : tc.secular_omega) {
            CHECK(w / twopi > 800e6 / 3.0);
            CHECK(w / twopi < 800e6 * 3.0);
        }
        CHECK(tc.depth_ev() > 0.040 / 3.0);
        CHECK(tc.depth_ev() < 0.040 * 3.0);
        CHECK(tc.note.find("q exceeds") != std::string::npos);
    }

    SUBCASE("ion above the rf rails") {
        TrapCharacter tc = characterize_trap(lay, ElectrodeRole::RF, be9_species());
        REQUIRE(tc.found);
        CHECK(tc.min_position[1] == doctest::Approx(113.1e-6).epsilon(0.02));
        CHECK(tc.secular_omega[0] / twopi == doctest::Approx(2.248e6).epsilon(0.01));
        CHECK(tc.depth_ev() * 1e3 == doctest::Approx(7.90).epsilon(0.02));
        for (double w : tc.secular_omega) {
            CHECK(w / twopi > 3e6 / 3.0);
            CHECK(w / twopi < 3e6 * 3.0);
        }
        CHECK(tc.depth_ev() > 0.020 / 3.0);
        CHECK(tc.depth_ev() < 0.020 * 3.0);
        CHECK(tc.q[0] < 0.4);
    }

    SUBCASE("voltage and drive scaling") {
        TrapCharacter base = characterize_trap(lay, ElectrodeRole::MW, electron_species());
        ElectrodeLayout v2 = lay;
        for (auto& s : v2.strips)
            if (s.role == ElectrodeRole::MW) s.amplitude *= 2.0;
        TrapCharacter tv = characterize_trap(v2, ElectrodeRole::MW, electron_species());
        CHECK(tv.secular_omega[0] / base.secular_omega[0] ==
              doctest::Approx(2.0).epsilon(0.005));
        CHECK(tv.depth / base.depth == doctest::Approx(4.0).epsilon(0.005));

        ElectrodeLayout o2 = lay;
        o2.drive_mw *= 2.0;
        TrapCharacter to = characterize_trap(o2, ElectrodeRole::MW, electron_species());
        CHECK(to.secular_omega[0] / base.secular_omega[0] ==
              doctest::Approx(0.5).epsilon(0.005));
        CHECK(to.depth / base.depth == doctest::Approx(0.25).epsilon(0.005));
    }

    SUBCASE("rigid translation invariance") {
        TrapCharacter base = characterize_trap(lay, ElectrodeRole::MW, electron_species());
        ElectrodeLayout moved = lay;
        const double shift = 37e-6;
        for (auto& s : moved.strips) {
            s.x_min += shift;
            s.x_max += shift;
        }
        TrapCharacter tm = characterize_trap(moved, ElectrodeRole::MW, electron_species());
        CHECK(tm.secular_omega[0] ==
              doctest::Approx(base.secular_omega[0]).epsilon(1e-9));
        CHECK(tm.depth == doctest::Approx(base.depth).epsilon(1e-9));
        CHECK(tm.min_position[0] - base.min_position[0] ==
              doctest::Approx(shift).epsilon(1e-6));
    }

    SUBCASE("ceiling routes away from the analytic model") {
        ElectrodeLayout ceil = lay;
        ceil.ceiling_height = 200e-6;
        CHECK_THROWS_AS(strip_field(ceil, ElectrodeRole::MW, 0.0, 50e-6),
                        contract_violation);
        CHECK_THROWS_AS(characterize_trap(ceil, ElectrodeRole::MW, electron_species()),
                        contract_violation);
    }

    SUBCASE("single strip does not trap") {
        ElectrodeLayout single;
        single.strips = {{-15e-6, 15e-6, 20.0, ElectrodeRole::MW}};
        single.drive_mw = twopi * 4e9;
        TrapCharacter tc = characterize_trap(single, ElectrodeRole::MW, electron_species());
        CHECK(!tc.found);
        CHECK(!tc.note.empty());
    }
}

namespace {
std::string quadrupole_csv(double G, int n, double span) {
    std::ostringstream os;
    os << "# synthetic quadrupole, E = G (x, 0, -z)\n";
    os << "x_m,y_m,z_m,Ex_Vpm,Ey_Vpm,Ez_Vpm\n";
    for (int i = 0; i < n; ++i) {
        const double x = -span + 2 * span * i / (n - 1);
        for (int k = 0; k < n; ++k) {
            const double z = -span + 2 * span * k / (n - 1);
            os << x << ",0," << z << "," << G * x << ",0," << -G * z << "\n";
        }
    }
    return os.str();
}
} // namespace

TEST_CASE("field map ingestion and characterization") {
    const double G = 1e7, omega = twopi * 1e9;

    SUBCASE("synthetic quadrupole round trip") {
        std::istringstream is(quadrupole_csv(G, 41, 100e-6));
        FieldMap map = ingest_field_map(is, omega);
        CHECK(map.dimensionality == 2);
        TrapCharacter tc = characterize_trap(map, electron_species());
        REQUIRE(tc.found);
        const double w_expect = e_charge * G / (std::sqrt(2.0) * m_e * omega);
        CHECK(tc.secular_omega[0] == doctest::Approx(w_expect).epsilon(0.005));
        CHECK(tc.secular_omega[1] == doctest::Approx(w_expect).epsilon(0.005));
        CHECK(std::abs(tc.min_position[0]) <= 1e-9);
        CHECK(std::abs(tc.min_position[2]) <= 1e-9);
    }

    SUBCASE("minimal grid keeps its dimensionality") {
        std::istringstream is(
            "x_m,y_m,z_m,Ex_Vpm,Ey_Vpm,Ez_Vpm\n"
            "0,0,0,1,0,0\n"
            "0,1e-6,0,1,0,0\n"
            "1e-6,0,0,1,0,0\n"
            "1e-6,1e-6,0,1,0,0\n");
        FieldMap map = ingest_field_map(is, omega);
        CHECK(map.dimensionality == 2);
        CHECK(map.xs.size() == 2);
        CHECK(map.ys.size() == 2);
        CHECK(map.zs.size() == 1);
    }

    SUBCASE("NaN magnitude is rejected with its line") {
        std::istringstream is(
            "x_m,y_m,z_m,Ex_Vpm,Ey_Vpm,Ez_Vpm\n"
            "0,0,0,1,0,0\n"
            "1e-6,0,0,nan,0,0\n");
        CHECK_THROWS_AS(ingest_field_map(is, omega), parse_error);
        std::istringstream is2(
            "x_m,y_m,z_m,Ex_Vpm,Ey_Vpm,Ez_Vpm\n"
            "0,0,0,1,0,0\n"
            "1e-6,0,0,nan,0,0\n");
        try {
            ingest_field_map(is2, omega);
        } catch (const parse_error& e) {
            CHECK(e.line_number == 3);
        }
    }

    SUBCASE("non-rectilinear grid is rejected") {
        std::istringstream is(
            "x_m,y_m,z_m,Ex_Vpm,Ey_Vpm,Ez_Vpm\n"
            "0,0,0,1,0,0\n"
            "0,0,1e-6,1,0,0\n"
            "1e-6,0,0,1,0,0\n");
        CHECK_THROWS_AS(ingest_field_map(is, omega), parse_error);
    }

    SUBCASE("bad header is rejected") {
        std::istringstream is("x,y,z,Ex,Ey,Ez\n0,0,0,1,0,0\n");
        CHECK_THROWS_AS(ingest_field_map(is, omega), parse_error);
    }
}

TEST_CASE("trap character json record") {
    TrapCharacter tc;
    tc.found = true;
    tc.min_position = {0.0, 56e-6};
    tc.secular_omega = {twopi * 798e6, twopi * 798e6};
    tc.depth = 14.5e-3 * e_charge;
    tc.q = {0.564, 0.564};
    std::ostringstream os;
    write_trap_character_json(os, tc);
    const std::string s = os.str();
    CHECK(s.find("\"min_position_m\"") != std::string::npos);
    CHECK(s.find("\"secular_freq_hz\"") != std::string::npos);
    CHECK(s.find("\"depth_ev\"") != std::string::npos);
    CHECK(s.find("\"q\"") != std::string::npos);
    CHECK(s.find("798000000") != std::string::npos);
}
