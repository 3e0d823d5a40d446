#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "etrap/config.hpp"
#include "etrap/constants.hpp"

using namespace etrap;
using constants::twopi;

TEST_CASE("quantity parsing to SI") {
    CHECK(parse_quantity("33 kHz", Quantity::frequency) ==
          doctest::Approx(twopi * 33e3).epsilon(1e-15));
    CHECK(parse_quantity("1 GHz", Quantity::frequency) ==
          doctest::Approx(twopi * 1e9).epsilon(1e-15));
    CHECK(parse_quantity("140 Hz", Quantity::rate) == 140.0);
    CHECK(parse_quantity("10 kHz", Quantity::rate) == 1e4);
    CHECK(parse_quantity("300 mK", Quantity::temperature) == doctest::Approx(0.3));
    CHECK(parse_quantity("10 um", Quantity::length) == doctest::Approx(1e-5));
    CHECK(parse_quantity("389.81 nm", Quantity::length) == doctest::Approx(389.81e-9));
    CHECK(parse_quantity("1 us", Quantity::time) == doctest::Approx(1e-6));
    CHECK(parse_quantity("20 V", Quantity::voltage) == 20.0);
    CHECK(parse_quantity("3.0 eV", Quantity::energy) ==
          doctest::Approx(3.0 * constants::e_charge).epsilon(1e-15));
    CHECK(parse_quantity("2.5 meV", Quantity::energy) ==
          doctest::Approx(2.5e-3 * constants::e_charge).epsilon(1e-15));
    CHECK(parse_quantity("0.8 mW", Quantity::power) == doctest::Approx(8e-4));
    CHECK(parse_quantity("42", Quantity::number) == 42.0);
    CHECK(parse_quantity("true", Quantity::boolean) == 1.0);

    SUBCASE("suffix attached without whitespace") {
        CHECK(parse_quantity("33kHz", Quantity::frequency) ==
              doctest::Approx(twopi * 33e3).epsilon(1e-15));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(parse_quantity("5 parsec", Quantity::length), config_error);
        CHECK_THROWS_AS(parse_quantity("5 K", Quantity::length), config_error);
        CHECK_THROWS_AS(parse_quantity("1 GHz", Quantity::number), config_error);
        CHECK_THROWS_AS(parse_quantity("33 kHz extra", Quantity::frequency), config_error);
        CHECK_THROWS_AS(parse_quantity("abc", Quantity::frequency), config_error);
        CHECK_THROWS_AS(parse_quantity("33", Quantity::frequency), config_error);
        CHECK_THROWS_AS(parse_quantity("maybe", Quantity::boolean), config_error);
        CHECK_THROWS_AS(parse_quantity("1.5", Quantity::integer), config_error);
    }
}

TEST_CASE("parse-format round trip is exact") {
    const std::vector<std::pair<const char*, Quantity>> cases = {
        {"33 kHz", Quantity::frequency},  {"986 MHz", Quantity::frequency},
        {"1 GHz", Quantity::frequency},   {"200 MHz", Quantity::frequency},
        {"140 Hz", Quantity::rate},       {"10 kHz", Quantity::rate},
        {"1 us", Quantity::time},         {"1.5 ms", Quantity::time},
        {"300 mK", Quantity::temperature},{"2.29 K", Quantity::temperature},
        {"10 um", Quantity::length},      {"389.81 nm", Quantity::length},
        {"20 V", Quantity::voltage},      {"3.0 eV", Quantity::energy},
        {"2.531 meV", Quantity::energy},  {"0.8 mW", Quantity::power},
    };
    for (const auto& [text, kind] : cases) {
        const double x = parse_quantity(text, kind);
        const std::string formatted = format_quantity(x, kind);
        CHECK_MESSAGE(parse_quantity(formatted, kind) == x, text, " -> ", formatted);
    }
    SUBCASE("canonical suffix choice") {
        CHECK(format_quantity(twopi * 1e9, Quantity::frequency).find("GHz") !=
              std::string::npos);
        CHECK(format_quantity(1e-5, Quantity::length).find("um") != std::string::npos);
    }

    SUBCASE("random config-originated values round trip") {
        std::mt19937 rng(2024);
        std::uniform_real_distribution<double> mant(1.0, 999.0);
        const std::vector<std::pair<std::string, Quantity>> units = {
            {"Hz", Quantity::frequency}, {"kHz", Quantity::frequency},
            {"MHz", Quantity::frequency}, {"GHz", Quantity::frequency},
            {"Hz", Quantity::rate},      {"us", Quantity::time},
            {"mK", Quantity::temperature}, {"um", Quantity::length},
            {"nm", Quantity::length},    {"meV", Quantity::energy},
            {"mW", Quantity::power},
        };
        for (int trial = 0; trial < 500; ++trial) {
            const auto& [suffix, kind] = units[trial % units.size()];
            char text[64];
            std::snprintf(text, sizeof text, "%.17g %s", mant(rng), suffix.c_str());
            const double x = parse_quantity(text, kind);
            CHECK(parse_quantity(format_quantity(x, kind), kind) == x);
        }
    }
}

TEST_CASE("config document parsing") {
    std::istringstream is(
        "# comment line\n"
        "[circuit]\n"
        "omega_mw = 1 GHz\n"
        "g_ec = 33 kHz\n"
        "\n"
        "[thermal]\n"
        "temperature = 300 mK\n");
    Config cfg = Config::parse_stream(is);
    CHECK(cfg.find("circuit", "omega_mw") != nullptr);
    CHECK(cfg.find("circuit", "omega_mw")->raw == "1 GHz");
    CHECK(cfg.find("circuit", "omega_mw")->line == 3);
    CHECK(cfg.find("thermal", "temperature")->line == 7);

    SUBCASE("resolve applies defaults and parses") {
        ResolvedConfig rc = ResolvedConfig::resolve(cfg);
        CHECK(rc.get("circuit", "omega_mw") == doctest::Approx(twopi * 1e9));
        CHECK(rc.get("circuit", "g_sc") == doctest::Approx(twopi * 200e6)); // default
        CHECK(rc.get("thermal", "temperature") == doctest::Approx(0.3));
        CHECK(rc.get_text("trap", "layout") == "fiverail");
    }

    SUBCASE("merge prefers the newer value") {
        Config over;
        over.set("circuit", "g_ec", "66 kHz");
        cfg.merge(over);
        ResolvedConfig rc = ResolvedConfig::resolve(cfg);
        CHECK(rc.get("circuit", "g_ec") == doctest::Approx(twopi * 66e3));
    }
}

TEST_CASE("config rejections carry line numbers") {
    SUBCASE("unknown key") {
        std::istringstream is("[circuit]\nomega_nw = 1 GHz\n");
        Config cfg = Config::parse_stream(is);
        try {
            ResolvedConfig::resolve(cfg);
            CHECK(false);
        } catch (const config_error& e) {
            const std::string msg = e.what();
            CHECK(msg.find("omega_nw") != std::string::npos);
            CHECK(msg.find("line 2") != std::string::npos);
        }
    }
    SUBCASE("malformed unit suffix") {
        std::istringstream is("[circuit]\ng_ec = 33 kframes\n");
        Config cfg = Config::parse_stream(is);
        try {
            ResolvedConfig::resolve(cfg);
            CHECK(false);
        } catch (const config_error& e) {
            const std::string msg = e.what();
            CHECK(msg.find("kframes") != std::string::npos);
            CHECK(msg.find("line 2") != std::string::npos);
        }
    }
    SUBCASE("syntax errors") {
        std::istringstream a("[circuit\n");
        CHECK_THROWS_AS(Config::parse_stream(a), config_error);
        std::istringstream b("key_without_section = 1\n");
        CHECK_THROWS_AS(Config::parse_stream(b), config_error);
        std::istringstream c("[s]\nno_equals_here\n");
        CHECK_THROWS_AS(Config::parse_stream(c), config_error);
    }
}

TEST_CASE("echo is deterministic and in SI units") {
    ResolvedConfig rc = ResolvedConfig::resolve(Config{});
    std::ostringstream a, b;
    rc.echo(a);
    rc.echo(b);
    CHECK(a.str() == b.str());
    CHECK(a.str().find("circuit.omega_mw = 6283185307.18 rad/s") != std::string::npos);
    CHECK(a.str().find("thermal.temperature = 0.3 K") != std::string::npos);
}

TEST_CASE("presets") {
    for (const auto& name : preset_names()) CHECK_NOTHROW(preset_config(name));
    CHECK_THROWS_AS(preset_config("table3"), config_error);

    ResolvedConfig rc = ResolvedConfig::resolve(preset_config("table2-row4"));
    CHECK(rc.get("electron_ion", "omega_e") == doctest::Approx(twopi * 500e6));
    CHECK(rc.get("electron_ion", "separation") == doctest::Approx(7e-6));
    CHECK(rc.get("sympathetic", "omega") == doctest::Approx(twopi * 500e6));
}
