#include "etrap/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "etrap/constants.hpp"

namespace etrap {

namespace {

struct Suffix {
    const char* name;
    double mult;
};

// multipliers to SI; frequency entries convert to rad/s
const std::vector<Suffix>& suffixes_for(Quantity kind) {
    using constants::e_charge;
    using constants::twopi;
    static const std::vector<Suffix> freq = {
        {"Hz", twopi}, {"kHz", twopi * 1e3}, {"MHz", twopi * 1e6}, {"GHz", twopi * 1e9}};
    static const std::vector<Suffix> rate = {
        {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
    static const std::vector<Suffix> time = {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}};
    static const std::vector<Suffix> temp = {{"K", 1.0}, {"mK", 1e-3}};
    static const std::vector<Suffix> len = {
        {"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}};
    static const std::vector<Suffix> volt = {{"V", 1.0}};
    static const std::vector<Suffix> energy = {{"eV", e_charge}, {"meV", e_charge * 1e-3}};
    static const std::vector<Suffix> power = {{"W", 1.0}, {"mW", 1e-3}};
    static const std::vector<Suffix> none = {};
    switch (kind) {
        case Quantity::frequency: return freq;
        case Quantity::rate: return rate;
        case Quantity::time: return time;
        case Quantity::temperature: return temp;
        case Quantity::length: return len;
        case Quantity::voltage: return volt;
        case Quantity::energy: return energy;
        case Quantity::power: return power;
        default: return none;
    }
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

std::string si_unit_name(Quantity kind) {
    switch (kind) {
        case Quantity::frequency: return "rad/s";
        case Quantity::rate: return "1/s";
        case Quantity::time: return "s";
        case Quantity::temperature: return "K";
        case Quantity::length: return "m";
        case Quantity::voltage: return "V";
        case Quantity::energy: return "J";
        case Quantity::power: return "W";
        default: return "";
    }
}

double parse_quantity(const std::string& text, Quantity kind) {
    const std::string t = trim(text);
    if (t.empty()) throw config_error("empty value");

    if (kind == Quantity::boolean) {
        if (t == "true" || t == "1") return 1.0;
        if (t == "false" || t == "0") return 0.0;
        throw config_error("boolean value must be true/false, got '" + t + "'");
    }

    size_t used = 0;
    double v;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw config_error("malformed number in '" + t + "'");
    }
    std::string suffix = trim(t.substr(used));

    if (kind == Quantity::number) {
        if (!suffix.empty())
            throw config_error("dimensionless value must not carry a unit: '" + t + "'");
        return v;
    }
    if (kind == Quantity::integer) {
        if (!suffix.empty() || v != std::floor(v))
            throw config_error("integer value expected, got '" + t + "'");
        return v;
    }

    const auto& table = suffixes_for(kind);
    if (suffix.empty())
        throw config_error("value '" + t + "' needs a unit suffix (e.g. " +
                           table.front().name + ")");
    for (const auto& s : table)
        if (suffix == s.name) return v * s.mult;
    throw config_error("malformed unit suffix '" + suffix + "' in '" + t + "'");
}

std::string format_quantity(double value, Quantity kind) {
    char buf[64];
    if (kind == Quantity::boolean) return value != 0.0 ? "true" : "false";
    if (kind == Quantity::integer) {
        std::snprintf(buf, sizeof buf, "%.0f", value);
        return buf;
    }
    if (kind == Quantity::number) {
        std::snprintf(buf, sizeof buf, "%.17g", value);
        return buf;
    }

    const auto& table = suffixes_for(kind);
    // prefer the suffix that puts the mantissa in [1, 1000)
    std::vector<size_t> order(table.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        auto score = [&](size_t i) {
            if (value == 0.0) return 0.0;
            const double m = std::abs(value) / table[i].mult;
            return (m >= 1.0 && m < 1000.0) ? 0.0 : std::abs(std::log10(m));
        };
        return score(a) < score(b);
    });

    for (size_t idx : order) {
        // nudge the printed mantissa by up to 4 ulps until it reparses exactly
        const double mant = value / table[idx].mult;
        for (int k = 0; k <= 8; ++k) {
            const int steps = (k + 1) / 2;
            const int dir = (k % 2 == 1) ? 1 : -1;
            double m = mant;
            for (int j = 0; j < steps; ++j)
                m = std::nextafter(m, dir > 0 ? HUGE_VAL : -HUGE_VAL);
            std::snprintf(buf, sizeof buf, "%.17g %s", m, table[idx].name);
            if (parse_quantity(buf, kind) == value) return buf;
        }
    }
    // fall back to the base suffix at full precision
    std::snprintf(buf, sizeof buf, "%.17g %s", value / table.front().mult,
                  table.front().name);
    return buf;
}

void Config::set(const std::string& section, const std::string& key, const std::string& raw,
                 long line) {
    sections[section][key] = Entry{raw, line};
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
    auto s = sections.find(section);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
}

void Config::merge(const Config& other) {
    for (const auto& [sec, keys] : other.sections)
        for (const auto& [key, entry] : keys)
            sections[sec][key] = entry;
}

Config Config::parse_stream(std::istream& is) {
    Config cfg;
    std::string line;
    std::string section;
    long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw config_error("bad section header at line " + std::to_string(line_no));
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw config_error("empty section name at line " + std::to_string(line_no));
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error("expected key = value at line " + std::to_string(line_no));
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (section.empty())
            throw config_error("key outside any [section] at line " + std::to_string(line_no));
        if (key.empty() || val.empty())
            throw config_error("empty key or value at line " + std::to_string(line_no));
        cfg.set(section, key, val, line_no);
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot open config file: " + path);
    return parse_stream(is);
}

const std::vector<SchemaEntry>& config_schema() {
    static const std::vector<SchemaEntry> schema = {
        {"circuit", "omega_e", Quantity::frequency, "986 MHz"},
        {"circuit", "omega_mw", Quantity::frequency, "1 GHz"},
        {"circuit", "omega_q", Quantity::frequency, "4 GHz"},
        {"circuit", "g_ec", Quantity::frequency, "33 kHz"},
        {"circuit", "g_sc", Quantity::frequency, "200 MHz"},

        {"sweep", "start", Quantity::frequency, "950.05 MHz"},
        {"sweep", "stop", Quantity::frequency, "1049.85 MHz"},
        {"sweep", "points", Quantity::integer, "500"},
        {"sweep", "n_fock", Quantity::integer, "6"},

        {"electron_ion", "omega_e", Quantity::frequency, "800 MHz"},
        {"electron_ion", "omega_i", Quantity::frequency, "2 MHz"},
        {"electron_ion", "separation", Quantity::length, "10 um"},
        {"electron_ion", "ion_mass_u", Quantity::number, "9.012"},
        {"electron_ion", "beta", Quantity::frequency, "0 Hz"},
        {"electron_ion", "alpha_k", Quantity::frequency, "0 Hz"},

        {"thermal", "temperature", Quantity::temperature, "300 mK"},
        // readout-mode loss rate at Q = 1e6 for the 1 GHz cavity
        {"thermal", "gamma_th", Quantity::rate, "6283.185307179586 Hz"},
        {"thermal", "lambda_heat", Quantity::rate, "0 Hz"},

        {"protocol", "rabi_gf", Quantity::frequency, "4 MHz"},
        {"protocol", "rabi_ef", Quantity::frequency, "4 MHz"},
        {"protocol", "rabi_ge", Quantity::frequency, "10 MHz"},
        {"protocol", "t_meas", Quantity::time, "1 us"},
        {"protocol", "pulse_error", Quantity::number, "0.01"},
        {"protocol", "readout_error", Quantity::number, "0.01"},
        {"protocol", "n_cavity_max", Quantity::integer, "60"},
        {"protocol", "n_cycles", Quantity::integer, "60"},
        {"protocol", "ladder_approx", Quantity::boolean, "true"},
        {"protocol", "refill", Quantity::boolean, "true"},
        // negative = start from the thermal occupation of the cavity
        {"protocol", "init_nbar", Quantity::number, "-1"},

        {"cavity", "gamma_c", Quantity::frequency, "33 kHz"},
        {"cavity", "omega", Quantity::frequency, "1 GHz"},
        {"cavity", "lambda_heat", Quantity::rate, "140 Hz"},

        {"sympathetic", "g", Quantity::frequency, "33 kHz"},
        {"sympathetic", "gamma_i", Quantity::frequency, "10 kHz"},
        {"sympathetic", "gamma_th_e", Quantity::rate, "10 Hz"},
        {"sympathetic", "omega", Quantity::frequency, "800 MHz"},
        // negative = derive from thermal.temperature and sympathetic.omega
        {"sympathetic", "n_th", Quantity::number, "-1"},

        {"readout", "omega_mw", Quantity::frequency, "1.2 GHz"},
        {"readout", "g_ec", Quantity::frequency, "33 kHz"},
        {"readout", "quality_factor", Quantity::number, "1e5"},
        // negative = derive kappa_int from quality_factor, kappa_ext = kappa_int
        {"readout", "kappa_int", Quantity::rate, "-1 Hz"},
        {"readout", "kappa_ext", Quantity::rate, "-1 Hz"},
        // back-solved from a -195 dBm/Hz noise floor
        {"readout", "noise_temperature", Quantity::temperature, "2.2904283856131278 K"},

        {"trap", "layout", Quantity::text, "fiverail"},
        {"trap", "species", Quantity::text, "electron"},
        {"trap", "mw_voltage", Quantity::voltage, "20 V"},
        {"trap", "rf_voltage", Quantity::voltage, "30 V"},
        {"trap", "mw_drive", Quantity::frequency, "4 GHz"},
        {"trap", "rf_drive", Quantity::frequency, "40 MHz"},
        {"trap", "grid_nx", Quantity::integer, "201"},
        {"trap", "grid_nz", Quantity::integer, "201"},
        {"trap", "z_min", Quantity::length, "2 um"},
        {"trap", "z_max", Quantity::length, "400 um"},
        {"trap", "fieldmap_drive", Quantity::frequency, "4 GHz"},

        {"coax", "secular", Quantity::frequency, "1.2 GHz"},
        {"coax", "drive", Quantity::frequency, "6 GHz"},
        {"coax", "depth", Quantity::energy, "3.0 eV"},
    };
    return schema;
}

ResolvedConfig ResolvedConfig::resolve(const Config& cfg) {
    const auto& schema = config_schema();

    // reject unknown keys first, with their line numbers
    for (const auto& [sec, keys] : cfg.sections)
        for (const auto& [key, entry] : keys) {
            bool known = false;
            for (const auto& se : schema)
                if (sec == se.section && key == se.key) {
                    known = true;
                    break;
                }
            if (!known)
                throw config_error("unknown config key '" + sec + "." + key + "'" +
                                   (entry.line ? " at line " + std::to_string(entry.line)
                                               : ""));
        }

    ResolvedConfig rc;
    for (const auto& se : schema) {
        const std::string id = std::string(se.section) + "." + se.key;
        const Config::Entry* e = cfg.find(se.section, se.key);
        const std::string raw = e ? e->raw : (se.default_raw ? se.default_raw : "");
        if (raw.empty()) continue;
        rc.kinds_[id] = se.kind;
        if (se.kind == Quantity::text) {
            rc.texts_[id] = raw;
            continue;
        }
        try {
            rc.numbers_[id] = parse_quantity(raw, se.kind);
        } catch (const config_error& err) {
            throw config_error(std::string(err.what()) + " for key '" + id + "'" +
                               (e && e->line ? " at line " + std::to_string(e->line) : ""));
        }
    }
    return rc;
}

double ResolvedConfig::get(const std::string& section, const std::string& key) const {
    auto it = numbers_.find(section + "." + key);
    if (it == numbers_.end())
        throw config_error("missing config value " + section + "." + key);
    return it->second;
}

long ResolvedConfig::get_int(const std::string& section, const std::string& key) const {
    return static_cast<long>(get(section, key));
}

bool ResolvedConfig::get_bool(const std::string& section, const std::string& key) const {
    return get(section, key) != 0.0;
}

std::string ResolvedConfig::get_text(const std::string& section,
                                     const std::string& key) const {
    auto it = texts_.find(section + "." + key);
    if (it == texts_.end())
        throw config_error("missing config value " + section + "." + key);
    return it->second;
}

void ResolvedConfig::echo(std::ostream& os) const {
    char buf[96];
    for (const auto& [id, v] : numbers_) {
        const Quantity kind = kinds_.at(id);
        const std::string unit = si_unit_name(kind);
        std::snprintf(buf, sizeof buf, "%s = %.12g %s\n", id.c_str(), v, unit.c_str());
        os << buf;
    }
    for (const auto& [id, v] : texts_) os << id << " = " << v << "\n";
}

Config preset_config(const std::string& name) {
    Config c;
    auto table2_row = [&](const char* fe, const char* L) {
        c.set("electron_ion", "omega_e", fe);
        c.set("electron_ion", "omega_i", "2 MHz");
        c.set("electron_ion", "separation", L);
        c.set("sympathetic", "omega", fe);
    };
    if (name == "table1") {
        c.set("circuit", "omega_mw", "1 GHz");
        c.set("circuit", "omega_q", "4 GHz");
        c.set("circuit", "g_ec", "33 kHz");
        c.set("circuit", "g_sc", "200 MHz");
    } else if (name == "table2-row1") {
        table2_row("800 MHz", "10 um");
    } else if (name == "table2-row2") {
        table2_row("800 MHz", "50 um");
    } else if (name == "table2-row3") {
        table2_row("500 MHz", "10 um");
    } else if (name == "table2-row4") {
        table2_row("500 MHz", "7 um");
    } else if (name == "fiverail") {
        c.set("trap", "layout", "fiverail");
    } else if (name == "coax") {
        c.set("trap", "layout", "coax");
    } else {
        throw config_error("unknown preset '" + name + "'");
    }
    return c;
}

std::vector<std::string> preset_names() {
    return {"table1", "table2-row1", "table2-row2", "table2-row3",
            "table2-row4", "fiverail", "coax"};
}

} // namespace etrap
