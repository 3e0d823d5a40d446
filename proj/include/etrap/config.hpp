#ifndef ETRAP_CONFIG_HPP
#define ETRAP_CONFIG_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "etrap/errors.hpp"

namespace etrap {

/// Dimension of a config quantity. `frequency` values convert Hz-family
/// suffixes to rad/s; `rate` keeps them as plain 1/s (heating and bath rates
/// are quoted that way).
enum class Quantity {
    frequency,
    rate,
    time,
    temperature,
    length,
    voltage,
    energy,
    power,
    number,
    integer,
    boolean,
    text,
};

/// Parses "<number> [suffix]" into SI units for the kind. Throws
/// config_error on an unknown or dimensionally wrong suffix.
double parse_quantity(const std::string& text, Quantity kind);

/// Formats an SI value with a canonical suffix so parse(format(x)) == x.
std::string format_quantity(double value, Quantity kind);

/// SI unit name for echo output.
std::string si_unit_name(Quantity kind);

/// Sectioned key-value document; values stay raw until resolution.
struct Config {
    struct Entry {
        std::string raw;
        long line = 0;
    };
    std::map<std::string, std::map<std::string, Entry>> sections;

    void set(const std::string& section, const std::string& key, const std::string& raw,
             long line = 0);
    const Entry* find(const std::string& section, const std::string& key) const;

    /// Later entries win.
    void merge(const Config& other);

    static Config parse_stream(std::istream& is);
    static Config parse_file(const std::string& path);
};

/// Known keys with kinds and defaults. Unknown keys are rejected at
/// resolution time with the offending line.
struct SchemaEntry {
    const char* section;
    const char* key;
    Quantity kind;
    const char* default_raw; // nullptr = required when used
};

const std::vector<SchemaEntry>& config_schema();

/// Fully resolved, SI-unit parameter set.
class ResolvedConfig {
public:
    static ResolvedConfig resolve(const Config& cfg);

    double get(const std::string& section, const std::string& key) const;
    long get_int(const std::string& section, const std::string& key) const;
    bool get_bool(const std::string& section, const std::string& key) const;
    std::string get_text(const std::string& section, const std::string& key) const;

    /// Deterministic dump of every resolved value in SI units.
    void echo(std::ostream& os) const;

private:
    std::map<std::string, double> numbers_;
    std::map<std::string, std::string> texts_;
    std::map<std::string, Quantity> kinds_;
};

/// Named presets: table1, table2-row1..table2-row4, fiverail, coax.
Config preset_config(const std::string& name);
std::vector<std::string> preset_names();

} // namespace etrap

#endif
