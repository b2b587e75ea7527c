#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hfs/dynamics.hpp"
#include "hfs/sweep.hpp"

namespace hfs {

enum class Unit { None, MHz, Gamma, DeltaU };

/// A literal value as written in a configuration file.
struct ConfigValue
{
    enum class Kind { Number, Integer, Boolean, List };

    Kind kind = Kind::Number;
    std::vector<double> numbers; // Number/Integer: one element; List: two or more
    bool boolean = false;
    Unit unit = Unit::None;

    double number() const { return numbers.at(0); }
    friend bool operator==(const ConfigValue&, const ConfigValue&) = default;
};

struct ConfigEntry
{
    std::string key;
    ConfigValue value;
    int line = 0; // source line, 0 for programmatic entries; not part of equality

    friend bool operator==(const ConfigEntry& a, const ConfigEntry& b) { return a.key == b.key && a.value == b.value; }
};

struct ConfigSection
{
    std::string name;
    std::vector<ConfigEntry> entries;

    friend bool operator==(const ConfigSection&, const ConfigSection&) = default;
};

struct ConfigDocument
{
    std::vector<ConfigSection> sections;

    const ConfigValue* find(std::string_view section, std::string_view key) const;
    /// Replaces an existing entry or appends it (creating the section).
    void set(std::string_view section, std::string_view key, ConfigValue value);

    friend bool operator==(const ConfigDocument&, const ConfigDocument&) = default;
};

enum class ConfigErrorKind { Syntax, UnknownKey, UnitMismatch, DuplicateKey, InvalidValue };

class ConfigError : public std::runtime_error
{
public:
    ConfigError(ConfigErrorKind kind, int line, int column, const std::string& message);

    ConfigErrorKind kind() const { return m_kind; }
    int line() const { return m_line; }
    int column() const { return m_column; }

private:
    ConfigErrorKind m_kind;
    int m_line;
    int m_column;
};

/// Strict parse of the sectioned `key = value` format. Keys and units are
/// checked against the known schema.
ConfigDocument parse_config(std::string_view text);
ConfigDocument parse_config_file(const std::string& path);

/// Parses a single value literal, e.g. "0.5 gamma", "-5 delta_u", "0.5, 5, 20".
ConfigValue parse_value(std::string_view text, int line = 0, int column = 1);

/// Canonical text; parse_config(serialize_config(d)) == d.
std::string serialize_config(const ConfigDocument& doc);

/// Applies "section.key=value" (schema-checked) to `doc`.
void apply_override(ConfigDocument& doc, std::string_view assignment);

/// 16 hex digits of the FNV-1a hash of the canonical serialization.
std::string config_hash(const ConfigDocument& doc);

struct RunConfig
{
    SystemParams params;
    double omega = 5.0;   // drive, gamma units
    double delta_c = 0.0; // drive, gamma units
    bool ndd = false;     // drive
    SweepSpec sweep;
    SolveOptions solver;
    EvolveOptions evolve;
    double t_end = 20.0;
    RelaxOptions relax;

    Drive drive() const { return Drive::make(params, omega, delta_c, ndd); }
};

/// Resolves units against the (possibly overridden) system constants and
/// fills unspecified entries with the sodium D1 defaults.
RunConfig resolve_config(const ConfigDocument& doc);

} // namespace hfs
