#include "hfs/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "hfs/constants.hpp"
#include "hfs/io_format.hpp"

namespace hfs {

ConfigError::ConfigError(ConfigErrorKind kind, int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      m_kind(kind), m_line(line), m_column(column)
{
}

namespace {

enum class Type { Float, Int, Bool, FloatList };

struct KeySpec
{
    Type type;
    std::vector<Unit> units; // accepted units, Unit::None meaning a bare number
};

const std::vector<Unit> kBareOnly{Unit::None};
const std::vector<Unit> kRate{Unit::None, Unit::Gamma, Unit::MHz};
const std::vector<Unit> kDetuning{Unit::None, Unit::Gamma, Unit::MHz, Unit::DeltaU};
const std::vector<Unit> kTaggedDetuning{Unit::Gamma, Unit::MHz, Unit::DeltaU};
const std::vector<Unit> kAbsolute{Unit::None, Unit::MHz};

const std::map<std::string, std::map<std::string, KeySpec>, std::less<>>& schema()
{
    static const std::map<std::string, std::map<std::string, KeySpec>, std::less<>> s{
        {"system",
         {{"gamma_ref", {Type::Float, kAbsolute}},
          {"gamma_31", {Type::Float, kRate}},
          {"gamma_32", {Type::Float, kRate}},
          {"gamma_41", {Type::Float, kRate}},
          {"gamma_42", {Type::Float, kRate}},
          {"delta_g", {Type::Float, kRate}},
          {"delta_e", {Type::Float, kRate}},
          {"number_density", {Type::Float, kBareOnly}},
          {"dipole", {Type::Float, kBareOnly}},
          {"mu_13", {Type::Float, kBareOnly}},
          {"mu_14", {Type::Float, kBareOnly}},
          {"mu_23", {Type::Float, kBareOnly}},
          {"mu_24", {Type::Float, kBareOnly}},
          {"omega0", {Type::Float, kAbsolute}}}},
        {"drive",
         {{"omega", {Type::Float, kRate}}, {"delta_c", {Type::Float, kDetuning}}, {"ndd", {Type::Bool, {}}}}},
        {"sweep",
         {{"delta_c_min", {Type::Float, kTaggedDetuning}},
          {"delta_c_max", {Type::Float, kTaggedDetuning}},
          {"count", {Type::Int, kBareOnly}},
          {"delta_c_list", {Type::FloatList, kTaggedDetuning}},
          {"omegas", {Type::FloatList, kRate}},
          {"ndd", {Type::Bool, {}}},
          {"symmetric", {Type::Bool, {}}}}},
        {"solver",
         {{"fp_tol", {Type::Float, kBareOnly}},
          {"max_iters", {Type::Int, kBareOnly}},
          {"damping", {Type::Float, kBareOnly}},
          {"rtol", {Type::Float, kBareOnly}},
          {"atol", {Type::Float, kBareOnly}},
          {"t_end", {Type::Float, kBareOnly}},
          {"residual_tol", {Type::Float, kBareOnly}},
          {"t_max", {Type::Float, kBareOnly}}}},
    };
    return s;
}

const char* unit_text(Unit u)
{
    switch (u) {
    case Unit::MHz: return "MHz";
    case Unit::Gamma: return "gamma";
    case Unit::DeltaU: return "delta_u";
    case Unit::None: return "";
    }
    return "";
}

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

int column_of(std::string_view line, std::string_view part)
{
    return static_cast<int>(part.data() - line.data()) + 1;
}

bool valid_identifier(std::string_view s)
{
    if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z'))
        return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'; });
}

bool parse_double(std::string_view s, double& out)
{
    if (s.empty())
        return false;
    if (s.front() == '+')
        s.remove_prefix(1);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size() && std::isfinite(out);
}

bool looks_integral(std::string_view s)
{
    if (!s.empty() && (s.front() == '-' || s.front() == '+'))
        s.remove_prefix(1);
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

const KeySpec& lookup(std::string_view section, std::string_view key, int line, int column)
{
    const auto& s = schema();
    const auto sec = s.find(section);
    if (sec == s.end())
        throw ConfigError(ConfigErrorKind::UnknownKey, line, column, "unknown section [" + std::string(section) + "]");
    const auto k = sec->second.find(std::string(key));
    if (k == sec->second.end())
        throw ConfigError(ConfigErrorKind::UnknownKey, line, column,
                          "unknown key '" + std::string(key) + "' in [" + std::string(section) + "]");
    return k->second;
}

void check_against_schema(const KeySpec& spec, const ConfigValue& v, std::string_view key, int line, int column)
{
    const std::string k(key);
    switch (spec.type) {
    case Type::Bool:
        if (v.kind != ConfigValue::Kind::Boolean)
            throw ConfigError(ConfigErrorKind::InvalidValue, line, column, "'" + k + "' expects true or false");
        return;
    case Type::Int:
        if (v.kind != ConfigValue::Kind::Integer)
            throw ConfigError(ConfigErrorKind::InvalidValue, line, column, "'" + k + "' expects an integer");
        break;
    case Type::Float:
        if (v.kind != ConfigValue::Kind::Number && v.kind != ConfigValue::Kind::Integer)
            throw ConfigError(ConfigErrorKind::InvalidValue, line, column, "'" + k + "' expects a number");
        break;
    case Type::FloatList:
        if (v.kind == ConfigValue::Kind::Boolean)
            throw ConfigError(ConfigErrorKind::InvalidValue, line, column, "'" + k + "' expects a list of numbers");
        break;
    }
    if (std::find(spec.units.begin(), spec.units.end(), v.unit) == spec.units.end()) {
        const std::string msg = v.unit == Unit::None
                                    ? "'" + k + "' requires a unit suffix"
                                    : "unit '" + std::string(unit_text(v.unit)) + "' is not valid for '" + k + "'";
        throw ConfigError(ConfigErrorKind::UnitMismatch, line, column, msg);
    }
}

ConfigSection& section_of(ConfigDocument& doc, std::string_view name)
{
    auto it = std::find_if(doc.sections.begin(), doc.sections.end(), [&](const auto& s) { return s.name == name; });
    if (it != doc.sections.end())
        return *it;
    doc.sections.push_back({std::string(name), {}});
    return doc.sections.back();
}

std::string format_number(double v)
{
    std::string s = format_double(v);
    if (s.find_first_of(".en") == std::string::npos)
        s += ".0";
    return s;
}

} // namespace

const ConfigValue* ConfigDocument::find(std::string_view section, std::string_view key) const
{
    for (const auto& s : sections)
        if (s.name == section)
            for (const auto& e : s.entries)
                if (e.key == key)
                    return &e.value;
    return nullptr;
}

void ConfigDocument::set(std::string_view section, std::string_view key, ConfigValue value)
{
    auto& sec = section_of(*this, section);
    for (auto& e : sec.entries) {
        if (e.key == key) {
            e.value = std::move(value);
            return;
        }
    }
    sec.entries.push_back({std::string(key), std::move(value), 0});
}

ConfigValue parse_value(std::string_view text, int line, int column)
{
    const std::string_view v = trim(text);
    if (v.empty())
        throw ConfigError(ConfigErrorKind::Syntax, line, column, "missing value");
    if (v == "true" || v == "false")
        return {ConfigValue::Kind::Boolean, {}, v == "true", Unit::None};

    ConfigValue out;
    std::string_view numeric = v;
    const auto last_space = v.find_last_of(" \t");
    if (last_space != std::string_view::npos) {
        const std::string_view tail = trim(v.substr(last_space + 1));
        const bool alpha = !tail.empty() && std::all_of(tail.begin(), tail.end(), [](char c) {
            return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
        });
        if (alpha) {
            if (tail == "MHz")
                out.unit = Unit::MHz;
            else if (tail == "gamma")
                out.unit = Unit::Gamma;
            else if (tail == "delta_u")
                out.unit = Unit::DeltaU;
            else
                throw ConfigError(ConfigErrorKind::Syntax, line, column, "unknown unit '" + std::string(tail) + "'");
            numeric = trim(v.substr(0, last_space));
        }
    }

    std::vector<std::string_view> parts;
    for (std::size_t start = 0;;) {
        const auto comma = numeric.find(',', start);
        parts.push_back(trim(numeric.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                    : comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    for (const auto p : parts) {
        double x = 0;
        if (!parse_double(p, x))
            throw ConfigError(ConfigErrorKind::Syntax, line, column,
                              "expected a number, got '" + std::string(p.empty() ? v : p) + "'");
        out.numbers.push_back(x);
    }
    if (parts.size() > 1)
        out.kind = ConfigValue::Kind::List;
    else
        out.kind = looks_integral(parts[0]) ? ConfigValue::Kind::Integer : ConfigValue::Kind::Number;
    return out;
}

ConfigDocument parse_config(std::string_view text)
{
    ConfigDocument doc;
    std::string current;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        const std::string_view body = trim(line);
        if (body.empty())
            continue;

        if (body.front() == '[') {
            if (body.back() != ']')
                throw ConfigError(ConfigErrorKind::Syntax, line_no, column_of(raw, body), "unterminated section header");
            const std::string_view name = trim(body.substr(1, body.size() - 2));
            if (!valid_identifier(name))
                throw ConfigError(ConfigErrorKind::Syntax, line_no, column_of(raw, body), "invalid section name");
            if (schema().find(name) == schema().end())
                throw ConfigError(ConfigErrorKind::UnknownKey, line_no, column_of(raw, body),
                                  "unknown section [" + std::string(name) + "]");
            current = std::string(name);
            section_of(doc, current);
            continue;
        }

        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(ConfigErrorKind::Syntax, line_no, column_of(raw, body), "expected 'key = value'");
        if (current.empty())
            throw ConfigError(ConfigErrorKind::Syntax, line_no, column_of(raw, body), "entry outside of a section");
        const std::string_view key = trim(body.substr(0, eq));
        const std::string_view value_text = trim(body.substr(eq + 1));
        if (!valid_identifier(key))
            throw ConfigError(ConfigErrorKind::Syntax, line_no, column_of(raw, body),
                              "invalid key '" + std::string(key) + "'");
        const int value_col = value_text.empty() ? column_of(raw, body) + static_cast<int>(eq) + 1
                                                 : column_of(raw, value_text);
        const KeySpec& spec = lookup(current, key, line_no, column_of(raw, key));
        ConfigValue value = parse_value(value_text, line_no, value_col);
        check_against_schema(spec, value, key, line_no, value_col);

        auto& sec = section_of(doc, current);
        for (const auto& e : sec.entries)
            if (e.key == key)
                throw ConfigError(ConfigErrorKind::DuplicateKey, line_no, column_of(raw, key),
                                  "duplicate key '" + std::string(key) + "' (first set on line " +
                                      std::to_string(e.line) + ")");
        sec.entries.push_back({std::string(key), std::move(value), line_no});
    }
    return doc;
}

ConfigDocument parse_config_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(e.kind(), e.line(), e.column(), path + ": " + std::string(e.what()));
    }
}

std::string serialize_config(const ConfigDocument& doc)
{
    std::string out;
    for (const auto& s : doc.sections) {
        out += "[" + s.name + "]\n";
        for (const auto& e : s.entries) {
            out += e.key + " = ";
            const auto& v = e.value;
            switch (v.kind) {
            case ConfigValue::Kind::Boolean:
                out += v.boolean ? "true" : "false";
                break;
            case ConfigValue::Kind::Integer: {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.0f", v.number());
                out += buf;
                break;
            }
            case ConfigValue::Kind::Number:
                out += format_number(v.number());
                break;
            case ConfigValue::Kind::List:
                for (std::size_t i = 0; i < v.numbers.size(); ++i)
                    out += (i ? ", " : "") + format_number(v.numbers[i]);
                break;
            }
            if (v.unit != Unit::None)
                out += std::string(" ") + unit_text(v.unit);
            out += "\n";
        }
    }
    return out;
}

void apply_override(ConfigDocument& doc, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    const std::string_view lhs = trim(assignment.substr(0, eq));
    const auto dot = lhs.find('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos)
        throw ConfigError(ConfigErrorKind::Syntax, 0, 1,
                          "override must look like section.key=value, got '" + std::string(assignment) + "'");
    const std::string_view section = lhs.substr(0, dot);
    const std::string_view key = lhs.substr(dot + 1);
    const KeySpec& spec = lookup(section, key, 0, 1);
    ConfigValue v = parse_value(assignment.substr(eq + 1), 0, static_cast<int>(eq) + 2);
    check_against_schema(spec, v, key, 0, static_cast<int>(eq) + 2);
    doc.set(section, key, std::move(v));
}

std::string config_hash(const ConfigDocument& doc)
{
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : serialize_config(doc)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunConfig resolve_config(const ConfigDocument& doc)
{
    namespace na = constants::sodium_d1;
    RunConfig rc;
    SystemParams& p = rc.params;
    p = SystemParams::sodium_d1();

    const auto get = [&](std::string_view section, std::string_view key) { return doc.find(section, key); };
    const auto absolute = [](const ConfigValue& v, double x) {
        return v.unit == Unit::MHz ? constants::mhz_to_rad_per_s(x) : x;
    };

    if (const auto* v = get("system", "gamma_ref"))
        p.gamma_ref = absolute(*v, v->number());
    // bare numbers and `gamma` are already internal units
    const auto internal = [&](const ConfigValue& v, double x) {
        switch (v.unit) {
        case Unit::MHz: return constants::mhz_to_rad_per_s(x) / p.gamma_ref;
        case Unit::DeltaU: return x * p.delta_u();
        default: return x;
        }
    };
    // splittings keep their MHz meaning when only gamma_ref changes
    p.delta_g = constants::mhz_to_rad_per_s(na::delta_g_mhz) / p.gamma_ref;
    p.delta_e = constants::mhz_to_rad_per_s(na::delta_e_mhz) / p.gamma_ref;

    const std::pair<const char*, Coupling> rates[] = {
        {"gamma_31", c13}, {"gamma_41", c14}, {"gamma_32", c23}, {"gamma_42", c24}};
    for (const auto& [key, c] : rates)
        if (const auto* v = get("system", key))
            p.decay[c] = internal(*v, v->number());
    const std::pair<const char*, Coupling> mus[] = {{"mu_13", c13}, {"mu_14", c14}, {"mu_23", c23}, {"mu_24", c24}};
    for (const auto& [key, c] : mus)
        if (const auto* v = get("system", key))
            p.mu_scale[c] = v->number();
    if (const auto* v = get("system", "delta_g"))
        p.delta_g = internal(*v, v->number());
    if (const auto* v = get("system", "delta_e"))
        p.delta_e = internal(*v, v->number());
    if (const auto* v = get("system", "number_density"))
        p.number_density = v->number();
    if (const auto* v = get("system", "dipole"))
        p.dipole_moment = v->number();
    if (const auto* v = get("system", "omega0"))
        p.omega0 = absolute(*v, v->number());
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(ConfigErrorKind::InvalidValue, 0, 1, std::string("[system]: ") + e.what());
    }

    if (const auto* v = get("drive", "omega"))
        rc.omega = internal(*v, v->number());
    if (const auto* v = get("drive", "delta_c"))
        rc.delta_c = internal(*v, v->number());
    if (const auto* v = get("drive", "ndd"))
        rc.ndd = v->boolean;

    // sweep
    SweepSpec& s = rc.sweep;
    const auto* list = get("sweep", "delta_c_list");
    const auto* lo = get("sweep", "delta_c_min");
    const auto* hi = get("sweep", "delta_c_max");
    const auto* count = get("sweep", "count");
    if (list && (lo || hi || count))
        throw ConfigError(ConfigErrorKind::InvalidValue, 0, 1,
                          "[sweep]: delta_c_list cannot be combined with delta_c_min/delta_c_max/count");
    if (list) {
        for (double x : list->numbers)
            s.delta_c.push_back(internal(*list, x));
        s.unit = list->unit == Unit::DeltaU ? GridUnit::DeltaU : GridUnit::Gamma;
        s.symmetric = false;
    } else {
        // grid is built in the unit it was written in, so mirror symmetry is exact
        const ConfigValue default_lo{ConfigValue::Kind::Number, {-5.0}, false, Unit::DeltaU};
        const ConfigValue default_hi{ConfigValue::Kind::Number, {5.0}, false, Unit::DeltaU};
        const ConfigValue& vlo = lo ? *lo : default_lo;
        const ConfigValue& vhi = hi ? *hi : default_hi;
        const int n = count ? static_cast<int>(count->number()) : 2001;
        if (n < 3)
            throw ConfigError(ConfigErrorKind::InvalidValue, 0, 1, "[sweep]: count must be at least 3");
        if (vlo.unit == vhi.unit) {
            s.delta_c = linear_grid(vlo.number(), vhi.number(), n);
            for (auto& x : s.delta_c)
                x = internal(vlo, x);
        } else {
            s.delta_c = linear_grid(internal(vlo, vlo.number()), internal(vhi, vhi.number()), n);
        }
        s.unit = vlo.unit == Unit::DeltaU ? GridUnit::DeltaU : GridUnit::Gamma;
        s.symmetric = s.delta_c.front() == -s.delta_c.back();
    }
    if (const auto* v = get("sweep", "symmetric"))
        s.symmetric = v->boolean;
    if (const auto* v = get("sweep", "omegas")) {
        for (double x : v->numbers)
            s.omegas.push_back(internal(*v, x));
    } else {
        s.omegas = {0.5, 5.0, 20.0, 100.0};
    }
    if (const auto* v = get("sweep", "ndd"))
        s.ndd = v->boolean;

    // solver
    if (const auto* v = get("solver", "fp_tol"))
        rc.solver.fp_tol = v->number();
    if (const auto* v = get("solver", "max_iters"))
        rc.solver.max_iters = static_cast<int>(v->number());
    if (const auto* v = get("solver", "damping"))
        rc.solver.damping = v->number();
    if (const auto* v = get("solver", "rtol"))
        rc.evolve.rtol = v->number();
    if (const auto* v = get("solver", "atol"))
        rc.evolve.atol = v->number();
    if (const auto* v = get("solver", "t_end"))
        rc.t_end = v->number();
    if (const auto* v = get("solver", "residual_tol"))
        rc.relax.residual_tol = v->number();
    if (const auto* v = get("solver", "t_max"))
        rc.relax.t_max = v->number();
    s.solver = rc.solver;

    try {
        rc.solver.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(ConfigErrorKind::InvalidValue, 0, 1, std::string("[solver]: ") + e.what());
    }
    return rc;
}

} // namespace hfs
