#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "catch_amalgamated.hpp"

#include "hfs/cli.hpp"
#include "hfs/config.hpp"

using namespace hfs;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

#ifndef HFS_SOURCE_DIR
#error "HFS_SOURCE_DIR must point at the source tree"
#endif

namespace {

ConfigErrorKind error_kind(std::string_view text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.kind();
    }
    FAIL("no error raised for: " << text);
    return ConfigErrorKind::Syntax;
}

struct CliRun
{
    int code;
    std::string out, err;
};

CliRun cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "hfs");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

double field(const std::string& text, const std::string& name)
{
    std::istringstream in(text);
    std::string key;
    double v = NAN;
    while (in >> key) {
        if (key == name) {
            in >> v;
            return v;
        }
        in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    }
    return v;
}

std::string reference_cfg() { return std::string(HFS_SOURCE_DIR) + "/configs/reference.cfg"; }

std::filesystem::path temp_path(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("hfs_cli_" + name);
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config grammar", "[cli-config]")
{
    const auto doc = parse_config("[drive]\nomega = 5 gamma\ndelta_c = 1 delta_u");
    const auto rc = resolve_config(doc);
    CHECK(rc.omega == 5.0);
    CHECK(rc.delta_c == rc.params.delta_u());

    const auto* v = doc.find("drive", "omega");
    REQUIRE(v != nullptr);
    CHECK(v->kind == ConfigValue::Kind::Integer);
    CHECK(v->unit == Unit::Gamma);

    const auto lists = parse_config("# header\n[sweep]\n  omegas = 0.5, 5 ,20,1e2 gamma  # trailing\n\nndd = true\n");
    const auto* o = lists.find("sweep", "omegas");
    REQUIRE(o != nullptr);
    CHECK(o->kind == ConfigValue::Kind::List);
    CHECK(o->numbers == std::vector<double>{0.5, 5.0, 20.0, 100.0});
    CHECK(lists.find("sweep", "ndd")->boolean);

    CHECK(parse_value("-1.25e-3").number() == -1.25e-3);
    CHECK(parse_value("+7").kind == ConfigValue::Kind::Integer);
    CHECK(parse_value("9.76 MHz").unit == Unit::MHz);
}

TEST_CASE("defaults", "[cli-config]")
{
    const auto rc = resolve_config(parse_config("[system]\n"));
    CHECK_THAT(rc.params.to_si(rc.params.delta_u()) / (2 * M_PI * 1e6), WithinRel(980.25, 1e-12));
    CHECK(rc.params.number_density == 1.5e20);
    CHECK(rc.params.dipole_moment == 21.1165e-30);
    CHECK(rc.sweep.delta_c.size() == 2001);
    CHECK(rc.sweep.symmetric);
    CHECK(rc.sweep.omegas == std::vector<double>{0.5, 5.0, 20.0, 100.0});
    CHECK_THAT(rc.sweep.delta_c.back(), WithinRel(5 * rc.params.delta_u(), 1e-15));
    CHECK(rc.sweep.delta_c.front() == -rc.sweep.delta_c.back());
}

TEST_CASE("unit resolution", "[cli-config]")
{
    const auto rc = resolve_config(parse_config("[system]\ngamma_41 = 4.88 MHz\n[drive]\nomega = 19.52 MHz\n"
                                                "delta_c = -0.5 delta_u\n"));
    CHECK_THAT(rc.params.decay[c14], WithinRel(0.5, 1e-14));
    CHECK_THAT(rc.omega, WithinRel(2.0, 1e-14));
    CHECK(rc.delta_c == -0.5 * rc.params.delta_u());

    // splittings keep their frequency meaning when the reference rate changes
    const auto scaled = resolve_config(parse_config("[system]\ngamma_ref = 19.52 MHz\n"));
    CHECK_THAT(scaled.params.delta_g, WithinRel(1771.62 / 19.52, 1e-14));
}

TEST_CASE("config errors", "[cli-config]")
{
    try {
        parse_config("[drive]\nomega = fast");
        FAIL("accepted a non-number");
    } catch (const ConfigError& e) {
        CHECK(e.kind() == ConfigErrorKind::Syntax);
        CHECK(e.line() == 2);
        CHECK(e.column() == 9);
    }
    CHECK(error_kind("[drive]\nspeed = 1\n") == ConfigErrorKind::UnknownKey);
    CHECK(error_kind("[laser]\n") == ConfigErrorKind::UnknownKey);
    CHECK(error_kind("[system]\ndelta_g = 1 delta_u\n") == ConfigErrorKind::UnitMismatch);
    CHECK(error_kind("[sweep]\ndelta_c_min = -5\n") == ConfigErrorKind::UnitMismatch);
    CHECK(error_kind("[drive]\nomega = 1\nomega = 2\n") == ConfigErrorKind::DuplicateKey);
    CHECK(error_kind("[drive]\nndd = 1\n") == ConfigErrorKind::InvalidValue);
    CHECK(error_kind("[sweep]\ncount = 2.5\n") == ConfigErrorKind::InvalidValue);
    CHECK(error_kind("[drive]\nOmega = 1\n") == ConfigErrorKind::Syntax);
    CHECK(error_kind("omega = 1\n") == ConfigErrorKind::Syntax);
    CHECK(error_kind("[drive\n") == ConfigErrorKind::Syntax);
    CHECK(error_kind("[drive]\nomega 1\n") == ConfigErrorKind::Syntax);
    CHECK(error_kind("[drive]\nomega = 1 furlong\n") == ConfigErrorKind::Syntax);
    CHECK(error_kind("[drive]\nomega = 1,,2\n") == ConfigErrorKind::Syntax);
    CHECK(error_kind("[drive]\nomega =\n") == ConfigErrorKind::Syntax);
    CHECK_THROWS_AS(resolve_config(parse_config("[sweep]\ncount = 2\n")), ConfigError);
    CHECK_THROWS_AS(resolve_config(parse_config("[solver]\ndamping = 0\n")), ConfigError);
    CHECK_THROWS_AS(resolve_config(parse_config("[system]\ngamma_31 = -1\n")), ConfigError);
}

TEST_CASE("serialization round trip", "[cli-config][property]")
{
    struct Key
    {
        const char* section;
        const char* key;
        int type; // 0 float, 1 int, 2 bool, 3 list
        std::vector<Unit> units;
    };
    const std::vector<Key> keys{
        {"system", "gamma_31", 0, {Unit::None, Unit::Gamma, Unit::MHz}},
        {"system", "delta_e", 0, {Unit::None, Unit::MHz}},
        {"system", "number_density", 0, {Unit::None}},
        {"drive", "omega", 0, {Unit::None, Unit::Gamma, Unit::MHz}},
        {"drive", "delta_c", 0, {Unit::DeltaU, Unit::Gamma, Unit::MHz, Unit::None}},
        {"drive", "ndd", 2, {Unit::None}},
        {"sweep", "count", 1, {Unit::None}},
        {"sweep", "omegas", 3, {Unit::Gamma, Unit::None, Unit::MHz}},
        {"sweep", "delta_c_max", 0, {Unit::DeltaU, Unit::Gamma}},
        {"solver", "max_iters", 1, {Unit::None}},
        {"solver", "fp_tol", 0, {Unit::None}},
    };
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> mant(-10, 10);
    std::uniform_int_distribution<int> expo(-30, 30);
    const auto random_double = [&] { return mant(rng) * std::pow(10.0, expo(rng)); };
    for (int trial = 0; trial < 300; ++trial) {
        ConfigDocument doc;
        for (const auto& k : keys) {
            if (rng() % 3 == 0)
                continue;
            ConfigValue v;
            v.unit = k.units[rng() % k.units.size()];
            switch (k.type) {
            case 0:
                v.kind = ConfigValue::Kind::Number;
                v.numbers = {random_double()};
                if (trial % 4 == 0)
                    v.numbers = {std::round(v.numbers[0] * 1e-25) + 0.0}; // integral-valued floats
                break;
            case 1:
                v.kind = ConfigValue::Kind::Integer;
                v.numbers = {static_cast<double>(static_cast<int>(rng() % 100000))};
                break;
            case 2:
                v.kind = ConfigValue::Kind::Boolean;
                v.boolean = rng() % 2 == 0;
                break;
            default:
                v.kind = ConfigValue::Kind::List;
                for (int n = 0; n < 2 + static_cast<int>(rng() % 4); ++n)
                    v.numbers.push_back(random_double());
            }
            doc.set(k.section, k.key, v);
        }
        const std::string text = serialize_config(doc);
        const auto back = parse_config(text);
        CHECK(back == doc);
        CHECK(serialize_config(back) == text);
        CHECK(config_hash(back) == config_hash(doc));
    }
}

TEST_CASE("overrides and hash", "[cli-config]")
{
    auto doc = parse_config("[drive]\nomega = 5 gamma\n");
    const std::string h0 = config_hash(doc);
    CHECK(h0.size() == 16);
    CHECK(h0.find_first_not_of("0123456789abcdef") == std::string::npos);
    apply_override(doc, "drive.omega=20 gamma");
    apply_override(doc, "sweep.ndd = true");
    CHECK(doc.find("drive", "omega")->number() == 20.0);
    CHECK(doc.find("sweep", "ndd")->boolean);
    CHECK(config_hash(doc) != h0);
    CHECK_THROWS_AS(apply_override(doc, "drive.speed=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "omega=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "system.delta_g=1 delta_u"), ConfigError);

    // comments and layout do not change the hash
    CHECK(config_hash(parse_config("[drive]\nomega = 5 gamma\n")) ==
          config_hash(parse_config("# x\n[drive]\n   omega=5   gamma # y\n")));
}

TEST_CASE("reference config file", "[cli-config]")
{
    const auto rc = resolve_config(parse_config_file(reference_cfg()));
    const auto defaults = resolve_config(ConfigDocument{});
    CHECK_THAT(rc.params.delta_g, WithinRel(defaults.params.delta_g, 1e-15));
    CHECK(rc.sweep.delta_c == defaults.sweep.delta_c);
    CHECK(rc.sweep.omegas == defaults.sweep.omegas);
    CHECK_THROWS(parse_config_file("/nonexistent.cfg"));
}

TEST_CASE("cli steady", "[cli-config]")
{
    const auto r = cli({"steady", "--set", "drive.omega=0.5 gamma", "--set", "drive.delta_c=1 delta_u"});
    CHECK(r.code == 0);
    CHECK(field(r.out, "w_g") > 0.9);
    CHECK(field(r.out, "rho11") + field(r.out, "rho22") + field(r.out, "rho33") + field(r.out, "rho44") ==
          Catch::Approx(1.0).margin(1e-12));

    SECTION("precedence: --ndd over --set over the file")
    {
        const auto a = cli({"-c", reference_cfg(), "steady", "--set", "drive.omega=5 gamma", "--set", "drive.ndd=true",
                            "--ndd", "off"});
        CHECK(a.code == 0);
        CHECK(a.out.find("ndd off") != std::string::npos);
        CHECK(field(a.out, "omega_over_gamma") == 5.0);
        CHECK(field(a.out, "delta_c_over_delta_u") == 1.0);
    }
    SECTION("non-convergence exits 1 with diagnostics")
    {
        const auto bad = cli({"steady", "--ndd", "on", "--set", "solver.max_iters=1", "--set", "solver.fp_tol=1e-15"});
        CHECK(bad.code == 1);
        CHECK_THAT(bad.err, ContainsSubstring("not converged"));
    }
    SECTION("no drive is singular")
    {
        const auto bad = cli({"steady", "--set", "drive.omega=0"});
        CHECK(bad.code == 1);
        CHECK_THAT(bad.err, ContainsSubstring("rcond"));
    }
}

TEST_CASE("cli usage errors", "[cli-config]")
{
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"steady", "--ndd", "maybe"}).code == 2);
    CHECK(cli({"steady", "--set", "drive.speed=1"}).code == 2);
    CHECK(cli({"--config", "/nonexistent.cfg", "steady"}).code == 2);
    const auto bad_value = cli({"steady", "--set", "drive.omega=fast"});
    CHECK(bad_value.code == 2);
    CHECK_THAT(bad_value.err, ContainsSubstring("fast"));
}

TEST_CASE("cli help matches the golden file", "[cli-config]")
{
    const auto r = cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out == slurp(std::string(HFS_SOURCE_DIR) + "/tests/golden/help.txt"));
    for (const char* flag : {"--config", "--set", "--output", "--ndd", "--threads", "--help"})
        CHECK_THAT(r.out, ContainsSubstring(flag));
    const auto ev = cli({"evolve", "--help"});
    CHECK(ev.code == 0);
    CHECK(ev.out == slurp(std::string(HFS_SOURCE_DIR) + "/tests/golden/help_evolve.txt"));
}

TEST_CASE("cli sweep and validate", "[cli-config]")
{
    const auto cfg = temp_path("small.cfg");
    {
        std::ofstream f(cfg);
        f << "[sweep]\ndelta_c_min = -2 delta_u\ndelta_c_max = 2 delta_u\ncount = 101\nomegas = 0.5, 5 gamma\n";
    }
    const auto out = temp_path("out_{hash}.csv");
    const auto r = cli({"sweep", "--config", cfg.string(), "--output", out.string()});
    REQUIRE(r.code == 0);
    const std::string hash = config_hash(parse_config_file(cfg.string()));
    CHECK_THAT(r.out, ContainsSubstring(hash));
    const auto written = temp_path("out_" + hash + ".csv");
    const std::string csv = slurp(written);
    std::string header;
    for (const auto& c : spectrum_columns())
        header += (header.empty() ? "" : ",") + c;
    CHECK(csv.rfind(header + "\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 101);

    const auto json = temp_path("out.json");
    REQUIRE(cli({"sweep", "-c", cfg.string(), "-o", json.string(), "--threads", "1"}).code == 0);
    CHECK(read_json_file(json.string()).records.size() == 2 * 101);

    const auto report = temp_path("report.json");
    const auto v = cli({"validate", "--config", cfg.string(), "--output", report.string()});
    CHECK(v.code == 0);
    CHECK_THAT(v.out, ContainsSubstring("all identities pass"));
    CHECK(std::filesystem::exists(report));

    const auto asym = temp_path("asym.cfg");
    {
        std::ofstream f(asym);
        f << "[sweep]\ndelta_c_min = -2 delta_u\ndelta_c_max = 1 delta_u\ncount = 11\n";
    }
    CHECK(cli({"validate", "--config", asym.string()}).code == 2);

    for (const auto& p : {cfg, written, json, report, asym})
        std::filesystem::remove(p);
}

TEST_CASE("cli validate on the reference config", "[cli-config]")
{
    CHECK(cli({"validate", "--config", reference_cfg()}).code == 0);
}

TEST_CASE("cli evolve", "[cli-config]")
{
    const auto r = cli({"evolve", "--set", "drive.omega=5 gamma", "--t-end", "2", "--samples", "5"});
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 6);
    CHECK(r.out.rfind("t,rho11,", 0) == 0);
    CHECK_THAT(r.out, ContainsSubstring("\n2,"));
}
