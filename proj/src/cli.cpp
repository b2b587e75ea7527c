#include "hfs/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hfs/config.hpp"
#include "hfs/io_format.hpp"
#include "hfs/validation.hpp"

namespace hfs {
namespace {

struct GlobalOptions
{
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output;
    std::string ndd; // "", "on" or "off"
    unsigned threads = 0;
};

class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// precedence: --ndd > --set > config file > defaults
RunConfig load_config(const GlobalOptions& g, ConfigDocument& doc)
{
    if (!g.config_path.empty())
        doc = parse_config_file(g.config_path);
    for (const auto& s : g.overrides)
        apply_override(doc, s);
    if (!g.ndd.empty()) {
        const ConfigValue v{ConfigValue::Kind::Boolean, {}, g.ndd == "on", Unit::None};
        doc.set("drive", "ndd", v);
        doc.set("sweep", "ndd", v);
    }
    return resolve_config(doc);
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + path + " for writing");
    return f;
}

std::string expand_hash(std::string path, const std::string& hash)
{
    for (auto pos = path.find("{hash}"); pos != std::string::npos; pos = path.find("{hash}", pos + hash.size()))
        path.replace(pos, 6, hash);
    return path;
}

bool ends_with(const std::string& s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void print_state(std::ostream& out, const RunConfig& rc, const SteadyResult& r)
{
    const auto& p = rc.params;
    const Drive d = rc.drive();
    out << "omega_over_gamma " << format_double(rc.omega) << "\n";
    out << "delta_c_over_delta_u " << format_double(rc.delta_c / p.delta_u()) << "\n";
    out << "ndd " << (rc.ndd ? "on" : "off") << "\n";
    const auto names = state_column_names();
    const auto coords = r.rho.coords();
    for (std::size_t i = 0; i < names.size(); ++i)
        out << names[i] << " " << format_double(coords(static_cast<Eigen::Index>(i))) << "\n";
    const auto transfer = population_transfer(r.rho);
    out << "w_g " << format_double(transfer.ground) << "\n";
    out << "w_e " << format_double(transfer.excited) << "\n";
    for (const Transition t : {Transition::t31, Transition::t41}) {
        const auto chi = susceptibility(p, d, r.rho, t);
        out << "chi_" << name_of(t) << " " << format_double(chi.chi_re) << " " << format_double(chi.chi_im) << " "
            << to_string(classify_line(chi.chi_im)) << "\n";
    }
    out << "converged " << (r.converged ? "true" : "false") << "\n";
    out << "iterations " << r.iterations << "\n";
    out << "residual " << format_double(r.residual) << "\n";
}

int cmd_steady(const GlobalOptions& g, std::ostream& out, std::ostream& err)
{
    ConfigDocument doc;
    const RunConfig rc = load_config(g, doc);
    SteadyResult r;
    try {
        r = solve_selfconsistent(rc.params, rc.drive(), rc.solver);
    } catch (const SingularSystem& e) {
        err << "hfs steady: " << e.what() << " (rcond " << format_double(e.rcond()) << ")\n";
        return 1;
    }
    if (g.output.empty()) {
        print_state(out, rc, r);
    } else {
        auto f = open_output(g.output);
        print_state(f, rc, r);
    }
    if (!r.converged) {
        err << "hfs steady: not converged after " << r.iterations << " iterations, residual "
            << format_double(r.residual) << (r.diagnostic.empty() ? "" : ": " + r.diagnostic) << "\n";
        return 1;
    }
    return 0;
}

int cmd_evolve(const GlobalOptions& g, double t_end, int samples, bool stiff, std::ostream& out)
{
    ConfigDocument doc;
    RunConfig rc = load_config(g, doc);
    if (t_end > 0)
        rc.t_end = t_end;
    EvolveOptions opts = rc.evolve;
    if (stiff)
        opts.method = Integrator::Rosenbrock23;
    if (samples > 1) {
        for (int k = 0; k < samples; ++k)
            opts.output_times.push_back(rc.t_end * k / (samples - 1));
        opts.output_times.back() = rc.t_end;
    }
    const Trajectory traj = evolve(rc.params, rc.drive(), DensityMatrix::ground(), rc.t_end, opts);
    if (g.output.empty())
        write_trajectory_csv(traj, out);
    else
        write_trajectory_csv(traj, g.output);
    return 0;
}

int cmd_sweep(const GlobalOptions& g, std::ostream& out, std::ostream& err)
{
    ConfigDocument doc;
    const RunConfig rc = load_config(g, doc);
    rc.sweep.validate();
    const SpectrumTable table = run_sweep(rc.params, rc.sweep, resolve_worker_count(g.threads));
    const std::string hash = config_hash(doc);
    if (g.output.empty()) {
        write_csv(table, out);
    } else {
        const std::string path = expand_hash(g.output, hash);
        if (ends_with(path, ".json"))
            write_json(table, path);
        else
            write_csv(table, path);
        out << "config hash " << hash << "\n" << "wrote " << path << "\n";
    }
    std::size_t failed = 0;
    for (const auto& r : table.records)
        failed += r.converged ? 0 : 1;
    if (failed > 0)
        err << "hfs sweep: " << failed << " of " << table.records.size() << " points did not converge\n";
    return 0;
}

int cmd_validate(const GlobalOptions& g, std::ostream& out)
{
    ConfigDocument doc;
    RunConfig rc = load_config(g, doc);
    const bool with_ndd = rc.sweep.ndd;
    SweepSpec spec = rc.sweep;
    spec.ndd = false;
    spec.symmetric = true;
    spec.validate();
    const unsigned workers = resolve_worker_count(g.threads);
    const SpectrumTable off = run_sweep(rc.params, spec, workers);
    std::optional<SpectrumTable> on;
    if (with_ndd) {
        spec.ndd = true;
        on = run_sweep(rc.params, spec, workers);
    }
    const auto reports = run_identity_suite(rc.params, off, on ? &*on : nullptr);
    for (const auto& r : reports) {
        char line[256];
        std::snprintf(line, sizeof line, "%-4s %-48s max %.3e  tol %.1e  n %zu\n", r.pass ? "ok" : "FAIL",
                      r.identity.c_str(), r.max_residual, r.tolerance, r.n_points);
        out << line;
    }
    if (!g.output.empty()) {
        auto f = open_output(g.output);
        write_report_json(reports, f);
    }
    const bool ok = all_pass(reports);
    out << (ok ? "all identities pass" : "identity check failed") << "\n";
    return ok ? 0 : 1;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Steady states, dynamics and optical response of a driven four-level hyperfine atom", "hfs"};
    app.fallthrough();
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("-c,--config", g.config_path, "Configuration file")->check(CLI::ExistingFile);
    app.add_option("--set", g.overrides, "Override a config entry, e.g. --set drive.omega=\"5 gamma\"")
        ->type_name("SECTION.KEY=VALUE")
        ->take_all()
        ->allow_extra_args(false);
    app.add_option("-o,--output", g.output, "Output path; {hash} expands to the config hash");
    app.add_option("--ndd", g.ndd, "Force the local-field correction on or off")->check(CLI::IsMember({"on", "off"}));
    app.add_option("-j,--threads", g.threads, "Worker threads for sweeps (0 = all cores, capped by HFS_THREADS)");

    auto* steady = app.add_subcommand("steady", "Solve the stationary state at one drive point");
    auto* evolve_cmd = app.add_subcommand("evolve", "Integrate the equations of motion from the ground state");
    double t_end = 0;
    int samples = 0;
    bool stiff = false;
    evolve_cmd->add_option("--t-end", t_end, "Final time in units of 1/gamma (default: solver.t_end)");
    evolve_cmd->add_option("--samples", samples, "Sample at N evenly spaced times instead of every step")
        ->check(CLI::Range(2, 100000000));
    evolve_cmd->add_flag("--stiff", stiff, "Use the Rosenbrock integrator");
    auto* sweep = app.add_subcommand("sweep", "Steady-state spectra over a detuning grid");
    auto* validate = app.add_subcommand("validate", "Run the numerical identity suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*steady)
            return cmd_steady(g, out, err);
        if (*evolve_cmd)
            return cmd_evolve(g, t_end, samples, stiff, out);
        if (*sweep)
            return cmd_sweep(g, out, err);
        if (*validate)
            return cmd_validate(g, out);
    } catch (const ConfigError& e) {
        err << "hfs: config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "hfs: invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "hfs: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace hfs
