#include "hfs/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "hfs/io_format.hpp"

namespace hfs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::ofstream open_for_write(const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + path + " for writing");
    return f;
}

std::ifstream open_for_read(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + path + " for reading");
    return f;
}

SpectrumRecord failed_record(double ratio, double omega, bool ndd)
{
    SpectrumRecord r;
    r.delta_c_over_delta_u = ratio;
    r.omega_over_gamma = omega;
    r.ndd = ndd;
    r.rho = DensityMatrix(StateVector<double>::Constant(kNaN));
    r.converged = false;
    r.iterations = 0;
    r.residual = kNaN;
    return r;
}

std::vector<SpectrumRecord> solve_block(const SystemParams& params, const SweepSpec& spec, double omega)
{
    std::vector<SpectrumRecord> block;
    block.reserve(spec.delta_c.size());
    const double du = params.delta_u();
    SolveOptions opts = spec.solver;
    opts.warm_start.reset();
    for (double dc : spec.delta_c) {
        const Drive drive = Drive::make(params, omega, dc, spec.ndd);
        const double ratio = dc / du;
        try {
            const SteadyResult res = solve_selfconsistent(params, drive, opts);
            SpectrumRecord r;
            r.delta_c_over_delta_u = ratio;
            r.omega_over_gamma = omega;
            r.ndd = spec.ndd;
            r.rho = res.rho;
            r.converged = res.converged;
            r.iterations = res.iterations;
            r.residual = res.residual;
            block.push_back(r);
            if (res.converged)
                opts.warm_start = res.rho;
        } catch (const SingularSystem&) {
            block.push_back(failed_record(ratio, omega, spec.ndd));
        }
    }
    compute_observables(params, block);
    return block;
}

} // namespace

std::vector<double> linear_grid(double lo, double hi, int count)
{
    if (count < 2)
        throw std::invalid_argument("grid needs at least 2 points");
    std::vector<double> g(static_cast<std::size_t>(count));
    const double step = (hi - lo) / (count - 1);
    for (int k = 0; k < count; ++k)
        g[static_cast<std::size_t>(k)] = lo + k * step;
    g.back() = hi;
    if (lo == -hi) {
        for (int k = 0; k < count / 2; ++k)
            g[static_cast<std::size_t>(count - 1 - k)] = -g[static_cast<std::size_t>(k)];
        if (count % 2 == 1)
            g[static_cast<std::size_t>(count / 2)] = 0.0;
    }
    return g;
}

void SweepSpec::validate() const
{
    if (delta_c.size() < 3)
        throw std::invalid_argument("sweep grid needs at least 3 points");
    for (std::size_t k = 1; k < delta_c.size(); ++k)
        if (!(delta_c[k] > delta_c[k - 1]))
            throw std::invalid_argument("sweep grid must be strictly increasing");
    if (symmetric) {
        const std::size_t n = delta_c.size();
        for (std::size_t k = 0; k < n; ++k)
            if (delta_c[k] != -delta_c[n - 1 - k])
                throw std::invalid_argument("sweep grid is not mirror-symmetric about 0");
    }
    if (omegas.empty())
        throw std::invalid_argument("sweep needs at least one intensity");
    for (double o : omegas)
        if (!(o > 0))
            throw std::invalid_argument("sweep intensities must be positive");
    solver.validate();
}

SweepSpec SweepSpec::reference(const SystemParams& params)
{
    SweepSpec s;
    s.delta_c = linear_grid(-5.0, 5.0, 2001);
    for (auto& x : s.delta_c)
        x *= params.delta_u();
    s.unit = GridUnit::DeltaU;
    s.omegas = {0.5, 5.0, 20.0, 100.0};
    s.symmetric = true;
    return s;
}

std::vector<double> SpectrumTable::omegas() const
{
    std::vector<double> out;
    for (const auto& r : records)
        if (out.empty() || out.back() != r.omega_over_gamma)
            out.push_back(r.omega_over_gamma);
    return out;
}

std::vector<SpectrumRecord> SpectrumTable::at_omega(double omega) const
{
    std::vector<SpectrumRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [&](const SpectrumRecord& r) { return r.omega_over_gamma == omega; });
    return out;
}

unsigned resolve_worker_count(unsigned requested)
{
    unsigned n = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HFS_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0)
            n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

void compute_observables(const SystemParams& params, std::vector<SpectrumRecord>& block)
{
    const double du = params.delta_u();
    const auto m = static_cast<Eigen::Index>(block.size());
    Eigen::VectorXd w(m), n31(m), n41(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        auto& r = block[static_cast<std::size_t>(k)];
        const Drive drive = Drive::make(params, r.omega_over_gamma, r.delta_c_over_delta_u * du, r.ndd);
        const auto pt = population_transfer(r.rho);
        r.w_g = pt.ground;
        r.w_e = pt.excited;
        const auto chi31 = susceptibility(params, drive, r.rho, Transition::t31);
        const auto chi41 = susceptibility(params, drive, r.rho, Transition::t41);
        r.chi_re_31 = chi31.chi_re;
        r.chi_im_31 = chi31.chi_im;
        r.chi_re_41 = chi41.chi_re;
        r.chi_im_41 = chi41.chi_im;
        r.n_31 = refractive_index(chi31);
        r.n_41 = refractive_index(chi41);
        r.line_31 = classify_line(r.chi_im_31);
        r.line_41 = classify_line(r.chi_im_41);
        w(k) = params.omega0 + params.to_si(drive.delta_c);
        n31(k) = r.n_31;
        n41(k) = r.n_41;
    }
    if (m < 3) {
        for (auto& r : block)
            r.ng_31 = r.ng_41 = kNaN;
        return;
    }
    const auto g31 = group_index(w, n31, params.omega0);
    const auto g41 = group_index(w, n41, params.omega0);
    for (std::size_t k = 0; k < block.size(); ++k) {
        block[k].ng_31 = g31[k].ng;
        block[k].dispersion_31 = g31[k].dispersion_class;
        block[k].ng_41 = g41[k].ng;
        block[k].dispersion_41 = g41[k].dispersion_class;
    }
}

SpectrumTable run_sweep(const SystemParams& params, const SweepSpec& spec, unsigned workers)
{
    params.validate();
    spec.validate();

    std::vector<double> omegas = spec.omegas;
    std::sort(omegas.begin(), omegas.end());
    omegas.erase(std::unique(omegas.begin(), omegas.end()), omegas.end());

    std::vector<std::vector<SpectrumRecord>> blocks(omegas.size());
    const unsigned n_workers =
        std::min<unsigned>(resolve_worker_count(workers), static_cast<unsigned>(omegas.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < n_workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < omegas.size(); i += n_workers)
                    blocks[i] = solve_block(params, spec, omegas[i]);
            });
        }
    }

    SpectrumTable table;
    for (auto& b : blocks)
        table.records.insert(table.records.end(), b.begin(), b.end());
    return table;
}

// ---------------------------------------------------------------------------
// serialization

const std::vector<std::string>& spectrum_columns()
{
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> c{"delta_c_over_delta_u", "omega_over_gamma", "ndd"};
        for (const auto& s : state_column_names())
            c.push_back(s);
        for (const char* s : {"w_g", "w_e", "chi_re_31", "chi_im_31", "chi_re_41", "chi_im_41", "n_31", "ng_31",
                              "n_41", "ng_41", "dispersion_31", "line_31", "dispersion_41", "line_41", "converged",
                              "iterations", "residual"})
            c.emplace_back(s);
        return c;
    }();
    return cols;
}

namespace {

const char* bool_text(bool b) { return b ? "true" : "false"; }

double parse_number(const std::string& s)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0')
        throw std::runtime_error("malformed number '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s)
{
    if (s == "true")
        return true;
    if (s == "false")
        return false;
    throw std::runtime_error("malformed boolean '" + s + "'");
}

DispersionClass parse_dispersion(const std::string& s)
{
    if (s == "normal")
        return DispersionClass::Normal;
    if (s == "anomalous")
        return DispersionClass::Anomalous;
    throw std::runtime_error("unknown dispersion class '" + s + "'");
}

LineClass parse_line(const std::string& s)
{
    if (s == "gain")
        return LineClass::Gain;
    if (s == "absorption")
        return LineClass::Absorption;
    throw std::runtime_error("unknown line class '" + s + "'");
}

// Numeric fields in column order (excluding rho and the text columns).
template <typename Record, typename F>
void for_each_number(Record& r, F&& f)
{
    f("w_g", r.w_g);
    f("w_e", r.w_e);
    f("chi_re_31", r.chi_re_31);
    f("chi_im_31", r.chi_im_31);
    f("chi_re_41", r.chi_re_41);
    f("chi_im_41", r.chi_im_41);
    f("n_31", r.n_31);
    f("ng_31", r.ng_31);
    f("n_41", r.n_41);
    f("ng_41", r.ng_41);
}

} // namespace

void write_csv(const SpectrumTable& table, std::ostream& out)
{
    const auto& cols = spectrum_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : table.records) {
        out << format_double(r.delta_c_over_delta_u) << ',' << format_double(r.omega_over_gamma) << ','
            << bool_text(r.ndd);
        for (Eigen::Index k = 0; k < 16; ++k)
            out << ',' << format_double(r.rho.coords()(k));
        for_each_number(r, [&](const char*, double v) { out << ',' << format_double(v); });
        out << ',' << to_string(r.dispersion_31) << ',' << to_string(r.line_31) << ',' << to_string(r.dispersion_41)
            << ',' << to_string(r.line_41) << ',' << bool_text(r.converged) << ',' << r.iterations << ','
            << format_double(r.residual) << '\n';
    }
}

void write_csv(const SpectrumTable& table, const std::string& path)
{
    auto f = open_for_write(path);
    write_csv(table, f);
    if (!f)
        throw std::runtime_error("write failed: " + path);
}

SpectrumTable read_csv(std::istream& in)
{
    const auto& cols = spectrum_columns();
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty CSV input");
    {
        std::string expected;
        for (std::size_t i = 0; i < cols.size(); ++i)
            expected += (i ? "," : "") + cols[i];
        if (line != expected)
            throw std::runtime_error("CSV header does not match the spectrum table layout");
    }
    SpectrumTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');)
            f.push_back(cell);
        if (f.size() != cols.size())
            throw std::runtime_error("CSV line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(cols.size()) + " fields, got " + std::to_string(f.size()));
        try {
            SpectrumRecord r;
            std::size_t i = 0;
            r.delta_c_over_delta_u = parse_number(f[i++]);
            r.omega_over_gamma = parse_number(f[i++]);
            r.ndd = parse_bool(f[i++]);
            for (Eigen::Index k = 0; k < 16; ++k)
                r.rho.coords()(k) = parse_number(f[i++]);
            for_each_number(r, [&](const char*, double& v) { v = parse_number(f[i++]); });
            r.dispersion_31 = parse_dispersion(f[i++]);
            r.line_31 = parse_line(f[i++]);
            r.dispersion_41 = parse_dispersion(f[i++]);
            r.line_41 = parse_line(f[i++]);
            r.converged = parse_bool(f[i++]);
            r.iterations = static_cast<int>(parse_number(f[i++]));
            r.residual = parse_number(f[i++]);
            table.records.push_back(r);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("CSV line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return table;
}

SpectrumTable read_csv_file(const std::string& path)
{
    auto f = open_for_read(path);
    try {
        return read_csv(f);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

namespace {

nlohmann::json number_json(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double json_number(const nlohmann::json& j) { return j.is_null() ? kNaN : j.get<double>(); }

} // namespace

void write_json(const SpectrumTable& table, std::ostream& out)
{
    const auto& names = state_column_names();
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : table.records) {
        nlohmann::ordered_json o;
        o["delta_c_over_delta_u"] = number_json(r.delta_c_over_delta_u);
        o["omega_over_gamma"] = number_json(r.omega_over_gamma);
        o["ndd"] = r.ndd;
        for (Eigen::Index k = 0; k < 16; ++k)
            o[names[static_cast<std::size_t>(k)]] = number_json(r.rho.coords()(k));
        for_each_number(r, [&](const char* key, double v) { o[key] = number_json(v); });
        o["dispersion_31"] = to_string(r.dispersion_31);
        o["line_31"] = to_string(r.line_31);
        o["dispersion_41"] = to_string(r.dispersion_41);
        o["line_41"] = to_string(r.line_41);
        o["converged"] = r.converged;
        o["iterations"] = r.iterations;
        o["residual"] = number_json(r.residual);
        arr.push_back(std::move(o));
    }
    out << arr.dump(1) << '\n';
}

void write_json(const SpectrumTable& table, const std::string& path)
{
    auto f = open_for_write(path);
    write_json(table, f);
    if (!f)
        throw std::runtime_error("write failed: " + path);
}

SpectrumTable read_json(std::istream& in)
{
    const auto arr = nlohmann::json::parse(in);
    if (!arr.is_array())
        throw std::runtime_error("spectrum JSON must be an array of records");
    const auto& names = state_column_names();
    SpectrumTable table;
    for (const auto& o : arr) {
        SpectrumRecord r;
        r.delta_c_over_delta_u = json_number(o.at("delta_c_over_delta_u"));
        r.omega_over_gamma = json_number(o.at("omega_over_gamma"));
        r.ndd = o.at("ndd").get<bool>();
        for (Eigen::Index k = 0; k < 16; ++k)
            r.rho.coords()(k) = json_number(o.at(names[static_cast<std::size_t>(k)]));
        for_each_number(r, [&](const char* key, double& v) { v = json_number(o.at(key)); });
        r.dispersion_31 = parse_dispersion(o.at("dispersion_31").get<std::string>());
        r.line_31 = parse_line(o.at("line_31").get<std::string>());
        r.dispersion_41 = parse_dispersion(o.at("dispersion_41").get<std::string>());
        r.line_41 = parse_line(o.at("line_41").get<std::string>());
        r.converged = o.at("converged").get<bool>();
        r.iterations = o.at("iterations").get<int>();
        r.residual = json_number(o.at("residual"));
        table.records.push_back(r);
    }
    return table;
}

SpectrumTable read_json_file(const std::string& path)
{
    auto f = open_for_read(path);
    try {
        return read_json(f);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// summary

namespace {

template <typename Get>
Extremum arg_extremum(const std::vector<SpectrumRecord>& block, Get&& get, bool want_max)
{
    Extremum e{kNaN, kNaN};
    for (const auto& r : block) {
        const double v = get(r);
        if (!std::isfinite(v))
            continue;
        if (!std::isfinite(e.value) || (want_max ? v > e.value : v < e.value))
            e = {r.delta_c_over_delta_u, v};
    }
    return e;
}

TransitionSummary summarize_transition(const std::vector<SpectrumRecord>& block, Transition t)
{
    const bool is31 = t == Transition::t31;
    const auto chi_re = [&](const SpectrumRecord& r) { return is31 ? r.chi_re_31 : r.chi_re_41; };
    const auto chi_im = [&](const SpectrumRecord& r) { return is31 ? r.chi_im_31 : r.chi_im_41; };
    const auto line = [&](const SpectrumRecord& r) { return is31 ? r.line_31 : r.line_41; };

    TransitionSummary s{t, {}, {kNaN, kNaN}, {}, {}};
    bool open = false;
    for (std::size_t k = 0; k < block.size(); ++k) {
        const bool gain = std::isfinite(chi_im(block[k])) && line(block[k]) == LineClass::Gain;
        if (gain && !open) {
            s.gain_intervals.emplace_back(block[k].delta_c_over_delta_u, block[k].delta_c_over_delta_u);
            open = true;
        } else if (gain) {
            s.gain_intervals.back().second = block[k].delta_c_over_delta_u;
        } else {
            open = false;
        }
    }
    for (std::size_t k = 1; k + 1 < block.size(); ++k) {
        const double slope = (chi_re(block[k + 1]) - chi_re(block[k - 1])) /
                             (block[k + 1].delta_c_over_delta_u - block[k - 1].delta_c_over_delta_u);
        if (std::isfinite(slope) && (!std::isfinite(s.steepest_chi_re_slope.value) ||
                                     std::abs(slope) > std::abs(s.steepest_chi_re_slope.value)))
            s.steepest_chi_re_slope = {block[k].delta_c_over_delta_u, slope};
    }
    s.max_absorption = arg_extremum(block, chi_im, true);
    s.max_gain = arg_extremum(block, chi_im, false);
    return s;
}

} // namespace

std::vector<IntensitySummary> summarize(const SpectrumTable& table)
{
    std::vector<IntensitySummary> out;
    for (double omega : table.omegas()) {
        const auto block = table.at_omega(omega);
        IntensitySummary s;
        s.omega_over_gamma = omega;
        const auto wg = [](const SpectrumRecord& r) { return r.w_g; };
        const auto we = [](const SpectrumRecord& r) { return r.w_e; };
        s.w_g_max = arg_extremum(block, wg, true);
        s.w_g_min = arg_extremum(block, wg, false);
        s.w_e_max = arg_extremum(block, we, true);
        s.w_e_min = arg_extremum(block, we, false);
        s.transitions.push_back(summarize_transition(block, Transition::t31));
        s.transitions.push_back(summarize_transition(block, Transition::t41));
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace hfs
