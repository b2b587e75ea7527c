#include "hfs/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "json.hpp"

namespace hfs {

namespace {

constexpr std::complex<double> I{0.0, 1.0};
constexpr double kInf = std::numeric_limits<double>::infinity();

IdentityReport make_report(std::string id, double tol, double residual, std::size_t n)
{
    return {std::move(id), tol, residual, n, residual < tol};
}

void require_symmetric(const Spectrum& s)
{
    const std::size_t n = s.size();
    if (n == 0)
        throw GridNotSymmetric();
    for (std::size_t k = 0; k < n; ++k)
        if (s[k].delta_c_over_delta_u != -s[n - 1 - k].delta_c_over_delta_u)
            throw GridNotSymmetric();
}

std::complex<double> el(const DensityMatrix& r, int i, int j) { return r(i - 1, j - 1); }

double safe_scale(double m) { return m > 0 ? m : 1.0; }

} // namespace

Spectrum spectrum_of(const std::vector<SpectrumRecord>& block)
{
    Spectrum s;
    s.reserve(block.size());
    for (const auto& r : block)
        s.push_back({r.delta_c_over_delta_u, r.rho});
    return s;
}

double max_coherence(const Spectrum& s)
{
    double m = 0;
    for (const auto& p : s)
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < i; ++j)
                m = std::max(m, std::abs(p.rho(i, j)));
    return m;
}

IdentityReport check_mirror_relations(const Spectrum& s, double tol)
{
    require_symmetric(s);
    const double scale = safe_scale(max_coherence(s));
    const std::size_t n = s.size();
    double worst = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& plus = s[k].rho;
        const auto& minus = s[n - 1 - k].rho;
        worst = std::max(worst, std::abs(el(plus, 4, 2) + std::conj(el(minus, 3, 1))));
        worst = std::max(worst, std::abs(el(plus, 3, 2) + std::conj(el(minus, 4, 1))));
    }
    return make_report("mirror_relations", tol, worst / scale, n);
}

IdentityReport check_raman_steady(const SystemParams& params, const Drive& drive, const DensityMatrix& rho, double tol)
{
    const auto g = gamma_set(params, laser_detuning(params, drive));
    const double om = drive.omega;
    const auto r = [&](int i, int j) { return el(rho, i, j); };
    const double res21 = std::abs(g.g21 * r(2, 1) + I * om * (r(2, 3) + r(2, 4) - r(3, 1) - r(4, 1)));
    const double res43 = std::abs(g.g43 * r(4, 3) + I * om * (r(4, 1) - r(1, 3) + r(4, 2) - r(2, 3)));
    return make_report("raman_steady", tol, std::max(res21, res43), 1);
}

IdentityReport check_raman_symmetric_form(const SystemParams& params, double omega, const Spectrum& s, double tol)
{
    require_symmetric(s);
    const double scale = safe_scale(max_coherence(s));
    // G21 and G43 do not depend on the laser detuning.
    const auto g = gamma_set(params, 0.0);
    const std::size_t n = s.size();
    double worst = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& plus = s[k].rho;
        const auto& minus = s[n - 1 - k].rho;
        const auto r31 = el(plus, 3, 1) + el(minus, 3, 1);
        const auto r41 = el(plus, 4, 1) + el(minus, 4, 1);
        worst = std::max(worst, std::abs(g.g21 * el(plus, 2, 1) - I * omega * (r31 + r41)));
        worst = std::max(worst, std::abs(g.g43 * el(plus, 4, 3) - I * omega * (std::conj(r31) - r41)));
    }
    return make_report("raman_symmetric_form", tol, worst / scale, n);
}

IdentityReport check_raman_evenness(const Spectrum& s, double tol)
{
    require_symmetric(s);
    const double scale = safe_scale(max_coherence(s));
    const std::size_t n = s.size();
    double worst = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& plus = s[k].rho;
        const auto& minus = s[n - 1 - k].rho;
        worst = std::max(worst, std::abs(el(plus, 2, 1) - el(minus, 2, 1)));
        worst = std::max(worst, std::abs(el(plus, 4, 3) - el(minus, 4, 3)));
    }
    return make_report("raman_evenness", tol, worst / scale, n);
}

SystemParams two_level_reduction(const SystemParams& base)
{
    SystemParams p = base;
    p.mu_scale = {1.0, 0.0, 0.0, 0.0};
    p.decay = {base.decay[c13], 0.0, 0.0, 0.0};
    return p;
}

TwoLevelSteady two_level_closed_form(double omega, double delta, double gamma)
{
    const double excited = omega * omega / (delta * delta + 0.25 * gamma * gamma + 2.0 * omega * omega);
    const std::complex<double> coherence = I * omega * (1.0 - 2.0 * excited) / std::complex<double>(-0.5 * gamma, delta);
    return {excited, coherence};
}

IdentityReport two_level_oracle_check(const SystemParams& reduced,
                                      const std::vector<std::pair<double, double>>& omega_delta, double tol)
{
    double worst = 0;
    for (const auto& [omega, delta] : omega_delta) {
        // delta is measured from the |3>-|1> line: laser detuning = delta_g + delta
        const Drive drive = Drive::make(reduced, omega, reduced.delta_g + delta - reduced.delta_u(), false);
        const DensityMatrix rho = solve_linear_steady(reduced, drive, bare_rabi(reduced, drive));
        const auto exact = two_level_closed_form(omega, delta, reduced.decay[c13]);
        worst = std::max(worst, std::abs(rho.population(2) - exact.excited));
        worst = std::max(worst, std::abs(rho(2, 0) - exact.coherence));
    }
    return make_report("two_level_limit", tol, worst, omega_delta.size());
}

GeneratorChecks check_generator_equivalence(const SystemParams& params, int n_states, bool ndd, std::uint64_t seed,
                                            double tol_equivalence, double tol_trace)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> detuning(-5.0 * params.delta_u(), 5.0 * params.delta_u());
    std::uniform_real_distribution<double> drive_strength(0.1, 100.0);

    double eq = 0, tr = 0, herm = 0;
    for (int s = 0; s < n_states; ++s) {
        // Ginibre state: G G^dagger / tr, positive with unit trace
        Matrix4c<double> g;
        for (Eigen::Index i = 0; i < 4; ++i)
            for (Eigen::Index j = 0; j < 4; ++j)
                g(i, j) = {normal(rng), normal(rng)};
        const Matrix4c<double> gg = g * g.adjoint();
        const DensityMatrix rho = DensityMatrix::from_matrix(gg / gg.trace().real());

        const Drive drive = Drive::make(params, drive_strength(rng), detuning(rng), ndd);
        const RabiSet rabi = effective_rabi(params, drive, rho);
        const auto a = rhs_verbatim(params, drive, rabi, rho);
        const auto b = rhs_oracle(params, drive, rabi, rho);
        eq = std::max(eq, a.max_abs_diff(b));
        tr = std::max({tr, std::abs(a.trace()), std::abs(b.trace())});

        // hermiticity of the unprojected oracle matrix
        const Matrix4c<double> h = hamiltonian(params, drive, rabi).cast<std::complex<double>>();
        const Matrix4c<double> m = rho.matrix();
        Matrix4c<double> full = -I * (h * m - m * h);
        for (auto c : kCouplings) {
            Matrix4c<double> jump = Matrix4c<double>::Zero();
            jump(ground_of(c), excited_of(c)) = std::sqrt(params.decay[c]);
            const Matrix4c<double> jj = jump.adjoint() * jump;
            full += jump * m * jump.adjoint() - 0.5 * (jj * m + m * jj);
        }
        herm = std::max(herm, (full - full.adjoint()).cwiseAbs().maxCoeff());
    }
    const std::string tag = ndd ? "_ndd_on" : "_ndd_off";
    const auto n = static_cast<std::size_t>(n_states);
    return {make_report("generator_equivalence" + tag, tol_equivalence, eq, n),
            make_report("generator_trace" + tag, tol_trace, tr, n),
            make_report("generator_hermiticity" + tag, tol_trace, herm, n)};
}

std::vector<IdentityReport> run_identity_suite(const SystemParams& params, const SpectrumTable& ndd_off,
                                               const SpectrumTable* ndd_on, const IdentitySuiteOptions& opts)
{
    std::vector<IdentityReport> out;
    const auto suffix = [](double omega) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "@omega=%g", omega);
        return std::string(buf);
    };

    for (double omega : ndd_off.omegas()) {
        const auto block = ndd_off.at_omega(omega);
        const Spectrum s = spectrum_of(block);
        auto mirror = check_mirror_relations(s, opts.mirror_tol);
        auto sym = check_raman_symmetric_form(params, omega, s, opts.symmetric_tol);
        auto even = check_raman_evenness(s, opts.symmetric_tol);
        double raman = 0;
        std::size_t n = 0;
        for (const auto& r : block) {
            if (!r.converged)
                continue;
            const Drive drive = Drive::make(params, omega, r.delta_c_over_delta_u * params.delta_u(), false);
            raman = std::max(raman, check_raman_steady(params, drive, r.rho, opts.raman_steady_tol).max_residual);
            ++n;
        }
        auto steady = make_report("raman_steady", opts.raman_steady_tol, raman, n);
        for (auto* rep : {&mirror, &sym, &even, &steady}) {
            rep->identity += suffix(omega);
            out.push_back(*rep);
        }
    }

    if (ndd_on) {
        for (double omega : ndd_on->omegas()) {
            const Spectrum s = spectrum_of(ndd_on->at_omega(omega));
            for (auto rep : {check_mirror_relations(s, kInf), check_raman_evenness(s, kInf)}) {
                rep.identity += "_ndd_on" + suffix(omega);
                rep.pass = true;
                out.push_back(rep);
            }
        }
    }

    const SystemParams reduced = two_level_reduction(params);
    std::vector<std::pair<double, double>> grid;
    for (double omega : {0.1, 0.3, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0})
        for (double delta : {0.0, 0.5, -0.5, 2.0, -2.0, 5.0, -5.0, 20.0, -20.0, 50.0})
            grid.emplace_back(omega, delta);
    out.push_back(two_level_oracle_check(reduced, grid, opts.two_level_tol));

    for (bool ndd : {false, true}) {
        const auto g = check_generator_equivalence(params, opts.generator_states, ndd, opts.seed + (ndd ? 1 : 0));
        out.push_back(g.equivalence);
        out.push_back(g.trace);
        out.push_back(g.hermiticity);
    }
    return out;
}

bool all_pass(const std::vector<IdentityReport>& reports)
{
    return std::all_of(reports.begin(), reports.end(), [](const IdentityReport& r) { return r.pass; });
}

void write_report_json(const std::vector<IdentityReport>& reports, std::ostream& out)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        nlohmann::ordered_json o;
        o["identity"] = r.identity;
        o["tolerance"] = std::isfinite(r.tolerance) ? nlohmann::ordered_json(r.tolerance) : nlohmann::ordered_json();
        o["max_residual"] = r.max_residual;
        o["pass"] = r.pass;
        o["n_points"] = r.n_points;
        arr.push_back(std::move(o));
    }
    out << arr.dump(1) << '\n';
}

} // namespace hfs
