// Acceptance run over the reference spectra: one PASS/FAIL line per
// criterion, nonzero exit when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hfs/dynamics.hpp"
#include "hfs/sweep.hpp"
#include "hfs/validation.hpp"

using namespace hfs;

namespace {

struct Outcome
{
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const SystemParams& sodium()
{
    static const SystemParams p = SystemParams::sodium_d1();
    return p;
}

const SpectrumTable& reference()
{
    static const SpectrumTable t = run_sweep(sodium(), SweepSpec::reference(sodium()));
    return t;
}

template <typename Get>
double max_abs_over(const std::vector<SpectrumRecord>& block, Get get)
{
    double m = 0;
    for (const auto& r : block)
        m = std::max(m, std::abs(get(r)));
    return m;
}

// dominant feature of a line: largest |Im chi|
std::size_t line_center(const std::vector<SpectrumRecord>& block, bool t31)
{
    std::size_t best = 0;
    for (std::size_t k = 0; k < block.size(); ++k) {
        const double v = std::abs(t31 ? block[k].chi_im_31 : block[k].chi_im_41);
        if (v > std::abs(t31 ? block[best].chi_im_31 : block[best].chi_im_41))
            best = k;
    }
    return best;
}

// strongest gain point of the 3-1 line, or npos
std::size_t gain_center_31(const std::vector<SpectrumRecord>& block)
{
    std::size_t best = std::string::npos;
    for (std::size_t k = 0; k < block.size(); ++k)
        if (block[k].line_31 == LineClass::Gain && (best == std::string::npos || block[k].chi_im_31 < block[best].chi_im_31))
            best = k;
    return best;
}

bool has_gain_31(const std::vector<SpectrumRecord>& block)
{
    return std::any_of(block.begin(), block.end(), [](const auto& r) { return r.line_31 == LineClass::Gain; });
}

Outcome criterion_1()
{
    const double du_mhz = sodium().to_si(sodium().delta_u()) / (2 * M_PI * 1e6);
    const double rel = std::abs(du_mhz - 980.25) / 980.25;
    return {rel <= 1e-9, fmt("delta_u/2pi = %.12f MHz, relative error %.2e (tol 1e-9)", du_mhz, rel)};
}

Outcome criterion_2()
{
    const auto s = summarize(reference());
    const auto& lo = s.front();
    const bool pos = lo.w_g_max.value > 0.9 && std::abs(lo.w_g_max.delta_c_over_delta_u - 1.0) <= 0.15;
    const bool neg = lo.w_g_min.value < -0.9 && std::abs(lo.w_g_min.delta_c_over_delta_u + 1.0) <= 0.15;
    return {lo.omega_over_gamma == 0.5 && pos && neg,
            fmt("Omega=0.5: max W_g %.4f at %+.3f, min W_g %.4f at %+.3f (need |W_g|>0.9 within 0.15 of +-1)",
                lo.w_g_max.value, lo.w_g_max.delta_c_over_delta_u, lo.w_g_min.value,
                lo.w_g_min.delta_c_over_delta_u)};
}

Outcome criterion_3()
{
    const auto& t = reference();
    const auto wg = [&](double o) { return max_abs_over(t.at_omega(o), [](const auto& r) { return r.w_g; }); };
    const auto we = [&](double o) { return max_abs_over(t.at_omega(o), [](const auto& r) { return r.w_e; }); };
    const bool flatten = wg(0.5) > wg(5.0) && wg(5.0) > wg(100.0);
    const double mid_min = std::min(we(5.0), we(20.0));
    const bool partial = mid_min > we(0.5) && mid_min > we(100.0);
    return {flatten && partial,
            fmt("max|W_g| 0.5/5/100: %.4f > %.4f > %.4f [%s]; max|W_e| 0.5/5/20/100: %.4f %.4f %.4f %.4f "
                "(5,20 above both ends: %s)",
                wg(0.5), wg(5.0), wg(100.0), flatten ? "ok" : "violated", we(0.5), we(5.0), we(20.0), we(100.0),
                partial ? "ok" : "violated")};
}

Outcome criterion_4()
{
    const auto& t = reference();
    const auto b5 = t.at_omega(5.0);
    const auto b20 = t.at_omega(20.0);
    const bool none_at_5 = !has_gain_31(b5);
    const bool some_at_20 = has_gain_31(b20);
    const auto c41 = line_center(b20, false);
    const bool abs41 = b20[c41].line_41 == LineClass::Absorption;
    return {none_at_5 && some_at_20 && abs41,
            fmt("31 gain at 5: %s (want none); 31 gain at 20: %s (want some), min Im chi_31 at 20 = %.3e; "
                "41 center at %+.3f is %s",
                none_at_5 ? "none" : "present", some_at_20 ? "present" : "none",
                std::min_element(b20.begin(), b20.end(),
                                 [](const auto& a, const auto& b) { return a.chi_im_31 < b.chi_im_31; })
                    ->chi_im_31,
                b20[c41].delta_c_over_delta_u, to_string(b20[c41].line_41))};
}

Outcome criterion_5()
{
    IdentitySuiteOptions o;
    o.generator_states = 10;
    const auto reports = run_identity_suite(sodium(), reference(), nullptr, o);
    double mirror = 0, even = 0, raman = 0;
    bool ok = true;
    std::size_t checked = 0;
    for (const auto& r : reports) {
        const auto starts = [&](const char* p) { return r.identity.rfind(p, 0) == 0; };
        if (starts("mirror_relations@")) {
            mirror = std::max(mirror, r.max_residual);
            ok = ok && r.max_residual < 1e-8;
        } else if (starts("raman_evenness@") || starts("raman_symmetric_form@")) {
            even = std::max(even, r.max_residual);
            ok = ok && r.max_residual < 1e-8;
        } else if (starts("raman_steady@")) {
            raman = std::max(raman, r.max_residual);
            ok = ok && r.max_residual < 1e-9;
        } else {
            continue;
        }
        ++checked;
    }
    std::size_t converged = 0;
    for (const auto& r : reference().records)
        converged += r.converged ? 1 : 0;
    ok = ok && checked == 16;
    return {ok, fmt("mirror %.2e, evenness/symmetric %.2e (tol 1e-8); raman rows %.2e (tol 1e-9) at %zu converged "
                    "points",
                    mirror, even, raman, converged)};
}

Outcome criterion_6()
{
    std::mt19937_64 rng(6);
    const auto& grid = SweepSpec::reference(sodium()).delta_c;
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    RelaxOptions ro;
    ro.residual_tol = 1e-12;
    ro.t_max = 1e9;
    double worst = 0;
    int failures = 0, total = 0;
    for (bool ndd : {false, true}) {
        for (double omega : {0.5, 5.0, 20.0, 100.0}) {
            for (int k = 0; k < 20; ++k) {
                const Drive d = Drive::make(sodium(), omega, grid[pick(rng)], ndd);
                const auto a = solve_selfconsistent(sodium(), d);
                const auto b = relax_to_steady(sodium(), d, DensityMatrix::ground(), ro);
                ++total;
                if (!a.converged || !b.converged) {
                    ++failures;
                    continue;
                }
                const double diff = a.rho.max_abs_diff(b.rho);
                worst = std::max(worst, diff);
                failures += diff < 1e-6 ? 0 : 1;
            }
        }
    }
    return {failures == 0, fmt("%d points, max elementwise difference %.2e (tol 1e-6), %d failures", total, worst,
                               failures)};
}

Outcome criterion_7()
{
    const auto reduced = two_level_reduction(sodium());
    std::vector<std::pair<double, double>> grid;
    for (double w : {0.1, 0.3, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0})
        for (double dl : {0.0, 0.5, -0.5, 2.0, -2.0, 5.0, -5.0, 20.0, -20.0, 50.0})
            grid.emplace_back(w, dl);
    const auto rep = two_level_oracle_check(reduced, grid, 1e-9);
    const Drive d = Drive::make(reduced, 1.0, reduced.delta_g - reduced.delta_u(), false);
    const double rho33 = solve_linear_steady(reduced, d, bare_rabi(reduced, d)).population(2);
    const bool four_ninths = std::abs(rho33 - 4.0 / 9.0) < 1e-9;
    return {rep.pass && four_ninths && rep.n_points == 100,
            fmt("%zu (Omega, delta) pairs, max deviation %.2e (tol 1e-9); rho33(delta=0, Omega=1) = %.12f", rep.n_points,
                rep.max_residual, rho33)};
}

Outcome criterion_8()
{
    bool ok = true;
    std::string detail;
    for (bool ndd : {false, true}) {
        const auto g = check_generator_equivalence(sodium(), 1000, ndd, ndd ? 81 : 80);
        ok = ok && g.equivalence.pass && g.trace.pass && g.hermiticity.pass;
        detail += fmt("%s: equivalence %.2e, trace %.2e, hermiticity %.2e; ", ndd ? "ndd on" : "ndd off",
                      g.equivalence.max_residual, g.trace.max_residual, g.hermiticity.max_residual);
    }
    return {ok, detail + "tol 1e-12 / 1e-13 / 1e-13, 1000 states each"};
}

Outcome criterion_9()
{
    const auto& t = reference();
    std::size_t mismatches = 0, checked = 0;
    for (double omega : t.omegas()) {
        const auto b = t.at_omega(omega);
        for (std::size_t k = 1; k + 1 < b.size(); ++k) {
            for (bool t31 : {true, false}) {
                const double dn = t31 ? b[k + 1].n_31 - b[k - 1].n_31 : b[k + 1].n_41 - b[k - 1].n_41;
                const auto cls = t31 ? b[k].dispersion_31 : b[k].dispersion_41;
                mismatches += (cls == DispersionClass::Normal) == (dn > 0) ? 0 : 1;
                ++checked;
            }
        }
    }
    const auto b20 = t.at_omega(20.0);
    const auto g = gain_center_31(b20);
    const bool gain_normal = g != std::string::npos && b20[g].dispersion_31 == DispersionClass::Normal;
    const auto c41 = line_center(b20, false);
    const bool abs_anomalous =
        b20[c41].line_41 == LineClass::Absorption && b20[c41].dispersion_41 == DispersionClass::Anomalous;
    const std::string gain_text = g == std::string::npos
                                      ? std::string("no 31 gain line at 20")
                                      : fmt("31 gain center %+.3f is %s", b20[g].delta_c_over_delta_u,
                                            to_string(b20[g].dispersion_31));
    return {mismatches == 0 && gain_normal && abs_anomalous,
            fmt("class/slope mismatches %zu of %zu; ", mismatches, checked) + gain_text +
                fmt(" (want normal); 41 absorption center %+.3f is %s (want anomalous)",
                    b20[c41].delta_c_over_delta_u, to_string(b20[c41].dispersion_41))};
}

Outcome criterion_10()
{
    const auto spec = SweepSpec::reference(sodium());
    const auto csv = [&](unsigned workers) {
        std::ostringstream os;
        write_csv(run_sweep(sodium(), spec, workers), os);
        return os.str();
    };
    const std::string first = csv(1);
    bool same = csv(1) == first;
    for (unsigned w : {2u, 4u, 8u})
        same = same && csv(w) == first;
    std::ostringstream os;
    write_csv(reference(), os);
    same = same && os.str() == first;
    return {same, fmt("reference CSV (%zu bytes) identical across 2 runs and 1/2/4/8/default workers: %s",
                      first.size(), same ? "yes" : "no")};
}

} // namespace

int main()
{
    const std::vector<std::function<Outcome()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                         criterion_5, criterion_6, criterion_7, criterion_8,
                                                         criterion_9, criterion_10};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2zu: %s  %s [%.2fs]\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
