#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hfs/sweep.hpp"

namespace hfs {

/// Outcome of one numerical identity check. Diagnostic-only checks carry an
/// infinite tolerance and always pass.
struct IdentityReport
{
    std::string identity;
    double tolerance = 0;
    double max_residual = 0;
    std::size_t n_points = 0;
    bool pass = false;
};

class GridNotSymmetric : public std::invalid_argument
{
public:
    GridNotSymmetric() : std::invalid_argument("identity needs a grid mirror-symmetric about delta_c = 0") {}
};

struct SpectrumPoint
{
    double delta_c_over_delta_u = 0;
    DensityMatrix rho;
};

using Spectrum = std::vector<SpectrumPoint>;

Spectrum spectrum_of(const std::vector<SpectrumRecord>& block);

/// Largest |rho_ij|, i != j, over the spectrum (the normalization scale).
double max_coherence(const Spectrum& s);

/// rho_42(+d) + conj(rho_31(-d)) = 0 and rho_32(+d) + conj(rho_41(-d)) = 0 at
/// every mirrored pair, normalized by max_coherence.
IdentityReport check_mirror_relations(const Spectrum& s, double tol);

/// Stationary rows of the two Raman coherences with the bare, common Omega:
///   G21 rho21 + i Omega (rho23 + rho24 - rho31 - rho41) = 0
///   G43 rho43 + i Omega (rho41 - rho13 + rho42 - rho23) = 0
/// Absolute residual in gamma units.
IdentityReport check_raman_steady(const SystemParams& params, const Drive& drive, const DensityMatrix& rho, double tol);

/// Symmetrized Raman relations with rho^R = rho(+d) + rho(-d):
///   G21 rho21 = i Omega (rho31^R + rho41^R),  G43 rho43 = i Omega (conj(rho31^R) - rho41^R),
/// normalized by max_coherence.
IdentityReport check_raman_symmetric_form(const SystemParams& params, double omega, const Spectrum& s, double tol);

/// |rho21(+d) - rho21(-d)| and |rho43(+d) - rho43(-d)|, normalized.
IdentityReport check_raman_evenness(const Spectrum& s, double tol);

/// Keeps only the |1>-|3> coupling and the 3 -> 1 decay channel.
SystemParams two_level_reduction(const SystemParams& base);

struct TwoLevelSteady
{
    double excited;                   // rho33
    std::complex<double> coherence;   // rho31
};

/// Closed-form stationary state of a driven two-level atom with half-Rabi
/// frequency `omega`, detuning `delta` from the line and decay rate `gamma`.
TwoLevelSteady two_level_closed_form(double omega, double delta, double gamma);

/// Compares solve_linear_steady on the reduced system against the closed
/// form over a grid of (Omega, detuning from the 3-1 line) pairs.
IdentityReport two_level_oracle_check(const SystemParams& reduced,
                                      const std::vector<std::pair<double, double>>& omega_delta, double tol);

struct GeneratorChecks
{
    IdentityReport equivalence; // rhs_verbatim vs rhs_oracle, elementwise
    IdentityReport trace;       // |tr rhs| for both generators
    IdentityReport hermiticity; // of the full oracle matrix
};

/// Random Hermitian unit-trace states with random detuning and drive.
GeneratorChecks check_generator_equivalence(const SystemParams& params, int n_states, bool ndd, std::uint64_t seed,
                                            double tol_equivalence = 1e-12, double tol_trace = 1e-13);

struct IdentitySuiteOptions
{
    double mirror_tol = 1e-8;
    double symmetric_tol = 1e-8;
    double raman_steady_tol = 1e-9;
    double two_level_tol = 1e-9;
    int generator_states = 1000;
    std::uint64_t seed = 20240601;
};

/// Full suite over NDD-off spectra (one per intensity) plus model-level
/// checks. NDD-on spectra, when given, are reported as diagnostics.
std::vector<IdentityReport> run_identity_suite(const SystemParams& params, const SpectrumTable& ndd_off,
                                               const SpectrumTable* ndd_on = nullptr,
                                               const IdentitySuiteOptions& opts = {});

bool all_pass(const std::vector<IdentityReport>& reports);

/// [{identity, tolerance, max_residual, pass, n_points}, ...]
void write_report_json(const std::vector<IdentityReport>& reports, std::ostream& out);

} // namespace hfs
