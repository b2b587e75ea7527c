#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hfs/optics.hpp"
#include "hfs/steady.hpp"

namespace hfs {

enum class GridUnit { Gamma, DeltaU };

/// Evenly spaced grid from `lo` to `hi` (inclusive). When lo == -hi the
/// result is exactly mirror-symmetric, with an exact 0 for odd counts.
std::vector<double> linear_grid(double lo, double hi, int count);

struct SweepSpec
{
    std::vector<double> delta_c; // gamma units, strictly increasing
    GridUnit unit = GridUnit::DeltaU; // unit the grid was specified in
    std::vector<double> omegas;  // gamma units
    bool ndd = false;
    bool symmetric = false;      // grid must then satisfy x_k == -x_{n-1-k}
    SolveOptions solver;

    /// Throws std::invalid_argument.
    void validate() const;

    /// [-5, 5] delta_u with 2001 points at Omega = 0.5, 5, 20, 100 gamma.
    static SweepSpec reference(const SystemParams& params);
};

struct SpectrumRecord
{
    double delta_c_over_delta_u = 0;
    double omega_over_gamma = 0;
    bool ndd = false;
    DensityMatrix rho;
    double w_g = 0, w_e = 0;
    double chi_re_31 = 0, chi_im_31 = 0, chi_re_41 = 0, chi_im_41 = 0;
    double n_31 = 1, ng_31 = 1, n_41 = 1, ng_41 = 1;
    DispersionClass dispersion_31 = DispersionClass::Normal, dispersion_41 = DispersionClass::Normal;
    LineClass line_31 = LineClass::Absorption, line_41 = LineClass::Absorption;
    bool converged = false;
    int iterations = 0;
    double residual = 0;
};

/// Records sorted by (omega, delta_c). Failed points are kept and flagged.
struct SpectrumTable
{
    std::vector<SpectrumRecord> records;

    std::vector<double> omegas() const;
    /// Records of one intensity, in delta_c order.
    std::vector<SpectrumRecord> at_omega(double omega_over_gamma) const;
};

/// Worker count: `requested` (0 = hardware concurrency), capped by the
/// HFS_THREADS environment variable when set.
unsigned resolve_worker_count(unsigned requested);

/// Solves every grid point, continuing along ascending delta_c within one
/// intensity. Intensities run in parallel; output does not depend on the
/// worker count.
SpectrumTable run_sweep(const SystemParams& params, const SweepSpec& spec, unsigned workers = 0);

/// Fills chi, n, n_g and class columns of one intensity block in place.
void compute_observables(const SystemParams& params, std::vector<SpectrumRecord>& block);

const std::vector<std::string>& spectrum_columns();

void write_csv(const SpectrumTable& table, std::ostream& out);
void write_csv(const SpectrumTable& table, const std::string& path);
SpectrumTable read_csv(std::istream& in);
SpectrumTable read_csv_file(const std::string& path);

void write_json(const SpectrumTable& table, std::ostream& out);
void write_json(const SpectrumTable& table, const std::string& path);
SpectrumTable read_json(std::istream& in);
SpectrumTable read_json_file(const std::string& path);

struct Extremum
{
    double delta_c_over_delta_u = 0;
    double value = 0;
};

struct TransitionSummary
{
    Transition transition;
    std::vector<std::pair<double, double>> gain_intervals; // delta_c / delta_u bounds
    Extremum steepest_chi_re_slope;                        // d chi_re / d(delta_c / delta_u)
    Extremum max_absorption;                               // argmax chi_im
    Extremum max_gain;                                     // argmin chi_im
};

struct IntensitySummary
{
    double omega_over_gamma = 0;
    Extremum w_g_max, w_g_min, w_e_max, w_e_min;
    std::vector<TransitionSummary> transitions; // 31, 41
};

std::vector<IntensitySummary> summarize(const SpectrumTable& table);

} // namespace hfs
