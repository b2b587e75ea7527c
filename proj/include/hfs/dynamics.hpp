#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfs/steady.hpp"

namespace hfs {

enum class Integrator {
    DormandPrince54, // explicit, for transients
    Rosenbrock23     // L-stable, for long relaxation runs
};

struct EvolveOptions
{
    double rtol = 1e-8;
    double atol = 1e-10;
    Integrator method = Integrator::DormandPrince54;
    double initial_step = 0; // 0 selects a step from the initial derivative
    /// When non-empty the trajectory is sampled exactly at these times (cubic
    /// Hermite dense output); otherwise every accepted step is recorded.
    std::vector<double> output_times;
};

struct TrajectorySample
{
    double t;
    DensityMatrix rho;
};

struct Trajectory
{
    std::vector<TrajectorySample> samples;
    bool dense_output = false;
    std::vector<double> trace_corrections; // times at which rho was renormalized
    long accepted_steps = 0;
    long rejected_steps = 0;
};

class StepSizeUnderflow : public std::runtime_error
{
public:
    explicit StepSizeUnderflow(double t)
        : std::runtime_error("step size underflow at t = " + std::to_string(t)), m_t(t)
    {
    }
    double t_reached() const { return m_t; }

private:
    double m_t;
};

/// Integrates the equations of motion (Rabi set re-evaluated from the
/// instantaneous rho) from t = 0 to t_end, time in units of 1/gamma.
Trajectory evolve(const SystemParams& params, const Drive& drive, const DensityMatrix& rho0, double t_end,
                  const EvolveOptions& opts = {});

struct RelaxOptions
{
    double residual_tol = 1e-9;
    double t_max = 1e4;
    // Step tolerances only shape the path; accuracy of the end state is set
    // by residual_tol, since the fixed point is exact for any step size.
    double rtol = 1e-3;
    double atol = 1e-6;
    Integrator method = Integrator::Rosenbrock23;
};

/// Time-evolves until residual_norm drops below residual_tol or t_max is
/// reached. `iterations` counts accepted steps.
SteadyResult relax_to_steady(const SystemParams& params, const Drive& drive, const DensityMatrix& rho0,
                             const RelaxOptions& opts = {});

/// CSV with header t,rho11,rho22,rho33,rho44,re_rho21,im_rho21,...,re_rho43,im_rho43.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

} // namespace hfs
