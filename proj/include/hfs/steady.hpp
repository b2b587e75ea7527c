#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "hfs/model.hpp"

namespace hfs {

struct SolveOptions
{
    double fp_tol = 1e-11; // max-abs change of rho between fixed-point iterations
    int max_iters = 500;
    double damping = 0.5;  // weight of the new iterate
    std::optional<DensityMatrix> warm_start;

    void validate() const;
};

struct SteadyResult
{
    DensityMatrix rho;
    bool converged = false;
    int iterations = 0;
    double residual = 0; // max-abs of the equations of motion at rho
    RabiSet rabi_final;
    std::string diagnostic;
};

/// The stationary equations do not determine rho uniquely (e.g. no drive).
class SingularSystem : public std::runtime_error
{
public:
    SingularSystem(const std::string& what, double rcond) : std::runtime_error(what), m_rcond(rcond) {}
    double rcond() const { return m_rcond; }

private:
    double m_rcond;
};

/// Matrix of the (linear) equations of motion at a fixed Rabi set, acting on
/// the 16 real coordinates of Hermitian4.
Generator<double> generator_matrix(const SystemParams& params, const Drive& drive, const RabiSet& rabi);

/// Levels with no coupling and no decay in or out. Their populations are
/// conserved, so the stationary problem pins them to zero.
std::array<bool, 4> isolated_levels(const SystemParams& params, const RabiSet& rabi);

/// Stationary rho at a fixed Rabi set: the rho_11 equation is replaced by
/// the unit-trace condition. Throws SingularSystem.
DensityMatrix solve_linear_steady(const SystemParams& params, const Drive& drive, const RabiSet& rabi);

/// Damped fixed-point iteration on the local-field-corrected Rabi set. With
/// the correction disabled this is a single linear solve. Non-convergence is
/// reported through the result, singular systems throw.
SteadyResult solve_selfconsistent(const SystemParams& params, const Drive& drive, const SolveOptions& opts = {});

/// Max-abs element of the equations of motion with the self-consistent Rabi set.
double residual_norm(const SystemParams& params, const Drive& drive, const DensityMatrix& rho);

} // namespace hfs
