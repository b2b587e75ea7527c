#include "hfs/steady.hpp"

#include <Eigen/LU>

namespace hfs {

void SolveOptions::validate() const
{
    if (!(fp_tol > 0))
        throw std::invalid_argument("fp_tol must be positive");
    if (!(damping > 0 && damping <= 1))
        throw std::invalid_argument("damping must lie in (0, 1]");
    if (max_iters < 1)
        throw std::invalid_argument("max_iters must be at least 1");
}

Generator<double> generator_matrix(const SystemParams& params, const Drive& drive, const RabiSet& rabi)
{
    Generator<double> a;
    for (Eigen::Index k = 0; k < 16; ++k) {
        DensityMatrix e;
        e.coords()(k) = 1.0;
        a.col(k) = rhs_verbatim(params, drive, rabi, e).coords();
    }
    return a;
}

std::array<bool, 4> isolated_levels(const SystemParams& params, const RabiSet& rabi)
{
    std::array<bool, 4> isolated{true, true, true, true};
    for (auto c : kCouplings) {
        if (rabi[c] != 0 || params.decay[c] != 0) {
            isolated[ground_of(c)] = false;
            isolated[excited_of(c)] = false;
        }
    }
    return isolated;
}

DensityMatrix solve_linear_steady(const SystemParams& params, const Drive& drive, const RabiSet& rabi)
{
    if (rabi.all_zero())
        throw SingularSystem("no drive: ground-state populations are undetermined", 0.0);

    Generator<double> a = generator_matrix(params, drive, rabi);
    StateVector<double> b = StateVector<double>::Zero();

    a.row(0).setZero();
    a.row(0).head<4>().setOnes();
    b(0) = 1.0;

    const auto isolated = isolated_levels(params, rabi);
    for (Eigen::Index k = 1; k < 4; ++k) {
        if (isolated[k]) {
            a.row(k).setZero();
            a(k, k) = 1.0;
        }
    }

    const Eigen::FullPivLU<Generator<double>> lu(a);
    const double rcond = lu.rcond();
    if (!lu.isInvertible() || rcond < 1e-15)
        throw SingularSystem("stationary equations are rank deficient (rcond = " + std::to_string(rcond) + ")",
                             rcond);
    StateVector<double> x = lu.solve(b);
    // one refinement step
    x += lu.solve(b - a * x);
    return DensityMatrix(x);
}

SteadyResult solve_selfconsistent(const SystemParams& params, const Drive& drive, const SolveOptions& opts)
{
    opts.validate();
    SteadyResult out;
    const bool nonlinear = drive.ndd_enabled &&
                           (drive.epsilon[0] != 0 || drive.epsilon[1] != 0 || drive.epsilon[2] != 0 ||
                            drive.epsilon[3] != 0);

    if (!nonlinear) {
        out.rabi_final = bare_rabi(params, drive);
        out.rho = solve_linear_steady(params, drive, out.rabi_final);
        out.iterations = 1;
        out.converged = true;
        out.residual = residual_norm(params, drive, out.rho);
        return out;
    }

    DensityMatrix current = opts.warm_start ? *opts.warm_start
                                            : solve_linear_steady(params, drive, bare_rabi(params, drive));
    DensityMatrix next = current;
    double change = 0;
    for (int it = 1; it <= opts.max_iters; ++it) {
        const RabiSet rabi = effective_rabi(params, drive, current);
        next = solve_linear_steady(params, drive, rabi);
        change = next.max_abs_diff(current);
        out.iterations = it;
        if (change < opts.fp_tol) {
            out.converged = true;
            break;
        }
        current = DensityMatrix((1.0 - opts.damping) * current.coords() + opts.damping * next.coords());
    }

    out.rho = next;
    out.rabi_final = effective_rabi(params, drive, next);
    out.residual = residual_norm(params, drive, next);
    if (!out.converged)
        out.diagnostic = "fixed-point iteration stopped at max_iters with last change " + std::to_string(change);
    return out;
}

double residual_norm(const SystemParams& params, const Drive& drive, const DensityMatrix& rho)
{
    return rhs_verbatim(params, drive, rho).max_abs();
}

} // namespace hfs
