#include "hfs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include <Eigen/LU>

#include "hfs/io_format.hpp"

namespace hfs {

namespace {

using Vec = StateVector<double>;

struct System
{
    const SystemParams& params;
    const Drive& drive;

    Vec f(const Vec& y) const { return rhs_verbatim(params, drive, DensityMatrix(y)).coords(); }

    // f is at most quadratic in y (affine Rabi set times linear generator),
    // so the unit central difference is exact.
    Generator<double> jacobian(const Vec& y) const
    {
        if (!drive.ndd_enabled)
            return generator_matrix(params, drive, bare_rabi(params, drive));
        Generator<double> j;
        for (Eigen::Index k = 0; k < 16; ++k) {
            Vec e = Vec::Zero();
            e(k) = 1.0;
            j.col(k) = 0.5 * (f(y + e) - f(y - e));
        }
        return j;
    }
};

double error_norm(const Vec& err, const Vec& y0, const Vec& y1, double rtol, double atol)
{
    const Vec scale = (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
    return std::sqrt((err.cwiseQuotient(scale)).squaredNorm() / 16.0);
}

struct StepResult
{
    Vec y;
    Vec f;
    double err;
};

struct DormandPrince54
{
    static constexpr double order_exponent = 1.0 / 5.0;

    StepResult step(const System& sys, const Vec& y, const Vec& f0, double h, double rtol, double atol) const
    {
        const Vec k1 = f0;
        const Vec k2 = sys.f(y + h * (1.0 / 5.0) * k1);
        const Vec k3 = sys.f(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
        const Vec k4 = sys.f(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
        const Vec k5 = sys.f(y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 + 64448.0 / 6561.0 * k3 -
                                      212.0 / 729.0 * k4));
        const Vec k6 = sys.f(y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3 +
                                      49.0 / 176.0 * k4 - 5103.0 / 18656.0 * k5));
        const Vec y1 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                                2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
        const Vec k7 = sys.f(y1);
        const Vec e = h * (71.0 / 57600.0 * k1 - 71.0 / 16695.0 * k3 + 71.0 / 1920.0 * k4 -
                           17253.0 / 339200.0 * k5 + 22.0 / 525.0 * k6 - 1.0 / 40.0 * k7);
        return {y1, k7, error_norm(e, y, y1, rtol, atol)};
    }
};

// Shampine-Reichelt modified Rosenbrock pair (order 2 with 3rd-order error
// estimate), autonomous form.
struct Rosenbrock23
{
    static constexpr double order_exponent = 1.0 / 3.0;

    StepResult step(const System& sys, const Vec& y, const Vec& f0, double h, double rtol, double atol) const
    {
        const double d = 1.0 / (2.0 + std::sqrt(2.0));
        const double e32 = 6.0 + std::sqrt(2.0);
        const Generator<double> w = Generator<double>::Identity() - h * d * sys.jacobian(y);
        const Eigen::PartialPivLU<Generator<double>> lu(w);
        const Vec k1 = lu.solve(f0);
        const Vec f1 = sys.f(y + 0.5 * h * k1);
        const Vec k2 = lu.solve(f1 - k1) + k1;
        const Vec y1 = y + h * k2;
        const Vec f2 = sys.f(y1);
        const Vec k3 = lu.solve(f2 - e32 * (k2 - f1) - 2.0 * (k1 - f0));
        const Vec e = (h / 6.0) * (k1 - 2.0 * k2 + k3);
        return {y1, f2, error_norm(e, y, y1, rtol, atol)};
    }
};

double initial_step(const Vec& y, const Vec& f, double rtol, double atol)
{
    const Vec scale = (atol + rtol * y.cwiseAbs().array()).matrix();
    const double d0 = std::sqrt(y.cwiseQuotient(scale).squaredNorm() / 16.0);
    const double d1 = std::sqrt(f.cwiseQuotient(scale).squaredNorm() / 16.0);
    if (d0 < 1e-5 || d1 < 1e-5)
        return 1e-6;
    return 0.01 * d0 / d1;
}

void renormalize_if_drifted(Vec& y, double t, std::vector<double>& log)
{
    const double tr = y.head<4>().sum();
    if (std::abs(tr - 1.0) > 1e-9) {
        y /= tr;
        log.push_back(t);
    }
}

Vec hermite(const Vec& y0, const Vec& f0, const Vec& y1, const Vec& f1, double h, double theta)
{
    const double t2 = theta * theta, t3 = t2 * theta;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + theta;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1;
}

// Generic adaptive driver. `on_step(t0, y0, f0, t1, y1, f1)` is called after
// every accepted step and returns true to stop.
template <typename Method, typename OnStep>
void integrate(const Method& method, const System& sys, Vec y, double t_end, double rtol, double atol,
               double h_init, std::vector<double>& corrections, long& accepted, long& rejected, OnStep&& on_step)
{
    double t = 0;
    Vec f = sys.f(y);
    double h = h_init > 0 ? h_init : initial_step(y, f, rtol, atol);
    bool last_rejected = false;
    while (t < t_end) {
        h = std::min(h, t_end - t);
        if (h < 16 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
            throw StepSizeUnderflow(t);
        StepResult s = method.step(sys, y, f, h, rtol, atol);
        if (!std::isfinite(s.err) || s.err > 1.0) {
            ++rejected;
            const double fac = std::isfinite(s.err) ? std::max(0.2, 0.9 * std::pow(s.err, -Method::order_exponent))
                                                    : 0.2;
            h *= fac;
            last_rejected = true;
            continue;
        }
        ++accepted;
        const double t1 = (t_end - t - h <= 0) ? t_end : t + h;
        Vec y1 = s.y;
        Vec f1 = s.f;
        const double tr_before = y1.head<4>().sum();
        renormalize_if_drifted(y1, t1, corrections);
        if (y1.head<4>().sum() != tr_before)
            f1 = sys.f(y1);
        if (on_step(t, y, f, t1, y1, f1))
            return;
        double fac = s.err > 0 ? 0.9 * std::pow(s.err, -Method::order_exponent) : 5.0;
        fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
        last_rejected = false;
        t = t1;
        y = y1;
        f = f1;
        h *= fac;
    }
}

template <typename OnStep>
void dispatch(Integrator which, const System& sys, const Vec& y0, double t_end, double rtol, double atol,
              double h_init, std::vector<double>& corrections, long& accepted, long& rejected, OnStep&& on_step)
{
    if (which == Integrator::Rosenbrock23)
        integrate(Rosenbrock23{}, sys, y0, t_end, rtol, atol, h_init, corrections, accepted, rejected, on_step);
    else
        integrate(DormandPrince54{}, sys, y0, t_end, rtol, atol, h_init, corrections, accepted, rejected, on_step);
}

} // namespace

Trajectory evolve(const SystemParams& params, const Drive& drive, const DensityMatrix& rho0, double t_end,
                  const EvolveOptions& opts)
{
    if (!(t_end > 0))
        throw std::invalid_argument("t_end must be positive");
    if (!(opts.rtol > 0) || !(opts.atol > 0))
        throw std::invalid_argument("tolerances must be positive");
    if (!std::is_sorted(opts.output_times.begin(), opts.output_times.end()))
        throw std::invalid_argument("output_times must be sorted");

    Trajectory traj;
    traj.dense_output = !opts.output_times.empty();
    const System sys{params, drive};
    std::size_t next_out = 0;

    if (traj.dense_output) {
        while (next_out < opts.output_times.size() && opts.output_times[next_out] <= 0) {
            traj.samples.push_back({opts.output_times[next_out], rho0});
            ++next_out;
        }
    } else {
        traj.samples.push_back({0.0, rho0});
    }

    dispatch(opts.method, sys, rho0.coords(), t_end, opts.rtol, opts.atol, opts.initial_step,
             traj.trace_corrections, traj.accepted_steps, traj.rejected_steps,
             [&](double t0, const Vec& y0, const Vec& f0, double t1, const Vec& y1, const Vec& f1) {
                 if (!traj.dense_output) {
                     traj.samples.push_back({t1, DensityMatrix(y1)});
                     return false;
                 }
                 while (next_out < opts.output_times.size() && opts.output_times[next_out] <= t1) {
                     const double tq = opts.output_times[next_out];
                     const Vec yq = tq == t1 ? y1 : hermite(y0, f0, y1, f1, t1 - t0, (tq - t0) / (t1 - t0));
                     traj.samples.push_back({tq, DensityMatrix(yq)});
                     ++next_out;
                 }
                 return false;
             });
    return traj;
}

SteadyResult relax_to_steady(const SystemParams& params, const Drive& drive, const DensityMatrix& rho0,
                             const RelaxOptions& opts)
{
    SteadyResult out;
    out.rho = rho0;
    out.rabi_final = effective_rabi(params, drive, rho0);
    if (bare_rabi(params, drive).all_zero()) {
        out.residual = residual_norm(params, drive, rho0);
        out.diagnostic = "no drive: the stationary state is not unique";
        return out;
    }

    out.residual = residual_norm(params, drive, rho0);
    if (out.residual < opts.residual_tol) {
        out.converged = true;
        return out;
    }

    const System sys{params, drive};
    std::vector<double> corrections;
    long accepted = 0, rejected = 0;
    try {
        dispatch(opts.method, sys, rho0.coords(), opts.t_max, opts.rtol, opts.atol, 0.0, corrections, accepted,
                 rejected, [&](double, const Vec&, const Vec&, double t1, const Vec& y1, const Vec&) {
                     out.rho = DensityMatrix(y1);
                     out.residual = residual_norm(params, drive, out.rho);
                     if (out.residual < opts.residual_tol) {
                         out.converged = true;
                         return true;
                     }
                     if (t1 >= opts.t_max)
                         out.diagnostic = "t_max reached before the residual tolerance";
                     return false;
                 });
    } catch (const StepSizeUnderflow& e) {
        out.diagnostic = e.what();
    }
    out.iterations = static_cast<int>(std::min<long>(accepted, std::numeric_limits<int>::max()));
    out.rabi_final = effective_rabi(params, drive, out.rho);
    return out;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out)
{
    out << "t";
    for (const auto& c : state_column_names())
        out << ',' << c;
    out << '\n';
    for (const auto& s : traj.samples) {
        out << format_double(s.t);
        for (Eigen::Index k = 0; k < 16; ++k)
            out << ',' << format_double(s.rho.coords()(k));
        out << '\n';
    }
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + path + " for writing");
    write_trajectory_csv(traj, f);
    if (!f)
        throw std::runtime_error("write failed: " + path);
}

} // namespace hfs
