#include "hfs/optics.hpp"

#include <cmath>

namespace hfs {

const char* to_string(DispersionClass c) { return c == DispersionClass::Normal ? "normal" : "anomalous"; }
const char* to_string(LineClass c) { return c == LineClass::Gain ? "gain" : "absorption"; }

Susceptibility susceptibility(const SystemParams& params, const Drive& drive, const DensityMatrix& rho,
                              Transition transition)
{
    if (drive.omega == 0)
        throw ZeroField();
    const Coupling c = coupling_of(transition);
    const double prefactor = -1.5 * epsilon_reference(params) * params.mu_scale[c] / drive.omega;
    const std::complex<double> chi = prefactor * rho(excited_of(c), ground_of(c));
    return {transition, chi.real(), chi.imag()};
}

double refractive_index(std::complex<double> chi) { return std::sqrt(1.0 + chi).real(); }

DispersionClass classify_dispersion(double dn_domega)
{
    return dn_domega > 0 ? DispersionClass::Normal : DispersionClass::Anomalous;
}

LineClass classify_line(double chi_im) { return chi_im < 0 ? LineClass::Gain : LineClass::Absorption; }

std::vector<DispersionPoint> group_index(const Eigen::Ref<const Eigen::VectorXd>& w,
                                         const Eigen::Ref<const Eigen::VectorXd>& n, double omega0)
{
    const Eigen::Index m = w.size();
    if (n.size() != m)
        throw std::invalid_argument("frequency and index arrays differ in length");
    if (m < 3)
        throw InsufficientPoints("group index needs at least 3 grid points");
    for (Eigen::Index k = 1; k < m; ++k)
        if (!(w(k) > w(k - 1)))
            throw std::invalid_argument("frequency grid must be strictly increasing");

    std::vector<DispersionPoint> out(static_cast<std::size_t>(m));
    for (Eigen::Index k = 0; k < m; ++k) {
        auto& p = out[static_cast<std::size_t>(k)];
        if (k == 0) {
            p.slope = (n(1) - n(0)) / (w(1) - w(0));
        } else if (k == m - 1) {
            p.slope = (n(k) - n(k - 1)) / (w(k) - w(k - 1));
        } else {
            p.slope = (n(k + 1) - n(k - 1)) / (w(k + 1) - w(k - 1));
            const double left = w(k) - w(k - 1), right = w(k + 1) - w(k);
            p.nonuniform_spacing = std::abs(left - right) > 1e-9 * std::max(left, right);
        }
        p.n = n(k);
        p.ng = n(k) + omega0 * p.slope;
        p.dispersion_class = classify_dispersion(p.slope);
    }
    return out;
}

PopulationTransfer population_transfer(const DensityMatrix& rho)
{
    return {rho.population(1) - rho.population(0), rho.population(3) - rho.population(2)};
}

} // namespace hfs
