#include "hfs/model.hpp"

#include <stdexcept>
#include <string>

#include "hfs/constants.hpp"

namespace hfs {

void SystemParams::validate() const
{
    for (auto c : kCouplings) {
        if (!(decay[c] >= 0))
            throw std::invalid_argument("decay rates must be non-negative");
        if (!(mu_scale[c] >= 0))
            throw std::invalid_argument("dipole multipliers must be non-negative");
    }
    if (!(delta_g > 0) || !(delta_e > 0))
        throw std::invalid_argument("hyperfine splittings must be positive");
    if (!(number_density >= 0))
        throw std::invalid_argument("number density must be non-negative");
    if (!(dipole_moment >= 0))
        throw std::invalid_argument("dipole moment must be non-negative");
    if (!(omega0 > 0))
        throw std::invalid_argument("carrier frequency omega0 must be positive");
    if (!(gamma_ref > 0))
        throw std::invalid_argument("gamma_ref must be positive");
}

SystemParams SystemParams::sodium_d1()
{
    namespace na = constants::sodium_d1;
    SystemParams p;
    p.gamma_ref = constants::mhz_to_rad_per_s(na::gamma_mhz);
    p.delta_g = na::delta_g_mhz / na::gamma_mhz;
    p.delta_e = na::delta_e_mhz / na::gamma_mhz;
    p.number_density = na::number_density;
    p.dipole_moment = na::dipole_moment;
    p.omega0 = constants::two_pi * na::carrier_hz;
    return p;
}

Drive Drive::make(const SystemParams& params, double omega, double delta_c, bool ndd)
{
    return Drive{omega, delta_c, ndd, derive_epsilon(params)};
}

double epsilon_reference(const SystemParams& p)
{
    const double mu = p.dipole_moment;
    const double eps_si = p.number_density * mu * mu / (3.0 * constants::vacuum_permittivity * constants::hbar);
    return p.from_si(eps_si);
}

PerCoupling<double> derive_epsilon(const SystemParams& p)
{
    const double ref = epsilon_reference(p);
    PerCoupling<double> eps{};
    for (auto c : kCouplings)
        eps[c] = ref * p.mu_scale[c] * p.mu_scale[c];
    return eps;
}

RabiSet bare_rabi(const SystemParams& p, const Drive& drive)
{
    RabiSet r;
    for (auto c : kCouplings)
        r.omega[c] = p.mu_scale[c] * drive.omega;
    return r;
}

RabiSet effective_rabi(const SystemParams& p, const Drive& drive, const DensityMatrix& rho)
{
    RabiSet r = bare_rabi(p, drive);
    if (!drive.ndd_enabled)
        return r;
    for (auto c : kCouplings)
        r.omega[c] -= drive.epsilon[c] * rho(excited_of(c), ground_of(c)).real();
    return r;
}

} // namespace hfs
