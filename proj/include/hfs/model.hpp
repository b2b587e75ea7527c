#pragma once

#include "hfs/density_matrix.hpp"
#include "hfs/types.hpp"

namespace hfs {

/// Atomic constants of the four-level hyperfine system. All angular
/// frequencies are in units of the reference decay rate gamma (gamma = 1);
/// `gamma_ref` carries the SI value used to convert at the boundary.
struct SystemParams
{
    PerCoupling<double> decay{1.0, 1.0, 1.0, 1.0};    // gamma_31, gamma_41, gamma_32, gamma_42
    PerCoupling<double> mu_scale{1.0, 1.0, 1.0, 1.0}; // |mu_ij| / |mu|, 0 decouples a pair
    double delta_g = 0;        // ground hyperfine splitting
    double delta_e = 0;        // excited hyperfine splitting
    double number_density = 0; // m^-3
    double dipole_moment = 0;  // |mu| in C m
    double omega0 = 0;         // optical carrier, rad/s
    double gamma_ref = 0;      // rad/s

    double delta_u() const { return 0.5 * (delta_g + delta_e); }

    /// gamma_ij of the decay channel paired with coupling `c` (e.g. c13 -> gamma_31).
    double decay_rate(Coupling c) const { return decay[c]; }

    /// Total spontaneous decay of excited level |3> (index 2) or |4> (index 3).
    double total_decay(std::size_t excited) const
    {
        return excited == 2 ? decay[c13] + decay[c23] : decay[c14] + decay[c24];
    }

    double from_si(double rad_per_s) const { return rad_per_s / gamma_ref; }
    double to_si(double internal) const { return internal * gamma_ref; }

    /// Throws std::invalid_argument on violated invariants.
    void validate() const;

    /// Ultracold 23Na D1 line.
    static SystemParams sodium_d1();
};

/// Laser drive. `omega` is the bare half-Rabi frequency, `delta_c` the
/// detuning measured from delta_u (delta = delta_c + delta_u). `epsilon`
/// holds the local-field strengths; `ndd_enabled` decides whether they feed
/// back into the Rabi frequencies.
struct Drive
{
    double omega = 0;
    double delta_c = 0;
    bool ndd_enabled = false;
    PerCoupling<double> epsilon{0, 0, 0, 0};

    static Drive make(const SystemParams& params, double omega, double delta_c, bool ndd);
};

/// Detuning from the |3>-|2> line.
inline double laser_detuning(const SystemParams& params, const Drive& drive)
{
    return drive.delta_c + params.delta_u();
}

/// Local-field strength N mu_ij^2 / (3 eps0 hbar) per pair, in gamma units.
PerCoupling<double> derive_epsilon(const SystemParams& params);

/// Same quantity for the reference dipole |mu| (mu_scale = 1).
double epsilon_reference(const SystemParams& params);

struct RabiSet
{
    PerCoupling<double> omega{0, 0, 0, 0};

    double operator[](Coupling c) const { return omega[c]; }
    bool all_zero() const { return omega[0] == 0 && omega[1] == 0 && omega[2] == 0 && omega[3] == 0; }
};

/// Rabi set without local-field correction.
RabiSet bare_rabi(const SystemParams& params, const Drive& drive);

/// Omega_ij = mu_ij Omega - [ndd] eps_ij Re(rho_ij).
RabiSet effective_rabi(const SystemParams& params, const Drive& drive, const DensityMatrix& rho);

/// Complex relaxation/oscillation coefficients of the coherence equations.
template <typename Scalar>
struct GammaSet
{
    Complex<Scalar> g21, g31, g32, g41, g42, g43;
};

template <typename Scalar = double>
GammaSet<Scalar> gamma_set(const SystemParams& p, double delta)
{
    using C = Complex<Scalar>;
    const Scalar d = delta, dg = p.delta_g, de = p.delta_e;
    const Scalar w3 = p.total_decay(2), w4 = p.total_decay(3);
    return {C(0, -dg),
            C(-w3 / 2, d - dg),
            C(-w3 / 2, d),
            C(-w4 / 2, d - dg - de),
            C(-w4 / 2, d - de),
            C(-(w3 + w4) / 2, -de)};
}

enum class HamiltonianConvention {
    AsPrinted,      // diag(0, Dg, -D, De - D)
    GammaConsistent // diag(0, Dg, Dg - D, Dg + De - D), matches the coherence coefficients
};

/// Rotating-frame Hamiltonian (units of hbar) with couplings from `rabi`.
template <typename Scalar = double>
Matrix4<Scalar> hamiltonian(const SystemParams& p, const Drive& drive, const RabiSet& rabi,
                            HamiltonianConvention convention = HamiltonianConvention::GammaConsistent)
{
    const Scalar d = laser_detuning(p, drive);
    const Scalar dg = p.delta_g, de = p.delta_e;
    Matrix4<Scalar> h = Matrix4<Scalar>::Zero();
    if (convention == HamiltonianConvention::AsPrinted)
        h.diagonal() << 0, dg, -d, de - d;
    else
        h.diagonal() << 0, dg, dg - d, dg + de - d;
    for (auto c : kCouplings)
        h(ground_of(c), excited_of(c)) = h(excited_of(c), ground_of(c)) = Scalar(rabi[c]);
    return h;
}

/// Equations of motion for rho, written line by line in the published form
/// (population equations, then coherences 31, 32, 41, 42, 21, 43), at a
/// fixed Rabi set. Linear in rho.
template <typename Scalar>
Hermitian4<Scalar> rhs_verbatim(const SystemParams& p, const Drive& drive, const RabiSet& rabi,
                                const Hermitian4<Scalar>& rho)
{
    using C = Complex<Scalar>;
    const C I(0, 1);
    const auto r = [&](std::size_t i, std::size_t j) { return rho(i - 1, j - 1); };
    const auto cc = [](C z) { return z - std::conj(z); };

    const Scalar O13 = rabi[c13], O14 = rabi[c14], O23 = rabi[c23], O24 = rabi[c24];
    const Scalar g31 = p.decay[c13], g41 = p.decay[c14], g32 = p.decay[c23], g42 = p.decay[c24];
    const auto G = gamma_set<Scalar>(p, laser_detuning(p, drive));

    Hermitian4<Scalar> d;
    d.set(0, 0, g31 * r(3, 3) + g41 * r(4, 4) + I * cc(O13 * r(1, 3) + O14 * r(1, 4)));
    d.set(1, 1, g32 * r(3, 3) + g42 * r(4, 4) + I * cc(O23 * r(2, 3) + O24 * r(2, 4)));
    d.set(2, 2, -(g31 + g32) * r(3, 3) - I * cc(O13 * r(1, 3) + O23 * r(2, 3)));
    d.set(3, 3, -(g41 + g42) * r(4, 4) - I * cc(O14 * r(1, 4) + O24 * r(2, 4)));
    d.set(2, 0, G.g31 * r(3, 1) - I * (O13 * (r(1, 1) - r(3, 3)) - O14 * r(3, 4) + O23 * r(2, 1)));
    d.set(2, 1, G.g32 * r(3, 2) - I * (O13 * r(1, 2) + O23 * (r(2, 2) - r(3, 3)) - O24 * r(3, 4)));
    d.set(3, 0, G.g41 * r(4, 1) + I * (O13 * r(4, 3) - O14 * (r(1, 1) - r(4, 4)) - O24 * r(2, 1)));
    d.set(3, 1, G.g42 * r(4, 2) - I * (O14 * r(1, 2) - O23 * r(4, 3) + O24 * (r(2, 2) - r(4, 4))));
    d.set(1, 0, G.g21 * r(2, 1) + I * (O13 * r(2, 3) + O14 * r(2, 4) - O23 * r(3, 1) - O24 * r(4, 1)));
    d.set(3, 2, G.g43 * r(4, 3) + I * (O13 * r(4, 1) - O14 * r(1, 3) + O23 * r(4, 2) - O24 * r(2, 3)));
    return d;
}

/// Same, with the Rabi set evaluated self-consistently from rho.
inline DensityMatrix rhs_verbatim(const SystemParams& p, const Drive& drive, const DensityMatrix& rho)
{
    return rhs_verbatim(p, drive, effective_rabi(p, drive, rho), rho);
}

/// Independent generator: -i[H, rho] plus the Lindblad dissipator with jump
/// operators sqrt(gamma_ji) |j><i| from each excited level to each ground level.
template <typename Scalar>
Hermitian4<Scalar> rhs_oracle(const SystemParams& p, const Drive& drive, const RabiSet& rabi,
                              const Hermitian4<Scalar>& rho,
                              HamiltonianConvention convention = HamiltonianConvention::GammaConsistent)
{
    using C = Complex<Scalar>;
    const Matrix4c<Scalar> h = hamiltonian<Scalar>(p, drive, rabi, convention).template cast<C>();
    const Matrix4c<Scalar> m = rho.matrix();
    Matrix4c<Scalar> out = C(0, -1) * (h * m - m * h);
    for (auto c : kCouplings) {
        Matrix4c<Scalar> jump = Matrix4c<Scalar>::Zero();
        jump(ground_of(c), excited_of(c)) = std::sqrt(Scalar(p.decay[c]));
        const Matrix4c<Scalar> jj = jump.adjoint() * jump;
        out += jump * m * jump.adjoint() - Scalar(0.5) * (jj * m + m * jj);
    }
    return Hermitian4<Scalar>::from_matrix(out);
}

inline DensityMatrix rhs_oracle(const SystemParams& p, const Drive& drive, const DensityMatrix& rho)
{
    return rhs_oracle(p, drive, effective_rabi(p, drive, rho), rho);
}

} // namespace hfs
