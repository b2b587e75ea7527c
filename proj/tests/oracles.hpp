#pragma once

// Reference computations that share no code with the library: a dense
// complex Liouvillian built from Kronecker products, and random states.

#include <array>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "hfs/model.hpp"

namespace oracle {

using cplx = std::complex<double>;
using M4 = Eigen::Matrix<cplx, 4, 4>;
using M16 = Eigen::Matrix<cplx, 16, 16>;

// column-stacking vec: vec(A X B) = (B^T kron A) vec X, index i + 4 j
inline M16 kron(const M4& a, const M4& b)
{
    M16 k;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            k.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
    return k;
}

// rabi in order 13, 14, 23, 24; decay in order 31, 41, 32, 42
inline M16 liouvillian(double delta, double dg, double de, const std::array<double, 4>& rabi,
                       const std::array<double, 4>& decay)
{
    M4 h = M4::Zero();
    h(1, 1) = dg;
    h(2, 2) = dg - delta;
    h(3, 3) = dg + de - delta;
    h(0, 2) = h(2, 0) = rabi[0];
    h(0, 3) = h(3, 0) = rabi[1];
    h(1, 2) = h(2, 1) = rabi[2];
    h(1, 3) = h(3, 1) = rabi[3];
    const M4 id = M4::Identity();
    M16 l = cplx(0, -1) * (kron(id, h) - kron(h.transpose(), id));
    const std::array<std::pair<int, int>, 4> channels{{{0, 2}, {0, 3}, {1, 2}, {1, 3}}};
    for (int c = 0; c < 4; ++c) {
        M4 j = M4::Zero();
        j(channels[c].first, channels[c].second) = std::sqrt(decay[c]);
        const M4 jj = j.adjoint() * j;
        l += kron(j.conjugate(), j) - 0.5 * kron(id, jj) - 0.5 * kron(jj.transpose(), id);
    }
    return l;
}

inline M4 unvec(const Eigen::Matrix<cplx, 16, 1>& v)
{
    M4 m;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i)
            m(i, j) = v(i + 4 * j);
    return m;
}

inline Eigen::Matrix<cplx, 16, 1> vec(const M4& m)
{
    Eigen::Matrix<cplx, 16, 1> v;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i)
            v(i + 4 * j) = m(i, j);
    return v;
}

/// Stationary state of L with unit trace (first row replaced).
inline M4 stationary(const M16& l)
{
    M16 a = l;
    a.row(0).setZero();
    for (int k = 0; k < 4; ++k)
        a(0, k * 5) = 1.0;
    Eigen::Matrix<cplx, 16, 1> b = Eigen::Matrix<cplx, 16, 1>::Zero();
    b(0) = 1.0;
    return unvec(a.fullPivLu().solve(b));
}

inline std::array<double, 4> decays(const hfs::SystemParams& p)
{
    return {p.decay[hfs::c13], p.decay[hfs::c14], p.decay[hfs::c23], p.decay[hfs::c24]};
}

/// Steady state without the local-field correction, all four couplings
/// driven at omega times their dipole scale.
inline M4 steady_state(const hfs::SystemParams& p, double omega, double delta_c)
{
    const double delta = delta_c + 0.5 * (p.delta_g + p.delta_e);
    const std::array<double, 4> rabi{omega * p.mu_scale[hfs::c13], omega * p.mu_scale[hfs::c14],
                                     omega * p.mu_scale[hfs::c23], omega * p.mu_scale[hfs::c24]};
    return stationary(liouvillian(delta, p.delta_g, p.delta_e, rabi, decays(p)));
}

/// Ginibre random density matrix.
inline M4 random_state(std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    M4 g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            g(i, j) = cplx(n(rng), n(rng));
    const M4 r = g * g.adjoint();
    return r / r.trace().real();
}

} // namespace oracle
