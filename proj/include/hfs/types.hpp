#pragma once

#include <array>
#include <complex>
#include <cstddef>

#include <Eigen/Core>

namespace hfs {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;

template <typename Scalar>
using Matrix4c = Eigen::Matrix<std::complex<Scalar>, 4, 4>;

// Real coordinates of a 4x4 Hermitian matrix, see Hermitian4.
template <typename Scalar>
using StateVector = Eigen::Matrix<Scalar, 16, 1>;

// Linear map on StateVector (the Liouvillian at a fixed Rabi set).
template <typename Scalar>
using Generator = Eigen::Matrix<Scalar, 16, 16>;

// Dipole-allowed ground/excited pairs. The same index addresses the coupling
// Omega_ij and the spontaneous decay rate gamma_ji of that pair.
enum Coupling : std::size_t { c13 = 0, c14 = 1, c23 = 2, c24 = 3 };

inline constexpr std::array<Coupling, 4> kCouplings{c13, c14, c23, c24};

// 0-based level indices (|1> -> 0, ..., |4> -> 3).
inline constexpr std::size_t ground_of(Coupling c) { return c == c13 || c == c14 ? 0 : 1; }
inline constexpr std::size_t excited_of(Coupling c) { return c == c13 || c == c23 ? 2 : 3; }

template <typename T>
using PerCoupling = std::array<T, 4>;

// Optical transitions for which susceptibility is reported, named by the
// coherence rho_ij (i excited, j ground).
enum class Transition { t31, t41, t32, t42 };

inline constexpr Coupling coupling_of(Transition t)
{
    switch (t) {
    case Transition::t31: return c13;
    case Transition::t41: return c14;
    case Transition::t32: return c23;
    case Transition::t42: return c24;
    }
    return c13;
}

inline constexpr const char* name_of(Transition t)
{
    switch (t) {
    case Transition::t31: return "31";
    case Transition::t41: return "41";
    case Transition::t32: return "32";
    case Transition::t42: return "42";
    }
    return "?";
}

} // namespace hfs
