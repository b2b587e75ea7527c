#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>

#include <Eigen/Eigenvalues>

#include "hfs/types.hpp"

namespace hfs {

namespace detail {
// Offset of Re(rho_ij), i > j, inside the 16-coordinate layout
//   rho11 rho22 rho33 rho44 | 21 31 32 41 42 43 as (re, im) pairs.
constexpr std::size_t lower_offset(std::size_t i, std::size_t j)
{
    constexpr std::size_t table[4][4] = {
        {0, 0, 0, 0}, {4, 0, 0, 0}, {6, 8, 0, 0}, {10, 12, 14, 0}};
    return table[i][j];
}
} // namespace detail

/// 4x4 Hermitian matrix stored as 16 real coordinates: the four (real)
/// diagonal entries followed by real and imaginary parts of the strictly
/// lower triangle in the order 21, 31, 32, 41, 42, 43. Hermiticity holds by
/// construction; the upper triangle is never stored.
template <typename Scalar>
class Hermitian4
{
public:
    using Coords = StateVector<Scalar>;
    using value_type = Complex<Scalar>;

    Hermitian4() : m_c(Coords::Zero()) {}
    explicit Hermitian4(const Coords& c) : m_c(c) {}

    /// Takes the real diagonal and the lower triangle of `m`; the upper
    /// triangle is ignored.
    static Hermitian4 from_matrix(const Matrix4c<Scalar>& m)
    {
        Hermitian4 h;
        for (std::size_t i = 0; i < 4; ++i) {
            h.m_c(i) = m(i, i).real();
            for (std::size_t j = 0; j < i; ++j)
                h.set(i, j, m(i, j));
        }
        return h;
    }

    /// Pure state |k><k| (0-based level index).
    static Hermitian4 basis_state(std::size_t k)
    {
        Hermitian4 h;
        h.m_c(k) = Scalar(1);
        return h;
    }

    static Hermitian4 ground() { return basis_state(0); }

    static Hermitian4 maximally_mixed()
    {
        Hermitian4 h;
        h.m_c.template head<4>().setConstant(Scalar(0.25));
        return h;
    }

    value_type operator()(std::size_t i, std::size_t j) const
    {
        assert(i < 4 && j < 4);
        if (i == j)
            return {m_c(i), Scalar(0)};
        if (i > j) {
            const auto k = detail::lower_offset(i, j);
            return {m_c(k), m_c(k + 1)};
        }
        const auto k = detail::lower_offset(j, i);
        return {m_c(k), -m_c(k + 1)};
    }

    /// Sets rho_ij and, implicitly, rho_ji = conj(rho_ij). On the diagonal
    /// only the real part is kept.
    void set(std::size_t i, std::size_t j, const value_type& v)
    {
        assert(i < 4 && j < 4);
        if (i == j) {
            m_c(i) = v.real();
        } else if (i > j) {
            const auto k = detail::lower_offset(i, j);
            m_c(k) = v.real();
            m_c(k + 1) = v.imag();
        } else {
            const auto k = detail::lower_offset(j, i);
            m_c(k) = v.real();
            m_c(k + 1) = -v.imag();
        }
    }

    Scalar population(std::size_t i) const { return m_c(i); }
    Scalar trace() const { return m_c.template head<4>().sum(); }

    Matrix4c<Scalar> matrix() const
    {
        Matrix4c<Scalar> m;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                m(i, j) = (*this)(i, j);
        return m;
    }

    const Coords& coords() const { return m_c; }
    Coords& coords() { return m_c; }

    /// Largest elementwise modulus |a_ij - b_ij| over the full matrix.
    Scalar max_abs_diff(const Hermitian4& other) const
    {
        Scalar d(0);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j <= i; ++j)
                d = std::max<Scalar>(d, std::abs((*this)(i, j) - other(i, j)));
        return d;
    }

    Scalar max_abs() const { return max_abs_diff(Hermitian4{}); }

    template <typename Other>
    Hermitian4<Other> cast() const
    {
        return Hermitian4<Other>(m_c.template cast<Other>());
    }

    friend Hermitian4 operator+(const Hermitian4& a, const Hermitian4& b) { return Hermitian4(a.m_c + b.m_c); }
    friend Hermitian4 operator-(const Hermitian4& a, const Hermitian4& b) { return Hermitian4(a.m_c - b.m_c); }
    friend Hermitian4 operator*(Scalar s, const Hermitian4& a) { return Hermitian4(s * a.m_c); }
    friend bool operator==(const Hermitian4& a, const Hermitian4& b) { return a.m_c == b.m_c; }

private:
    Coords m_c;
};

using DensityMatrix = Hermitian4<double>;

struct DensityDiagnostics
{
    double hermiticity_defect = 0; // max |m_ij - conj(m_ji)|
    double trace_defect = 0;       // |tr m - 1|
    double min_eigenvalue = 0;     // of the Hermitian part
    bool negative_population = false; // some m_ii < -tol
    bool valid = true;                // all defects within tol and min_eigenvalue >= -tol
};

inline DensityDiagnostics validate_density_matrix(const Matrix4c<double>& m, double tol = 1e-9)
{
    DensityDiagnostics d;
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j)
            d.hermiticity_defect = std::max(d.hermiticity_defect, std::abs(m(i, j) - std::conj(m(j, i))));
    d.trace_defect = std::abs(m.trace() - 1.0);
    const Matrix4c<double> herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix4c<double>> es(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    for (Eigen::Index i = 0; i < 4; ++i)
        d.negative_population = d.negative_population || m(i, i).real() < -tol;
    d.valid = d.hermiticity_defect <= tol && d.trace_defect <= tol && d.min_eigenvalue >= -tol;
    return d;
}

inline DensityDiagnostics validate_density_matrix(const DensityMatrix& rho, double tol = 1e-9)
{
    return validate_density_matrix(rho.matrix(), tol);
}

} // namespace hfs
