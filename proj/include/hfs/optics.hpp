#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "hfs/model.hpp"

namespace hfs {

struct Susceptibility
{
    Transition transition;
    double chi_re = 0;
    double chi_im = 0;

    std::complex<double> value() const { return {chi_re, chi_im}; }
};

enum class DispersionClass { Normal, Anomalous };
enum class LineClass { Gain, Absorption };

const char* to_string(DispersionClass c);
const char* to_string(LineClass c);

struct DispersionPoint
{
    double delta_c = 0;
    double n = 1;
    double ng = 1;
    double slope = 0; // dn/domega, s/rad
    DispersionClass dispersion_class = DispersionClass::Normal;
    LineClass line_class = LineClass::Absorption;
    bool nonuniform_spacing = false;
};

class ZeroField : public std::domain_error
{
public:
    ZeroField() : std::domain_error("susceptibility is undefined for a vanishing field") {}
};

class InsufficientPoints : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// chi_ij = -N |mu_ij| rho_ij / (eps0 E) with E = 2 hbar Omega / |mu|, i.e.
/// chi_ij = -(3 eps mu_ij / (2 Omega)) rho_ij. Positive chi_im is absorption.
Susceptibility susceptibility(const SystemParams& params, const Drive& drive, const DensityMatrix& rho,
                              Transition transition);

/// Principal branch of Re sqrt(1 + chi).
double refractive_index(std::complex<double> chi);

inline double refractive_index(const Susceptibility& chi) { return refractive_index(chi.value()); }

/// Group index n_g = n + omega0 dn/domega over an ordered grid of absolute
/// angular frequencies: central differences inside, one-sided at the ends.
/// Points whose two neighbor spacings differ are flagged.
std::vector<DispersionPoint> group_index(const Eigen::Ref<const Eigen::VectorXd>& omega_abs,
                                         const Eigen::Ref<const Eigen::VectorXd>& n, double omega0);

/// Normal iff dn/domega > 0; Gain iff chi_im < 0.
DispersionClass classify_dispersion(double dn_domega);
LineClass classify_line(double chi_im);

struct PopulationTransfer
{
    double ground = 0;  // rho22 - rho11
    double excited = 0; // rho44 - rho33
};

PopulationTransfer population_transfer(const DensityMatrix& rho);

} // namespace hfs
