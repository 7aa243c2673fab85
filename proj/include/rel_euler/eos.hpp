#pragma once

#include <stdexcept>
#include <string>

namespace rel_euler::eos {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Thermodynamic bundle for the polytrope p = rho^theta.
struct ThermoState {
    double rho = 0.0;
    double p = 0.0;
    double cs2 = 0.0;
    double h = 0.0;  // log-enthalpy
    double q = 0.0;  // number density, normalized so that H -> 1 in vacuum
    double H = 1.0;
    double theta = 2.0;
    bool vacuum = false;
};

ThermoState from_density(double rho, double theta);
ThermoState from_enthalpy(double h, double theta);
ThermoState from_pressure(double p, double theta);

// Scalar maps used by the field and jet code.
double pressure(double rho, double theta);
double density_from_pressure(double p, double theta);
double enthalpy_from_density(double rho, double theta);
double density_from_enthalpy(double h, double theta);
double enthalpy_from_pressure(double p, double theta);
double pressure_from_enthalpy(double h, double theta);
double cs2_from_density(double rho, double theta);
double cs2_from_enthalpy(double h, double theta);
double dcs2_dh(double h, double theta);
double cs2_from_pressure(double p, double theta);

// Largest admissible density (c_s = 1) and the matching enthalpy.
double max_density(double theta);
double max_enthalpy(double theta);

void check_theta(double theta);

}  // namespace rel_euler::eos
