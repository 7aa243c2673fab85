#include "rel_euler/eos.hpp"

#include <cmath>
#include <limits>

namespace rel_euler::eos {

void check_theta(double theta) {
    if (!(theta > 1.0) || !std::isfinite(theta))
        throw DomainError("eos: exponent theta must be > 1");
}

double max_density(double theta) {
    check_theta(theta);
    return std::pow(1.0 / theta, 1.0 / (theta - 1.0));
}

double max_enthalpy(double theta) { return enthalpy_from_density(max_density(theta), theta); }

double pressure(double rho, double theta) { return std::pow(rho, theta); }

double density_from_pressure(double p, double theta) { return std::pow(p, 1.0 / theta); }

// h = integral_0^rho theta s^(theta-1) / (s^theta + s) ds
//   = theta/(theta-1) * log(1 + rho^(theta-1))
double enthalpy_from_density(double rho, double theta) {
    return theta / (theta - 1.0) * std::log1p(std::pow(rho, theta - 1.0));
}

double density_from_enthalpy(double h, double theta) {
    const double a = std::expm1(h * (theta - 1.0) / theta);
    return std::pow(a, 1.0 / (theta - 1.0));
}

double enthalpy_from_pressure(double p, double theta) {
    return theta / (theta - 1.0) * std::log1p(std::pow(p, (theta - 1.0) / theta));
}

double pressure_from_enthalpy(double h, double theta) {
    return std::pow(density_from_enthalpy(h, theta), theta);
}

double cs2_from_density(double rho, double theta) { return theta * std::pow(rho, theta - 1.0); }

double cs2_from_enthalpy(double h, double theta) {
    return theta * std::expm1(h * (theta - 1.0) / theta);
}

double dcs2_dh(double h, double theta) { return (theta - 1.0) * std::exp(h * (theta - 1.0) / theta); }

double cs2_from_pressure(double p, double theta) {
    return theta * std::pow(p, (theta - 1.0) / theta);
}

namespace {

ThermoState bundle(double rho, double h, double theta) {
    ThermoState s;
    s.theta = theta;
    s.rho = rho;
    s.p = pressure(rho, theta);
    s.cs2 = cs2_from_density(rho, theta);
    s.h = h;
    s.H = std::exp(h);
    s.q = (s.p + rho) / s.H;
    s.vacuum = rho == 0.0;
    return s;
}

}  // namespace

ThermoState from_density(double rho, double theta) {
    check_theta(theta);
    if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("eos: density must be positive");
    if (cs2_from_density(rho, theta) > 1.0) throw DomainError("eos: sound speed exceeds 1");
    return bundle(rho, enthalpy_from_density(rho, theta), theta);
}

ThermoState from_enthalpy(double h, double theta) {
    check_theta(theta);
    if (!(h >= 0.0) || !std::isfinite(h)) throw DomainError("eos: log-enthalpy must be >= 0");
    if (h == 0.0) return bundle(0.0, 0.0, theta);
    if (h > max_enthalpy(theta) * (1.0 + 1e-14))
        throw DomainError("eos: log-enthalpy outside the admissible range");
    return bundle(density_from_enthalpy(h, theta), h, theta);
}

ThermoState from_pressure(double p, double theta) {
    check_theta(theta);
    if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("eos: pressure must be positive");
    return from_density(density_from_pressure(p, theta), theta);
}

}  // namespace rel_euler::eos
