#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "rel_euler/eos.hpp"

using namespace rel_euler::eos;

namespace {

// h(rho) = int_0^rho theta s^(theta-1) / (s^theta + s) ds
double h_quadrature(double rho, double theta) {
    auto f = [theta](double s) { return theta * std::pow(s, theta - 1.0) / (std::pow(s, theta) + s); };
    // s^(theta-2) is singular at 0 for theta < 2
    static boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate(f, 0.0, rho, 1e-13);
}

}  // namespace

TEST(Eos, Theta2Rho025) {
    const auto s = from_density(0.25, 2.0);
    EXPECT_NEAR(s.h, 2.0 * std::log(1.25), 1e-15);
    EXPECT_NEAR(s.h, 0.4462871, 1e-7);
    EXPECT_NEAR(s.h, h_quadrature(0.25, 2.0), 1e-12);
    EXPECT_NEAR(s.cs2, 0.5, 1e-15);
    EXPECT_NEAR(s.p, 0.0625, 1e-16);
    EXPECT_NEAR(s.H, std::exp(s.h), 1e-15);
    EXPECT_NEAR(s.q * s.H, s.p + s.rho, 1e-15);
}

TEST(Eos, VacuumLimit) {
    const auto s = from_density(1e-14, 2.0);
    EXPECT_LT(s.h, 1e-13);
    EXPECT_LT(s.cs2, 1e-13);
    EXPECT_NEAR(s.H, 1.0, 1e-13);
    const auto v = from_enthalpy(0.0, 2.0);
    EXPECT_TRUE(v.vacuum);
    EXPECT_EQ(v.rho, 0.0);
}

TEST(Eos, Theta15Quadrature) {
    EXPECT_NEAR(from_density(0.2, 1.5).h, h_quadrature(0.2, 1.5), 1e-10);
    for (double rho : {1e-4, 1e-2, 0.1, 0.3})
        EXPECT_NEAR(enthalpy_from_density(rho, 1.7), h_quadrature(rho, 1.7), 1e-10) << rho;
}

TEST(Eos, FromEnthalpy) {
    EXPECT_NEAR(from_enthalpy(2.0 * std::log(1.25), 2.0).rho, 0.25, 1e-10);
    const double rho = from_enthalpy(0.2, 2.0).rho;
    EXPECT_NEAR(rho, std::exp(0.1) - 1.0, 1e-14);
    EXPECT_NEAR(rho, 0.1051709, 1e-7);
    // root-finder oracle on h(rho) = 0.2
    auto f = [](double r) { return 2.0 * std::log1p(r) - 0.2; };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t it = 100;
    const auto br = boost::math::tools::toms748_solve(f, 0.0, 1.0, tol, it);
    EXPECT_NEAR(rho, 0.5 * (br.first + br.second), 1e-13);
}

TEST(Eos, RoundTripSweep) {
    for (double theta : {1.2, 1.5, 2.0, 3.0}) {
        const double rmax = max_density(theta);
        for (int k = 0; k <= 60; ++k) {
            const double rho = rmax * std::pow(10.0, -12.0 + 12.0 * k / 60.0) * 0.999;
            const double back = from_enthalpy(from_density(rho, theta).h, theta).rho;
            EXPECT_NEAR(back / rho, 1.0, 1e-12) << theta << " " << rho;
        }
    }
}

TEST(Eos, PressureRoutesAgree) {
    const double theta = 1.8, rho = 0.13;
    const double p = pressure(rho, theta);
    EXPECT_NEAR(from_pressure(p, theta).rho, rho, 1e-15);
    EXPECT_NEAR(enthalpy_from_pressure(p, theta), enthalpy_from_density(rho, theta), 1e-15);
    EXPECT_NEAR(cs2_from_pressure(p, theta), cs2_from_density(rho, theta), 1e-15);
    EXPECT_NEAR(pressure_from_enthalpy(enthalpy_from_density(rho, theta), theta), p, 1e-15);
    const double h = enthalpy_from_density(rho, theta);
    EXPECT_NEAR(cs2_from_enthalpy(h, theta), cs2_from_density(rho, theta), 1e-14);
}

TEST(Eos, Dcs2DhMatchesDifferences) {
    const double theta = 2.5, h = 0.3, e = 1e-5;
    const double fd = (cs2_from_enthalpy(h + e, theta) - cs2_from_enthalpy(h - e, theta)) / (2 * e);
    EXPECT_NEAR(dcs2_dh(h, theta), fd, 1e-9);
}

TEST(Eos, Errors) {
    EXPECT_THROW(from_density(0.25, 1.0), DomainError);
    EXPECT_THROW(from_density(-1.0, 2.0), DomainError);
    EXPECT_THROW(from_density(1.0, 2.0), DomainError);  // c_s^2 = 2
    EXPECT_THROW(from_enthalpy(-0.1, 2.0), DomainError);
    EXPECT_THROW(from_enthalpy(max_enthalpy(2.0) * 1.01, 2.0), DomainError);
    EXPECT_NEAR(cs2_from_density(max_density(2.0), 2.0), 1.0, 1e-15);
}
