#pragma once

// Left-tail shortfall xi, its sensitivity V to the left semi-deviation
// (exact, closed and finite-difference routes), fragility drift and second
// order, and the transfer-function machinery H / Theta / kappa.

#include <optional>
#include <vector>

#include "tailvega/families.hpp"

namespace tailvega {

struct FragilityReport {
    double K = 0.0;
    double s_minus = 0.0;
    double xi = 0.0;
    double V = 0.0;
    double V_fd = 0.0;
    double delta_s = 0.0;
    double drift = 0.0;         // d2 xi / dK ds
    double second_order = 0.0;  // d2 xi / ds^2
};

struct TransferProfile {
    double K = 0.0;
    double theta = 0.0;
    double kappa = 0.0;
    double mu_inflexion = 0.0;
    double dP_dlambda_at_omega = 0.0;
    double dPK_dlambda_at_omega = 0.0;
    std::vector<std::pair<double, double>> grid;  // (x, H(x))
};

// Unconditional left-tail shortfall below K. Three routes (moment integral,
// put + digital decomposition, integrated cdf) are evaluated and must agree;
// the decomposition value is returned.
double xi(const ParametricFamily& family, double K);

// dxi/ds as the ratio of the two d/dlambda integrals (quadrature). For the
// scaling gaussian the closed form is evaluated as a mandatory cross-check.
double vega_sensitivity(const ParametricFamily& family, double K);

// Same quantity through the put/cdf identities only; exact in the deep tail
// where quadrature hits its absolute-tolerance floor.
double vega_sensitivity_closed(const ParametricFamily& family, double K);

// (xi(K, s+ds) - xi(K, s-ds)) / (2 ds) through the lambda(s) inversion.
double vega_sensitivity_fd(const ParametricFamily& family, double K,
                           double delta_s);

double fragility_drift(const ParametricFamily& family, double K);

double second_order_fragility(const ParametricFamily& family, double K,
                              double delta_s);

FragilityReport fragility_report(const ParametricFamily& family, double K,
                                 double delta_s);

// H(x): barrier-put lambda-vega ratio minus plain-put lambda-vega ratio, both
// normalized at omega.
double transfer_H(const ParametricFamily& family, double K, double x);

// Throws NotMonomodal unless df/dlambda has a single sign change left of omega.
void require_left_monomodal(const ParametricFamily& family);

// Sign-change point of df/dlambda left of omega (inflexion of dP/dlambda).
double mu_inflexion(const ParametricFamily& family);

// Stress level below which H > 0 holds out to kappa: unique root of
// dP/dlambda(omega) - dP^K/dlambda(omega) in K.
double theta_threshold(const ParametricFamily& family);

// Sign change of H between mu and omega; requires K <= theta.
double kappa_crossing(const ParametricFamily& family, double K);

TransferProfile transfer_profile(const ParametricFamily& family, double K,
                                 int grid_count = 129);

}  // namespace tailvega
