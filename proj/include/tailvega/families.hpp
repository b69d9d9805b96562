#pragma once

// One-parameter pdf families f_lambda around a fixed reference point Omega:
// pdfs, cdfs, put prices, semi-deviations, lambda <-> s inversion and the
// lambda-derivatives every tail-sensitivity measure is built from.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tailvega/interp.hpp"
#include "tailvega/numerics.hpp"

namespace tailvega {

struct Interval {
    double lo, hi;
    bool contains(double v) const { return v > lo && v < hi; }
};

struct SemiDeviations {
    double s_minus = 0.0;
    double s_plus = 0.0;
};

enum class FamilyKind {
    gaussian_scaling,
    gaussian_shifting,
    student_t_scaling,
    lognormal_shifted,
    tabulated,
};

std::string to_string(FamilyKind kind);

class ParametricFamily {
  public:
    // N(omega, lambda^2): lambda rescales deviations about omega.
    static ParametricFamily gaussian_scaling(double omega, double lambda,
                                             QuadratureSpec spec = {});
    // Base N(mu0, sigma0^2) shifted left by lambda.
    static ParametricFamily gaussian_shifting(double omega, double lambda,
                                              double mu0 = 0.0,
                                              double sigma0 = 1.0,
                                              QuadratureSpec spec = {});
    // omega + lambda * T_nu. Requires nu > 1 so the first semi-moment exists.
    static ParametricFamily student_t_scaling(double omega, double lambda,
                                              double nu,
                                              QuadratureSpec spec = {});
    // Base LogNormal(mu, sigma) shifted left by lambda; support (-lambda, inf).
    static ParametricFamily lognormal_shifted(double omega, double lambda,
                                              double mu = 0.0,
                                              double sigma = 1.0,
                                              QuadratureSpec spec = {});
    // Tabulated base density (the lambda=1 member); lambda rescales about
    // omega. The cdf is a monotone cubic through the trapezoid cumulative.
    static ParametricFamily tabulated(double omega, double lambda,
                                      std::vector<double> x,
                                      std::vector<double> pdf,
                                      QuadratureSpec spec = {});
    static ParametricFamily tabulated_from_csv(double omega, double lambda,
                                               const std::string& path,
                                               QuadratureSpec spec = {});

    FamilyKind kind() const { return kind_; }
    double omega() const { return omega_; }
    double lambda() const { return lambda_; }
    Interval lambda_domain() const;
    double nu() const;  // student_t_scaling only

    double pdf(double x) const;
    double cdf(double x) const;

    // P_lambda(x) = integral of the cdf up to x = E[(x - X)+].
    double put_price(double x) const;
    // Barrier variant: cdf capped at cdf(K) inside the integral.
    double barrier_put_price(double x, double K) const;

    // Left/right semi-absolute deviations about omega, computed two ways
    // (direct moment and integrated cdf) and cross-checked.
    SemiDeviations semi_deviations() const;
    double s_minus() const;  // closed/cached form
    double s_plus() const;

    // Inverse of lambda -> s_minus(lambda).
    double lambda_from_s(double target_s) const;
    ParametricFamily with_lambda(double lambda) const;

    double dF_dlambda(double x) const;
    double df_dlambda(double x) const;
    // d/dlambda of the put price at strike x (closed via put/cdf identities).
    double dP_dlambda(double x) const;
    double dPK_dlambda(double x, double K) const;
    double ds_minus_dlambda() const;
    double ds_plus_dlambda() const;

    bool is_scaling() const;
    double scale() const { return s_minus(); }

    Sampler sampler() const;
    const QuadratureSpec& quadrature() const { return spec_; }

    // Tail-mass witnesses for semi-infinite quadrature.
    RealFn mass_below_fn() const;
    RealFn mass_above_fn() const;

  private:
    struct Base;  // lambda-independent description
    ParametricFamily(FamilyKind kind, double omega, double lambda,
                     std::shared_ptr<const Base> base, QuadratureSpec spec);
    void validate_construction() const;
    double s_minus_at(double lambda) const;

    FamilyKind kind_;
    double omega_;
    double lambda_;
    std::shared_ptr<const Base> base_;
    QuadratureSpec spec_;
};

}  // namespace tailvega
