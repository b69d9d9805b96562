#include "tailvega/families.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>

namespace tailvega {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
constexpr double kSqrt1_2 = 0.70710678118654752440084436210485;

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z * kSqrt1_2); }

// E[(k - N(m, s^2))+]
double normal_put(double k, double m, double s) {
    const double d = (k - m) / s;
    return (k - m) * normal_cdf(d) + s * normal_pdf(d);
}

// E[(N(m, s^2) - k)+]
double normal_call(double k, double m, double s) {
    const double d = (m - k) / s;
    return (m - k) * normal_cdf(d) + s * normal_pdf(d);
}

double lognormal_pdf(double y, double mu, double sigma) {
    if (!(y > 0.0)) return 0.0;
    const double w = (std::log(y) - mu) / sigma;
    return normal_pdf(w) / (y * sigma);
}

double lognormal_cdf(double y, double mu, double sigma) {
    if (!(y > 0.0)) return 0.0;
    return normal_cdf((std::log(y) - mu) / sigma);
}

// E[(k - LogNormal(mu, sigma))+]
double lognormal_put(double k, double mu, double sigma) {
    if (!(k > 0.0)) return 0.0;
    const double w = (std::log(k) - mu) / sigma;
    return k * normal_cdf(w) -
           std::exp(mu + 0.5 * sigma * sigma) * normal_cdf(w - sigma);
}

}  // namespace

std::string to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::gaussian_scaling: return "gaussian_scaling";
        case FamilyKind::gaussian_shifting: return "gaussian_shifting";
        case FamilyKind::student_t_scaling: return "student_t_scaling";
        case FamilyKind::lognormal_shifted: return "lognormal_shifted";
        case FamilyKind::tabulated: return "tabulated";
    }
    return "?";
}

struct ParametricFamily::Base {
    double mu0 = 0.0, sigma0 = 1.0;          // gaussian_shifting
    double nu = 0.0;                          // student_t_scaling
    double ln_mu = 0.0, ln_sigma = 1.0;       // lognormal_shifted
    MonotoneCubic cdf_base;                   // tabulated
    double table_lo = 0.0, table_hi = 0.0;
    double s_minus_base = 0.0, s_plus_base = 0.0;  // scaling kinds at lambda=1
};

ParametricFamily::ParametricFamily(FamilyKind kind, double omega, double lambda,
                                   std::shared_ptr<const Base> base,
                                   QuadratureSpec spec)
    : kind_(kind), omega_(omega), lambda_(lambda), base_(std::move(base)),
      spec_(spec) {}

ParametricFamily ParametricFamily::gaussian_scaling(double omega, double lambda,
                                                    QuadratureSpec spec) {
    auto base = std::make_shared<Base>();
    base->s_minus_base = kInvSqrt2Pi;
    base->s_plus_base = kInvSqrt2Pi;
    ParametricFamily fam(FamilyKind::gaussian_scaling, omega, lambda,
                         std::move(base), spec);
    fam.validate_construction();
    return fam;
}

ParametricFamily ParametricFamily::gaussian_shifting(double omega, double lambda,
                                                     double mu0, double sigma0,
                                                     QuadratureSpec spec) {
    if (!(sigma0 > 0.0))
        throw ConfigError("gaussian_shifting: sigma0 must be positive");
    auto base = std::make_shared<Base>();
    base->mu0 = mu0;
    base->sigma0 = sigma0;
    ParametricFamily fam(FamilyKind::gaussian_shifting, omega, lambda,
                         std::move(base), spec);
    fam.validate_construction();
    return fam;
}

ParametricFamily ParametricFamily::student_t_scaling(double omega, double lambda,
                                                     double nu,
                                                     QuadratureSpec spec) {
    if (!(nu > 1.0))
        throw ConfigError(
            "student_t_scaling: nu must exceed 1 (first semi-moment)");
    auto base = std::make_shared<Base>();
    base->nu = nu;
    const boost::math::students_t_distribution<double> dist(nu);
    const double f0 = boost::math::pdf(dist, 0.0);
    base->s_minus_base = f0 * nu / (nu - 1.0);
    base->s_plus_base = base->s_minus_base;
    ParametricFamily fam(FamilyKind::student_t_scaling, omega, lambda,
                         std::move(base), spec);
    fam.validate_construction();
    return fam;
}

ParametricFamily ParametricFamily::lognormal_shifted(double omega, double lambda,
                                                     double mu, double sigma,
                                                     QuadratureSpec spec) {
    if (!(sigma > 0.0))
        throw ConfigError("lognormal_shifted: sigma must be positive");
    auto base = std::make_shared<Base>();
    base->ln_mu = mu;
    base->ln_sigma = sigma;
    ParametricFamily fam(FamilyKind::lognormal_shifted, omega, lambda,
                         std::move(base), spec);
    fam.validate_construction();
    return fam;
}

ParametricFamily ParametricFamily::tabulated(double omega, double lambda,
                                             std::vector<double> x,
                                             std::vector<double> pdf,
                                             QuadratureSpec spec) {
    if (x.size() != pdf.size() || x.size() < 3)
        throw ConfigError("tabulated family needs >= 3 matched (x, pdf) rows");
    std::vector<double> cum(x.size(), 0.0);
    for (std::size_t i = 0; i < pdf.size(); ++i)
        if (!(pdf[i] >= 0.0))
            throw ConfigError("tabulated family pdf values must be nonnegative");
    for (std::size_t i = 1; i < x.size(); ++i)
        cum[i] = cum[i - 1] + 0.5 * (pdf[i] + pdf[i - 1]) * (x[i] - x[i - 1]);

    auto base = std::make_shared<Base>();
    base->table_lo = x.front();
    base->table_hi = x.back();
    base->cdf_base = MonotoneCubic(std::move(x), std::move(cum));
    ParametricFamily fam(FamilyKind::tabulated, omega, lambda, base, spec);

    // base semi-deviations via the integrated-cdf forms, cached once
    QuadratureResult sm = integrate_adaptive(
        [&](double t) { return base->cdf_base(t); },
        std::min(base->table_lo, omega), omega, spec);
    QuadratureResult sp = integrate_adaptive(
        [&](double t) { return 1.0 - base->cdf_base(t); }, omega,
        std::max(base->table_hi, omega), spec);
    const_cast<Base&>(*base).s_minus_base = sm.value;
    const_cast<Base&>(*base).s_plus_base = sp.value;

    fam.validate_construction();
    return fam;
}

ParametricFamily ParametricFamily::tabulated_from_csv(double omega, double lambda,
                                                      const std::string& path,
                                                      QuadratureSpec spec) {
    CsvColumns cols = read_two_column_csv(path, "x", "pdf");
    return tabulated(omega, lambda, std::move(cols.x), std::move(cols.y), spec);
}

Interval ParametricFamily::lambda_domain() const {
    switch (kind_) {
        case FamilyKind::gaussian_scaling:
        case FamilyKind::student_t_scaling:
        case FamilyKind::tabulated:
            return {0.0, std::numeric_limits<double>::infinity()};
        case FamilyKind::gaussian_shifting:
            return {-std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
        case FamilyKind::lognormal_shifted:
            return {-omega_, std::numeric_limits<double>::infinity()};
    }
    return {0.0, 0.0};
}

double ParametricFamily::nu() const {
    if (kind_ != FamilyKind::student_t_scaling)
        throw OutOfRange("nu() only defined for student_t_scaling");
    return base_->nu;
}

bool ParametricFamily::is_scaling() const {
    return kind_ == FamilyKind::gaussian_scaling ||
           kind_ == FamilyKind::student_t_scaling ||
           kind_ == FamilyKind::tabulated;
}

void ParametricFamily::validate_construction() const {
    spec_.validate();
    if (!std::isfinite(omega_) || !std::isfinite(lambda_))
        throw ConfigError("family: omega and lambda must be finite");
    if (!lambda_domain().contains(lambda_))
        throw ConfigError("family: lambda outside its domain for " +
                          to_string(kind_));

    // total mass within 1e-8
    const double mass =
        integrate_left_tail([this](double x) { return pdf(x); }, omega_,
                            mass_below_fn(), spec_, std::max(scale(), 1e-3))
            .value +
        integrate_right_tail([this](double x) { return pdf(x); }, omega_,
                             mass_above_fn(), spec_, std::max(scale(), 1e-3))
            .value;
    if (std::abs(mass - 1.0) > 1e-8)
        throw ConfigError("family: pdf mass is " + std::to_string(mass) +
                          ", not 1 within 1e-8");

    // s_minus strictly increasing at three lambda probes
    const Interval dom = lambda_domain();
    double step = 0.25 * std::max(std::abs(lambda_), 1.0);
    double lo = lambda_ - step, hi = lambda_ + step;
    if (!(lo > dom.lo)) lo = 0.5 * (dom.lo + lambda_);
    const double s0 = s_minus_at(lo), s1 = s_minus_at(lambda_), s2 = s_minus_at(hi);
    if (!(s0 < s1 && s1 < s2))
        throw ConfigError("family: s_minus(lambda) not strictly increasing");
}

double ParametricFamily::pdf(double x) const {
    switch (kind_) {
        case FamilyKind::gaussian_scaling: {
            const double z = (x - omega_) / lambda_;
            return normal_pdf(z) / lambda_;
        }
        case FamilyKind::gaussian_shifting: {
            const double m = base_->mu0 - lambda_;
            return normal_pdf((x - m) / base_->sigma0) / base_->sigma0;
        }
        case FamilyKind::student_t_scaling: {
            const boost::math::students_t_distribution<double> dist(base_->nu);
            return boost::math::pdf(dist, (x - omega_) / lambda_) / lambda_;
        }
        case FamilyKind::lognormal_shifted:
            return lognormal_pdf(x + lambda_, base_->ln_mu, base_->ln_sigma);
        case FamilyKind::tabulated: {
            const double u = omega_ + (x - omega_) / lambda_;
            return base_->cdf_base.derivative(u) / lambda_;
        }
    }
    return 0.0;
}

double ParametricFamily::cdf(double x) const {
    switch (kind_) {
        case FamilyKind::gaussian_scaling:
            return normal_cdf((x - omega_) / lambda_);
        case FamilyKind::gaussian_shifting: {
            const double m = base_->mu0 - lambda_;
            return normal_cdf((x - m) / base_->sigma0);
        }
        case FamilyKind::student_t_scaling: {
            const boost::math::students_t_distribution<double> dist(base_->nu);
            return boost::math::cdf(dist, (x - omega_) / lambda_);
        }
        case FamilyKind::lognormal_shifted:
            return lognormal_cdf(x + lambda_, base_->ln_mu, base_->ln_sigma);
        case FamilyKind::tabulated:
            return base_->cdf_base(omega_ + (x - omega_) / lambda_);
    }
    return 0.0;
}

double ParametricFamily::put_price(double x) const {
    switch (kind_) {
        case FamilyKind::gaussian_scaling:
            return normal_put(x, omega_, lambda_);
        case FamilyKind::gaussian_shifting:
            return normal_put(x, base_->mu0 - lambda_, base_->sigma0);
        case FamilyKind::student_t_scaling: {
            const double nu = base_->nu;
            if (!(nu > 1.0))
                throw DivergentIntegral("put_price: first semi-moment infinite");
            const boost::math::students_t_distribution<double> dist(nu);
            const double z = (x - omega_) / lambda_;
            const double base = z * boost::math::cdf(dist, z) +
                                boost::math::pdf(dist, z) * (nu + z * z) / (nu - 1.0);
            return lambda_ * base;
        }
        case FamilyKind::lognormal_shifted:
            return lognormal_put(x + lambda_, base_->ln_mu, base_->ln_sigma);
        case FamilyKind::tabulated: {
            const double edge = omega_ + (base_->table_lo - omega_) * lambda_;
            if (x <= edge) return 0.0;
            return integrate_adaptive([this](double t) { return cdf(t); }, edge,
                                      x, spec_)
                .value;
        }
    }
    return 0.0;
}

double ParametricFamily::barrier_put_price(double x, double K) const {
    if (x <= K) return put_price(x);
    return put_price(K) + (x - K) * cdf(K);
}

double ParametricFamily::s_minus_at(double lambda) const {
    switch (kind_) {
        case FamilyKind::gaussian_scaling:
        case FamilyKind::student_t_scaling:
        case FamilyKind::tabulated:
            return lambda * base_->s_minus_base;
        case FamilyKind::gaussian_shifting:
            return normal_put(omega_, base_->mu0 - lambda, base_->sigma0);
        case FamilyKind::lognormal_shifted:
            return lognormal_put(omega_ + lambda, base_->ln_mu, base_->ln_sigma);
    }
    return 0.0;
}

double ParametricFamily::s_minus() const { return s_minus_at(lambda_); }

double ParametricFamily::s_plus() const {
    switch (kind_) {
        case FamilyKind::gaussian_scaling:
        case FamilyKind::student_t_scaling:
        case FamilyKind::tabulated:
            return lambda_ * base_->s_plus_base;
        case FamilyKind::gaussian_shifting:
            return normal_call(omega_, base_->mu0 - lambda_, base_->sigma0);
        case FamilyKind::lognormal_shifted: {
            const double k = omega_ + lambda_;
            const double mean =
                std::exp(base_->ln_mu + 0.5 * base_->ln_sigma * base_->ln_sigma);
            return mean - k + lognormal_put(k, base_->ln_mu, base_->ln_sigma);
        }
    }
    return 0.0;
}

SemiDeviations ParametricFamily::semi_deviations() const {
    const double direct_minus =
        integrate_left_tail([this](double x) { return (omega_ - x) * pdf(x); },
                            omega_, mass_below_fn(), spec_, scale())
            .value;
    const double parts_minus =
        integrate_left_tail([this](double x) { return cdf(x); }, omega_,
                            mass_below_fn(), spec_, scale())
            .value;
    const double tol =
        10.0 * std::max(spec_.absolute_tolerance,
                        spec_.relative_tolerance * std::abs(direct_minus));
    if (std::abs(direct_minus - parts_minus) > std::max(tol, 1e-10))
        throw NonConvergence("semi_deviations: moment and cdf forms disagree");

    const double direct_plus =
        integrate_right_tail([this](double x) { return (x - omega_) * pdf(x); },
                             omega_, mass_above_fn(), spec_, scale())
            .value;
    return {direct_minus, direct_plus};
}

double ParametricFamily::lambda_from_s(double target_s) const {
    if (!(target_s > 0.0) || !std::isfinite(target_s))
        throw OutOfRange("lambda_from_s: target must be positive and finite");
    if (is_scaling()) return target_s / base_->s_minus_base;

    const Interval dom = lambda_domain();
    double step = std::max(std::abs(lambda_), 1.0);
    double lo = lambda_, hi = lambda_;
    auto g = [&](double l) { return s_minus_at(l) - target_s; };
    const double g0 = g(lambda_);
    if (g0 == 0.0) return lambda_;
    if (g0 > 0.0) {
        for (int i = 0; i < 200; ++i) {
            lo = lambda_ - step;
            if (!(lo > dom.lo)) lo = dom.lo + (lambda_ - dom.lo) * 1e-12;
            if (g(lo) <= 0.0) break;
            if (!(lo > dom.lo + (lambda_ - dom.lo) * 1e-11))
                throw OutOfRange("lambda_from_s: target below the spanned range");
            step *= 2.0;
        }
        hi = lambda_;
    } else {
        for (int i = 0;; ++i) {
            if (i >= 200)
                throw OutOfRange("lambda_from_s: target above the spanned range");
            hi = lambda_ + step;
            if (g(hi) >= 0.0) break;
            step *= 2.0;
        }
        lo = lambda_;
    }
    return refine_root(g, lo, hi, 1e-12 * std::max(1.0, std::abs(lambda_)));
}

ParametricFamily ParametricFamily::with_lambda(double lambda) const {
    if (!lambda_domain().contains(lambda))
        throw OutOfRange("with_lambda: value outside the lambda domain");
    return ParametricFamily(kind_, omega_, lambda, base_, spec_);
}

double ParametricFamily::dF_dlambda(double x) const {
    switch (kind_) {
        case FamilyKind::gaussian_scaling:
        case FamilyKind::student_t_scaling:
            return (omega_ - x) / lambda_ * pdf(x);
        case FamilyKind::gaussian_shifting:
        case FamilyKind::lognormal_shifted:
            return pdf(x);
        case FamilyKind::tabulated: {
            const double h = default_fd_step(lambda_);
            return (with_lambda(lambda_ + h).cdf(x) -
                    with_lambda(lambda_ - h).cdf(x)) /
                   (2.0 * h);
        }
    }
    return 0.0;
}

double ParametricFamily::df_dlambda(double x) const {
    switch (kind_) {
        case FamilyKind::gaussian_scaling: {
            const double z = (x - omega_) / lambda_;
            return pdf(x) * (z * z - 1.0) / lambda_;
        }
        case FamilyKind::student_t_scaling: {
            const double z = (x - omega_) / lambda_;
            const double nu = base_->nu;
            return pdf(x) * nu * (z * z - 1.0) / ((nu + z * z) * lambda_);
        }
        case FamilyKind::gaussian_shifting: {
            const double m = base_->mu0 - lambda_;
            return -((x - m) / (base_->sigma0 * base_->sigma0)) * pdf(x);
        }
        case FamilyKind::lognormal_shifted: {
            const double y = x + lambda_;
            if (!(y > 0.0)) return 0.0;
            const double w = (std::log(y) - base_->ln_mu) / base_->ln_sigma;
            return -pdf(x) * (w / base_->ln_sigma + 1.0) / y;
        }
        case FamilyKind::tabulated: {
            const double h = default_fd_step(lambda_);
            return (with_lambda(lambda_ + h).pdf(x) -
                    with_lambda(lambda_ - h).pdf(x)) /
                   (2.0 * h);
        }
    }
    return 0.0;
}

double ParametricFamily::dP_dlambda(double x) const {
    if (is_scaling())
        return ((omega_ - x) * cdf(x) + put_price(x)) / lambda_;
    // shifting kinds: F_lambda(x) integrates to the put, so dP/dlambda = cdf
    return cdf(x);
}

double ParametricFamily::dPK_dlambda(double x, double K) const {
    if (x <= K) return dP_dlambda(x);
    return dP_dlambda(K) + (x - K) * dF_dlambda(K);
}

double ParametricFamily::ds_minus_dlambda() const {
    switch (kind_) {
        case FamilyKind::gaussian_scaling:
        case FamilyKind::student_t_scaling:
        case FamilyKind::tabulated:
            return base_->s_minus_base;
        case FamilyKind::gaussian_shifting:
        case FamilyKind::lognormal_shifted:
            return cdf(omega_);
    }
    return 0.0;
}

double ParametricFamily::ds_plus_dlambda() const {
    switch (kind_) {
        case FamilyKind::gaussian_scaling:
        case FamilyKind::student_t_scaling:
        case FamilyKind::tabulated:
            return base_->s_plus_base;
        case FamilyKind::gaussian_shifting:
        case FamilyKind::lognormal_shifted:
            return cdf(omega_) - 1.0;
    }
    return 0.0;
}

Sampler ParametricFamily::sampler() const {
    switch (kind_) {
        case FamilyKind::gaussian_scaling: {
            const double om = omega_, la = lambda_;
            return [om, la](RandomStream& rs) { return om + la * rs.normal(); };
        }
        case FamilyKind::gaussian_shifting: {
            const double m = base_->mu0 - lambda_, s = base_->sigma0;
            return [m, s](RandomStream& rs) { return m + s * rs.normal(); };
        }
        case FamilyKind::student_t_scaling: {
            const double om = omega_, la = lambda_, nu = base_->nu;
            return [om, la, nu](RandomStream& rs) {
                return om + la * rs.student_t(nu);
            };
        }
        case FamilyKind::lognormal_shifted: {
            const double mu = base_->ln_mu, sg = base_->ln_sigma, la = lambda_;
            return [mu, sg, la](RandomStream& rs) {
                return rs.lognormal(mu, sg) - la;
            };
        }
        case FamilyKind::tabulated: {
            // inverse cdf by bisection on the monotone interpolant
            const auto base = base_;
            const double om = omega_, la = lambda_;
            return [base, om, la](RandomStream& rs) {
                const double u = rs.uniform01();
                double lo = base->table_lo, hi = base->table_hi;
                for (int i = 0; i < 60; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    (base->cdf_base(mid) < u ? lo : hi) = mid;
                }
                const double t = 0.5 * (lo + hi);
                return om + la * (t - om);
            };
        }
    }
    throw EvaluationFailure("sampler: unknown family kind");
}

RealFn ParametricFamily::mass_below_fn() const {
    return [*this](double x) { return cdf(x); };
}

RealFn ParametricFamily::mass_above_fn() const {
    return [*this](double x) { return 1.0 - cdf(x); };
}

}  // namespace tailvega
