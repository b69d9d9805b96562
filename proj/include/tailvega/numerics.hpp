#pragma once

// Deterministic quadrature, differentiation, bracketed root refinement and a
// seeded Monte Carlo stream. Everything here is a pure function of its
// arguments (seeds included); repeated calls are bit-identical.

#include <cstdint>
#include <functional>
#include <random>

#include "tailvega/errors.hpp"

namespace tailvega {

struct QuadratureSpec {
    double relative_tolerance = 1e-9;
    double absolute_tolerance = 1e-12;
    double tail_cutoff_mass = 1e-14;  // truncation mass for semi-infinite integrals
    int max_subdivisions = 4000;

    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error, tail remainder included
};

using RealFn = std::function<double(double)>;

// Adaptive Gauss-Kronrod 15(7) on a finite interval.
QuadratureResult integrate_adaptive(const RealFn& f, double a, double b,
                                    const QuadratureSpec& spec);

// Integral of f over (-inf, upper]. `mass_below(x)` is the decay witness: the
// probability mass of the underlying distribution below x; truncation happens
// once it drops under spec.tail_cutoff_mass and the extrapolated block
// remainder is inside tolerance. Blocks double in width going left from
// `upper`; `scale_hint` sets the first block width.
QuadratureResult integrate_left_tail(const RealFn& f, double upper,
                                     const RealFn& mass_below,
                                     const QuadratureSpec& spec,
                                     double scale_hint = 1.0);

// Mirror image: integral of f over [lower, +inf). `mass_above(x)` is the mass
// of the distribution above x.
QuadratureResult integrate_right_tail(const RealFn& f, double lower,
                                      const RealFn& mass_above,
                                      const QuadratureSpec& spec,
                                      double scale_hint = 1.0);

inline double central_difference(const RealFn& f, double x, double h) {
    if (!(h > 0.0)) throw OutOfRange("central_difference: step must be positive");
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Default step for d/dlambda differences.
inline double default_fd_step(double lambda) {
    return 1e-5 * std::max(std::abs(lambda), 1.0);
}

// Brent-style bracketed refinement: bisection with inverse-quadratic
// acceleration, never leaves [lo, hi]. Requires f(lo) * f(hi) <= 0.
double refine_root(const RealFn& f, double lo, double hi, double tol);

// ---------------------------------------------------------------------------
// Monte Carlo

struct McSpec {
    std::uint64_t sample_count = 1'000'000;
    std::uint64_t seed = 20120801;
    std::uint64_t stream_index = 0;

    void validate() const;
};

// Deterministic variate stream. The samplers below are written out explicitly
// (std::normal_distribution et al. are implementation-defined) so identical
// (seed, stream_index) give bit-identical sequences on any platform.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_index);

    double uniform01();               // in (0, 1)
    double normal();                  // standard normal, Box-Muller
    double gamma(double shape);       // unit scale, Marsaglia-Tsang
    double student_t(double nu);
    double lognormal(double mu, double sigma);

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

using Sampler = std::function<double(RandomStream&)>;

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t sample_count = 0;
};

// (1/N) * sum g(x_i) * [x_i < K] with its sample standard error.
McEstimate mc_left_tail_expectation(const Sampler& draw, const RealFn& g,
                                    double K, const McSpec& spec);

}  // namespace tailvega
