#include "tailvega/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace tailvega {

void QuadratureSpec::validate() const {
    if (!(relative_tolerance > 0.0))
        throw ConfigError("quadrature: relative_tolerance must be > 0");
    if (!(absolute_tolerance > 0.0))
        throw ConfigError("quadrature: absolute_tolerance must be > 0");
    if (!(tail_cutoff_mass > 0.0) || tail_cutoff_mass > 1e-6)
        throw ConfigError("quadrature: tail_cutoff_mass must be in (0, 1e-6]");
    if (max_subdivisions < 1)
        throw ConfigError("quadrature: max_subdivisions must be >= 1");
}

void McSpec::validate() const {
    if (sample_count == 0) throw EmptySample("mc: sample_count must be > 0");
}

namespace {

// 15-point Kronrod rule with embedded 7-point Gauss rule, positive half.
constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

// Gauss weights sit on the odd-indexed Kronrod nodes (1, 3, 5, 7).
constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double error;
};

Panel evaluate_gk15(const RealFn& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(mid - half * kKronrodNodes[i]);
        fv[14 - i] = f(mid + half * kKronrodNodes[i]);
    }
    fv[7] = f(mid);

    double kronrod = 0.0, resabs = 0.0;
    for (int i = 0; i < 7; ++i) {
        kronrod += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
        resabs += kKronrodWeights[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
    }
    kronrod += kKronrodWeights[7] * fv[7];
    resabs += kKronrodWeights[7] * std::abs(fv[7]);

    double gauss = kGaussWeights[3] * fv[7];
    for (int i = 0; i < 3; ++i)
        gauss += kGaussWeights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);

    const double mean = 0.5 * kronrod;
    double resasc = kKronrodWeights[7] * std::abs(fv[7] - mean);
    for (int i = 0; i < 7; ++i)
        resasc += kKronrodWeights[i] *
                  (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));

    const double value = kronrod * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);

    double err = std::abs((kronrod - gauss) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(err, 50.0 * eps * resabs);

    return {a, b, value, err};
}

struct PanelWorse {
    bool operator()(const Panel& x, const Panel& y) const {
        if (x.error != y.error) return x.error < y.error;
        return x.a > y.a;  // deterministic tie-break
    }
};

}  // namespace

QuadratureResult integrate_adaptive(const RealFn& f, double a, double b,
                                    const QuadratureSpec& spec) {
    if (a == b) return {0.0, 0.0};
    if (!(a < b)) throw OutOfRange("integrate_adaptive: requires a < b");

    std::priority_queue<Panel, std::vector<Panel>, PanelWorse> heap;
    Panel whole = evaluate_gk15(f, a, b);
    if (!std::isfinite(whole.value))
        throw EvaluationFailure("integrate_adaptive: integrand not finite");
    double total = whole.value;
    double total_err = whole.error;
    heap.push(whole);

    int splits = 0;
    while (total_err > std::max(spec.absolute_tolerance,
                                spec.relative_tolerance * std::abs(total))) {
        if (++splits > spec.max_subdivisions)
            throw NonConvergence("integrate_adaptive: max_subdivisions exhausted");
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw NonConvergence("integrate_adaptive: interval underflow");
        Panel left = evaluate_gk15(f, worst.a, mid);
        Panel right = evaluate_gk15(f, mid, worst.b);
        if (!std::isfinite(left.value) || !std::isfinite(right.value))
            throw EvaluationFailure("integrate_adaptive: integrand not finite");
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    return {total, total_err};
}

namespace {

QuadratureSpec block_spec(const QuadratureSpec& spec) {
    QuadratureSpec s = spec;
    s.relative_tolerance = spec.relative_tolerance / 16.0;
    s.absolute_tolerance = spec.absolute_tolerance / 16.0;
    return s;
}

}  // namespace

QuadratureResult integrate_left_tail(const RealFn& f, double upper,
                                     const RealFn& mass_below,
                                     const QuadratureSpec& spec,
                                     double scale_hint) {
    spec.validate();
    if (!(scale_hint > 0.0)) scale_hint = 1.0;
    const QuadratureSpec inner = block_spec(spec);

    double width = scale_hint;
    double hi = upper;
    double total = 0.0, total_err = 0.0;
    double prev_block = std::numeric_limits<double>::infinity();
    int growing = 0;

    for (int k = 0; k < 64; ++k) {
        const double lo = hi - width;
        QuadratureResult block = integrate_adaptive(f, lo, hi, inner);
        total += block.value;
        total_err += block.error;

        const double bmag = std::abs(block.value);
        if (bmag >= std::abs(prev_block) && bmag > spec.absolute_tolerance) {
            if (++growing >= 3)
                throw DivergentIntegral(
                    "integrate_left_tail: block contributions keep growing");
        } else {
            growing = 0;
        }

        // Geometric remainder extrapolation from the last two blocks.
        double remainder = std::numeric_limits<double>::infinity();
        const double r = bmag / std::abs(prev_block);
        if (std::isfinite(r) && r < 0.95)
            remainder = bmag * r / (1.0 - r);
        else if (bmag <= spec.absolute_tolerance)
            remainder = bmag;

        const double mass = mass_below(lo);
        const double tol = std::max(spec.absolute_tolerance,
                                    spec.relative_tolerance * std::abs(total));
        if (mass < spec.tail_cutoff_mass) {
            if (remainder <= tol) return {total, total_err + remainder};
            if (!(r < 1.0) && bmag > spec.absolute_tolerance)
                throw DivergentIntegral(
                    "integrate_left_tail: mass exhausted but blocks not decaying");
        }

        prev_block = block.value;
        hi = lo;
        width *= 2.0;
    }
    throw NonConvergence("integrate_left_tail: truncation search exhausted");
}

QuadratureResult integrate_right_tail(const RealFn& f, double lower,
                                      const RealFn& mass_above,
                                      const QuadratureSpec& spec,
                                      double scale_hint) {
    return integrate_left_tail([&f](double t) { return f(-t); }, -lower,
                               [&mass_above](double t) { return mass_above(-t); },
                               spec, scale_hint);
}

double refine_root(const RealFn& f, double lo, double hi, double tol) {
    if (!(tol > 0.0)) throw OutOfRange("refine_root: tol must be positive");
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw InvalidBracket("refine_root: f(lo) and f(hi) have the same sign");

    double c = a, fc = fa;
    double d = b - a, e = d;
    const double eps = std::numeric_limits<double>::epsilon();

    for (int iter = 0; iter < 200; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;

        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q),
                                   std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    throw NonConvergence("refine_root: iteration limit reached");
}

// ---------------------------------------------------------------------------
// Monte Carlo

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_index) {
    std::uint64_t state = seed;
    std::uint64_t mixed = splitmix64(state);
    for (std::uint64_t i = 0; i <= stream_index; ++i) mixed = splitmix64(state);
    engine_.seed(mixed);
}

double RandomStream::uniform01() {
    // 53-bit mantissa, open at both ends
    const std::uint64_t bits = engine_() >> 11;
    double u = (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    return u;
}

double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

double RandomStream::gamma(double shape) {
    if (!(shape > 0.0)) throw OutOfRange("gamma: shape must be positive");
    if (shape < 1.0) {
        const double u = uniform01();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double RandomStream::student_t(double nu) {
    const double z = normal();
    const double chi2 = 2.0 * gamma(0.5 * nu);
    return z / std::sqrt(chi2 / nu);
}

double RandomStream::lognormal(double mu, double sigma) {
    return std::exp(mu + sigma * normal());
}

McEstimate mc_left_tail_expectation(const Sampler& draw, const RealFn& g,
                                    double K, const McSpec& spec) {
    spec.validate();
    RandomStream stream(spec.seed, spec.stream_index);

    long double sum = 0.0L, sum_sq = 0.0L;
    for (std::uint64_t i = 0; i < spec.sample_count; ++i) {
        const double x = draw(stream);
        const double y = (x < K) ? g(x) : 0.0;
        sum += y;
        sum_sq += static_cast<long double>(y) * y;
    }
    const long double n = static_cast<long double>(spec.sample_count);
    const double mean = static_cast<double>(sum / n);
    double se = 0.0;
    if (spec.sample_count > 1) {
        const long double var = (sum_sq - sum * sum / n) / (n - 1.0L);
        se = static_cast<double>(std::sqrt(std::max(var, 0.0L) / n));
    }
    return {mean, se, spec.sample_count};
}

}  // namespace tailvega
