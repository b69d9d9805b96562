#include "tailvega/fragility.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tailvega {

namespace {

void require_stress_level(const ParametricFamily& family, double K) {
    if (!(K <= family.omega()))
        throw OutOfRange("stress level K must not exceed omega");
}

}  // namespace

double xi(const ParametricFamily& family, double K) {
    require_stress_level(family, K);
    const double omega = family.omega();
    const QuadratureSpec& spec = family.quadrature();

    const double decomposition =
        (omega - K) * family.cdf(K) + family.put_price(K);

    const double direct =
        integrate_left_tail([&](double x) { return (omega - x) * family.pdf(x); },
                            K, family.mass_below_fn(), spec, family.scale())
            .value;

    // integrated-by-parts route: cdf capped at cdf(K) up to omega
    const double FK = family.cdf(K);
    const double by_parts =
        integrate_left_tail(
            [&](double x) { return std::min(family.cdf(x), FK); }, omega,
            family.mass_below_fn(), spec, family.scale())
            .value;

    const double tol = 10.0 * std::max(spec.absolute_tolerance,
                                       spec.relative_tolerance *
                                           std::abs(decomposition));
    if (std::abs(direct - decomposition) > std::max(tol, 1e-10) ||
        std::abs(by_parts - decomposition) > std::max(tol, 1e-10))
        throw NonConvergence("xi: computation routes disagree at K=" +
                             std::to_string(K));
    return decomposition;
}

double vega_sensitivity_closed(const ParametricFamily& family, double K) {
    require_stress_level(family, K);
    const double den = family.ds_minus_dlambda();
    if (std::abs(den) < 1e-12)
        throw DegenerateParameter("vega: ds/dlambda below 1e-12");
    const double num = family.dP_dlambda(K) +
                       (family.omega() - K) * family.dF_dlambda(K);
    return num / den;
}

double vega_sensitivity(const ParametricFamily& family, double K) {
    require_stress_level(family, K);
    const double omega = family.omega();
    const QuadratureSpec& spec = family.quadrature();
    auto dF = [&](double x) { return family.dF_dlambda(x); };

    const double den =
        integrate_left_tail(dF, omega, family.mass_below_fn(), spec,
                            family.scale())
            .value;
    if (std::abs(den) < 1e-12)
        throw DegenerateParameter("vega: ds/dlambda below 1e-12");

    const double num =
        integrate_left_tail(dF, K, family.mass_below_fn(), spec, family.scale())
            .value +
        (omega - K) * family.dF_dlambda(K);
    const double v = num / den;

    if (family.kind() == FamilyKind::gaussian_scaling) {
        const double closed = vega_sensitivity_closed(family, K);
        const double tol = std::max(1e-6 * std::abs(closed),
                                    10.0 * spec.absolute_tolerance / std::abs(den));
        if (std::abs(v - closed) > tol)
            throw NonConvergence("vega: ratio and closed forms disagree at K=" +
                                 std::to_string(K));
    }
    return v;
}

double vega_sensitivity_fd(const ParametricFamily& family, double K,
                           double delta_s) {
    require_stress_level(family, K);
    if (!(delta_s > 0.0)) throw OutOfRange("vega_fd: delta_s must be positive");
    const double s = family.s_minus();
    if (!(s - delta_s > 0.0))
        throw OutOfRange("vega_fd: delta_s must stay below s_minus");
    const ParametricFamily up = family.with_lambda(family.lambda_from_s(s + delta_s));
    const ParametricFamily dn = family.with_lambda(family.lambda_from_s(s - delta_s));
    return (xi(up, K) - xi(dn, K)) / (2.0 * delta_s);
}

double fragility_drift(const ParametricFamily& family, double K) {
    require_stress_level(family, K);
    const double omega = family.omega();
    const double gap = omega - K;
    if (gap < 1e-12 * std::max(1.0, family.scale())) {
        // at the money: one-sided difference against the anchor value 1
        const double h = 1e-4 * std::max(1.0, family.scale());
        return (1.0 - vega_sensitivity(family, omega - h)) / h;
    }
    double h = 1e-4 * (gap + 1.0);
    h = std::min(h, 0.5 * gap);
    return (vega_sensitivity(family, K + h) - vega_sensitivity(family, K - h)) /
           (2.0 * h);
}

double second_order_fragility(const ParametricFamily& family, double K,
                              double delta_s) {
    require_stress_level(family, K);
    if (!(delta_s > 0.0))
        throw OutOfRange("second_order: delta_s must be positive");
    const double s = family.s_minus();
    if (!(s - delta_s > 0.0))
        throw OutOfRange("second_order: delta_s must stay below s_minus");
    const double xi_up =
        xi(family.with_lambda(family.lambda_from_s(s + delta_s)), K);
    const double xi_dn =
        xi(family.with_lambda(family.lambda_from_s(s - delta_s)), K);
    return (xi_up - 2.0 * xi(family, K) + xi_dn) / (delta_s * delta_s);
}

FragilityReport fragility_report(const ParametricFamily& family, double K,
                                 double delta_s) {
    FragilityReport rep;
    rep.K = K;
    rep.s_minus = family.s_minus();
    rep.xi = xi(family, K);
    rep.V = vega_sensitivity(family, K);
    rep.delta_s = delta_s;
    rep.V_fd = vega_sensitivity_fd(family, K, delta_s);
    rep.drift = fragility_drift(family, K);
    rep.second_order = second_order_fragility(family, K, delta_s);
    return rep;
}

double transfer_H(const ParametricFamily& family, double K, double x) {
    require_stress_level(family, K);
    if (!(x <= family.omega()))
        throw OutOfRange("transfer_H: x must not exceed omega");
    const double omega = family.omega();
    const double n_plain = family.dP_dlambda(omega);
    const double n_barrier = family.dPK_dlambda(omega, K);
    if (std::abs(n_plain) < 1e-12 || std::abs(n_barrier) < 1e-12)
        throw DegenerateParameter("transfer_H: normalizer vanishes");
    return family.dPK_dlambda(x, K) / n_barrier -
           family.dP_dlambda(x) / n_plain;
}

namespace {

// Sign transitions of f over a uniform grid, ignoring values that are zero
// relative to the grid maximum.
struct SignScanResult {
    int transitions = 0;
    double last_pos = 0.0, first_neg = 0.0;  // bracket of the first +/- flip
    bool has_bracket = false;
};

SignScanResult scan_pos_to_neg(const RealFn& f, double lo, double hi, int n) {
    SignScanResult out;
    double max_abs = 0.0;
    std::vector<double> xs(n), vs(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = lo + (hi - lo) * i / (n - 1);
        vs[i] = f(xs[i]);
        max_abs = std::max(max_abs, std::abs(vs[i]));
    }
    const double tiny = 1e-12 * max_abs;
    int prev = 0;
    double prev_x = lo;
    for (int i = 0; i < n; ++i) {
        const int s = (vs[i] > tiny) ? 1 : (vs[i] < -tiny ? -1 : 0);
        if (s == 0) continue;
        if (prev != 0 && s != prev) {
            ++out.transitions;
            if (prev == 1 && s == -1 && !out.has_bracket) {
                out.last_pos = prev_x;
                out.first_neg = xs[i];
                out.has_bracket = true;
            }
        }
        prev = s;
        prev_x = xs[i];
    }
    return out;
}

}  // namespace

void require_left_monomodal(const ParametricFamily& family) {
    const double omega = family.omega();
    const double lo = omega - 10.0 * family.scale();
    auto result = scan_pos_to_neg(
        [&](double x) { return family.df_dlambda(x); }, lo,
        omega - 1e-9 * family.scale(), 256);
    if (result.transitions != 1 || !result.has_bracket)
        throw NotMonomodal(
            "family: df/dlambda must change sign exactly once left of omega");
}

double mu_inflexion(const ParametricFamily& family) {
    require_left_monomodal(family);
    const double omega = family.omega();
    const double lo = omega - 10.0 * family.scale();
    auto result = scan_pos_to_neg(
        [&](double x) { return family.df_dlambda(x); }, lo,
        omega - 1e-9 * family.scale(), 256);
    return refine_root([&](double x) { return family.df_dlambda(x); },
                       result.last_pos, result.first_neg,
                       1e-10 * std::max(1.0, family.scale()));
}

double theta_threshold(const ParametricFamily& family) {
    require_left_monomodal(family);
    const double omega = family.omega();
    const double scale = family.scale();
    auto g = [&](double K) {
        return family.dP_dlambda(omega) - family.dPK_dlambda(omega, K);
    };

    const double lo = omega - 40.0 * scale;
    const double hi = omega - 1e-4 * scale;
    const int n = 512;
    double prev_x = lo, prev_g = g(lo);
    for (int i = 1; i < n; ++i) {
        const double x = lo + (hi - lo) * i / (n - 1);
        const double gx = g(x);
        if (prev_g > 0.0 && gx <= 0.0)
            return refine_root(g, prev_x, x, 1e-10 * std::max(1.0, scale));
        prev_x = x;
        prev_g = gx;
    }
    throw NoBracket("theta_threshold: no sign change on [omega-40*scale, omega)");
}

double kappa_crossing(const ParametricFamily& family, double K) {
    const double theta = theta_threshold(family);
    if (!(K <= theta))
        throw OutOfRange("kappa_crossing: requires K <= theta threshold");
    const double omega = family.omega();
    const double mu = mu_inflexion(family);

    auto H = [&](double x) { return transfer_H(family, K, x); };
    const double eps = 1e-6 * family.scale();
    auto scan = scan_pos_to_neg(H, mu + eps, omega - eps, 32);
    if (!scan.has_bracket)
        throw NoBracket("kappa_crossing: H has no sign change in (mu, omega)");
    if (scan.transitions != 1)
        throw NonConvergence("kappa_crossing: H sign pattern is not a single flip");
    return refine_root(H, scan.last_pos, scan.first_neg,
                       1e-10 * std::max(1.0, family.scale()));
}

TransferProfile transfer_profile(const ParametricFamily& family, double K,
                                 int grid_count) {
    require_stress_level(family, K);
    if (grid_count < 16) throw OutOfRange("transfer_profile: grid too small");
    TransferProfile prof;
    prof.K = K;
    prof.theta = theta_threshold(family);
    if (!(K <= prof.theta))
        throw OutOfRange("transfer_profile: K must lie at or below theta");
    prof.mu_inflexion = mu_inflexion(family);
    prof.kappa = kappa_crossing(family, K);
    prof.dP_dlambda_at_omega = family.dP_dlambda(family.omega());
    prof.dPK_dlambda_at_omega = family.dPK_dlambda(family.omega(), K);

    const double omega = family.omega();
    const double lo =
        omega - std::max(10.0 * family.scale(), 2.0 * (omega - K));
    prof.grid.reserve(static_cast<std::size_t>(grid_count));
    for (int i = 0; i < grid_count; ++i) {
        const double x = lo + (omega - lo) * i / (grid_count - 1);
        prof.grid.emplace_back(x, transfer_H(family, K, x));
    }
    return prof;
}

}  // namespace tailvega
