#include "maglat/analytic.hpp"

#include "maglat/units.hpp"

#include <cmath>
#include <limits>

namespace maglat {

AnalyticParams derive_params(const LatticeSpec& spec) {
    if (spec.hole_size_alpha_h != spec.spacing_alpha_s)
        throw ConfigError("analytic model requires alpha_h == alpha_s; "
                          "use the prism solver for asymmetric periodicity");
    AnalyticParams p;
    p.alpha = spec.hole_size_alpha_h;
    p.beta = kPi / p.alpha;
    p.tau = spec.film_thickness_tau_btm;
    p.b0 = spec.remanence_Mz / kPi;
    p.bias = spec.bias;
    p.b_ref = p.b0 * (1.0 - std::exp(-p.beta * p.tau));
    return p;
}

FieldSample field_series(const Vec3& p, const AnalyticParams& params, int order) {
    if (order < 1) throw ConfigError("field_series: order must be >= 1");
    const double zr = p.z - params.tau;
    double bx = 0.0, by = 0.0, bz = 0.0;
    double sign = 1.0;
    for (int t = 0; t < order; ++t, sign = -sign) {
        const int k = 2 * t + 1;
        const double kb = k * params.beta;
        const double amp =
            sign * (params.b0 / k) * (1.0 - std::exp(-kb * params.tau)) * std::exp(-kb * zr);
        bx += amp * std::sin(kb * p.x);
        by += amp * std::sin(kb * p.y);
        bz += amp * (std::cos(kb * p.x) + std::cos(kb * p.y));
    }
    FieldSample f = FieldSample::from_components(bx + params.bias.bx, by + params.bias.by,
                                                 bz + params.bias.bz);
    f.extrapolated = p.z < params.tau;
    return f;
}

FieldSample field_truncated(const Vec3& p, const AnalyticParams& params) {
    return field_series(p, params, 1);
}

ZeroBiasMagnitude zero_bias_magnitude(const Vec3& p, const AnalyticParams& params) {
    if (!params.bias.is_zero())
        throw ConfigError("zero_bias_magnitude requires a zero bias field");
    FieldSample f = field_truncated(p, params);
    const double env = params.b_ref * std::exp(-params.beta * (p.z - params.tau));
    // Conventional closed form; omits the additive 2 under the radical,
    // so it is only valid where cos(bx)cos(by) dominates.  Kept for audit.
    const double literal = env * std::sqrt(2.0 * std::cos(params.beta * p.x) *
                                           std::cos(params.beta * p.y));
    return {f.magnitude, literal};
}

std::vector<std::pair<double, double>> ideal_minima_grid(const AnalyticParams& params,
                                                         int nx_lo, int nx_hi,
                                                         int ny_lo, int ny_hi) {
    std::vector<std::pair<double, double>> pts;
    for (int nx = nx_lo; nx <= nx_hi; ++nx)
        for (int ny = ny_lo; ny <= ny_hi; ++ny)
            if (((nx + ny) % 2 + 2) % 2 == 1)
                pts.emplace_back(nx * params.alpha, ny * params.alpha);
    return pts;
}

double dmin_heuristic(const AnalyticParams& params) {
    if (!(params.bias.bz > 0.0))
        throw ConfigError("d_min heuristic is undefined for bz <= 0");
    return (params.alpha / kPi) * std::log(params.b_ref + 1.0 / params.bias.bz);
}

AnalyticCurvature curvature_analytic(const Vec3& p, const AnalyticParams& params) {
    if (!params.bias.is_zero())
        throw ConfigError("curvature_analytic requires a zero bias field");
    const double beta = params.beta;
    const double env = params.b_ref * std::exp(-beta * (p.z - params.tau)); // B_ref e^{-beta z'}
    const double cx = std::cos(beta * p.x), sx = std::sin(beta * p.x);
    const double cy = std::cos(beta * p.y), sy = std::sin(beta * p.y);
    const double B2 = env * env * (2.0 + 2.0 * cx * cy);
    const double B = std::sqrt(std::max(B2, 0.0));
    if (B <= kCurvatureEpsB)
        throw ComputeError("curvature singular: |B| below eps_B (conical minimum); "
                           "use the numeric gradient instead");
    const double B3 = B * B2;
    AnalyticCurvature c;
    // Exact second derivatives of |B| = env sqrt(2 + 2 cos(bx) cos(by)).
    const double a2 = env * env;
    c.d2x = -beta * beta * a2 * cy * (cx * B2 + a2 * cy * sx * sx) / B3;
    c.d2y = -beta * beta * a2 * cx * (cy * B2 + a2 * cx * sy * sy) / B3;
    // Legacy expressions verbatim (note the cos(beta x) inside the y form).
    const double br = params.b_ref;
    c.literal_d2x = -beta * beta * br * br * cx * (cx * B2 + br * cx * sx * sx) / B3;
    c.literal_d2y = -beta * beta * br * br * cy * (cy * B2 + br * cx * sy * sy) / B3;
    return c;
}

} // namespace maglat
