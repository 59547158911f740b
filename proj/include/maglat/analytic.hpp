#pragma once

// Closed-form Fourier model of the infinite perforated film and the
// closed-form minima / curvature expressions that go with it.
//
// The model is the fundamental-harmonic field of a z-magnetized film of
// thickness tau perforated by a square lattice of square holes with
// alpha_h = alpha_s = alpha:
//
//   Bx = B_ref e^{-beta (z-tau)} sin(beta x) + bias_x
//   By = B_ref e^{-beta (z-tau)} sin(beta y) + bias_y
//   Bz = B_ref e^{-beta (z-tau)} [cos(beta x) + cos(beta y)] + bias_z
//
// with beta = pi/alpha, B_0 = B_r/pi and B_ref = B_0 (1 - e^{-beta tau}).

#include "maglat/spec.hpp"

#include <cmath>
#include <vector>

namespace maglat {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

/// One sampled field value.  magnitude is always recomputed from components.
struct FieldSample {
    double bx = 0.0, by = 0.0, bz = 0.0;
    double magnitude = 0.0;
    bool extrapolated = false; ///< evaluated below the model's validity range
    bool nudged = false;       ///< probe sat on a prism edge and was perturbed

    static FieldSample from_components(double bx, double by, double bz) {
        FieldSample f{bx, by, bz, std::sqrt(bx * bx + by * by + bz * bz)};
        return f;
    }
};

/// Derived parameters of the analytic model.
struct AnalyticParams {
    double b0 = 0.0;    ///< B_0 = B_r/pi [G]
    double beta = 0.0;  ///< pi/alpha [1/um]
    double tau = 0.0;   ///< film thickness [um]
    double alpha = 0.0; ///< hole size = spacing [um]
    BiasField bias;
    double b_ref = 0.0; ///< B_0 (1 - e^{-beta tau}) [G]
};

/// Requires alpha_h == alpha_s; otherwise directs the caller to the prism solver.
AnalyticParams derive_params(const LatticeSpec& spec);

/// Harmonic series field: the fundamental plus higher odd harmonics with the
/// alternating-sign pattern.  `order` counts included odd harmonics;
/// order = 1 is the truncated near-field model.
FieldSample field_series(const Vec3& p, const AnalyticParams& params, int order);

/// Truncated (fundamental-only) model.  Identical to field_series(p, params, 1).
FieldSample field_truncated(const Vec3& p, const AnalyticParams& params);

struct ZeroBiasMagnitude {
    double value = 0.0;       ///< |B| from components (authoritative)
    double literal_form = 0.0; ///< conventional closed form, audit only; NaN where undefined
};

/// |B| of the truncated model at zero bias.  Throws ConfigError on nonzero bias.
ZeroBiasMagnitude zero_bias_magnitude(const Vec3& p, const AnalyticParams& params);

/// Lattice of ideal zero minima: (nx*alpha, ny*alpha) with nx + ny odd.
std::vector<std::pair<double, double>> ideal_minima_grid(const AnalyticParams& params,
                                                         int nx_lo, int nx_hi,
                                                         int ny_lo, int ny_hi);

/// Rule-of-thumb trap height, (alpha/pi) ln(B_ref + 1/bz).  Dimensionally
/// inconsistent as written; kept verbatim and labeled HEURISTIC.
/// Requires bz > 0.  The authoritative d_min comes from the numeric search.
double dmin_heuristic(const AnalyticParams& params);

/// Threshold below which curvature of |B| is treated as singular [G].
inline constexpr double kCurvatureEpsB = 1e-6;

struct AnalyticCurvature {
    double d2x = 0.0; ///< d^2|B|/dx^2 [G/um^2]
    double d2y = 0.0;
    double literal_d2x = 0.0; ///< conventional closed form, audit only
    double literal_d2y = 0.0;
};

/// Transverse curvatures of |B| for the zero-bias truncated model.
/// The primary outputs are the exact second derivatives of the magnitude;
/// the conventional closed forms (which differ) are exposed for audit.
/// Throws ComputeError when |B| <= kCurvatureEpsB (conical minimum).
AnalyticCurvature curvature_analytic(const Vec3& p, const AnalyticParams& params);

} // namespace maglat
