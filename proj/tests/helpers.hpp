#pragma once

// Shared fixtures and finite-difference helpers for the test suites.

#include "maglat/sweep.hpp"

#include <cmath>
#include <functional>

namespace testutil {

using namespace maglat;

/// Reference 11x11 single-block scenario used throughout the suites.
inline LatticeSpec reference_spec() {
    LatticeSpec s;
    s.blocks_m = 1;
    s.holes_n = 11;
    s.hole_size_alpha_h = 1.0;
    s.spacing_alpha_s = 1.0;
    s.film_thickness_tau_btm = 2.0;
    s.wall_thickness_tau_wall = 1.0;
    s.block_gap = 1.0;
    s.remanence_Mz = 2000.0;
    return s;
}

using VectorField = std::function<Vec3(const Vec3&)>;

/// 4th-order central first derivative.
inline double deriv4(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

/// 4th-order central second derivative.
inline double deriv4_2nd(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) -
            f(x - 2 * h)) /
           (12.0 * h * h);
}

/// Numeric Jacobian dB_i/dx_j of a vector field (4th-order stencils).
inline void jacobian(const VectorField& F, const Vec3& p, double h, double J[3][3]) {
    for (int j = 0; j < 3; ++j) {
        auto shift = [&](double t) {
            Vec3 q = p;
            (j == 0 ? q.x : j == 1 ? q.y : q.z) += t;
            return F(q);
        };
        const Vec3 a = shift(-2 * h), b = shift(-h), c = shift(h), d = shift(2 * h);
        J[0][j] = (-d.x + 8.0 * c.x - 8.0 * b.x + a.x) / (12.0 * h);
        J[1][j] = (-d.y + 8.0 * c.y - 8.0 * b.y + a.y) / (12.0 * h);
        J[2][j] = (-d.z + 8.0 * c.z - 8.0 * b.z + a.z) / (12.0 * h);
    }
}

inline double divergence(const VectorField& F, const Vec3& p, double h) {
    double J[3][3];
    jacobian(F, p, h, J);
    return J[0][0] + J[1][1] + J[2][2];
}

inline double curl_norm(const VectorField& F, const Vec3& p, double h) {
    double J[3][3];
    jacobian(F, p, h, J);
    const double cx = J[2][1] - J[1][2];
    const double cy = J[0][2] - J[2][0];
    const double cz = J[1][0] - J[0][1];
    return std::sqrt(cx * cx + cy * cy + cz * cz);
}

inline VectorField vector_of(const PrismSet& set) {
    return [&set](const Vec3& p) {
        FieldSample f = field_at(set, p);
        return Vec3{f.bx, f.by, f.bz};
    };
}

inline VectorField vector_of(const AnalyticParams& params, int order = 1) {
    return [params, order](const Vec3& p) {
        FieldSample f = field_series(p, params, order);
        return Vec3{f.bx, f.by, f.bz};
    };
}

} // namespace testutil
