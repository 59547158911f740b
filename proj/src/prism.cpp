#include "maglat/prism.hpp"

#include "maglat/units.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace maglat {

namespace {

constexpr double kEdgeTol = 1e-9;

struct Bounds {
    double x1, x2, y1, y2, z1, z2;
};

Bounds bounds_of(const Prism& pr) {
    return {pr.center.x - pr.half_extents.x, pr.center.x + pr.half_extents.x,
            pr.center.y - pr.half_extents.y, pr.center.y + pr.half_extents.y,
            pr.center.z - pr.half_extents.z, pr.center.z + pr.half_extents.z};
}

// Surface-charge closed form for a z-magnetized cuboid.  Returns false when
// the probe sits on an edge singularity of the form.
bool raw_field(const Bounds& b, const Vec3& p, double scale, double& bx, double& by,
               double& bz) {
    const double X[2] = {p.x - b.x1, p.x - b.x2};
    const double Y[2] = {p.y - b.y1, p.y - b.y2};
    const double Z[2] = {p.z - b.z1, p.z - b.z2};
    double sx = 0.0, sy = 0.0, sz = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                const double r = std::sqrt(X[i] * X[i] + Y[j] * Y[j] + Z[k] * Z[k]);
                const double ly = Y[j] + r;
                const double lx = X[i] + r;
                if (r < kEdgeTol || ly < kEdgeTol || lx < kEdgeTol) return false;
                const double num = X[i] * Y[j];
                const double den = Z[k] * r;
                if (std::abs(num) < kEdgeTol * kEdgeTol && std::abs(den) < kEdgeTol)
                    return false;
                const double sgn = ((i + j + k) & 1) ? -1.0 : 1.0;
                sx += sgn * std::log(ly);
                sy += sgn * std::log(lx);
                sz -= sgn * std::atan2(num, den);
            }
    bx += scale * sx;
    by += scale * sy;
    bz += scale * sz;
    return true;
}

double prism_scale(const Prism& pr) {
    return pr.magnetization_sign * pr.magnetization_magnitude / (4.0 * kPi);
}

} // namespace

PrismSet build_prisms(const LatticeSpec& spec) {
    validate_spec(spec);
    const int m = spec.blocks_m;
    const int n = spec.holes_n;
    const double pitch = spec.pitch();
    const double S = spec.block_side();
    const double P = S + spec.block_gap; // block center-to-center period
    const double W = spec.block_gap;     // frame width around the block array
    const double z0 = spec.substrate_z0;
    const double tb = spec.film_thickness_tau_btm;
    const double tw = spec.wall_thickness_tau_wall;

    auto block_center = [&](int k) { return (k - 0.5 * (m - 1)) * P; };
    const double chip_lo = block_center(0) - 0.5 * S - W;
    const double chip_hi = block_center(m - 1) + 0.5 * S + W;

    PrismSet set;
    set.bias = spec.bias;
    set.nudge_scale = 1e-7 * spec.hole_size_alpha_h;

    auto add_box = [&](double x1, double x2, double y1, double y2, double za, double zb,
                       int sign) {
        if (x2 - x1 <= 0.0 || y2 - y1 <= 0.0 || zb - za <= 0.0) return;
        Prism pr;
        pr.center = {0.5 * (x1 + x2), 0.5 * (y1 + y2), 0.5 * (za + zb)};
        pr.half_extents = {0.5 * (x2 - x1), 0.5 * (y2 - y1), 0.5 * (zb - za)};
        pr.magnetization_sign = sign;
        pr.magnetization_magnitude = spec.remanence_Mz;
        set.prisms.push_back(pr);
    };

    // Full slab over blocks + frame.
    add_box(chip_lo, chip_hi, chip_lo, chip_hi, z0, z0 + tb, +1);

    // Holes, through the full film thickness.
    const double hh = 0.5 * spec.hole_size_alpha_h;
    for (int bj = 0; bj < m; ++bj)
        for (int bi = 0; bi < m; ++bi) {
            const double cbx = block_center(bi);
            const double cby = block_center(bj);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const double cx = cbx + (i - 0.5 * (n - 1)) * pitch;
                    const double cy = cby + (j - 0.5 * (n - 1)) * pitch;
                    add_box(cx - hh, cx + hh, cy - hh, cy + hh, z0, z0 + tb, -1);
                }
        }

    // Wall-frame prisms: adjust the unperturbed region from tau_btm to tau_wall.
    if (tw != tb) {
        const double za = z0 + std::min(tb, tw);
        const double zb = z0 + std::max(tb, tw);
        const int sign = tw > tb ? +1 : -1;
        // y strips spanning the full chip width (below, between, above rows),
        // then x strips beside the blocks within each block row.
        std::vector<std::pair<double, double>> row_edges;
        for (int k = 0; k < m; ++k)
            row_edges.emplace_back(block_center(k) - 0.5 * S, block_center(k) + 0.5 * S);
        double y_prev = chip_lo;
        for (int k = 0; k < m; ++k) {
            add_box(chip_lo, chip_hi, y_prev, row_edges[k].first, za, zb, sign);
            y_prev = row_edges[k].second;
        }
        add_box(chip_lo, chip_hi, y_prev, chip_hi, za, zb, sign);
        for (int k = 0; k < m; ++k) {
            double x_prev = chip_lo;
            for (int c = 0; c < m; ++c) {
                add_box(x_prev, row_edges[c].first, row_edges[k].first, row_edges[k].second,
                        za, zb, sign);
                x_prev = row_edges[c].second;
            }
            add_box(x_prev, chip_hi, row_edges[k].first, row_edges[k].second, za, zb, sign);
        }
    }

    std::ostringstream prov;
    prov << "slab+holes+walls: m=" << m << " n=" << n << " wall=" << to_string(classify_wall(spec))
         << " frame_width_um=" << W;
    set.provenance = prov.str();
    return set;
}

int material_indicator(const PrismSet& set, const Vec3& p) {
    int sum = 0;
    for (const Prism& pr : set.prisms) {
        const Bounds b = bounds_of(pr);
        if (p.x > b.x1 && p.x < b.x2 && p.y > b.y1 && p.y < b.y2 && p.z > b.z1 && p.z < b.z2)
            sum += pr.magnetization_sign;
    }
    return sum;
}

FieldSample prism_field(const Prism& prism, const Vec3& p, double nudge) {
    const Bounds b = bounds_of(prism);
    const double scale = prism_scale(prism);
    double bx = 0.0, by = 0.0, bz = 0.0;
    Vec3 q = p;
    bool nudged = false;
    // Deterministic symmetric nudge off edge singularities, never silent.
    for (int attempt = 0; attempt < 4; ++attempt) {
        bx = by = bz = 0.0;
        if (raw_field(b, q, scale, bx, by, bz)) {
            FieldSample f = FieldSample::from_components(bx, by, bz);
            f.nudged = nudged;
            return f;
        }
        nudged = true;
        const double d = nudge * (attempt + 1) / std::sqrt(3.0);
        q = {p.x + d, p.y + d, p.z + d};
    }
    throw ComputeError("prism_field: probe pinned to an edge singularity");
}

FieldSample field_at(const PrismSet& set, const Vec3& p) {
    double bx = set.bias.bx, by = set.bias.by, bz = set.bias.bz;
    bool nudged = false;
    for (const Prism& pr : set.prisms) {
        const Bounds b = bounds_of(pr);
        if (!raw_field(b, p, prism_scale(pr), bx, by, bz)) {
            FieldSample f = prism_field(pr, p, set.nudge_scale);
            bx += f.bx;
            by += f.by;
            bz += f.bz;
            nudged = true;
        }
    }
    FieldSample f = FieldSample::from_components(bx, by, bz);
    f.nudged = nudged;
    return f;
}

namespace {

// Natural cubic spline through (t[i], v[i]); evaluated at query points.
struct CubicSpline {
    std::vector<double> t, a, b, c, d;

    void fit(std::span<const double> ts, std::span<const double> vs) {
        const std::size_t n = ts.size();
        t.assign(ts.begin(), ts.end());
        a.assign(vs.begin(), vs.end());
        b.assign(n, 0.0);
        c.assign(n, 0.0);
        d.assign(n, 0.0);
        std::vector<double> h(n - 1), al(n, 0.0), l(n, 1.0), mu(n, 0.0), z(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) h[i] = t[i + 1] - t[i];
        for (std::size_t i = 1; i + 1 < n; ++i)
            al[i] = 3.0 * ((a[i + 1] - a[i]) / h[i] - (a[i] - a[i - 1]) / h[i - 1]);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            l[i] = 2.0 * (t[i + 1] - t[i - 1]) - h[i - 1] * mu[i - 1];
            mu[i] = h[i] / l[i];
            z[i] = (al[i] - h[i - 1] * z[i - 1]) / l[i];
        }
        for (std::size_t j = n - 1; j-- > 0;) {
            c[j] = z[j] - mu[j] * c[j + 1];
            b[j] = (a[j + 1] - a[j]) / h[j] - h[j] * (c[j + 1] + 2.0 * c[j]) / 3.0;
            d[j] = (c[j + 1] - c[j]) / (3.0 * h[j]);
        }
    }

    double eval(double x) const {
        std::size_t j = std::upper_bound(t.begin(), t.end(), x) - t.begin();
        j = std::clamp<std::size_t>(j, 1, t.size() - 1) - 1;
        const double s = x - t[j];
        return a[j] + s * (b[j] + s * (c[j] + s * d[j]));
    }
};

} // namespace

std::vector<FieldSample> field_line_z(const PrismSet& set, double x, double y,
                                      std::span<const double> zs, const LineOptions& opt) {
    const std::size_t np = zs.size();
    std::vector<double> bx(np, set.bias.bx), by(np, set.bias.by), bz(np, set.bias.bz);
    std::vector<bool> nudged(np, false);

    std::vector<const Prism*> far;
    for (const Prism& pr : set.prisms) {
        if (opt.far_split_radius > 0.0) {
            const double dx = x - pr.center.x, dy = y - pr.center.y;
            const double margin = std::hypot(pr.half_extents.x, pr.half_extents.y);
            if (std::sqrt(dx * dx + dy * dy) - margin > opt.far_split_radius) {
                far.push_back(&pr);
                continue;
            }
        }
        const Bounds b = bounds_of(pr);
        const double scale = prism_scale(pr);
        const double X[2] = {x - b.x1, x - b.x2};
        const double Y[2] = {y - b.y1, y - b.y2};
        // A line that grazes a face plane may hit an edge singularity at some
        // z; route those prisms through the per-point nudging path.
        const bool delicate = std::min(std::abs(X[0]), std::abs(X[1])) < 1e-6 ||
                              std::min(std::abs(Y[0]), std::abs(Y[1])) < 1e-6;
        if (delicate) {
            for (std::size_t q = 0; q < np; ++q) {
                FieldSample f = prism_field(pr, {x, y, zs[q]}, set.nudge_scale);
                bx[q] += f.bx;
                by[q] += f.by;
                bz[q] += f.bz;
                if (f.nudged) nudged[q] = true;
            }
            continue;
        }
        double rho2[2][2], xy[2][2];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                rho2[i][j] = X[i] * X[i] + Y[j] * Y[j];
                xy[i][j] = X[i] * Y[j];
            }
        for (std::size_t q = 0; q < np; ++q) {
            const double Z[2] = {zs[q] - b.z1, zs[q] - b.z2};
            double sx = 0.0, sy = 0.0, sz = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const double sgn = ((i + j) & 1) ? -1.0 : 1.0;
                    for (int k = 0; k < 2; ++k) {
                        const double sg = k ? -sgn : sgn;
                        const double r = std::sqrt(rho2[i][j] + Z[k] * Z[k]);
                        sx += sg * std::log(Y[j] + r);
                        sy += sg * std::log(X[i] + r);
                        sz -= sg * std::atan2(xy[i][j], Z[k] * r);
                    }
                }
            bx[q] += scale * sx;
            by[q] += scale * sy;
            bz[q] += scale * sz;
        }
    }

    if (!far.empty() && np > 1) {
        const int nn = std::max(opt.far_nodes, 8);
        const double lo = zs.front(), hi = zs.back();
        // Generous padding keeps the natural-spline endpoint error (the free
        // boundary forces zero curvature at the ends) away from the queried
        // range.
        const double pad = 0.5 * (hi - lo) + 1e-9;
        std::vector<double> nodes(nn), fx(nn, 0.0), fy(nn, 0.0), fz(nn, 0.0);
        for (int q = 0; q < nn; ++q)
            nodes[q] = (lo - pad) + (hi - lo + 2 * pad) * q / (nn - 1);
        for (const Prism* pr : far) {
            const Bounds b = bounds_of(*pr);
            const double scale = prism_scale(*pr);
            for (int q = 0; q < nn; ++q)
                raw_field(b, {x, y, nodes[q]}, scale, fx[q], fy[q], fz[q]);
        }
        CubicSpline sx, sy, sz;
        sx.fit(nodes, fx);
        sy.fit(nodes, fy);
        sz.fit(nodes, fz);
        for (std::size_t q = 0; q < np; ++q) {
            bx[q] += sx.eval(zs[q]);
            by[q] += sy.eval(zs[q]);
            bz[q] += sz.eval(zs[q]);
        }
    } else if (!far.empty()) {
        for (const Prism* pr : far) {
            const Bounds b = bounds_of(*pr);
            raw_field(b, {x, y, zs[0]}, prism_scale(*pr), bx[0], by[0], bz[0]);
        }
    }

    std::vector<FieldSample> out(np);
    for (std::size_t q = 0; q < np; ++q) {
        out[q] = FieldSample::from_components(bx[q], by[q], bz[q]);
        out[q].nudged = nudged[q];
    }
    return out;
}

FieldGrid field_grid(const PrismSet& set, std::vector<double> xs, std::vector<double> ys,
                     std::vector<double> zs, int threads) {
    if (xs.empty() || ys.empty() || zs.empty())
        throw ConfigError("field_grid: empty axis");
    for (const auto* ax : {&xs, &ys, &zs})
        if (!std::is_sorted(ax->begin(), ax->end(),
                            [](double a, double b) { return a <= b; }))
            throw ConfigError("field_grid: axes must be strictly increasing");

    FieldGrid g;
    g.xs = std::move(xs);
    g.ys = std::move(ys);
    g.zs = std::move(zs);
    g.model_tag = "prism";
    g.values.resize(g.xs.size() * g.ys.size() * g.zs.size());

    const std::size_t columns = g.xs.size() * g.ys.size();
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t col = next.fetch_add(1); col < columns; col = next.fetch_add(1)) {
            const std::size_t ix = col % g.xs.size();
            const std::size_t iy = col / g.xs.size();
            auto samples = field_line_z(set, g.xs[ix], g.ys[iy], g.zs);
            for (std::size_t iz = 0; iz < g.zs.size(); ++iz)
                g.values[g.index(ix, iy, iz)] = samples[iz];
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return g;
}

FieldGrid field_grid_analytic(const AnalyticParams& params, std::vector<double> xs,
                              std::vector<double> ys, std::vector<double> zs) {
    if (xs.empty() || ys.empty() || zs.empty())
        throw ConfigError("field_grid: empty axis");
    FieldGrid g;
    g.xs = std::move(xs);
    g.ys = std::move(ys);
    g.zs = std::move(zs);
    g.model_tag = "analytic";
    g.values.resize(g.xs.size() * g.ys.size() * g.zs.size());
    for (std::size_t iz = 0; iz < g.zs.size(); ++iz)
        for (std::size_t iy = 0; iy < g.ys.size(); ++iy)
            for (std::size_t ix = 0; ix < g.xs.size(); ++ix)
                g.values[g.index(ix, iy, iz)] =
                    field_truncated({g.xs[ix], g.ys[iy], g.zs[iz]}, params);
    return g;
}

double dipole_prefactor(const PrismSet& set) {
    double m = 0.0;
    for (const Prism& pr : set.prisms) {
        const double v = 8.0 * pr.half_extents.x * pr.half_extents.y * pr.half_extents.z;
        m += pr.magnetization_sign * pr.magnetization_magnitude * v;
    }
    return m / (4.0 * kPi);
}

} // namespace maglat
