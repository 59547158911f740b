#include "maglat/traps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>
#include <thread>

namespace maglat {

MagnitudeField magnitude_of(const PrismSet& set) {
    auto shared = std::make_shared<PrismSet>(set);
    return [shared](const Vec3& p) { return field_at(*shared, p).magnitude; };
}

MagnitudeField magnitude_of(const AnalyticParams& params) {
    return [params](const Vec3& p) { return field_truncated(p, params).magnitude; };
}

ZMinimumOptions default_z_options(double film_top, double a) {
    ZMinimumOptions o;
    o.z_lo = film_top + 0.05 * a;
    o.z_hi = film_top + 5.0 * a;
    o.coarse_step = a / 200.0;
    o.refine_tol = 1e-4;
    return o;
}

namespace {

std::vector<double> coarse_axis(const ZMinimumOptions& opt) {
    if (!(opt.z_hi > opt.z_lo) || !(opt.coarse_step > 0.0))
        throw ConfigError("find_z_minimum: invalid search range");
    std::vector<double> zs;
    const int n = static_cast<int>(std::ceil((opt.z_hi - opt.z_lo) / opt.coarse_step));
    zs.reserve(n + 1);
    for (int i = 0; i <= n; ++i)
        zs.push_back(std::min(opt.z_lo + i * opt.coarse_step, opt.z_hi));
    return zs;
}

// Golden-section minimization of g on [lo, hi] to tolerance tol.
double golden_section(const std::function<double(double)>& g, double lo, double hi,
                      double tol) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = g(c), fd = g(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = g(d);
        }
    }
    return 0.5 * (a + b);
}

ZMinimum refine_from_scan(const std::function<double(double)>& g,
                          const std::vector<double>& zs, const std::vector<double>& mags,
                          double film_top, const ZMinimumOptions& opt) {
    const std::size_t imin =
        std::min_element(mags.begin(), mags.end()) - mags.begin();
    if (imin == 0 || imin + 1 == zs.size())
        throw ComputeError("find_z_minimum: no interior minimum in the search range "
                           "(uniform or bias-dominated field)");
    const double z = golden_section(g, zs[imin - 1], zs[imin + 1], opt.refine_tol);
    return {z - film_top, z, g(z)};
}

} // namespace

ZMinimum find_z_minimum(const MagnitudeField& field, double x, double y, double film_top,
                        const ZMinimumOptions& opt) {
    const auto zs = coarse_axis(opt);
    std::vector<double> mags(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) mags[i] = field({x, y, zs[i]});
    auto g = [&](double z) { return field({x, y, z}); };
    return refine_from_scan(g, zs, mags, film_top, opt);
}

ZMinimum find_z_minimum(const PrismSet& set, double x, double y, double film_top,
                        const ZMinimumOptions& opt, const LineOptions& line) {
    const auto zs = coarse_axis(opt);
    const auto samples = field_line_z(set, x, y, zs, line);
    std::vector<double> mags(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) mags[i] = samples[i].magnitude;
    auto g = [&](double z) { return field_at(set, {x, y, z}).magnitude; };
    return refine_from_scan(g, zs, mags, film_top, opt);
}

Vec3 refine_minimum_3d(const MagnitudeField& field, const Vec3& seed,
                       const Refine3DOptions& opt) {
    struct Vertex {
        Vec3 p;
        double f;
    };
    auto eval = [&](const Vec3& p) { return Vertex{p, field(p)}; };
    std::array<Vertex, 4> v;
    v[0] = eval(seed);
    v[1] = eval({seed.x + opt.simplex_scale, seed.y, seed.z});
    v[2] = eval({seed.x, seed.y + opt.simplex_scale, seed.z});
    v[3] = eval({seed.x, seed.y, seed.z + opt.simplex_scale});

    auto diameter = [&]() {
        double d = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                d = std::max(d, std::hypot(v[a].p.x - v[b].p.x, v[a].p.y - v[b].p.y,
                                           v[a].p.z - v[b].p.z));
        return d;
    };

    int iter = 0;
    for (; iter < opt.max_iters && diameter() > opt.tol; ++iter) {
        std::sort(v.begin(), v.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        const Vec3 centroid{(v[0].p.x + v[1].p.x + v[2].p.x) / 3.0,
                            (v[0].p.y + v[1].p.y + v[2].p.y) / 3.0,
                            (v[0].p.z + v[1].p.z + v[2].p.z) / 3.0};
        auto along = [&](double t) {
            return Vec3{centroid.x + t * (centroid.x - v[3].p.x),
                        centroid.y + t * (centroid.y - v[3].p.y),
                        centroid.z + t * (centroid.z - v[3].p.z)};
        };
        Vertex refl = eval(along(1.0));
        if (refl.f < v[0].f) {
            Vertex exp = eval(along(2.0));
            v[3] = exp.f < refl.f ? exp : refl;
        } else if (refl.f < v[2].f) {
            v[3] = refl;
        } else {
            Vertex contr = eval(along(refl.f < v[3].f ? 0.5 : -0.5));
            if (contr.f < std::min(refl.f, v[3].f)) {
                v[3] = contr;
            } else {
                for (int a = 1; a < 4; ++a)
                    v[a] = eval({0.5 * (v[a].p.x + v[0].p.x), 0.5 * (v[a].p.y + v[0].p.y),
                                 0.5 * (v[a].p.z + v[0].p.z)});
            }
        }
    }
    if (iter >= opt.max_iters)
        throw ComputeError("refine_minimum_3d: no convergence within iteration budget");
    std::sort(v.begin(), v.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    if (opt.cell_radius > 0.0) {
        const double dx = v[0].p.x - seed.x, dy = v[0].p.y - seed.y;
        if (std::sqrt(dx * dx + dy * dy) > opt.cell_radius) {
            std::ostringstream msg;
            msg << "refine_minimum_3d: minimizer escaped the seed cell (offset "
                << dx << ", " << dy << " um; nearest cell "
                << std::lround(dx / (2.0 * opt.cell_radius)) << ", "
                << std::lround(dy / (2.0 * opt.cell_radius)) << ")";
            throw ComputeError(msg.str());
        }
    }
    return v[0].p;
}

Barrier barrier_heights(const MagnitudeField& field, const Vec3& site, double b_min,
                        int axis, double span, double step) {
    auto probe = [&](double t) {
        Vec3 p = site;
        (axis == 0 ? p.x : axis == 1 ? p.y : p.z) += t;
        return field(p);
    };
    auto scan_side = [&](double dir, double side_span, double& out,
                         BarrierSide& flag) {
        double best = b_min;
        double best_t = 0.0;
        double t = step;
        bool descended = false;
        for (; t <= side_span + 0.5 * step; t += step) {
            const double v = probe(dir * t);
            if (v > best) {
                best = v;
                best_t = t;
            } else if (v < best - 1e-9 && t - best_t > 2.0 * step) {
                descended = true; // passed the adjacent maximum
                break;
            }
        }
        out = best - b_min;
        flag = descended ? BarrierSide::closed : BarrierSide::open;
    };
    Barrier b;
    scan_side(-1.0, span, b.left, b.left_side);
    scan_side(+1.0, span, b.right, b.right_side);
    b.delta_b = std::min(b.left, b.right);
    return b;
}

std::array<AxisCurvature, 3> hessian_numeric(const MagnitudeField& field, const Vec3& p,
                                             double h) {
    if (!(h > 0.0) || p.x + h == p.x || p.y + h == p.y || p.z + h == p.z)
        throw ConfigError("hessian_numeric: step underflow");
    std::array<AxisCurvature, 3> out;
    const double f0 = field(p);
    if (f0 < kCurvatureEpsB) {
        for (auto& c : out) c.linear = true;
        return out;
    }
    for (int axis = 0; axis < 3; ++axis) {
        auto second = [&](double hh) {
            Vec3 lo = p, hi = p;
            (axis == 0 ? lo.x : axis == 1 ? lo.y : lo.z) -= hh;
            (axis == 0 ? hi.x : axis == 1 ? hi.y : hi.z) += hh;
            return (field(hi) - 2.0 * f0 + field(lo)) / (hh * hh);
        };
        const double d1 = second(h);
        const double d2 = second(0.5 * h);
        out[axis].value = (4.0 * d2 - d1) / 3.0; // Richardson
        const double drift = std::abs(d1 - d2) / std::max(std::abs(d2), 1e-300);
        out[axis].linear = drift > 0.10;
    }
    return out;
}

TrapFrequency trap_frequency(double curvature, const AtomSpecies& atom, double beta_per_um) {
    if (!(curvature > 0.0))
        throw ComputeError("trap_frequency: curvature must be positive (harmonic site)");
    const double gm = atom.gF_mF();
    if (gm < 0.0) throw ConfigError("trap_frequency: gF*mF < 0 is not a trappable state");
    TrapFrequency f;
    const double curv_si = curvature * units::curvature_to_si; // T/m^2
    f.nu_standard_hz =
        std::sqrt(constants::bohr_magneton * gm * curv_si / atom.mass_kg) / (2.0 * kPi);
    // Legacy closed form: beta sqrt(muB gF mF B'') / 2pi, no mass factor.
    f.nu_literal = beta_per_um * std::sqrt(constants::bohr_magneton * gm * curvature) /
                 (2.0 * kPi);
    return f;
}

double well_depth_uK(double delta_b_gauss, const AtomSpecies& atom) {
    if (delta_b_gauss < 0.0) throw ConfigError("well_depth: negative barrier");
    return constants::bohr_magneton * atom.gF_mF() * delta_b_gauss * units::gauss_to_tesla /
           constants::boltzmann * units::kelvin_to_uK;
}

std::vector<TrapSite> extract_sites(const PrismSet& set, const LatticeSpec& spec,
                                    const ExtractOptions& opt) {
    const int m = spec.blocks_m;
    const int n = spec.holes_n;
    const double pitch = spec.pitch();
    const double S = spec.block_side();
    const double P = S + spec.block_gap;
    const double film_top = spec.film_top();
    const double a = 0.5 * pitch; // equals alpha when alpha_h == alpha_s

    auto wanted = [&](int i, int j) {
        if (opt.restrict_ij.empty()) return true;
        return std::find(opt.restrict_ij.begin(), opt.restrict_ij.end(),
                         std::make_pair(i, j)) != opt.restrict_ij.end();
    };
    std::vector<TrapSite> sites;
    sites.reserve(static_cast<std::size_t>(m) * m * n * n);
    for (int bj = 0; bj < m; ++bj)
        for (int bi = 0; bi < m; ++bi)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    if (!wanted(i, j)) continue;
                    TrapSite& s = sites.emplace_back();
                    s.block_i = bi;
                    s.block_j = bj;
                    s.i = i;
                    s.j = j;
                    s.ring_index = std::max(std::abs(2 * i - (n - 1)),
                                            std::abs(2 * j - (n - 1))) / 2;
                    s.position.x = (bi - 0.5 * (m - 1)) * P + (i - 0.5 * (n - 1)) * pitch;
                    s.position.y = (bj - 0.5 * (m - 1)) * P + (j - 0.5 * (n - 1)) * pitch;
                }

    const MagnitudeField mag = magnitude_of(set);
    auto analyze = [&](TrapSite& s) {
        try {
            const ZMinimumOptions zopt = default_z_options(film_top, a);
            try {
                ZMinimum zm = find_z_minimum(set, s.position.x, s.position.y, film_top,
                                             zopt, opt.line);
                s.position.z = zm.z;
                s.d_min = zm.d_min;
                s.b_min = zm.b_min;
            } catch (const ComputeError&) {
                // Edge sites can have their minimum off the vertical line
                // through the hole center; hand the nominal height to the 3D
                // refinement instead (quick mode reports the failure).
                if (opt.metrics != SiteMetrics::standard) throw;
                s.position.z = film_top + 0.7 * a;
            }
            if (opt.metrics == SiteMetrics::standard) {
                Refine3DOptions r;
                r.simplex_scale = 0.05 * a;
                r.cell_radius = 0.75 * pitch;
                const Vec3 refined = refine_minimum_3d(mag, s.position, r);
                s.position = refined;
                s.b_min = mag(refined);
                s.d_min = refined.z - film_top;
                const double step = pitch / 400.0;
                s.barriers[0] = barrier_heights(mag, refined, s.b_min, 0, pitch, step);
                s.barriers[1] = barrier_heights(mag, refined, s.b_min, 1, pitch, step);
                s.barriers[2] = barrier_heights(mag, refined, s.b_min, 2,
                                                zopt.z_hi - zopt.z_lo, step);
                s.curvatures = hessian_numeric(mag, refined, 1e-3 * a);
                const double beta = kPi / a;
                for (int axis = 0; axis < 3; ++axis) {
                    if (!s.curvatures[axis].linear && s.curvatures[axis].value > 0.0) {
                        TrapFrequency f =
                            trap_frequency(s.curvatures[axis].value, opt.atom, beta);
                        s.nu_standard_hz[axis] = f.nu_standard_hz;
                        s.nu_literal[axis] = f.nu_literal;
                    }
                }
                const double escape = std::min({s.barriers[0].delta_b, s.barriers[1].delta_b,
                                                s.barriers[2].delta_b});
                s.depth_uK = well_depth_uK(std::max(escape, 0.0), opt.atom);
            }
            s.converged = true;
        } catch (const std::exception& e) {
            s.failure = e.what();
        }
    };

    if (opt.threads <= 1) {
        for (auto& s : sites) analyze(s);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t k = next.fetch_add(1); k < sites.size(); k = next.fetch_add(1))
                analyze(sites[k]);
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < opt.threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return sites;
}

Tilt tilt(const TrapSite& a, const TrapSite& b, const AtomSpecies& atom) {
    Tilt t;
    t.gauss = std::abs(a.b_min - b.b_min);
    t.uK = well_depth_uK(t.gauss, atom);
    return t;
}

BandPartition classify_bands(const std::vector<TrapSite>& sites, double tol) {
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < sites.size(); ++k)
        if (sites[k].converged) order.push_back(k);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sites[a].b_min < sites[b].b_min; });

    BandPartition part;
    part.tolerance = tol;
    for (std::size_t k : order) {
        if (!part.bands.empty() &&
            sites[k].b_min - part.bands.back().representative_b_min <= tol) {
            part.bands.back().members.push_back(k);
        } else {
            Band b;
            b.band_id = static_cast<int>(part.bands.size());
            b.representative_b_min = sites[k].b_min;
            b.members.push_back(k);
            part.bands.push_back(std::move(b));
        }
    }
    part.bands_align_with_rings = !part.bands.empty();
    for (Band& b : part.bands) {
        b.single_ring = std::all_of(b.members.begin(), b.members.end(), [&](std::size_t k) {
            return sites[k].ring_index == sites[b.members.front()].ring_index;
        });
        if (!b.single_ring) part.bands_align_with_rings = false;
    }
    return part;
}

} // namespace maglat
