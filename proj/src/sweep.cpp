#include "maglat/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace maglat {

std::vector<std::pair<int, int>> probe_indices(int holes_n, ProbeSet probes) {
    const int n = holes_n;
    switch (probes) {
    case ProbeSet::all:
        return {};
    case ProbeSet::center:
        if (n % 2 == 1) return {{n / 2, n / 2}};
        return {{n / 2 - 1, n / 2 - 1}, {n / 2, n / 2 - 1}, {n / 2 - 1, n / 2},
                {n / 2, n / 2}};
    case ProbeSet::edge:
        return {{n / 2, n - 1}};
    }
    throw ConfigError("probe_indices: unknown probe set");
}

LatticeSpec apply_parameter(const LatticeSpec& base, const std::string& parameter,
                            double value) {
    LatticeSpec s = base;
    if (parameter == "alpha_um") {
        s.hole_size_alpha_h = s.spacing_alpha_s = value;
        s.block_gap = std::max(s.block_gap, value);
    } else if (parameter == "alpha_h_um") {
        s.hole_size_alpha_h = value;
    } else if (parameter == "alpha_s_um") {
        s.spacing_alpha_s = value;
        s.block_gap = std::max(s.block_gap, value);
    } else if (parameter == "tau_btm_um") {
        s.film_thickness_tau_btm = value;
    } else if (parameter == "tau_wall_um") {
        s.wall_thickness_tau_wall = value;
    } else if (parameter == "block_gap_um") {
        s.block_gap = value;
    } else if (parameter == "Mz_gauss") {
        s.remanence_Mz = value;
    } else if (parameter == "bias_x_gauss") {
        s.bias.bx = value;
    } else if (parameter == "bias_y_gauss") {
        s.bias.by = value;
    } else if (parameter == "bias_z_gauss") {
        s.bias.bz = value;
    } else if (parameter == "blocks_m") {
        s.blocks_m = static_cast<int>(value);
    } else if (parameter == "holes_n") {
        s.holes_n = static_cast<int>(value);
    } else {
        throw ConfigError("unknown sweep parameter: " + parameter);
    }
    validate_spec(s);
    return s;
}

std::vector<TrapSite> analytic_sites(const LatticeSpec& spec,
                                     const std::vector<std::pair<int, int>>& ij,
                                     SiteMetrics metrics, const AtomSpecies& atom) {
    const AnalyticParams params = derive_params(spec);
    const MagnitudeField mag = magnitude_of(params);
    const int n = spec.holes_n;
    const double pitch = spec.pitch();
    const double a = 0.5 * pitch;
    const double film_top = spec.film_top();

    std::vector<std::pair<int, int>> probe = ij;
    if (probe.empty())
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) probe.emplace_back(i, j);

    std::vector<TrapSite> sites;
    for (auto [i, j] : probe) {
        TrapSite s;
        s.i = i;
        s.j = j;
        s.ring_index = std::max(std::abs(2 * i - (n - 1)), std::abs(2 * j - (n - 1))) / 2;
        s.position.x = (i - 0.5 * (n - 1)) * pitch;
        s.position.y = (j - 0.5 * (n - 1)) * pitch;
        try {
            const ZMinimumOptions zopt = default_z_options(film_top, a);
            ZMinimum zm = find_z_minimum(mag, s.position.x, s.position.y, film_top, zopt);
            s.position.z = zm.z;
            s.d_min = zm.d_min;
            s.b_min = zm.b_min;
            if (metrics == SiteMetrics::standard) {
                Refine3DOptions r;
                r.simplex_scale = 0.05 * a;
                r.cell_radius = 0.5 * pitch;
                s.position = refine_minimum_3d(mag, s.position, r);
                s.b_min = mag(s.position);
                s.d_min = s.position.z - film_top;
                const double step = pitch / 400.0;
                s.barriers[0] = barrier_heights(mag, s.position, s.b_min, 0, pitch, step);
                s.barriers[1] = barrier_heights(mag, s.position, s.b_min, 1, pitch, step);
                s.barriers[2] = barrier_heights(mag, s.position, s.b_min, 2,
                                                zopt.z_hi - zopt.z_lo, step);
                s.curvatures = hessian_numeric(mag, s.position, 1e-3 * a);
                for (int axis = 0; axis < 3; ++axis)
                    if (!s.curvatures[axis].linear && s.curvatures[axis].value > 0.0) {
                        TrapFrequency f = trap_frequency(s.curvatures[axis].value, atom,
                                                         params.beta);
                        s.nu_standard_hz[axis] = f.nu_standard_hz;
                        s.nu_literal[axis] = f.nu_literal;
                    }
                const double escape = std::min({s.barriers[0].delta_b, s.barriers[1].delta_b,
                                                s.barriers[2].delta_b});
                s.depth_uK = well_depth_uK(std::max(escape, 0.0), atom);
            }
            s.converged = true;
        } catch (const std::exception& e) {
            s.failure = e.what();
        }
        sites.push_back(std::move(s));
    }
    return sites;
}

namespace {

std::vector<TrapSite> prism_probes(const LatticeSpec& spec,
                                   const std::vector<std::pair<int, int>>& ij,
                                   SiteMetrics metrics) {
    const PrismSet set = build_prisms(spec);
    ExtractOptions opt;
    opt.metrics = metrics;
    opt.restrict_ij = ij;
    return extract_sites(set, spec, opt);
}

} // namespace

SweepTable run_sweep(const SweepPlan& plan) {
    if (plan.values.empty()) throw ConfigError("run_sweep: empty value list");
    for (double v : plan.values)
        if (!std::isfinite(v)) throw ConfigError("run_sweep: non-finite sweep value");

    SweepTable table;
    table.parameter = plan.parameter;
    table.probe_set = plan.probes;
    table.model = plan.model;
    table.base_spec_hash = spec_hash(plan.base);
    table.rows.resize(plan.values.size());

    auto run_row = [&](std::size_t k) {
        SweepRow& row = table.rows[k];
        row.value = plan.values[k];
        try {
            const LatticeSpec spec = apply_parameter(plan.base, plan.parameter, row.value);
            const auto ij = probe_indices(spec.holes_n, plan.probes);
            if (plan.model == ModelChoice::prism || plan.model == ModelChoice::both)
                row.probes = prism_probes(spec, ij, plan.metrics);
            if (plan.model == ModelChoice::analytic || plan.model == ModelChoice::both) {
                auto a = analytic_sites(spec, ij, plan.metrics, rb87());
                row.probes.insert(row.probes.end(), a.begin(), a.end());
            }
        } catch (const std::exception& e) {
            row.failure = e.what();
        }
    };

    if (plan.threads <= 1) {
        for (std::size_t k = 0; k < table.rows.size(); ++k) run_row(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < plan.threads; ++t)
            pool.emplace_back([&]() {
                for (std::size_t k = next.fetch_add(1); k < table.rows.size();
                     k = next.fetch_add(1))
                    run_row(k);
            });
        for (auto& th : pool) th.join();
    }
    return table;
}

Region central_cell_region(const LatticeSpec& spec, double z_lo_alpha, double z_hi_alpha) {
    if (spec.hole_size_alpha_h != spec.spacing_alpha_s)
        throw ConfigError("central_cell_region requires alpha_h == alpha_s");
    const double alpha = spec.hole_size_alpha_h;
    const double tau = spec.film_top();
    const double step = alpha / 20.0;
    Region r;
    for (double x = -alpha; x <= alpha + 0.5 * step; x += step) r.xs.push_back(x);
    r.ys = r.xs;
    for (double zr = z_lo_alpha * alpha; zr <= z_hi_alpha * alpha + 0.5 * step; zr += step)
        r.zs.push_back(tau + zr);
    return r;
}

DiscrepancyReport compare_models(const LatticeSpec& spec, const Region& region,
                                 double eps_b, int threads) {
    const AnalyticParams params = derive_params(spec); // enforces alpha_h == alpha_s
    const PrismSet set = build_prisms(spec);
    const FieldGrid pg = field_grid(set, region.xs, region.ys, region.zs, threads);
    const FieldGrid ag = field_grid_analytic(params, region.xs, region.ys, region.zs);

    std::vector<double> rel;
    rel.reserve(pg.values.size());
    DiscrepancyReport rep;
    for (std::size_t k = 0; k < pg.values.size(); ++k) {
        const double bp = pg.values[k].magnitude;
        const double ba = ag.values[k].magnitude;
        if (bp < eps_b && ba < eps_b) {
            ++rep.points_excluded;
            continue;
        }
        rel.push_back(std::abs(bp - ba) / std::max(bp, ba));
    }
    rep.points_used = rel.size();
    if (!rel.empty()) {
        std::sort(rel.begin(), rel.end());
        rep.max_rel = rel.back();
        rep.mean_rel = 0.0;
        for (double v : rel) rep.mean_rel += v;
        rep.mean_rel /= static_cast<double>(rel.size());
        const std::size_t ip = std::min(rel.size() - 1,
                                        static_cast<std::size_t>(0.95 * rel.size()));
        rep.p95_rel = rel[ip];
    }
    return rep;
}

Table3Report table3_report(int threads) {
    struct Scenario {
        double mz, ah, as;
        const char* wall;
        double cb, cd, eb, ed;
    };
    // 11x11 holes, tau_btm = 2 um, zero bias; same-elevation walls match the
    // film thickness, protruding walls sit 0.5 um higher.
    const Scenario rows[] = {
        {3800.0, 0.5, 0.5, "same-elevation", 0.3, 0.2516, 0.91, 0.2909},
        {2000.0, 0.5, 1.5, "same-elevation", 1.5273, 0.448, 3.218, 0.4878},
        {2000.0, 1.0, 1.0, "same-elevation", 0.5, 0.669, 0.6, 0.7467},
        {2000.0, 1.0, 2.0, "protruding", 2.15, 0.811, 2.802, 0.947},
    };

    Table3Report rep;
    for (const Scenario& sc : rows) {
        Table3Row row;
        row.mz_gauss = sc.mz;
        row.alpha_h = sc.ah;
        row.alpha_s = sc.as;
        row.wall_condition = sc.wall;
        row.expect_center_b = sc.cb;
        row.expect_center_d = sc.cd;
        row.expect_edge_b = sc.eb;
        row.expect_edge_d = sc.ed;

        LatticeSpec spec;
        spec.blocks_m = 1;
        spec.holes_n = 11;
        spec.hole_size_alpha_h = sc.ah;
        spec.spacing_alpha_s = sc.as;
        spec.film_thickness_tau_btm = 2.0;
        row.tau_wall = spec.wall_thickness_tau_wall =
            std::string(sc.wall) == "protruding" ? 2.5 : 2.0;
        spec.block_gap = sc.as;
        spec.remanence_Mz = sc.mz;
        try {
            validate_spec(spec);
            const PrismSet set = build_prisms(spec);
            ExtractOptions opt;
            opt.metrics = SiteMetrics::standard;
            opt.threads = threads;
            opt.restrict_ij = probe_indices(spec.holes_n, ProbeSet::center);
            const auto center = extract_sites(set, spec, opt);
            opt.restrict_ij = probe_indices(spec.holes_n, ProbeSet::edge);
            const auto edge = extract_sites(set, spec, opt);
            if (center.empty() || edge.empty() || !center[0].converged ||
                !edge[0].converged)
                throw ComputeError("probe site did not converge");
            row.center_b = center[0].b_min;
            row.center_d = center[0].d_min;
            row.edge_b = edge[0].b_min;
            row.edge_d = edge[0].d_min;
            auto ok_b = [&](double got, double want) {
                return std::abs(got - want) <= rep.tol_rel_b * std::abs(want);
            };
            auto ok_d = [&](double got, double want) {
                return std::abs(got - want) <= rep.tol_abs_d_um;
            };
            row.pass = ok_b(row.center_b, row.expect_center_b) &&
                       ok_d(row.center_d, row.expect_center_d) &&
                       ok_b(row.edge_b, row.expect_edge_b) &&
                       ok_d(row.edge_d, row.expect_edge_d);
        } catch (const std::exception& e) {
            row.failure = e.what();
            row.pass = false;
        }
        rep.rows.push_back(std::move(row));
    }
    rep.all_pass = std::all_of(rep.rows.begin(), rep.rows.end(),
                               [](const Table3Row& r) { return r.pass; });
    return rep;
}

} // namespace maglat
