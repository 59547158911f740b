#pragma once

// Parameter sweeps, cross-model comparison, and the built-in periodicity
// scenario table.

#include "maglat/traps.hpp"

#include <string>
#include <vector>

namespace maglat {

inline constexpr const char* kToolVersion = "0.1.0";

enum class ProbeSet { center, edge, all };
enum class ModelChoice { analytic, prism, both };

/// "center": the ring-0 site (n odd) or the 4 innermost sites (n even) of the
/// central block; "edge": the mid-edge site of the outermost ring.
std::vector<std::pair<int, int>> probe_indices(int holes_n, ProbeSet probes);

struct SweepPlan {
    LatticeSpec base;
    std::string parameter;      ///< spec key, or "alpha_um" (sets alpha_h = alpha_s)
    std::vector<double> values;
    ProbeSet probes = ProbeSet::center;
    ModelChoice model = ModelChoice::prism;
    SiteMetrics metrics = SiteMetrics::standard;
    int threads = 1;
};

/// Apply one swept value to a copy of the base spec.  Throws ConfigError on an
/// unknown parameter name.
LatticeSpec apply_parameter(const LatticeSpec& base, const std::string& parameter,
                            double value);

/// Site analysis against the truncated analytic model (same searches and
/// figures of merit as the prism path).  Empty ij list = every hole.
std::vector<TrapSite> analytic_sites(const LatticeSpec& spec,
                                     const std::vector<std::pair<int, int>>& ij = {},
                                     SiteMetrics metrics = SiteMetrics::standard,
                                     const AtomSpecies& atom = rb87());

struct SweepRow {
    double value = 0.0;
    std::vector<TrapSite> probes; ///< deterministic (block, i, j) order
    std::string failure;          ///< row-level failure reason, empty on success
};

struct SweepTable {
    std::string parameter;
    ProbeSet probe_set = ProbeSet::center;
    ModelChoice model = ModelChoice::prism;
    std::vector<SweepRow> rows;  ///< one per plan value, plan order
    std::uint64_t base_spec_hash = 0;
    std::string version = kToolVersion;
};

/// Rebuild the spec and geometry per value, analyze the probe sites, and
/// gather rows in plan order.  Per-row failures are recorded, not thrown.
SweepTable run_sweep(const SweepPlan& plan);

/// Rectilinear comparison region [um].
struct Region {
    std::vector<double> xs, ys, zs;
};

/// Central-cell region of a spec: one lattice cell in x/y (step alpha/20) and
/// z - tau in [z_lo_alpha, z_hi_alpha] lattice periods (step alpha/20).
Region central_cell_region(const LatticeSpec& spec, double z_lo_alpha = 0.5,
                           double z_hi_alpha = 2.0);

struct DiscrepancyReport {
    double max_rel = 0.0;
    double mean_rel = 0.0;
    double p95_rel = 0.0;
    std::size_t points_used = 0;
    std::size_t points_excluded = 0; ///< both models below eps_B
};

/// Relative |B| discrepancy of the prism superposition against the truncated
/// analytic model over a region: | |B_p| - |B_a| | / max(|B_a|, |B_p|),
/// excluding points where both magnitudes are below eps_B.
DiscrepancyReport compare_models(const LatticeSpec& spec, const Region& region,
                                 double eps_b = 1e-9, int threads = 1);

struct Table3Row {
    double mz_gauss = 0.0;
    double alpha_h = 0.0, alpha_s = 0.0;
    std::string wall_condition;  ///< "same-elevation" or "protruding"
    double tau_wall = 0.0;       ///< pinned numeric value [um]
    double expect_center_b = 0.0, expect_center_d = 0.0;
    double expect_edge_b = 0.0, expect_edge_d = 0.0;
    double center_b = 0.0, center_d = 0.0;
    double edge_b = 0.0, edge_d = 0.0;
    bool pass = false;
    std::string failure;
};

struct Table3Report {
    std::vector<Table3Row> rows;
    double tol_rel_b = 0.20;   ///< relative tolerance on b_min
    double tol_abs_d_um = 0.10;
    bool all_pass = false;
};

/// Built-in periodicity scenarios (11x11 holes, tau_btm = 2 um, zero bias) on
/// the prism model, checked against the reference center/edge figures.
/// Wall thickness is pinned: same-elevation = tau_btm, protruding = tau_btm + 0.5.
Table3Report table3_report(int threads = 1);

} // namespace maglat
