#include "helpers.hpp"
#include "maglat/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace maglat;
using namespace testutil;

TEST_CASE("probe index selection") {
    auto center_odd = probe_indices(11, ProbeSet::center);
    REQUIRE(center_odd.size() == 1);
    CHECK(center_odd[0] == std::pair<int, int>{5, 5});

    auto center_even = probe_indices(4, ProbeSet::center);
    REQUIRE(center_even.size() == 4); // four innermost holes around the block center
    for (auto [i, j] : center_even) {
        CHECK((i == 1 || i == 2));
        CHECK((j == 1 || j == 2));
    }

    auto edge = probe_indices(11, ProbeSet::edge);
    REQUIRE(edge.size() == 1);
    CHECK(edge[0] == std::pair<int, int>{5, 10}); // mid-edge, outermost ring

    CHECK(probe_indices(11, ProbeSet::all).empty()); // empty = every hole
}

TEST_CASE("applying a swept parameter") {
    LatticeSpec base = reference_spec();
    LatticeSpec s = apply_parameter(base, "alpha_um", 3.0);
    CHECK(s.hole_size_alpha_h == 3.0);
    CHECK(s.spacing_alpha_s == 3.0);
    CHECK(s.block_gap == 3.0); // bumped to keep the spec valid

    CHECK(apply_parameter(base, "tau_wall_um", 2.5).wall_thickness_tau_wall == 2.5);
    CHECK(apply_parameter(base, "bias_x_gauss", 2.0).bias.bx == 2.0);
    CHECK(apply_parameter(base, "holes_n", 5.0).holes_n == 5);

    CHECK_THROWS_AS(apply_parameter(base, "bogus_key", 1.0), ConfigError);
    CHECK_THROWS_AS(apply_parameter(base, "alpha_um", -1.0), ConfigError);
}

TEST_CASE("sweep plan validation and degenerate sweep") {
    SweepPlan plan;
    plan.base = reference_spec();
    plan.parameter = "bias_x_gauss";
    plan.metrics = SiteMetrics::quick;

    plan.values = {};
    CHECK_THROWS_AS(run_sweep(plan), ConfigError);
    plan.values = {std::nan("")};
    CHECK_THROWS_AS(run_sweep(plan), ConfigError);

    plan.values = {0.0};
    SweepTable table = run_sweep(plan);
    REQUIRE(table.rows.size() == 1);
    REQUIRE(table.rows[0].failure.empty());
    REQUIRE(table.rows[0].probes.size() == 1);

    // The degenerate sweep reproduces a direct restricted extraction.
    ExtractOptions opt;
    opt.metrics = SiteMetrics::quick;
    opt.restrict_ij = {{5, 5}};
    auto direct = extract_sites(build_prisms(plan.base), plan.base, opt);
    CHECK(table.rows[0].probes[0].b_min == direct[0].b_min);
    CHECK(table.rows[0].probes[0].d_min == direct[0].d_min);
}

TEST_CASE("bias sweep raises the central minimum monotonically") {
    SweepPlan plan;
    plan.base = reference_spec();
    plan.parameter = "bias_x_gauss";
    plan.values = {0.0, 2.0, 5.0};
    plan.metrics = SiteMetrics::quick;
    SweepTable table = run_sweep(plan);
    REQUIRE(table.rows.size() == 3);
    double prev = -1.0;
    for (const SweepRow& row : table.rows) {
        REQUIRE(row.failure.empty());
        REQUIRE(row.probes.size() == 1);
        CHECK(row.probes[0].b_min > prev);
        prev = row.probes[0].b_min;
    }
}

TEST_CASE("both-model sweep appends analytic probes, failures stay per row") {
    SweepPlan plan;
    plan.base = reference_spec();
    plan.parameter = "bias_x_gauss";
    plan.values = {0.0};
    plan.metrics = SiteMetrics::quick;
    plan.model = ModelChoice::both;
    SweepTable both = run_sweep(plan);
    REQUIRE(both.rows.size() == 1);
    CHECK(both.rows[0].probes.size() == 2); // prism probe then analytic probe

    // An analytic row on an asymmetric lattice records a failure, not a throw.
    SweepPlan bad = plan;
    bad.model = ModelChoice::analytic;
    bad.parameter = "alpha_h_um";
    bad.values = {0.5}; // makes alpha_h != alpha_s
    SweepTable t = run_sweep(bad);
    REQUIRE(t.rows.size() == 1);
    CHECK_FALSE(t.rows[0].failure.empty());
}

TEST_CASE("cross-model comparison over the central cell") {
    LatticeSpec spec = reference_spec();
    spec.holes_n = 3; // small chip keeps this cheap
    Region region = central_cell_region(spec, 0.5, 1.0);
    CHECK(region.xs.size() == 41);
    CHECK(region.ys.size() == 41);
    DiscrepancyReport rep = compare_models(spec, region);
    CHECK(rep.points_used > 0);
    CHECK(std::isfinite(rep.max_rel));
    CHECK(rep.max_rel >= rep.p95_rel);
    CHECK(rep.p95_rel >= 0.0);
    CHECK(rep.max_rel >= rep.mean_rel);
    CHECK(rep.max_rel <= 1.0); // relative measure is bounded by construction

    LatticeSpec asym = spec;
    asym.spacing_alpha_s = 2.0;
    asym.block_gap = 2.0;
    CHECK_THROWS_AS(central_cell_region(asym, 0.5, 1.0), ConfigError);
}

TEST_CASE("built-in periodicity scenarios produce a complete report") {
    Table3Report rep = table3_report();
    REQUIRE(rep.rows.size() == 4);
    CHECK(rep.tol_rel_b == doctest::Approx(0.20));
    CHECK(rep.tol_abs_d_um == doctest::Approx(0.10));
    for (const Table3Row& r : rep.rows) {
        CHECK(r.failure.empty());
        CHECK(std::isfinite(r.center_b));
        CHECK(std::isfinite(r.center_d));
        CHECK(std::isfinite(r.edge_b));
        CHECK(std::isfinite(r.edge_d));
        CHECK(r.center_d > 0.0);
        CHECK((r.wall_condition == "same-elevation" || r.wall_condition == "protruding"));
    }
    // Pinned wall thicknesses: tau_btm for same-elevation, tau_btm + 0.5 above.
    CHECK(rep.rows[0].tau_wall == doctest::Approx(2.0));
    CHECK(rep.rows[3].tau_wall == doctest::Approx(2.5));

    std::string text = format_table3_report(rep);
    CHECK(text.rfind("periodicity scenarios", 0) == 0);
    CHECK(text.find("center b_min") != std::string::npos);
    CHECK(text.find(rep.all_pass ? "ALL PASS" : "FAILURES PRESENT") != std::string::npos);
}

TEST_CASE("CSV and JSON writers produce well-formed files") {
    LatticeSpec spec = reference_spec();
    PrismSet set = build_prisms(spec);
    ExtractOptions opt;
    opt.metrics = SiteMetrics::quick;
    opt.restrict_ij = {{5, 5}, {5, 10}};
    auto sites = extract_sites(set, spec, opt);

    // Sites CSV: header plus one row per site.
    write_sites_csv(sites, "io_sites.csv");
    std::ifstream in("io_sites.csv");
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("block_i,block_j,i,j,ring,x_um,y_um,z_um,d_min_um,b_min_G", 0) == 0);
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == static_cast<int>(sites.size()));

    // Field grid CSV + JSON sidecar.
    FieldGrid grid = field_grid(set, {0.0, 1.0}, {0.0}, {2.5, 3.0}, 1);
    grid.spec_hash = spec_hash(spec);
    write_field_grid_csv(grid, "io_grid.csv");
    write_field_grid_sidecar(grid, "io_grid.meta.json");
    std::ifstream meta("io_grid.meta.json");
    nlohmann::json j;
    meta >> j;
    CHECK(j["model"] == "prism");
    CHECK(j["spec_hash"] == spec_hash(spec));
    CHECK(j["axes"]["x_um"].size() == 2);

    // Sweep CSV carries the metadata comment and the same site columns.
    SweepPlan plan;
    plan.base = spec;
    plan.parameter = "bias_x_gauss";
    plan.values = {0.0, 2.0};
    plan.metrics = SiteMetrics::quick;
    SweepTable table = run_sweep(plan);
    write_sweep_csv(table, "io_sweep.csv");
    std::ifstream sw("io_sweep.csv");
    std::string comment, cols;
    std::getline(sw, comment);
    std::getline(sw, cols);
    CHECK(comment.rfind("# parameter=bias_x_gauss", 0) == 0);
    CHECK(cols.rfind("value,row_failure,", 0) == 0);

    // Manifest writer round-trips through JSON.
    RunManifest m;
    m.command = "sites";
    m.spec_hash = spec_hash(spec);
    m.tool_version = kToolVersion;
    m.outputs = {"io_sites.csv"};
    write_manifest(m, "io_manifest.json");
    std::ifstream mf("io_manifest.json");
    nlohmann::json jm;
    mf >> jm;
    CHECK(jm["command"] == "sites");
    CHECK(jm["tool_version"] == kToolVersion);

    // Unwritable path reports a configuration error.
    CHECK_THROWS_AS(write_sites_csv(sites, "/nonexistent_dir_xyz/out.csv"), ConfigError);
}
