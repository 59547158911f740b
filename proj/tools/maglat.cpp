// maglat: field maps, trap-site tables, sweeps, model comparison, and the
// built-in periodicity scenario check for perforated permanent-magnet lattices.

#include "maglat/io.hpp"
#include "maglat/sweep.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

namespace {

using namespace maglat;
namespace fs = std::filesystem;

struct CommonArgs {
    std::string spec_file;
    std::string model = "prism";
    std::string out_dir = ".";
    int threads = 1;
    double tol_field_G = 1e-6;
    double tol_pos_um = 1e-4;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_spec) {
    auto* spec = cmd->add_option("--spec", a.spec_file, "lattice config file");
    if (needs_spec) spec->required();
    cmd->add_option("--model", a.model, "analytic|prism|both")
        ->check(CLI::IsMember({"analytic", "prism", "both"}));
    cmd->add_option("--out", a.out_dir, "output directory");
    cmd->add_option("--threads", a.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--tol-field-G", a.tol_field_G, "field tolerance [G]");
    cmd->add_option("--tol-pos-um", a.tol_pos_um, "position tolerance [um]");
}

std::string out_path(const CommonArgs& a, const std::string& name) {
    fs::create_directories(a.out_dir);
    return (fs::path(a.out_dir) / name).string();
}

void emit_manifest(const CommonArgs& a, const std::string& command,
                   std::uint64_t hash, double seconds,
                   std::vector<std::string> outputs) {
    RunManifest m;
    m.command = command;
    m.spec_hash = hash;
    m.tool_version = kToolVersion;
    m.wall_clock_s = seconds;
    m.tol_field_G = a.tol_field_G;
    m.tol_pos_um = a.tol_pos_um;
    const std::string path = out_path(a, command + ".manifest.json");
    outputs.push_back(path);
    m.outputs = std::move(outputs);
    write_manifest(m, path);
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v;
    if (n <= 1) return {0.5 * (lo + hi)};
    for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
    return v;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

int run_fieldmap(const CommonArgs& a, const std::string& plane, double offset,
                 int resolution, double extent) {
    Timer timer;
    const LatticeSpec spec = load_spec(a.spec_file);
    if (extent <= 0.0) extent = 0.5 * (spec.blocks_m * (spec.block_side() + spec.block_gap)) +
                                2.0 * spec.pitch();
    const double zmax = spec.film_top() + 5.0 * spec.pitch();
    std::vector<double> xs, ys, zs;
    if (plane == "xy") {
        if (offset <= spec.substrate_z0)
            throw ConfigError("fieldmap: xy offset must sit above the substrate");
        xs = ys = linspace(-extent, extent, resolution);
        zs = {offset};
    } else if (plane == "xz") {
        xs = linspace(-extent, extent, resolution);
        ys = {offset};
        zs = linspace(spec.film_top() + 0.01, zmax, resolution);
    } else {
        xs = {offset};
        ys = linspace(-extent, extent, resolution);
        zs = linspace(spec.film_top() + 0.01, zmax, resolution);
    }

    std::vector<std::string> outputs;
    auto emit = [&](const FieldGrid& grid, const std::string& stem) {
        const std::string csv = out_path(a, stem + ".csv");
        const std::string meta = out_path(a, stem + ".meta.json");
        write_field_grid_csv(grid, csv);
        write_field_grid_sidecar(grid, meta);
        outputs.push_back(csv);
        outputs.push_back(meta);
    };
    if (a.model == "prism" || a.model == "both") {
        FieldGrid g = field_grid(build_prisms(spec), xs, ys, zs, a.threads);
        g.spec_hash = spec_hash(spec);
        emit(g, "fieldmap_prism");
    }
    if (a.model == "analytic" || a.model == "both") {
        FieldGrid g = field_grid_analytic(derive_params(spec), xs, ys, zs);
        g.spec_hash = spec_hash(spec);
        emit(g, "fieldmap_analytic");
    }
    emit_manifest(a, "fieldmap", spec_hash(spec), timer.seconds(), std::move(outputs));
    return 0;
}

int run_sites(const CommonArgs& a, bool quick) {
    Timer timer;
    const LatticeSpec spec = load_spec(a.spec_file);
    const SiteMetrics metrics = quick ? SiteMetrics::quick : SiteMetrics::standard;
    std::vector<std::string> outputs;
    if (a.model == "prism" || a.model == "both") {
        ExtractOptions opt;
        opt.metrics = metrics;
        opt.threads = a.threads;
        auto sites = extract_sites(build_prisms(spec), spec, opt);
        const std::string csv = out_path(a, "sites_prism.csv");
        write_sites_csv(sites, csv);
        outputs.push_back(csv);
    }
    if (a.model == "analytic" || a.model == "both") {
        auto sites = analytic_sites(spec, {}, metrics);
        const std::string csv = out_path(a, "sites_analytic.csv");
        write_sites_csv(sites, csv);
        outputs.push_back(csv);
    }
    emit_manifest(a, "sites", spec_hash(spec), timer.seconds(), std::move(outputs));
    return 0;
}

int run_sweep_cmd(const CommonArgs& a, const std::string& parameter,
                  const std::vector<double>& values, const std::string& probes) {
    Timer timer;
    SweepPlan plan;
    plan.base = load_spec(a.spec_file);
    plan.parameter = parameter;
    plan.values = values;
    plan.probes = probes == "center" ? ProbeSet::center
                  : probes == "edge" ? ProbeSet::edge
                                     : ProbeSet::all;
    plan.model = a.model == "analytic" ? ModelChoice::analytic
                 : a.model == "both"   ? ModelChoice::both
                                       : ModelChoice::prism;
    plan.threads = a.threads;
    const SweepTable table = run_sweep(plan);
    const std::string csv = out_path(a, "sweep.csv");
    write_sweep_csv(table, csv);
    emit_manifest(a, "sweep", table.base_spec_hash, timer.seconds(), {csv});
    for (const SweepRow& row : table.rows)
        if (!row.failure.empty())
            std::cerr << "sweep value " << row.value << " failed: " << row.failure << '\n';
    return 0;
}

int run_compare(const CommonArgs& a, double z_lo_alpha, double z_hi_alpha) {
    Timer timer;
    const LatticeSpec spec = load_spec(a.spec_file);
    const Region region = central_cell_region(spec, z_lo_alpha, z_hi_alpha);
    const DiscrepancyReport rep = compare_models(spec, region, a.tol_field_G, a.threads);
    const std::string path = out_path(a, "compare.json");
    write_compare_json(rep, spec, path);
    std::cout << "points " << rep.points_used << " (excluded " << rep.points_excluded
              << "): max " << rep.max_rel << ", mean " << rep.mean_rel << ", p95 "
              << rep.p95_rel << '\n';
    emit_manifest(a, "compare", spec_hash(spec), timer.seconds(), {path});
    return 0;
}

int run_bands(const CommonArgs& a, double tol) {
    Timer timer;
    const LatticeSpec spec = load_spec(a.spec_file);
    ExtractOptions opt;
    opt.metrics = SiteMetrics::quick;
    opt.threads = a.threads;
    auto sites = extract_sites(build_prisms(spec), spec, opt);
    const BandPartition bands = classify_bands(sites, tol);
    for (const Band& b : bands.bands)
        for (std::size_t k : b.members) sites[k].band_id = b.band_id;
    const std::string bcsv = out_path(a, "bands.csv");
    const std::string scsv = out_path(a, "sites_prism.csv");
    write_bands_csv(sites, bands, bcsv);
    write_sites_csv(sites, scsv);
    std::cout << bands.bands.size() << " bands, rings aligned: "
              << (bands.bands_align_with_rings ? "yes" : "no") << '\n';
    emit_manifest(a, "bands", spec_hash(spec), timer.seconds(), {bcsv, scsv});
    return 0;
}

int run_table3(const CommonArgs& a) {
    Timer timer;
    const Table3Report rep = table3_report(a.threads);
    const std::string jpath = out_path(a, "table3.json");
    const std::string cpath = out_path(a, "table3.csv");
    write_table3_json(rep, jpath);
    write_table3_csv(rep, cpath);
    std::cout << format_table3_report(rep);
    emit_manifest(a, "table3", 0, timer.seconds(), {jpath, cpath});
    return rep.all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"permanent-magnet lattice field and trap toolkit"};
    app.require_subcommand(1);

    CommonArgs a;

    auto* fieldmap = app.add_subcommand("fieldmap", "sample |B| on a plane");
    std::string plane = "xy";
    double offset = 0.0, extent = 0.0;
    int resolution = 101;
    add_common(fieldmap, a, true);
    fieldmap->add_option("--plane", plane, "xy|xz|yz")
        ->check(CLI::IsMember({"xy", "xz", "yz"}));
    fieldmap->add_option("--offset", offset, "plane offset [um]")->required();
    fieldmap->add_option("--res", resolution, "points per axis")->check(CLI::PositiveNumber);
    fieldmap->add_option("--extent", extent, "half-size of the map [um] (default: chip)");

    auto* sites = app.add_subcommand("sites", "locate traps and figures of merit");
    bool quick = false;
    add_common(sites, a, true);
    sites->add_flag("--quick", quick, "z-line minima only");

    auto* sweep = app.add_subcommand("sweep", "sweep one spec parameter");
    std::string parameter, probes = "center";
    std::vector<double> values;
    add_common(sweep, a, true);
    sweep->add_option("--parameter", parameter, "spec key or alpha_um")->required();
    sweep->add_option("--values", values, "swept values")->required()->expected(-1);
    sweep->add_option("--probes", probes, "center|edge|all")
        ->check(CLI::IsMember({"center", "edge", "all"}));

    auto* compare = app.add_subcommand("compare", "prism vs analytic discrepancy");
    double z_lo_alpha = 0.5, z_hi_alpha = 2.0;
    add_common(compare, a, true);
    compare->add_option("--z-lo-alpha", z_lo_alpha, "lower height in lattice periods");
    compare->add_option("--z-hi-alpha", z_hi_alpha, "upper height in lattice periods");

    auto* bands = app.add_subcommand("bands", "group sites by b_min");
    double band_tol = 0.01;
    add_common(bands, a, true);
    bands->add_option("--tol", band_tol, "band tolerance [G]");

    auto* table3 = app.add_subcommand("table3", "built-in periodicity scenario check");
    add_common(table3, a, false);

    try {
        app.parse(argc, argv);
        if (fieldmap->parsed()) return run_fieldmap(a, plane, offset, resolution, extent);
        if (sites->parsed()) return run_sites(a, quick);
        if (sweep->parsed()) return run_sweep_cmd(a, parameter, values, probes);
        if (compare->parsed()) return run_compare(a, z_lo_alpha, z_hi_alpha);
        if (bands->parsed()) return run_bands(a, band_tol);
        if (table3->parsed()) return run_table3(a);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const maglat::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const maglat::ComputeError& e) {
        std::cerr << "compute error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
