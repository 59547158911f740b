#include "maglat/io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace maglat {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out.precision(17);
    return out;
}

const char* probe_name(ProbeSet p) {
    switch (p) {
    case ProbeSet::center: return "center";
    case ProbeSet::edge: return "edge";
    case ProbeSet::all: return "all";
    }
    return "?";
}

const char* model_name(ModelChoice m) {
    switch (m) {
    case ModelChoice::analytic: return "analytic";
    case ModelChoice::prism: return "prism";
    case ModelChoice::both: return "both";
    }
    return "?";
}

void site_header(std::ostream& out) {
    out << "block_i,block_j,i,j,ring,x_um,y_um,z_um,d_min_um,b_min_G,"
           "dBx_G,dBy_G,dBz_G,"
           "curv_x_G_per_um2,curv_y_G_per_um2,curv_z_G_per_um2,"
           "nu_x_Hz,nu_y_Hz,nu_z_Hz,depth_uK,band_id,converged,failure\n";
}

void site_row(std::ostream& out, const TrapSite& s) {
    auto curv = [&](int k) -> std::string {
        if (s.curvatures[k].linear) return "LINEAR";
        std::ostringstream ss;
        ss.precision(17);
        ss << s.curvatures[k].value;
        return ss.str();
    };
    std::string failure = s.failure;
    for (char& c : failure)
        if (c == ',' || c == '\n') c = ';';
    out << s.block_i << ',' << s.block_j << ',' << s.i << ',' << s.j << ','
        << s.ring_index << ',' << s.position.x << ',' << s.position.y << ','
        << s.position.z << ',' << s.d_min << ',' << s.b_min << ','
        << s.barriers[0].delta_b << ',' << s.barriers[1].delta_b << ','
        << s.barriers[2].delta_b << ',' << curv(0) << ',' << curv(1) << ','
        << curv(2) << ',' << s.nu_standard_hz[0] << ',' << s.nu_standard_hz[1] << ','
        << s.nu_standard_hz[2] << ',' << s.depth_uK << ',' << s.band_id << ','
        << (s.converged ? 1 : 0) << ',' << failure << '\n';
}

} // namespace

void write_field_grid_csv(const FieldGrid& grid, const std::string& path) {
    auto out = open_out(path);
    out << "x_um,y_um,z_um,bx_G,by_G,bz_G,bmag_G\n";
    for (std::size_t iz = 0; iz < grid.zs.size(); ++iz)
        for (std::size_t iy = 0; iy < grid.ys.size(); ++iy)
            for (std::size_t ix = 0; ix < grid.xs.size(); ++ix) {
                const FieldSample& f = grid.values[grid.index(ix, iy, iz)];
                out << grid.xs[ix] << ',' << grid.ys[iy] << ',' << grid.zs[iz] << ','
                    << f.bx << ',' << f.by << ',' << f.bz << ',' << f.magnitude << '\n';
            }
}

void write_field_grid_sidecar(const FieldGrid& grid, const std::string& path) {
    json j;
    j["model"] = grid.model_tag;
    j["spec_hash"] = grid.spec_hash;
    j["units"] = {{"length", "um"}, {"field", "G"}};
    j["order"] = "z-major, then y, then x";
    j["axes"] = {{"x_um", grid.xs}, {"y_um", grid.ys}, {"z_um", grid.zs}};
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_sites_csv(const std::vector<TrapSite>& sites, const std::string& path) {
    auto out = open_out(path);
    site_header(out);
    for (const TrapSite& s : sites) site_row(out, s);
}

void write_sweep_csv(const SweepTable& table, const std::string& path) {
    auto out = open_out(path);
    out << "# parameter=" << table.parameter << " probes=" << probe_name(table.probe_set)
        << " model=" << model_name(table.model) << " base_spec_hash="
        << table.base_spec_hash << " version=" << table.version << '\n';
    out << "value,row_failure,";
    site_header(out);
    for (const SweepRow& row : table.rows) {
        if (row.probes.empty()) {
            std::string failure = row.failure.empty() ? "no probes" : row.failure;
            for (char& c : failure)
                if (c == ',' || c == '\n') c = ';';
            out << row.value << ',' << failure << '\n';
            continue;
        }
        for (const TrapSite& s : row.probes) {
            out << row.value << ",,";
            site_row(out, s);
        }
    }
}

void write_bands_csv(const std::vector<TrapSite>& sites, const BandPartition& bands,
                     const std::string& path) {
    auto out = open_out(path);
    out << "# tolerance_G=" << bands.tolerance
        << " bands_align_with_rings=" << (bands.bands_align_with_rings ? 1 : 0) << '\n';
    out << "band_id,representative_b_min_G,single_ring,n_members,ring,site_i,site_j\n";
    for (const Band& b : bands.bands)
        for (std::size_t k : b.members)
            out << b.band_id << ',' << b.representative_b_min << ','
                << (b.single_ring ? 1 : 0) << ',' << b.members.size() << ','
                << sites[k].ring_index << ',' << sites[k].i << ',' << sites[k].j << '\n';
}

std::string format_table3_report(const Table3Report& rep) {
    std::ostringstream out;
    out.precision(5);
    out << "periodicity scenarios (tol: b_min +-" << rep.tol_rel_b * 100.0
        << "%, d_min +-" << rep.tol_abs_d_um << " um)\n";
    for (const Table3Row& r : rep.rows) {
        out << (r.pass ? "PASS " : "FAIL ") << "Mz=" << r.mz_gauss / 1000.0
            << "kG alpha_h=" << r.alpha_h << " alpha_s=" << r.alpha_s << " wall="
            << r.wall_condition << " (tau_wall=" << r.tau_wall << ")\n";
        if (!r.failure.empty()) {
            out << "      error: " << r.failure << '\n';
            continue;
        }
        out << "      center b_min " << r.center_b << " G (expect " << r.expect_center_b
            << "), d_min " << r.center_d << " um (expect " << r.expect_center_d << ")\n";
        out << "      edge   b_min " << r.edge_b << " G (expect " << r.expect_edge_b
            << "), d_min " << r.edge_d << " um (expect " << r.expect_edge_d << ")\n";
    }
    out << (rep.all_pass ? "ALL PASS" : "FAILURES PRESENT") << '\n';
    return out.str();
}

namespace {

json table3_row_json(const Table3Row& r) {
    return json{{"mz_gauss", r.mz_gauss},
                {"alpha_h_um", r.alpha_h},
                {"alpha_s_um", r.alpha_s},
                {"wall_condition", r.wall_condition},
                {"tau_wall_um", r.tau_wall},
                {"expected",
                 {{"center_b_G", r.expect_center_b},
                  {"center_d_um", r.expect_center_d},
                  {"edge_b_G", r.expect_edge_b},
                  {"edge_d_um", r.expect_edge_d}}},
                {"measured",
                 {{"center_b_G", r.center_b},
                  {"center_d_um", r.center_d},
                  {"edge_b_G", r.edge_b},
                  {"edge_d_um", r.edge_d}}},
                {"pass", r.pass},
                {"failure", r.failure}};
}

} // namespace

void write_table3_json(const Table3Report& rep, const std::string& path) {
    json j;
    j["tol_rel_b"] = rep.tol_rel_b;
    j["tol_abs_d_um"] = rep.tol_abs_d_um;
    j["all_pass"] = rep.all_pass;
    j["rows"] = json::array();
    for (const Table3Row& r : rep.rows) j["rows"].push_back(table3_row_json(r));
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_table3_csv(const Table3Report& rep, const std::string& path) {
    auto out = open_out(path);
    out << "mz_gauss,alpha_h_um,alpha_s_um,wall_condition,tau_wall_um,"
           "center_b_G,center_b_expected_G,center_d_um,center_d_expected_um,"
           "edge_b_G,edge_b_expected_G,edge_d_um,edge_d_expected_um,pass\n";
    for (const Table3Row& r : rep.rows)
        out << r.mz_gauss << ',' << r.alpha_h << ',' << r.alpha_s << ','
            << r.wall_condition << ',' << r.tau_wall << ',' << r.center_b << ','
            << r.expect_center_b << ',' << r.center_d << ',' << r.expect_center_d << ','
            << r.edge_b << ',' << r.expect_edge_b << ',' << r.edge_d << ','
            << r.expect_edge_d << ',' << (r.pass ? 1 : 0) << '\n';
}

void write_compare_json(const DiscrepancyReport& rep, const LatticeSpec& spec,
                        const std::string& path) {
    json j;
    j["spec_hash"] = spec_hash(spec);
    j["max_rel"] = rep.max_rel;
    j["mean_rel"] = rep.mean_rel;
    j["p95_rel"] = rep.p95_rel;
    j["points_used"] = rep.points_used;
    j["points_excluded"] = rep.points_excluded;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
    json j;
    j["command"] = manifest.command;
    j["spec_hash"] = manifest.spec_hash;
    j["tool_version"] = manifest.tool_version;
    j["wall_clock_s"] = manifest.wall_clock_s;
    j["outputs"] = manifest.outputs;
    j["tolerances"] = {{"field_G", manifest.tol_field_G}, {"pos_um", manifest.tol_pos_um}};
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

} // namespace maglat
