#pragma once

// CSV and JSON emission: field grids, site tables, sweep tables, band
// partitions, scenario reports, and run manifests.  All tabular output is CSV
// with unit-suffixed headers; every run writes a JSON manifest.

#include "maglat/prism.hpp"
#include "maglat/sweep.hpp"
#include "maglat/traps.hpp"

#include <string>
#include <vector>

namespace maglat {

/// x_um,y_um,z_um,bx_G,by_G,bz_G,bmag_G rows in z-major grid order.
void write_field_grid_csv(const FieldGrid& grid, const std::string& path);

/// JSON sidecar with axes, units, model tag, and spec hash.
void write_field_grid_sidecar(const FieldGrid& grid, const std::string& path);

/// Full per-site table, deterministic (block, i, j) order as produced.
void write_sites_csv(const std::vector<TrapSite>& sites, const std::string& path);

/// One row per (sweep value, probe site); failed rows carry the reason.
void write_sweep_csv(const SweepTable& table, const std::string& path);

/// band_id,representative_b_min_G,single_ring,member count and site indices.
void write_bands_csv(const std::vector<TrapSite>& sites, const BandPartition& bands,
                     const std::string& path);

/// Human-readable pass/fail text for the built-in scenario table.
std::string format_table3_report(const Table3Report& rep);
/// Machine-readable counterpart.
void write_table3_json(const Table3Report& rep, const std::string& path);
void write_table3_csv(const Table3Report& rep, const std::string& path);

/// Discrepancy statistics as JSON.
void write_compare_json(const DiscrepancyReport& rep, const LatticeSpec& spec,
                        const std::string& path);

struct RunManifest {
    std::string command;             ///< reconstructed command line
    std::uint64_t spec_hash = 0;
    std::string tool_version;
    double wall_clock_s = 0.0;
    std::vector<std::string> outputs; ///< every file the command wrote
    double tol_field_G = 0.0;
    double tol_pos_um = 0.0;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

} // namespace maglat
