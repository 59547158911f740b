#pragma once

// Lattice configuration: the key-value config format, validation, and the
// wall-condition classification shared by every other module.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace maglat {

/// Raised for malformed configuration / usage problems (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised for failures inside a computation (CLI exit code 3).
struct ComputeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Uniform external bias field, Gauss.  Negative bz is a "-z bias".
struct BiasField {
    double bx = 0.0;
    double by = 0.0;
    double bz = 0.0;

    bool is_zero() const { return bx == 0.0 && by == 0.0 && bz == 0.0; }
    bool operator==(const BiasField&) const = default;
};

/// Relation of the unperturbed wall thickness to the film thickness.
enum class WallCondition { positive, negative, surface_equal };

std::string to_string(WallCondition w);

/// Full geometric and magnetic description of one chip scenario.
///
/// Lengths in micrometres, fields in Gauss.  Holes go through the full film
/// thickness down to the substrate; the film is in its remanently magnetized
/// state with magnetization along +z.
struct LatticeSpec {
    int blocks_m = 1;               ///< blocks per side of the m x m block array
    int holes_n = 1;                ///< holes per side of each n x n block
    double hole_size_alpha_h = 1.0; ///< square hole edge [um]
    double spacing_alpha_s = 1.0;   ///< edge-to-edge hole separation [um]
    double film_thickness_tau_btm = 1.0; ///< perforated film thickness [um]
    double wall_thickness_tau_wall = 1.0; ///< unperturbed frame thickness [um]
    double block_gap = 1.0;         ///< unperturbed gap between blocks [um]
    double remanence_Mz = 1.0;      ///< remanent induction B_r [G]
    BiasField bias;
    double substrate_z0 = 0.0;      ///< bottom of the film [um]

    /// Center-to-center hole period.
    double pitch() const { return hole_size_alpha_h + spacing_alpha_s; }
    /// Side length of one block's perforated region.
    double block_side() const { return holes_n * pitch(); }
    /// z of the perforated film's top surface.
    double film_top() const { return substrate_z0 + film_thickness_tau_btm; }

    bool operator==(const LatticeSpec&) const = default;
};

/// Parse a flat key-value config document.  Unknown keys are rejected.
LatticeSpec parse_spec(const std::string& text);

/// Load and parse a config file.
LatticeSpec load_spec(const std::string& path);

/// Render a spec back to the config format; parse(render(s)) == s.
std::string render_spec(const LatticeSpec& spec);

/// Validate invariants; throws ConfigError on violation.
void validate_spec(const LatticeSpec& spec);

/// Trichotomy of tau_wall against tau_btm (exact comparison on inputs).
WallCondition classify_wall(const LatticeSpec& spec);

/// Stable FNV-1a hash of the canonical rendering, for run manifests.
std::uint64_t spec_hash(const LatticeSpec& spec);

} // namespace maglat
