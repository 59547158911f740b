#pragma once

// Exact magnetostatics of the finite perforated structure by superposition of
// uniformly z-magnetized rectangular prisms (magnetic surface-charge model).
//
// Decomposition of a chip: one full slab covering blocks + walls at thickness
// tau_btm, one negative prism per hole, and thin wall-frame prisms that raise
// or lower the unperturbed frame to tau_wall.  Magnetization is fixed at the
// remanent value; no mutual-interaction relaxation.

#include "maglat/analytic.hpp"
#include "maglat/spec.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace maglat {

/// Axis-aligned uniformly z-magnetized cuboid.
struct Prism {
    Vec3 center;                        ///< [um]
    Vec3 half_extents;                  ///< (hx, hy, hz) > 0 [um]
    int magnetization_sign = +1;        ///< +1 material, -1 removed material
    double magnetization_magnitude = 0; ///< remanence B_r [G]
};

/// Signed-prism decomposition of a chip.
struct PrismSet {
    std::vector<Prism> prisms;
    std::string provenance;
    BiasField bias;
    double nudge_scale = 1e-7; ///< edge-singularity nudge distance [um]

    std::size_t size() const { return prisms.size(); }
};

/// Build the signed-prism decomposition for a spec.
/// Frame width around the block array equals block_gap; adjacent blocks are
/// separated by exactly block_gap of unperturbed film.
PrismSet build_prisms(const LatticeSpec& spec);

/// Material indicator at a point: +1 strictly inside material, 0 in a hole or
/// outside.  Points on prism boundaries are unspecified.
int material_indicator(const PrismSet& set, const Vec3& p);

/// Exact field of one prism at a point [G].  Points within nudge of an edge
/// singularity of the closed form are deterministically perturbed and flagged.
FieldSample prism_field(const Prism& prism, const Vec3& p, double nudge = 1e-7);

/// Superposed field of the whole set plus its bias [G].
FieldSample field_at(const PrismSet& set, const Vec3& p);

/// Options for vertical-line evaluation.
struct LineOptions {
    /// When > 0, prisms farther than this lateral distance [um] from the line
    /// are summed exactly on a coarse vertical grid and cubic-spline
    /// interpolated (their profile is smooth on that scale).  0 = fully exact.
    double far_split_radius = 0.0;
    int far_nodes = 97;
};

/// Field samples along a vertical line (x, y, zs[i]); equivalent to field_at
/// per point, with per-prism work hoisted out of the z loop.
std::vector<FieldSample> field_line_z(const PrismSet& set, double x, double y,
                                      std::span<const double> zs,
                                      const LineOptions& opt = {});

/// Sampled vector field over a rectilinear grid with units metadata.
struct FieldGrid {
    std::vector<double> xs, ys, zs;     ///< strictly increasing [um]
    std::vector<FieldSample> values;    ///< z-major, then y, then x
    std::uint64_t spec_hash = 0;
    std::string model_tag;              ///< "analytic" or "prism"

    std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return (iz * ys.size() + iy) * xs.size() + ix;
    }
};

/// Dense grid evaluation; deterministic z-major/y/x ordering regardless of
/// thread count.
FieldGrid field_grid(const PrismSet& set, std::vector<double> xs, std::vector<double> ys,
                     std::vector<double> zs, int threads = 1);

/// Same grid carrier for the analytic model.
FieldGrid field_grid_analytic(const AnalyticParams& params, std::vector<double> xs,
                              std::vector<double> ys, std::vector<double> zs);

/// Total magnetic moment of the set divided by 4*pi, in G*um^3 (the far-field
/// dipole prefactor mu0 m / 4 pi expressed in lattice units).
double dipole_prefactor(const PrismSet& set);

} // namespace maglat
