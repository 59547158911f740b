#pragma once

// Trap location and figures of merit: d_min, B_min, barriers, tilt,
// curvature, oscillation frequency, well depth, and band grouping.

#include "maglat/analytic.hpp"
#include "maglat/prism.hpp"
#include "maglat/units.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace maglat {

/// Scalar |B| field over space.
using MagnitudeField = std::function<double(const Vec3&)>;

/// |B| of a prism set as a MagnitudeField.
MagnitudeField magnitude_of(const PrismSet& set);
/// |B| of the truncated analytic model as a MagnitudeField.
MagnitudeField magnitude_of(const AnalyticParams& params);

struct ZMinimumOptions {
    double z_lo = 0.0;          ///< search range start [um]
    double z_hi = 0.0;          ///< search range end [um]
    double coarse_step = 0.0;   ///< coarse scan step [um]
    double refine_tol = 1e-4;   ///< golden-section position tolerance [um]
};

/// Default search window [tau + 0.05 a, tau + 5 a], coarse step a/200.
ZMinimumOptions default_z_options(double film_top, double a);

struct ZMinimum {
    double d_min = 0.0; ///< height above the film top [um]
    double z = 0.0;     ///< absolute z of the minimum [um]
    double b_min = 0.0; ///< |B| at the minimum [G]
};

/// Global |B| minimum along the vertical line (x, y, .): coarse scan then
/// golden-section refinement.  film_top is the reference plane for d_min.
/// Throws ComputeError when the minimum sits on the range boundary.
ZMinimum find_z_minimum(const MagnitudeField& field, double x, double y, double film_top,
                        const ZMinimumOptions& opt);

/// Same search running on the batched prism line kernel (identical result,
/// much faster for large prism sets).
ZMinimum find_z_minimum(const PrismSet& set, double x, double y, double film_top,
                        const ZMinimumOptions& opt, const LineOptions& line = {});

struct Refine3DOptions {
    double simplex_scale = 0.05; ///< initial simplex edge [um]
    double tol = 1e-5;           ///< simplex diameter convergence [um]
    int max_iters = 10000;
    double cell_radius = 0.0;    ///< allowed distance from seed (0 = unchecked)
};

/// Local minimizer of |B| by Nelder-Mead simplex descent from a seed.
/// Throws ComputeError on non-convergence or on escaping the seed cell.
Vec3 refine_minimum_3d(const MagnitudeField& field, const Vec3& seed,
                       const Refine3DOptions& opt = {});

enum class BarrierSide { closed, open };

struct Barrier {
    double delta_b = 0.0; ///< min(left, right) escape barrier [G]
    double left = 0.0;    ///< one-sided barriers [G]
    double right = 0.0;
    BarrierSide left_side = BarrierSide::closed;
    BarrierSide right_side = BarrierSide::closed;

    bool open() const {
        return left_side == BarrierSide::open || right_side == BarrierSide::open;
    }
};

/// Barrier height along one axis through a trap: scan to the adjacent
/// maximum on each side; delta_b takes the two-sided minimum (the lowest
/// escape barrier).  A direction with no bracketing maximum within the scan
/// span is flagged open (outward direction of edge sites).
Barrier barrier_heights(const MagnitudeField& field, const Vec3& site, double b_min,
                        int axis, double span, double step);

struct AxisCurvature {
    double value = 0.0; ///< d^2|B|/dk^2 [G/um^2]
    bool linear = false; ///< conical/non-harmonic minimum, curvature meaningless
};

/// Central second differences with Richardson extrapolation (h and h/2).
/// Flags LINEAR when |B| < eps_B or the estimate is h-unstable (>10% drift).
std::array<AxisCurvature, 3> hessian_numeric(const MagnitudeField& field, const Vec3& p,
                                             double h);

struct TrapFrequency {
    double nu_standard_hz = 0.0; ///< (1/2pi) sqrt(muB gF mF B'' / m)
    double nu_literal = 0.0;       ///< legacy closed form, NON-STANDARD-DIMENSIONS
};

/// Transverse oscillation frequency from a harmonic curvature [G/um^2].
/// beta_per_um enters only the legacy variant.
TrapFrequency trap_frequency(double curvature, const AtomSpecies& atom, double beta_per_um);

/// Well depth Lambda = muB gF mF dB / kB, in microkelvin.
double well_depth_uK(double delta_b_gauss, const AtomSpecies& atom);

struct TrapSite {
    int block_i = 0, block_j = 0;
    int i = 0, j = 0;          ///< hole indices within the block
    int ring_index = 0;        ///< Chebyshev distance from the block center
    Vec3 position;             ///< (x_min, y_min, z) [um]
    double d_min = 0.0;        ///< height above film top [um]
    double b_min = 0.0;        ///< [G]
    std::array<Barrier, 3> barriers;
    std::array<AxisCurvature, 3> curvatures;
    std::array<double, 3> nu_standard_hz{0.0, 0.0, 0.0};
    std::array<double, 3> nu_literal{0.0, 0.0, 0.0};
    double depth_uK = 0.0;
    int band_id = -1;
    bool converged = false;
    std::string failure; ///< per-site failure reason, empty when converged
};

enum class SiteMetrics {
    quick,    ///< z-line minimum only (b_min, d_min)
    standard, ///< + 3D refinement, barriers, curvatures, frequencies, depth
};

struct ExtractOptions {
    SiteMetrics metrics = SiteMetrics::standard;
    AtomSpecies atom = rb87();
    LineOptions line;      ///< passed to the prism line kernel
    int threads = 1;
    /// When non-empty, only hole indices (i, j) in this list are analyzed
    /// (every block); others are omitted from the result.
    std::vector<std::pair<int, int>> restrict_ij;
};

/// One search seeded above every hole center; deterministic (block, i, j)
/// ordering.  Per-site failures are recorded on the site, not thrown.
std::vector<TrapSite> extract_sites(const PrismSet& set, const LatticeSpec& spec,
                                    const ExtractOptions& opt = {});

/// Tilt between two sites: |b_min difference| in G and microkelvin.
struct Tilt {
    double gauss = 0.0;
    double uK = 0.0;
};
Tilt tilt(const TrapSite& a, const TrapSite& b, const AtomSpecies& atom);

struct Band {
    int band_id = 0;
    std::vector<std::size_t> members;  ///< indices into the input site list
    double representative_b_min = 0.0; ///< [G]
    bool single_ring = false;          ///< all members share a ring index
};

struct BandPartition {
    std::vector<Band> bands;
    double tolerance = 0.0; ///< [G]
    bool bands_align_with_rings = false;
};

/// Group sites by b_min within tol; annotates whether bands track rings.
BandPartition classify_bands(const std::vector<TrapSite>& sites, double tol = 0.01);

} // namespace maglat
