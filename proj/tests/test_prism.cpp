#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace maglat;
using namespace testutil;

namespace {

Prism unit_prism(double br = 1000.0) {
    Prism p;
    p.center = {0.0, 0.0, 0.0};
    p.half_extents = {0.5, 0.5, 0.5};
    p.magnetization_sign = +1;
    p.magnetization_magnitude = br;
    return p;
}

PrismSet single(const Prism& p) {
    PrismSet s;
    s.prisms = {p};
    return s;
}

} // namespace

TEST_CASE("decomposition size: slab + holes + wall frame strips") {
    LatticeSpec s = reference_spec(); // tau_wall != tau_btm: frame strips present
    PrismSet set = build_prisms(s);
    CHECK(set.size() == 126); // 1 slab + 121 holes + 4 frame strips (m = 1)

    LatticeSpec flush = s;
    flush.wall_thickness_tau_wall = s.film_thickness_tau_btm;
    CHECK(build_prisms(flush).size() == 122); // no strips needed

    LatticeSpec multi = s;
    multi.blocks_m = 2;
    PrismSet mset = build_prisms(multi);
    // 1 slab + 4 * 121 holes + (m+1) + m(m+1) strips
    CHECK(mset.size() == 1 + 4 * 121 + 3 + 6);
}

TEST_CASE("material indicator distinguishes hole, film, wall, vacuum") {
    PrismSet set = build_prisms(reference_spec());
    CHECK(material_indicator(set, {0.0, 0.0, 1.0}) == 0);  // central hole
    CHECK(material_indicator(set, {1.0, 0.0, 1.0}) == 1);  // film between holes
    CHECK(material_indicator(set, {11.5, 0.0, 0.5}) == 1); // wall frame (thinner)
    CHECK(material_indicator(set, {11.5, 0.0, 1.5}) == 0); // above the thin wall
    CHECK(material_indicator(set, {0.0, 0.0, 5.0}) == 0);  // vacuum above
    CHECK(material_indicator(set, {100.0, 0.0, 1.0}) == 0); // outside the chip
}

TEST_CASE("single prism approaches its dipole far field on axis") {
    Prism p = unit_prism();
    const double pref = p.magnetization_magnitude / (4.0 * kPi); // Br V / 4pi, V = 1
    const double z = 50.0;
    FieldSample f = prism_field(p, {0.0, 0.0, z});
    CHECK(f.bz == doctest::Approx(2.0 * pref / (z * z * z)).epsilon(1e-3));
    // Equatorial far field: -m/r^3 with the opposite sign.
    FieldSample e = prism_field(p, {z, 0.0, 0.0});
    CHECK(e.bz == doctest::Approx(-pref / (z * z * z)).epsilon(1e-3));
    CHECK(std::abs(e.bx) < 1e-12);
}

TEST_CASE("wide thin slab: flux density nearly cancels and crosses the face smoothly") {
    Prism slab;
    slab.center = {0.0, 0.0, 0.0};
    slab.half_extents = {500.0, 500.0, 0.5};
    slab.magnetization_sign = +1;
    slab.magnetization_magnitude = 1500.0;
    // The closed form carries the flux density B: for a wide thin slab the two
    // charge sheets cancel almost everywhere, inside as well as outside, and
    // the normal component is continuous across the magnetized surface.
    FieldSample inside = prism_field(slab, {0.0, 0.0, 0.0});
    FieldSample above = prism_field(slab, {0.0, 0.0, 1.0});
    CHECK(std::abs(inside.bz) < 5.0);
    CHECK(std::abs(above.bz) < 5.0);
    CHECK(inside.bz == doctest::Approx(above.bz).epsilon(1e-3));
}

TEST_CASE("prism field symmetries and linearity") {
    Prism p = unit_prism();
    const Vec3 q{0.8, 0.3, 1.4};
    FieldSample f = prism_field(p, q);
    FieldSample mx = prism_field(p, {-q.x, q.y, q.z});
    CHECK(mx.bx == doctest::Approx(-f.bx).epsilon(1e-12));
    CHECK(mx.by == doctest::Approx(f.by).epsilon(1e-12));
    CHECK(mx.bz == doctest::Approx(f.bz).epsilon(1e-12));

    Prism neg = p;
    neg.magnetization_sign = -1;
    FieldSample g = prism_field(neg, q);
    CHECK(g.bx == doctest::Approx(-f.bx).epsilon(1e-14));
    CHECK(g.bz == doctest::Approx(-f.bz).epsilon(1e-14));

    Prism twice = p;
    twice.magnetization_magnitude *= 2.0;
    CHECK(prism_field(twice, q).bz == doctest::Approx(2.0 * f.bz).epsilon(1e-14));

    Prism moved = p;
    moved.center = {10.0, -20.0, 5.0};
    FieldSample h = prism_field(moved, {q.x + 10.0, q.y - 20.0, q.z + 5.0});
    CHECK(h.bx == doctest::Approx(f.bx).epsilon(1e-9));
    CHECK(h.bz == doctest::Approx(f.bz).epsilon(1e-9));
}

TEST_CASE("chip field obeys Maxwell in free space") {
    PrismSet set = build_prisms(reference_spec());
    VectorField F = vector_of(set);
    const Vec3 probes[] = {{0.3, -0.2, 2.8}, {0.9, 0.4, 3.5}, {-1.3, 0.7, 2.5},
                           {5.1, 5.2, 3.0}};
    for (const Vec3& q : probes) {
        CHECK(std::abs(divergence(F, q, 2e-3)) < 1e-6);
        CHECK(curl_norm(F, q, 2e-3) < 1e-6);
    }
}

TEST_CASE("whole chip matches its net dipole moment far away") {
    PrismSet set = build_prisms(reference_spec());
    const double pref = dipole_prefactor(set);
    CHECK(pref > 0.0); // holes remove less moment than the slab carries
    const double z = 50.0 * 24.0; // 50 chip sides
    FieldSample f = field_at(set, {0.0, 0.0, z});
    CHECK(f.bz == doctest::Approx(2.0 * pref / (z * z * z)).epsilon(5e-3));
}

TEST_CASE("uniform bias adds exactly") {
    PrismSet set = build_prisms(reference_spec());
    PrismSet biased = set;
    biased.bias = {1.0, 2.0, 3.0};
    const Vec3 q{0.4, -0.6, 2.9};
    FieldSample f = field_at(set, q);
    FieldSample g = field_at(biased, q);
    CHECK(g.bx == doctest::Approx(f.bx + 1.0).epsilon(1e-10));
    CHECK(g.by == doctest::Approx(f.by + 2.0).epsilon(1e-10));
    CHECK(g.bz == doctest::Approx(f.bz + 3.0).epsilon(1e-10));
}

TEST_CASE("chip field has the lattice mirror symmetry") {
    PrismSet set = build_prisms(reference_spec());
    const Vec3 q{0.7, 1.3, 2.6};
    FieldSample f = field_at(set, q);
    FieldSample m = field_at(set, {-q.x, q.y, q.z});
    CHECK(m.magnitude == doctest::Approx(f.magnitude).epsilon(1e-9));
    FieldSample sw = field_at(set, {q.y, q.x, q.z});
    CHECK(sw.magnitude == doctest::Approx(f.magnitude).epsilon(1e-9));
}

TEST_CASE("batched line kernel agrees with pointwise evaluation") {
    PrismSet set = build_prisms(reference_spec());
    std::vector<double> zs;
    for (int k = 0; k < 100; ++k) zs.push_back(2.1 + 0.05 * k);

    auto exact = field_line_z(set, 0.4, -0.7, zs); // fully exact path
    for (std::size_t k = 0; k < zs.size(); ++k) {
        FieldSample f = field_at(set, {0.4, -0.7, zs[k]});
        CHECK(exact[k].bx == doctest::Approx(f.bx).epsilon(1e-10));
        CHECK(exact[k].by == doctest::Approx(f.by).epsilon(1e-10));
        CHECK(exact[k].bz == doctest::Approx(f.bz).epsilon(1e-10));
    }

    LineOptions far;
    far.far_split_radius = 6.0;
    auto split = field_line_z(set, 0.4, -0.7, zs, far);
    for (std::size_t k = 0; k < zs.size(); ++k) {
        CHECK(std::abs(split[k].bx - exact[k].bx) < 1e-6);
        CHECK(std::abs(split[k].by - exact[k].by) < 1e-6);
        CHECK(std::abs(split[k].bz - exact[k].bz) < 1e-6);
    }
}

TEST_CASE("grid evaluation: determinism, single point, validation") {
    PrismSet set = build_prisms(reference_spec());
    std::vector<double> xs{-1.0, 0.0, 1.0}, ys{-0.5, 0.5}, zs{2.2, 2.7, 3.2, 3.7};

    FieldGrid g1 = field_grid(set, xs, ys, zs, 1);
    FieldGrid g3 = field_grid(set, xs, ys, zs, 3);
    REQUIRE(g1.values.size() == g3.values.size());
    for (std::size_t k = 0; k < g1.values.size(); ++k)
        CHECK(g1.values[k].bz == g3.values[k].bz); // bit-identical across threads

    FieldGrid one = field_grid(set, {0.4}, {-0.7}, {2.9}, 1);
    FieldSample f = field_at(set, {0.4, -0.7, 2.9});
    CHECK(one.values[0].bz == doctest::Approx(f.bz).epsilon(1e-12));

    CHECK_THROWS_AS(field_grid(set, {1.0, 0.0}, ys, zs, 1), ConfigError);
    CHECK_THROWS_AS(field_grid(set, {}, ys, zs, 1), ConfigError);
}

TEST_CASE("analytic grid carrier matches the series") {
    AnalyticParams p = derive_params(reference_spec());
    FieldGrid g = field_grid_analytic(p, {0.25}, {0.1}, {2.4});
    FieldSample f = field_truncated({0.25, 0.1, 2.4}, p);
    CHECK(g.values[0].bx == doctest::Approx(f.bx).epsilon(1e-14));
    CHECK(g.model_tag == "analytic");
}
