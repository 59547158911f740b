#include "maglat/spec.hpp"
#include "maglat/units.hpp"

#include <doctest.h>

#include <cmath>

using namespace maglat;

namespace {

const char* kReferenceDoc = R"(# reference 11x11 scenario
blocks_m = 1
holes_n = 11
alpha_h_um = 1
alpha_s_um = 1
tau_btm_um = 2
tau_wall_um = 1
block_gap_um = 1
Mz_gauss = 2000
)";

} // namespace

TEST_CASE("reference config parses with expected values") {
    LatticeSpec s = parse_spec(kReferenceDoc);
    CHECK(s.blocks_m == 1);
    CHECK(s.holes_n == 11);
    CHECK(s.hole_size_alpha_h == 1.0);
    CHECK(s.spacing_alpha_s == 1.0);
    CHECK(s.film_thickness_tau_btm == 2.0);
    CHECK(s.wall_thickness_tau_wall == 1.0);
    CHECK(s.block_gap == 1.0);
    CHECK(s.remanence_Mz == 2000.0);
    CHECK(s.bias.is_zero());
    CHECK(s.pitch() == 2.0);
    CHECK(s.block_side() == 22.0);
    CHECK(s.film_top() == 2.0);
}

TEST_CASE("optional keys take documented defaults") {
    LatticeSpec s = parse_spec("holes_n = 3\nalpha_h_um = 1\nalpha_s_um = 1.5\n"
                               "tau_btm_um = 1\ntau_wall_um = 1\nMz_gauss = 100\n");
    CHECK(s.blocks_m == 1);
    CHECK(s.block_gap == 1.5); // defaults to alpha_s
    CHECK(s.bias.is_zero());
}

TEST_CASE("parser rejects malformed documents") {
    const std::string base = "holes_n = 3\nalpha_h_um = 1\nalpha_s_um = 1\n"
                             "tau_btm_um = 1\ntau_wall_um = 1\nMz_gauss = 100\n";
    CHECK_THROWS_AS(parse_spec(base + "unknown_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_spec(base + "Mz_gauss = 200\n"), ConfigError); // duplicate
    CHECK_THROWS_AS(parse_spec("holes_n = 3\n"), ConfigError);          // missing keys
    CHECK_THROWS_AS(parse_spec(base + "bias_x_gauss = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_spec("holes_n = 2.5\nalpha_h_um = 1\nalpha_s_um = 1\n"
                               "tau_btm_um = 1\ntau_wall_um = 1\nMz_gauss = 100\n"),
                    ConfigError); // non-integer count
    CHECK_THROWS_AS(parse_spec("holes_n = 3\nalpha_h_um = -1\nalpha_s_um = 1\n"
                               "tau_btm_um = 1\ntau_wall_um = 1\nMz_gauss = 100\n"),
                    ConfigError); // negative length
    CHECK_THROWS_AS(parse_spec(base + "block_gap_um = 0.5\n"), ConfigError); // < alpha_s
    CHECK_THROWS_AS(parse_spec("holes_n = 3\nalpha_h_um = 1\nalpha_s_um = 1\n"
                               "tau_btm_um = 1\ntau_wall_um = 1\nMz_gauss = 0\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_spec("not a key value line\n"), ConfigError);
    CHECK_THROWS_AS(load_spec("/nonexistent/path/to/spec.cfg"), ConfigError);
}

TEST_CASE("wall condition trichotomy") {
    LatticeSpec s = parse_spec(kReferenceDoc);
    s.wall_thickness_tau_wall = 1.0; // < tau_btm
    CHECK(classify_wall(s) == WallCondition::negative);
    s.wall_thickness_tau_wall = 2.0;
    CHECK(classify_wall(s) == WallCondition::surface_equal);
    s.wall_thickness_tau_wall = 2.5;
    CHECK(classify_wall(s) == WallCondition::positive);
    CHECK(to_string(WallCondition::positive) == "positive");
    CHECK(to_string(WallCondition::negative) == "negative");
    CHECK(to_string(WallCondition::surface_equal) == "surface_equal");
}

TEST_CASE("render/parse round trip and stable hash") {
    LatticeSpec s = parse_spec(kReferenceDoc);
    s.bias = {1.25, -0.5, 3.0};
    LatticeSpec back = parse_spec(render_spec(s));
    CHECK(back == s);
    CHECK(spec_hash(back) == spec_hash(s));
    LatticeSpec other = s;
    other.remanence_Mz = 2001.0;
    CHECK(spec_hash(other) != spec_hash(s));
}

TEST_CASE("unit conversions and atom species") {
    CHECK(units::gauss_to_tesla * units::tesla_to_gauss == doctest::Approx(1.0));
    CHECK(units::um_to_m * units::m_to_um == doctest::Approx(1.0));
    CHECK(units::curvature_to_si == doctest::Approx(1e8)); // G/um^2 -> T/m^2
    const AtomSpecies atom = rb87();
    CHECK(atom.gF_mF() == doctest::Approx(1.0));
    CHECK(atom.is_low_field_seeker());
    AtomSpecies high_field = atom;
    high_field.mF = -2;
    CHECK_FALSE(high_field.is_low_field_seeker());
}
