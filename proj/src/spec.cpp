#include "maglat/spec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace maglat {

std::string to_string(WallCondition w) {
    switch (w) {
    case WallCondition::positive: return "positive";
    case WallCondition::negative: return "negative";
    case WallCondition::surface_equal: return "surface_equal";
    }
    return "?";
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid numeric value for key '" + key + "': '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    double v = parse_number(key, value);
    if (v != std::floor(v))
        throw ConfigError("key '" + key + "' must be an integer, got '" + value + "'");
    return static_cast<int>(v);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

LatticeSpec parse_spec(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        if (kv.count(key))
            throw ConfigError("duplicate key '" + key + "'");
        kv[key] = value;
    }

    static const char* known[] = {
        "blocks_m", "holes_n", "alpha_h_um", "alpha_s_um", "tau_btm_um",
        "tau_wall_um", "block_gap_um", "Mz_gauss",
        "bias_x_gauss", "bias_y_gauss", "bias_z_gauss",
    };
    for (const auto& [key, value] : kv) {
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return key == k; }) == std::end(known))
            throw ConfigError("unknown key '" + key + "'");
    }

    auto require = [&](const char* key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) throw ConfigError(std::string("missing required key '") + key + "'");
        return it->second;
    };
    auto optional_num = [&](const char* key, double dflt) {
        auto it = kv.find(key);
        return it == kv.end() ? dflt : parse_number(key, it->second);
    };

    LatticeSpec s;
    s.holes_n = parse_int("holes_n", require("holes_n"));
    s.hole_size_alpha_h = parse_number("alpha_h_um", require("alpha_h_um"));
    s.spacing_alpha_s = parse_number("alpha_s_um", require("alpha_s_um"));
    s.film_thickness_tau_btm = parse_number("tau_btm_um", require("tau_btm_um"));
    s.wall_thickness_tau_wall = parse_number("tau_wall_um", require("tau_wall_um"));
    s.remanence_Mz = parse_number("Mz_gauss", require("Mz_gauss"));
    s.blocks_m = kv.count("blocks_m") ? parse_int("blocks_m", kv["blocks_m"]) : 1;
    s.block_gap = optional_num("block_gap_um", s.spacing_alpha_s);
    s.bias.bx = optional_num("bias_x_gauss", 0.0);
    s.bias.by = optional_num("bias_y_gauss", 0.0);
    s.bias.bz = optional_num("bias_z_gauss", 0.0);

    validate_spec(s);
    return s;
}

LatticeSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spec file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
}

std::string render_spec(const LatticeSpec& s) {
    std::ostringstream out;
    out << "blocks_m = " << s.blocks_m << "\n"
        << "holes_n = " << s.holes_n << "\n"
        << "alpha_h_um = " << fmt(s.hole_size_alpha_h) << "\n"
        << "alpha_s_um = " << fmt(s.spacing_alpha_s) << "\n"
        << "tau_btm_um = " << fmt(s.film_thickness_tau_btm) << "\n"
        << "tau_wall_um = " << fmt(s.wall_thickness_tau_wall) << "\n"
        << "block_gap_um = " << fmt(s.block_gap) << "\n"
        << "Mz_gauss = " << fmt(s.remanence_Mz) << "\n"
        << "bias_x_gauss = " << fmt(s.bias.bx) << "\n"
        << "bias_y_gauss = " << fmt(s.bias.by) << "\n"
        << "bias_z_gauss = " << fmt(s.bias.bz) << "\n";
    return out.str();
}

void validate_spec(const LatticeSpec& s) {
    auto positive = [](const char* name, double v) {
        if (!(v > 0.0))
            throw ConfigError(std::string("non-positive length: ") + name + " = " + fmt(v));
    };
    positive("alpha_h_um", s.hole_size_alpha_h);
    positive("alpha_s_um", s.spacing_alpha_s);
    positive("tau_btm_um", s.film_thickness_tau_btm);
    positive("tau_wall_um", s.wall_thickness_tau_wall);
    positive("block_gap_um", s.block_gap);
    if (s.holes_n < 1) throw ConfigError("holes_n must be >= 1");
    if (s.blocks_m < 1) throw ConfigError("blocks_m must be >= 1");
    if (s.block_gap < s.spacing_alpha_s)
        throw ConfigError("block_gap_um must be >= alpha_s_um");
    if (!(s.remanence_Mz > 0.0)) throw ConfigError("Mz_gauss must be > 0");
    if (!std::isfinite(s.bias.bx) || !std::isfinite(s.bias.by) || !std::isfinite(s.bias.bz))
        throw ConfigError("bias components must be finite");
}

WallCondition classify_wall(const LatticeSpec& s) {
    if (s.wall_thickness_tau_wall > s.film_thickness_tau_btm) return WallCondition::positive;
    if (s.wall_thickness_tau_wall < s.film_thickness_tau_btm) return WallCondition::negative;
    return WallCondition::surface_equal;
}

std::uint64_t spec_hash(const LatticeSpec& spec) {
    std::string canon = render_spec(spec);
    std::uint64_t h = 14695981039346656037ull; // FNV-1a
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace maglat
