#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "subres/operator.hpp"
#include "subres/potential.hpp"
#include "subres/resolvent.hpp"

namespace subres::cli {

using json = nlohmann::json;

struct PotentialSpec {
    /// "builtin", "quadratic" or "linear".
    std::string type = "builtin";
    std::string name = "ix2";
    std::vector<std::vector<std::complex<double>>> matrix;
    std::vector<std::complex<double>> coeffs;

    bool operator==(const PotentialSpec&) const = default;
};

Potential make_potential(const PotentialSpec& spec);

struct WindowSpec {
    /// "rect" (re/im ranges) or "polar" (log |z|, angle from the imaginary axis).
    std::string kind = "rect";
    double re_min = -1.0, re_max = 1.0, im_min = 0.1, im_max = 4.0;
    int re_steps = 0, im_steps = 0;
    double r_min = 0.5, r_max = 8.0;
    int r_steps = 0;
    /// Largest angle (radians) from the positive imaginary axis; symmetric about it.
    double angle_max = 0.5;
    int angle_steps = 0;

    bool operator==(const WindowSpec&) const = default;
    std::vector<cplx> points() const;
};

struct RunConfig {
    PotentialSpec potential;
    GridSpec grid{1, 8.0, 256};
    RegionParams region;
    GridPolicy grid_policy;
    std::vector<double> h_list{0.1, 0.03, 0.01};
    double h = 0.02;
    std::vector<cplx> z_list;
    std::optional<WindowSpec> window;
    std::vector<double> s_list{1, 2, 4, 8, 16, 32};
    cplx z{0.0, 1.0};
    std::vector<double> x0;
    std::vector<double> xi0;
    std::optional<std::vector<double>> box_lo;
    std::optional<std::vector<double>> box_hi;
    int samples_per_dim = 32;
    std::optional<double> t_candidate;
    std::optional<double> restricted_level;
    bool bisect_t = false;
    std::optional<double> epsilon;
    std::optional<double> c0;
    double wick_dy = 0.25;
    double wick_deta = 0.25;
    std::string output_dir = "out";
    std::uint64_t seed = 42;
    int jobs = 1;

    bool operator==(const RunConfig&) const = default;
};

/// Parses a config document. Unknown keys and non-finite numbers raise ConfigError.
RunConfig parse_config(const json& j);
RunConfig load_config(const std::string& path);
json to_json(const RunConfig& c);

/// Applies "a.b.c=value"; value is read as JSON when it parses, else as a string.
void apply_override(json& doc, const std::string& assignment);

/// FNV-1a 64 of the canonical (key-sorted, compact) serialization without jobs and
/// output_dir, as 16 hex digits.
std::string config_hash(const RunConfig& c);

}  // namespace subres::cli
