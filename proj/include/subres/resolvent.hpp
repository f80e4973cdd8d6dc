#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subres/common.hpp"
#include "subres/operator.hpp"
#include "subres/potential.hpp"

namespace subres {

/// Region |z| >= K T + M h, Re z <= A h^{2/3} (|z| - T)^{1/3}.
struct RegionParams {
    double t = 0.0;
    double k = 2.0;
    double a = 0.1;
    double m = 10.0;

    void validate() const;
    bool operator==(const RegionParams&) const = default;
};

bool in_region(cplx z, double h, const RegionParams& rp);

struct Probe {
    cplx z;
    double h = 0.0;
    double sigma_min = 0.0;
    double resolvent_norm = 0.0;
    SigmaMethod method = SigmaMethod::dense_svd;
    bool converged = false;
    bool in_region = false;
    /// Set when the probe failed; sigma_min is then NaN.
    std::string error;
};

const char* method_name(SigmaMethod m);

Probe sigma_min(const DiscreteOperator& op, cplx z, SigmaMethod method = SigmaMethod::automatic);

/// Elementwise sigma_min, order preserved. Failures are recorded per probe.
std::vector<Probe> sweep(const DiscreteOperator& op, const std::vector<cplx>& z_list, int jobs = 1,
                         const std::optional<RegionParams>& rp = std::nullopt);

struct ScalingFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    /// (log input, log output).
    std::vector<std::pair<double, double>> points;
};

/// Least-squares line through (log x, log y). Needs >= 4 points with distinct x.
ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

/// Box and resolution policy for probes at (h, z).
/// L = max(l_min, l_scale sqrt|z| + l_offset); N is the smallest power of two with
/// N >= max(n_min, 4 L kappa / h), kappa = max(kappa_min, sqrt(max(Re z, 0)) + kappa_margin (h Lz)^{1/3}),
/// Lz = max |V2'| over box samples where |V| <= |z| + 1.
struct GridPolicy {
    double l_min = 3.0;
    double l_scale = 1.0;
    double l_offset = 2.0;
    int n_min = 32;
    double kappa_min = 0.5;
    double kappa_margin = 2.0;
    int max_refinements = 2;

    bool operator==(const GridPolicy&) const = default;
};

GridSpec choose_grid(const Potential& p, double h, cplx z, const GridPolicy& policy);

struct FitPoint {
    double h = 0.0;
    cplx z;
    Probe probe;
    TruncationReport truncation;
    int refinements = 0;
    /// Included in the fit (truncation converged and probe converged).
    bool used = false;
};

struct ScalingExperiment {
    ScalingFit fit;
    std::vector<FitPoint> points;
    /// z scans only: C = resolvent_norm h^{2/3} (|z| - T)^{1/3} at the first point.
    double frozen_c = 0.0;
    /// max over used points of C_probe / frozen_c - 1.
    double max_excess = 0.0;
};

/// Probe at one (h, z) with truncation refinement per the policy.
FitPoint converged_probe(const Potential& p, double h, cplx z, const GridPolicy& policy);

/// Slope of log sigma_min against log h.
ScalingExperiment fit_h_scaling(const Potential& p, cplx z, const std::vector<double>& h_list,
                                const RegionParams& rp, const GridPolicy& policy, int jobs = 1);

/// Slope of log resolvent_norm against log(s - T) for z = i s, with the frozen-C check.
ScalingExperiment fit_z_scaling(const Potential& p, double h, const std::vector<double>& s_list,
                                const RegionParams& rp, const GridPolicy& policy, int jobs = 1);

struct RegionBoundary {
    std::vector<cplx> upper;
    std::vector<cplx> lower;
};

/// Re z = A h^{2/3} (|z| - T)^{1/3} traced over |z| in [max(r_min, KT+Mh), r_max],
/// geometric spacing, with the |z| = KT + Mh endpoint always included when in range.
RegionBoundary region_boundary(const RegionParams& rp, double h, double r_min, double r_max,
                               int samples);

}  // namespace subres
