#include "subres/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subres/parallel.hpp"

namespace subres {

void RegionParams::validate() const
{
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("T must be nonnegative");
    if (!(k > 1.0) || !std::isfinite(k)) throw DomainError("K must exceed 1");
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("A must be positive");
    if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("M must be positive");
}

bool in_region(cplx z, double h, const RegionParams& rp)
{
    const double r = std::abs(z);
    if (r < rp.k * rp.t + rp.m * h) return false;
    return z.real() <= rp.a * std::cbrt(h * h) * std::cbrt(r - rp.t);
}

const char* method_name(SigmaMethod m)
{
    switch (m) {
    case SigmaMethod::dense_svd: return "dense-svd";
    case SigmaMethod::inverse_iteration: return "inverse-iteration";
    case SigmaMethod::automatic: return "automatic";
    }
    return "unknown";
}

Probe sigma_min(const DiscreteOperator& op, cplx z, SigmaMethod method)
{
    const ShiftedSigma s = shifted_sigma_min(op, z, method);
    Probe p;
    p.z = z;
    p.h = op.h();
    p.method = s.method;
    p.converged = s.converged;
    p.sigma_min = s.sigma;
    p.resolvent_norm = s.sigma > 0.0 ? 1.0 / s.sigma : std::numeric_limits<double>::infinity();
    return p;
}

std::vector<Probe> sweep(const DiscreteOperator& op, const std::vector<cplx>& z_list, int jobs,
                         const std::optional<RegionParams>& rp)
{
    std::vector<Probe> out(z_list.size());
    parallel_for(z_list.size(), jobs, [&](std::size_t i) {
        try {
            out[i] = sigma_min(op, z_list[i]);
        } catch (const std::exception& e) {
            out[i] = Probe{};
            out[i].z = z_list[i];
            out[i].h = op.h();
            out[i].sigma_min = std::numeric_limits<double>::quiet_NaN();
            out[i].resolvent_norm = std::numeric_limits<double>::quiet_NaN();
            out[i].error = e.what();
        }
        if (rp) out[i].in_region = in_region(z_list[i], op.h(), *rp);
    });
    return out;
}

ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size()) throw FitError("input and output lists differ in length");
    if (x.size() < 4) throw FitError("need at least 4 points, got " + std::to_string(x.size()));
    ScalingFit fit;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw FitError("power-law fit needs positive finite values");
        fit.points.emplace_back(std::log(x[i]), std::log(y[i]));
    }
    const double n = static_cast<double>(fit.points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [lx, ly] : fit.points) {
        mx += lx;
        my += ly;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [lx, ly] : fit.points) {
        sxx += (lx - mx) * (lx - mx);
        sxy += (lx - mx) * (ly - my);
        syy += (ly - my) * (ly - my);
    }
    if (sxx <= 1e-24 * n) throw FitError("input values are all equal");
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    double ss_res = 0.0;
    for (const auto& [lx, ly] : fit.points) {
        const double e = ly - (fit.intercept + fit.exponent * lx);
        ss_res += e * e;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return fit;
}

GridSpec choose_grid(const Potential& p, double h, cplx z, const GridPolicy& policy)
{
    if (!(h > 0.0)) throw DomainError("h must be positive");
    const int n = p.dim();
    GridSpec g;
    g.dim = n;
    g.half_width = std::max(policy.l_min, policy.l_scale * std::sqrt(std::abs(z)) + policy.l_offset);

    // Largest |V2'| on the part of the box where the classical energy can reach |z|.
    const int samples = n == 1 ? 513 : 65;
    double lz = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    while (true) {
        Vec x(n);
        for (int d = 0; d < n; ++d)
            x[d] = -g.half_width + 2.0 * g.half_width * idx[static_cast<std::size_t>(d)] / (samples - 1);
        if (std::abs(p.value(x)) <= std::abs(z) + 1.0) lz = std::max(lz, p.grad_v2(x).norm());
        int d = n - 1;
        while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == samples) {
            idx[static_cast<std::size_t>(d)] = 0;
            --d;
        }
        if (d < 0) break;
    }
    const double kappa = std::max(policy.kappa_min, std::sqrt(std::max(z.real(), 0.0)) +
                                                        policy.kappa_margin * std::cbrt(h * lz));
    const double needed = std::max<double>(policy.n_min, 4.0 * g.half_width * kappa / h);
    int pts = 32;
    while (pts < needed) pts *= 2;
    g.points_per_dim = pts;
    return g;
}

FitPoint converged_probe(const Potential& p, double h, cplx z, const GridPolicy& policy)
{
    FitPoint fp;
    fp.h = h;
    fp.z = z;
    GridSpec grid = choose_grid(p, h, z, policy);
    for (int r = 0; r <= policy.max_refinements; ++r) {
        GridSpec doubled = grid;
        doubled.points_per_dim *= 2;
        if (doubled.total_points() > kDenseCap) {
            fp.probe.error = "refinement needs " + std::to_string(doubled.total_points()) +
                             " unknowns, above the dense cap";
            break;
        }
        fp.refinements = r;
        fp.probe = sigma_min(DiscreteOperator(p, grid, h), z);
        fp.truncation = truncation_report(p, grid, h, z, fp.probe.sigma_min);
        if (fp.truncation.converged) {
            fp.used = fp.probe.converged;
            return fp;
        }
        const bool grow_box = fp.truncation.drift_box > kTruncationTolerance;
        const bool grow_res = fp.truncation.drift_res > kTruncationTolerance;
        if (grow_box) {
            grid.half_width *= 2;
            grid.points_per_dim *= 2;
        }
        if (grow_res) grid.points_per_dim *= 2;
    }
    return fp;
}

namespace {

void require_region(const std::vector<std::pair<double, cplx>>& probes, const RegionParams& rp)
{
    rp.validate();
    for (const auto& [h, z] : probes)
        if (!in_region(z, h, rp))
            throw DomainError("z = (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) +
                              ") lies outside the region at h = " + std::to_string(h));
}

}  // namespace

ScalingExperiment fit_h_scaling(const Potential& p, cplx z, const std::vector<double>& h_list,
                                const RegionParams& rp, const GridPolicy& policy, int jobs)
{
    if (h_list.size() < 5) throw FitError("h scaling needs at least 5 values of h");
    std::vector<std::pair<double, cplx>> probes;
    for (double h : h_list) probes.emplace_back(h, z);
    require_region(probes, rp);

    ScalingExperiment ex;
    ex.points.resize(h_list.size());
    parallel_for(h_list.size(), jobs,
                 [&](std::size_t i) { ex.points[i] = converged_probe(p, h_list[i], z, policy); });
    std::vector<double> xs, ys;
    for (const FitPoint& fp : ex.points) {
        if (!fp.used) continue;
        xs.push_back(fp.h);
        ys.push_back(fp.probe.sigma_min);
    }
    ex.fit = fit_power_law(xs, ys);
    return ex;
}

ScalingExperiment fit_z_scaling(const Potential& p, double h, const std::vector<double>& s_list,
                                const RegionParams& rp, const GridPolicy& policy, int jobs)
{
    if (s_list.size() < 4) throw FitError("z scaling needs at least 4 values of s");
    std::vector<std::pair<double, cplx>> probes;
    for (double s : s_list) probes.emplace_back(h, cplx(0.0, s));
    require_region(probes, rp);

    ScalingExperiment ex;
    ex.points.resize(s_list.size());
    parallel_for(s_list.size(), jobs, [&](std::size_t i) {
        ex.points[i] = converged_probe(p, h, cplx(0.0, s_list[i]), policy);
    });
    std::vector<double> xs, ys;
    bool calibrated = false;
    for (const FitPoint& fp : ex.points) {
        if (!fp.used) continue;
        const double y = fp.z.imag() - rp.t;
        xs.push_back(y);
        ys.push_back(fp.probe.resolvent_norm);
        const double c = fp.probe.resolvent_norm * std::cbrt(h * h) * std::cbrt(y);
        if (!calibrated) {
            ex.frozen_c = c;
            calibrated = true;
        }
        ex.max_excess = std::max(ex.max_excess, c / ex.frozen_c - 1.0);
    }
    ex.fit = fit_power_law(xs, ys);
    return ex;
}

RegionBoundary region_boundary(const RegionParams& rp, double h, double r_min, double r_max,
                               int samples)
{
    rp.validate();
    if (samples < 2) throw DomainError("boundary needs at least 2 samples");
    const double r_edge = rp.k * rp.t + rp.m * h;
    const double lo = std::max(r_min, r_edge);
    if (!(r_max > lo)) throw DomainError("|z| range lies below K T + M h");

    std::vector<double> radii;
    for (int i = 0; i < samples; ++i)
        radii.push_back(lo * std::pow(r_max / lo, static_cast<double>(i) / (samples - 1)));
    radii.front() = lo;
    radii.back() = r_max;

    RegionBoundary b;
    const double scale = rp.a * std::cbrt(h * h);
    for (double r : radii) {
        const double re = scale * std::cbrt(r - rp.t);
        if (std::abs(re) > r) continue;
        const double im = std::sqrt(r * r - re * re);
        b.upper.emplace_back(re, im);
        b.lower.emplace_back(re, -im);
    }
    return b;
}

}  // namespace subres
