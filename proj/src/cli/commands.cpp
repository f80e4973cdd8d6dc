#include "subres/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>

#include <CLI11.hpp>

#include "subres/cli/output.hpp"
#include "subres/linalg.hpp"
#include "subres/operator.hpp"
#include "subres/parallel.hpp"
#include "subres/quasimode.hpp"
#include "subres/resolvent.hpp"
#include "subres/symbol_calculus.hpp"
#include "subres/wick.hpp"

namespace subres::cli {

namespace {

namespace fs = std::filesystem;

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

json grid_json(const GridSpec& g)
{
    return {{"dim", g.dim}, {"half_width", g.half_width}, {"points_per_dim", g.points_per_dim}};
}

json phase_point_json(const PhasePoint& X)
{
    if (X.x.size() == 0) return nullptr;
    return {{"x", vec_json(X.x)}, {"xi", vec_json(X.xi)}};
}

json probe_json(const Probe& p)
{
    json j{{"z", cplx_json(p.z)},
           {"h", p.h},
           {"sigma_min", p.sigma_min},
           {"resolvent_norm", p.resolvent_norm},
           {"method", method_name(p.method)},
           {"converged", p.converged},
           {"in_region", p.in_region}};
    if (!p.error.empty()) j["error"] = p.error;
    return j;
}

json truncation_json(const TruncationReport& t)
{
    return {{"grid", grid_json(t.grid)},   {"sigma_base", t.sigma_base}, {"sigma_box", t.sigma_box},
            {"sigma_res", t.sigma_res},    {"drift_box", t.drift_box},   {"drift_res", t.drift_res},
            {"converged", t.converged},    {"tolerance", kTruncationTolerance}};
}

json fit_json(const ScalingFit& f)
{
    json pts = json::array();
    for (const auto& [x, y] : f.points) pts.push_back(json::array({x, y}));
    return {{"exponent", f.exponent}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"points", pts}};
}

json experiment_points_json(const ScalingExperiment& e)
{
    json pts = json::array();
    for (const FitPoint& fp : e.points)
        pts.push_back({{"h", fp.h},
                       {"z", cplx_json(fp.z)},
                       {"probe", probe_json(fp.probe)},
                       {"truncation", truncation_json(fp.truncation)},
                       {"refinements", fp.refinements},
                       {"used", fp.used}});
    return pts;
}

Potential potential_of(const RunConfig& c)
{
    try {
        return make_potential(c.potential);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid potential: ") + e.what());
    }
}

Box box_of(const RunConfig& c, int dim, double default_half)
{
    if (!c.box_lo && !c.box_hi) return Box::cube(dim, -default_half, default_half);
    if (!c.box_lo || !c.box_hi) throw ConfigError("admissibility.box_lo and box_hi must be given together");
    if (static_cast<int>(c.box_lo->size()) != dim || static_cast<int>(c.box_hi->size()) != dim)
        throw ConfigError("box dimension does not match the potential");
    Box b{Vec(dim), Vec(dim)};
    for (int i = 0; i < dim; ++i) {
        b.lo[i] = (*c.box_lo)[static_cast<std::size_t>(i)];
        b.hi[i] = (*c.box_hi)[static_cast<std::size_t>(i)];
        if (!(b.hi[i] > b.lo[i])) throw ConfigError("box_hi must exceed box_lo");
    }
    return b;
}

GridSpec grid_of(const RunConfig& c, const Potential& p)
{
    if (c.grid.dim != p.dim()) throw ConfigError("grid.dim does not match the potential dimension");
    try {
        c.grid.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid grid: ") + e.what());
    }
    return c.grid;
}

void check_region(const RegionParams& rp)
{
    try {
        rp.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid region: ") + e.what());
    }
}

Vec phase_vector(const std::vector<double>& v, int dim, const char* what)
{
    if (v.empty()) return Vec::Ones(dim);
    if (static_cast<int>(v.size()) != dim)
        throw ConfigError(std::string(what) + " dimension does not match the potential");
    return Eigen::Map<const Vec>(v.data(), dim);
}

std::string out_path(const RunConfig& c, const std::string& file) { return (fs::path(c.output_dir) / file).string(); }

// ---------------------------------------------------------------------------

json admissibility_json(const AdmissibilityReport& r)
{
    json j{{"t_value", r.t_value},
           {"c_vv", r.c_vv},
           {"hess_bound", r.hess_bound},
           {"v1_min", r.v1_min},
           {"growth_ratio", r.growth_ratio},
           {"hess_growth_ratio", r.hess_growth_ratio},
           {"growth_limit", kGrowthLimit},
           {"degenerate_points", r.degenerate_points},
           {"samples_per_dim", r.samples_per_dim},
           {"points_scanned", r.points_scanned},
           {"pass",
            {{"v1_nonnegative", r.pass.v1_nonnegative},
             {"vv_prime_t", r.pass.vv_prime_t},
             {"hessian_bounded", r.pass.hessian_bounded},
             {"all", r.pass.all()}}}};
    j["restricted_level"] = r.restricted_level ? json(*r.restricted_level) : json(nullptr);
    j["worst_point"] = r.worst_point ? vec_json(*r.worst_point) : json(nullptr);
    return j;
}

int cmd_check_potential(const RunConfig& c, std::ostream& out)
{
    const Potential p = potential_of(c);
    const Box box = box_of(c, p.dim(), 6.0);
    if (c.samples_per_dim < 16) throw ConfigError("admissibility.samples_per_dim must be at least 16");
    const double t = c.t_candidate.value_or(p.t_metadata());
    if (!(t >= 0.0)) throw ConfigError("admissibility.t_candidate must be nonnegative");
    const AdmissibilityReport report = check_admissibility(p, box, c.samples_per_dim, t, c.restricted_level);

    json doc = metadata("check-potential", c);
    doc["potential"] = p.name();
    doc["box"] = {{"lo", vec_json(box.lo)}, {"hi", vec_json(box.hi)}};
    doc["report"] = admissibility_json(report);

    // Discrete accretivity on a modest periodic grid.
    const GridSpec ag{p.dim(), 6.0, p.dim() == 1 ? 256 : 32};
    if (report.pass.v1_nonnegative) {
        const DiscreteOperator op(p, ag, 0.1);
        doc["accretivity"] = {{"grid", grid_json(ag)}, {"h", 0.1}, {"trials", 100},
                              {"min_ratio", accretivity_defect(op, 100, c.seed)}};
    } else {
        doc["accretivity"] = nullptr;
    }

    if (c.bisect_t) {
        const auto tb = bisect_t(p, box, c.samples_per_dim, std::max(64.0, 4.0 * t), c.restricted_level);
        doc["bisected_t"] = tb ? json(*tb) : json(nullptr);
    }

    write_json(out_path(c, "admissibility.json"), doc);
    const bool ok = report.pass.all();
    out << "check-potential " << p.name() << " T=" << fmt(t) << ": " << (ok ? "pass" : "fail")
        << " (v1_nonnegative=" << report.pass.v1_nonnegative << " vv_prime_t=" << report.pass.vv_prime_t
        << " hessian_bounded=" << report.pass.hessian_bounded << ")\n";
    return ok ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------

json certificate_json(const WeightCertificate& w)
{
    json per_h = json::array();
    for (const PerHSummary& s : w.per_h)
        per_h.push_back({{"h", s.h},
                         {"c_min", s.c_min},
                         {"c_lemma", s.c_lemma},
                         {"max_abs_g", s.max_abs_g},
                         {"max_scaled_grad_g", s.max_scaled_grad_g},
                         {"worst", phase_point_json(s.worst)}});
    const PhaseGridInfo& g = w.grid;
    return {{"epsilon", w.epsilon},
            {"c0", w.c0},
            {"c_lower", w.c_lower},
            {"c_lemma", w.c_lemma},
            {"h_list", w.h_list},
            {"grid",
             {{"kind", g.kind},
              {"size", g.size},
              {"centers", g.centers},
              {"shells", g.shells},
              {"directions", g.directions},
              {"radius_min", g.radius_min},
              {"radius_max", g.radius_max},
              {"rect_samples", g.rect_samples},
              {"xi_extent", g.xi_extent}}},
            {"max_abs_g", w.max_abs_g},
            {"max_scaled_grad_g", w.max_scaled_grad_g},
            {"grad_spread", w.grad_spread},
            {"uniformity", w.uniformity},
            {"worst", phase_point_json(w.worst)},
            {"worst_h", w.worst_h},
            {"per_h", per_h},
            {"pass", w.pass},
            {"h0", w.h0 ? json(*w.h0) : json(nullptr)}};
}

int cmd_verify_weight(const RunConfig& c, std::ostream& out)
{
    const Potential p = potential_of(c);
    const Box box = box_of(c, p.dim(), 4.0);
    if (c.h_list.empty()) throw ConfigError("h_list must not be empty");
    for (double h : c.h_list)
        if (!(h > 0.0)) throw ConfigError("h_list entries must be positive");
    if (c.epsilon.has_value() != c.c0.has_value())
        throw ConfigError("weights.epsilon and weights.c0 must be given together");

    const double h_min = *std::min_element(c.h_list.begin(), c.h_list.end());
    const PhaseGrid grid = shell_phase_grid(p, box, h_min);

    json doc = metadata("verify-weight", c);
    doc["potential"] = p.name();
    WeightCertificate cert;
    if (c.epsilon) {
        if (!(*c.epsilon >= 0.0) || !(*c.c0 >= 0.0)) throw ConfigError("weights must be nonnegative");
        cert = certify_subellipticity(p, grid, c.h_list, *c.epsilon, *c.c0, c.jobs);
        doc["calibrated"] = false;
    } else {
        const CalibrationResult cal = calibrate_weights(p, grid, c.h_list, c.jobs);
        cert = cal.certificate;
        doc["calibrated"] = true;
        doc["candidates_tried"] = cal.candidates_tried;
    }
    doc["certificate"] = certificate_json(cert);
    write_json(out_path(c, "weight_certificate.json"), doc);

    out << "verify-weight " << p.name() << ": " << (cert.pass ? "pass" : "fail") << " epsilon=" << fmt(cert.epsilon)
        << " c0=" << fmt(cert.c0) << " c_lower=" << fmt(cert.c_lower) << " c_lemma=" << fmt(cert.c_lemma)
        << " max|g|=" << fmt(cert.max_abs_g) << " grid=" << cert.grid.size << "\n";
    return cert.pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------

PlotFrame frame_around(const std::vector<cplx>& zs, double pad_re, double pad_im)
{
    PlotFrame f{zs[0].real(), zs[0].real(), zs[0].imag(), zs[0].imag()};
    for (cplx z : zs) {
        f.re_min = std::min(f.re_min, z.real());
        f.re_max = std::max(f.re_max, z.real());
        f.im_min = std::min(f.im_min, z.imag());
        f.im_max = std::max(f.im_max, z.imag());
    }
    f.re_min -= pad_re;
    f.re_max += pad_re;
    f.im_min -= pad_im;
    f.im_max += pad_im;
    if (!(f.re_max > f.re_min)) f.re_min -= 1.0, f.re_max += 1.0;
    if (!(f.im_max > f.im_min)) f.im_min -= 1.0, f.im_max += 1.0;
    return f;
}

int cmd_sweep(const RunConfig& c, std::ostream& out)
{
    const Potential p = potential_of(c);
    const GridSpec grid = grid_of(c, p);
    check_region(c.region);
    if (!(c.h > 0.0)) throw ConfigError("h must be positive");

    std::vector<cplx> zs = c.z_list;
    int cells_re = 0, cells_im = 0;
    if (zs.empty() && c.window) {
        zs = c.window->points();
        if (c.window->kind == "rect") {
            cells_re = c.window->re_steps;
            cells_im = c.window->im_steps;
        }
    }
    if (zs.empty()) throw ConfigError("empty z window: give z_list or a window with positive step counts");

    const DiscreteOperator op(p, grid, c.h);
    const std::vector<Probe> probes = sweep(op, zs, c.jobs, c.region);

    double pad_re = 0.05, pad_im = 0.05;
    if (cells_re > 1) pad_re = 0.5 * (c.window->re_max - c.window->re_min) / (cells_re - 1);
    if (cells_im > 1) pad_im = 0.5 * (c.window->im_max - c.window->im_min) / (cells_im - 1);
    const PlotFrame frame = frame_around(zs, pad_re, pad_im);
    double r_max = 0.0;
    for (cplx z : zs) r_max = std::max(r_max, std::abs(z));
    r_max = std::max(r_max, std::hypot(std::max(std::abs(frame.re_min), std::abs(frame.re_max)),
                                       std::max(std::abs(frame.im_min), std::abs(frame.im_max))));
    const RegionBoundary boundary = region_boundary(c.region, c.h, 0.0, r_max, 200);

    const json meta = metadata("sweep", c);
    write_csv(out_path(c, "sweep.csv"), meta, kSweepHeader, sweep_rows(probes));

    json doc = meta;
    doc["potential"] = p.name();
    doc["grid"] = grid_json(grid);
    json pj = json::array();
    int failed = 0;
    for (const Probe& pr : probes) {
        pj.push_back(probe_json(pr));
        if (!pr.error.empty()) ++failed;
    }
    doc["probes"] = pj;
    doc["failed_probes"] = failed;
    json up = json::array(), lo = json::array();
    for (cplx z : boundary.upper) up.push_back(cplx_json(z));
    for (cplx z : boundary.lower) lo.push_back(cplx_json(z));
    doc["region_boundary"] = {{"upper", up}, {"lower", lo}};
    write_json(out_path(c, "sweep.json"), doc);
    write_text(out_path(c, "sweep.svg"), sweep_svg(probes, boundary, frame, cells_re, cells_im, meta));

    out << "sweep " << p.name() << ": " << probes.size() << " probes, " << failed << " failed\n";
    return kExitPass;
}

// ---------------------------------------------------------------------------

int cmd_fit_h(const RunConfig& c, std::ostream& out)
{
    const Potential p = potential_of(c);
    check_region(c.region);
    const ScalingExperiment e = fit_h_scaling(p, c.z, c.h_list, c.region, c.grid_policy, c.jobs);

    json doc = metadata("fit-h", c);
    doc["potential"] = p.name();
    doc["z"] = cplx_json(c.z);
    doc["fit"] = fit_json(e.fit);
    doc["points"] = experiment_points_json(e);
    write_json(out_path(c, "fit_h.json"), doc);

    out << "fit-h " << p.name() << ": exponent=" << fmt(e.fit.exponent) << " r2=" << fmt(e.fit.r_squared) << "\n";
    return kExitPass;
}

int cmd_fit_z(const RunConfig& c, std::ostream& out)
{
    const Potential p = potential_of(c);
    check_region(c.region);
    const ScalingExperiment e = fit_z_scaling(p, c.h, c.s_list, c.region, c.grid_policy, c.jobs);

    json doc = metadata("fit-z", c);
    doc["potential"] = p.name();
    doc["h"] = c.h;
    doc["fit"] = fit_json(e.fit);
    doc["points"] = experiment_points_json(e);
    // C is fitted once at the first usable point and then frozen.
    doc["frozen_c"] = e.frozen_c;
    doc["max_excess"] = e.max_excess;
    doc["excess_limit"] = 0.05;
    doc["bound_ok"] = e.max_excess <= 0.05;
    write_json(out_path(c, "fit_z.json"), doc);

    out << "fit-z " << p.name() << ": exponent=" << fmt(e.fit.exponent) << " r2=" << fmt(e.fit.r_squared)
        << " frozen_c=" << fmt(e.frozen_c) << " max_excess=" << fmt(e.max_excess) << "\n";
    return kExitPass;
}

// ---------------------------------------------------------------------------

int cmd_quasimode(const RunConfig& c, std::ostream& out)
{
    const Potential p = potential_of(c);
    check_region(c.region);
    const Vec x0 = phase_vector(c.x0, p.dim(), "x0");
    const Vec xi0 = phase_vector(c.xi0, p.dim(), "xi0");
    if (c.h_list.empty()) throw ConfigError("h_list must not be empty");

    std::vector<InteriorContrast> runs(c.h_list.size());
    std::vector<QuasimodeSpec> specs;
    for (double h : c.h_list) {
        if (!(h > 0.0)) throw ConfigError("h_list entries must be positive");
        specs.push_back(make_quasimode_spec(p, x0, xi0, h));
    }
    parallel_for(runs.size(), c.jobs,
                 [&](std::size_t i) { runs[i] = interior_contrast(p, specs[i], c.region, c.grid_policy); });

    json doc = metadata("quasimode", c);
    doc["potential"] = p.name();
    doc["x0"] = vec_json(x0);
    doc["xi0"] = vec_json(xi0);
    doc["nondegeneracy"] = specs.front().nondegeneracy;
    doc["nondegenerate"] = specs.front().nondegenerate;
    json rows = json::array();
    bool witness = true;
    std::vector<double> hs, residuals;
    for (const InteriorContrast& r : runs) {
        json row{{"h", r.h},
                 {"z_interior", cplx_json(r.z_interior)},
                 {"z_boundary", cplx_json(r.z_boundary)},
                 {"grid", grid_json(r.grid)},
                 {"residual", r.residual},
                 {"sigma_min_interior", r.sigma_interior},
                 {"sigma_min_boundary", r.sigma_boundary},
                 {"ratio", r.ratio},
                 {"witness_ok", r.witness_ok},
                 {"truncation_converged", r.truncation_converged}};
        row["boundary_truncation"] = r.boundary_truncation ? truncation_json(*r.boundary_truncation) : json(nullptr);
        rows.push_back(row);
        witness = witness && r.witness_ok;
        hs.push_back(r.h);
        residuals.push_back(r.residual);
    }
    doc["runs"] = rows;
    doc["witness_ok"] = witness;
    try {
        doc["residual_fit"] = fit_json(fit_power_law(hs, residuals));
    } catch (const FitError&) {
        doc["residual_fit"] = nullptr;
    }
    write_json(out_path(c, "quasimode.json"), doc);

    out << "quasimode " << p.name() << ": " << runs.size() << " runs, witness " << (witness ? "holds" : "violated");
    if (!doc["residual_fit"].is_null()) out << ", residual exponent=" << fmt(doc["residual_fit"]["exponent"].get<double>());
    out << "\n";
    return witness ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;

    bool pass() const { return value <= tolerance; }
    double severity() const { return value / tolerance; }
};

int cmd_wick_verify(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    if (c.grid.dim != 1) throw ConfigError("wick-verify needs a one-dimensional grid");
    try {
        c.grid.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid grid: ") + e.what());
    }
    if (!(c.wick_dy > 0.0) || !(c.wick_deta > 0.0)) throw ConfigError("wick spacings must be positive");

    const PacketGrid pg = make_packet_grid(c.grid, c.wick_dy, c.wick_deta);
    const WavePacketTransform w(pg, c.jobs);
    const Vec x = c.grid.axis();
    const double dx = c.grid.spacing();
    const double l = c.grid.half_width;
    std::vector<Check> checks;

    // Isometry on Gaussians placed well inside the box.
    double iso = 0.0;
    for (double center : {0.0, 0.25 * l, -0.3 * l})
        for (double width : {0.7, 1.0, 1.6}) {
            CVec u(x.size());
            for (Eigen::Index j = 0; j < x.size(); ++j) {
                const double t = (x[j] - center) / width;
                u[j] = std::exp(-kPi * t * t) * std::polar(1.0, 2.0 * kPi * 0.5 * x[j]);
            }
            u /= u.norm() * std::sqrt(dx);
            iso = std::max(iso, w.isometry_defect(u));
        }
    checks.push_back({"isometry_defect", iso, 1e-6});

    // Positivity and the norm bound on random nonnegative symbols.
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double min_eig = std::numeric_limits<double>::infinity();
    double norm_excess = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 10; ++trial) {
        CVec a(pg.size());
        for (Eigen::Index k = 0; k < a.size(); ++k) a[k] = unit(rng);
        const CMat q = w.quantize(a);
        min_eig = std::min(min_eig, linalg::hermitian_part_eigenvalues(q).minCoeff());
        norm_excess = std::max(norm_excess, linalg::spectral_norm(q) - a.cwiseAbs().maxCoeff());
    }
    checks.push_back({"positivity", std::max(0.0, -min_eig), 1e-8});
    checks.push_back({"norm_bound", std::max(0.0, norm_excess), 1e-6});

    const QuadraticSymbol a = QuadraticSymbol::from_monomials({{2, 0, 1.0}, {0, 2, 1.0}});
    const QuadraticRemainderReport rem = wick_weyl_residual_quadratic(w, a);
    checks.push_back({"quadratic_remainder", rem.residual, 1e-4});

    json doc = metadata("wick-verify", c);
    doc["packet_grid"] = {{"spatial", grid_json(c.grid)}, {"ny", pg.ny}, {"neta", pg.neta},
                          {"dy", pg.dy}, {"deta", pg.deta}};
    doc["min_eigenvalue"] = min_eig;
    doc["norm_excess"] = norm_excess;
    doc["remainder"] = {{"value", rem.remainder}, {"expected", a.hessian_trace() / (8.0 * kPi)},
                        {"residual", rem.residual}, {"relative_residual", rem.relative_residual},
                        {"test_functions", rem.test_functions}};
    json cj = json::array();
    const Check* worst = nullptr;
    for (const Check& ch : checks) {
        cj.push_back({{"name", ch.name}, {"value", ch.value}, {"tolerance", ch.tolerance}, {"pass", ch.pass()}});
        if (!ch.pass() && (!worst || ch.severity() > worst->severity())) worst = &ch;
    }
    doc["checks"] = cj;
    doc["pass"] = worst == nullptr;
    doc["worst_offender"] = worst ? json(worst->name) : json(nullptr);
    write_json(out_path(c, "wick_report.json"), doc);

    for (const Check& ch : checks)
        out << "wick-verify " << ch.name << " = " << fmt(ch.value) << " (tol " << fmt(ch.tolerance) << ") "
            << (ch.pass() ? "pass" : "fail") << "\n";
    if (worst) {
        err << "wick-verify failed; worst offender: " << worst->name << " = " << fmt(worst->value) << " > "
            << fmt(worst->tolerance) << "\n";
        return kExitFail;
    }
    return kExitPass;
}

// ---------------------------------------------------------------------------

int cmd_region_plot(const RunConfig& c, std::ostream& out)
{
    check_region(c.region);
    if (!(c.h > 0.0)) throw ConfigError("h must be positive");
    const double r0 = c.region.k * c.region.t + c.region.m * c.h;
    double r_max = std::max(8.0, 4.0 * r0);
    if (c.window) {
        if (c.window->kind == "polar")
            r_max = c.window->r_max;
        else
            r_max = std::hypot(std::max(std::abs(c.window->re_min), std::abs(c.window->re_max)),
                               std::max(std::abs(c.window->im_min), std::abs(c.window->im_max)));
    }
    const RegionBoundary b = region_boundary(c.region, c.h, 0.0, r_max, 200);

    std::vector<cplx> all = b.upper;
    all.insert(all.end(), b.lower.begin(), b.lower.end());
    if (all.empty()) throw ConfigError("the region is empty below the requested |z| range");
    all.emplace_back(-0.25 * r_max, 0.0);
    const PlotFrame frame = frame_around(all, 0.05 * r_max, 0.05 * r_max);

    const json meta = metadata("region-plot", c);
    std::vector<std::vector<std::string>> rows;
    json up = json::array(), lo = json::array();
    for (cplx z : b.upper) {
        rows.push_back({fmt(z.real()), fmt(z.imag()), "upper"});
        up.push_back(cplx_json(z));
    }
    for (cplx z : b.lower) {
        rows.push_back({fmt(z.real()), fmt(z.imag()), "lower"});
        lo.push_back(cplx_json(z));
    }
    write_csv(out_path(c, "region.csv"), meta, {"re_z", "im_z", "branch"}, rows);
    json doc = meta;
    doc["h"] = c.h;
    doc["r_min"] = r0;
    doc["r_max"] = r_max;
    doc["upper"] = up;
    doc["lower"] = lo;
    write_json(out_path(c, "region.json"), doc);
    write_text(out_path(c, "region.svg"), region_svg(b, frame, meta));

    out << "region-plot: " << b.upper.size() << " boundary points per branch, |z| in [" << fmt(r0) << ", "
        << fmt(r_max) << "]\n";
    return kExitPass;
}

}  // namespace

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names{"check-potential", "verify-weight", "sweep",       "fit-h",
                                                "fit-z",           "quasimode",     "wick-verify", "region-plot"};
    return names;
}

std::optional<double> bisect_t(const Potential& p, const Box& box, int samples_per_dim, double t_max,
                               std::optional<double> restricted_level, double tol)
{
    const auto passes = [&](double t) {
        return check_admissibility(p, box, samples_per_dim, t, restricted_level).pass.all();
    };
    if (!passes(t_max)) return std::nullopt;
    if (passes(0.0)) return 0.0;
    double lo = 0.0, hi = t_max;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (passes(mid) ? hi : lo) = mid;
    }
    return hi;
}

int run_command(const std::string& name, const RunConfig& config, std::ostream& out, std::ostream& err)
{
    try {
        if (name == "check-potential") return cmd_check_potential(config, out);
        if (name == "verify-weight") return cmd_verify_weight(config, out);
        if (name == "sweep") return cmd_sweep(config, out);
        if (name == "fit-h") return cmd_fit_h(config, out);
        if (name == "fit-z") return cmd_fit_z(config, out);
        if (name == "quasimode") return cmd_quasimode(config, out);
        if (name == "wick-verify") return cmd_wick_verify(config, out, err);
        if (name == "region-plot") return cmd_region_plot(config, out);
        err << "unknown command '" << name << "'\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const FitError& e) {
        err << name << " failed: " << e.what() << "\n";
        return kExitFail;
    } catch (const DomainError& e) {
        err << name << " failed: " << e.what() << "\n";
        return kExitFail;
    } catch (const SizeCapError& e) {
        err << name << " failed: " << e.what() << "\n";
        return kExitFail;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Subelliptic resolvent estimates for non-self-adjoint Schrodinger operators"};
    app.set_version_flag("--version", std::string(SUBRES_VERSION));
    app.require_subcommand(1, 1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<int> jobs;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    for (const std::string& name : command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("-c,--config", config_path, "JSON config file");
        sub->add_option("--set", overrides, "Override a config field, e.g. --set region.T=1");
        sub->add_option("-j,--jobs", jobs, "Worker threads");
        sub->add_option("-o,--out", out_dir, "Output directory");
        sub->add_option("--seed", seed, "Random seed");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::CallForVersion&) {
        out << SUBRES_VERSION << "\n";
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitUsage;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    RunConfig config;
    try {
        json doc = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
            doc = json::parse(in, nullptr, false);
            if (doc.is_discarded()) throw ConfigError("malformed config '" + config_path + "'");
        }
        for (const std::string& o : overrides) apply_override(doc, o);
        if (jobs) doc["jobs"] = *jobs;
        if (out_dir) doc["output_dir"] = *out_dir;
        if (seed) doc["seed"] = *seed;
        config = parse_config(doc);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    return run_command(command, config, out, err);
}

}  // namespace subres::cli
