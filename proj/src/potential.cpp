#include "subres/potential.hpp"

#include <algorithm>
#include <cmath>

namespace subres {

namespace {

Vec fd_gradient(const ScalarField& f, const Vec& x, double step)
{
    Vec g(x.size());
    Vec y = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        y[i] = xi + 2 * step;
        const double fp2 = f(y);
        y[i] = xi + step;
        const double fp1 = f(y);
        y[i] = xi - step;
        const double fm1 = f(y);
        y[i] = xi - 2 * step;
        const double fm2 = f(y);
        y[i] = xi;
        g[i] = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * step);
    }
    return g;
}

Mat fd_jacobian(const VectorField& f, const Vec& x, double step)
{
    const Eigen::Index n = x.size();
    Mat h(n, n);
    Vec y = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double xi = x[i];
        y[i] = xi + 2 * step;
        const Vec fp2 = f(y);
        y[i] = xi + step;
        const Vec fp1 = f(y);
        y[i] = xi - step;
        const Vec fm1 = f(y);
        y[i] = xi - 2 * step;
        const Vec fm2 = f(y);
        y[i] = xi;
        h.col(i) = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * step);
    }
    return 0.5 * (h + h.transpose());
}

}  // namespace

Potential::Potential(PotentialParts parts, double fd_step)
    : parts_(std::make_shared<const PotentialParts>(std::move(parts))), fd_step_(fd_step)
{
    if (parts_->dim < 1) throw DomainError("potential dimension must be positive");
    if (!parts_->v1 || !parts_->v2) throw DomainError("potential needs both v1 and v2");
    if (!(fd_step_ > 0.0)) throw DomainError("finite-difference step must be positive");
}

Potential Potential::with_fd_step(double step) const
{
    Potential copy = *this;
    if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
    copy.fd_step_ = step;
    return copy;
}

Vec Potential::grad_v1(const Vec& x) const
{
    return parts_->grad_v1 ? parts_->grad_v1(x) : fd_grad_v1(x);
}

Vec Potential::grad_v2(const Vec& x) const
{
    return parts_->grad_v2 ? parts_->grad_v2(x) : fd_grad_v2(x);
}

Mat Potential::hess_v1(const Vec& x) const
{
    if (parts_->hess_v1) return parts_->hess_v1(x);
    return fd_jacobian([this](const Vec& y) { return grad_v1(y); }, x, fd_step_);
}

Mat Potential::hess_v2(const Vec& x) const
{
    if (parts_->hess_v2) return parts_->hess_v2(x);
    return fd_jacobian([this](const Vec& y) { return grad_v2(y); }, x, fd_step_);
}

bool Potential::has_analytic_gradients() const
{
    return static_cast<bool>(parts_->grad_v1) && static_cast<bool>(parts_->grad_v2);
}

bool Potential::has_analytic_hessians() const
{
    return has_analytic_gradients() && static_cast<bool>(parts_->hess_v1) &&
           static_cast<bool>(parts_->hess_v2);
}

Vec Potential::fd_grad_v1(const Vec& x) const { return fd_gradient(parts_->v1, x, fd_step_); }
Vec Potential::fd_grad_v2(const Vec& x) const { return fd_gradient(parts_->v2, x, fd_step_); }

Potential builtin_quadratic(const CMat& q)
{
    if (q.rows() != q.cols() || q.rows() < 1) throw DomainError("quadratic form must be square");
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff()))
        throw DomainError("quadratic form must be symmetric");
    const Mat re = q.real();
    const Mat im = q.imag();
    Eigen::SelfAdjointEigenSolver<Mat> eig(re, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10)
        throw DomainError("Re Q is indefinite; V1 >= 0 would fail");

    PotentialParts parts;
    parts.dim = static_cast<int>(q.rows());
    parts.name = "quadratic";
    parts.v1 = [re](const Vec& x) { return x.dot(re * x); };
    parts.v2 = [im](const Vec& x) { return x.dot(im * x); };
    parts.grad_v1 = [re](const Vec& x) -> Vec { return 2.0 * re * x; };
    parts.grad_v2 = [im](const Vec& x) -> Vec { return 2.0 * im * x; };
    parts.hess_v1 = [re](const Vec&) -> Mat { return 2.0 * re; };
    parts.hess_v2 = [im](const Vec&) -> Mat { return 2.0 * im; };
    parts.t_value = 0.0;
    return Potential(std::move(parts));
}

Potential builtin_example2()
{
    PotentialParts parts;
    parts.dim = 2;
    parts.name = "example2";
    parts.v1 = [](const Vec&) { return 0.0; };
    parts.v2 = [](const Vec& x) { return x[0] * x[0] + std::sin(x[1]); };
    parts.grad_v1 = [](const Vec&) -> Vec { return Vec::Zero(2); };
    parts.grad_v2 = [](const Vec& x) -> Vec { return Vec{{2 * x[0], std::cos(x[1])}}; };
    parts.hess_v1 = [](const Vec&) -> Mat { return Mat::Zero(2, 2); };
    parts.hess_v2 = [](const Vec& x) -> Mat {
        Mat h = Mat::Zero(2, 2);
        h(0, 0) = 2.0;
        h(1, 1) = -std::sin(x[1]);
        return h;
    };
    parts.t_value = 1.0;
    return Potential(std::move(parts));
}

Potential builtin_morse1d()
{
    PotentialParts parts;
    parts.dim = 1;
    parts.name = "morse1d";
    parts.v1 = [](const Vec&) { return 0.0; };
    parts.v2 = [](const Vec& x) { return 0.5 * x[0] * x[0] - 2 * std::cos(x[0]); };
    parts.grad_v1 = [](const Vec&) -> Vec { return Vec::Zero(1); };
    parts.grad_v2 = [](const Vec& x) -> Vec { return Vec::Constant(1, x[0] + 2 * std::sin(x[0])); };
    parts.hess_v1 = [](const Vec&) -> Mat { return Mat::Zero(1, 1); };
    parts.hess_v2 = [](const Vec& x) -> Mat { return Mat::Constant(1, 1, 1 + 2 * std::cos(x[0])); };
    parts.t_value = 2.0;
    return Potential(std::move(parts));
}

Potential builtin_linear(const CVec& coeffs)
{
    const int n = static_cast<int>(coeffs.size());
    if (n < 1) throw DomainError("linear potential needs coefficients");
    const Vec re = coeffs.real();
    const Vec im = coeffs.imag();
    if (re.cwiseAbs().maxCoeff() > 0.0)
        throw DomainError("a nonzero real linear part violates V1 >= 0");
    PotentialParts parts;
    parts.dim = n;
    parts.name = "linear";
    parts.v1 = [](const Vec&) { return 0.0; };
    parts.v2 = [im](const Vec& x) { return im.dot(x); };
    parts.grad_v1 = [n](const Vec&) -> Vec { return Vec::Zero(n); };
    parts.grad_v2 = [im](const Vec&) -> Vec { return im; };
    parts.hess_v1 = [n](const Vec&) -> Mat { return Mat::Zero(n, n); };
    parts.hess_v2 = [n](const Vec&) -> Mat { return Mat::Zero(n, n); };
    return Potential(std::move(parts));
}

Potential builtin_zero(int dim)
{
    if (dim < 1) throw DomainError("dimension must be positive");
    PotentialParts parts;
    parts.dim = dim;
    parts.name = dim == 1 ? "zero" : "zero" + std::to_string(dim);
    parts.v1 = [](const Vec&) { return 0.0; };
    parts.v2 = [](const Vec&) { return 0.0; };
    parts.grad_v1 = [dim](const Vec&) -> Vec { return Vec::Zero(dim); };
    parts.grad_v2 = [dim](const Vec&) -> Vec { return Vec::Zero(dim); };
    parts.hess_v1 = [dim](const Vec&) -> Mat { return Mat::Zero(dim, dim); };
    parts.hess_v2 = [dim](const Vec&) -> Mat { return Mat::Zero(dim, dim); };
    return Potential(std::move(parts));
}

Potential builtin_by_name(const std::string& name)
{
    if (name == "zero") return builtin_zero(1);
    if (name == "zero2") return builtin_zero(2);
    if (name == "ix2") {
        Potential p = builtin_quadratic(CMat::Constant(1, 1, cplx(0, 1)));
        return p;
    }
    if (name == "example2") return builtin_example2();
    if (name == "morse1d") return builtin_morse1d();
    throw ConfigError("unknown built-in potential '" + name + "'");
}

Box Box::scaled(double factor) const
{
    const Vec center = 0.5 * (lo + hi);
    const Vec half = 0.5 * factor * (hi - lo);
    return Box{center - half, center + half};
}

Box Box::cube(int dim, double lo, double hi)
{
    return Box{Vec::Constant(dim, lo), Vec::Constant(dim, hi)};
}

namespace {

template <class Fn>
void for_each_grid_point(const Box& box, int samples, Fn&& fn)
{
    const int n = box.dim();
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    Vec x(n);
    while (true) {
        for (int d = 0; d < n; ++d)
            x[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * idx[static_cast<std::size_t>(d)] /
                                   static_cast<double>(samples - 1);
        fn(x);
        int d = n - 1;
        while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == samples) {
            idx[static_cast<std::size_t>(d)] = 0;
            --d;
        }
        if (d < 0) break;
    }
}

/// Spectral norm of the complex Hessian of V from second differences.
double second_difference_hessian_norm(const Potential& p, const Vec& x, double s)
{
    const int n = p.dim();
    CMat h(n, n);
    const cplx v0 = p.value(x);
    Vec y = x;
    for (int i = 0; i < n; ++i) {
        y[i] = x[i] + s;
        const cplx vp = p.value(y);
        y[i] = x[i] - s;
        const cplx vm = p.value(y);
        y[i] = x[i];
        h(i, i) = (vp - 2.0 * v0 + vm) / (s * s);
        for (int j = i + 1; j < n; ++j) {
            auto at = [&](double si, double sj) {
                Vec w = x;
                w[i] += si;
                w[j] += sj;
                return p.value(w);
            };
            const cplx mixed = (at(s, s) - at(s, -s) - at(-s, s) + at(-s, -s)) / (4 * s * s);
            h(i, j) = mixed;
            h(j, i) = mixed;
        }
    }
    Eigen::JacobiSVD<CMat> svd(h);
    return svd.singularValues()[0];
}

struct ScanSummary {
    double growth_sup = 0.0;
    double hess_sup = 0.0;
};

}  // namespace

AdmissibilityReport check_admissibility(const Potential& p, const Box& box, int samples_per_dim,
                                        double t_candidate, std::optional<double> restricted_level)
{
    if (samples_per_dim < 16) throw DomainError("samples_per_dim must be at least 16");
    if (box.dim() != p.dim() || box.hi.size() != box.lo.size())
        throw DomainError("box dimension does not match the potential");
    if (((box.hi - box.lo).array() <= 0.0).any()) throw DomainError("box is empty");
    if (!(t_candidate >= 0.0)) throw DomainError("T must be nonnegative");
    if (restricted_level && !(*restricted_level > 0.0))
        throw DomainError("restricted level L must be positive");

    const double width = (box.hi - box.lo).maxCoeff();
    const double step = width / (8.0 * samples_per_dim);
    const Potential pf = p.with_fd_step(step);

    AdmissibilityReport report;
    report.t_value = t_candidate;
    report.restricted_level = restricted_level;
    report.samples_per_dim = samples_per_dim;
    report.v1_min = std::numeric_limits<double>::infinity();

    auto in_region = [&](const Vec& grad) {
        return !restricted_level || grad.norm() <= *restricted_level;
    };

    // Sample points that may sit within one cell of a critical point of V2.
    std::vector<Vec> near_critical;
    const double cell = ((box.hi - box.lo) / static_cast<double>(samples_per_dim - 1)).norm();

    auto scan = [&](const Box& b, bool primary) {
        ScanSummary summary;
        for_each_grid_point(b, samples_per_dim, [&](const Vec& x) {
            const double v1 = pf.v1(x);
            const double v2 = pf.v2(x);
            const Vec g2 = pf.grad_v2(x);
            if (!std::isfinite(v1) || !std::isfinite(v2) || !g2.allFinite())
                throw EvaluationError("non-finite potential value at x = " + format_point(x));
            const double hess = second_difference_hessian_norm(pf, x, step);
            if (!std::isfinite(hess))
                throw EvaluationError("non-finite second difference at x = " + format_point(x));
            summary.hess_sup = std::max(summary.hess_sup, hess);

            const double grad_sq = g2.squaredNorm();
            if (in_region(g2))
                summary.growth_sup = std::max(summary.growth_sup, std::abs(v2) / (1.0 + grad_sq));
            if (!primary) return;

            ++report.points_scanned;
            report.v1_min = std::min(report.v1_min, v1);
            if (std::sqrt(grad_sq) <= 2.0 * hess * cell) near_critical.push_back(x);
            if (!in_region(g2)) return;
            const double excess = std::abs(v2) - t_candidate;
            if (excess <= kDivisionFloor) return;
            if (std::sqrt(grad_sq) < kDegenerateGradient) {
                ++report.degenerate_points;
                if (!report.worst_point) report.worst_point = x;
                return;
            }
            const double ratio = excess / std::max(grad_sq, kDivisionFloor);
            if (ratio > report.c_vv) {
                report.c_vv = ratio;
                if (report.degenerate_points == 0) report.worst_point = x;
            }
        });
        return summary;
    };

    const ScanSummary full = scan(box, true);
    const ScanSummary half = scan(box.scaled(0.5), false);

    // Grid samples rarely land on a critical point, where |V2| - T must vanish.
    // Newton on grad V2 = 0 from every nearby sample finds them.
    std::vector<Vec> critical;
    for (Vec x : near_critical) {
        bool found = false;
        for (int it = 0; it < 40 && !found; ++it) {
            const Vec g = pf.grad_v2(x);
            if (g.norm() < 1e-10) {
                found = true;
                break;
            }
            const Eigen::FullPivLU<Mat> lu(pf.hess_v2(x));
            if (!lu.isInvertible()) break;
            x -= lu.solve(g);
            if (!x.allFinite()) break;
        }
        if (!found) found = pf.grad_v2(x).norm() < 1e-10;
        if (!found || ((x - box.lo).array() < 0.0).any() || ((box.hi - x).array() < 0.0).any()) continue;
        const bool seen = std::any_of(critical.begin(), critical.end(),
                                      [&](const Vec& c) { return (c - x).norm() < 1e-6; });
        if (seen) continue;
        critical.push_back(x);
        if (std::abs(pf.v2(x)) - t_candidate > 1e-9) {
            ++report.degenerate_points;
            report.worst_point = x;
        }
    }

    report.hess_bound = full.hess_sup;
    auto growth = [](double outer, double inner) {
        if (outer <= kDivisionFloor) return 1.0;
        return outer / std::max(inner, kDivisionFloor);
    };
    report.growth_ratio = growth(full.growth_sup, half.growth_sup);
    report.hess_growth_ratio = growth(full.hess_sup, half.hess_sup);

    report.pass.v1_nonnegative = report.v1_min >= -kDivisionFloor;
    report.pass.vv_prime_t = report.degenerate_points == 0 && report.growth_ratio <= kGrowthLimit;
    report.pass.hessian_bounded = report.hess_growth_ratio <= kGrowthLimit;
    return report;
}

}  // namespace subres
