#include "subres/operator.hpp"

#include <fftw3.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <mutex>
#include <random>

#include "subres/linalg.hpp"

namespace subres {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

void GridSpec::validate() const
{
    if (dim != 1 && dim != 2) throw DomainError("grid dimension must be 1 or 2");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw DomainError("box half-width must be positive");
    if (points_per_dim < 32 || !is_power_of_two(points_per_dim))
        throw DomainError("points per dimension must be a power of two >= 32");
}

Eigen::Index GridSpec::total_points() const
{
    Eigen::Index total = 1;
    for (int d = 0; d < dim; ++d) total *= points_per_dim;
    return total;
}

Vec GridSpec::axis() const
{
    Vec x(points_per_dim);
    for (int j = 0; j < points_per_dim; ++j) x[j] = -half_width + j * spacing();
    return x;
}

Vec GridSpec::point(Eigen::Index flat) const
{
    Vec x(dim);
    for (int d = dim - 1; d >= 0; --d) {
        x[d] = -half_width + static_cast<double>(flat % points_per_dim) * spacing();
        flat /= points_per_dim;
    }
    return x;
}

Vec GridSpec::frequencies() const
{
    Vec xi(points_per_dim);
    for (int m = 0; m < points_per_dim; ++m) {
        const int k = m < points_per_dim / 2 ? m : m - points_per_dim;
        xi[m] = k / (2.0 * half_width);
    }
    return xi;
}

struct DiscreteOperator::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    Plans(const GridSpec& g)
    {
        const Eigen::Index total = g.total_points();
        CVec scratch(total);
        std::lock_guard lock(planner_mutex());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        if (g.dim == 1) {
            forward = fftw_plan_dft_1d(g.points_per_dim, as_fftw(scratch.data()),
                                       as_fftw(scratch.data()), FFTW_FORWARD, flags);
            backward = fftw_plan_dft_1d(g.points_per_dim, as_fftw(scratch.data()),
                                        as_fftw(scratch.data()), FFTW_BACKWARD, flags);
        } else {
            forward = fftw_plan_dft_2d(g.points_per_dim, g.points_per_dim, as_fftw(scratch.data()),
                                       as_fftw(scratch.data()), FFTW_FORWARD, flags);
            backward = fftw_plan_dft_2d(g.points_per_dim, g.points_per_dim, as_fftw(scratch.data()),
                                        as_fftw(scratch.data()), FFTW_BACKWARD, flags);
        }
        if (!forward || !backward) throw Error("FFTW planning failed");
    }

    ~Plans()
    {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }

    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
};

DiscreteOperator::DiscreteOperator(Potential potential, GridSpec grid, double h)
    : potential_(std::move(potential)), grid_(grid), h_(h)
{
    grid_.validate();
    if (!(h_ > 0.0) || h_ > 1.0) throw DomainError("h must lie in (0, 1]");
    if (potential_.dim() != grid_.dim)
        throw DomainError("potential dimension does not match the grid");

    const Eigen::Index total = grid_.total_points();
    const Vec xi = grid_.frequencies();
    const int n = grid_.points_per_dim;
    multipliers_.resize(total);
    samples_.resize(total);
    for (Eigen::Index k = 0; k < total; ++k) {
        double xi_sq = 0.0;
        Eigen::Index rest = k;
        for (int d = 0; d < grid_.dim; ++d) {
            const double f = xi[rest % n];
            xi_sq += f * f;
            rest /= n;
        }
        multipliers_[k] = h_ * h_ * xi_sq;

        const Vec x = grid_.point(k);
        const cplx v = potential_.value(x);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw EvaluationError("non-finite potential value at x = " + format_point(x));
        samples_[k] = v;
    }
    plans_ = std::make_shared<const Plans>(grid_);
}

CVec DiscreteOperator::apply_kinetic(const CVec& u) const
{
    if (u.size() != size()) throw DomainError("grid function has the wrong length");
    CVec w = u;
    fftw_execute_dft(plans_->forward, as_fftw(w.data()), as_fftw(w.data()));
    w.array() *= multipliers_.array().cast<cplx>() / static_cast<double>(size());
    fftw_execute_dft(plans_->backward, as_fftw(w.data()), as_fftw(w.data()));
    return w;
}

CVec DiscreteOperator::apply(const CVec& u) const
{
    CVec w = apply_kinetic(u);
    w.array() += samples_.array() * u.array();
    return w;
}

CMat DiscreteOperator::dense_matrix() const
{
    const Eigen::Index total = size();
    if (total > kDenseCap)
        throw SizeCapError("dense matrix of size " + std::to_string(total) +
                           " exceeds the cap of " + std::to_string(kDenseCap) +
                           "; use the matrix-free apply or inverse iteration");

    // Circulant kinetic stencil along one axis: c[d] = (1/N) sum_m h^2 xi_m^2 e^{2 pi i m d/N}.
    const int n = grid_.points_per_dim;
    const Vec xi = grid_.frequencies();
    Vec stencil(n);
    for (int d = 0; d < n; ++d) {
        double s = 0.0;
        for (int m = 0; m < n; ++m) s += xi[m] * xi[m] * std::cos(2 * kPi * m * d / n);
        stencil[d] = h_ * h_ * s / n;
    }

    CMat m = CMat::Zero(total, total);
    if (grid_.dim == 1) {
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) m(j, l) = stencil[((j - l) % n + n) % n];
    } else {
        for (int j1 = 0; j1 < n; ++j1)
            for (int j2 = 0; j2 < n; ++j2) {
                const Eigen::Index row = static_cast<Eigen::Index>(j1) * n + j2;
                for (int l = 0; l < n; ++l) {
                    const double c = stencil[((j2 - l) % n + n) % n];
                    m(row, static_cast<Eigen::Index>(j1) * n + l) += c;
                    const double c1 = stencil[((j1 - l) % n + n) % n];
                    m(row, static_cast<Eigen::Index>(l) * n + j2) += c1;
                }
            }
    }
    m.diagonal() += samples_;
    return m;
}

void DiscreteOperator::export_binary(const std::string& path) const
{
    const CMat m = dense_matrix();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    auto put = [&](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    };
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            put(m(r, c).real());
            put(m(r, c).imag());
        }
    if (!out) throw Error("write to " + path + " failed");
}

double accretivity_defect(const DiscreteOperator& op, int trials, unsigned long long seed)
{
    if (trials < 1) throw DomainError("need at least one trial");
    if ((op.potential_samples().real().array() < -kDivisionFloor).any())
        throw DomainError("V1 is negative on the grid; accretivity is not expected");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        CVec u(op.size());
        for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = cplx(normal(rng), normal(rng));
        const cplx q = u.dot(op.apply(u));
        worst = std::min(worst, q.real() / u.squaredNorm());
    }
    return worst;
}

ShiftedSigma shifted_sigma_min(const DiscreteOperator& op, cplx z, SigmaMethod method,
                               double rel_tol)
{
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("spectral parameter must be finite");
    CMat a = op.dense_matrix();
    a.diagonal().array() -= z;

    if (method == SigmaMethod::automatic)
        method = op.size() <= kDenseSvdLimit ? SigmaMethod::dense_svd : SigmaMethod::inverse_iteration;

    ShiftedSigma out;
    out.method = method;
    if (method == SigmaMethod::dense_svd) {
        out.sigma = linalg::smallest_singular_value(std::move(a));
        out.converged = true;
        return out;
    }
    linalg::InverseIterationOptions opts;
    opts.rel_tol = rel_tol;
    const auto r = linalg::smallest_singular_value_inverse_iteration(std::move(a), opts);
    out.sigma = r.sigma_min;
    out.converged = r.converged;
    out.singular = r.singular;
    out.iterations = r.iterations;
    return out;
}

TruncationReport truncation_report(const Potential& p, const GridSpec& grid, double h, cplx z,
                                   std::optional<double> sigma_base)
{
    grid.validate();
    GridSpec box = grid;
    box.half_width *= 2;
    box.points_per_dim *= 2;
    GridSpec res = grid;
    res.points_per_dim *= 2;
    if (box.total_points() > kDenseCap)
        throw SizeCapError("refined grid of " + std::to_string(box.total_points()) +
                           " points exceeds the dense cap");

    TruncationReport r;
    r.grid = grid;
    r.h = h;
    r.z = z;
    r.sigma_base = sigma_base ? *sigma_base : shifted_sigma_min(DiscreteOperator(p, grid, h), z).sigma;
    r.sigma_box = shifted_sigma_min(DiscreteOperator(p, box, h), z).sigma;
    r.sigma_res = shifted_sigma_min(DiscreteOperator(p, res, h), z).sigma;
    auto drift = [&](double s) {
        const double scale = std::max(r.sigma_base, 1e-300);
        return std::abs(s - r.sigma_base) / scale;
    };
    r.drift_box = drift(r.sigma_box);
    r.drift_res = drift(r.sigma_res);
    r.converged = r.drift_box <= kTruncationTolerance && r.drift_res <= kTruncationTolerance;
    return r;
}

}  // namespace subres
