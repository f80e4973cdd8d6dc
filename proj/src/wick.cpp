#include "subres/wick.hpp"

#include <algorithm>
#include <cmath>

#include "subres/parallel.hpp"

namespace subres {

namespace {

double band_width(const GridSpec& g) { return g.points_per_dim / (2.0 * g.half_width); }

double wrap(double d, double period) { return d - period * std::round(d / period); }

/// Unitary DFT matrix, F[m, j] = e^{-2 pi i m j / N} / sqrt(N).
CMat dft_matrix(int n)
{
    CMat f(n, n);
    for (int m = 0; m < n; ++m)
        for (int j = 0; j < n; ++j) {
            const double phase = -2.0 * kPi * static_cast<double>((static_cast<long>(m) * j) % n) / n;
            f(m, j) = std::polar(1.0 / std::sqrt(static_cast<double>(n)), phase);
        }
    return f;
}

CMat fourier_multiplier(const CMat& f, const Vec& values)
{
    return f.adjoint() * values.cast<cplx>().asDiagonal() * f;
}

}  // namespace

double PacketGrid::eta(Eigen::Index k) const
{
    return -0.5 * band_width(spatial) + deta * static_cast<double>(k % neta);
}

PacketGrid make_packet_grid(const GridSpec& spatial, double dy, double deta)
{
    spatial.validate();
    if (spatial.dim != 1) throw DomainError("wave packets are implemented in one dimension only");
    if (spatial.points_per_dim > 2048)
        throw SizeCapError("packet assembly is capped at 2048 spatial points");
    if (!(dy > 0.0) || !(deta > 0.0)) throw DomainError("packet spacings must be positive");
    PacketGrid g;
    g.spatial = spatial;
    const double width = 2.0 * spatial.half_width;
    const double band = band_width(spatial);
    g.ny = std::max(1, static_cast<int>(std::lround(width / dy)));
    g.neta = std::max(1, static_cast<int>(std::lround(band / deta)));
    g.dy = width / g.ny;
    g.deta = band / g.neta;
    return g;
}

WavePacketTransform::WavePacketTransform(PacketGrid grid, int jobs) : grid_(std::move(grid))
{
    const GridSpec& s = grid_.spatial;
    const Vec x = s.axis();
    const double period = 2.0 * s.half_width;
    const double scale = std::pow(2.0, 0.25) * std::sqrt(s.spacing());
    phi_.resize(s.points_per_dim, grid_.size());
    parallel_for(static_cast<std::size_t>(grid_.size()), jobs, [&](std::size_t k) {
        const auto col = static_cast<Eigen::Index>(k);
        const double y = grid_.y(col);
        const double eta = grid_.eta(col);
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            const double d = wrap(x[j] - y, period);
            phi_(j, col) = std::polar(scale * std::exp(-kPi * d * d), 2.0 * kPi * eta * d);
        }
    });
}

PacketTransformResult WavePacketTransform::transform(const CVec& u) const
{
    if (u.size() != phi_.rows()) throw DomainError("grid function has the wrong length");
    PacketTransformResult r;
    r.values = phi_.adjoint() * u * std::sqrt(grid_.spatial.spacing());
    r.margin_ok = respects_margin(grid_.spatial, u);
    return r;
}

double WavePacketTransform::isometry_defect(const CVec& u) const
{
    const double norm_u = std::sqrt(grid_.spatial.spacing()) * u.norm();
    if (norm_u == 0.0) return 0.0;
    const double norm_w = std::sqrt(grid_.weight()) * transform(u).values.norm();
    return std::abs(norm_w - norm_u) / norm_u;
}

CMat WavePacketTransform::quantize(const CVec& symbol_values) const
{
    if (symbol_values.size() != grid_.size())
        throw DomainError("symbol must be sampled on the packet lattice");
    if (!symbol_values.allFinite()) throw DomainError("symbol values must be finite");
    const CVec weights = symbol_values * grid_.weight();
    return (phi_ * weights.asDiagonal()) * phi_.adjoint();
}

CVec WavePacketTransform::sample_symbol(const std::function<cplx(double, double)>& a) const
{
    CVec values(grid_.size());
    for (Eigen::Index k = 0; k < grid_.size(); ++k) values[k] = a(grid_.y(k), grid_.eta(k));
    return values;
}

CMat WavePacketTransform::quantize(const std::function<cplx(double, double)>& a) const
{
    return quantize(sample_symbol(a));
}

PacketTransformResult wave_packet_transform(const WavePacketTransform& w, const CVec& u)
{
    return w.transform(u);
}

CMat wick_quantize(const WavePacketTransform& w, const CVec& symbol_values)
{
    return w.quantize(symbol_values);
}

bool respects_margin(const GridSpec& grid, const CVec& u, double tol)
{
    if (u.size() != grid.total_points()) throw DomainError("grid function has the wrong length");
    const double peak = u.cwiseAbs().maxCoeff();
    if (peak == 0.0) return true;
    const Vec x = grid.axis();
    for (Eigen::Index j = 0; j < x.size(); ++j)
        if (std::abs(x[j]) > grid.half_width - kPacketMargin && std::abs(u[j]) > tol * peak)
            return false;

    const int n = grid.points_per_dim;
    const Vec xi = grid.frequencies();
    const double edge = 0.5 * band_width(grid) - kPacketMargin;
    CVec spectrum(n);
    for (int m = 0; m < n; ++m) {
        cplx s = 0.0;
        for (int j = 0; j < n; ++j)
            s += u[j] * std::polar(1.0, -2.0 * kPi * static_cast<double>((static_cast<long>(m) * j) % n) / n);
        spectrum[m] = s;
    }
    const double spec_peak = spectrum.cwiseAbs().maxCoeff();
    for (int m = 0; m < n; ++m)
        if (std::abs(xi[m]) > edge && std::abs(spectrum[m]) > tol * spec_peak) return false;
    return true;
}

QuadraticSymbol QuadraticSymbol::from_monomials(const std::vector<Monomial>& terms)
{
    QuadraticSymbol a;
    for (const Monomial& t : terms) {
        if (t.px < 0 || t.pxi < 0) throw DomainError("monomial powers must be nonnegative");
        if (t.px + t.pxi > 2)
            throw DomainError("symbol has degree " + std::to_string(t.px + t.pxi) +
                              "; only quadratic symbols are supported");
        if (t.px == 2) a.a_xx += t.coeff;
        else if (t.pxi == 2) a.a_xixi += t.coeff;
        else if (t.px == 1 && t.pxi == 1) a.a_xxi += 0.5 * t.coeff;
        else if (t.px == 1) a.b_x += t.coeff;
        else if (t.pxi == 1) a.b_xi += t.coeff;
        else a.c += t.coeff;
    }
    return a;
}

double QuadraticSymbol::operator()(double x, double xi) const
{
    return a_xx * x * x + 2.0 * a_xxi * x * xi + a_xixi * xi * xi + b_x * x + b_xi * xi + c;
}

CMat weyl_quadratic(const QuadraticSymbol& a, const GridSpec& grid)
{
    grid.validate();
    if (grid.dim != 1) throw DomainError("Weyl assembly is implemented in one dimension only");
    const int n = grid.points_per_dim;
    const Vec x = grid.axis();
    const Vec xi = grid.frequencies();
    const CMat f = dft_matrix(n);
    const CMat d = fourier_multiplier(f, xi);
    const CMat d2 = fourier_multiplier(f, xi.array().square().matrix());
    const auto xdiag = x.cast<cplx>().asDiagonal();

    CMat m = a.a_xixi * d2 + a.b_xi * d;
    m += a.a_xxi * (xdiag * d + d * xdiag);
    m.diagonal() += (a.a_xx * x.array().square() + a.b_x * x.array() + a.c).matrix().cast<cplx>();
    return m;
}

CMat hermite_test_functions(const GridSpec& grid, int count)
{
    grid.validate();
    if (grid.dim != 1) throw DomainError("Hermite test functions are one-dimensional");
    if (count < 1) throw DomainError("need at least one test function");
    const Vec x = grid.axis();
    const double sq = std::sqrt(grid.spacing());
    CMat q(x.size(), count);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double t = std::sqrt(2.0 * kPi) * x[j];
        double prev = 0.0;
        double cur = std::exp(-0.5 * t * t);
        for (int k = 0; k < count; ++k) {
            q(j, k) = cur * sq;
            const double next = std::sqrt(2.0 / (k + 1)) * t * cur - std::sqrt(k / (k + 1.0)) * prev;
            prev = cur;
            cur = next;
        }
    }
    Eigen::HouseholderQR<CMat> qr(q);
    CMat orth = qr.householderQ() * CMat::Identity(x.size(), count);
    // Fix column signs so they match the unorthogonalized functions.
    for (int k = 0; k < count; ++k)
        if (orth.col(k).dot(q.col(k)).real() < 0.0) orth.col(k) *= -1.0;
    return orth / sq;
}

QuadraticRemainderReport wick_weyl_residual_quadratic(const WavePacketTransform& w,
                                                      const QuadraticSymbol& a,
                                                      int test_functions)
{
    const GridSpec& grid = w.grid().spatial;
    QuadraticRemainderReport r;
    r.remainder = a.hessian_trace() / (8.0 * kPi);
    r.test_functions = test_functions;

    const CMat q = hermite_test_functions(grid, test_functions);
    for (int k = 0; k < test_functions; ++k)
        if (!respects_margin(grid, q.col(k), 1e-8))
            throw DomainError("Hermite test functions do not fit the box and band margins");

    const CMat wick = w.quantize([&](double y, double eta) { return cplx(a(y, eta), 0.0); });
    const CMat weyl = weyl_quadratic(a, grid);
    CMat diff = wick - weyl;
    diff.diagonal().array() -= r.remainder;

    const double sq = std::sqrt(grid.spacing());
    Eigen::JacobiSVD<CMat> res(diff * q * sq);
    Eigen::JacobiSVD<CMat> ref(weyl * q * sq);
    r.residual = res.singularValues()[0];
    const double scale = ref.singularValues()[0];
    r.relative_residual = scale > 0.0 ? r.residual / scale : r.residual;
    return r;
}

}  // namespace subres
