#include "subres/symbol_calculus.hpp"

#include <algorithm>
#include <limits>

#include "subres/parallel.hpp"

namespace subres {

namespace {

double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double bump_derivative(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

void check_h(double h)
{
    if (!(h > 0.0) || h > 1.0) throw DomainError("h must lie in (0, 1]");
}

PhasePoint shifted(const PhasePoint& X, int coord, double delta)
{
    PhasePoint Y = X;
    const int n = X.dim();
    if (coord < n)
        Y.x[coord] += delta;
    else
        Y.xi[coord - n] += delta;
    return Y;
}

double central_difference(const PhaseFunction& f, const PhasePoint& X, int coord, double step)
{
    return (-f(shifted(X, coord, 2 * step)) + 8 * f(shifted(X, coord, step)) -
            8 * f(shifted(X, coord, -step)) + f(shifted(X, coord, -2 * step))) /
           (12 * step);
}

}  // namespace

double cutoff_psi(double t)
{
    const double a = std::abs(t);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    const double m_in = bump(2.0 - a);
    const double m_out = bump(a - 1.0);
    return m_in / (m_in + m_out);
}

double cutoff_psi_derivative(double t)
{
    const double a = std::abs(t);
    if (a <= 1.0 || a >= 2.0) return 0.0;
    const double m_in = bump(2.0 - a);
    const double m_out = bump(a - 1.0);
    const double d_in = -bump_derivative(2.0 - a);
    const double d_out = bump_derivative(a - 1.0);
    const double denom = m_in + m_out;
    const double d = (d_in * m_out - m_in * d_out) / (denom * denom);
    return t < 0.0 ? -d : d;
}

double re_p(const Potential& p, const PhasePoint& X) { return X.xi.squaredNorm() + p.v1(X.x); }

double lambda(const Potential& p, const PhasePoint& X)
{
    return std::sqrt(X.xi.squaredNorm() + p.v1(X.x) + p.grad_v2(X.x).squaredNorm());
}

double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const PhasePoint& X,
                       double step)
{
    const int n = X.dim();
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += central_difference(f, X, n + i, step) * central_difference(g, X, i, step);
        sum -= central_difference(f, X, i, step) * central_difference(g, X, n + i, step);
    }
    return sum;
}

double hamilton_bracket_im_p(const Potential& p, const PhaseFunction& f, const PhasePoint& X,
                             double step)
{
    const Vec g2 = p.grad_v2(X.x);
    double sum = 0.0;
    for (int i = 0; i < X.dim(); ++i) sum -= g2[i] * central_difference(f, X, X.dim() + i, step);
    return sum;
}

double bracket_im_p_re_p(const Potential& p, const PhasePoint& X)
{
    return -2.0 * X.xi.dot(p.grad_v2(X.x));
}

double weight_G(const Potential& p, const PhasePoint& X, double h, double epsilon)
{
    check_h(h);
    const Vec g2 = p.grad_v2(X.x);
    const double re = re_p(p, X);
    const double lam_sq = re + g2.squaredNorm();
    if (!(lam_sq > 0.0)) throw DomainError("weight G undefined where lambda = 0");
    const double lam = std::sqrt(lam_sq);
    const double cut = cutoff_psi(4.0 * re / std::cbrt(h * h * lam_sq));
    if (cut == 0.0) return 0.0;
    const double bracket = -2.0 * X.xi.dot(g2);
    return epsilon / std::cbrt(h) * bracket / std::pow(lam, 4.0 / 3.0) * cut;
}

double weight_g(const Potential& p, const PhasePoint& X, double h, double epsilon)
{
    check_h(h);
    const double lam_sq = X.xi.squaredNorm() + p.v1(X.x) + p.grad_v2(X.x).squaredNorm();
    const double outer = 1.0 - cutoff_psi(2.0 * lam_sq / h);
    if (outer == 0.0) return 0.0;
    return outer * weight_G(p, X, h, epsilon);
}

WeightGradient weight_g_gradient(const Potential& p, const PhasePoint& X, double h,
                                 double epsilon)
{
    check_h(h);
    const int n = X.dim();
    WeightGradient out;
    out.d_x = Vec::Zero(n);
    out.d_xi = Vec::Zero(n);

    if (!p.has_analytic_hessians()) {
        const double step = std::sqrt(h) / 64.0;
        const PhaseFunction g = [&](const PhasePoint& Y) { return weight_g(p, Y, h, epsilon); };
        for (int i = 0; i < n; ++i) {
            out.d_x[i] = central_difference(g, X, i, step);
            out.d_xi[i] = central_difference(g, X, n + i, step);
        }
        return out;
    }

    out.analytic = true;
    const Vec& xi = X.xi;
    const Vec g1 = p.grad_v1(X.x);
    const Vec g2 = p.grad_v2(X.x);
    const Mat h2 = p.hess_v2(X.x);
    const double R = xi.squaredNorm() + p.v1(X.x);
    const double S = R + g2.squaredNorm();
    if (2.0 * S / h <= 1.0 || !(S > 0.0)) return out;

    const double nn = -2.0 * xi.dot(g2);
    const Vec dS_x = g1 + 2.0 * h2 * g2;
    const Vec dS_xi = 2.0 * xi;
    const Vec dR_x = g1;
    const Vec dR_xi = 2.0 * xi;
    const Vec dN_x = -2.0 * h2 * xi;
    const Vec dN_xi = -2.0 * g2;

    const double h13 = std::cbrt(h);
    const double h23 = h13 * h13;
    const double s13 = std::cbrt(S);
    const double tau = 4.0 * R / (h23 * s13);
    const double psi_tau = cutoff_psi(tau);
    const double dpsi_tau = cutoff_psi_derivative(tau);
    const double s_m23 = 1.0 / (s13 * s13);
    const double s_m43 = s_m23 * s_m23;
    const double s_m53 = s_m23 / S;

    const double G = epsilon / h13 * nn * s_m23 * psi_tau;
    const double outer_arg = 2.0 * S / h;
    const double outer = 1.0 - cutoff_psi(outer_arg);
    const double d_outer = -cutoff_psi_derivative(outer_arg) * 2.0 / h;

    auto dG = [&](const Vec& dN, const Vec& dR, const Vec& dS) -> Vec {
        const Vec dtau = 4.0 / h23 * (dR / s13 - R / 3.0 * s_m43 * dS);
        return epsilon / h13 *
               (dN * s_m23 * psi_tau - (2.0 / 3.0) * nn * s_m53 * psi_tau * dS +
                nn * s_m23 * dpsi_tau * dtau);
    };
    out.d_x = d_outer * G * dS_x + outer * dG(dN_x, dR_x, dS_x);
    out.d_xi = d_outer * G * dS_xi + outer * dG(dN_xi, dR_xi, dS_xi);
    return out;
}

PhaseGrid rectangular_phase_grid(const Box& box, double xi_extent, int samples)
{
    if (samples < 2) throw DomainError("rectangular phase grid needs at least 2 samples per axis");
    if (!(xi_extent > 0.0)) throw DomainError("xi extent must be positive");
    const int n = box.dim();
    PhaseGrid grid;
    grid.info.kind = "rectangular";
    grid.info.dim = n;
    grid.info.rect_samples = samples;
    grid.info.xi_extent = xi_extent;

    std::vector<int> idx(static_cast<std::size_t>(2 * n), 0);
    while (true) {
        PhasePoint X{Vec(n), Vec(n)};
        for (int d = 0; d < n; ++d) {
            const double fx = idx[static_cast<std::size_t>(d)] / static_cast<double>(samples - 1);
            const double fk =
                idx[static_cast<std::size_t>(n + d)] / static_cast<double>(samples - 1);
            X.x[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * fx;
            X.xi[d] = -xi_extent + 2 * xi_extent * fk;
        }
        grid.points.push_back(std::move(X));
        int d = 2 * n - 1;
        while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == samples) {
            idx[static_cast<std::size_t>(d)] = 0;
            --d;
        }
        if (d < 0) break;
    }
    grid.info.size = grid.points.size();
    return grid;
}

namespace {

/// Local minima of V1 + |V2'|^2 on the box, refined by compass search.
std::vector<Vec> lambda_minima(const Potential& p, const Box& box)
{
    const int n = box.dim();
    const int samples =
        std::max(5, static_cast<int>(std::floor(std::pow(2.0e4, 1.0 / n))));
    auto f = [&](const Vec& x) { return p.v1(x) + p.grad_v2(x).squaredNorm(); };

    const Vec cell = (box.hi - box.lo) / (samples - 1);
    std::vector<double> values;
    std::vector<Vec> coords;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    while (true) {
        Vec x(n);
        for (int d = 0; d < n; ++d) x[d] = box.lo[d] + cell[d] * idx[static_cast<std::size_t>(d)];
        coords.push_back(x);
        values.push_back(f(x));
        int d = n - 1;
        while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == samples) {
            idx[static_cast<std::size_t>(d)] = 0;
            --d;
        }
        if (d < 0) break;
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    if (*hi_it - *lo_it < 1e-12) return {0.5 * (box.lo + box.hi)};

    auto flat_index = [&](const std::vector<int>& id) {
        std::size_t k = 0;
        for (int d = 0; d < n; ++d) k = k * samples + static_cast<std::size_t>(id[static_cast<std::size_t>(d)]);
        return k;
    };
    std::vector<std::pair<double, Vec>> found;
    for (std::size_t k = 0; k < values.size(); ++k) {
        std::vector<int> id(static_cast<std::size_t>(n));
        std::size_t rest = k;
        for (int d = n - 1; d >= 0; --d) {
            id[static_cast<std::size_t>(d)] = static_cast<int>(rest % samples);
            rest /= samples;
        }
        bool is_min = true;
        for (int d = 0; d < n && is_min; ++d) {
            for (int s : {-1, 1}) {
                std::vector<int> nb = id;
                nb[static_cast<std::size_t>(d)] += s;
                if (nb[static_cast<std::size_t>(d)] < 0 || nb[static_cast<std::size_t>(d)] >= samples)
                    continue;
                if (values[flat_index(nb)] < values[k]) {
                    is_min = false;
                    break;
                }
            }
        }
        if (!is_min) continue;

        Vec x = coords[k];
        double fx = values[k];
        Vec step = cell;
        while (step.maxCoeff() > 1e-10) {
            bool moved = false;
            for (int d = 0; d < n; ++d) {
                for (int s : {-1, 1}) {
                    Vec y = x;
                    y[d] = std::clamp(y[d] + s * step[d], box.lo[d], box.hi[d]);
                    const double fy = f(y);
                    if (fy < fx) {
                        x = y;
                        fx = fy;
                        moved = true;
                    }
                }
            }
            if (!moved) step *= 0.5;
        }
        const double tol = 1e-4 * (box.hi - box.lo).maxCoeff();
        const bool duplicate = std::any_of(found.begin(), found.end(), [&](const auto& e) {
            return (e.second - x).norm() < tol;
        });
        if (!duplicate) found.emplace_back(fx, x);
    }
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (found.size() > 16) found.resize(16);
    std::vector<Vec> out;
    for (auto& e : found) out.push_back(e.second);
    return out;
}

}  // namespace

PhaseGrid shell_phase_grid(const Potential& p, const Box& box, double h_min, int shells,
                           int directions, int rect_samples, double xi_extent)
{
    check_h(h_min);
    if (box.dim() != p.dim()) throw DomainError("box dimension does not match the potential");
    if (shells < 2 || directions < 4) throw DomainError("shell grid too coarse");

    const int n = p.dim();
    PhaseGrid grid = rectangular_phase_grid(box, xi_extent, rect_samples);
    grid.info.kind = "shells+rectangular";
    grid.info.shells = shells;
    grid.info.directions = directions;
    grid.info.radius_min = h_min / 4.0;
    grid.info.radius_max = 4.0;

    const std::vector<Vec> centers = lambda_minima(p, box);
    grid.info.centers = static_cast<int>(centers.size());
    const double log_lo = std::log(grid.info.radius_min);
    const double log_hi = std::log(grid.info.radius_max);
    for (const Vec& c : centers) {
        for (int s = 0; s < shells; ++s) {
            const double r = std::exp(log_lo + (log_hi - log_lo) * s / (shells - 1));
            for (int a = 0; a < 2 * n; ++a) {
                for (int b = a + 1; b < 2 * n; ++b) {
                    for (int k = 0; k < directions; ++k) {
                        const double theta = 2 * kPi * (k + 0.5) / directions;
                        PhasePoint X{c, Vec::Zero(n)};
                        X = shifted(X, a, r * std::cos(theta));
                        X = shifted(X, b, r * std::sin(theta));
                        grid.points.push_back(std::move(X));
                    }
                }
            }
        }
    }
    grid.info.size = grid.points.size();
    return grid;
}

namespace {

/// Per-point, per-h quantities at epsilon = 1; g is linear in epsilon.
struct BaseSample {
    double re = 0.0;
    double lam = 0.0;
    double bracket = 0.0;
    double abs_g = 0.0;
    double grad_norm = 0.0;
};

std::vector<BaseSample> base_samples(const Potential& p, const PhaseGrid& grid,
                                     const std::vector<double>& h_list, int jobs)
{
    const std::size_t nh = h_list.size();
    std::vector<BaseSample> out(grid.points.size() * nh);
    parallel_for(grid.points.size(), jobs, [&](std::size_t i) {
        const PhasePoint& X = grid.points[i];
        if (X.dim() != p.dim()) throw DomainError("phase grid dimension does not match potential");
        const Vec g2 = p.grad_v2(X.x);
        const double re = re_p(p, X);
        const double lam = std::sqrt(re + g2.squaredNorm());
        if (!std::isfinite(lam))
            throw EvaluationError("non-finite lambda at x = " + format_point(X.x));
        for (std::size_t j = 0; j < nh; ++j) {
            const double h = h_list[j];
            BaseSample& b = out[i * nh + j];
            b.re = re;
            b.lam = lam;
            b.abs_g = std::abs(weight_g(p, X, h, 1.0));
            const WeightGradient grad = weight_g_gradient(p, X, h, 1.0);
            b.bracket = -g2.dot(grad.d_xi);
            b.grad_norm = grad.norm();
        }
    });
    return out;
}

WeightCertificate evaluate(const std::vector<BaseSample>& base, const PhaseGrid& grid,
                           const std::vector<double>& h_list, double epsilon, double c0)
{
    WeightCertificate cert;
    cert.epsilon = epsilon;
    cert.c0 = c0;
    cert.h_list = h_list;
    cert.grid = grid.info;
    cert.grid.size = grid.points.size();
    cert.c_lower = std::numeric_limits<double>::infinity();
    cert.c_lemma = std::numeric_limits<double>::infinity();
    const std::size_t nh = h_list.size();

    for (std::size_t j = 0; j < nh; ++j) {
        const double h = h_list[j];
        PerHSummary s;
        s.h = h;
        s.c_min = std::numeric_limits<double>::infinity();
        s.c_lemma = std::numeric_limits<double>::infinity();
        std::size_t worst = 0;
        for (std::size_t i = 0; i < grid.points.size(); ++i) {
            const BaseSample& b = base[i * nh + j];
            const double num = b.re + epsilon * h * b.bracket + c0 * h;
            const double den = std::cbrt(h * h * b.lam * b.lam);
            double ratio;
            if (den > 0.0)
                ratio = num / den;
            else if (num > 0.0)
                continue;
            else
                ratio = -1.0;
            if (ratio < s.c_min) {
                s.c_min = ratio;
                worst = i;
            }
            if (b.lam * b.lam >= h && den > 0.0)
                s.c_lemma = std::min(s.c_lemma, (b.re + epsilon * h * b.bracket) / den);
            s.max_abs_g = std::max(s.max_abs_g, epsilon * b.abs_g);
            s.max_scaled_grad_g = std::max(s.max_scaled_grad_g, epsilon * b.grad_norm * std::sqrt(h));
        }
        if (!grid.points.empty()) s.worst = grid.points[worst];
        if (s.c_lemma < cert.c_lemma) cert.c_lemma = s.c_lemma;
        if (s.c_min < cert.c_lower) {
            cert.c_lower = s.c_min;
            cert.worst = s.worst;
            cert.worst_h = h;
        }
        cert.max_abs_g = std::max(cert.max_abs_g, s.max_abs_g);
        cert.max_scaled_grad_g = std::max(cert.max_scaled_grad_g, s.max_scaled_grad_g);
        cert.per_h.push_back(std::move(s));
    }

    double c_max = -std::numeric_limits<double>::infinity();
    double g_min = std::numeric_limits<double>::infinity();
    double g_max = 0.0;
    for (const auto& s : cert.per_h) {
        c_max = std::max(c_max, s.c_min);
        g_min = std::min(g_min, s.max_scaled_grad_g);
        g_max = std::max(g_max, s.max_scaled_grad_g);
    }
    cert.grad_spread = g_min > 0.0 ? g_max / g_min : 1.0;
    cert.uniformity = c_max > 0.0 ? cert.c_lower / c_max : 0.0;
    cert.pass = cert.c_lower > 0.0 && cert.c_lemma > 0.0 && cert.max_abs_g <= 1.0;
    for (const auto& s : cert.per_h)
        if (s.c_min > 0.0 && s.c_lemma > 0.0 && s.max_abs_g <= 1.0 && (!cert.h0 || s.h > *cert.h0))
            cert.h0 = s.h;
    return cert;
}

void check_h_list(const std::vector<double>& h_list)
{
    if (h_list.empty()) throw DomainError("h list is empty");
    for (double h : h_list) check_h(h);
}

}  // namespace

WeightCertificate certify_subellipticity(const Potential& p, const PhaseGrid& grid,
                                         const std::vector<double>& h_list, double epsilon,
                                         double c0, int jobs)
{
    check_h_list(h_list);
    if (!(epsilon >= 0.0) || epsilon > 1.0) throw DomainError("epsilon must lie in [0, 1]");
    if (!(c0 >= 0.0)) throw DomainError("c0 must be nonnegative");
    return evaluate(base_samples(p, grid, h_list, jobs), grid, h_list, epsilon, c0);
}

CalibrationResult calibrate_weights(const Potential& p, const PhaseGrid& grid,
                                    const std::vector<double>& h_list, int jobs)
{
    check_h_list(h_list);
    const std::vector<BaseSample> base = base_samples(p, grid, h_list, jobs);
    CalibrationResult result;
    bool have_best = false;
    for (int ke = 1; ke <= 8; ++ke) {
        const double epsilon = std::ldexp(1.0, -ke);
        for (int kc = 0; kc <= 8; ++kc) {
            const double c0 = std::ldexp(1.0, kc);
            ++result.candidates_tried;
            WeightCertificate cert = evaluate(base, grid, h_list, epsilon, c0);
            if (cert.pass) {
                result.success = true;
                result.params = {epsilon, c0, *std::max_element(h_list.begin(), h_list.end())};
                if (cert.h0) result.params.h = *cert.h0;
                result.certificate = std::move(cert);
                return result;
            }
            if (!have_best || cert.c_lower > result.certificate.c_lower) {
                have_best = true;
                result.params = {epsilon, c0, *std::max_element(h_list.begin(), h_list.end())};
                result.certificate = std::move(cert);
            }
        }
    }
    return result;
}

}  // namespace subres
