#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "subres/common.hpp"
#include "subres/potential.hpp"

namespace subres {

/// Phase-space point X = (x, xi).
struct PhasePoint {
    Vec x;
    Vec xi;

    int dim() const { return static_cast<int>(x.size()); }
};

using PhaseFunction = std::function<double(const PhasePoint&)>;

/// Smooth even cutoff: 1 on [-1,1], 0 outside (-2,2), built from exp(-1/t).
double cutoff_psi(double t);
double cutoff_psi_derivative(double t);

/// lambda(X) = (|xi|^2 + V1(x) + |V2'(x)|^2)^{1/2}.
double lambda(const Potential& p, const PhasePoint& X);

/// Re p(X) = |xi|^2 + V1(x).
double re_p(const Potential& p, const PhasePoint& X);

/// Poisson bracket {f, g} = d_xi f . d_x g - d_x f . d_xi g, by central differences.
double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const PhasePoint& X,
                       double step = 1e-4);

/// H_{V2} f = -V2'(x) . d_xi f(X), derivative of f by central differences.
double hamilton_bracket_im_p(const Potential& p, const PhaseFunction& f, const PhasePoint& X,
                             double step = 1e-4);

/// H_{Im p} Re p = -2 xi . V2'(x), closed form.
double bracket_im_p_re_p(const Potential& p, const PhasePoint& X);

/// Lemma-1 weight G. Throws DomainError when lambda(X) = 0.
double weight_G(const Potential& p, const PhasePoint& X, double h, double epsilon);

/// Global weight g = (1 - psi(2 lambda^2 / h)) G; exactly 0 when lambda^2 <= h/2.
double weight_g(const Potential& p, const PhasePoint& X, double h, double epsilon);

struct WeightGradient {
    Vec d_x;
    Vec d_xi;
    bool analytic = false;

    double norm() const { return std::sqrt(d_x.squaredNorm() + d_xi.squaredNorm()); }
};

/// Gradient of g. Closed form when the potential has analytic Hessians,
/// otherwise 4th-order differences with step h^{1/2}/64.
WeightGradient weight_g_gradient(const Potential& p, const PhasePoint& X, double h,
                                 double epsilon);

struct WeightParams {
    double epsilon = 0.5;
    double c0 = 1.0;
    double h = 0.1;
};

/// How a phase grid was built.
struct PhaseGridInfo {
    std::string kind;
    std::size_t size = 0;
    int dim = 1;
    int centers = 0;
    int shells = 0;
    int directions = 0;
    double radius_min = 0.0;
    double radius_max = 0.0;
    int rect_samples = 0;
    double xi_extent = 0.0;
};

struct PhaseGrid {
    std::vector<PhasePoint> points;
    PhaseGridInfo info;
};

/// Tensor grid over box x [-xi_extent, xi_extent]^n, `samples` points per axis.
PhaseGrid rectangular_phase_grid(const Box& box, double xi_extent, int samples);

/// Logarithmic shells in phase space around the minima of lambda on the box,
/// from radius h_min/4 to 4, `directions` points per shell per coordinate pair,
/// merged with a coarse rectangular grid.
PhaseGrid shell_phase_grid(const Potential& p, const Box& box, double h_min, int shells = 24,
                           int directions = 32, int rect_samples = 11, double xi_extent = 2.0);

struct PerHSummary {
    double h = 0.0;
    double c_min = 0.0;
    /// Same ratio without the c0 h term, over points with lambda^2 >= h (where g = G).
    double c_lemma = 0.0;
    double max_abs_g = 0.0;
    double max_scaled_grad_g = 0.0;
    PhasePoint worst;
};

struct WeightCertificate {
    double epsilon = 0.0;
    double c0 = 0.0;
    double c_lower = 0.0;
    /// min over h of the per-h c_lemma.
    double c_lemma = 0.0;
    std::vector<double> h_list;
    PhaseGridInfo grid;
    double max_abs_g = 0.0;
    /// max |g'| h^{1/2} over grid and h list.
    double max_scaled_grad_g = 0.0;
    /// max over min of the per-h values of max |g'| h^{1/2}.
    double grad_spread = 1.0;
    /// min_h c_h / max_h c_h (diagnostic).
    double uniformity = 1.0;
    PhasePoint worst;
    double worst_h = 0.0;
    std::vector<PerHSummary> per_h;
    bool pass = false;
    /// Largest h in the list whose own minimum is positive.
    std::optional<double> h0;
};

/// Evaluates (Re p + h H_{V2} g + c0 h) / (h^{2/3} lambda^{2/3}) over the grid.
/// Passes iff the minimum is positive, |g| <= 1, and the ratio stays positive
/// without the c0 h term wherever lambda^2 >= h. The last condition keeps c0 h from
/// carrying the bound at large lambda, where it decays like h^{1/3}.
WeightCertificate certify_subellipticity(const Potential& p, const PhaseGrid& grid,
                                         const std::vector<double>& h_list, double epsilon,
                                         double c0, int jobs = 1);

struct CalibrationResult {
    bool success = false;
    WeightParams params;
    WeightCertificate certificate;
    int candidates_tried = 0;
};

/// Searches epsilon in {2^-k, k=1..8} (largest first) and c0 in {2^k, k=0..8}
/// (smallest first). On failure the returned certificate is the one with the
/// best c_lower, for diagnostics.
CalibrationResult calibrate_weights(const Potential& p, const PhaseGrid& grid,
                                    const std::vector<double>& h_list, int jobs = 1);

}  // namespace subres
