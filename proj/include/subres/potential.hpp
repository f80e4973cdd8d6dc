#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "subres/common.hpp"

namespace subres {

using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;
using MatrixField = std::function<Mat(const Vec&)>;

/// Ingredients of a complex potential V = V1 + i V2 on R^n.
/// Derivative fields are optional; missing ones fall back to finite differences.
struct PotentialParts {
    int dim = 1;
    std::string name;
    ScalarField v1;
    ScalarField v2;
    VectorField grad_v1;
    VectorField grad_v2;
    MatrixField hess_v1;
    MatrixField hess_v2;
    /// Constant T the potential is known to satisfy |V2| - T <~ |V2'|^2 with.
    double t_value = 0.0;
};

/// Immutable complex potential with gradient access. Cheap to copy.
class Potential {
public:
    explicit Potential(PotentialParts parts, double fd_step = 1e-3);

    int dim() const { return parts_->dim; }
    const std::string& name() const { return parts_->name; }
    double t_metadata() const { return parts_->t_value; }
    double fd_step() const { return fd_step_; }

    /// Same potential, finite-difference fallback step replaced.
    Potential with_fd_step(double step) const;

    double v1(const Vec& x) const { return parts_->v1(x); }
    double v2(const Vec& x) const { return parts_->v2(x); }
    cplx value(const Vec& x) const { return {v1(x), v2(x)}; }

    Vec grad_v1(const Vec& x) const;
    Vec grad_v2(const Vec& x) const;
    Mat hess_v1(const Vec& x) const;
    Mat hess_v2(const Vec& x) const;

    bool has_analytic_gradients() const;
    bool has_analytic_hessians() const;

    /// 4th-order central differences regardless of analytic availability.
    Vec fd_grad_v1(const Vec& x) const;
    Vec fd_grad_v2(const Vec& x) const;

private:
    std::shared_ptr<const PotentialParts> parts_;
    double fd_step_;
};

/// V(x) = x^T Q x for complex symmetric Q with Re Q positive semidefinite.
Potential builtin_quadratic(const CMat& q);

/// V(x1, x2) = i x1^2 + i sin(x2), admissible with T = 1.
Potential builtin_example2();

/// One-dimensional Morse instance V(x) = i (x^2/2 - 2 cos x), T = 2.
Potential builtin_morse1d();

/// V = c . x (complex linear), used as a negative control for the hypotheses.
Potential builtin_linear(const CVec& coeffs);

/// V = 0 in `dim` dimensions.
Potential builtin_zero(int dim = 1);

/// Built-ins by name: "zero", "zero2", "ix2" (= quadratic(i)), "example2", "morse1d".
Potential builtin_by_name(const std::string& name);

/// Axis-aligned box [lo, hi] in R^n.
struct Box {
    Vec lo;
    Vec hi;

    int dim() const { return static_cast<int>(lo.size()); }
    Box scaled(double factor) const;
    static Box cube(int dim, double lo, double hi);
};

struct AdmissibilityPass {
    bool v1_nonnegative = false;
    bool vv_prime_t = false;
    bool hessian_bounded = false;

    bool all() const { return v1_nonnegative && vv_prime_t && hessian_bounded; }
};

struct AdmissibilityReport {
    double t_value = 0.0;
    /// Smallest constant c with |V2| - T <= c |V2'|^2 on the sampled points.
    double c_vv = 0.0;
    double hess_bound = 0.0;
    double v1_min = 0.0;
    std::optional<double> restricted_level;
    AdmissibilityPass pass;

    /// sup |V2|/(1+|V2'|^2) on the box over the same on the half-size box.
    double growth_ratio = 1.0;
    double hess_growth_ratio = 1.0;
    /// Samples with |V2'| < 1e-6, plus Newton-refined critical points of V2, where |V2| - T > 0.
    int degenerate_points = 0;
    std::optional<Vec> worst_point;
    int samples_per_dim = 0;
    int points_scanned = 0;
};

/// Samples the potential on a tensor grid of `box` and checks the standing hypotheses:
/// V1 >= 0, |V2| - T <~ |V2'|^2 (optionally only where |V2'| <= restricted_level),
/// and bounded second derivatives. Uniformity of the "<~" constants is judged by
/// comparing the box with its concentric half-size copy.
AdmissibilityReport check_admissibility(const Potential& p, const Box& box, int samples_per_dim,
                                        double t_candidate,
                                        std::optional<double> restricted_level = std::nullopt);

inline constexpr double kDivisionFloor = 1e-12;
inline constexpr double kDegenerateGradient = 1e-6;
inline constexpr double kGrowthLimit = 1.5;

}  // namespace subres
