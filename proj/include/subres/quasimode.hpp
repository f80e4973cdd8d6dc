#pragma once

#include <optional>

#include "subres/common.hpp"
#include "subres/operator.hpp"
#include "subres/potential.hpp"
#include "subres/resolvent.hpp"

namespace subres {

/// Order-0 coherent-state quasimode data at z = |xi0|^2 + V(x0).
struct QuasimodeSpec {
    Vec x0;
    Vec xi0;
    double h = 0.1;
    cplx z;
    /// xi0 . V2'(x0).
    double nondegeneracy = 0.0;
    /// |xi0 . V2'(x0)| >= kNondegeneracyThreshold.
    bool nondegenerate = false;
};

inline constexpr double kNondegeneracyThreshold = 1e-6;

QuasimodeSpec make_quasimode_spec(const Potential& p, const Vec& x0, const Vec& xi0, double h);

/// u(x) = c e^{2 pi i xi0.(x-x0)/h} e^{-pi |x-x0|^2/h} with |u|_{L2} = 1, as grid samples.
/// Throws DomainError when x0 is within 3 sqrt(h) of the box edge.
CVec coherent_state(const QuasimodeSpec& spec, const GridSpec& grid);

/// |(P - z) u| / |u| for the coherent state of `spec`.
double residual_ratio(const DiscreteOperator& op, const QuasimodeSpec& spec);

struct InteriorContrast {
    double h = 0.0;
    cplx z_interior;
    cplx z_boundary;
    GridSpec grid;
    double residual = 0.0;
    double sigma_interior = 0.0;
    double sigma_boundary = 0.0;
    double ratio = 0.0;
    /// sigma_interior <= residual.
    bool witness_ok = false;
    /// Truncation drift of the boundary probe; absent when refinement exceeds the dense cap.
    std::optional<TruncationReport> boundary_truncation;
    bool truncation_converged = false;
};

/// Interior probe at z = |xi0|^2 + V(x0) against the boundary probe at z' = i|z|,
/// both on one grid chosen by the policy.
InteriorContrast interior_contrast(const Potential& p, const QuasimodeSpec& spec,
                                   const RegionParams& rp, const GridPolicy& policy);

}  // namespace subres
