#include "subres/quasimode.hpp"

#include <algorithm>
#include <cmath>

namespace subres {

QuasimodeSpec make_quasimode_spec(const Potential& p, const Vec& x0, const Vec& xi0, double h)
{
    if (x0.size() != p.dim() || xi0.size() != p.dim())
        throw DomainError("x0 and xi0 must match the potential dimension");
    if (!(h > 0.0) || h > 1.0) throw DomainError("h must lie in (0, 1]");
    QuasimodeSpec s;
    s.x0 = x0;
    s.xi0 = xi0;
    s.h = h;
    s.z = xi0.squaredNorm() + p.value(x0);
    s.nondegeneracy = xi0.dot(p.grad_v2(x0));
    s.nondegenerate = std::abs(s.nondegeneracy) >= kNondegeneracyThreshold;
    return s;
}

CVec coherent_state(const QuasimodeSpec& spec, const GridSpec& grid)
{
    grid.validate();
    if (spec.x0.size() != grid.dim) throw DomainError("x0 does not match the grid dimension");
    const double margin = 3.0 * std::sqrt(spec.h);
    for (int d = 0; d < grid.dim; ++d)
        if (std::abs(spec.x0[d]) > grid.half_width - margin)
            throw DomainError("x0 lies within 3 sqrt(h) of the box edge");

    CVec u(grid.total_points());
    for (Eigen::Index k = 0; k < u.size(); ++k) {
        const Vec dx = grid.point(k) - spec.x0;
        u[k] = std::polar(std::exp(-kPi * dx.squaredNorm() / spec.h),
                          2.0 * kPi * spec.xi0.dot(dx) / spec.h);
    }
    const double l2 = std::sqrt(std::pow(grid.spacing(), grid.dim)) * u.norm();
    return u / l2;
}

double residual_ratio(const DiscreteOperator& op, const QuasimodeSpec& spec)
{
    const CVec u = coherent_state(spec, op.grid());
    CVec r = op.apply(u);
    r -= spec.z * u;
    return r.norm() / u.norm();
}

InteriorContrast interior_contrast(const Potential& p, const QuasimodeSpec& spec,
                                   const RegionParams& rp, const GridPolicy& policy)
{
    InteriorContrast c;
    c.h = spec.h;
    c.z_interior = spec.z;
    c.z_boundary = cplx(0.0, std::abs(spec.z));
    if (!in_region(c.z_boundary, spec.h, rp))
        throw DomainError("boundary point i|z| lies outside the region");

    const GridSpec gi = choose_grid(p, spec.h, c.z_interior, policy);
    const GridSpec gb = choose_grid(p, spec.h, c.z_boundary, policy);
    c.grid = gi;
    c.grid.half_width = std::max(gi.half_width, gb.half_width);
    c.grid.points_per_dim = std::max(gi.points_per_dim, gb.points_per_dim);

    const DiscreteOperator op(p, c.grid, spec.h);
    c.residual = residual_ratio(op, spec);
    c.sigma_interior = sigma_min(op, c.z_interior).sigma_min;
    c.sigma_boundary = sigma_min(op, c.z_boundary).sigma_min;
    c.ratio = c.sigma_interior / c.sigma_boundary;
    c.witness_ok = c.sigma_interior <= c.residual;

    GridSpec doubled = c.grid;
    doubled.points_per_dim *= 2;
    if (doubled.total_points() <= kDenseCap) {
        c.boundary_truncation = truncation_report(p, c.grid, spec.h, c.z_boundary, c.sigma_boundary);
        c.truncation_converged = c.boundary_truncation->converged;
    }
    return c;
}

}  // namespace subres
