#pragma once

#include <functional>
#include <vector>

#include "subres/common.hpp"
#include "subres/operator.hpp"

namespace subres {

// Gaussian wave packets phi_Y(x) = 2^{1/4} e^{-pi (x-y)^2} e^{2 pi i eta (x-y)} on a
// one-dimensional periodic grid, and the Wick quantization they induce.

/// Phase lattice Y = (y, eta): y tiles [-L, L), eta tiles the discrete frequency
/// band [-N/(4L), N/(4L)). Both are periodic, so spacings are adjusted to tile exactly.
struct PacketGrid {
    GridSpec spatial;
    int ny = 0;
    int neta = 0;
    double dy = 0.0;
    double deta = 0.0;

    Eigen::Index size() const { return static_cast<Eigen::Index>(ny) * neta; }
    double weight() const { return dy * deta; }
    double y(Eigen::Index k) const { return -spatial.half_width + dy * static_cast<double>(k / neta); }
    double eta(Eigen::Index k) const;
};

/// Builds the packet lattice closest to the requested spacings. 1-D grids only,
/// at most 2048 spatial points.
PacketGrid make_packet_grid(const GridSpec& spatial, double dy = 0.25, double deta = 0.25);

/// Packet margin in units of the unit packet width.
inline constexpr double kPacketMargin = 3.0;

struct PacketTransformResult {
    CVec values;
    /// False when u has mass within kPacketMargin of the box edge or the band edge.
    bool margin_ok = true;
};

class WavePacketTransform {
public:
    explicit WavePacketTransform(PacketGrid grid, int jobs = 1);

    const PacketGrid& grid() const { return grid_; }
    /// Columns phi_Y(x_j) sqrt(dx).
    const CMat& packets() const { return phi_; }

    /// Wu(Y) = <u, phi_Y> by spatial quadrature; u given as grid samples.
    PacketTransformResult transform(const CVec& u) const;

    /// | |Wu| - |u| | / |u| with the phase-lattice quadrature norm.
    double isometry_defect(const CVec& u) const;

    /// sum_Y a(Y) Pi_Y dy deta, acting on grid samples.
    CMat quantize(const CVec& symbol_values) const;
    CMat quantize(const std::function<cplx(double y, double eta)>& a) const;

    /// Symbol values on the lattice.
    CVec sample_symbol(const std::function<cplx(double y, double eta)>& a) const;

private:
    PacketGrid grid_;
    CMat phi_;
};

/// Free-function spelling of WavePacketTransform::transform.
PacketTransformResult wave_packet_transform(const WavePacketTransform& w, const CVec& u);

/// Free-function spelling of WavePacketTransform::quantize.
CMat wick_quantize(const WavePacketTransform& w, const CVec& symbol_values);

/// True when u (grid samples) is negligible within the packet margin of the box edge
/// and of the frequency band edge.
bool respects_margin(const GridSpec& grid, const CVec& u, double tol = 1e-10);

/// a(x, xi) = sum coeff x^px xi^pxi.
struct Monomial {
    int px = 0;
    int pxi = 0;
    double coeff = 0.0;
};

/// a(X) = <A X, X> + b.X + c in one dimension, X = (x, xi).
struct QuadraticSymbol {
    double a_xx = 0.0;
    double a_xxi = 0.0;
    double a_xixi = 0.0;
    double b_x = 0.0;
    double b_xi = 0.0;
    double c = 0.0;

    /// Throws DomainError for any monomial of total degree above 2.
    static QuadraticSymbol from_monomials(const std::vector<Monomial>& terms);
    double operator()(double x, double xi) const;
    /// Trace of the Hessian of a.
    double hessian_trace() const { return 2.0 * (a_xx + a_xixi); }
};

/// Weyl quantization with h = 1: x^2 by multiplication, xi^2 and xi as Fourier
/// multipliers, x xi as the symmetrized product (xD + Dx)/2.
CMat weyl_quadratic(const QuadraticSymbol& a, const GridSpec& grid);

/// L2-orthonormal Hermite functions centered at 0, as grid samples.
CMat hermite_test_functions(const GridSpec& grid, int count);

struct QuadraticRemainderReport {
    double remainder = 0.0;
    double residual = 0.0;
    double relative_residual = 0.0;
    int test_functions = 0;
};

/// | (a^Wick - a^w - tr(a'')/(8 pi)) Q |_2 over orthonormal Hermite test functions Q.
QuadraticRemainderReport wick_weyl_residual_quadratic(const WavePacketTransform& w,
                                                      const QuadraticSymbol& a,
                                                      int test_functions = 8);

}  // namespace subres
