#pragma once

#include <memory>
#include <optional>
#include <string>

#include "subres/common.hpp"
#include "subres/potential.hpp"

namespace subres {

/// Periodic box [-L, L)^n sampled with N points per axis.
struct GridSpec {
    int dim = 1;
    double half_width = 8.0;
    int points_per_dim = 256;

    /// Throws DomainError unless n in {1,2}, N >= 32 is a power of two and L > 0.
    void validate() const;
    Eigen::Index total_points() const;
    double spacing() const { return 2.0 * half_width / points_per_dim; }
    /// x_j = -L + j dx.
    Vec axis() const;
    /// Spatial point of flat index (row-major, last axis fastest).
    Vec point(Eigen::Index flat) const;
    /// Frequencies k/(2L) in FFT order, k in [-N/2, N/2).
    Vec frequencies() const;

    bool operator==(const GridSpec&) const = default;
};

inline constexpr Eigen::Index kDenseCap = 4096;
inline constexpr Eigen::Index kDenseSvdLimit = 2048;

enum class SigmaMethod { automatic, dense_svd, inverse_iteration };

/// Fourier-spectral discretization of -(h^2/4pi^2) Laplacian + V on the periodic box.
class DiscreteOperator {
public:
    DiscreteOperator(Potential potential, GridSpec grid, double h);

    const GridSpec& grid() const { return grid_; }
    double h() const { return h_; }
    const Potential& potential() const { return potential_; }
    /// h^2 |xi_k|^2 in FFT order.
    const Vec& multipliers() const { return multipliers_; }
    const CVec& potential_samples() const { return samples_; }
    Eigen::Index size() const { return samples_.size(); }

    /// Matrix-free application via FFTW. Safe to call from several threads.
    CVec apply(const CVec& u) const;
    /// Kinetic part alone.
    CVec apply_kinetic(const CVec& u) const;

    /// Dense N^n x N^n matrix. Throws SizeCapError above kDenseCap.
    CMat dense_matrix() const;

    /// Writes the dense matrix as row-major little-endian complex128.
    void export_binary(const std::string& path) const;

private:
    struct Plans;

    Potential potential_;
    GridSpec grid_;
    double h_;
    Vec multipliers_;
    CVec samples_;
    std::shared_ptr<const Plans> plans_;
};

/// Minimum over `trials` random complex u of Re<Pu,u>/|u|^2.
double accretivity_defect(const DiscreteOperator& op, int trials, unsigned long long seed = 42);

struct ShiftedSigma {
    double sigma = 0.0;
    SigmaMethod method = SigmaMethod::dense_svd;
    bool converged = false;
    bool singular = false;
    int iterations = 0;
};

/// Smallest singular value of P_N - z. Full SVD up to kDenseSvdLimit unknowns,
/// LU-based inverse iteration beyond.
ShiftedSigma shifted_sigma_min(const DiscreteOperator& op, cplx z,
                               SigmaMethod method = SigmaMethod::automatic,
                               double rel_tol = 1e-6);

struct TruncationReport {
    GridSpec grid;
    double h = 0.0;
    cplx z;
    double sigma_base = 0.0;
    /// (2L, 2N): same spacing, doubled box.
    double sigma_box = 0.0;
    /// (L, 2N): doubled resolution.
    double sigma_res = 0.0;
    double drift_box = 0.0;
    double drift_res = 0.0;
    bool converged = false;
};

inline constexpr double kTruncationTolerance = 1e-3;

/// Relative drift of sigma_min(P_N - z) under L -> 2L (with N -> 2N) and N -> 2N.
/// A previously computed base value may be passed to skip recomputing it.
TruncationReport truncation_report(const Potential& p, const GridSpec& grid, double h, cplx z,
                                   std::optional<double> sigma_base = std::nullopt);

}  // namespace subres
