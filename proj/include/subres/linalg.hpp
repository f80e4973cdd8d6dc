#pragma once

// Thin LAPACK wrappers for the dense kernels the resolvent probes need.

#include <optional>

#include "subres/common.hpp"

namespace subres::linalg {

/// All singular values of `a`, descending (LAPACK zgesdd, no vectors).
Vec singular_values(CMat a);

/// Smallest singular value via zgesdd.
double smallest_singular_value(CMat a);

/// Largest singular value (spectral norm).
double spectral_norm(CMat a);

/// Eigenvalues of the Hermitian part (A + A^H)/2, ascending.
Vec hermitian_part_eigenvalues(const CMat& a);

/// LU factorization with partial pivoting (zgetrf).
class LuFactorization {
public:
    explicit LuFactorization(CMat a);

    /// False when zgetrf reported an exactly singular U factor.
    bool ok() const { return info_ == 0; }
    int info() const { return info_; }
    Eigen::Index size() const { return lu_.rows(); }

    /// Solves A X = B in place.
    void solve(CMat& b) const;
    /// Solves A^H X = B in place.
    void solve_adjoint(CMat& b) const;

private:
    CMat lu_;
    std::vector<int> pivots_;
    int info_ = 0;
};

struct InverseIterationResult {
    double sigma_min = 0.0;
    int iterations = 0;
    bool converged = false;
    bool singular = false;
};

struct InverseIterationOptions {
    double rel_tol = 1e-6;
    int max_iterations = 300;
    unsigned long long seed = 42;
};

/// Smallest singular value of `a` from Lanczos on (A^H A)^{-1} (one LU factorization,
/// two triangular solves per step). Converged once the Ritz residual is below
/// rel_tol times the Ritz value.
InverseIterationResult smallest_singular_value_inverse_iteration(
    CMat a, const InverseIterationOptions& options = {});

}  // namespace subres::linalg
