#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "subres/linalg.hpp"

namespace subres {

std::string format_point(const Vec& x)
{
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (i) os << ", ";
        os << x[i];
    }
    os << ')';
    return os.str();
}

}  // namespace subres

namespace subres::linalg {

namespace {

lapack_int as_lapack(Eigen::Index n) { return static_cast<lapack_int>(n); }

}  // namespace

Vec singular_values(CMat a)
{
    const lapack_int m = as_lapack(a.rows());
    const lapack_int n = as_lapack(a.cols());
    Vec s(std::min(m, n));
    if (s.size() == 0) return s;
    const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, a.data(), m, s.data(),
                                           nullptr, 1, nullptr, 1);
    if (info != 0) throw Error("zgesdd failed with info=" + std::to_string(info));
    return s;
}

double smallest_singular_value(CMat a)
{
    const Vec s = singular_values(std::move(a));
    return s.size() ? s[s.size() - 1] : 0.0;
}

double spectral_norm(CMat a)
{
    const Vec s = singular_values(std::move(a));
    return s.size() ? s[0] : 0.0;
}

Vec hermitian_part_eigenvalues(const CMat& a)
{
    const CMat herm = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> solver(herm, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error("Hermitian eigensolver failed");
    return solver.eigenvalues();
}

LuFactorization::LuFactorization(CMat a) : lu_(std::move(a))
{
    if (lu_.rows() != lu_.cols()) throw DomainError("LU factorization needs a square matrix");
    const lapack_int n = as_lapack(lu_.rows());
    pivots_.resize(static_cast<std::size_t>(n));
    info_ = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lu_.data(), n, pivots_.data());
    if (info_ < 0) throw Error("zgetrf rejected argument " + std::to_string(-info_));
}

void LuFactorization::solve(CMat& b) const
{
    const lapack_int n = as_lapack(lu_.rows());
    const lapack_int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, as_lapack(b.cols()),
                                           lu_.data(), n, pivots_.data(), b.data(), n);
    if (info != 0) throw Error("zgetrs failed with info=" + std::to_string(info));
}

void LuFactorization::solve_adjoint(CMat& b) const
{
    const lapack_int n = as_lapack(lu_.rows());
    const lapack_int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'C', n, as_lapack(b.cols()),
                                           lu_.data(), n, pivots_.data(), b.data(), n);
    if (info != 0) throw Error("zgetrs failed with info=" + std::to_string(info));
}

InverseIterationResult smallest_singular_value_inverse_iteration(
    CMat a, const InverseIterationOptions& options)
{
    InverseIterationResult result;
    const Eigen::Index n = a.rows();
    const LuFactorization lu(std::move(a));
    if (!lu.ok()) {
        // Exactly singular pivot: z is numerically an eigenvalue.
        result.sigma_min = 0.0;
        result.converged = true;
        result.singular = true;
        return result;
    }

    // Lanczos on M = (A^H A)^{-1} with full reorthogonalization. The largest Ritz
    // value of M is 1/sigma_min^2; a Ritz pair (theta, v) has |M v - theta v| equal to
    // beta_k |last component of its eigenvector in T_k|.
    const int steps = static_cast<int>(std::min<Eigen::Index>(options.max_iterations, n));
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    CMat q(n, steps + 1);
    for (Eigen::Index i = 0; i < n; ++i) q(i, 0) = cplx(normal(rng), normal(rng));
    q.col(0).normalize();

    std::vector<double> alpha, beta;
    for (int k = 0; k < steps; ++k) {
        CMat w = q.col(k);
        lu.solve_adjoint(w);
        lu.solve(w);
        if (!w.allFinite()) {
            result.sigma_min = 0.0;
            result.iterations = k + 1;
            result.converged = true;
            result.singular = true;
            return result;
        }
        alpha.push_back(q.col(k).dot(w.col(0)).real());
        // Two passes of classical Gram-Schmidt against the whole basis.
        for (int pass = 0; pass < 2; ++pass) {
            const CVec c = q.leftCols(k + 1).adjoint() * w.col(0);
            w.col(0) -= q.leftCols(k + 1) * c;
        }
        const double b = w.col(0).norm();
        beta.push_back(b);

        const int m = k + 1;
        if (m > 8 && m % 4 != 0 && m < steps && b > 1e-14 * std::abs(alpha.back())) {
            q.col(k + 1) = w.col(0) / b;
            continue;
        }
        Vec diag = Eigen::Map<const Vec>(alpha.data(), m);
        Vec sub = Eigen::Map<const Vec>(beta.data(), m - 1);
        Eigen::SelfAdjointEigenSolver<Mat> es;
        es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        const double theta = es.eigenvalues()[m - 1];
        const double residual = b * std::abs(es.eigenvectors()(m - 1, m - 1));
        result.iterations = m;
        if (!(theta > 0.0) || !std::isfinite(theta)) {
            result.sigma_min = 0.0;
            result.converged = true;
            result.singular = true;
            return result;
        }
        result.sigma_min = 1.0 / std::sqrt(theta);
        // Relative error of sigma is half that of theta, which the residual bounds.
        if (residual <= options.rel_tol * theta || b <= 1e-14 * theta) {
            result.converged = true;
            return result;
        }
        q.col(k + 1) = w.col(0) / b;
    }
    return result;
}

}  // namespace subres::linalg
