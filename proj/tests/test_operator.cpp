#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "subres/linalg.hpp"
#include "subres/operator.hpp"

using namespace subres;

namespace {

// min_k |h^2 |k/(2L)|^2 - z| by enumerating integer frequencies.
double free_oracle(const GridSpec& g, double h, cplx z)
{
    double best = 1e300;
    const int n = g.points_per_dim;
    for (int k1 = -n / 2; k1 < n / 2; ++k1) {
        if (g.dim == 1) {
            const double xi = k1 / (2.0 * g.half_width);
            best = std::min(best, std::abs(h * h * xi * xi - z));
            continue;
        }
        for (int k2 = -n / 2; k2 < n / 2; ++k2) {
            const double q = (double(k1) * k1 + double(k2) * k2) / (4.0 * g.half_width * g.half_width);
            best = std::min(best, std::abs(h * h * q - z));
        }
    }
    return best;
}

CVec random_vector(Eigen::Index n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd;
    CVec u(n);
    for (auto& v : u) v = {nd(rng), nd(rng)};
    return u;
}

}  // namespace

TEST_CASE("grid validation")
{
    CHECK_NOTHROW(GridSpec{1, 8.0, 256}.validate());
    CHECK_THROWS_AS((GridSpec{1, 8.0, 100}.validate()), DomainError);
    CHECK_THROWS_AS((GridSpec{1, 8.0, 16}.validate()), DomainError);
    CHECK_THROWS_AS((GridSpec{3, 8.0, 32}.validate()), DomainError);
    CHECK_THROWS_AS((GridSpec{1, -1.0, 64}.validate()), DomainError);
    const GridSpec g{1, 4.0, 64};
    CHECK(g.spacing() == doctest::Approx(0.125));
    CHECK(g.axis()[0] == -4.0);
    const Vec f = g.frequencies();
    CHECK(f[0] == 0.0);
    CHECK(f[1] == doctest::Approx(1.0 / 8.0));
    CHECK(f[32] == doctest::Approx(-32.0 / 8.0));
}

TEST_CASE("free operator sigma_min equals frequency enumeration, 1-D and 2-D")
{
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> re(-1.0, 3.0), im(-2.0, 2.0);
    const GridSpec g1{1, 8.0, 256};
    const DiscreteOperator op1(builtin_zero(1), g1, 0.1);
    for (int i = 0; i < 5; ++i) {
        const cplx z(re(rng), im(rng));
        const double oracle = free_oracle(g1, 0.1, z);
        CHECK(shifted_sigma_min(op1, z).sigma == doctest::Approx(oracle).epsilon(1e-10));
    }
    const GridSpec g2{2, 4.0, 32};
    const DiscreteOperator op2(builtin_zero(2), g2, 0.2);
    for (int i = 0; i < 3; ++i) {
        const cplx z(re(rng), im(rng));
        CHECK(shifted_sigma_min(op2, z).sigma == doctest::Approx(free_oracle(g2, 0.2, z)).epsilon(1e-10));
    }
}

TEST_CASE("FFT application matches the dense matrix")
{
    for (const auto& [p, g] : {std::pair{builtin_by_name("ix2"), GridSpec{1, 6.0, 128}},
                               std::pair{builtin_example2(), GridSpec{2, 5.0, 32}}}) {
        const DiscreteOperator op(p, g, 0.07);
        const CVec u = random_vector(op.size(), 3);
        const CMat a = op.dense_matrix();
        CHECK((op.apply(u) - a * u).norm() < 1e-11 * (a * u).norm());
        CHECK((op.apply_kinetic(u) - (a * u - op.potential_samples().cwiseProduct(u))).norm() < 1e-10 * u.norm());
    }
}

TEST_CASE("dense matrix is capped")
{
    const DiscreteOperator op(builtin_zero(2), GridSpec{2, 4.0, 128}, 0.1);
    CHECK_THROWS_AS(op.dense_matrix(), SizeCapError);
}

TEST_CASE("left half-plane: sigma_min >= |Re z|")
{
    const DiscreteOperator op(builtin_by_name("ix2"), GridSpec{1, 6.0, 128}, 0.05);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> re(-3.0, -0.01), im(-4.0, 4.0);
    for (int i = 0; i < 10; ++i) {
        const cplx z(re(rng), im(rng));
        CHECK(shifted_sigma_min(op, z).sigma >= std::abs(z.real()) * (1 - 1e-12));
    }
}

TEST_CASE("dense and inverse-iteration paths agree")
{
    const DiscreteOperator op(builtin_by_name("ix2"), GridSpec{1, 5.0, 512}, 0.03);
    for (cplx z : {cplx(0.0, 1.0), cplx(0.2, 2.0), cplx(-0.5, 0.3)}) {
        const auto d = shifted_sigma_min(op, z, SigmaMethod::dense_svd);
        const auto it = shifted_sigma_min(op, z, SigmaMethod::inverse_iteration);
        CHECK(d.method == SigmaMethod::dense_svd);
        CHECK(it.method == SigmaMethod::inverse_iteration);
        CHECK(it.converged);
        CHECK(std::abs(d.sigma - it.sigma) <= 1e-5 * d.sigma);
    }
}

TEST_CASE("automatic method switches above 2048 unknowns")
{
    const DiscreteOperator op(builtin_zero(2), GridSpec{2, 4.0, 64}, 0.1);
    const auto s = shifted_sigma_min(op, cplx(0.3, 0.7));
    CHECK(s.method == SigmaMethod::inverse_iteration);
    CHECK(s.sigma == doctest::Approx(free_oracle(op.grid(), 0.1, cplx(0.3, 0.7))).epsilon(1e-6));
}

TEST_CASE("accretivity of the built-ins")
{
    for (const char* name : {"zero", "ix2", "morse1d"}) {
        const DiscreteOperator op(builtin_by_name(name), GridSpec{1, 8.0, 256}, 0.1);
        CHECK(accretivity_defect(op, 50, 7) >= -1e-10);
    }
    const DiscreteOperator op2(builtin_example2(), GridSpec{2, 6.0, 32}, 0.1);
    CHECK(accretivity_defect(op2, 50, 7) >= -1e-10);
}

TEST_CASE("binary export is row-major complex128")
{
    const DiscreteOperator op(builtin_by_name("ix2"), GridSpec{1, 4.0, 32}, 0.2);
    const std::string path = "operator_export_test.bin";
    op.export_binary(path);
    std::ifstream in(path, std::ios::binary);
    std::vector<double> buf(2 * 32 * 32);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)));
    REQUIRE(in.gcount() == static_cast<std::streamsize>(buf.size() * sizeof(double)));
    const CMat a = op.dense_matrix();
    double err = 0.0;
    for (int r = 0; r < 32; ++r)
        for (int c = 0; c < 32; ++c)
            err = std::max(err, std::abs(cplx(buf[2 * (32 * r + c)], buf[2 * (32 * r + c) + 1]) - a(r, c)));
    CHECK(err == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("truncation report for a well-resolved free probe")
{
    const auto r = truncation_report(builtin_zero(1), GridSpec{1, 4.0, 128}, 0.1, cplx(0.3, 0.2));
    CHECK(r.converged);
    CHECK(r.drift_box <= kTruncationTolerance);
    CHECK(r.drift_res <= kTruncationTolerance);
    CHECK_THROWS_AS(truncation_report(builtin_zero(1), GridSpec{1, 4.0, 4096}, 0.1, cplx(0.3, 0.2)), SizeCapError);
}
