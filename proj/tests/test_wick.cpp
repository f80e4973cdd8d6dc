#include <doctest.h>

#include <cmath>
#include <random>

#include "subres/linalg.hpp"
#include "subres/wick.hpp"

using namespace subres;

namespace {

const GridSpec kGrid{1, 8.0, 256};

CVec gaussian(const GridSpec& g, double center, double width, double freq)
{
    const Vec x = g.axis();
    CVec u(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double t = (x[j] - center) / width;
        u[j] = std::exp(-kPi * t * t) * std::polar(1.0, 2 * kPi * freq * x[j]);
    }
    return u;
}

}  // namespace

TEST_CASE("packet lattice tiles the box and the band")
{
    const PacketGrid pg = make_packet_grid(kGrid, 0.25, 0.25);
    CHECK(pg.ny * pg.dy == doctest::Approx(16.0));
    CHECK(pg.neta * pg.deta == doctest::Approx(256.0 / 16.0));
    CHECK(pg.y(0) == -8.0);
    CHECK_THROWS_AS(make_packet_grid(GridSpec{2, 4.0, 32}), DomainError);
    CHECK_THROWS_AS(make_packet_grid(GridSpec{1, 64.0, 4096}), SizeCapError);
}

TEST_CASE("packets are unit vectors, so each Pi_Y is a rank-one projector")
{
    const WavePacketTransform w(make_packet_grid(kGrid));
    const CMat& phi = w.packets();
    for (Eigen::Index k = 0; k < phi.cols(); k += 37) {
        const CVec c = phi.col(k);
        CHECK(c.norm() == doctest::Approx(1.0).epsilon(1e-10));
        const CMat proj = c * c.adjoint();
        CHECK((proj * proj - proj).norm() < 1e-10);
        CHECK(std::abs(proj.trace() - 1.0) < 1e-10);
    }
}

TEST_CASE("isometry on Gaussians")
{
    const WavePacketTransform w(make_packet_grid(kGrid));
    for (double c : {0.0, 1.0, -1.5})
        for (double width : {0.8, 1.3}) {
            const CVec u = gaussian(kGrid, c, width, 0.7);
            CHECK(respects_margin(kGrid, u));
            CHECK(w.isometry_defect(u) <= 1e-6);
        }
}

TEST_CASE("isometry defect shrinks under lattice refinement")
{
    const CVec u = gaussian(kGrid, 0.3, 1.0, 0.2);
    const WavePacketTransform coarse(make_packet_grid(kGrid, 1.0, 1.0));
    const WavePacketTransform fine(make_packet_grid(kGrid, 0.5, 0.5));
    const double dc = coarse.isometry_defect(u);
    const double df = fine.isometry_defect(u);
    CHECK(dc > 0.0);
    CHECK(df * 3.0 <= dc);
}

TEST_CASE("transform of a packet peaks at its own phase point")
{
    const WavePacketTransform w(make_packet_grid(kGrid));
    const CVec u = gaussian(kGrid, 1.0, 1.0, 1.0);
    const PacketTransformResult r = wave_packet_transform(w, u);
    CHECK(r.margin_ok);
    Eigen::Index best = 0;
    r.values.cwiseAbs().maxCoeff(&best);
    const PacketGrid& g = w.grid();
    CHECK(std::abs(g.y(best) - 1.0) <= g.dy);
    CHECK(std::abs(g.eta(best) - 1.0) <= g.deta);
}

TEST_CASE("margin check")
{
    CHECK(respects_margin(kGrid, gaussian(kGrid, 0.0, 1.0, 0.0)));
    CHECK_FALSE(respects_margin(kGrid, gaussian(kGrid, 7.0, 1.0, 0.0)));
    // Frequency close to the band edge N/(4L).
    CHECK_FALSE(respects_margin(kGrid, gaussian(kGrid, 0.0, 1.0, 9.0)));
}

TEST_CASE("a = 1 quantizes to the identity on margin-respecting functions")
{
    const WavePacketTransform w(make_packet_grid(kGrid));
    const CMat one = w.quantize([](double, double) { return cplx(1.0, 0.0); });
    const CVec u = gaussian(kGrid, -0.5, 1.1, -0.4);
    CHECK((one * u - u).norm() <= 1e-5 * u.norm());
}

TEST_CASE("positivity, Hermiticity and the sup-norm bound")
{
    const WavePacketTransform w(make_packet_grid(kGrid));
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 4; ++trial) {
        CVec a(w.grid().size());
        for (auto& v : a) v = unit(rng);
        const CMat q = wick_quantize(w, a);
        CHECK(linalg::hermitian_part_eigenvalues(q).minCoeff() >= -1e-8);
        CHECK((q - q.adjoint()).norm() <= 1e-10 * a.cwiseAbs().maxCoeff());
        CHECK(linalg::spectral_norm(q) <= a.cwiseAbs().maxCoeff() + 1e-6);
    }
    // Complex symbols: the adjoint quantizes the conjugate.
    CVec b(w.grid().size());
    for (auto& v : b) v = cplx(unit(rng), unit(rng));
    CHECK((wick_quantize(w, b).adjoint() - wick_quantize(w, b.conjugate())).norm() < 1e-10);
}

TEST_CASE("quadratic symbols")
{
    CHECK_THROWS_AS(QuadraticSymbol::from_monomials({{3, 0, 1.0}}), DomainError);
    CHECK_THROWS_AS(QuadraticSymbol::from_monomials({{1, 2, 1.0}}), DomainError);
    const QuadraticSymbol a = QuadraticSymbol::from_monomials({{2, 0, 1.0}, {0, 2, 1.0}, {1, 1, 0.5}, {0, 0, 3.0}});
    CHECK(a(1.0, 2.0) == doctest::Approx(1 + 4 + 1 + 3));
    CHECK(a.hessian_trace() == doctest::Approx(4.0));
}

TEST_CASE("Wick minus Weyl for |x|^2 + |xi|^2 is the Gaussian moment constant")
{
    // r = int_0^1 (1-t) dt * int <a'' Y, Y> e^{-2 pi |Y|^2} 2 dY with a'' = 2 I, by quadrature.
    double moment = 0.0;
    const double d = 0.01;
    for (double y = -4; y <= 4; y += d)
        for (double e = -4; e <= 4; e += d) moment += 2 * (y * y + e * e) * std::exp(-2 * kPi * (y * y + e * e)) * 2 * d * d;
    const double oracle = 0.5 * moment;
    CHECK(oracle == doctest::Approx(1.0 / (2 * kPi)).epsilon(1e-8));

    const WavePacketTransform w(make_packet_grid(GridSpec{1, 8.0, 256}));
    const QuadraticSymbol a = QuadraticSymbol::from_monomials({{2, 0, 1.0}, {0, 2, 1.0}});
    const QuadraticRemainderReport r = wick_weyl_residual_quadratic(w, a);
    CHECK(r.remainder == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(r.residual <= 1e-4);
    CHECK(r.test_functions == 8);
}

TEST_CASE("linear and constant symbols: Wick equals Weyl")
{
    const WavePacketTransform w(make_packet_grid(GridSpec{1, 8.0, 256}));
    const QuadraticSymbol lin = QuadraticSymbol::from_monomials({{1, 0, 1.0}, {0, 1, -2.0}});
    const auto r = wick_weyl_residual_quadratic(w, lin);
    CHECK(r.remainder == 0.0);
    CHECK(r.residual <= 1e-6);
    const QuadraticSymbol c = QuadraticSymbol::from_monomials({{0, 0, 2.5}});
    const auto rc = wick_weyl_residual_quadratic(w, c);
    CHECK(rc.residual <= 1e-6);
    const CMat weyl = weyl_quadratic(c, GridSpec{1, 8.0, 256});
    CHECK((weyl - 2.5 * CMat::Identity(256, 256)).norm() < 1e-12);
}

TEST_CASE("Hermite test functions are orthonormal")
{
    const GridSpec g{1, 8.0, 256};
    const CMat q = hermite_test_functions(g, 6);
    const CMat gram = q.adjoint() * q * g.spacing();
    CHECK((gram - CMat::Identity(6, 6)).norm() < 1e-10);
}
