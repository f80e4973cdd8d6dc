#include <doctest.h>

#include <cmath>

#include "subres/symbol_calculus.hpp"

using namespace subres;

namespace {

PhasePoint pp(double x, double xi) { return {Vec::Constant(1, x), Vec::Constant(1, xi)}; }

}  // namespace

TEST_CASE("cutoff is 1 near the origin, 0 far out, smooth and monotone between")
{
    CHECK(cutoff_psi(0.0) == 1.0);
    CHECK(cutoff_psi(-1.0) == 1.0);
    CHECK(cutoff_psi(2.0) == 0.0);
    CHECK(cutoff_psi(-3.5) == 0.0);
    CHECK(cutoff_psi(1.5) == doctest::Approx(0.5));
    double prev = 1.0;
    for (double t = 1.0; t <= 2.0; t += 0.01) {
        const double v = cutoff_psi(t);
        CHECK(v <= prev + 1e-15);
        CHECK(cutoff_psi(-t) == v);
        prev = v;
    }
    // Derivative against a central difference.
    for (double t : {1.2, 1.5, 1.8, -1.3}) {
        const double fd = (cutoff_psi(t + 1e-6) - cutoff_psi(t - 1e-6)) / 2e-6;
        CHECK(cutoff_psi_derivative(t) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("Poisson bracket conventions")
{
    const PhaseFunction x = [](const PhasePoint& X) { return X.x[0]; };
    const PhaseFunction xi = [](const PhasePoint& X) { return X.xi[0]; };
    const PhaseFunction x2 = [](const PhasePoint& X) { return X.x[0] * X.x[0]; };
    const PhaseFunction xi2 = [](const PhasePoint& X) { return X.xi[0] * X.xi[0]; };
    const PhasePoint X = pp(0.7, -1.3);
    CHECK(poisson_bracket(xi, x, X) == doctest::Approx(1.0));
    CHECK(poisson_bracket(x, xi, X) == doctest::Approx(-1.0));
    // {xi^2, x^2} = 2 xi * 2 x.
    CHECK(poisson_bracket(xi2, x2, X) == doctest::Approx(4 * 0.7 * -1.3));
}

TEST_CASE("closed-form bracket {Im p, Re p} matches the numerical bracket")
{
    const Potential p = builtin_example2();
    const PhasePoint X{Vec::Constant(2, 0.3), Vec::Constant(2, -0.8)};
    const PhaseFunction im_p = [&](const PhasePoint& Y) { return p.v2(Y.x); };
    const PhaseFunction re = [&](const PhasePoint& Y) { return re_p(p, Y); };
    CHECK(bracket_im_p_re_p(p, X) == doctest::Approx(poisson_bracket(im_p, re, X)).epsilon(1e-8));
    CHECK(hamilton_bracket_im_p(p, re, X) == doctest::Approx(poisson_bracket(im_p, re, X)).epsilon(1e-8));
}

TEST_CASE("lambda for ix^2")
{
    const Potential p = builtin_by_name("ix2");
    CHECK(lambda(p, pp(1.0, 2.0)) == doctest::Approx(std::sqrt(4.0 + 4.0)));
    CHECK(lambda(p, pp(0.0, 0.0)) == 0.0);
    CHECK_THROWS_AS(weight_G(p, pp(0.0, 0.0), 0.1, 0.5), DomainError);
}

TEST_CASE("weight g vanishes near lambda = 0 and is bounded")
{
    const Potential p = builtin_by_name("ix2");
    const double h = 0.01, eps = 1.0 / 32;
    CHECK(weight_g(p, pp(0.01, 0.01), h, eps) == 0.0);
    double sup = 0.0;
    for (double x = -4; x <= 4; x += 0.05)
        for (double xi = -4; xi <= 4; xi += 0.05) sup = std::max(sup, std::abs(weight_g(p, pp(x, xi), h, eps)));
    CHECK(sup <= 1.0);
    CHECK(sup > 0.0);
    // Odd in xi for a potential with V1 = 0.
    CHECK(weight_g(p, pp(0.4, 0.3), h, eps) == doctest::Approx(-weight_g(p, pp(0.4, -0.3), h, eps)));
}

TEST_CASE("analytic gradient of g matches finite differences")
{
    const Potential p = builtin_by_name("ix2");
    const double h = 0.03, eps = 0.25;
    for (const PhasePoint& X : {pp(0.5, 0.1), pp(-1.2, 0.4), pp(0.2, -0.05), pp(2.0, 0.9)}) {
        const WeightGradient g = weight_g_gradient(p, X, h, eps);
        CHECK(g.analytic);
        const double s = 1e-6;
        const double fx = (weight_g(p, pp(X.x[0] + s, X.xi[0]), h, eps) - weight_g(p, pp(X.x[0] - s, X.xi[0]), h, eps)) / (2 * s);
        const double fk = (weight_g(p, pp(X.x[0], X.xi[0] + s), h, eps) - weight_g(p, pp(X.x[0], X.xi[0] - s), h, eps)) / (2 * s);
        CHECK(g.d_x[0] == doctest::Approx(fx).epsilon(1e-5).scale(1.0));
        CHECK(g.d_xi[0] == doctest::Approx(fk).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("h outside (0, 1] is rejected")
{
    const Potential p = builtin_by_name("ix2");
    CHECK_THROWS_AS(weight_g(p, pp(1, 1), 0.0, 0.5), DomainError);
    CHECK_THROWS_AS(weight_g(p, pp(1, 1), 2.0, 0.5), DomainError);
}

TEST_CASE("shell grid concentrates around the zero of lambda")
{
    const Potential p = builtin_by_name("ix2");
    const PhaseGrid grid = shell_phase_grid(p, Box::cube(1, -4, 4), 0.01);
    CHECK(grid.info.kind == "shells+rectangular");
    CHECK(grid.info.centers == 1);
    CHECK(grid.info.radius_min == doctest::Approx(0.0025));
    CHECK(grid.info.size == grid.points.size());
    double closest = 1e9;
    for (const PhasePoint& X : grid.points) closest = std::min(closest, std::hypot(X.x[0], X.xi[0]));
    CHECK(closest <= 0.0025 + 1e-12);
}

TEST_CASE("certificate for ix^2 passes with small epsilon and fails at epsilon = 0")
{
    const Potential p = builtin_by_name("ix2");
    const std::vector<double> hs{0.1, 0.03, 0.01};
    const PhaseGrid grid = shell_phase_grid(p, Box::cube(1, -4, 4), 0.01);
    const WeightCertificate good = certify_subellipticity(p, grid, hs, 1.0 / 32, 1.0);
    CHECK(good.pass);
    CHECK(good.c_lower > 0.0);
    CHECK(good.c_lemma > 0.0);
    CHECK(good.max_abs_g <= 1.0);
    CHECK(good.grad_spread <= 2.0);
    CHECK(good.per_h.size() == 3);

    // Without g the ratio at xi = 0 only comes from c0 h, which is what the lemma criterion excludes.
    const WeightCertificate flat = certify_subellipticity(p, grid, hs, 0.0, 1.0);
    CHECK_FALSE(flat.pass);
    CHECK(flat.c_lemma <= 0.0);
}

TEST_CASE("calibration finds working parameters for ix^2")
{
    const Potential p = builtin_by_name("ix2");
    const std::vector<double> hs{0.1, 0.03, 0.01};
    const PhaseGrid grid = shell_phase_grid(p, Box::cube(1, -4, 4), 0.01);
    const CalibrationResult r = calibrate_weights(p, grid, hs);
    CHECK(r.success);
    CHECK(r.certificate.pass);
    CHECK(r.params.epsilon > 0.0);
    CHECK(r.candidates_tried >= 1);
}

TEST_CASE("certificate is identical with several workers")
{
    const Potential p = builtin_by_name("ix2");
    const PhaseGrid grid = shell_phase_grid(p, Box::cube(1, -4, 4), 0.03);
    const auto a = certify_subellipticity(p, grid, {0.1, 0.03}, 0.125, 2.0, 1);
    const auto b = certify_subellipticity(p, grid, {0.1, 0.03}, 0.125, 2.0, 3);
    CHECK(a.c_lower == b.c_lower);
    CHECK(a.max_abs_g == b.max_abs_g);
}
