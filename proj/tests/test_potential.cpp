#include <doctest.h>

#include <cmath>

#include "subres/potential.hpp"

using namespace subres;

namespace {

Vec v1d(double x) { return Vec::Constant(1, x); }

Vec v2d(double a, double b)
{
    Vec x(2);
    x << a, b;
    return x;
}

}  // namespace

TEST_CASE("ix^2 values and analytic derivatives")
{
    const Potential p = builtin_by_name("ix2");
    CHECK(p.dim() == 1);
    for (double x : {-2.0, -0.3, 0.0, 1.7}) {
        CHECK(p.v1(v1d(x)) == doctest::Approx(0.0));
        CHECK(p.v2(v1d(x)) == doctest::Approx(x * x));
        CHECK(p.grad_v2(v1d(x))[0] == doctest::Approx(2 * x));
        CHECK(p.hess_v2(v1d(x))(0, 0) == doctest::Approx(2.0));
        CHECK(p.fd_grad_v2(v1d(x))[0] == doctest::Approx(2 * x).epsilon(1e-8));
    }
}

TEST_CASE("example2 derivatives against hand-written formulas")
{
    const Potential p = builtin_example2();
    CHECK(p.t_metadata() == 1.0);
    const Vec x = v2d(0.4, -1.1);
    CHECK(p.v2(x) == doctest::Approx(0.16 + std::sin(-1.1)));
    const Vec g = p.grad_v2(x);
    CHECK(g[0] == doctest::Approx(0.8));
    CHECK(g[1] == doctest::Approx(std::cos(-1.1)));
    const Mat h = p.hess_v2(x);
    CHECK(h(0, 0) == doctest::Approx(2.0));
    CHECK(h(1, 1) == doctest::Approx(-std::sin(-1.1)));
    CHECK(h(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("finite-difference fallback matches the closed form")
{
    PotentialParts parts;
    parts.dim = 1;
    parts.name = "cubic-ish";
    parts.v1 = [](const Vec& x) { return x[0] * x[0] * x[0] * x[0]; };
    parts.v2 = [](const Vec& x) { return std::sin(2 * x[0]); };
    const Potential p(parts);
    CHECK_FALSE(p.has_analytic_gradients());
    CHECK(p.grad_v1(v1d(0.7))[0] == doctest::Approx(4 * 0.343).epsilon(1e-8));
    CHECK(p.grad_v2(v1d(0.7))[0] == doctest::Approx(2 * std::cos(1.4)).epsilon(1e-8));
    CHECK(p.hess_v2(v1d(0.7))(0, 0) == doctest::Approx(-4 * std::sin(1.4)).epsilon(1e-5));
}

TEST_CASE("construction rejects bad inputs")
{
    CMat nonsym(2, 2);
    nonsym << cplx(1, 0), cplx(0, 1), cplx(0, 0), cplx(1, 0);
    CHECK_THROWS_AS(builtin_quadratic(nonsym), DomainError);
    CMat indefinite(1, 1);
    indefinite(0, 0) = cplx(-1.0, 1.0);
    CHECK_THROWS_AS(builtin_quadratic(indefinite), DomainError);
    CVec c(1);
    c[0] = cplx(1.0, 1.0);
    CHECK_THROWS_AS(builtin_linear(c), DomainError);
    CHECK_THROWS_AS(builtin_by_name("no-such-potential"), ConfigError);
}

TEST_CASE("admissibility: example2 passes with T = 1 and fails below")
{
    const Potential p = builtin_example2();
    const Box box = Box::cube(2, -6, 6);
    const auto ok = check_admissibility(p, box, 32, 1.0);
    CHECK(ok.pass.all());
    CHECK(ok.degenerate_points == 0);
    CHECK(ok.v1_min >= 0.0);

    // The critical points (0, pi/2 + k pi) carry |V2| = 1.
    const auto bad = check_admissibility(p, box, 32, 0.5);
    CHECK_FALSE(bad.pass.vv_prime_t);
    REQUIRE(bad.worst_point.has_value());
    CHECK(std::abs((*bad.worst_point)[0]) < 1e-8);
    CHECK(std::abs(std::cos((*bad.worst_point)[1])) < 1e-8);
}

TEST_CASE("admissibility: quadratic and Morse built-ins")
{
    CHECK(check_admissibility(builtin_by_name("ix2"), Box::cube(1, -6, 6), 64, 0.0).pass.all());
    const Potential morse = builtin_morse1d();
    CHECK(check_admissibility(morse, Box::cube(1, -6, 6), 64, 2.0).pass.all());
    CHECK_FALSE(check_admissibility(morse, Box::cube(1, -6, 6), 64, 1.9).pass.all());
}

TEST_CASE("admissibility: a linear imaginary potential fails with T = 0")
{
    CVec c(1);
    c[0] = cplx(0.0, 1.0);
    const Potential p = builtin_linear(c);
    const auto r = check_admissibility(p, Box::cube(1, -6, 6), 64, 0.0);
    CHECK(r.pass.v1_nonnegative);
    CHECK(r.pass.hessian_bounded);
    CHECK_FALSE(r.pass.vv_prime_t);
    // |V2| / (1 + |V2'|^2) = |x| / 2 grows linearly with the box.
    CHECK(r.growth_ratio == doctest::Approx(2.0).epsilon(0.05));

    // Restricted to |V2'| <= 1/2 the hypothesis is vacuous.
    const auto restricted = check_admissibility(p, Box::cube(1, -6, 6), 64, 0.0, 0.5);
    CHECK(restricted.pass.vv_prime_t);
    REQUIRE(restricted.restricted_level.has_value());
    CHECK(*restricted.restricted_level == 0.5);
}

TEST_CASE("admissibility flags negative real parts and bad arguments")
{
    PotentialParts parts;
    parts.dim = 1;
    parts.v1 = [](const Vec& x) { return -std::exp(-x[0] * x[0]); };
    parts.v2 = [](const Vec& x) { return x[0] * x[0]; };
    const Potential p(parts);
    const auto r = check_admissibility(p, Box::cube(1, -4, 4), 33, 0.0);
    CHECK_FALSE(r.pass.v1_nonnegative);
    CHECK(r.v1_min == doctest::Approx(-1.0));

    CHECK_THROWS_AS(check_admissibility(p, Box::cube(1, -4, 4), 8, 0.0), DomainError);
    CHECK_THROWS_AS(check_admissibility(p, Box::cube(2, -4, 4), 32, 0.0), DomainError);
    CHECK_THROWS_AS(check_admissibility(p, Box::cube(1, -4, 4), 32, -1.0), DomainError);
}

TEST_CASE("non-finite values raise")
{
    PotentialParts parts;
    parts.dim = 1;
    parts.v1 = [](const Vec& x) { return x[0] > 1.0 ? std::nan("") : 0.0; };
    parts.v2 = [](const Vec& x) { return x[0]; };
    CHECK_THROWS_AS(check_admissibility(Potential(parts), Box::cube(1, -2, 2), 32, 0.0), EvaluationError);
}
