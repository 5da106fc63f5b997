#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qnek/series.hpp"

#include <random>

using namespace qnek;

namespace {

const QBase B(cplx(0.4, 0.05));

TruncatedSeries make(cplx pref, std::vector<cplx> c) {
    TruncatedSeries s;
    s.prefactor_exponent = pref;
    s.coeffs = std::move(c);
    return s;
}

TruncatedSeries random_series(std::mt19937& rng, int order, cplx pref) {
    std::uniform_real_distribution<real> d(-1.0, 1.0);
    std::vector<cplx> c(order + 1);
    for (auto& x : c) x = {d(rng), d(rng)};
    return make(pref, std::move(c));
}

} // namespace

TEST_CASE("qshift basics") {
    auto c0 = make(cplx(0.0), {cplx(3.0, 1.0)});
    CHECK(qshift(c0, B).coeffs[0] == cplx(3.0, 1.0));

    auto x = make(cplx(0.0), {cplx(0.0), cplx(1.0)});
    auto sx = qshift(x, B);
    CHECK(std::abs(sx.coeffs[1] - B.q) < 1e-15);

    auto xt = make(cplx(0.7, -0.2), {cplx(1.0)});
    auto sxt = qshift(xt, B);
    CHECK(std::abs(sxt.coeffs[0] - B.pow(cplx(0.7, -0.2))) < 1e-15);

    // f(q^2 x) = qshift applied twice
    auto rng = std::mt19937(3);
    auto f = random_series(rng, 6, cplx(0.3, 0.1));
    auto a = qshift(qshift(f, B), B);
    auto b = qshift(f, B, 2);
    for (int n = 0; n <= 6; ++n)
        CHECK(std::abs(a.coeffs[n] - b.coeffs[n]) < 1e-14);
}

TEST_CASE("add/sub with integer prefactor offset") {
    auto a = make(cplx(0.0), {cplx(1.0), cplx(1.0)});
    auto b = make(cplx(0.0), {cplx(1.0), cplx(-1.0)});
    auto s = add(a, b);
    CHECK(s.coeffs[0] == cplx(2.0));
    CHECK(s.coeffs[1] == cplx(0.0));

    // x^{0.5}*(1) + x^{1.5}*(2) = x^{0.5}*(1 + 2x)
    auto p = make(cplx(0.5), {cplx(1.0), cplx(0.0)});
    auto r = make(cplx(1.5), {cplx(2.0), cplx(0.0)});
    auto sum = add(p, r);
    CHECK(std::abs(sum.prefactor_exponent - cplx(0.5)) < 1e-12);
    CHECK(sum.coeffs[0] == cplx(1.0));
    CHECK(sum.coeffs[1] == cplx(2.0));

    auto bad = make(cplx(0.25), {cplx(1.0)});
    CHECK_THROWS_AS(add(a, bad), std::invalid_argument);
}

TEST_CASE("mul truncates and adds exponents") {
    auto a = make(cplx(0.0), {cplx(1.0), cplx(1.0), cplx(0.0)});
    auto b = make(cplx(0.0), {cplx(1.0), cplx(-1.0), cplx(0.0)});
    auto p = mul(a, b);
    CHECK(p.coeffs[0] == cplx(1.0));
    CHECK(p.coeffs[1] == cplx(0.0));
    CHECK(p.coeffs[2] == cplx(-1.0));

    CHECK(scale(cplx(0.0), a).coeffs[1] == cplx(0.0));
}

TEST_CASE("qshift is linear and multiplicative") {
    auto rng = std::mt19937(4);
    auto a = random_series(rng, 10, cplx(0.2, -0.4));
    auto b = random_series(rng, 10, cplx(1.2, -0.4));  // integer offset
    auto lhs = qshift(add(a, b), B);
    auto rhs = add(qshift(a, B), qshift(b, B));
    for (int n = 0; n <= 10; ++n)
        CHECK(std::abs(lhs.coeffs[n] - rhs.coeffs[n]) < 1e-14);

    auto c = random_series(rng, 10, cplx(0.0));
    auto d = random_series(rng, 10, cplx(0.0));
    auto l2 = qshift(mul(c, d), B);
    auto r2 = mul(qshift(c, B), qshift(d, B));
    for (int n = 0; n <= 10; ++n)
        CHECK(std::abs(l2.coeffs[n] - r2.coeffs[n]) < 1e-13);
}

TEST_CASE("compare") {
    auto rng = std::mt19937(5);
    auto a = random_series(rng, 5, cplx(0.1));
    CHECK(compare(a, a, 1e-9).pass);
    CHECK(compare(a, a, 1e-9).max_residual == 0.0);

    auto b = a;
    b.coeffs[3] += cplx(1.0);
    CHECK_FALSE(compare(a, b, 1e-9).pass);

    auto c = a;
    c.coeffs[2] += cplx(1e-14);
    CHECK(compare(a, c, 1e-9).pass);
}

TEST_CASE("eval consistency") {
    auto s = make(cplx(0.5), {cplx(1.0), cplx(2.0)});
    const cplx logx = std::log(cplx(0.3, 0.2));
    const cplx x = std::exp(logx);
    const cplx expect = std::exp(cplx(0.5) * logx) * (cplx(1.0) + cplx(2.0) * x);
    CHECK(std::abs(s.eval(logx) - expect) < 1e-14);
}
