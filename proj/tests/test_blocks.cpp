#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qnek/blocks.hpp"

#include <random>

using namespace qnek;

namespace {

const QBase B03(cplx(0.3, 0.0));

real rel_err(cplx got, cplx want) {
    return std::abs(got - want) / std::max(real(1.0), std::abs(want));
}

// traceless sigma with pairwise-separated entries
CVec draw_sigma(int N, std::mt19937& rng) {
    std::uniform_real_distribution<real> dre(0.08, 0.46), dim(-0.05, 0.05);
    for (;;) {
        CVec s(N);
        cplx mean{0.0, 0.0};
        for (auto& v : s) {
            v = cplx(dre(rng), dim(rng));
            mean += v;
        }
        for (auto& v : s) v -= mean / cplx(real(N));
        bool ok = true;
        for (int k = 0; k < N && ok; ++k)
            for (int kp = k + 1; kp < N; ++kp)
                if (std::abs(s[k] - s[kp]) < 0.06) ok = false;
        if (ok) return s;
    }
}

cplx draw_theta(std::mt19937& rng) {
    std::uniform_real_distribution<real> dre(0.16, 0.3), dim(-0.04, 0.04);
    return cplx(dre(rng), dim(rng));
}

} // namespace

TEST_CASE("weight vectors and conformal weights") {
    const CVec h = h_vec(3, 2);
    CHECK(std::abs(h[0] - cplx(-1.0 / 3)) < 1e-15);
    CHECK(std::abs(h[1] - cplx(2.0 / 3)) < 1e-15);
    CHECK(std::abs(h[2] - cplx(-1.0 / 3)) < 1e-15);
    CHECK(std::abs(h[0] + h[1] + h[2]) < 1e-15);
    const CVec s = {cplx(0.5), cplx(-0.5)};
    CHECK(std::abs(delta_of(s) - cplx(0.25)) < 1e-15);
}

TEST_CASE("normalization assembles the Barnes ratio") {
    std::mt19937 rng(11);
    const CVec s2 = draw_sigma(2, rng), s1 = draw_sigma(2, rng);
    const cplx th = draw_theta(rng);
    cplx num{1.0, 0.0};
    for (int k = 0; k < 2; ++k)
        for (int kp = 0; kp < 2; ++kp)
            num *= q_barnes(cplx(1.0) + s2[k] - th - s1[kp], B03);
    const cplx den = q_barnes(cplx(1.0) + s2[0] - s2[1], B03)
                   * q_barnes(cplx(1.0) - s1[0] + s1[1], B03);
    CHECK(rel_err(normalization(th, s2, s1, B03), num / den) < 1e-12);
    CHECK(rel_err(normalization_auto(th, s2, s1, B03), num / den) < 1e-12);
}

TEST_CASE("degenerate normalization matches the epsilon limit") {
    std::mt19937 rng(12);
    for (int N : {2, 3}) {
        const CVec s2 = draw_sigma(N, rng);
        for (int i = 1; i <= N; ++i) {
            const CVec s1 = vadd(s2, h_vec(N, i));
            const cplx limit_val = normalization(cplx(1.0 / N), s2, s1, B03, i);
            CHECK(rel_err(normalization_auto(cplx(1.0 / N), s2, s1, B03), limit_val) < 1e-12);
            const real eps = 1e-6;
            const cplx approached =
                normalization(cplx(1.0 / N - eps), s2, s1, B03) / q_barnes(cplx(eps), B03);
            CHECK(rel_err(approached, limit_val) < 1e-4);
        }
    }
}

TEST_CASE("basic hypergeometric sum against Pochhammer terms") {
    std::mt19937 rng(13);
    const cplx a = draw_theta(rng), b1 = cplx(1.0) + draw_theta(rng);
    const cplx a2 = cplx(0.4, 0.03);
    const cplx z{0.35, 0.1};
    // direct term-by-term assembly
    cplx want{0.0, 0.0};
    for (int k = 0; k <= 25; ++k)
        want += q_pochhammer(B03.pow(a), k, B03) * q_pochhammer(B03.pow(a2), k, B03)
              / (q_pochhammer(B03.pow(b1), k, B03) * q_pochhammer(B03.q, k, B03))
              * std::pow(z, k);
    CHECK(rel_err(q_hypergeometric({a, a2}, {b1}, z, B03, 25), want) < 1e-12);
    // q-binomial theorem for the single-numerator case
    const cplx lhs = q_hypergeometric({a}, {}, z, B03, 60);
    const cplx rhs = q_pochhammer_inf(B03.pow(a) * z, B03) / q_pochhammer_inf(z, B03);
    CHECK(rel_err(lhs, rhs) < 1e-11);
}

TEST_CASE("block with zero instanton cutoff is the bare prefactor") {
    std::mt19937 rng(14);
    BlockParams p;
    p.N = 2;
    p.thetas = {draw_theta(rng), draw_theta(rng)};
    p.sigmas = {draw_sigma(2, rng), draw_sigma(2, rng), draw_sigma(2, rng)};
    p.point_logs = {cplx(-0.4, 0.2), cplx(0.1, -0.3)};
    Cutoffs c;
    c.max_instanton = 0;
    cplx want{1.0, 0.0};
    for (int s = 1; s <= 2; ++s) {
        want *= normalization_auto(p.thetas[s - 1], p.sigmas[s], p.sigmas[s - 1], B03);
        want *= B03.pow(cplx(2.0) * p.thetas[s - 1] * delta_of(p.sigmas[s]));
        const cplx dd = p.thetas[s - 1] * p.thetas[s - 1];  // N th^2 (N-1)/2 at N=2
        want *= std::exp((delta_of(p.sigmas[s]) - dd - delta_of(p.sigmas[s - 1]))
                         * p.point_logs[s - 1]);
    }
    CHECK(rel_err(conformal_block(p, c, B03), want) < 1e-12);
}

TEST_CASE("four-point block against a direct instanton sum") {
    std::mt19937 rng(15);
    for (int N : {2, 3}) {
        BlockParams p;
        p.N = N;
        p.thetas = {draw_theta(rng), draw_theta(rng)};
        p.sigmas = {draw_sigma(N, rng), draw_sigma(N, rng), draw_sigma(N, rng)};
        p.point_logs = {cplx(-1.2, 0.3), cplx(0.0, 0.0)};
        Cutoffs c;
        c.max_instanton = 5;
        // independent assembly through the generic complex-argument factor
        cplx pref{1.0, 0.0};
        for (int s = 1; s <= 2; ++s) {
            pref *= normalization_auto(p.thetas[s - 1], p.sigmas[s], p.sigmas[s - 1], B03);
            pref *= B03.pow(cplx(N) * p.thetas[s - 1] * delta_of(p.sigmas[s]));
            const cplx dd = cplx(N) * p.thetas[s - 1] * p.thetas[s - 1] * cplx((N - 1) / 2.0);
            pref *= std::exp((delta_of(p.sigmas[s]) - dd - delta_of(p.sigmas[s - 1]))
                             * p.point_logs[s - 1]);
        }
        const cplx var = std::exp(cplx(N) * p.thetas[0] * B03.log_q
                                  + p.point_logs[0] - p.point_logs[1]);
        cplx sum{0.0, 0.0};
        const Partition empty{};
        for (const auto& lam : enumerate_tuples(N, c.max_instanton)) {
            cplx t = std::pow(var, tuple_size(lam));
            for (int k = 0; k < N; ++k)
                for (int kp = 0; kp < N; ++kp) {
                    t *= nekrasov_factor(lam[k], empty,
                                         B03.pow(p.sigmas[1][k] - p.thetas[0] - p.sigmas[0][kp]),
                                         B03);
                    t *= nekrasov_factor(empty, lam[kp],
                                         B03.pow(p.sigmas[2][k] - p.thetas[1] - p.sigmas[1][kp]),
                                         B03);
                    t /= nekrasov_factor(lam[k], lam[kp],
                                         B03.pow(p.sigmas[1][k] - p.sigmas[1][kp]), B03);
                }
            sum += t;
        }
        CHECK(rel_err(conformal_block(p, c, B03), pref * sum) < 1e-10);
    }
}

TEST_CASE("series form matches the plain value at its expansion point") {
    std::mt19937 rng(16);
    BlockParams p;
    p.N = 2;
    p.thetas = {draw_theta(rng), draw_theta(rng), draw_theta(rng)};
    p.sigmas = {draw_sigma(2, rng), draw_sigma(2, rng), draw_sigma(2, rng), draw_sigma(2, rng)};
    p.point_logs = {cplx(-2.0, 0.1), cplx(-0.9, -0.2), cplx(0.0, 0.4)};
    Cutoffs c;
    c.max_instanton = 4;
    const cplx direct = conformal_block(p, c, B03);
    for (int spec = 1; spec <= 3; ++spec) {
        const BlockSeries s = conformal_block_series(p, c, B03, spec);
        CHECK(rel_err(s.eval(p.point_logs[spec - 1]), direct) < 1e-11);
    }
}

TEST_CASE("degenerate block reduces to the basic hypergeometric series") {
    std::mt19937 rng(17);
    Cutoffs c;
    c.max_instanton = 9;
    c.hypergeom_kmax = 40;
    for (int N : {2, 3}) {
        for (int rep = 0; rep < 3; ++rep) {
            const CVec s2 = draw_sigma(N, rng), s0 = draw_sigma(N, rng);
            const cplx th = draw_theta(rng);
            const int i = 1 + static_cast<int>(rng() % N);
            const cplx lx1{0.0, 0.0};
            const cplx lx2 = std::log(cplx(0.25)) + cplx(0.0, 0.31);
            auto r1 = verify_hypergeom_reduction(1, N, i, th, s2, s0, lx1, lx2, c, B03, 1e-8);
            CHECK(r1.pass);
            // second form expands in q x1/x2, so take |x1| < |x2|
            auto r2 = verify_hypergeom_reduction(2, N, i, th, s2, s0,
                                                 std::log(cplx(0.3)) + cplx(0.0, 0.17),
                                                 cplx(0.0, 0.0), c, B03, 1e-8);
            CHECK(r2.pass);
        }
    }
}

TEST_CASE("connection matrix transformation laws") {
    std::mt19937 rng(18);
    for (int N : {2, 3}) {
        for (int rep = 0; rep < 5; ++rep) {
            const CVec s2 = draw_sigma(N, rng), s0 = draw_sigma(N, rng);
            const cplx th = draw_theta(rng);
            const cplx u{0.35, 0.2};
            const auto b0 = connection_matrix(N, th, s2, s0, u, B03);
            // periodicity in x = q^u
            const auto bper = connection_matrix(N, th, s2, s0, u + cplx(1.0), B03);
            // theta shift by one
            const auto bth = connection_matrix(N, th + cplx(1.0), s2, s0, u, B03);
            for (int e = 0; e < N * N; ++e) {
                CHECK(rel_err(bper[e], b0[e]) < 1e-12);
                CHECK(rel_err(bth[e], cplx((N % 2 == 0) ? 1.0 : -1.0) * b0[e]) < 1e-12);
            }
            for (int i = 1; i <= N; ++i)
                for (int j = 1; j <= N; ++j) {
                    const auto bs = connection_matrix(N, th, vadd(s2, h_vec(N, i)),
                                                      vadd(s0, h_vec(N, j)), u, B03);
                    for (int e = 0; e < N * N; ++e) CHECK(rel_err(bs[e], b0[e]) < 1e-12);
                }
            for (int i = 1; i <= N; ++i) {
                const auto bt = connection_matrix(N, th + cplx(1.0 / N), s2,
                                                  vadd(s0, h_vec(N, i)), u, B03);
                for (int e = 0; e < N * N; ++e) CHECK(rel_err(bt[e], -b0[e]) < 1e-12);
            }
            // determinant identity (Laplace expansion for small N)
            cplx det;
            if (N == 2) {
                det = b0[0] * b0[3] - b0[1] * b0[2];
            } else {
                det = b0[0] * (b0[4] * b0[8] - b0[5] * b0[7])
                    - b0[1] * (b0[3] * b0[8] - b0[5] * b0[6])
                    + b0[2] * (b0[3] * b0[7] - b0[4] * b0[6]);
            }
            cplx want = cplx((N % 2 == 0) ? -1.0 : 1.0) * theta(u, B03)
                      / theta(cplx(N) * th + u, B03);
            for (int i = 0; i < N; ++i)
                for (int j = i + 1; j < N; ++j)
                    want *= theta(s2[i] - s2[j], B03) / theta(s0[i] - s0[j], B03);
            CHECK(rel_err(det, want) < 1e-10);
        }
    }
}

TEST_CASE("four-point connection formula on the overlap annulus") {
    std::mt19937 rng(19);
    Cutoffs c;
    c.max_instanton = 10;
    const CVec s2 = draw_sigma(2, rng), s0 = draw_sigma(2, rng);
    const cplx th = draw_theta(rng);
    auto rep = verify_connection_4pt(2, 1, th, s2, s0, {0.75, 0.85}, c, B03, 1e-5);
    CHECK(rep.skipped.empty());
    CHECK(rep.pass);
}

TEST_CASE("contiguity relations for the auxiliary double sum") {
    std::mt19937 rng(20);
    Cutoffs c;
    c.series_order = 5;
    const PartitionTuple lam = {Partition{{2, 1}}, Partition{{1}}};
    const PartitionTuple nu = {Partition{{1}}, Partition{{2}}};
    for (int rep = 0; rep < 2; ++rep) {
        const CVec s3 = draw_sigma(2, rng), s1 = draw_sigma(2, rng);
        const cplx th2 = draw_theta(rng);
        for (int j = 1; j <= 2; ++j) {
            const int mrows = lam[j - 1].length() + 1;
            for (int i = 1; i <= 2; ++i) {
                auto r1 = verify_contiguity("S1", lam, nu, i, j, mrows, th2, s3, s1, c, B03, 1e-9);
                CHECK(r1.pass);
                if (i != j) {
                    auto r2 = verify_contiguity("S2", lam, nu, i, j, mrows, th2, s3, s1, c, B03, 1e-9);
                    CHECK(r2.pass);
                } else {
                    auto r3 = verify_contiguity("S3", lam, nu, i, j, mrows, th2, s3, s1, c, B03, 1e-9);
                    CHECK(r3.pass);
                }
            }
        }
    }
}

TEST_CASE("contiguity relations for the dressed coefficient blocks") {
    std::mt19937 rng(21);
    Cutoffs c;
    c.series_order = 5;
    const PartitionTuple lam = {Partition{{1, 1}}, Partition{{2}}};
    const PartitionTuple nu = {Partition{{1}}, Partition{}};
    const cplx lx2{0.0, 0.0};
    const cplx lx3 = std::log(cplx(1.7)) + cplx(0.0, 0.23);
    for (int rep = 0; rep < 2; ++rep) {
        const CVec s3 = draw_sigma(2, rng), s1 = draw_sigma(2, rng);
        const cplx th2 = draw_theta(rng);
        for (int j = 1; j <= 2; ++j) {
            const int mrows = lam[j - 1].length() + 1;
            for (int i = 1; i <= 2; ++i) {
                auto r1 = verify_contiguity_dressed("F1", lam, nu, i, j, mrows, th2, s3, s1,
                                                    lx2, lx3, c, B03, 1e-9);
                CHECK(r1.pass);
                if (i != j) {
                    auto r2 = verify_contiguity_dressed("F2", lam, nu, i, j, mrows, th2, s3, s1,
                                                        lx2, lx3, c, B03, 1e-9);
                    CHECK(r2.pass);
                }
            }
        }
    }
}

TEST_CASE("six-point connection formula, small coefficients") {
    std::mt19937 rng(22);
    Cutoffs c;
    c.series_order = 6;
    const CVec s3 = draw_sigma(2, rng), s1 = draw_sigma(2, rng);
    const cplx th2 = draw_theta(rng);
    auto rep = verify_connection_6pt(2, 1, th2, s3, s1, {0.8}, 1, c, B03, 1e-3);
    CHECK(rep.skipped.empty());
    CHECK(rep.pass);
}
