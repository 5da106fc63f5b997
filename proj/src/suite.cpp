#include "qnek/suite.hpp"

#include "qnek/blocks.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <future>
#include <random>
#include <semaphore>
#include <string>
#include <vector>

namespace qnek {

namespace {

// traceless sigma with pairwise-separated entries (resampled on near-resonance)
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

real rel_err(cplx got, cplx want) {
    return std::abs(got - want) / std::max(real(1.0), std::abs(want));
}

std::string nsuf(int N) { return ".N" + std::to_string(N); }

// one transformation law of the connection matrix, checked at random draws
VerificationReport matrix_law(const std::string& id, int N, std::mt19937& rng,
                              const QBase& base, real tol,
                              const std::function<real(const CVec&, const CVec&, cplx, cplx)>& law) {
    VerificationReport rep;
    rep.id = id;
    rep.settings = "N=" + std::to_string(N) + " draws=5";
    real worst = 0.0;
    for (int r = 0; r < 5; ++r) {
        const CVec s2 = draw_sigma(N, rng), s0 = draw_sigma(N, rng);
        const cplx th = draw_theta(rng);
        const cplx u{0.35, 0.2};
        worst = std::max(worst, law(s2, s0, th, u));
    }
    rep.finish(worst, tol);
    return rep;
}

} // namespace

SuiteConfig default_suite_config() {
    SuiteConfig cfg;
    cfg.lax.N = 2;
    cfg.lax.m = 1;
    cfg.lax.thetas = {cplx(0.2), cplx(0.2)};
    cfg.lax.theta_inf = {cplx(0.31), cplx(-0.31)};
    cfg.lax.theta_0 = {cplx(0.27), cplx(-0.27)};
    cfg.lax.sigmas = {{cplx(0.12), cplx(-0.12)}};
    cfg.lax.s = {{cplx(1.3, 0.4), cplx(0.8, -0.1)}};
    cfg.lax.t = {cplx(1.0), cplx(0.05)};
    return cfg;
}

std::vector<VerificationReport> run_suite(const SuiteConfig& cfg) {
    using CheckFn = std::function<VerificationReport(std::mt19937&)>;
    std::vector<CheckFn> checks;
    const QBase& base = cfg.base;
    const real ts = cfg.tol_scale;
    const LaxParams lp = cfg.lax;
    Cutoffs bc;  // block-level cutoffs
    bc.max_instanton = std::max(cfg.cutoff, 8);
    bc.series_order = 5;
    bc.hypergeom_kmax = 40;
    Cutoffs lc;  // lattice-level cutoffs
    lc.max_instanton = cfg.lax_cutoff;
    lc.series_order = cfg.lax_cutoff;
    LatticeWindow w;
    w.radius = cfg.radius;

    // --- block-level identities ---
    for (int N : {2, 3}) {
        for (int which : {1, 2}) {
            checks.push_back([=](std::mt19937& rng) {
                const CVec s2 = draw_sigma(N, rng), s0 = draw_sigma(N, rng);
                const cplx th = draw_theta(rng);
                const int i = 1 + static_cast<int>(rng() % N);
                const cplx lx1 = (which == 1) ? cplx(0.0, 0.0)
                                              : std::log(cplx(0.3)) + cplx(0.0, 0.17);
                const cplx lx2 = (which == 1) ? std::log(cplx(0.25)) + cplx(0.0, 0.31)
                                              : cplx(0.0, 0.0);
                auto r = verify_hypergeom_reduction(which, N, i, th, s2, s0, lx1, lx2,
                                                    bc, base, ts * 1e-8);
                r.id = "prop2.3.reduction" + std::to_string(which) + nsuf(N);
                return r;
            });
        }
        checks.push_back([=](std::mt19937& rng) {
            return matrix_law("lemma2.4.ushift" + nsuf(N), N, rng, base, ts * 1e-12,
                [&](const CVec& s2, const CVec& s0, cplx th, cplx u) {
                    const auto b0 = connection_matrix(N, th, s2, s0, u, base);
                    const auto b1 = connection_matrix(N, th, s2, s0, u + cplx(1.0), base);
                    real worst = 0.0;
                    for (int e = 0; e < N * N; ++e)
                        worst = std::max(worst, rel_err(b1[e], b0[e]));
                    return worst;
                });
        });
        checks.push_back([=](std::mt19937& rng) {
            return matrix_law("lemma2.4.thetashift" + nsuf(N), N, rng, base, ts * 1e-12,
                [&](const CVec& s2, const CVec& s0, cplx th, cplx u) {
                    const auto b0 = connection_matrix(N, th, s2, s0, u, base);
                    const auto b1 = connection_matrix(N, th + cplx(1.0), s2, s0, u, base);
                    const cplx sg{(N % 2 == 0) ? 1.0 : -1.0};
                    real worst = 0.0;
                    for (int e = 0; e < N * N; ++e)
                        worst = std::max(worst, rel_err(b1[e], sg * b0[e]));
                    return worst;
                });
        });
        checks.push_back([=](std::mt19937& rng) {
            return matrix_law("lemma2.4.sigmashift" + nsuf(N), N, rng, base, ts * 1e-12,
                [&](const CVec& s2, const CVec& s0, cplx th, cplx u) {
                    const auto b0 = connection_matrix(N, th, s2, s0, u, base);
                    real worst = 0.0;
                    for (int i = 1; i <= N; ++i)
                        for (int j = 1; j <= N; ++j) {
                            const auto b1 = connection_matrix(N, th, vadd(s2, h_vec(N, i)),
                                                              vadd(s0, h_vec(N, j)), u, base);
                            for (int e = 0; e < N * N; ++e)
                                worst = std::max(worst, rel_err(b1[e], b0[e]));
                        }
                    return worst;
                });
        });
        checks.push_back([=](std::mt19937& rng) {
            return matrix_law("lemma2.4.mixedshift" + nsuf(N), N, rng, base, ts * 1e-12,
                [&](const CVec& s2, const CVec& s0, cplx th, cplx u) {
                    const auto b0 = connection_matrix(N, th, s2, s0, u, base);
                    real worst = 0.0;
                    for (int i = 1; i <= N; ++i) {
                        const auto b1 = connection_matrix(N, th + cplx(1.0 / N), s2,
                                                          vadd(s0, h_vec(N, i)), u, base);
                        for (int e = 0; e < N * N; ++e)
                            worst = std::max(worst, rel_err(b1[e], -b0[e]));
                    }
                    return worst;
                });
        });
        checks.push_back([=](std::mt19937& rng) {
            return matrix_law("lemma2.4.det" + nsuf(N), N, rng, base, ts * 1e-10,
                [&](const CVec& s2, const CVec& s0, cplx th, cplx u) {
                    const auto b = connection_matrix(N, th, s2, s0, u, base);
                    const cplx det = mat_det(b, N);
                    cplx want = cplx((N % 2 == 0) ? -1.0 : 1.0) * theta(u, base)
                              / theta(cplx(N) * th + u, base);
                    for (int i = 0; i < N; ++i)
                        for (int j = i + 1; j < N; ++j)
                            want *= theta(s2[i] - s2[j], base) / theta(s0[i] - s0[j], base);
                    return rel_err(det, want);
                });
        });
        checks.push_back([=](std::mt19937& rng) {
            const CVec s2 = draw_sigma(N, rng), s0 = draw_sigma(N, rng);
            const cplx th = draw_theta(rng);
            Cutoffs c4 = bc;
            c4.max_instanton = 14;
            auto r = verify_connection_4pt(N, 1, th, s2, s0, {0.7}, c4, base,
                                           ts * 1e-4);
            r.id = "eq2.4.connection" + nsuf(N);
            return r;
        });
        for (const char* which : {"S1", "S2", "S3"}) {
            const std::string wh(which);
            checks.push_back([=](std::mt19937& rng) {
                PartitionTuple lam = {Partition{{2, 1}}, Partition{{1}}};
                PartitionTuple nu = {Partition{{1}}, Partition{{2}}};
                while (static_cast<int>(lam.size()) < N) {
                    lam.push_back(Partition{});
                    nu.push_back(Partition{{1}});
                }
                const CVec s3 = draw_sigma(N, rng), s1 = draw_sigma(N, rng);
                const cplx th2 = draw_theta(rng);
                VerificationReport out;
                real worst = 0.0;
                for (int j = 1; j <= N; ++j) {
                    const int mrows = lam[j - 1].length() + 1;
                    for (int i = 1; i <= N; ++i) {
                        const bool diag = (i == j);
                        if ((wh == "S2" && diag) || (wh == "S3" && !diag)) continue;
                        auto r = verify_contiguity(wh, lam, nu, i, j, mrows, th2, s3, s1,
                                                   bc, base, ts * 1e-9);
                        worst = std::max(worst, r.max_residual);
                        out.settings = r.settings;
                    }
                }
                out.id = "thm2.6." + wh + nsuf(N);
                out.finish(worst, ts * 1e-9);
                return out;
            });
        }
    }
    for (const char* which : {"F1", "F2"}) {
        const std::string wh(which);
        checks.push_back([=](std::mt19937& rng) {
            const PartitionTuple lam = {Partition{{1, 1}}, Partition{{2}}};
            const PartitionTuple nu = {Partition{{1}}, Partition{}};
            const CVec s3 = draw_sigma(2, rng), s1 = draw_sigma(2, rng);
            const cplx th2 = draw_theta(rng);
            const cplx lx2{0.0, 0.0};
            const cplx lx3 = std::log(cplx(1.7)) + cplx(0.0, 0.23);
            VerificationReport out;
            real worst = 0.0;
            for (int j = 1; j <= 2; ++j) {
                const int mrows = lam[j - 1].length() + 1;
                for (int i = 1; i <= 2; ++i) {
                    if (wh == "F2" && i == j) continue;
                    auto r = verify_contiguity_dressed(wh, lam, nu, i, j, mrows, th2, s3, s1,
                                                       lx2, lx3, bc, base, ts * 1e-9);
                    worst = std::max(worst, r.max_residual);
                    out.settings = r.settings;
                }
            }
            out.id = "cor2.7." + wh + ".N2";
            out.finish(worst, ts * 1e-9);
            return out;
        });
    }
    checks.push_back([=](std::mt19937& rng) {
        const CVec s3 = draw_sigma(2, rng), s1 = draw_sigma(2, rng);
        const cplx th2 = draw_theta(rng);
        Cutoffs c6 = bc;
        c6.series_order = 8;
        auto r = verify_connection_6pt(2, 1, th2, s3, s1, {0.7}, 1, c6, base, ts * 1e-3);
        r.id = "thm2.8.connection.N2";
        return r;
    });

    // --- deformation-level identities (fixed generic parameters) ---
    const std::vector<cplx> xs_far = {std::log(cplx(25.0)) + cplx(0.0, 0.41),
                                      std::log(cplx(40.0)) + cplx(0.0, 1.1),
                                      std::log(cplx(55.0)) + cplx(0.0, 2.0)};
    const std::vector<cplx> xs_mid = {std::log(cplx(2.0)) + cplx(0.0, 0.41),
                                      std::log(cplx(2.6)) + cplx(0.0, 1.1)};
    const std::vector<cplx> xs_low = {std::log(cplx(0.17)) + cplx(0.0, 0.41),
                                      std::log(cplx(0.22)) + cplx(0.0, 1.1)};
    std::vector<cplx> xs_det;
    for (int k = 0; k < 10; ++k)
        xs_det.push_back(std::log(cplx(8.0 + 3.2 * k)) + cplx(0.0, 0.2 + 0.55 * k));

    checks.push_back([=](std::mt19937&) {
        Cutoffs ch = lc;
        ch.max_instanton = ch.series_order = std::max(cfg.lax_cutoff, 8);
        auto r = verify_chart_connection(0, lp, xs_mid, w, ch, base, ts * 2e-2);
        return r;
    });
    checks.push_back([=](std::mt19937&) {
        Cutoffs ch = lc;
        ch.max_instanton = ch.series_order = std::max(cfg.lax_cutoff, 8);
        return verify_chart_connection(1, lp, xs_low, w, ch, base, ts * 5e-3);
    });
    checks.push_back([=](std::mt19937&) {
        Cutoffs cd = lc;
        cd.max_instanton = cd.series_order = std::max(cfg.lax_cutoff, 8);
        return verify_det_Y(lp, xs_det, w, cd, base, ts * 1e-6);
    });
    checks.push_back([=](std::mt19937&) {
        VerificationReport rep;
        rep.id = "eq3.12.asymptotics";
        const auto ext = extract_Y1_G(lp, w, lc, base);
        rep.finish(ext.norm_residual, ts * 1e-8);
        return rep;
    });
    checks.push_back([=](std::mt19937&) {
        VerificationReport rep;
        rep.id = "eq3.21-22.coeffs";
        const auto ext = extract_Y1_G(lp, w, lc, base);
        rep.finish(ext.cross_residual, ts * 1e-4);
        return rep;
    });
    checks.push_back([=](std::mt19937&) {
        VerificationReport rep;
        rep.id = "eq3.23.detG";
        const auto ext = extract_Y1_G(lp, w, lc, base);
        rep.finish(ext.detG_residual, ts * 1e-6);
        return rep;
    });
    checks.push_back([=](std::mt19937&) {
        return lax_matrices(lp, xs_far, w, lc, base, ts * 1e-4).report;
    });
    for (int pp : {1, 2}) {
        checks.push_back([=](std::mt19937&) {
            auto r = verify_det_tau(lp, pp, pp == 1 ? 1 : 2, pp == 1 ? 2 : 1, w, lc, base,
                                    ts * 1e-4);
            r.id += ".p" + std::to_string(pp);
            return r;
        });
    }
    for (int i : {1, 2}) {
        checks.push_back([=](std::mt19937&) {
            auto r = verify_schlesinger_dual(lp, SchlesingerKind::R, i, w, lc, base, ts * 1e-6);
            r.id += ".i" + std::to_string(i);
            return r;
        });
    }
    checks.push_back([=](std::mt19937&) {
        return verify_schlesinger_dual(lp, SchlesingerKind::P, 1, w, lc, base, ts * 1e-6);
    });
    for (auto kind : {SchlesingerKind::R, SchlesingerKind::P}) {
        for (int variant : {1, 2, 3}) {
            for (int i : {1, 2}) {
                if (kind == SchlesingerKind::P && i == 2) continue;  // p ignores i
                checks.push_back([=](std::mt19937&) {
                    auto r = verify_schlesinger(lp, kind, variant, 2, 2, i, w, lc, base,
                                                ts * 1e-3);
                    if (kind == SchlesingerKind::R) r.id += ".i" + std::to_string(i);
                    return r;
                });
            }
        }
    }

    // --- run, optionally in parallel, with per-check seeded draws ---
    int threads = 1;
    if (const char* env = std::getenv("QNEK_THREADS")) {
        threads = std::max(1, std::atoi(env));
    } else {
        threads = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
    }
    std::counting_semaphore<256> slots(threads);
    std::vector<std::future<VerificationReport>> futs;
    for (size_t idx = 0; idx < checks.size(); ++idx) {
        futs.push_back(std::async(std::launch::async, [&, idx] {
            slots.acquire();
            std::seed_seq seq{cfg.seed, static_cast<unsigned>(idx)};
            std::mt19937 rng(seq);
            const auto t0 = std::chrono::steady_clock::now();
            VerificationReport rep;
            try {
                rep = checks[idx](rng);
            } catch (const ResonanceError& e) {
                rep.skipped = e.what();
            } catch (const std::domain_error& e) {
                rep.skipped = e.what();
            }
            rep.wall_time = std::chrono::duration<real>(
                                std::chrono::steady_clock::now() - t0).count();
            slots.release();
            return rep;
        }));
    }
    std::vector<VerificationReport> out;
    for (auto& f : futs) out.push_back(f.get());
    std::stable_sort(out.begin(), out.end(),
                     [](const VerificationReport& a, const VerificationReport& b) {
                         return a.id < b.id;
                     });
    return out;
}

} // namespace qnek
