#pragma once

#include "qnek/partitions.hpp"
#include "qnek/report.hpp"
#include "qnek/series.hpp"

#include <optional>
#include <vector>

namespace qnek {

using CVec = std::vector<cplx>;

/// Delta_sigma = sum_i (sigma^(i))^2 / 2
cplx delta_of(const CVec& sigma);

/// h_i^(j) = delta_ij - 1/N
CVec h_vec(int N, int i);

CVec vadd(const CVec& a, const CVec& b);
CVec vsub(const CVec& a, const CVec& b);

struct Cutoffs {
    int max_instanton = 6;   // bound on each |lambda_p|
    int series_order = 6;
    int hypergeom_kmax = 20;
};

/// Normalization factor N(theta | sigma2, sigma1): ratio of Barnes products.
/// With degenerate_index = i (1-based) the single vanishing numerator factor
/// at k = k' = i is omitted (the eps -> 0 limit divided by G_q(eps)); this
/// asserts theta ~ 1/N and sigma1 ~ sigma2 + h_i.
cplx normalization(cplx theta, const CVec& sigma2, const CVec& sigma1, const QBase& base,
                   std::optional<int> degenerate_index = std::nullopt);

/// Same, but any numerator argument within 1e-9 of 0 is skipped automatically
/// (at most one may occur). Used by block assembly where degeneracy is implied
/// by the parameters rather than flagged.
cplx normalization_auto(cplx theta, const CVec& sigma2, const CVec& sigma1, const QBase& base);

/// N phi N-1 partial sum up to k = kmax.
cplx q_hypergeometric(const CVec& alphas, const CVec& betas, cplx z, const QBase& base, int kmax);

/// An (m+2)-point block: slot p = 1..m carries theta_p with sigma_p on its
/// left, sigma_{p-1} on its right, and the point x_p. The printed notation
/// lists slots right-to-left (theta_m first).
struct BlockParams {
    int N = 2;
    std::vector<cplx> thetas;      // theta_1..theta_m
    std::vector<CVec> sigmas;      // sigma_0..sigma_m, each traceless
    std::vector<cplx> point_logs;  // Log x_1..Log x_m (fixed branch per point)

    int m() const { return static_cast<int>(thetas.size()); }
    void check() const;            // shape + tracelessness to 1e-12
};

/// Full numeric value of the block at its points.
cplx conformal_block(const BlockParams& p, const Cutoffs& c, const QBase& base);

/// Block as a series in the point of slot `spectator` (1-based):
/// value = sum_n coef[n - min_n] * exp((alpha + n) * point_log).
/// The other points stay numeric. Coefficients outside the window implied by
/// the instanton cutoff are zero.
struct BlockSeries {
    cplx alpha{0.0, 0.0};
    int min_n = 0;
    std::vector<cplx> coef;

    int max_n() const { return min_n + static_cast<int>(coef.size()) - 1; }
    cplx eval(cplx point_log) const;
    cplx coef_at(int n) const;  // 0 outside the window
};

BlockSeries conformal_block_series(const BlockParams& p, const Cutoffs& c, const QBase& base,
                                   int spectator);

/// Bare S-series coefficients: coefficient of (q^{N theta2} x2/x3)^j,
/// j = 0..max_total, of the mu-sum. nu pairs with mu in the sigma3-side
/// factors, lam with mu in the sigma1-side factors; this is the pairing
/// realized by the coefficient extraction from the six-point block.
std::vector<cplx> s_coeffs(const PartitionTuple& lam, const PartitionTuple& nu,
                           cplx theta3, cplx theta2,
                           const CVec& sigma3, const CVec& sigma2, const CVec& sigma1,
                           int max_total, const QBase& base);

/// Connection matrix B_{j,i}[theta1, 1/N; sigma2, sigma0 | q^u], row j, col i.
std::vector<cplx> connection_matrix(int N, cplx theta1, const CVec& sigma2, const CVec& sigma0,
                                    cplx u, const QBase& base);

/// Both 4-point hypergeometric reductions of the degenerate block.
VerificationReport verify_hypergeom_reduction(int which, int N, int i,
                                              cplx theta1, const CVec& sigma2, const CVec& sigma0,
                                              cplx log_x1, cplx log_x2,
                                              const Cutoffs& c, const QBase& base, real tol);

/// 4-point connection formula: LHS expansion around one point vs the B-matrix
/// combination of expansions around the other, sampled on the overlap annulus.
VerificationReport verify_connection_4pt(int N, int i,
                                         cplx theta1, const CVec& sigma2, const CVec& sigma0,
                                         const std::vector<real>& radii,
                                         const Cutoffs& c, const QBase& base, real tol);

/// Contiguity relations for the S-series ("S1", "S2", "S3"), checked
/// coefficient-wise as truncated series in x2.
VerificationReport verify_contiguity(const std::string& which,
                                     const PartitionTuple& lam, const PartitionTuple& nu,
                                     int i, int j, int m_rows,
                                     cplx theta2, const CVec& sigma3, const CVec& sigma1,
                                     const Cutoffs& c, const QBase& base, real tol);

/// Prefactor-dressed contiguity (the two F-relations derived from S1/S2).
VerificationReport verify_contiguity_dressed(const std::string& which,
                                             const PartitionTuple& lam, const PartitionTuple& nu,
                                             int i, int j, int m_rows,
                                             cplx theta2, const CVec& sigma3, const CVec& sigma1,
                                             cplx log_x2, cplx log_x3,
                                             const Cutoffs& c, const QBase& base, real tol);

/// Six-point connection formula, checked coefficient-wise in x1, x4 via the
/// S-series for each small (lam, nu).
VerificationReport verify_connection_6pt(int N, int i,
                                         cplx theta2, const CVec& sigma3, const CVec& sigma1,
                                         const std::vector<real>& radii,
                                         int max_coeff_size,
                                         const Cutoffs& c, const QBase& base, real tol);

} // namespace qnek
