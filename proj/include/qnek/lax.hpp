#pragma once

#include "qnek/blocks.hpp"

#include <string>
#include <vector>

namespace qnek {

/// Row-major N x N complex matrix.
using CMat = std::vector<cplx>;

CMat mat_mul(const CMat& a, const CMat& b, int N);
CMat mat_inv(const CMat& a, int N);  // Gaussian elimination, partial pivoting
cplx mat_det(const CMat& a, int N);
real mat_maxabs(const CMat& a);

/// Parameters of the rank-N linear problem with m+1 finite time-like points.
/// theta_inf / theta_0 are the traceless exponent vectors at x = infinity / 0;
/// thetas are the scalar exponents theta_1..theta_{m+1}; sigmas the m
/// intermediate traceless vectors; s the m x N matrix of Fourier weights;
/// t the points t_1..t_{m+1} (t_0 = 1 implicit).
struct LaxParams {
    int N = 2;
    int m = 1;
    CVec theta_inf;
    CVec theta_0;
    std::vector<cplx> thetas;   // theta_1..theta_{m+1}
    std::vector<CVec> sigmas;   // sigma_1..sigma_m
    std::vector<CVec> s;        // s[i-1][j-1] = s_{i,j}, i = 1..m
    std::vector<cplx> t;        // t_1..t_{m+1}

    /// sum_{j=lo..hi} theta_j (1-based, inclusive); empty range = 0.
    cplx theta_sum(int lo, int hi) const;
    /// Principal Log t_i; the same branch is used everywhere downstream.
    cplx log_t(int i) const;
    /// Log of t~_i = q^{N sum_{j>i} theta_j} t_i.
    cplx log_t_tilde(int i, const QBase& base) const;
    /// Log of x~ = q^{N sum_j theta_j} x.
    cplx log_x_tilde(cplx log_x, const QBase& base) const;
};

/// Throws std::invalid_argument naming every violated inequality:
/// tracelessness, |t| ordering, the exponent bounds 1 < |q^{-N theta_i}| < 1/|q|,
/// and the pole-separation bounds |q^{-N sum_{j=i}^{k+1} theta_j} t_{k+1}| < |t_i|.
void validate(const LaxParams& p, const QBase& base);

struct LatticeWindow {
    int radius = 2;  // sup-norm bound on each lattice component
};

/// Zero-sum integer N-vectors with sup-norm <= radius, graded by the 1-norm,
/// lexicographic within a grade.
std::vector<std::vector<int>> lattice_points(int N, int radius);

/// m-fold products of the above, graded by total 1-norm, then lexicographic
/// by component index. This fixed order is the reduction order everywhere.
std::vector<std::vector<std::vector<int>>> lattice_tuples(int N, int m, int radius);

/// sigma + n componentwise.
CVec sigma_shift(const CVec& sigma, const std::vector<int>& n);

/// s_i^n = prod_j s_{i,j}^{n^(j)} (exact integer powers).
cplx weight_pow(const CVec& srow, const std::vector<int>& n);

/// The tau function: lattice sum over the window of
///   s^n prod_p t_p^{Delta-exponents} C[theta|sigma+n] Z[theta|sigma+n, t],
/// with Z truncated to |lambda_p| <= c.max_instanton.
cplx tau(const LaxParams& p, const LatticeWindow& w, const Cutoffs& c, const QBase& base);

/// Single lattice-term ingredients, exposed for oracle tests.
cplx tau_C(const LaxParams& p, const std::vector<CVec>& sig, const QBase& base);
cplx tau_Z(const LaxParams& p, const std::vector<CVec>& sig, const Cutoffs& c, const QBase& base);

struct TauFamily {
    cplx tau_val;
    CMat tau_ij;        // theta_inf -> theta_inf - h_i + h_j
    CMat tau_tilde_ij;  // theta_inf -> theta_inf - h_i, theta_0 -> theta_0 - h_j, sigma -> sigma - h_N
    CMat D;             // the constant D_{ij} of the determinantal identity
};
TauFamily tau_family(const LaxParams& p, const LatticeWindow& w, const Cutoffs& c,
                     const QBase& base);

/// The normalization tau_i^(0,1) expressed through tau, and its chart
/// propagation tau_i^(k,k+1) (multiplicative recursion in k).
cplx tau_i_01(const LaxParams& p, int i, const LatticeWindow& w, const Cutoffs& c,
              const QBase& base);
cplx tau_i_chart(const LaxParams& p, int i, int k, const LatticeWindow& w, const Cutoffs& c,
                 const QBase& base);

/// One chart of the fundamental solution as an explicit (truncated) power
/// series in x~, entry by entry:
///   Y_ij(x) = exp(front Log x) * sum_n coef[n - min_n] exp((alpha + n) Log x~).
struct FundamentalSeries {
    int N = 0;
    int chart = 0;
    cplx front;     // exponent of the x^{-sum theta} front factor
    cplx xt_shift;  // Log x~ - Log x
    struct Entry {
        cplx alpha;
        int min_n = 0;
        std::vector<cplx> coef;
    };
    std::vector<Entry> e;  // row-major N x N

    CMat eval(cplx log_x) const;
    /// Coefficient of x^{expo} in entry (i,j) (1-based); the offset
    /// expo - front - alpha must sit within 1e-6 of an integer.
    cplx x_coefficient(int i, int j, cplx expo) const;
    /// True when |x| lies inside the annulus where the truncated expansion
    /// of this chart is trustworthy (both x-adjacent sum variables < margin).
    bool in_domain(cplx log_x, real margin = 0.98) const;

    cplx dom_up;  // |exp(dom_up + log_x)| < 1 required (0 disables: chart 0)
    cplx dom_dn;  // |exp(dom_dn - log_x)| < 1 required (0 disables: chart m+1)
    bool has_up = false, has_dn = false;
};

/// Build chart k = 0..m+1 from lattice-summed degenerate blocks.
FundamentalSeries fundamental_series(int chart, const LaxParams& p, const LatticeWindow& w,
                                     const Cutoffs& c, const QBase& base);

/// Evaluate one chart at a point (throws std::domain_error outside its annulus).
CMat fundamental_solution(int chart, cplx log_x, const LaxParams& p, const LatticeWindow& w,
                          const Cutoffs& c, const QBase& base);

/// Chart-to-chart connection: Y^(k,k+1) vs Y^(k+1,k+2) B diag(s_k-powers)
/// sampled at the given points (all must lie in both annuli).
VerificationReport verify_chart_connection(int k, const LaxParams& p,
                                           const std::vector<cplx>& log_xs,
                                           const LatticeWindow& w, const Cutoffs& c,
                                           const QBase& base, real tol);

/// det Y^(0,1): x-independence of the pochhammer-normalized determinant and
/// agreement with its closed product form at the sample points.
VerificationReport verify_det_Y(const LaxParams& p, const std::vector<cplx>& log_xs,
                                const LatticeWindow& w, const Cutoffs& c,
                                const QBase& base, real tol);

struct Y1G {
    CMat Y1;         // closed-form off-diagonal, series-extracted diagonal
    CMat G;          // closed-form
    CMat Y1_series;  // extracted from chart 0
    CMat G_series;   // extracted from chart m+1
    real cross_residual = 0.0;   // max mismatch between the two paths
    real detG_residual = 0.0;    // det(G_series) * closed det G^{-1} vs 1
    real norm_residual = 0.0;    // diagonal x^0 coefficient of chart 0 vs 1
};
Y1G extract_Y1_G(const LaxParams& p, const LatticeWindow& w, const Cutoffs& c,
                 const QBase& base);

struct LaxMatrices {
    std::vector<CMat> A;               // per sample
    std::vector<std::vector<CMat>> B;  // B[i-1][sample]
    VerificationReport report;         // det A, det B_i, A_{m+1}, compatibility
};
LaxMatrices lax_matrices(const LaxParams& p, const std::vector<cplx>& log_xs,
                         const LatticeWindow& w, const Cutoffs& c, const QBase& base,
                         real tol);

/// Determinantal identity for T_{q,t_p}(tau_ij/tau) plus the dual expressions
/// for the residue matrix of the t_p-deformation equation (off-diagonal).
VerificationReport verify_det_tau(const LaxParams& p, int which_p, int i, int j,
                                  const LatticeWindow& w, const Cutoffs& c,
                                  const QBase& base, real tol);

enum class SchlesingerKind { R, P };

/// Parameter tables of the two elementary exponent-shift transformations.
/// kind R uses index i = 1..m+1 (and rescales t_j -> q t_j for j > i);
/// kind P ignores i.
LaxParams schlesinger(const LaxParams& p, SchlesingerKind kind, const QBase& base, int i = 1);

/// The three determinantal identities for each kind (variant = 1..3, indices
/// a, b per the stated ranges), evaluated through tau families at the base
/// and the transformed parameters.
VerificationReport verify_schlesinger(const LaxParams& p, SchlesingerKind kind, int variant,
                                      int a, int b, int i, const LatticeWindow& w,
                                      const Cutoffs& c, const QBase& base, real tol);

/// Dual expressions for the residue matrix of the Schlesinger q-difference
/// equation: the Y1-form against the G-form (series-extracted matrices).
VerificationReport verify_schlesinger_dual(const LaxParams& p, SchlesingerKind kind, int i,
                                           const LatticeWindow& w, const Cutoffs& c,
                                           const QBase& base, real tol);

} // namespace qnek
