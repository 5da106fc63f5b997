#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qnek {

using real = double;
using cplx = std::complex<real>;

/// Thrown when a parameter sits too close to a pole / vanishing denominator.
class ResonanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The base q with 0 < |q| < 1. The principal branch of log q is fixed here
/// once and inherited by every power q^u computed downstream.
struct QBase {
    cplx q;
    cplx log_q;

    explicit QBase(cplx q_);

    /// q^u = exp(u log q), principal branch.
    cplx pow(cplx u) const { return std::exp(u * log_q); }

    /// Exact integer power by repeated multiplication; ipow(0) == 1 exactly.
    cplx ipow(long k) const;
};

/// Truncation policy for the infinite products.
struct ProductTruncation {
    int max_factors = 256;
    real tail_bound = 1e-18;
};

/// (a;q)_n = prod_{j=0}^{n-1} (1 - a q^j)
cplx q_pochhammer(cplx a, long n, const QBase& base);

/// (a;q)_inf, truncated per `trunc`.
cplx q_pochhammer_inf(cplx a, const QBase& base, const ProductTruncation& trunc = {});

/// (a;q,q)_inf = prod_{j,k>=0} (1 - a q^{j+k}); the factor (1 - a q^m)
/// appears with multiplicity m+1.
cplx q_double_pochhammer_inf(cplx a, const QBase& base, const ProductTruncation& trunc = {});

/// [u] = (1 - q^u)/(1 - q)
cplx q_number(cplx u, const QBase& base);

/// Gamma_q(u) = (q;q)_inf / (q^u;q)_inf * (1-q)^{1-u}, assembled in log space.
cplx q_gamma(cplx u, const QBase& base, const ProductTruncation& trunc = {});

/// G_q(u) = (q^u;q,q)_inf / (q;q,q)_inf * (q;q)_inf^{u-1} * (1-q)^{-(u-1)(u-2)/2}
cplx q_barnes(cplx u, const QBase& base, const ProductTruncation& trunc = {});

/// Theta_q(x) = (x, q/x, q; q)_inf
cplx theta_q(cplx x, const QBase& base, const ProductTruncation& trunc = {});

/// theta(u) = q^{u(u-1)/2} Theta_q(q^u)
cplx theta(cplx u, const QBase& base, const ProductTruncation& trunc = {});

} // namespace qnek
