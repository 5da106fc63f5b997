#pragma once

#include "qnek/qspecial.hpp"

#include <vector>

namespace qnek {

/// f(x) = x^{prefactor_exponent} * sum_{n=0}^{order} coeffs[n] x^n, with the
/// fractional power taken as exp(prefactor_exponent * Log x) for whichever
/// fixed Log x the caller uses.
struct TruncatedSeries {
    cplx prefactor_exponent{0.0, 0.0};
    std::vector<cplx> coeffs;  // c_0 .. c_order

    int order() const { return static_cast<int>(coeffs.size()) - 1; }
    cplx eval(cplx log_x) const;
};

/// f(x) -> f(q^p x); coefficient n picks up q^{p (prefactor_exponent + n)}.
TruncatedSeries qshift(const TruncatedSeries& f, const QBase& base, int p = 1);

/// Sum/difference. Prefactor exponents must differ by an integer (within
/// 1e-9); the offset is absorbed into the coefficient indices. Result is
/// truncated to the shorter operand.
TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries sub(const TruncatedSeries& a, const TruncatedSeries& b);

/// Cauchy product truncated to min(order_a, order_b); exponents add.
TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b);

TruncatedSeries scale(cplx c, const TruncatedSeries& f);

struct CompareResult {
    real max_residual = 0.0;
    bool pass = false;
};

/// Coefficient-wise comparison: max_n |a_n - b_n| / max(1, max |a_n|, max |b_n|)
/// over the common range, after aligning the integer prefactor offset.
CompareResult compare(const TruncatedSeries& a, const TruncatedSeries& b, real tol);

} // namespace qnek
