#include "qnek/series.hpp"

#include <algorithm>
#include <cmath>

namespace qnek {

cplx TruncatedSeries::eval(cplx log_x) const {
    const cplx x = std::exp(log_x);
    cplx s{0.0, 0.0};
    cplx xn{1.0, 0.0};
    for (const cplx& c : coeffs) {
        s += c * xn;
        xn *= x;
    }
    return s * std::exp(prefactor_exponent * log_x);
}

TruncatedSeries qshift(const TruncatedSeries& f, const QBase& base, int p) {
    TruncatedSeries r;
    r.prefactor_exponent = f.prefactor_exponent;
    r.coeffs.resize(f.coeffs.size());
    const cplx head = base.pow(cplx(p) * f.prefactor_exponent);
    const cplx step = base.ipow(p);
    cplx qpn = head;
    for (size_t n = 0; n < f.coeffs.size(); ++n) {
        r.coeffs[n] = f.coeffs[n] * qpn;
        qpn *= step;
    }
    return r;
}

namespace {

long integer_offset(const TruncatedSeries& a, const TruncatedSeries& b) {
    const cplx d = b.prefactor_exponent - a.prefactor_exponent;
    const real k = std::round(d.real());
    if (std::abs(d.real() - k) > 1e-9 || std::abs(d.imag()) > 1e-9)
        throw std::invalid_argument("series: prefactor exponents differ by a non-integer");
    return static_cast<long>(k);
}

TruncatedSeries combine(const TruncatedSeries& a, const TruncatedSeries& b, real bsign) {
    long d = integer_offset(a, b);  // b's n maps to a-index n + d
    const TruncatedSeries* lo = &a;
    const TruncatedSeries* hi = &b;
    real lo_sign = 1.0, hi_sign = bsign;
    if (d < 0) {
        std::swap(lo, hi);
        std::swap(lo_sign, hi_sign);
        d = -d;
    }
    TruncatedSeries r;
    r.prefactor_exponent = lo->prefactor_exponent;
    const int order = std::min(a.order(), b.order());
    r.coeffs.assign(order + 1, cplx(0.0));
    for (int n = 0; n <= order; ++n) {
        r.coeffs[n] = lo_sign * lo->coeffs[n];
        if (n - d >= 0 && n - d <= hi->order())
            r.coeffs[n] += hi_sign * hi->coeffs[n - d];
    }
    return r;
}

} // namespace

TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b) {
    return combine(a, b, 1.0);
}

TruncatedSeries sub(const TruncatedSeries& a, const TruncatedSeries& b) {
    return combine(a, b, -1.0);
}

TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b) {
    TruncatedSeries r;
    r.prefactor_exponent = a.prefactor_exponent + b.prefactor_exponent;
    const int order = std::min(a.order(), b.order());
    r.coeffs.assign(order + 1, cplx(0.0));
    for (int n = 0; n <= order; ++n)
        for (int k = 0; k <= n; ++k)
            if (k <= a.order() && n - k <= b.order())
                r.coeffs[n] += a.coeffs[k] * b.coeffs[n - k];
    return r;
}

TruncatedSeries scale(cplx c, const TruncatedSeries& f) {
    TruncatedSeries r = f;
    for (cplx& x : r.coeffs) x *= c;
    return r;
}

CompareResult compare(const TruncatedSeries& a, const TruncatedSeries& b, real tol) {
    const TruncatedSeries d = sub(a, b);
    real scale_ab = 1.0;
    for (const cplx& c : a.coeffs) scale_ab = std::max(scale_ab, std::abs(c));
    for (const cplx& c : b.coeffs) scale_ab = std::max(scale_ab, std::abs(c));
    real m = 0.0;
    for (const cplx& c : d.coeffs) m = std::max(m, std::abs(c));
    CompareResult r;
    r.max_residual = m / scale_ab;
    r.pass = r.max_residual <= tol;
    return r;
}

} // namespace qnek
