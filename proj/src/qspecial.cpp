#include "qnek/qspecial.hpp"

#include <cmath>

namespace qnek {

namespace {
constexpr real kResonanceTol = 1e-8;
}

QBase::QBase(cplx q_) : q(q_) {
    const real aq = std::abs(q_);
    if (!std::isfinite(aq) || aq == 0.0 || aq >= 1.0)
        throw std::invalid_argument("QBase: need 0 < |q| < 1, got |q| = " + std::to_string(aq));
    log_q = std::log(q_);
}

cplx QBase::ipow(long k) const {
    cplx b = k >= 0 ? q : cplx(1.0) / q;
    unsigned long n = static_cast<unsigned long>(k >= 0 ? k : -k);
    cplx r{1.0, 0.0};
    while (n) {
        if (n & 1UL) r *= b;
        b *= b;
        n >>= 1UL;
    }
    return r;
}

cplx q_pochhammer(cplx a, long n, const QBase& base) {
    if (n < 0) throw std::invalid_argument("q_pochhammer: negative length");
    cplx r{1.0, 0.0};
    cplx aq = a;
    for (long j = 0; j < n; ++j) {
        r *= cplx(1.0) - aq;
        aq *= base.q;
    }
    return r;
}

cplx q_pochhammer_inf(cplx a, const QBase& base, const ProductTruncation& trunc) {
    cplx r{1.0, 0.0};
    cplx aq = a;
    for (int j = 0; j < trunc.max_factors; ++j) {
        if (std::abs(aq) < trunc.tail_bound) break;
        r *= cplx(1.0) - aq;
        aq *= base.q;
    }
    return r;
}

cplx q_double_pochhammer_inf(cplx a, const QBase& base, const ProductTruncation& trunc) {
    cplx r{1.0, 0.0};
    cplx aq = a;
    for (int m = 0; m < trunc.max_factors; ++m) {
        if (std::abs(aq) * (m + 1) < trunc.tail_bound) break;
        const cplx f = cplx(1.0) - aq;
        // multiplicity m+1
        cplx fp = f;
        for (int e = 0; e < m; ++e) fp *= f;
        r *= fp;
        aq *= base.q;
    }
    return r;
}

cplx q_number(cplx u, const QBase& base) {
    return (cplx(1.0) - base.pow(u)) / (cplx(1.0) - base.q);
}

cplx q_gamma(cplx u, const QBase& base, const ProductTruncation& trunc) {
    // log (q;q)_inf - log (q^u;q)_inf + (1-u) log(1-q)
    cplx acc = (cplx(1.0) - u) * std::log(cplx(1.0) - base.q);
    cplx num = base.q;           // q^{j+1}
    cplx den = base.pow(u);      // q^{u+j}
    for (int j = 0; j < trunc.max_factors; ++j) {
        const bool num_small = std::abs(num) < trunc.tail_bound;
        const bool den_small = std::abs(den) < trunc.tail_bound;
        if (num_small && den_small) break;
        if (!num_small) acc += std::log(cplx(1.0) - num);
        if (!den_small) {
            const cplx f = cplx(1.0) - den;
            if (std::abs(f) < kResonanceTol)
                throw ResonanceError("q_gamma: argument within 1e-8 of a pole (u + j ~ 0 mod Z_<=0)");
            acc -= std::log(f);
        }
        num *= base.q;
        den *= base.q;
    }
    return std::exp(acc);
}

cplx q_barnes(cplx u, const QBase& base, const ProductTruncation& trunc) {
    // (q^u;q,q)_inf can vanish (zeros at u = 0, -1, -2, ...); handle exact
    // zeros outside the log accumulation.
    cplx acc = (u - cplx(1.0)) * std::log(q_pochhammer_inf(base.q, base, trunc))
             - cplx(0.5) * (u - cplx(1.0)) * (u - cplx(2.0)) * std::log(cplx(1.0) - base.q);
    cplx zero_factor{1.0, 0.0};
    bool hit_zero = false;
    cplx num = base.pow(u);  // q^{u+m}
    cplx den = base.q;       // q^{1+m}
    for (int m = 0; m < trunc.max_factors; ++m) {
        const real mult = static_cast<real>(m + 1);
        const bool num_small = std::abs(num) * mult < trunc.tail_bound;
        const bool den_small = std::abs(den) * mult < trunc.tail_bound;
        if (num_small && den_small) break;
        if (!num_small) {
            const cplx f = cplx(1.0) - num;
            if (std::abs(f) < kResonanceTol) {
                hit_zero = true;
                zero_factor *= std::pow(f, m + 1);
            } else {
                acc += cplx(mult) * std::log(f);
            }
        }
        if (!den_small) acc -= cplx(mult) * std::log(cplx(1.0) - den);
        num *= base.q;
        den *= base.q;
    }
    cplx r = std::exp(acc);
    return hit_zero ? r * zero_factor : r;
}

cplx theta_q(cplx x, const QBase& base, const ProductTruncation& trunc) {
    if (x == cplx(0.0)) throw std::invalid_argument("theta_q: x = 0");
    return q_pochhammer_inf(x, base, trunc)
         * q_pochhammer_inf(base.q / x, base, trunc)
         * q_pochhammer_inf(base.q, base, trunc);
}

cplx theta(cplx u, const QBase& base, const ProductTruncation& trunc) {
    return base.pow(u * (u - cplx(1.0)) * cplx(0.5)) * theta_q(base.pow(u), base, trunc);
}

} // namespace qnek
