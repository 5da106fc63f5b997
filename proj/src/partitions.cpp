#include "qnek/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qnek {

Partition::Partition(std::vector<int> p) : parts(std::move(p)) {
    for (size_t i = 0; i < parts.size(); ++i) {
        if (parts[i] <= 0)
            throw std::invalid_argument("Partition: parts must be positive");
        if (i > 0 && parts[i] > parts[i - 1])
            throw std::invalid_argument("Partition: parts must be weakly decreasing");
    }
}

int Partition::size() const {
    return std::accumulate(parts.begin(), parts.end(), 0);
}

int Partition::part(int i) const {
    return (i >= 1 && i <= length()) ? parts[i - 1] : 0;
}

Partition conjugate(const Partition& la) {
    std::vector<int> out;
    const int w = la.part(1);
    out.reserve(w);
    for (int j = 1; j <= w; ++j) {
        int c = 0;
        for (int p : la.parts)
            if (p >= j) ++c;
        out.push_back(c);
    }
    return Partition(std::move(out));
}

int arm(const Partition& la, int i, int j) { return la.part(i) - j; }

int leg(const Partition& la, int i, int j) {
    int c = 0;
    for (int p : la.parts)
        if (p >= j) ++c;
    return c - i;
}

Partition bar(const Partition& la) {
    std::vector<int> out;
    for (int p : la.parts)
        if (p > 1) out.push_back(p - 1);
    return Partition(std::move(out));
}

Partition r_n(const Partition& la, int n) {
    if (n < 0) throw std::invalid_argument("r_n: n must be >= 0");
    std::vector<int> out;
    for (int i = 1; i <= n; ++i) out.push_back(la.part(i) + 1);
    for (int i = n + 2; i <= la.length(); ++i) out.push_back(la.part(i));
    return Partition(std::move(out));
}

Partition add_ones(const Partition& la, int m) {
    if (m < la.length())
        throw std::invalid_argument("add_ones: need m >= length(lambda)");
    std::vector<int> out;
    for (int i = 1; i <= m; ++i) out.push_back(la.part(i) + 1);
    return Partition(std::move(out));
}

namespace {

// Hook exponents of N_{la,mu}: the factor for a cell of la is
// 1 - q^{e} u with e = -leg_la - arm_mu - 1, for a cell of mu
// e = leg_mu + arm_la + 1.
template <typename F>
void nekrasov_exponents(const Partition& la, const Partition& mu, F&& emit) {
    const Partition lap = conjugate(la);
    const Partition mup = conjugate(mu);
    for (int i = 1; i <= la.length(); ++i)
        for (int j = 1; j <= la.part(i); ++j)
            emit(-(lap.part(j) - i) - (mu.part(i) - j) - 1);
    for (int i = 1; i <= mu.length(); ++i)
        for (int j = 1; j <= mu.part(i); ++j)
            emit((mup.part(j) - i) + (la.part(i) - j) + 1);
}

} // namespace

cplx nekrasov_factor(const Partition& la, const Partition& mu, cplx u, const QBase& base) {
    cplx r{1.0, 0.0};
    nekrasov_exponents(la, mu, [&](int e) { r *= cplx(1.0) - base.ipow(e) * u; });
    return r;
}

cplx nekrasov_factor_qpow(const Partition& la, const Partition& mu, long k, const QBase& base) {
    cplx r{1.0, 0.0};
    bool zero = false;
    nekrasov_exponents(la, mu, [&](int e) {
        const long ek = e + k;
        if (ek == 0)
            zero = true;
        else
            r *= cplx(1.0) - base.ipow(ek);
    });
    return zero ? cplx(0.0) : r;
}

cplx nekrasov_factor_qexp(const Partition& la, const Partition& mu, cplx w, const QBase& base) {
    const real k = std::round(w.real());
    if (std::abs(w.real() - k) < 1e-12 && std::abs(w.imag()) < 1e-12)
        return nekrasov_factor_qpow(la, mu, static_cast<long>(k), base);
    return nekrasov_factor(la, mu, base.pow(w), base);
}

int tuple_size(const PartitionTuple& t) {
    int s = 0;
    for (const auto& p : t) s += p.size();
    return s;
}

namespace {

void gen_partitions(int n, int max_part, std::vector<int>& cur,
                    std::vector<Partition>& out) {
    if (n == 0) {
        out.emplace_back(cur);
        return;
    }
    for (int p = std::min(n, max_part); p >= 1; --p) {
        cur.push_back(p);
        gen_partitions(n - p, p, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<Partition> partitions_of(int n) {
    std::vector<Partition> out;
    std::vector<int> cur;
    gen_partitions(n, n, cur, out);
    return out;
}

std::vector<Partition> partitions_upto(int max_size) {
    std::vector<Partition> out;
    for (int n = 0; n <= max_size; ++n) {
        auto pn = partitions_of(n);
        out.insert(out.end(), pn.begin(), pn.end());
    }
    return out;
}

std::vector<PartitionTuple> enumerate_tuples(int N, int max_total) {
    const auto pool = partitions_upto(max_total);
    std::vector<PartitionTuple> out;
    std::vector<size_t> idx(N, 0);
    // Odometer over pool indices in lex order, pruned by the running total;
    // a stable sort by total size then gives the graded order.
    while (true) {
        int total = 0;
        int overflow_at = -1;
        for (int c = 0; c < N; ++c) {
            total += pool[idx[c]].size();
            if (total > max_total) {
                overflow_at = c;
                break;
            }
        }
        if (overflow_at < 0) {
            PartitionTuple t;
            t.reserve(N);
            for (int c = 0; c < N; ++c) t.push_back(pool[idx[c]]);
            out.push_back(std::move(t));
        }
        // advance, skipping the whole subtree on overflow
        int c = (overflow_at >= 0) ? overflow_at : N - 1;
        if (overflow_at >= 0)
            for (int d = c + 1; d < N; ++d) idx[d] = 0;
        while (c >= 0) {
            if (++idx[c] < pool.size()) break;
            idx[c] = 0;
            --c;
        }
        if (c < 0) break;
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const PartitionTuple& a, const PartitionTuple& b) {
                         return tuple_size(a) < tuple_size(b);
                     });
    return out;
}

} // namespace qnek
