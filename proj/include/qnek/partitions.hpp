#pragma once

#include "qnek/qspecial.hpp"

#include <vector>

namespace qnek {

/// Integer partition stored as weakly decreasing positive parts.
struct Partition {
    std::vector<int> parts;

    Partition() = default;
    explicit Partition(std::vector<int> p);

    int size() const;                       // |lambda|
    int length() const { return static_cast<int>(parts.size()); }
    int part(int i) const;                  // lambda_i, 1-based; 0 past the end

    bool operator==(const Partition& o) const { return parts == o.parts; }
};

Partition conjugate(const Partition& la);

/// Arm / leg of cell (i,j) (1-based) wrt `la`; both may be negative when the
/// cell lies outside `la`.
int arm(const Partition& la, int i, int j);
int leg(const Partition& la, int i, int j);

/// Remove one box from every row, dropping rows that become empty.
Partition bar(const Partition& la);

/// Add one box to each of the first n rows and delete row n+1.
Partition r_n(const Partition& la, int n);

/// lambda + 1^m: add one box to each of the first m rows; requires m >= length.
Partition add_ones(const Partition& la, int m);

/// N_{lambda,mu}(u) =
///   prod_{(i,j) in lambda} (1 - q^{-leg_la(i,j) - arm_mu(i,j) - 1} u)
/// * prod_{(i,j) in mu}     (1 - q^{ leg_mu(i,j) + arm_la(i,j) + 1} u)
cplx nekrasov_factor(const Partition& la, const Partition& mu, cplx u, const QBase& base);

/// Same with u = q^k for integer k; exponents combine exactly, so structural
/// zeros come out as exact 0.
cplx nekrasov_factor_qpow(const Partition& la, const Partition& mu, long k, const QBase& base);

/// N_{lambda,mu}(q^w). When w is within 1e-12 of an integer the exact integer
/// path is taken, otherwise the generic one.
cplx nekrasov_factor_qexp(const Partition& la, const Partition& mu, cplx w, const QBase& base);

using PartitionTuple = std::vector<Partition>;

int tuple_size(const PartitionTuple& t);

/// All partitions of n, largest first part first.
std::vector<Partition> partitions_of(int n);

/// All partitions of 0..max_size, graded by size, then by parts
/// (larger first part first) within a grade.
std::vector<Partition> partitions_upto(int max_size);

/// All N-tuples with total size <= max_total, graded by total size, then
/// lexicographically componentwise in the partitions_upto order.
std::vector<PartitionTuple> enumerate_tuples(int N, int max_total);

} // namespace qnek
