#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfs/census.hpp"
#include "mfs/ifs.hpp"
#include "mfs/kernels.hpp"

namespace mfs {

// Affine system psi_i(z) = A z + b_i on C^m built from the expanding
// conjugates of beta. Conjugates are reordered: expanding first (the
// distinguished one at position 0), then the unit-circle band, then the
// contracting ones; `order[j]` is the field's conjugate index at position j.
struct DualSystem {
    int m = 0, m_prime = 0, d = 0;
    std::vector<int> order;
    std::vector<std::complex<double>> beta;              // beta_j in dual order
    std::vector<std::vector<std::complex<double>>> a;    // a_{i,j} in dual order
    Integer M = 1;
    double D = 0, C = 0;
    double diam_bound = 0;  // upper bound on diam of the dual attractor
    double a_max_tail = 0;  // max 2|a_{i,j}| over j > m
    std::optional<int> unit_circle_structural;  // from the reciprocal trace polynomial
    std::vector<std::string> warnings;

    double claim_bound(int n) const;     // C n^{-(m'/m - 1)}
    double kappa_envelope(int n) const;  // ((4 + 4 diam)/C)^{2m} n^{2(m' - m)}
    double ball_radius() const { return 1.0 + diam_bound; }
};

DualSystem build_dual(const WeightedIFS& ifs, double unit_tol = 1e-9);

// t_{u,j} for every class at depth n; row-major, `m` coordinates (or all d
// when `all_conjugates`).
std::vector<std::complex<double>> rescaled_points(const DualSystem& dual, const OverlapCensus& c, int n,
                                                  bool all_conjugates = false);

struct PropertyPReport {
    int n = 0;
    std::size_t words = 0, pairs = 0, equal_pairs = 0, violations = 0;
    bool exhaustive = false;
    double max_embedding_mismatch = 0;  // census embeddings vs direct Horner, relative
};

// Exact equality of two words' maps against numeric equality at every
// conjugate. Exhaustive over all word pairs when l^n <= word_limit, otherwise
// `sample_pairs` random pairs. Throws CorrectnessAlarm on a violation.
PropertyPReport verify_property_P(const DualSystem& dual, const OverlapCensus& c, int n, std::size_t word_limit = 6561,
                                  std::size_t sample_pairs = 100000, std::uint64_t seed = 1);

struct KappaResult {
    int n = 0;
    long long lower = 0, upper = 0;
    double envelope = 0;
    bool exact = false;
};

// Max number of rescaled points in a ball of radius 1 + diam bound.
KappaResult kappa_n(const DualSystem& dual, const OverlapCensus& c, int n, Exec exec = Exec::Parallel);
// Same on a raw point set (dim complex coordinates per point).
KappaResult kappa_points(const std::vector<std::complex<double>>& pts, std::size_t dim, double radius, Exec exec);

struct SeparationRow {
    int n = 0;
    double min_distance = 0;
    bool distance_is_lower_bound = false;  // no pair closer than the grid cell
    double bound = 0;
    bool ok = true;
};

// Minimum distance between distinct classes' rescaled points against
// C n^{-(m'/m - 1)}. Exhaustive for N <= exhaustive_limit, otherwise a
// certified grid search. Throws CorrectnessAlarm on violation.
SeparationRow separation_claim_check(const DualSystem& dual, const OverlapCensus& c, int n,
                                     std::size_t exhaustive_limit = 10000, Exec exec = Exec::Parallel);

struct IntegralityReport {
    std::size_t pairs = 0, failures = 0, exact_mismatches = 0;
    double worst_distance = 0;  // distance of M^d prod to the nearest integer, relative
};

// M^d prod_j (t_{u,j} - t_{v,j}) for random distinct class pairs, checked
// numerically and against the exact field norm.
IntegralityReport integrality_check(const DualSystem& dual, const OverlapCensus& c, std::size_t pairs, int max_depth,
                                    std::uint64_t seed = 1);

}  // namespace mfs
