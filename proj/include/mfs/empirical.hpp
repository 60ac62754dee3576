#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "mfs/ifs.hpp"
#include "mfs/kernels.hpp"

namespace mfs {

// Masses are fixed point with this many fractional bits, so sums are exact
// and independent of the deposition order.
inline constexpr int kMassBits = 100;

struct EmpiricalOptions {
    // Words are taken from W_{n+g}, so each word image is 2^-g of a box.
    // Negative means automatic: 0 when every ratio is a power of 1/2, else 6.
    int guard_bits = -1;
    std::size_t word_budget = 2'000'000'000;
    Exec exec = Exec::Parallel;
};

// Mass of the self-similar measure on dyadic boxes [k 2^-n, (k+1) 2^-n).
struct DyadicMeasure {
    int n = 0;
    int guard_bits = 0;
    long long k0 = 0;                 // box index of fixed[0]
    std::vector<__int128> fixed;      // mass * 2^kMassBits
    std::uint64_t words = 0;

    double mass(std::size_t i) const;
    double total() const;
    std::size_t occupied() const;
    // Nonzero boxes as (box index, mass), ascending.
    std::vector<std::pair<long long, double>> boxes() const;
    // Masses of the boxes at scale n - 1, by summing sibling boxes.
    DyadicMeasure coarsen() const;
};

// One-dimensional systems only. Every word of the section deposits its weight
// at the box containing the image of the hull midpoint. Throws BudgetError.
DyadicMeasure discretize(const WeightedIFS& ifs, int n, const EmpiricalOptions& opt = {});

int auto_guard_bits(const WeightedIFS& ifs);

// log sum m_k^q / (-n log 2). Throws DomainError for q < 0.
double empirical_tau(const DyadicMeasure& m, double q);
// (log S(n2) - log S(n1)) / ((n1 - n2) log 2) for n1 < n2.
double empirical_tau_two_scale(const DyadicMeasure& m1, const DyadicMeasure& m2, double q);

struct EmpiricalRow {
    double q = 0;
    int n1 = 0, n2 = 0;
    double empirical = 0, theoretical = 0, abs_error = 0;
};

std::vector<double> validation_q_grid();

struct CoarseBin {
    double alpha_lo = 0, alpha_hi = 0;
    std::size_t count = 0;
    double f = 0;  // log2(count) / n, -inf when empty
};

// Histogram of alpha_k = -log2(m_k)/n over `bins` equal bins in [alpha_lo, alpha_hi).
std::vector<CoarseBin> coarse_spectrum(const DyadicMeasure& m, double alpha_lo, double alpha_hi, std::size_t bins);

}  // namespace mfs
