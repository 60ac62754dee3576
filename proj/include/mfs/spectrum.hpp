#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfs/ifs.hpp"
#include "mfs/kernels.hpp"

namespace mfs {

// Ratios and weights only; T depends on nothing else.
struct RatioWeights {
    std::vector<double> log_r, log_p;

    static RatioWeights from(const WeightedIFS& ifs);
    static RatioWeights from(std::span<const double> r, std::span<const double> p);
};

// Root of sum p_i^q r_i^{-T} = 1. Throws DomainError when |q| > 1e4.
double solve_T(const RatioWeights& rw, double q);
double solve_T(const WeightedIFS& ifs, double q);
// Residual |sum p_i^q r_i^{-T} - 1| at the returned root.
double T_residual(const RatioWeights& rw, double q, double T);

double T_derivative(const RatioWeights& rw, double q);
double T_derivative(const WeightedIFS& ifs, double q);

// Grid kernel: T and T' at every q.
void T_grid(const RatioWeights& rw, std::span<const double> q, std::span<double> T, std::span<double> Tp, Exec exec);

// 513 Chebyshev-spaced points on [0, 8] followed by 16, 32, 64.
std::vector<double> default_q_grid();

// Piecewise tau on [0, 1] for a dimensional regular system.
struct UnitIntervalTau {
    char case_label = 'a';
    int d = 1;
    double T_prime_1 = 0, T_0 = 0;
    std::optional<double> q_tilde;
    double T_q_tilde = 0;
    double slope_at_zero = 0;  // tau'(0+)
    double slope_at_one = 0;   // tau'(1-)
    bool conditional = true;   // dimensional regularity not asserted

    double value(const RatioWeights& rw, double q) const;
    double slope(const RatioWeights& rw, double q) const;
};

UnitIntervalTau tau_unit_interval(const WeightedIFS& ifs, int d);
UnitIntervalTau tau_unit_interval(const RatioWeights& rw, int d, bool dimensional_regular);

// tau(q) = min{d(q-1), T(q)} for q >= 1.
struct MinBranchTau {
    int d = 1;
    std::optional<double> q_zero;
    double kink_left_slope = 0, kink_right_slope = 0;
    double slope_at_one = 0;  // tau'(1+)
    bool conditional = true;  // needs d = 1 and the ESC

    double value(const RatioWeights& rw, double q) const;
    double slope(const RatioWeights& rw, double q) const;
    // "q-1" or "T", whichever is active at q.
    std::string branch(const RatioWeights& rw, double q) const;
};

MinBranchTau tau_shmerkin(const WeightedIFS& ifs);
MinBranchTau tau_shmerkin(const RatioWeights& rw, int d, bool esc);

struct Dimensions {
    double sim_dim_measure = 0;  // T'(1)
    double sim_dim_set = 0;      // -T(0)
    double s = 0;                // sum r_i^s = 1, solved independently
    double hausdorff_measure = 0;  // min{d, T'(1)} under dimensional regularity
};

struct SpectrumResult {
    std::vector<double> q, T, T_prime, tau, tau_slope;
    std::vector<std::string> branch, validity;
    UnitIntervalTau unit;
    MinBranchTau upper;
    Dimensions dims;
    double alpha_unit_lo = 0, alpha_unit_hi = 0;    // [tau'(1-), tau'(0+)]
    double alpha_upper_lo = 0, alpha_upper_hi = 0;  // [tau'(inf), tau'(1+)]
    double slope_infinity_error = 0;                // Richardson gap for tau'(inf)
    bool awsc = false;
};

SpectrumResult compute_spectrum(const WeightedIFS& ifs, const std::vector<double>& q_grid, Exec exec = Exec::Parallel,
                                 bool awsc_proven = false);

struct LegendreSpectrum {
    std::vector<double> alpha, f, argmin_q;
    std::vector<std::string> validity;
};

// f(alpha) = min over the tabulated q of alpha q - tau(q).
LegendreSpectrum legendre(const SpectrumResult& s, const std::vector<double>& alpha_grid);
// alpha grid made of the tabulated tau slopes (distinct, sorted).
std::vector<double> slope_alpha_grid(const SpectrumResult& s);
// Inverse transform tau**(q) = min over alpha of alpha q - f(alpha).
std::vector<double> legendre_inverse(const LegendreSpectrum& l, const std::vector<double>& q);

// Largest violation of concavity, measured as the increase of successive
// divided differences (<= 0 means concave).
double concavity_defect(std::span<const double> x, std::span<const double> y);

}  // namespace mfs
