#include "mfs/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mfs/errors.hpp"

namespace mfs {

RatioWeights RatioWeights::from(std::span<const double> r, std::span<const double> p) {
    if (r.size() != p.size() || r.empty()) throw DomainError("ratios and weights must be non-empty and of equal length");
    RatioWeights rw;
    for (std::size_t i = 0; i < r.size(); ++i) {
        rw.log_r.push_back(std::log(r[i]));
        rw.log_p.push_back(std::log(p[i]));
    }
    return rw;
}

RatioWeights RatioWeights::from(const WeightedIFS& ifs) {
    auto r = ifs.ratios();
    return from(r, ifs.weights);
}

namespace {

struct LseEval {
    double h = 0;      // log sum exp(q log p_i - T log r_i)
    double dh = 0;     // d h / d T
    double scale = 0;  // largest |term|, for the rounding floor
};

LseEval lse(const RatioWeights& rw, double q, double T) {
    const std::size_t l = rw.log_r.size();
    double m = -std::numeric_limits<double>::infinity();
    double scale = 0;
    for (std::size_t i = 0; i < l; ++i) {
        const double t = q * rw.log_p[i] - T * rw.log_r[i];
        m = std::max(m, t);
        scale = std::max({scale, std::fabs(q * rw.log_p[i]), std::fabs(T * rw.log_r[i])});
    }
    double s = 0, ds = 0;
    for (std::size_t i = 0; i < l; ++i) {
        const double e = std::exp(q * rw.log_p[i] - T * rw.log_r[i] - m);
        s += e;
        ds += e * (-rw.log_r[i]);
    }
    return {m + std::log(s), ds / s, scale};
}

void check_q(double q) {
    if (!(std::fabs(q) <= 1e4)) throw DomainError("q out of range: |q| must be at most 1e4");
}

}  // namespace

double solve_T(const RatioWeights& rw, double q) {
    check_q(q);
    if (q == 1.0) return 0.0;  // weights sum to one
    const std::size_t l = rw.log_r.size();
    const double log_l = std::log(static_cast<double>(l));
    // Every term below -log l gives h < 0; one term >= 0 gives h >= 0.
    double lo = std::numeric_limits<double>::infinity(), hi = lo;
    for (std::size_t i = 0; i < l; ++i) {
        const double a = -rw.log_r[i];
        lo = std::min(lo, (-log_l - q * rw.log_p[i]) / a);
        hi = std::min(hi, (-q * rw.log_p[i]) / a);
    }
    double width = std::max(1.0, hi - lo);
    lo -= 1e-9 * width;
    for (int k = 0; lse(rw, q, lo).h > 0 && k < 200; ++k) lo -= (width *= 2);
    for (int k = 0; lse(rw, q, hi).h < 0 && k < 200; ++k) hi += (width *= 2);
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 300; ++it) {
        const LseEval e = lse(rw, q, x);
        if (e.h == 0) return x;
        (e.h > 0 ? hi : lo) = x;
        if (std::fabs(e.h) <= 4 * std::numeric_limits<double>::epsilon() * (1 + e.scale)) return x;
        double nx = x - e.h / e.dh;
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (nx == x || hi - lo <= 2 * std::numeric_limits<double>::epsilon() * std::fabs(x)) return nx;
        x = nx;
    }
    return x;
}

double solve_T(const WeightedIFS& ifs, double q) { return solve_T(RatioWeights::from(ifs), q); }

double T_residual(const RatioWeights& rw, double q, double T) {
    return std::fabs(std::expm1(lse(rw, q, T).h));
}

namespace {

double derivative_at(const RatioWeights& rw, double q, double T) {
    const std::size_t l = rw.log_r.size();
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < l; ++i) m = std::max(m, q * rw.log_p[i] - T * rw.log_r[i]);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < l; ++i) {
        const double w = std::exp(q * rw.log_p[i] - T * rw.log_r[i] - m);
        num += w * rw.log_p[i];
        den += w * rw.log_r[i];
    }
    return num / den;
}

}  // namespace

double T_derivative(const RatioWeights& rw, double q) { return derivative_at(rw, q, solve_T(rw, q)); }

double T_derivative(const WeightedIFS& ifs, double q) { return T_derivative(RatioWeights::from(ifs), q); }

void T_grid(const RatioWeights& rw, std::span<const double> q, std::span<double> T, std::span<double> Tp, Exec exec) {
    const std::size_t n = q.size();
    if (exec == Exec::Serial) {
        for (std::size_t k = 0; k < n; ++k) {
            T[k] = solve_T(rw, q[k]);
            Tp[k] = derivative_at(rw, q[k], T[k]);
        }
        return;
    }
    for (double x : q) check_q(x);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < n; ++k) {
        T[k] = solve_T(rw, q[k]);
        Tp[k] = derivative_at(rw, q[k], T[k]);
    }
}

std::vector<double> default_q_grid() {
    std::vector<double> q;
    for (int k = 0; k <= 512; ++k) q.push_back(4.0 - 4.0 * std::cos(std::numbers::pi * k / 512.0));
    q.front() = 0.0;
    q.back() = 8.0;
    q.insert(q.end(), {16.0, 32.0, 64.0});
    return q;
}

// ---------------------------------------------------------------------------

double UnitIntervalTau::value(const RatioWeights& rw, double q) const {
    switch (case_label) {
        case 'a': return d * (q - 1);
        case 'b': return solve_T(rw, q);
        default:
            if (q < *q_tilde) return q * (d + T_q_tilde) / *q_tilde - d;
            return solve_T(rw, q);
    }
}

double UnitIntervalTau::slope(const RatioWeights& rw, double q) const {
    switch (case_label) {
        case 'a': return d;
        case 'b': return T_derivative(rw, q);
        default:
            if (q < *q_tilde) return (d + T_q_tilde) / *q_tilde;
            return T_derivative(rw, q);
    }
}

UnitIntervalTau tau_unit_interval(const RatioWeights& rw, int d, bool dimensional_regular) {
    UnitIntervalTau u;
    u.d = d;
    u.conditional = !dimensional_regular;
    u.T_prime_1 = T_derivative(rw, 1.0);
    u.T_0 = solve_T(rw, 0.0);
    const double tol = 1e-12;
    if (u.T_prime_1 >= d - tol) {
        u.case_label = 'a';
        u.slope_at_zero = d;
        u.slope_at_one = d;
        return u;
    }
    u.slope_at_one = u.T_prime_1;
    if (u.T_0 >= -d - tol) {
        u.case_label = 'b';
        u.slope_at_zero = T_derivative(rw, 0.0);
        return u;
    }
    u.case_label = 'c';
    // g(q) = T'(q) q - T(q) decreases from -T(0) > d to T'(1) < d.
    auto g = [&](double q) { return T_derivative(rw, q) * q - solve_T(rw, q); };
    double lo = 0, hi = 1;
    if (!(g(lo) > d && g(hi) < d))
        throw NumericalError("q-tilde bracket failed: g(0) = " + std::to_string(g(lo)) + ", g(1) = " + std::to_string(g(hi)));
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > d ? lo : hi) = mid;
    }
    u.q_tilde = hi;
    u.T_q_tilde = solve_T(rw, hi);
    u.slope_at_zero = (d + u.T_q_tilde) / hi;
    return u;
}

UnitIntervalTau tau_unit_interval(const WeightedIFS& ifs, int d) {
    return tau_unit_interval(RatioWeights::from(ifs), d, ifs.assertions.dimensional_regular);
}

double MinBranchTau::value(const RatioWeights& rw, double q) const { return std::min(d * (q - 1), solve_T(rw, q)); }

std::string MinBranchTau::branch(const RatioWeights& rw, double q) const {
    if (q == 1.0) return "q-1";
    if (q_zero) return q < *q_zero ? "q-1" : "T";
    return d * (q - 1) <= solve_T(rw, q) ? "q-1" : "T";
}

double MinBranchTau::slope(const RatioWeights& rw, double q) const {
    if (q == 1.0) return slope_at_one;
    return branch(rw, q) == "q-1" ? d : T_derivative(rw, q);
}

MinBranchTau tau_shmerkin(const RatioWeights& rw, int d, bool esc) {
    MinBranchTau m;
    m.d = d;
    m.conditional = !(esc && d == 1);
    const double t1 = T_derivative(rw, 1.0);
    m.slope_at_one = std::min<double>(d, t1);
    bool heavy = false;  // p_i > r_i^d for some i
    for (std::size_t i = 0; i < rw.log_r.size(); ++i) heavy = heavy || rw.log_p[i] > d * rw.log_r[i];
    if (t1 > d && heavy) {
        auto h = [&](double q) { return solve_T(rw, q) - d * (q - 1); };
        double lo = 1, hi = 2;
        while (h(hi) > 0) {
            lo = hi;
            hi *= 2;
            if (hi > 1e4) throw NumericalError("crossing of T with d(q-1) not found below q = 1e4");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (h(mid) > 0 ? lo : hi) = mid;
        }
        m.q_zero = 0.5 * (lo + hi);
        m.kink_left_slope = d;
        m.kink_right_slope = T_derivative(rw, *m.q_zero);
    }
    return m;
}

MinBranchTau tau_shmerkin(const WeightedIFS& ifs) {
    return tau_shmerkin(RatioWeights::from(ifs), ifs.ambient_dim, ifs.assertions.esc.value_or(false));
}

// ---------------------------------------------------------------------------

SpectrumResult compute_spectrum(const WeightedIFS& ifs, const std::vector<double>& q_grid, Exec exec,
                                bool awsc_proven) {
    const auto rw = RatioWeights::from(ifs);
    const int d = ifs.ambient_dim;
    const bool esc = ifs.assertions.esc.value_or(false);
    SpectrumResult s;
    s.q = q_grid;
    std::sort(s.q.begin(), s.q.end());
    s.q.erase(std::unique(s.q.begin(), s.q.end()), s.q.end());
    const std::size_t n = s.q.size();
    s.T.resize(n);
    s.T_prime.resize(n);
    T_grid(rw, s.q, s.T, s.T_prime, exec);
    s.unit = tau_unit_interval(rw, d, ifs.assertions.dimensional_regular);
    s.upper = tau_shmerkin(rw, d, esc);
    s.awsc = awsc_proven;

    const std::string unit_validity =
        ifs.assertions.dimensional_regular ? "proven:dimensional-regular-unit-interval" : "conditional:dimensional-regular";
    const std::string upper_validity = (d == 1 && esc) ? "proven:esc-shmerkin-branch" : "heuristic";
    for (std::size_t k = 0; k < n; ++k) {
        const double q = s.q[k];
        if (q < 0) {
            s.tau.push_back(s.T[k]);
            s.tau_slope.push_back(s.T_prime[k]);
            s.branch.push_back("T");
            s.validity.push_back("invalid");
        } else if (q <= 1) {
            s.tau.push_back(q == 1 ? 0.0 : s.unit.value(rw, q));
            s.tau_slope.push_back(s.unit.slope(rw, q));
            const char c = s.unit.case_label;
            std::string br = c == 'a' ? "a:d(q-1)" : c == 'b' ? "b:T" : (q < *s.unit.q_tilde ? "c:linear" : "c:T");
            s.branch.push_back(br);
            s.validity.push_back(unit_validity);
        } else {
            s.tau.push_back(s.upper.value(rw, q));
            s.tau_slope.push_back(s.upper.slope(rw, q));
            s.branch.push_back(s.upper.branch(rw, q));
            s.validity.push_back(upper_validity);
        }
    }

    s.dims.sim_dim_measure = s.unit.T_prime_1;
    s.dims.sim_dim_set = -s.unit.T_0;
    s.dims.s = similarity_dimension_set(ifs.ratios());
    s.dims.hausdorff_measure = std::min<double>(d, s.unit.T_prime_1);
    s.alpha_unit_lo = s.unit.slope_at_one;
    s.alpha_unit_hi = s.unit.slope_at_zero;
    s.alpha_upper_hi = s.upper.slope_at_one;
    const double s64 = s.upper.slope(rw, 64.0), s128 = s.upper.slope(rw, 128.0);
    s.alpha_upper_lo = s64;
    s.slope_infinity_error = std::fabs(s128 - s64);
    return s;
}

LegendreSpectrum legendre(const SpectrumResult& s, const std::vector<double>& alpha_grid) {
    LegendreSpectrum l;
    const double tol = 1e-12;
    auto within = [&](double a, double lo, double hi) { return a >= lo - tol && a <= hi + tol; };
    const bool unit_proven = !s.unit.conditional;
    for (double a : alpha_grid) {
        double best = std::numeric_limits<double>::infinity(), arg = 0;
        for (std::size_t k = 0; k < s.q.size(); ++k) {
            if (s.q[k] < 0) continue;
            const double v = a * s.q[k] - s.tau[k];
            if (v < best) best = v, arg = s.q[k];
        }
        l.alpha.push_back(a);
        l.f.push_back(best);
        l.argmin_q.push_back(arg);
        std::string v = "heuristic";
        if (s.awsc && within(a, s.alpha_upper_lo, s.alpha_unit_hi)) {
            v = "proven:awsc";
        } else if (within(a, s.alpha_unit_lo, s.alpha_unit_hi)) {
            v = unit_proven ? "proven:dimensional-regular-unit-interval" : "conditional:dimensional-regular";
        } else if (within(a, s.alpha_upper_lo, s.alpha_upper_hi) && !s.upper.conditional) {
            v = "proven:esc-shmerkin-branch";
        }
        l.validity.push_back(v);
    }
    return l;
}

std::vector<double> slope_alpha_grid(const SpectrumResult& s) {
    std::vector<double> a;
    for (std::size_t k = 0; k < s.q.size(); ++k)
        if (s.q[k] >= 0) a.push_back(s.tau_slope[k]);
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

std::vector<double> legendre_inverse(const LegendreSpectrum& l, const std::vector<double>& q) {
    std::vector<double> out;
    for (double x : q) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < l.alpha.size(); ++j) best = std::min(best, l.alpha[j] * x - l.f[j]);
        out.push_back(best);
    }
    return out;
}

double concavity_defect(std::span<const double> x, std::span<const double> y) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 2 < x.size(); ++k) {
        const double s0 = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
        const double s1 = (y[k + 2] - y[k + 1]) / (x[k + 2] - x[k + 1]);
        worst = std::max(worst, s1 - s0);
    }
    return worst;
}

}  // namespace mfs
