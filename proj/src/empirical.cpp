#include "mfs/empirical.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "mfs/errors.hpp"

namespace mfs {

namespace {

constexpr long double kMassScale = 1267650600228229401496703205376.0L;  // 2^100

double fixed_to_double(__int128 v) { return static_cast<double>(static_cast<long double>(v) / kMassScale); }

bool power_of_half(double r) {
    int e = 0;
    return std::frexp(r, &e) == 0.5;
}

struct Deposit {
    std::vector<double> a, t, p;  // signed ratio, translation, weight per map
    double c = 0;                 // reference point
    int depth_fixed = 0;          // homogeneous systems: section is a fixed depth
    double threshold = 0;         // 2^-(n+g)
    double box_scale = 0;         // 2^n
    long long k0 = 0;
    std::size_t size = 0;
    std::size_t budget = 0;

    bool leaf(int depth, double A) const {
        return depth_fixed > 0 ? depth >= depth_fixed : std::fabs(A) <= threshold;
    }

    // phi_u(x) = A x + B, weight P; leaves deposited into `acc`.
    bool expand(int depth, double A, double B, double P, std::vector<__int128>& acc,
                std::atomic<std::uint64_t>& words) const {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double A2 = A * a[i];
            const double B2 = A * t[i] + B;
            const double P2 = P * p[i];
            if (leaf(depth + 1, A2)) {
                if (words.fetch_add(1, std::memory_order_relaxed) >= budget) return false;
                deposit(A2 * c + B2, P2, acc);
            } else if (!expand(depth + 1, A2, B2, P2, acc, words)) {
                return false;
            }
        }
        return true;
    }

    void deposit(double x, double P, std::vector<__int128>& acc) const {
        long long k = static_cast<long long>(std::floor(x * box_scale)) - k0;
        k = std::clamp<long long>(k, 0, static_cast<long long>(size) - 1);
        acc[static_cast<std::size_t>(k)] += static_cast<__int128>(std::ldexp(static_cast<long double>(P), kMassBits));
    }
};

struct Node {
    int depth;
    double A, B, P;
    bool is_leaf;
};

}  // namespace

double DyadicMeasure::mass(std::size_t i) const { return fixed_to_double(fixed.at(i)); }

double DyadicMeasure::total() const {
    __int128 s = 0;
    for (auto v : fixed) s += v;
    return fixed_to_double(s);
}

std::size_t DyadicMeasure::occupied() const {
    return static_cast<std::size_t>(std::count_if(fixed.begin(), fixed.end(), [](__int128 v) { return v != 0; }));
}

std::vector<std::pair<long long, double>> DyadicMeasure::boxes() const {
    std::vector<std::pair<long long, double>> out;
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        if (fixed[i] != 0) out.emplace_back(k0 + static_cast<long long>(i), fixed_to_double(fixed[i]));
    }
    return out;
}

DyadicMeasure DyadicMeasure::coarsen() const {
    if (n < 1) throw DomainError("cannot coarsen scale 0");
    DyadicMeasure c;
    c.n = n - 1;
    c.guard_bits = guard_bits;
    c.words = words;
    auto half = [](long long k) { return k >= 0 ? k / 2 : -((-k + 1) / 2); };
    c.k0 = half(k0);
    const long long last = half(k0 + static_cast<long long>(fixed.size()) - 1);
    c.fixed.assign(static_cast<std::size_t>(last - c.k0 + 1), 0);
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        c.fixed[static_cast<std::size_t>(half(k0 + static_cast<long long>(i)) - c.k0)] += fixed[i];
    }
    return c;
}

int auto_guard_bits(const WeightedIFS& ifs) {
    for (const auto& m : ifs.maps) {
        if (!power_of_half(m.ratio)) return 6;
    }
    return 0;
}

DyadicMeasure discretize(const WeightedIFS& ifs, int n, const EmpiricalOptions& opt) {
    if (ifs.ambient_dim != 1) throw DomainError("discretization is one-dimensional only");
    if (n < 0 || n > 40) throw DomainError("scale must lie in [0, 40]");
    const int g = opt.guard_bits >= 0 ? opt.guard_bits : auto_guard_bits(ifs);
    const Hull1D hull = attractor_hull(ifs);

    Deposit dep;
    for (std::size_t i = 0; i < ifs.size(); ++i) {
        dep.a.push_back(ifs.maps[i].sign * ifs.maps[i].ratio);
        dep.t.push_back(ifs.maps[i].translation.at(0));
        dep.p.push_back(ifs.weights[i]);
    }
    dep.c = 0.5 * (hull.lo + hull.hi);
    dep.threshold = std::ldexp(1.0, -(n + g));
    dep.box_scale = std::ldexp(1.0, n);
    if (ifs.is_homogeneous_algebraic()) dep.depth_fixed = homogeneous_depth(ifs.algebraic->beta, n + g);
    dep.k0 = static_cast<long long>(std::floor(hull.lo * dep.box_scale)) - 1;
    const long long k1 = static_cast<long long>(std::floor(hull.hi * dep.box_scale)) + 1;
    dep.size = static_cast<std::size_t>(k1 - dep.k0 + 1);
    if (dep.size > (std::size_t{1} << 28)) throw BudgetError("too many boxes at scale " + std::to_string(n));
    dep.budget = opt.word_budget;

    DyadicMeasure out;
    out.n = n;
    out.guard_bits = g;
    out.k0 = dep.k0;
    out.fixed.assign(dep.size, 0);
    std::atomic<std::uint64_t> words{0};
    auto budget_error = [&] {
        return BudgetError("discretization at scale " + std::to_string(n) + " exceeds the word budget of " +
                           std::to_string(opt.word_budget));
    };

    if (dep.leaf(0, 1.0)) {
        // The empty word already lies below the threshold: the whole mass sits in one box.
        dep.deposit(dep.c, 1.0, out.fixed);
        out.words = 1;
        return out;
    }
    if (opt.exec == Exec::Serial) {
        if (!dep.expand(0, 1.0, 0.0, 1.0, out.fixed, words)) throw budget_error();
        out.words = words.load();
        return out;
    }

    // Breadth-first frontier, then independent subtrees with per-thread boxes.
    std::vector<Node> frontier{Node{0, 1.0, 0.0, 1.0, false}};
    const std::size_t target = 64 * static_cast<std::size_t>(std::max(1, omp_get_max_threads()));
    for (int round = 0; round < 32; ++round) {
        std::size_t open = 0;
        for (const auto& f : frontier) open += f.is_leaf ? 0 : 1;
        if (open == 0 || open >= target) break;
        std::vector<Node> next;
        for (const auto& f : frontier) {
            if (f.is_leaf) {
                next.push_back(f);
                continue;
            }
            for (std::size_t i = 0; i < dep.a.size(); ++i) {
                Node c{f.depth + 1, f.A * dep.a[i], f.A * dep.t[i] + f.B, f.P * dep.p[i], false};
                c.is_leaf = dep.leaf(c.depth, c.A);
                next.push_back(c);
            }
        }
        frontier = std::move(next);
    }
    std::atomic<bool> ok{true};
    const auto F = static_cast<std::int64_t>(frontier.size());
#pragma omp parallel
    {
        std::vector<__int128> local(dep.size, 0);
#pragma omp for schedule(dynamic, 1)
        for (std::int64_t k = 0; k < F; ++k) {
            if (!ok) continue;
            const Node& f = frontier[static_cast<std::size_t>(k)];
            if (f.is_leaf) {
                if (words.fetch_add(1, std::memory_order_relaxed) >= dep.budget) {
                    ok = false;
                    continue;
                }
                dep.deposit(f.A * dep.c + f.B, f.P, local);
            } else if (!dep.expand(f.depth, f.A, f.B, f.P, local, words)) {
                ok = false;
            }
        }
#pragma omp critical
        for (std::size_t i = 0; i < dep.size; ++i) out.fixed[i] += local[i];
    }
    if (!ok) throw budget_error();
    out.words = words.load();
    return out;
}

namespace {

double log_moment(const DyadicMeasure& m, double q) {
    if (q < 0) throw DomainError("empirical moments need q >= 0");
    long double s = 0;
    for (std::size_t i = 0; i < m.fixed.size(); ++i) {
        if (m.fixed[i] == 0) continue;
        s += q == 0 ? 1.0L : std::pow(static_cast<long double>(m.mass(i)), static_cast<long double>(q));
    }
    if (s <= 0) throw DomainError("empty measure");
    return static_cast<double>(std::log(s));
}

}  // namespace

double empirical_tau(const DyadicMeasure& m, double q) {
    if (m.n == 0) throw DomainError("scale 0 has no slope");
    return log_moment(m, q) / (-m.n * std::log(2.0));
}

double empirical_tau_two_scale(const DyadicMeasure& m1, const DyadicMeasure& m2, double q) {
    if (m1.n >= m2.n) throw DomainError("two-scale estimate needs n1 < n2");
    return (log_moment(m2, q) - log_moment(m1, q)) / ((m1.n - m2.n) * std::log(2.0));
}

std::vector<double> validation_q_grid() { return {0, 0.5, 1, 1.5, 2, 3, 5, 8}; }

std::vector<CoarseBin> coarse_spectrum(const DyadicMeasure& m, double alpha_lo, double alpha_hi, std::size_t bins) {
    if (bins == 0 || !(alpha_hi > alpha_lo)) throw DomainError("invalid alpha bins");
    if (m.n == 0) throw DomainError("scale 0 has no coarse spectrum");
    if (m.occupied() == 0) throw DomainError("empty measure");
    std::vector<CoarseBin> out(bins);
    const double w = (alpha_hi - alpha_lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b].alpha_lo = alpha_lo + w * static_cast<double>(b);
        out[b].alpha_hi = out[b].alpha_lo + w;
    }
    for (std::size_t i = 0; i < m.fixed.size(); ++i) {
        if (m.fixed[i] == 0) continue;
        const double alpha = -std::log2(m.mass(i)) / m.n;
        const double pos = (alpha - alpha_lo) / w;
        if (pos < 0 || pos >= static_cast<double>(bins)) continue;
        ++out[static_cast<std::size_t>(pos)].count;
    }
    for (auto& b : out) {
        b.f = b.count == 0 ? -std::numeric_limits<double>::infinity() : std::log2(static_cast<double>(b.count)) / m.n;
    }
    return out;
}

}  // namespace mfs
