#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "gen.hpp"
#include "mfs/empirical.hpp"
#include "mfs/errors.hpp"
#include "mfs/spectrum.hpp"
#include "systems.hpp"

using namespace mfs;

namespace {

WeightedIFS dyadic() { return make_rational_1d({Rational(1, 2), Rational(1, 2)}, {0, Rational(1, 2)}, uniform_weights(2)); }

WeightedIFS cantor(std::vector<Rational> p = uniform_weights(2)) {
    return make_rational_1d({Rational(1, 3), Rational(1, 3)}, {0, Rational(2, 3)}, std::move(p));
}

WeightedIFS random_system(gen::Rng& rng) {
    const auto l = static_cast<std::size_t>(rng.integer(1, 3));
    std::vector<double> r, t;
    for (std::size_t i = 0; i < l; ++i) {
        r.push_back(rng.real(0.2, 0.5));
        t.push_back(rng.real(-1, 1));
    }
    auto ifs = make_numeric(r, t, rng.probability(l));
    for (std::size_t i = 0; i < l; ++i)
        if (rng.coin()) ifs.maps[i].sign = -1;
    return ifs;
}

}  // namespace

TEST(Discretize, Examples) {
    auto d = discretize(dyadic(), 3);
    EXPECT_EQ(d.guard_bits, 0);
    auto b = d.boxes();
    ASSERT_EQ(b.size(), 8u);
    for (std::size_t k = 0; k < 8; ++k) {
        EXPECT_EQ(b[k].first, static_cast<long long>(k));
        EXPECT_EQ(b[k].second, 0.125);
    }

    EmpiricalOptions opt;
    opt.guard_bits = 0;
    auto c = discretize(cantor(), 2, opt);
    // W_2 for ratio 1/3 is the four words of length 2; their hull midpoints
    // 1/18, 5/18, 13/18, 17/18 fall in boxes 0, 1, 2, 3.
    auto cb = c.boxes();
    ASSERT_EQ(cb.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_EQ(cb[k].first, static_cast<long long>(k));
        EXPECT_EQ(cb[k].second, 0.25);
    }

    auto one = discretize(make_rational_1d({Rational(1, 2)}, {Rational(1, 3)}, uniform_weights(1)), 10);
    ASSERT_EQ(one.occupied(), 1u);
    EXPECT_EQ(one.total(), 1.0);
    EXPECT_EQ(one.boxes()[0].first, static_cast<long long>(std::floor(2.0 / 3 * 1024)));
}

TEST(Discretize, Errors) {
    EXPECT_THROW(discretize(make_numeric({0.5, 0.5}, {0, 0, 0.5, 0.5}, {0.5, 0.5}, 2), 4), DomainError);
    EmpiricalOptions opt;
    opt.word_budget = 100;
    EXPECT_THROW(discretize(dyadic(), 10, opt), BudgetError);
    auto d = discretize(dyadic(), 4);
    EXPECT_THROW(empirical_tau(d, -1), DomainError);
    EXPECT_THROW(empirical_tau_two_scale(d, d, 2), DomainError);
}

TEST(DiscretizeProperty, MassConservedAndSupportBounded) {
    gen::Rng rng(51);
    for (int it = 0; it < 40; ++it) {
        auto ifs = random_system(rng);
        const int n = static_cast<int>(rng.integer(0, 10));
        auto m = discretize(ifs, n);
        EXPECT_NEAR(m.total(), 1.0, 1e-12);
        const auto h = attractor_hull(ifs);
        const auto b = m.boxes();
        ASSERT_FALSE(b.empty());
        const double span = static_cast<double>(b.back().first - b.front().first + 1);
        EXPECT_LE(span, h.diam() * std::ldexp(1.0, n) + 2);
    }
}

TEST(DiscretizeProperty, SerialEqualsParallelExactly) {
    gen::Rng rng(52);
    for (int it = 0; it < 20; ++it) {
        auto ifs = random_system(rng);
        const int n = static_cast<int>(rng.integer(2, 12));
        EmpiricalOptions s, p;
        s.exec = Exec::Serial;
        p.exec = Exec::Parallel;
        auto a = discretize(ifs, n, s);
        auto b = discretize(ifs, n, p);
        EXPECT_EQ(a.k0, b.k0);
        EXPECT_TRUE(a.fixed == b.fixed);
        EXPECT_EQ(a.words, b.words);
    }
    for (const auto& ifs : {sys::golden(), sys::digit()}) {
        EmpiricalOptions s, p;
        s.exec = Exec::Serial;
        auto a = discretize(ifs, 8, s);
        auto b = discretize(ifs, 8, p);
        EXPECT_TRUE(a.fixed == b.fixed);
    }
}

TEST(DiscretizeProperty, CoarseningConsistency) {
    // Dyadic geometry: exact agreement.
    for (int n = 1; n <= 12; ++n) {
        auto c = discretize(dyadic(), n).coarsen();
        auto m = discretize(dyadic(), n - 1);
        EXPECT_EQ(c.boxes(), m.boxes());
    }
    // General systems: differences only from boundary reassignment.
    gen::Rng rng(53);
    for (int it = 0; it < 30; ++it) {
        auto ifs = random_system(rng);
        const int n = static_cast<int>(rng.integer(2, 10));
        auto fine = discretize(ifs, n).coarsen();
        auto coarse = discretize(ifs, n - 1);
        // Heaviest word of the coarse section: shortest word times the largest weight.
        double rmax = 0, maxp = 0;
        for (const auto& mp : ifs.maps) rmax = std::max(rmax, mp.ratio);
        for (double p : ifs.weights) maxp = std::max(maxp, p);
        const int g = coarse.guard_bits;
        const int shortest = std::max(1, static_cast<int>(std::ceil((n - 1 + g) * std::log(2.0) / -std::log(rmax) - 1e-12)));
        const double max_word = std::pow(maxp, shortest);
        std::map<long long, double> diff;
        for (auto [k, v] : fine.boxes()) diff[k] += v;
        for (auto [k, v] : coarse.boxes()) diff[k] -= v;
        double l1 = 0;
        std::size_t boundary = 0;
        for (auto [k, v] : diff) {
            if (std::fabs(v) > 1e-15) {
                l1 += std::fabs(v);
                ++boundary;
            }
        }
        EXPECT_NEAR(fine.total(), coarse.total(), 1e-12);
        EXPECT_LE(l1, 2.0 * static_cast<double>(boundary) * max_word + 1e-12) << "n = " << n << " boundary " << boundary;
    }
}

TEST(EmpiricalTau, DyadicExact) {
    auto m14 = discretize(dyadic(), 14), m16 = discretize(dyadic(), 16);
    for (double q : validation_q_grid()) {
        EXPECT_NEAR(empirical_tau(m14, q), q - 1, 1e-12);
        EXPECT_NEAR(empirical_tau_two_scale(m14, m16, q), q - 1, 1e-12);
    }
}

TEST(EmpiricalTau, CantorTwoScale) {
    auto ifs = cantor();
    auto m1 = discretize(ifs, 14), m2 = discretize(ifs, 16);
    EXPECT_NEAR(empirical_tau_two_scale(m1, m2, 2), std::log(2.0) / std::log(3.0), 0.03);
    EXPECT_NEAR(empirical_tau_two_scale(m1, m2, 1), 0, 1e-12);
}

TEST(EmpiricalTau, WeightedDyadicMatchesT) {
    // p = (3/4, 1/4) on [0,1/2] and [1/2,1]: boxes are exact cylinders, tau = T.
    auto ifs = make_rational_1d({Rational(1, 2), Rational(1, 2)}, {0, Rational(1, 2)}, {Rational(3, 4), Rational(1, 4)});
    auto m1 = discretize(ifs, 12), m2 = discretize(ifs, 14);
    for (double q : validation_q_grid()) {
        const double T = solve_T(ifs, q);
        EXPECT_NEAR(empirical_tau(m1, q), T, 1e-12);
        EXPECT_NEAR(empirical_tau_two_scale(m1, m2, q), T, 1e-12);
    }
}

TEST(EmpiricalTauProperty, ConcaveInQ) {
    gen::Rng rng(54);
    std::vector<double> q;
    for (int k = 0; k <= 40; ++k) q.push_back(k * 0.2);
    for (int it = 0; it < 20; ++it) {
        auto m = discretize(random_system(rng), static_cast<int>(rng.integer(3, 10)));
        std::vector<double> t;
        for (double x : q) t.push_back(empirical_tau(m, x));
        EXPECT_LE(concavity_defect(q, t), 1e-9);
        for (std::size_t k = 1; k < t.size(); ++k) EXPECT_GE(t[k], t[k - 1] - 1e-12);
    }
}

TEST(CoarseSpectrum, Examples) {
    auto d = coarse_spectrum(discretize(dyadic(), 12), 0, 3, 10);
    std::size_t occupied = 0;
    for (const auto& b : d) {
        if (b.count == 0) continue;
        ++occupied;
        EXPECT_LE(b.alpha_lo, 1.0);
        EXPECT_GT(b.alpha_hi, 1.0);
        EXPECT_NEAR(b.f, 1.0, 1e-12);
    }
    EXPECT_EQ(occupied, 1u);

    const double s = std::log(2.0) / std::log(3.0);
    auto apex = [](const std::vector<CoarseBin>& bins) {
        return *std::max_element(bins.begin(), bins.end(), [](const CoarseBin& a, const CoarseBin& b) { return a.f < b.f; });
    };
    // Uniform Cantor: the apex bin holds alpha = log 2/log 3; boxes straddling
    // piece boundaries inflate the count by about a factor 2 (1/16 in f).
    auto u = apex(coarse_spectrum(discretize(cantor(), 16), 0, 3, 10));
    EXPECT_LE(u.alpha_lo, s);
    EXPECT_GT(u.alpha_hi, s);
    EXPECT_NEAR(u.f, s, 0.07);

    auto w = apex(coarse_spectrum(discretize(cantor({Rational(4, 5), Rational(1, 5)}), 16), 0, 3, 10));
    EXPECT_NEAR(w.f, s, 0.05);

    EXPECT_THROW(coarse_spectrum(discretize(dyadic(), 4), 1, 0, 10), DomainError);
}
