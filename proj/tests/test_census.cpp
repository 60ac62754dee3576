#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>

#include "gen.hpp"
#include "mfs/census.hpp"
#include "mfs/errors.hpp"
#include "systems.hpp"

using namespace mfs;

namespace {

// All l^n words of length n, letters 0-based.
std::vector<std::vector<int>> all_words(int l, int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> w(static_cast<std::size_t>(n), 0);
    for (;;) {
        out.push_back(w);
        int p = n - 1;
        while (p >= 0 && w[static_cast<std::size_t>(p)] == l - 1) w[static_cast<std::size_t>(p--)] = 0;
        if (p < 0) return out;
        ++w[static_cast<std::size_t>(p)];
    }
}

// Integer-lattice oracle: S_u = sum a_{u_p} x^{n-p} in Z[x]/(f) by Horner with
// integer digit coefficient vectors. Returns class -> number of words.
std::map<std::vector<long long>, long long> lattice_classes(const std::vector<long long>& monic_f,
                                                            const std::vector<std::vector<long long>>& digits, int n) {
    const std::size_t d = monic_f.size() - 1;
    std::map<std::vector<long long>, long long> out;
    for (const auto& w : all_words(static_cast<int>(digits.size()), n)) {
        std::vector<long long> s(d, 0);
        for (int letter : w) {
            // s <- s * x mod f, then + digit
            const long long top = s[d - 1];
            for (std::size_t k = d - 1; k > 0; --k) s[k] = s[k - 1] - top * monic_f[k];
            s[0] = -top * monic_f[0];
            for (std::size_t k = 0; k < d; ++k) s[k] += digits[static_cast<std::size_t>(letter)][k];
        }
        ++out[s];
    }
    return out;
}

std::multiset<long long> class_sizes(const OverlapCensus& c, int n) {
    std::multiset<long long> s;
    for (const auto& k : c.level(n).classes) s.insert(k.words.get_si());
    return s;
}

template <class M>
std::multiset<long long> oracle_sizes(const M& m) {
    std::multiset<long long> s;
    for (const auto& [k, v] : m) s.insert(v);
    return s;
}

std::vector<TnResult> beta_tn(const OverlapCensus& c, const Hull1D& h) {
    std::vector<TnResult> t;
    for (int n = 1; n <= c.depth(); ++n) t.push_back(t_n_homogeneous(c, h, n, TnVariant::SigmaBeta));
    return t;
}

WeightedIFS random_homogeneous(gen::Rng& rng) {
    const auto l = static_cast<std::size_t>(rng.integer(2, 4));
    std::vector<std::vector<Rational>> t;
    const int kind = static_cast<int>(rng.integer(0, 2));
    for (std::size_t i = 0; i < l; ++i) {
        if (kind == 2) t.push_back({rng.integer(-2, 2), rng.integer(-2, 2)});
        else t.push_back({Rational(Integer(rng.integer(0, 6)), Integer(rng.integer(1, 3)))});
    }
    WeightedIFS ifs = kind == 0   ? sys::homogeneous({-2, 1}, {2}, t)
                      : kind == 1 ? sys::homogeneous({3, 1}, {-3}, t)
                                  : sys::homogeneous({-1, -1, 1}, {0, 1}, t);
    std::vector<Rational> p;
    Rational total = 0;
    for (std::size_t i = 0; i < l; ++i) {
        p.emplace_back(Integer(rng.integer(1, 5)));
        total += p.back();
    }
    for (auto& x : p) x /= total;
    ifs.weights_exact = p;
    for (std::size_t i = 0; i < l; ++i) ifs.weights[i] = p[i].get_d();
    return ifs;
}

}  // namespace

TEST(Census, DigitSystemClosedForm) {
    auto c = OverlapCensus::run(sys::digit(), 12);
    for (int n = 1; n <= 12; ++n) EXPECT_EQ(c.N(n), (std::size_t{1} << (n + 1)) - 1) << n;
    // Oracle: 2 S_u = sum c_p 2^{n-p} with c in {0, 1, 2}.
    for (int n = 1; n <= 8; ++n) {
        auto o = lattice_classes({-2, 1}, {{0}, {1}, {2}}, n);
        EXPECT_EQ(o.size(), c.N(n));
        EXPECT_EQ(oracle_sizes(o), class_sizes(c, n));
    }
}

TEST(Census, NoOverlapBinary) {
    auto c = OverlapCensus::run(sys::beta2({0, 1}), 10);
    for (int n = 1; n <= 10; ++n) EXPECT_EQ(c.N(n), std::size_t{1} << n);
    auto e = esc_diagnostic(c);
    EXPECT_FALSE(e.first_overlap);
    for (const auto& r : e.rows) {
        EXPECT_DOUBLE_EQ(r.delta, std::ldexp(1.0, -(r.n - 1)));
        EXPECT_DOUBLE_EQ(r.delta_tilde, std::ldexp(1.0, -(r.n - 1)));
    }
    for (int n = 1; n <= 10; ++n) {
        for (double q : {0.0, 0.5, 2.0, 5.0}) EXPECT_NEAR(T_n(c, n, q), q - 1, 1e-12);
    }
    auto g = growth_exponent(c);
    for (double v : g.per_n) EXPECT_NEAR(v, 1, 1e-12);
    for (const auto& r : garsia_dimension(c)) EXPECT_NEAR(r.estimate, 1, 1e-12);
}

TEST(Census, GoldenOverlap) {
    auto ifs = sys::golden();
    auto c = OverlapCensus::run(ifs, 14);
    EXPECT_EQ(c.N(1), 2u);
    EXPECT_EQ(c.N(2), 4u);
    EXPECT_EQ(c.N(3), 7u);
    EXPECT_EQ(word_scaled_translation(ifs, {1, 0, 0}), word_scaled_translation(ifs, {0, 1, 1}));
    auto e = esc_diagnostic(c);
    ASSERT_TRUE(e.first_overlap);
    EXPECT_EQ(*e.first_overlap, 3);
    EXPECT_EQ(e.rows[2].delta, 0.0);
    EXPECT_GT(e.rows[2].delta_tilde, 0.0);
    // Oracle: lambda^2 = lambda + 1 over Z^2.
    for (int n = 1; n <= 14; ++n) {
        auto o = lattice_classes({-1, -1, 1}, {{0, 0}, {1, 0}}, n);
        EXPECT_EQ(o.size(), c.N(n)) << n;
        EXPECT_EQ(oracle_sizes(o), class_sizes(c, n));
    }
    // Garsia entropy at depth 3: six singletons and one class of two words.
    const double h3 = -(6 * (1.0 / 8) * std::log(1.0 / 8) + (2.0 / 8) * std::log(2.0 / 8));
    const auto gr = garsia_dimension(c);
    EXPECT_NEAR(gr[2].h, h3, 1e-12);
    EXPECT_NEAR(gr[2].estimate, std::min(1.0, h3 / (3 * std::log((1 + std::sqrt(5.0)) / 2))), 1e-12);
    // Growth bounded by log 2 / log golden.
    const auto g = growth_exponent(c);
    EXPECT_GT(g.estimate, 0);
    EXPECT_LE(g.upper_bound, std::log(2.0) / std::log((1 + std::sqrt(5.0)) / 2));
}

TEST(Census, SalemMatchesLatticeOracle) {
    auto c = OverlapCensus::run(sys::salem(), 12);
    for (int n = 1; n <= 12; ++n) {
        auto o = lattice_classes({1, -1, -1, -1, 1}, {{0, 0, 0, 0}, {1, 0, 0, 0}}, n);
        EXPECT_EQ(o.size(), c.N(n)) << n;
        EXPECT_EQ(oracle_sizes(o), class_sizes(c, n));
    }
}

TEST(CensusProperty, IncrementalEqualsWordByWord) {
    gen::Rng rng(31);
    for (int it = 0; it < 25; ++it) {
        auto ifs = random_homogeneous(rng);
        const int nmax = ifs.size() == 2 ? 8 : ifs.size() == 3 ? 6 : 5;
        auto c = OverlapCensus::run(ifs, nmax);
        for (int n = 1; n <= nmax; ++n) {
            std::map<std::string, std::size_t> index;
            for (std::size_t k = 0; k < c.N(n); ++k) index[c.scaled_translation(n, k).canonical_key()] = k;
            ASSERT_EQ(index.size(), c.N(n));
            std::vector<Integer> words(c.N(n), 0);
            std::vector<Rational> mass(c.N(n), 0);
            std::vector<std::vector<int>> first(c.N(n));
            for (const auto& w : all_words(static_cast<int>(ifs.size()), n)) {
                auto it2 = index.find(word_scaled_translation(ifs, w).canonical_key());
                ASSERT_NE(it2, index.end());
                const auto k = it2->second;
                words[k] += 1;
                Rational p = 1;
                for (int a : w) p *= (*ifs.weights_exact)[static_cast<std::size_t>(a)];
                mass[k] += p;
                if (first[k].empty()) first[k] = w;  // words come in lexicographic order
            }
            for (std::size_t k = 0; k < c.N(n); ++k) {
                const auto& cls = c.level(n).classes[k];
                EXPECT_EQ(cls.words, words[k]);
                EXPECT_EQ(cls.mass, mass[k]);
                EXPECT_EQ(std::vector<int>(cls.rep.begin(), cls.rep.end()), first[k]);
            }
        }
    }
}

TEST(CensusProperty, Invariants) {
    gen::Rng rng(32);
    for (int it = 0; it < 25; ++it) {
        auto ifs = random_homogeneous(rng);
        auto c = OverlapCensus::run(ifs, 7);
        const auto hull = attractor_hull(ifs);
        auto t = beta_tn(c, hull);
        auto inv = check_census(c, t, hull);
        EXPECT_TRUE(inv.failures.empty()) << (inv.failures.empty() ? "" : inv.failures[0]);
        Rational pmin = *std::min_element(ifs.weights_exact->begin(), ifs.weights_exact->end());
        for (int n = 1; n <= c.depth(); ++n) {
            Rational s = 0;
            Rational lo = 1;
            for (int k = 0; k < n; ++k) lo *= pmin;
            for (const auto& k : c.level(n).classes) {
                s += k.mass;
                EXPECT_GE(k.mass, lo);
                EXPECT_LE(k.mass, 1);
            }
            EXPECT_EQ(s, 1);
            EXPECT_NEAR(T_n(c, n, 1.0), 0, 1e-12);
            if (n > 1) EXPECT_GE(t[n - 1].t, t[n - 2].t);
            for (int m = 1; n + m <= c.depth(); ++m) EXPECT_LE(c.N(n + m), c.N(n) * c.N(m));
            const double bn = std::exp(n * c.log_abs_beta());
            EXPECT_GE(static_cast<double>(t[n - 1].t), c.N(n) / (bn * hull.diam() + 1) - 1e-9);
        }
    }
}

TEST(CensusProperty, SerialEqualsParallel) {
    for (const auto& ifs : {sys::golden(), sys::salem(), sys::digit()}) {
        CensusOptions s{50'000'000, Exec::Serial}, p{50'000'000, Exec::Parallel};
        auto a = OverlapCensus::run(ifs, 11, s);
        auto b = OverlapCensus::run(ifs, 11, p);
        ASSERT_EQ(a.depth(), b.depth());
        for (int n = 1; n <= a.depth(); ++n) {
            const auto& x = a.level(n);
            const auto& y = b.level(n);
            ASSERT_EQ(x.size(), y.size());
            EXPECT_EQ(x.denom, y.denom);
            for (std::size_t k = 0; k < x.size(); ++k) {
                EXPECT_EQ(x.classes[k].key, y.classes[k].key);
                EXPECT_EQ(x.classes[k].mass, y.classes[k].mass);
                EXPECT_EQ(x.classes[k].words, y.classes[k].words);
                EXPECT_EQ(x.classes[k].rep, y.classes[k].rep);
                EXPECT_EQ(x.classes[k].emb, y.classes[k].emb);
            }
        }
    }
}

TEST(Census, SnapshotRoundTrip) {
    const auto path = (std::filesystem::temp_directory_path() / "mfs_census_snapshot.bin").string();
    auto ifs = sys::golden();
    auto full = OverlapCensus::run(ifs, 12);
    auto part = OverlapCensus::run(ifs, 7);
    part.save(path);
    auto loaded = OverlapCensus::load(path, ifs);
    ASSERT_EQ(loaded.depth(), 7);
    loaded.extend(12);
    ASSERT_EQ(loaded.depth(), 12);
    for (int n = 1; n <= 12; ++n) {
        ASSERT_EQ(loaded.N(n), full.N(n));
        for (std::size_t k = 0; k < full.N(n); ++k) {
            EXPECT_EQ(loaded.level(n).classes[k].key, full.level(n).classes[k].key);
            EXPECT_EQ(loaded.level(n).classes[k].mass, full.level(n).classes[k].mass);
        }
    }
    // A snapshot of another system is rejected.
    EXPECT_THROW(OverlapCensus::load(path, sys::salem()), ParseError);
    std::remove(path.c_str());
}

TEST(Census, Budget) {
    CensusOptions opt;
    opt.class_budget = 100;
    auto c = OverlapCensus::run(sys::digit(), 12, opt);
    EXPECT_TRUE(c.partial());
    EXPECT_LT(c.depth(), 12);
    EXPECT_LE(c.N(c.depth()), 100u);
}

TEST(Census, GrowthAndDimension) {
    auto c = OverlapCensus::run(sys::digit(), 12);
    auto g = growth_exponent(c);
    for (int n = 1; n <= 12; ++n)
        EXPECT_NEAR(g.per_n[n - 1], std::log(std::ldexp(1.0, n + 1) - 1) / (n * std::log(2.0)), 1e-12);
    EXPECT_NEAR(g.upper_bound, 1.0833186565846, 1e-9);
    EXPECT_NEAR(dim_K_estimate(c).estimate, 1, 1e-12);

    auto t = OverlapCensus::run(sys::beta3({0, 1}), 8);
    EXPECT_NEAR(dim_K_estimate(t).estimate, std::log(2.0) / std::log(3.0), 1e-12);
    EXPECT_NEAR(dim_K_estimate(OverlapCensus::run(sys::beta2({0, 1}), 8)).estimate, 1, 1e-12);

    // T_1 for the digit system: three singleton classes.
    for (double q : {0.0, 0.5, 2.0}) EXPECT_NEAR(T_n(c, 1, q), (q - 1) * std::log(3.0) / std::log(2.0), 1e-12);
    EXPECT_NEAR(garsia_dimension(c)[0].estimate, 1, 1e-12);
}

TEST(Census, DigitDepthTwoMasses) {
    auto c = OverlapCensus::run(sys::digit(), 2);
    std::multiset<Rational> m;
    for (const auto& k : c.level(2).classes) m.insert(k.mass);
    // 2 S in {0..6}: counts of c1*2 + c2 with c in {0,1,2}: 1,1,2,1,2,1,1
    EXPECT_EQ(m, (std::multiset<Rational>{Rational(1, 9), Rational(1, 9), Rational(1, 9), Rational(1, 9),
                                          Rational(1, 9), Rational(2, 9), Rational(2, 9)}));
}

TEST(Tn, OscSystemBounded) {
    auto ifs = sys::beta2({0, Rational(1, 2)});
    auto c = OverlapCensus::run(ifs, 14);
    const auto hull = attractor_hull(ifs);
    for (int n = 1; n <= 14; ++n) EXPECT_LE(t_n_homogeneous(c, hull, n, TnVariant::SigmaBeta).t, 4);
}

TEST(Tn, GoldenPlateauAndDigitGrowth) {
    auto g = sys::golden();
    auto c = OverlapCensus::run(g, 14);
    const auto hull = attractor_hull(g);
    std::vector<long long> t;
    for (int n = 1; n <= 14; ++n) t.push_back(t_n_homogeneous(c, hull, n, TnVariant::SigmaBeta).t);
    EXPECT_EQ(t[13], t[9]);

    auto d = sys::digit();
    auto cd = OverlapCensus::run(d, 12);
    const auto hd = attractor_hull(d);
    // Consecutive scaled translations are 2^-n apart, so (1/n) log t_n -> (s - 1) log 2 = 0.
    std::vector<long long> td;
    for (int n = 1; n <= 12; ++n) td.push_back(t_n_homogeneous(cd, hd, n, TnVariant::SigmaBeta).t);
    EXPECT_EQ(td[11], td[5]);
    EXPECT_LT(std::log(double(td[11])) / 12, 0.15);
}

TEST(TnProperty, RefinementNeverIncreases) {
    gen::Rng rng(33);
    for (int it = 0; it < 15; ++it) {
        auto ifs = random_homogeneous(rng);
        auto c = OverlapCensus::run(ifs, 7);
        const auto hull = attractor_hull(ifs);
        for (int n = 1; n <= 7; ++n) {
            for (auto v : {TnVariant::SigmaBeta, TnVariant::WnDyadic}) {
                auto base = t_n_homogeneous(c, hull, n, v, 0);
                if (!base.available) continue;
                for (int r = 1; r <= 3; ++r) EXPECT_LE(t_n_homogeneous(c, hull, n, v, r).t, base.t);
            }
        }
    }
}

TEST(TnProperty, SectionMatchesBruteForce) {
    gen::Rng rng(34);
    for (int it = 0; it < 30; ++it) {
        const auto l = static_cast<std::size_t>(rng.integer(2, 3));
        std::vector<Rational> r, a;
        for (std::size_t i = 0; i < l; ++i) {
            r.push_back(Rational(1, rng.integer(2, 4)));
            a.push_back(rng.rational(4));
        }
        auto ifs = make_rational_1d(r, a, uniform_weights(l));
        const auto hull = attractor_hull(ifs);
        const int n = static_cast<int>(rng.integer(1, 6));
        // Distinct maps of W_n as (ratio, translation); intervals inflated by 2^-n.
        auto w = build_section(ifs, n);
        std::set<std::pair<Rational, Rational>> maps;
        for (std::size_t k = 0; k < w.size(); ++k) {
            Rational ru = 1, tu = 0;
            for (int letter : w.word(k)) {
                tu += ru * a[static_cast<std::size_t>(letter)];
                ru *= r[static_cast<std::size_t>(letter)];
            }
            maps.insert({ru, tu});
        }
        const Rational rho(1, Integer(1) << n);
        std::vector<std::pair<Rational, Rational>> iv;
        for (const auto& [ru, tu] : maps) iv.push_back({tu + ru * *hull.lo_q - rho, tu + ru * *hull.hi_q + rho});
        long long brute = 0;
        for (const auto& p : iv) {
            long long cnt = 0;
            for (const auto& q : iv) cnt += (q.first <= p.first && p.first <= q.second) ? 1 : 0;
            brute = std::max(brute, cnt);
        }
        EXPECT_EQ(t_n_section(ifs, hull, n).t, brute);
    }
}

TEST(RationalBound, Examples) {
    auto thirds = make_rational_1d({Rational(1, 2), Rational(1, 2), Rational(1, 2)}, {0, Rational(1, 3), Rational(2, 3)},
                                   uniform_weights(3));
    auto rb = rational_bound_check(thirds, 12);
    EXPECT_EQ(rb.Q, 3);
    EXPECT_EQ(rb.r, 5);
    EXPECT_EQ(rb.diam, Rational(4, 3));
    EXPECT_TRUE(rb.ok);
    ASSERT_EQ(rb.rows.size(), 13u);
    for (const auto& row : rb.rows) {
        EXPECT_EQ(row.n, &row - rb.rows.data());
        EXPECT_EQ(row.bound, 18 * (row.n + 1) * (row.n + 1) * (row.n + 1));
        EXPECT_LT(Integer(static_cast<long>(row.t)), row.bound);
    }
    auto pair = make_rational_1d({Rational(1, 2), Rational(1, 2)}, {0, 1}, uniform_weights(2));
    auto rp = rational_bound_check(pair, 10);
    EXPECT_EQ(rp.Q, 1);
    EXPECT_TRUE(rp.ok);
    auto one = make_rational_1d({Rational(1, 3)}, {0}, uniform_weights(1));
    auto r1 = rational_bound_check(one, 6);
    for (const auto& row : r1.rows) EXPECT_EQ(row.t, 1);
}
