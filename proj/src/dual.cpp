#include "mfs/dual.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include "mfs/errors.hpp"

namespace mfs {

double DualSystem::claim_bound(int n) const {
    const double e = static_cast<double>(m_prime) / m - 1.0;
    return C * std::pow(static_cast<double>(std::max(n, 1)), -e);
}

double DualSystem::kappa_envelope(int n) const {
    return std::pow((4.0 + 4.0 * diam_bound) / C, 2.0 * m) *
           std::pow(static_cast<double>(std::max(n, 1)), 2.0 * (m_prime - m));
}

namespace {

// Number of conjugates of beta on the unit circle, from its characteristic
// polynomial. Empty when the polynomial is not squarefree.
std::optional<int> structural_unit_count(const AlgebraicNumber& beta) {
    const QPoly p = beta.characteristic_polynomial();
    if (!is_squarefree(p)) return std::nullopt;
    if (p.degree() < 2 || !is_self_reciprocal(p)) return 0;
    const QPoly r = reciprocal_trace_polynomial(p);
    return 2 * count_real_roots(r, Rational(-2), Rational(2));
}

}  // namespace

DualSystem build_dual(const WeightedIFS& ifs, double unit_tol) {
    if (!ifs.is_homogeneous_algebraic()) throw DomainError("dual system needs a homogeneous algebraic system");
    const AlgebraicNumber& beta = ifs.algebraic->beta;
    const FieldPtr& field = beta.field();
    if (!beta.is_algebraic_integer()) throw DomainError("beta must be an algebraic integer");

    DualSystem D;
    D.d = field->degree();
    D.M = field->denominator_bound();
    const auto bconj = beta.embed_all();
    if (std::abs(bconj[0]) <= 1.0 + unit_tol) throw DomainError("|beta| must exceed 1");

    std::vector<double> mag(bconj.size());
    for (std::size_t j = 0; j < bconj.size(); ++j) mag[j] = std::abs(bconj[j]);
    // 0 expanding, 1 unit band, 2 contracting
    std::vector<int> cls(bconj.size());
    int band = 0;
    for (std::size_t j = 0; j < mag.size(); ++j) {
        cls[j] = mag[j] > 1 + unit_tol ? 0 : (mag[j] >= 1 - unit_tol ? 1 : 2);
        if (cls[j] == 1) ++band;
    }
    D.unit_circle_structural = structural_unit_count(beta);
    if (band > 0 && !(D.unit_circle_structural && *D.unit_circle_structural > 0)) {
        D.warnings.push_back("conjugate within unit-circle tolerance but the minimal polynomial is not "
                             "reciprocal-symmetric; classification may be wrong");
    }
    if (D.unit_circle_structural && *D.unit_circle_structural != band) {
        D.warnings.push_back("numeric unit-circle count " + std::to_string(band) + " replaced by structural count " +
                             std::to_string(*D.unit_circle_structural));
        std::vector<std::size_t> idx(mag.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin() + 1, idx.end(), [&](std::size_t a, std::size_t b) {
            return std::fabs(std::log(mag[a])) < std::fabs(std::log(mag[b]));
        });
        for (std::size_t k = 1; k < idx.size(); ++k) {
            const std::size_t j = idx[k];
            cls[j] = static_cast<int>(k) <= *D.unit_circle_structural ? 1 : (mag[j] > 1 ? 0 : 2);
        }
    }
    for (int c = 0; c < 3; ++c) {
        for (std::size_t j = 0; j < cls.size(); ++j) {
            if (cls[j] == c) D.order.push_back(static_cast<int>(j));
        }
    }
    D.m = static_cast<int>(std::count(cls.begin(), cls.end(), 0));
    D.m_prime = D.m + static_cast<int>(std::count(cls.begin(), cls.end(), 1));

    for (int j : D.order) D.beta.push_back(bconj[static_cast<std::size_t>(j)]);
    const AlgebraicNumber Mq = AlgebraicNumber::from_rational(field, Rational(D.M));
    for (const auto& map : ifs.maps) {
        const AlgebraicNumber& a = (*map.translation_exact)[0];
        if (!(a * Mq).is_algebraic_integer()) throw DomainError("denominator bound M does not clear a translation");
        const auto ac = a.embed_all();
        std::vector<std::complex<double>> row;
        for (int j : D.order) row.push_back(ac[static_cast<std::size_t>(j)]);
        D.a.push_back(std::move(row));
    }

    double amax = 0;
    for (const auto& row : D.a) {
        for (int j = D.m; j < D.d; ++j) amax = std::max(amax, 2 * std::abs(row[static_cast<std::size_t>(j)]));
    }
    D.a_max_tail = amax;
    double Dc = 1;
    if (D.d > D.m) {
        if (amax == 0) throw DomainError("all translations vanish at the non-expanding conjugates");
        Dc = std::pow(amax, D.d - D.m);
    }
    for (int j = D.m_prime; j < D.d; ++j) {
        const double b = std::abs(D.beta[static_cast<std::size_t>(j)]);
        Dc *= b / (1 - b);
    }
    D.D = Dc;
    D.C = std::pow(Dc * std::pow(D.M.get_d(), D.d), -1.0 / D.m);

    double norm_a = 0, bmax = 0;
    for (int j = 0; j < D.m; ++j) norm_a = std::max(norm_a, 1 / std::abs(D.beta[static_cast<std::size_t>(j)]));
    for (const auto& row : D.a) {
        double s = 0;
        for (int j = 0; j < D.m; ++j) s += std::norm(row[static_cast<std::size_t>(j)]);
        bmax = std::max(bmax, std::sqrt(s));
    }
    D.diam_bound = 2 * bmax / (1 - norm_a);
    return D;
}

std::vector<std::complex<double>> rescaled_points(const DualSystem& dual, const OverlapCensus& c, int n,
                                                  bool all_conjugates) {
    if (n < 1 || n > c.depth()) throw DomainError("depth " + std::to_string(n) + " not in census");
    const auto& lv = c.level(n);
    const int dim = all_conjugates ? dual.d : dual.m;
    std::vector<std::complex<double>> out;
    out.reserve(lv.size() * static_cast<std::size_t>(dim));
    for (const auto& k : lv.classes) {
        for (int j = 0; j < dim; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            out.push_back(dual.beta[jj] * k.emb[static_cast<std::size_t>(dual.order[jj])]);
        }
    }
    return out;
}

namespace {

std::vector<std::complex<double>> horner_t(const DualSystem& dual, const std::vector<int>& word) {
    std::vector<std::complex<double>> t(static_cast<std::size_t>(dual.d));
    for (std::size_t j = 0; j < t.size(); ++j) {
        std::complex<double> acc = 0;
        for (int i : word) acc = acc * dual.beta[j] + dual.a[static_cast<std::size_t>(i)][j];
        t[j] = acc * dual.beta[j];
    }
    return t;
}

std::vector<int> word_from_index(std::uint64_t idx, int n, int l) {
    std::vector<int> w(static_cast<std::size_t>(n));
    for (int p = n - 1; p >= 0; --p) {
        w[static_cast<std::size_t>(p)] = static_cast<int>(idx % static_cast<std::uint64_t>(l));
        idx /= static_cast<std::uint64_t>(l);
    }
    return w;
}

}  // namespace

PropertyPReport verify_property_P(const DualSystem& dual, const OverlapCensus& c, int n, std::size_t word_limit,
                                  std::size_t sample_pairs, std::uint64_t seed) {
    PropertyPReport rep;
    rep.n = n;
    const int l = static_cast<int>(c.ifs().size());
    const double total = std::pow(static_cast<double>(l), n);
    rep.exhaustive = total <= static_cast<double>(word_limit);

    std::vector<std::vector<int>> words;
    std::mt19937_64 rng(seed);
    if (rep.exhaustive) {
        const auto W = static_cast<std::uint64_t>(std::llround(total));
        for (std::uint64_t w = 0; w < W; ++w) words.push_back(word_from_index(w, n, l));
    } else {
        std::uniform_int_distribution<int> letter(0, l - 1);
        const std::size_t W = std::clamp<std::size_t>(2 * sample_pairs, 2, std::size_t{1} << 20);
        for (std::size_t w = 0; w < W; ++w) {
            std::vector<int> wd(static_cast<std::size_t>(n));
            for (auto& x : wd) x = letter(rng);
            words.push_back(std::move(wd));
        }
    }
    rep.words = words.size();

    std::vector<std::string> key(words.size());
    std::vector<std::vector<std::complex<double>>> t(words.size());
    for (std::size_t w = 0; w < words.size(); ++w) {
        key[w] = word_scaled_translation(c.ifs(), words[w]).canonical_key();
        t[w] = horner_t(dual, words[w]);
    }

    // census embeddings against the direct evaluation, one word per class
    if (n <= c.depth()) {
        const auto pts = rescaled_points(dual, c, n, true);
        const auto& lv = c.level(n);
        for (std::size_t k = 0; k < lv.size(); ++k) {
            std::vector<int> w(lv.classes[k].rep.begin(), lv.classes[k].rep.end());
            const auto direct = horner_t(dual, w);
            double scale = 1;
            for (const auto& z : direct) scale = std::max(scale, std::abs(z));
            for (std::size_t j = 0; j < direct.size(); ++j) {
                const double e = std::abs(direct[j] - pts[k * direct.size() + j]) / scale;
                rep.max_embedding_mismatch = std::max(rep.max_embedding_mismatch, e);
            }
        }
    }

    auto verdict = [&](std::size_t u, std::size_t v, std::size_t& equal, std::size_t& bad) {
        int near = 0;
        for (std::size_t j = 0; j < t[u].size(); ++j) {
            const double tol = 1e-9 * (1 + std::abs(t[u][j]) + std::abs(t[v][j]));
            if (std::abs(t[u][j] - t[v][j]) <= tol) ++near;
        }
        const bool same = key[u] == key[v];
        if (same) ++equal;
        const int d = static_cast<int>(t[u].size());
        if ((near != 0 && near != d) || (same != (near == d))) ++bad;
    };

    std::size_t equal = 0, bad = 0, pairs = 0;
    if (rep.exhaustive) {
        const auto W = static_cast<std::int64_t>(words.size());
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : equal, bad, pairs)
        for (std::int64_t u = 0; u < W; ++u) {
            for (std::int64_t v = u + 1; v < W; ++v) {
                verdict(static_cast<std::size_t>(u), static_cast<std::size_t>(v), equal, bad);
                ++pairs;
            }
        }
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
        while (pairs < sample_pairs) {
            const std::size_t u = pick(rng), v = pick(rng);
            if (u == v) continue;
            verdict(u, v, equal, bad);
            ++pairs;
        }
    }
    rep.pairs = pairs;
    rep.equal_pairs = equal;
    rep.violations = bad;
    if (bad > 0) {
        throw CorrectnessAlarm("property (P) violated on " + std::to_string(bad) + " word pairs at depth " +
                               std::to_string(n));
    }
    if (rep.max_embedding_mismatch > 1e-9) {
        throw CorrectnessAlarm("census embeddings disagree with direct evaluation at depth " + std::to_string(n));
    }
    return rep;
}

namespace {

using Cell = std::vector<long long>;

struct CellHash {
    std::size_t operator()(const Cell& c) const {
        std::size_t h = 1469598103934665603ull;
        for (long long x : c) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
        return h;
    }
};

// Points as 2*dim real coordinates each.
std::vector<double> to_real(const std::vector<std::complex<double>>& pts) {
    std::vector<double> r;
    r.reserve(2 * pts.size());
    for (const auto& z : pts) {
        r.push_back(z.real());
        r.push_back(z.imag());
    }
    return r;
}

struct Grid {
    std::size_t rdim;
    double h;
    std::unordered_map<Cell, std::vector<std::size_t>, CellHash> cells;

    Cell cell_of(const double* p) const {
        Cell c(rdim);
        for (std::size_t k = 0; k < rdim; ++k) c[k] = static_cast<long long>(std::floor(p[k] / h));
        return c;
    }

    Grid(const std::vector<double>& r, std::size_t rdim_, double h_) : rdim(rdim_), h(h_) {
        const std::size_t N = r.size() / rdim;
        for (std::size_t i = 0; i < N; ++i) cells[cell_of(&r[i * rdim])].push_back(i);
    }

    // Calls f(j) for every point in the 3^rdim cells around point i.
    template <class F>
    void neighbors(const std::vector<double>& r, std::size_t i, F&& f) const {
        const Cell base = cell_of(&r[i * rdim]);
        Cell c(rdim);
        std::size_t total = 1;
        for (std::size_t k = 0; k < rdim; ++k) total *= 3;
        for (std::size_t code = 0; code < total; ++code) {
            std::size_t x = code;
            for (std::size_t k = 0; k < rdim; ++k) {
                c[k] = base[k] + static_cast<long long>(x % 3) - 1;
                x /= 3;
            }
            auto it = cells.find(c);
            if (it == cells.end()) continue;
            for (std::size_t j : it->second) f(j);
        }
    }
};

double dist(const std::vector<double>& r, std::size_t rdim, std::size_t i, std::size_t j) {
    double s = 0;
    for (std::size_t k = 0; k < rdim; ++k) {
        const double t = r[i * rdim + k] - r[j * rdim + k];
        s += t * t;
    }
    return std::sqrt(s);
}

bool all_real(const std::vector<std::complex<double>>& pts) {
    for (const auto& z : pts) {
        if (z.imag() != 0) return false;
    }
    return true;
}

}  // namespace

KappaResult kappa_points(const std::vector<std::complex<double>>& pts, std::size_t dim, double radius, Exec exec) {
    KappaResult res;
    const std::size_t N = pts.size() / dim;
    if (N == 0) return res;
    const double slack = 1e-12 * (1 + radius);
    if (dim == 1 && all_real(pts)) {
        std::vector<double> x(N);
        for (std::size_t i = 0; i < N; ++i) x[i] = pts[i].real();
        std::sort(x.begin(), x.end());
        long long best = 0;
        std::size_t lo = 0;
        for (std::size_t hi = 0; hi < N; ++hi) {
            while (x[hi] - x[lo] > 2 * radius + slack) ++lo;
            best = std::max(best, static_cast<long long>(hi - lo + 1));
        }
        res.lower = res.upper = best;
        res.exact = true;
        return res;
    }
    const auto r = to_real(pts);
    const std::size_t rdim = 2 * dim;
    const Grid grid(r, rdim, 2 * radius);
    long long lower = 0, upper = 0;
    auto count_at = [&](std::size_t i, long long& lo, long long& up) {
        long long a = 0, b = 0;
        grid.neighbors(r, i, [&](std::size_t j) {
            const double dd = dist(r, rdim, i, j);
            if (dd <= radius + slack) ++a;
            if (dd <= 2 * radius + slack) ++b;
        });
        lo = std::max(lo, a);
        up = std::max(up, b);
    };
    const auto NN = static_cast<std::int64_t>(N);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 64) reduction(max : lower, upper)
        for (std::int64_t i = 0; i < NN; ++i) count_at(static_cast<std::size_t>(i), lower, upper);
    } else {
        for (std::int64_t i = 0; i < NN; ++i) count_at(static_cast<std::size_t>(i), lower, upper);
    }
    res.lower = lower;
    res.upper = upper;
    res.exact = lower == upper;
    return res;
}

KappaResult kappa_n(const DualSystem& dual, const OverlapCensus& c, int n, Exec exec) {
    const auto pts = rescaled_points(dual, c, n);
    KappaResult res = kappa_points(pts, static_cast<std::size_t>(dual.m), dual.ball_radius(), exec);
    res.n = n;
    res.envelope = dual.kappa_envelope(n);
    return res;
}

SeparationRow separation_claim_check(const DualSystem& dual, const OverlapCensus& c, int n,
                                     std::size_t exhaustive_limit, Exec exec) {
    SeparationRow row;
    row.n = n;
    row.bound = dual.claim_bound(n);
    const auto pts = rescaled_points(dual, c, n);
    const auto dim = static_cast<std::size_t>(dual.m);
    const std::size_t N = pts.size() / dim;
    if (N < 2) {
        row.min_distance = std::numeric_limits<double>::infinity();
        row.distance_is_lower_bound = true;
        return row;
    }
    if (dim == 1 && all_real(pts)) {
        std::vector<double> x(N);
        for (std::size_t i = 0; i < N; ++i) x[i] = pts[i].real();
        std::sort(x.begin(), x.end());
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < N; ++i) best = std::min(best, x[i] - x[i - 1]);
        row.min_distance = best;
    } else if (N <= exhaustive_limit) {
        row.min_distance = min_pair_distance(pts, dim, exec).distance;
    } else {
        // Any pair closer than the cell size lies in adjacent cells, so the
        // search is exact below h and certifies min >= h otherwise.
        const auto r = to_real(pts);
        const std::size_t rdim = 2 * dim;
        const double h = row.bound;
        const Grid grid(r, rdim, h);
        double best = std::numeric_limits<double>::infinity();
        const auto NN = static_cast<std::int64_t>(N);
#pragma omp parallel for schedule(dynamic, 64) reduction(min : best) if (exec == Exec::Parallel)
        for (std::int64_t i = 0; i < NN; ++i) {
            grid.neighbors(r, static_cast<std::size_t>(i), [&](std::size_t j) {
                if (j != static_cast<std::size_t>(i)) best = std::min(best, dist(r, rdim, static_cast<std::size_t>(i), j));
            });
        }
        if (best >= h) {
            row.min_distance = h;
            row.distance_is_lower_bound = true;
        } else {
            row.min_distance = best;
        }
    }
    row.ok = row.min_distance >= row.bound - 1e-9;
    if (!row.ok) {
        throw CorrectnessAlarm("separation claim violated at depth " + std::to_string(n) + ": distance " +
                               std::to_string(row.min_distance) + " < bound " + std::to_string(row.bound));
    }
    return row;
}

IntegralityReport integrality_check(const DualSystem& dual, const OverlapCensus& c, std::size_t pairs, int max_depth,
                                    std::uint64_t seed) {
    IntegralityReport rep;
    const int top = std::min(max_depth, c.depth());
    std::vector<int> depths;
    for (int n = 1; n <= top; ++n) {
        if (c.N(n) >= 2) depths.push_back(n);
    }
    if (depths.empty()) return rep;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_depth(0, depths.size() - 1);
    const double Md = dual.M.get_d();
    const AlgebraicNumber scale = c.ifs().algebraic->beta.scaled(Rational(dual.M));

    for (std::size_t s = 0; s < pairs; ++s) {
        const int n = depths[pick_depth(rng)];
        const auto& lv = c.level(n);
        std::uniform_int_distribution<std::size_t> pick(0, lv.size() - 1);
        const std::size_t u = pick(rng);
        std::size_t v = pick(rng);
        while (v == u) v = pick(rng);
        ++rep.pairs;

        std::vector<std::complex<double>> vals(static_cast<std::size_t>(dual.d));
        for (std::size_t j = 0; j < vals.size(); ++j) {
            const auto fj = static_cast<std::size_t>(dual.order[j]);
            vals[j] = Md * dual.beta[j] * (lv.classes[u].emb[fj] - lv.classes[v].emb[fj]);
        }
        NormProductCheck chk;
        try {
            chk = norm_product(vals, 1e-6);
        } catch (const NumericalError&) {
            ++rep.failures;
            continue;
        }
        const double err = std::abs(chk.product - std::complex<double>(chk.nearest.get_d(), 0)) /
                           (1 + std::abs(chk.product));
        rep.worst_distance = std::max(rep.worst_distance, err);
        if (chk.is_zero) ++rep.failures;

        const AlgebraicNumber diff = scale * (c.scaled_translation(n, u) - c.scaled_translation(n, v));
        const Rational exact = diff.norm();
        if (exact.get_den() != 1 || exact.get_num() != chk.nearest) ++rep.exact_mismatches;
    }
    return rep;
}

}  // namespace mfs
