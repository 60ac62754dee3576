#include "mfs/ifs.hpp"

#include <omp.h>

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "mfs/errors.hpp"

namespace mfs {

std::vector<double> WeightedIFS::ratios() const {
    std::vector<double> r;
    r.reserve(maps.size());
    for (const auto& m : maps) r.push_back(m.ratio);
    return r;
}

bool WeightedIFS::has_exact_ratios() const {
    return !maps.empty() && std::all_of(maps.begin(), maps.end(), [](const SimilarityMap& m) { return m.ratio_exact.has_value(); });
}

std::vector<Rational> uniform_weights(std::size_t l) { return std::vector<Rational>(l, Rational(1, static_cast<unsigned long>(l))); }

namespace {

std::vector<double> to_doubles(const std::vector<Rational>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& q : v) out.push_back(q.get_d());
    return out;
}

bool is_rational_element(const AlgebraicNumber& a) {
    const auto& c = a.coeffs();
    return std::all_of(c.begin() + 1, c.end(), [](const Rational& x) { return x == 0; });
}

}  // namespace

WeightedIFS make_homogeneous(const AlgebraicNumber& beta, const std::vector<AlgebraicNumber>& translations,
                             std::vector<Rational> weights) {
    if (!beta.field()->distinguished_is_real()) throw DomainError("beta must be real at the distinguished embedding");
    const double b = beta.real_value();
    WeightedIFS ifs;
    ifs.ambient_dim = 1;
    std::optional<Rational> rexact;
    if (beta.field()->degree() == 1) rexact = Rational(1) / abs(beta.coeffs()[0]);
    for (const auto& a : translations) {
        SimilarityMap m;
        m.ratio = 1.0 / std::fabs(b);
        m.ratio_exact = rexact;
        m.sign = b < 0 ? -1 : 1;
        m.translation = {a.real_value()};
        m.translation_exact = std::vector<AlgebraicNumber>{a};
        ifs.maps.push_back(std::move(m));
    }
    ifs.weights = to_doubles(weights);
    ifs.weights_exact = std::move(weights);
    ifs.algebraic = AlgebraicMeta{beta, true};
    if (beta.field()->degree() == 1) derive_rational_meta(ifs);
    return ifs;
}

WeightedIFS make_rational_1d(const std::vector<Rational>& signed_ratios, const std::vector<Rational>& translations,
                             std::vector<Rational> weights) {
    if (signed_ratios.size() != translations.size()) throw ParseError("ratio and translation counts differ");
    auto q = NumberField::rationals();
    WeightedIFS ifs;
    for (std::size_t i = 0; i < signed_ratios.size(); ++i) {
        SimilarityMap m;
        m.ratio_exact = abs(signed_ratios[i]);
        m.ratio = m.ratio_exact->get_d();
        m.sign = signed_ratios[i] < 0 ? -1 : 1;
        m.translation = {translations[i].get_d()};
        m.translation_exact = std::vector<AlgebraicNumber>{AlgebraicNumber::from_rational(q, translations[i])};
        ifs.maps.push_back(std::move(m));
    }
    ifs.weights = to_doubles(weights);
    ifs.weights_exact = std::move(weights);
    derive_rational_meta(ifs);
    return ifs;
}

WeightedIFS make_numeric(const std::vector<double>& ratios, const std::vector<double>& translations,
                         const std::vector<double>& weights, int ambient_dim) {
    const auto d = static_cast<std::size_t>(ambient_dim);
    WeightedIFS ifs;
    ifs.ambient_dim = ambient_dim;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        SimilarityMap m;
        m.ratio = ratios[i];
        m.translation.assign(d, 0.0);
        if (translations.size() == ratios.size() * d) {
            for (std::size_t k = 0; k < d; ++k) m.translation[k] = translations[i * d + k];
        } else if (translations.empty()) {
            m.translation[0] = static_cast<double>(i) * (1.0 - ratios[i]);
        } else {
            throw ParseError("translation count does not match maps x dimension");
        }
        ifs.maps.push_back(std::move(m));
    }
    ifs.weights = weights;
    return ifs;
}

void derive_rational_meta(WeightedIFS& ifs) {
    if (ifs.maps.empty()) return;
    RationalIntegerMeta meta;
    for (const auto& m : ifs.maps) {
        if (!m.ratio_exact || !m.translation_exact) return;
        const Rational inv = Rational(1) / *m.ratio_exact;
        if (inv.get_den() != 1 || inv <= 1) return;
        if (!m.orthogonal.empty()) return;
        Integer mi = inv.get_num();
        if (m.sign < 0) mi = -mi;
        std::vector<Rational> a;
        for (const auto& t : *m.translation_exact) {
            if (!is_rational_element(t)) return;
            a.push_back(t.coeffs()[0]);
            meta.Q = lcm(meta.Q, t.coeffs()[0].get_den());
        }
        meta.m.push_back(mi);
        meta.a.push_back(std::move(a));
    }
    const bool common = std::all_of(meta.m.begin(), meta.m.end(), [&](const Integer& x) { return x == meta.m[0]; });
    if (common && ifs.ambient_dim == 1 && !ifs.algebraic) {
        Integer M = 1;
        for (const auto& a : meta.a) M = lcm(M, a[0].get_den());
        auto field = NumberField::create({Integer(-meta.m[0]), Integer(1)}, 0, M);
        for (std::size_t i = 0; i < ifs.maps.size(); ++i)
            (*ifs.maps[i].translation_exact)[0] = AlgebraicNumber::from_rational(field, meta.a[i][0]);
        ifs.algebraic = AlgebraicMeta{AlgebraicNumber::generator(field), true};
    }
    ifs.rational_integer = std::move(meta);
}

ValidationReport validate(const WeightedIFS& ifs) {
    ValidationReport rep;
    auto fail = [&](const std::string& msg) {
        rep.ok = false;
        rep.issues.push_back(msg);
    };
    const std::size_t l = ifs.maps.size();
    const int d = ifs.ambient_dim;
    if (d < 1) fail("ambient dimension must be positive");
    if (l == 0) fail("at least one map is required");
    if (l > 255) fail("at most 255 maps are supported");
    for (std::size_t i = 0; i < l; ++i) {
        const auto& m = ifs.maps[i];
        const std::string tag = "map " + std::to_string(i) + ": ";
        if (!(m.ratio > 0 && m.ratio < 1)) {
            std::ostringstream os;
            os << tag << "non-contracting ratio " << m.ratio;
            fail(os.str());
        }
        if (m.ratio_exact && std::fabs(m.ratio_exact->get_d() - m.ratio) > 1e-15 * m.ratio)
            fail(tag + "exact ratio disagrees with numeric ratio");
        if (m.sign != 1 && m.sign != -1) fail(tag + "sign must be +1 or -1");
        if (d > 1 && m.sign != 1) fail(tag + "orientation in dimension > 1 goes in the orthogonal part");
        if (d >= 1 && m.translation.size() != static_cast<std::size_t>(d)) fail(tag + "translation has wrong dimension");
        if (!m.orthogonal.empty()) {
            if (m.orthogonal.size() != static_cast<std::size_t>(d * d)) {
                fail(tag + "orthogonal part has wrong shape");
            } else {
                Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> u(m.orthogonal.data(), d, d);
                if (((u * u.transpose()) - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9)
                    fail(tag + "orthogonal part is not orthogonal");
            }
        }
        if (m.translation_exact) {
            if (m.translation_exact->size() != m.translation.size()) {
                fail(tag + "exact translation has wrong dimension");
            } else {
                for (std::size_t k = 0; k < m.translation.size(); ++k) {
                    auto z = (*m.translation_exact)[k].embed(0);
                    if (std::fabs(z.imag()) > 1e-9 || std::fabs(z.real() - m.translation[k]) > 1e-9 * (1 + std::fabs(z.real())))
                        fail(tag + "exact translation does not match numeric translation");
                }
            }
        }
    }
    if (ifs.weights.size() != l) {
        fail("weights count " + std::to_string(ifs.weights.size()) + " differs from map count " + std::to_string(l));
    } else {
        for (double p : ifs.weights)
            if (!(p > 0)) fail("weights must be strictly positive");
        if (ifs.weights_exact) {
            Rational s = 0;
            for (const auto& p : *ifs.weights_exact) s += p;
            if (s != 1) fail("weights sum to " + to_string(s) + ", not 1");
        } else {
            double s = std::accumulate(ifs.weights.begin(), ifs.weights.end(), 0.0);
            if (std::fabs(s - 1) > 1e-12) {
                std::ostringstream os;
                os << "weights sum to " << s << ", not 1";
                fail(os.str());
            }
        }
    }
    if (ifs.algebraic) {
        const auto& beta = ifs.algebraic->beta;
        if (std::abs(beta.embed(0)) <= 1) fail("|beta| must exceed 1");
        if (ifs.algebraic->homogeneous && d == 1 && beta.field()->distinguished_is_real()) {
            const double b = beta.real_value();
            for (const auto& m : ifs.maps) {
                if (std::fabs(m.ratio - 1 / std::fabs(b)) > 1e-12 * m.ratio || m.sign != (b < 0 ? -1 : 1))
                    fail("homogeneous system requires every map to have ratio 1/beta");
                if (!m.translation_exact) {
                    fail("homogeneous algebraic system requires exact translations");
                } else if (!(*m.translation_exact)[0].field()->same_as(*beta.field())) {
                    fail("translations and beta lie in different fields");
                }
            }
        }
    }
    if (ifs.rational_integer) {
        const auto& ri = *ifs.rational_integer;
        if (ri.m.size() != l) fail("integer meta has wrong length");
        for (std::size_t i = 0; i < ri.m.size() && i < l; ++i) {
            if (abs(ri.m[i]) <= 1) fail("integer ratios need |m_i| > 1");
            const double r = 1.0 / std::fabs(ri.m[i].get_d());
            if (std::fabs(ifs.maps[i].ratio - r) > 1e-15 * r) fail("integer meta disagrees with map ratio");
        }
    }
    return rep;
}

void require_valid(const WeightedIFS& ifs) {
    auto rep = validate(ifs);
    if (rep.ok) return;
    std::string msg = "invalid IFS:";
    for (const auto& s : rep.issues) msg += "\n  " + s;
    throw ParseError(msg);
}

// ---------------------------------------------------------------------------
// Geometry

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

Mat linear_part(const SimilarityMap& m, int d) {
    Mat u = Mat::Identity(d, d);
    if (!m.orthogonal.empty()) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) u(i, j) = m.orthogonal[static_cast<std::size_t>(i * d + j)];
    }
    return m.sign * m.ratio * u;
}

Vec apply(const SimilarityMap& m, int d, const Vec& x) {
    Vec a = Eigen::Map<const Vec>(m.translation.data(), d);
    return linear_part(m, d) * x + a;
}

}  // namespace

AttractorBound attractor_bound(const WeightedIFS& ifs) {
    const int d = ifs.ambient_dim;
    Vec c = Vec::Zero(d);
    for (const auto& m : ifs.maps) {
        Vec a = Eigen::Map<const Vec>(m.translation.data(), d);
        Vec fix = (Mat::Identity(d, d) - linear_part(m, d)).colPivHouseholderQr().solve(a);
        c += fix;
    }
    c /= static_cast<double>(ifs.maps.size());
    double R = 0;
    for (const auto& m : ifs.maps) R = std::max(R, (apply(m, d, c) - c).norm() / (1 - m.ratio));
    AttractorBound b;
    b.center.assign(c.data(), c.data() + d);
    b.radius = R;
    b.verified = true;
    for (const auto& m : ifs.maps) {
        double reach = (apply(m, d, c) - c).norm() + m.ratio * R;
        if (reach > R * (1 + 1e-12) + 1e-300) b.verified = false;
    }
    return b;
}

namespace {

AlgebraicNumber alg_min(const std::vector<AlgebraicNumber>& v) {
    AlgebraicNumber best = v.front();
    for (const auto& x : v)
        if (compare(x, best) < 0) best = x;
    return best;
}

AlgebraicNumber alg_max(const std::vector<AlgebraicNumber>& v) {
    AlgebraicNumber best = v.front();
    for (const auto& x : v)
        if (compare(x, best) > 0) best = x;
    return best;
}

Hull1D numeric_hull(const WeightedIFS& ifs) {
    auto b = attractor_bound(ifs);
    double lo = b.center[0] - b.radius, hi = b.center[0] + b.radius;
    for (int it = 0; it < 2000; ++it) {
        double nlo = INFINITY, nhi = -INFINITY;
        for (const auto& m : ifs.maps) {
            double x = m.sign * m.ratio * lo + m.translation[0];
            double y = m.sign * m.ratio * hi + m.translation[0];
            nlo = std::min({nlo, x, y});
            nhi = std::max({nhi, x, y});
        }
        const bool done = nlo == lo && nhi == hi;
        lo = nlo;
        hi = nhi;
        if (done) break;
    }
    const double pad = 1e-12 * (1 + std::fabs(lo) + std::fabs(hi));
    Hull1D h;
    h.lo = lo - pad;
    h.hi = hi + pad;
    return h;
}

// Endpoint of the image of [L, U] under x -> rho x + a: 0 means L, 1 means U.
struct EndpointSource {
    std::size_t map = 0;
    int from = 0;
};

std::optional<Hull1D> rational_hull(const WeightedIFS& ifs) {
    std::vector<Rational> rho, a;
    for (const auto& m : ifs.maps) {
        if (!m.ratio_exact || !m.translation_exact || !is_rational_element((*m.translation_exact)[0])) return std::nullopt;
        rho.push_back(m.sign < 0 ? Rational(-*m.ratio_exact) : *m.ratio_exact);
        a.push_back((*m.translation_exact)[0].coeffs()[0]);
    }
    Hull1D num = numeric_hull(ifs);
    double lo = num.lo, hi = num.hi;
    EndpointSource slo, shi;
    double best_lo = INFINITY, best_hi = -INFINITY;
    for (std::size_t i = 0; i < ifs.maps.size(); ++i) {
        const double r = rho[i].get_d(), t = a[i].get_d();
        double x = r * lo + t, y = r * hi + t;
        if (x < best_lo) best_lo = x, slo = {i, 0};
        if (y < best_lo) best_lo = y, slo = {i, 1};
        if (x > best_hi) best_hi = x, shi = {i, 0};
        if (y > best_hi) best_hi = y, shi = {i, 1};
    }
    // L = rho_i X + a_i, U = rho_j Y + a_j, X, Y in {L, U}.
    Rational m11 = 1, m12 = 0, m21 = 0, m22 = 1;
    (slo.from == 0 ? m11 : m12) -= rho[slo.map];
    (shi.from == 0 ? m21 : m22) -= rho[shi.map];
    const Rational det = m11 * m22 - m12 * m21;
    if (det == 0) return std::nullopt;
    const Rational r1 = a[slo.map], r2 = a[shi.map];
    const Rational L = (r1 * m22 - m12 * r2) / det;
    const Rational U = (m11 * r2 - m21 * r1) / det;
    // Exact fixed point of the hull operator.
    Rational min_img = 0, max_img = 0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        Rational x = rho[i] * L + a[i], y = rho[i] * U + a[i];
        if (x > y) std::swap(x, y);
        if (i == 0 || x < min_img) min_img = x;
        if (i == 0 || y > max_img) max_img = y;
    }
    if (min_img != L || max_img != U) return std::nullopt;
    Hull1D h;
    h.lo_q = L;
    h.hi_q = U;
    h.lo = L.get_d();
    h.hi = U.get_d();
    h.exact = true;
    return h;
}

}  // namespace

Hull1D attractor_hull(const WeightedIFS& ifs) {
    if (ifs.ambient_dim != 1) throw DomainError("convex hull of the attractor is only computed in dimension 1");
    if (ifs.is_homogeneous_algebraic() && ifs.algebraic->beta.field()->distinguished_is_real()) {
        const auto& beta = ifs.algebraic->beta;
        std::vector<AlgebraicNumber> a;
        for (const auto& m : ifs.maps) a.push_back((*m.translation_exact)[0]);
        const auto one = AlgebraicNumber::one(beta.field());
        AlgebraicNumber L, U;
        if (beta.sign() > 0) {
            const auto k = beta * (beta - one).inverse();
            std::vector<AlgebraicNumber> fix;
            for (const auto& ai : a) fix.push_back(ai * k);
            L = alg_min(fix);
            U = alg_max(fix);
        } else {
            const auto binv = beta.inverse();
            const auto amin = alg_min(a), amax = alg_max(a);
            L = (amax * binv + amin) * (one - binv * binv).inverse();
            U = L * binv + amax;
        }
        Hull1D h;
        h.lo = L.real_value();
        h.hi = U.real_value();
        if (beta.field()->degree() == 1) {
            h.lo_q = L.coeffs()[0];
            h.hi_q = U.coeffs()[0];
        }
        h.lo_alg = std::move(L);
        h.hi_alg = std::move(U);
        h.exact = true;
        return h;
    }
    if (auto h = rational_hull(ifs)) return *h;
    return numeric_hull(ifs);
}

double similarity_dimension_set(const std::vector<double>& ratios) {
    if (ratios.size() <= 1) return 0.0;
    auto f = [&](double s) {
        double acc = 0;
        for (double r : ratios) acc += std::pow(r, s);
        return acc - 1;
    };
    double lo = 0, hi = 1;
    while (f(hi) > 0) hi *= 2;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (f(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Sections W_n

std::vector<int> SectionWn::word(std::size_t k) const {
    return std::vector<int>(letters.begin() + static_cast<std::ptrdiff_t>(offsets[k]),
                            letters.begin() + static_cast<std::ptrdiff_t>(offsets[k + 1]));
}

int homogeneous_depth(const AlgebraicNumber& beta, int n) {
    if (n <= 0) return 1;
    const double lb = std::log(std::fabs(beta.real_value()));
    int k = std::max(1, static_cast<int>(std::ceil(n * std::log(2.0) / lb)) - 1);
    const auto two_n = AlgebraicNumber::from_rational(beta.field(), Rational(Integer(1) << n));
    auto reaches = [&](int kk) {
        auto p = beta.pow(static_cast<unsigned>(kk));
        if (p.sign() < 0) p = -p;
        return compare(p, two_n) >= 0;
    };
    while (k > 1 && reaches(k - 1)) --k;
    while (!reaches(k)) ++k;
    return k;
}

bool word_accepted_exact(const WeightedIFS& ifs, const std::vector<int>& word, int n) {
    Rational prod = 1;
    for (int i : word) prod *= *ifs.maps[static_cast<std::size_t>(i)].ratio_exact;
    Rational bound(Integer(1), Integer(1) << n);
    return prod <= bound;
}

namespace {

class SectionBuilder {
public:
    SectionBuilder(const WeightedIFS& ifs, int n, std::size_t budget) : ifs_(ifs), n_(n), budget_(budget) {
        for (const auto& m : ifs.maps) log_r_.push_back(std::log(m.ratio));
        threshold_ = -n * std::log(2.0);
        tol_ = 1e-12 * std::max(1.0, std::fabs(threshold_));
        exact_ = ifs.has_exact_ratios();
        if (!exact_ && ifs.is_homogeneous_algebraic()) fixed_depth_ = homogeneous_depth(ifs.algebraic->beta, n);
    }

    // Returns true when the word is a leaf of W_n.
    bool accept(const std::vector<int>& w, double logr, std::size_t& inexact) const {
        if (fixed_depth_ > 0) return static_cast<int>(w.size()) >= fixed_depth_;
        const double diff = logr - threshold_;
        if (diff < -tol_) return true;
        if (diff > tol_) return false;
        if (exact_) return word_accepted_exact(ifs_, w, n_);
        ++inexact;
        return diff <= 0;
    }

    // Depth-first expansion below prefix `w`, leaves appended to `out`.
    bool expand(std::vector<int>& w, double logr, SectionWn& out, std::atomic<std::size_t>& emitted) const {
        for (std::size_t i = 0; i < log_r_.size(); ++i) {
            w.push_back(static_cast<int>(i));
            const double lr = logr + log_r_[i];
            if (accept(w, lr, out.inexact_decisions)) {
                if (emitted.fetch_add(1, std::memory_order_relaxed) >= budget_) {
                    w.pop_back();
                    return false;
                }
                emit(w, lr, out);
            } else if (!expand(w, lr, out, emitted)) {
                w.pop_back();
                return false;
            }
            w.pop_back();
        }
        return true;
    }

    static void emit(const std::vector<int>& w, double lr, SectionWn& out) {
        for (int c : w) out.letters.push_back(static_cast<std::uint8_t>(c));
        out.offsets.push_back(out.letters.size());
        out.log_ratio.push_back(lr);
    }

    std::size_t letters() const { return log_r_.size(); }
    double log_ratio(std::size_t i) const { return log_r_[i]; }
    std::size_t budget() const { return budget_; }

private:
    const WeightedIFS& ifs_;
    int n_;
    std::size_t budget_;
    std::vector<double> log_r_;
    double threshold_ = 0, tol_ = 0;
    bool exact_ = false;
    int fixed_depth_ = 0;
};

struct FrontierItem {
    std::vector<int> word;
    double logr = 0;
    bool leaf = false;
};

void append(SectionWn& dst, const SectionWn& src) {
    const std::uint64_t base = dst.letters.size();
    dst.letters.insert(dst.letters.end(), src.letters.begin(), src.letters.end());
    for (std::size_t k = 1; k < src.offsets.size(); ++k) dst.offsets.push_back(base + src.offsets[k]);
    dst.log_ratio.insert(dst.log_ratio.end(), src.log_ratio.begin(), src.log_ratio.end());
    dst.inexact_decisions += src.inexact_decisions;
}

}  // namespace

SectionWn build_section(const WeightedIFS& ifs, int n, std::size_t budget, Exec exec) {
    if (n < 0) throw DomainError("section scale must be non-negative");
    SectionBuilder b(ifs, n, budget);
    SectionWn out;
    out.n = n;
    std::atomic<std::size_t> emitted{0};
    auto budget_error = [&] {
        return BudgetError("W_" + std::to_string(n) + " exceeds the word budget of " + std::to_string(budget));
    };
    if (exec == Exec::Serial) {
        std::vector<int> w;
        if (!b.expand(w, 0.0, out, emitted)) throw budget_error();
        return out;
    }
    // Breadth-first frontier in lexicographic order, then independent subtrees.
    std::vector<FrontierItem> frontier{FrontierItem{{}, 0.0, false}};
    const std::size_t target = 64 * static_cast<std::size_t>(std::max(1, omp_get_max_threads()));
    for (int round = 0; round < 32; ++round) {
        std::size_t open = 0;
        for (const auto& f : frontier) open += f.leaf ? 0 : 1;
        if (open == 0 || (round > 0 && open >= target) || frontier.size() > budget) break;
        std::vector<FrontierItem> next;
        for (auto& f : frontier) {
            if (f.leaf) {
                next.push_back(std::move(f));
                continue;
            }
            for (std::size_t i = 0; i < b.letters(); ++i) {
                FrontierItem c{f.word, f.logr + b.log_ratio(i), false};
                c.word.push_back(static_cast<int>(i));
                c.leaf = b.accept(c.word, c.logr, out.inexact_decisions);
                next.push_back(std::move(c));
            }
        }
        frontier = std::move(next);
    }
    std::size_t leaves = 0;
    for (const auto& f : frontier) leaves += f.leaf ? 1 : 0;
    emitted = leaves;
    if (leaves > budget) throw budget_error();
    std::vector<SectionWn> parts(frontier.size());
    std::atomic<bool> ok{true};
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t k = 0; k < frontier.size(); ++k) {
        if (!ok.load(std::memory_order_relaxed)) continue;
        auto& f = frontier[k];
        if (f.leaf) {
            SectionBuilder::emit(f.word, f.logr, parts[k]);
        } else {
            std::vector<int> w = f.word;
            if (!b.expand(w, f.logr, parts[k], emitted)) ok = false;
        }
    }
    if (!ok) throw budget_error();
    for (const auto& p : parts) append(out, p);
    return out;
}

SectionCheck check_section(const WeightedIFS& ifs, const SectionWn& w, double tol) {
    SectionCheck c;
    auto r = ifs.ratios();
    c.s = similarity_dimension_set(r);
    const double rmin = *std::min_element(r.begin(), r.end());
    const double thr = -w.n * std::log(2.0);
    double sum = 0, comp = 0;
    c.sandwich_ok = true;
    for (double lr : w.log_ratio) {
        // Kahan summation keeps the identity check meaningful for large sections.
        double y = std::exp(c.s * lr) - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        const double slack = 1e-12 * std::max(1.0, std::fabs(thr));
        if (lr > thr + slack || lr <= thr + std::log(rmin) - slack) c.sandwich_ok = false;
    }
    c.identity_sum = sum;
    c.identity_ok = std::fabs(sum - 1) <= tol;
    c.count_ok = static_cast<double>(w.size()) >= std::exp(w.n * c.s * std::log(2.0)) * (1 - tol);
    return c;
}

// ---------------------------------------------------------------------------
// Separation classification

std::string to_string(Truth t) {
    switch (t) {
        case Truth::True: return "true";
        case Truth::False: return "false";
        default: return "unknown";
    }
}

RatioSumVerdict ratio_sum_criterion(const WeightedIFS& ifs) {
    RatioSumVerdict v;
    v.exact = ifs.has_exact_ratios();
    for (const auto& m : ifs.maps) {
        v.sum += m.ratio;
        if (v.exact) v.sum_exact += *m.ratio_exact;
    }
    if (v.exact) {
        v.sum = v.sum_exact.get_d();
        v.awsc = v.sum_exact <= 1;
    } else {
        v.awsc = v.sum <= 1 + 1e-12;
    }
    v.margin = v.exact ? Rational(Rational(1) - v.sum_exact).get_d() : 1 - v.sum;
    v.conditional = !(ifs.assertions.esc && *ifs.assertions.esc);
    return v;
}

namespace {

class Closure {
public:
    explicit Closure(SeparationReport& r) : r_(r) {}

    void set(Status& s, const char* name, Truth v, const std::string& source) {
        if (v == Truth::Unknown) return;
        if (s.value == v) return;
        if (s.value != Truth::Unknown)
            throw InconsistencyError(std::string(name) + " is both " + to_string(s.value) + " (" + s.source + ") and " +
                                     to_string(v) + " (" + source + ")");
        s.value = v;
        s.source = source;
        changed_ = true;
    }

    void run() {
        do {
            changed_ = false;
            imply(r_.osc, "OSC", r_.wsc, "WSC");
            imply(r_.wsc, "WSC", r_.awsc, "AWSC");
            imply(r_.awsc, "AWSC", r_.wesc, "WESC");
            imply(r_.osc, "OSC", r_.esc, "ESC");
            imply(r_.esc, "ESC", r_.wesc, "WESC");
        } while (changed_);
    }

private:
    void imply(Status& a, const char* an, Status& b, const char* bn) {
        if (a.value == Truth::True) set(b, bn, Truth::True, std::string("implied by ") + an);
        if (b.value == Truth::False) set(a, an, Truth::False, std::string("excluded since ") + bn + " fails");
    }

    SeparationReport& r_;
    bool changed_ = false;
};

}  // namespace

SeparationReport classify(const WeightedIFS& ifs, const ClassifyEvidence& evidence) {
    SeparationReport r;
    Closure c(r);
    if (ifs.assertions.osc) c.set(r.osc, "OSC", *ifs.assertions.osc ? Truth::True : Truth::False, "asserted");
    if (ifs.assertions.esc) c.set(r.esc, "ESC", *ifs.assertions.esc ? Truth::True : Truth::False, "asserted");
    if (evidence.exact_overlap_depth)
        c.set(r.esc, "ESC", Truth::False,
              "exact overlap found at depth " + std::to_string(*evidence.exact_overlap_depth));
    c.run();

    if (ifs.rational_integer)
        c.set(r.awsc, "AWSC", Truth::True, "proven: integer contraction factors with rational translations");

    if (ifs.ambient_dim == 1 && ifs.algebraic) {
        c.set(r.wesc, "WESC", Truth::True, "algebraic parameters on the line");
        if (ifs.is_homogeneous_algebraic() && ifs.algebraic->beta.field()->distinguished_is_real()) {
            const auto& beta = ifs.algebraic->beta;
            auto absb = beta.sign() < 0 ? -beta : beta;
            auto l = AlgebraicNumber::from_rational(beta.field(), Rational(static_cast<long>(ifs.size())));
            if (compare(l, absb) <= 0) {
                c.set(r.awsc, "AWSC", Truth::True, "proven: homogeneous algebraic with l <= |beta|");
            } else if (evidence.growth_upper_bound && *evidence.growth_upper_bound <= 1.0) {
                c.set(r.awsc, "AWSC", Truth::True, "proven: census growth exponent bound <= 1");
            } else if (r.awsc.value == Truth::Unknown) {
                r.notes.push_back("AWSC: l > |beta|, needs census");
            }
        }
    }
    c.run();

    if (ifs.ambient_dim == 1) {
        auto v = ratio_sum_criterion(ifs);
        if (r.esc.value == Truth::True) {
            c.set(r.awsc, "AWSC", v.awsc ? Truth::True : Truth::False,
                  std::string("ESC ratio-sum criterion: sum r_i ") + (v.awsc ? "<= 1" : "> 1"));
        } else if (r.esc.value == Truth::Unknown) {
            r.notes.push_back(std::string("ratio-sum criterion (conditional on ESC): AWSC ") + (v.awsc ? "true" : "false") +
                              ", sum r_i = " + (v.exact ? to_string(v.sum_exact) : std::to_string(v.sum)));
        }
    }
    c.run();
    return r;
}

}  // namespace mfs
