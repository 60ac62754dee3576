#include "mfs/census.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "mfs/errors.hpp"
#include "mfs/sweep.hpp"

namespace mfs {

namespace {

void append_mpz(std::string& out, const mpz_class& z) {
    const int s = sgn(z);
    out.push_back(static_cast<char>(s + 1));
    const std::size_t n = mpz_size(z.get_mpz_t());
    out.append(reinterpret_cast<const char*>(&n), sizeof n);
    for (std::size_t i = 0; i < n; ++i) {
        mp_limb_t limb = mpz_getlimbn(z.get_mpz_t(), static_cast<mp_size_t>(i));
        out.append(reinterpret_cast<const char*>(&limb), sizeof limb);
    }
}

double log_rational(const Rational& q) {
    long en = 0, ed = 0;
    const double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
    const double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
    return std::log(mn / md) + static_cast<double>(en - ed) * std::log(2.0);
}

Integer lcm_den(const std::vector<Rational>& v, Integer acc = 1) {
    for (const auto& q : v) acc = lcm(acc, q.get_den());
    return acc;
}

void absorb(CensusClass& into, CensusClass&& from) {
    into.mass += from.mass;
    into.words += from.words;
    if (from.rep < into.rep) {
        into.rep = std::move(from.rep);
        into.emb = std::move(from.emb);
    }
}

// Merges children that share a key. Output sorted by key.
std::vector<CensusClass> merge(std::vector<std::vector<CensusClass>>& parts, std::size_t budget, Exec exec) {
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    std::vector<CensusClass> out;
    if (exec == Exec::Serial || total < 4096) {
        out.reserve(total);
        std::unordered_map<std::string, std::size_t> index;
        index.reserve(total);
        for (auto& part : parts)
            for (auto& c : part) {
                auto [it, fresh] = index.try_emplace(c.key, out.size());
                if (fresh) {
                    out.push_back(std::move(c));
                } else {
                    absorb(out[it->second], std::move(c));
                }
            }
    } else {
        const std::size_t shards = 256;
        std::hash<std::string> hasher;
        std::vector<std::vector<CensusClass*>> by_shard(shards);
        for (auto& part : parts)
            for (auto& c : part) by_shard[hasher(c.key) % shards].push_back(&c);
        std::vector<std::vector<CensusClass>> merged(shards);
#pragma omp parallel for schedule(dynamic, 4)
        for (std::size_t s = 0; s < shards; ++s) {
            auto& dst = merged[s];
            dst.reserve(by_shard[s].size());
            std::unordered_map<std::string_view, std::size_t> index;
            index.reserve(by_shard[s].size());
            for (CensusClass* c : by_shard[s]) {
                auto it = index.find(c->key);
                if (it == index.end()) {
                    dst.push_back(std::move(*c));
                    index.emplace(dst.back().key, dst.size() - 1);
                } else {
                    absorb(dst[it->second], std::move(*c));
                }
            }
        }
        std::size_t n = 0;
        for (const auto& m : merged) n += m.size();
        out.reserve(n);
        for (auto& m : merged)
            for (auto& c : m) out.push_back(std::move(c));
    }
    if (out.size() > budget)
        throw BudgetError("class count " + std::to_string(out.size()) + " exceeds the budget of " + std::to_string(budget));
    std::sort(out.begin(), out.end(), [](const CensusClass& a, const CensusClass& b) { return a.key < b.key; });
    return out;
}

}  // namespace

std::string census_key(const std::vector<Integer>& v) {
    std::string k;
    k.reserve(v.size() * 24);
    for (const auto& z : v) append_mpz(k, z);
    return k;
}

ExpansionData make_expansion_data(const WeightedIFS& ifs) {
    if (!ifs.is_homogeneous_algebraic()) throw DomainError("census needs a homogeneous algebraic system");
    require_valid(ifs);
    ExpansionData x;
    const auto& beta = ifs.algebraic->beta;
    x.field = beta.field();
    x.l = static_cast<int>(ifs.size());
    const auto d = static_cast<std::size_t>(x.field->degree());
    const QMatrix bq = beta.multiplication_matrix();
    for (const auto& row : bq) x.DB = lcm_den(row, x.DB);
    x.B.assign(d, std::vector<Integer>(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) x.B[i][j] = Rational(bq[i][j] * x.DB).get_num();
    for (const auto& m : ifs.maps) x.Da = lcm_den((*m.translation_exact)[0].coeffs(), x.Da);
    for (const auto& m : ifs.maps) {
        std::vector<Integer> a;
        for (const auto& c : (*m.translation_exact)[0].coeffs()) a.push_back(Rational(c * x.Da).get_num());
        x.A.push_back(std::move(a));
        x.a_conj.push_back((*m.translation_exact)[0].embed_all());
    }
    if (ifs.weights_exact) {
        x.p = *ifs.weights_exact;
    } else {
        for (double w : ifs.weights) x.p.push_back(rational_from_double(w));
    }
    x.beta_conj = beta.embed_all();
    return x;
}

CensusLevel first_level(const ExpansionData& x) {
    std::vector<std::vector<CensusClass>> parts(1);
    for (int i = 0; i < x.l; ++i) {
        CensusClass c;
        c.v = x.A[static_cast<std::size_t>(i)];
        c.key = census_key(c.v);
        c.mass = x.p[static_cast<std::size_t>(i)];
        c.words = 1;
        c.rep = {static_cast<std::uint8_t>(i)};
        c.emb = x.a_conj[static_cast<std::size_t>(i)];
        parts[0].push_back(std::move(c));
    }
    CensusLevel lv;
    lv.n = 1;
    lv.denom = x.Da;
    lv.classes = merge(parts, static_cast<std::size_t>(-1), Exec::Serial);
    return lv;
}

namespace {

void children_of(const CensusClass& P, const ExpansionData& x, const Integer& factor, std::vector<CensusClass>& out) {
    const std::size_t d = P.v.size();
    std::vector<Integer> bv(d);
    for (std::size_t i = 0; i < d; ++i) {
        Integer s = 0;
        for (std::size_t j = 0; j < d; ++j)
            if (sgn(x.B[i][j]) != 0 && sgn(P.v[j]) != 0) s += x.B[i][j] * P.v[j];
        bv[i] = std::move(s);
    }
    std::vector<std::complex<double>> be(P.emb.size());
    for (std::size_t j = 0; j < be.size(); ++j) be[j] = x.beta_conj[j] * P.emb[j];
    for (int letter = 0; letter < x.l; ++letter) {
        const auto li = static_cast<std::size_t>(letter);
        CensusClass c;
        c.v = bv;
        for (std::size_t i = 0; i < d; ++i)
            if (sgn(x.A[li][i]) != 0) c.v[i] += factor * x.A[li][i];
        c.key = census_key(c.v);
        c.mass = P.mass * x.p[li];
        c.words = P.words;
        c.rep = P.rep;
        c.rep.push_back(static_cast<std::uint8_t>(letter));
        c.emb.resize(be.size());
        for (std::size_t j = 0; j < be.size(); ++j) c.emb[j] = be[j] + x.a_conj[li][j];
        out.push_back(std::move(c));
    }
}

}  // namespace

CensusLevel expand_level(const CensusLevel& parent, const ExpansionData& x, std::size_t budget, Exec exec) {
    CensusLevel lv;
    lv.n = parent.n + 1;
    lv.denom = parent.denom * x.DB;
    // c_{n+1} / D_a = D_B^n
    Integer factor = 1;
    for (int k = 0; k < parent.n; ++k) factor *= x.DB;
    const std::size_t np = parent.classes.size();
    std::vector<std::vector<CensusClass>> parts;
    if (exec == Exec::Serial) {
        parts.resize(1);
        parts[0].reserve(np * static_cast<std::size_t>(x.l));
        for (const auto& P : parent.classes) children_of(P, x, factor, parts[0]);
    } else {
        const int threads = std::max(1, omp_get_max_threads());
        const std::size_t chunks = static_cast<std::size_t>(threads) * 8;
        parts.resize(chunks);
#pragma omp parallel for schedule(dynamic, 1)
        for (std::size_t c = 0; c < chunks; ++c) {
            const std::size_t lo = np * c / chunks, hi = np * (c + 1) / chunks;
            parts[c].reserve((hi - lo) * static_cast<std::size_t>(x.l));
            for (std::size_t k = lo; k < hi; ++k) children_of(parent.classes[k], x, factor, parts[c]);
        }
    }
    lv.classes = merge(parts, budget, exec);
    return lv;
}

OverlapCensus OverlapCensus::run(const WeightedIFS& ifs, int n_max, const CensusOptions& opt) {
    OverlapCensus c;
    c.ifs_ = ifs;
    c.data_ = make_expansion_data(ifs);
    c.log_beta_ = std::log(std::abs(c.data_.beta_conj[0]));
    if (n_max < 1) return c;
    c.levels_.push_back(first_level(c.data_));
    c.extend(n_max, opt);
    return c;
}

void OverlapCensus::extend(int n_max, const CensusOptions& opt) {
    if (levels_.empty() && n_max >= 1) levels_.push_back(first_level(data_));
    while (depth() < n_max) {
        try {
            levels_.push_back(expand_level(levels_.back(), data_, opt.class_budget, opt.exec));
        } catch (const BudgetError& e) {
            partial_ = true;
            partial_reason_ = std::string(e.what()) + " at depth " + std::to_string(depth() + 1);
            return;
        }
    }
}

AlgebraicNumber OverlapCensus::scaled_translation(int n, std::size_t k) const {
    const auto& lv = level(n);
    std::vector<Rational> c;
    for (const auto& z : lv.classes[k].v) c.emplace_back(z, lv.denom);
    for (auto& q : c) q.canonicalize();
    return AlgebraicNumber(data_.field, std::move(c));
}

double OverlapCensus::rescaled_real(int n, std::size_t k) const {
    return (data_.beta_conj[0] * level(n).classes[k].emb[0]).real();
}

AlgebraicNumber word_scaled_translation(const WeightedIFS& ifs, const std::vector<int>& word) {
    const auto& beta = ifs.algebraic->beta;
    AlgebraicNumber s = AlgebraicNumber::zero(beta.field());
    for (int i : word) s = s * beta + (*ifs.maps[static_cast<std::size_t>(i)].translation_exact)[0];
    return s;
}

// ---------------------------------------------------------------------------

GrowthExponent growth_exponent(const OverlapCensus& c) {
    if (c.depth() < 2) throw DomainError("growth exponent needs a census of depth at least 2");
    GrowthExponent g;
    for (int n = 1; n <= c.depth(); ++n)
        g.per_n.push_back(std::log(static_cast<double>(c.N(n))) / (n * c.log_abs_beta()));
    g.upper_bound = *std::min_element(g.per_n.begin(), g.per_n.end());
    g.estimate = g.per_n.back();
    return g;
}

DimKEstimate dim_K_estimate(const OverlapCensus& c) {
    auto g = growth_exponent(c);
    return {std::min(1.0, g.estimate), std::min(1.0, g.upper_bound)};
}

TnResult t_n_homogeneous(const OverlapCensus& c, const Hull1D& hull, int n, TnVariant variant, int refine) {
    TnResult r;
    r.n = n;
    if (!hull.lo_alg || !hull.hi_alg) throw DomainError("homogeneous t_n needs exact hull endpoints");
    if (refine < 0) throw DomainError("cover refinement depth must be non-negative");
    const auto& beta = c.ifs().algebraic->beta;
    const auto field = beta.field();
    AlgebraicNumber rho = AlgebraicNumber::one(field);
    double rho_d = 1.0;
    int k = n;
    if (variant == TnVariant::WnDyadic) {
        k = homogeneous_depth(beta, n);
        auto bk = beta.pow(static_cast<unsigned>(k));
        if (bk.sign() < 0) bk = -bk;
        rho = bk.scaled(Rational(Integer(1), Integer(1) << n));
        rho_d = std::exp(k * c.log_abs_beta() - n * std::log(2.0));
    }
    r.word_depth = k;
    if (k < 1 || k > c.depth() || refine > c.depth()) return r;

    // Cover of K: the hull itself, or its images under the distinct maps of depth `refine`.
    std::vector<AlgebraicNumber> plo, phi;
    if (refine == 0) {
        plo.push_back(*hull.lo_alg);
        phi.push_back(*hull.hi_alg);
    } else {
        const AlgebraicNumber inv = beta.pow(static_cast<unsigned>(refine)).inverse();
        const AlgebraicNumber a = inv * *hull.lo_alg, b = inv * *hull.hi_alg;
        const bool flip = compare(a, b) > 0;
        const AlgebraicNumber shift = beta * inv;
        for (std::size_t v = 0; v < c.N(refine); ++v) {
            const AlgebraicNumber t = shift * c.scaled_translation(refine, v);
            plo.push_back((flip ? b : a) + t);
            phi.push_back((flip ? a : b) + t);
        }
    }
    // Pieces overlapping in double precision are merged; merging only enlarges
    // the cover, so the count stays an upper bound.
    struct Piece {
        std::size_t lo, hi;
        double dlo, dhi;
    };
    std::vector<Piece> pieces;
    for (std::size_t v = 0; v < plo.size(); ++v) pieces.push_back({v, v, plo[v].real_value(), phi[v].real_value()});
    std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.dlo < y.dlo; });
    std::vector<Piece> merged;
    for (const auto& p : pieces) {
        const double tol = 1e-9 * (1 + std::fabs(p.dlo)) + 2 * rho_d;
        if (!merged.empty() && p.dlo <= merged.back().dhi + tol) {
            if (p.dhi > merged.back().dhi) {
                merged.back().dhi = p.dhi;
                merged.back().hi = p.hi;
            }
        } else {
            merged.push_back(p);
        }
    }

    const auto& lv = c.level(k);
    const std::size_t P = merged.size();
    std::vector<SweepEvent> ev;
    ev.reserve(2 * lv.size() * P);
    for (std::size_t u = 0; u < lv.size(); ++u) {
        const double x = c.rescaled_real(k, u);
        for (std::size_t q = 0; q < P; ++q) {
            const auto owner = static_cast<std::uint32_t>(u * P + q);
            ev.push_back({merged[q].dlo - rho_d + x, owner, true});
            ev.push_back({merged[q].dhi + rho_d + x, owner, false});
        }
    }
    auto exact = [&](const SweepEvent& e) {
        const auto& pc = merged[e.owner % P];
        const AlgebraicNumber end = e.start ? plo[pc.lo] - rho : phi[pc.hi] + rho;
        return end + beta * c.scaled_translation(k, e.owner / P);
    };
    r.t = sweep_max_overlap(std::move(ev), [&](const SweepEvent& a, const SweepEvent& b) { return (exact(a) - exact(b)).sign(); });
    r.available = true;
    return r;
}

TnResult t_n_section(const WeightedIFS& ifs, const Hull1D& hull, int n, std::size_t budget) {
    if (ifs.ambient_dim != 1) throw DomainError("t_n is computed in dimension 1 only");
    TnResult r;
    r.n = n;
    const auto w = build_section(ifs, n, budget);
    bool rational = ifs.has_exact_ratios() && hull.lo_q && hull.hi_q;
    std::vector<Rational> rho, a;
    if (rational) {
        for (const auto& m : ifs.maps) {
            if (!m.translation_exact) {
                rational = false;
                break;
            }
            const auto& t = (*m.translation_exact)[0].coeffs();
            if (!std::all_of(t.begin() + 1, t.end(), [](const Rational& x) { return x == 0; })) {
                rational = false;
                break;
            }
            rho.push_back(m.sign < 0 ? Rational(-*m.ratio_exact) : *m.ratio_exact);
            a.push_back(t[0]);
        }
    }
    std::size_t depth = 0;
    for (std::size_t k = 0; k < w.size(); ++k) depth = std::max<std::size_t>(depth, w.offsets[k + 1] - w.offsets[k]);
    r.word_depth = static_cast<int>(depth);
    if (rational) {
        // Distinct maps x -> rho_u x + T_u.
        std::vector<std::pair<Rational, Rational>> maps;
        maps.reserve(w.size());
        for (std::size_t k = 0; k < w.size(); ++k) {
            Rational ru = 1, tu = 0;
            for (auto off = w.offsets[k]; off < w.offsets[k + 1]; ++off) {
                const std::size_t i = w.letters[off];
                tu += ru * a[i];
                ru *= rho[i];
            }
            maps.emplace_back(std::move(ru), std::move(tu));
        }
        auto lt = [](const auto& x, const auto& y) { return x.first < y.first || (x.first == y.first && x.second < y.second); };
        std::sort(maps.begin(), maps.end(), lt);
        maps.erase(std::unique(maps.begin(), maps.end()), maps.end());
        const Rational eps(Integer(1), Integer(1) << n);
        std::vector<RationalInterval> iv;
        iv.reserve(maps.size());
        for (const auto& [ru, tu] : maps) {
            Rational x = ru * *hull.lo_q + tu, y = ru * *hull.hi_q + tu;
            if (x > y) std::swap(x, y);
            iv.push_back({x - eps, y + eps});
        }
        r.t = sweep_max_overlap(iv);
    } else {
        std::vector<std::pair<double, double>> iv;
        const double eps = std::ldexp(1.0, -n);
        for (std::size_t k = 0; k < w.size(); ++k) {
            double ru = 1, tu = 0;
            for (auto off = w.offsets[k]; off < w.offsets[k + 1]; ++off) {
                const auto& m = ifs.maps[w.letters[off]];
                tu += ru * m.translation[0];
                ru *= m.sign * m.ratio;
            }
            double x = ru * hull.lo + tu, y = ru * hull.hi + tu;
            if (x > y) std::swap(x, y);
            const double pad = 1e-12 * (1 + std::fabs(x) + std::fabs(y));
            iv.emplace_back(x - eps - pad, y + eps + pad);
        }
        r.t = sweep_max_overlap(iv);
    }
    r.available = true;
    return r;
}

EscDiagnostic esc_diagnostic(const OverlapCensus& c) {
    EscDiagnostic out;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int n = 1; n <= c.depth(); ++n) {
        const auto& lv = c.level(n);
        EscRow row;
        row.n = n;
        row.overlap = std::any_of(lv.classes.begin(), lv.classes.end(), [](const CensusClass& k) { return k.words > 1; });
        if (row.overlap && !out.first_overlap) out.first_overlap = n;
        if (lv.size() < 2) {
            row.delta_tilde = std::nan("");
            row.delta = row.overlap ? 0.0 : std::nan("");
            out.rows.push_back(row);
            continue;
        }
        std::vector<double> x;
        x.reserve(lv.size());
        for (const auto& k : lv.classes) x.push_back(k.emb[0].real());
        std::sort(x.begin(), x.end());
        double gap = INFINITY;
        for (std::size_t i = 1; i < x.size(); ++i) gap = std::min(gap, x[i] - x[i - 1]);
        row.delta_tilde = gap * std::exp(-(n - 1) * c.log_abs_beta());
        row.delta = row.overlap ? 0.0 : row.delta_tilde;
        out.rows.push_back(row);
        if (row.delta_tilde > 0) {
            const double y = std::log(row.delta_tilde);
            sx += n;
            sy += y;
            sxx += double(n) * n;
            sxy += n * y;
            ++m;
        }
    }
    if (m >= 2) {
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        out.fitted_c = std::exp(slope);
    }
    return out;
}

double T_n(const OverlapCensus& c, int n, double q) {
    const auto& lv = c.level(n);
    double mx = -INFINITY;
    std::vector<double> t;
    t.reserve(lv.size());
    for (const auto& k : lv.classes) {
        t.push_back(q * log_rational(k.mass));
        mx = std::max(mx, t.back());
    }
    double s = 0;
    for (double v : t) s += std::exp(v - mx);
    return (mx + std::log(s)) / (-n * c.log_abs_beta());
}

std::vector<GarsiaRow> garsia_dimension(const OverlapCensus& c) {
    std::vector<GarsiaRow> rows;
    for (int n = 1; n <= c.depth(); ++n) {
        GarsiaRow g;
        g.n = n;
        for (const auto& k : c.level(n).classes) {
            const double p = k.mass.get_d();
            g.h -= p * log_rational(k.mass);
        }
        g.rate = g.h / (n * c.log_abs_beta());
        g.estimate = std::min(1.0, g.rate);
        rows.push_back(g);
    }
    return rows;
}

CensusInvariants check_census(const OverlapCensus& c, const std::vector<TnResult>& t_beta, const Hull1D& hull) {
    CensusInvariants inv;
    auto fail = [&](bool& flag, const std::string& msg) {
        flag = false;
        inv.failures.push_back(msg);
    };
    for (int n = 1; n <= c.depth(); ++n) {
        Rational s = 0;
        for (const auto& k : c.level(n).classes) s += k.mass;
        if (s != 1) fail(inv.mass_sums_exact, "sum of class masses at depth " + std::to_string(n) + " is " + to_string(s));
    }
    auto g = garsia_dimension(c);
    for (int n = 1; n <= c.depth(); ++n)
        for (int m = 1; n + m <= c.depth(); ++m) {
            const Integer lhs = static_cast<unsigned long>(c.N(n + m));
            const Integer rhs = Integer(static_cast<unsigned long>(c.N(n))) * static_cast<unsigned long>(c.N(m));
            if (lhs > rhs) fail(inv.submultiplicative, "N_" + std::to_string(n + m) + " > N_" + std::to_string(n) + " N_" + std::to_string(m));
            const double hl = g[static_cast<std::size_t>(n + m - 1)].h;
            const double hr = g[static_cast<std::size_t>(n - 1)].h + g[static_cast<std::size_t>(m - 1)].h;
            if (hl > hr + 1e-9 * (1 + hr))
                fail(inv.entropy_subadditive, "h_" + std::to_string(n + m) + " > h_" + std::to_string(n) + " + h_" + std::to_string(m));
        }
    for (std::size_t i = 0; i < t_beta.size(); ++i) {
        const auto& t = t_beta[i];
        if (!t.available) continue;
        if (i > 0 && t_beta[i - 1].available && t.t < t_beta[i - 1].t)
            fail(inv.t_monotone, "t_" + std::to_string(t.n) + " < t_" + std::to_string(t.n - 1));
        const double lower = static_cast<double>(c.N(t.n)) / (std::exp(t.n * c.log_abs_beta()) * hull.diam() + 1);
        if (static_cast<double>(t.t) < lower * (1 - 1e-12))
            fail(inv.pigeonhole, "t_" + std::to_string(t.n) + " below the pigeonhole bound");
    }
    return inv;
}

RationalBoundCheck rational_bound_check(const WeightedIFS& ifs, int n_max, std::size_t budget, const OverlapCensus* census) {
    if (!ifs.rational_integer) throw DomainError("bound check needs integer contraction factors and rational translations");
    if (ifs.ambient_dim != 1) throw DomainError("bound check runs in dimension 1");
    const auto& meta = *ifs.rational_integer;
    const Hull1D hull = attractor_hull(ifs);
    if (!hull.lo_q || !hull.hi_q) throw NumericalError("exact hull of the attractor could not be certified");
    RationalBoundCheck out;
    out.Q = meta.Q;
    out.diam = *hull.hi_q - *hull.lo_q;
    out.r = floor_plus_one(Rational(out.diam * out.Q));
    for (const auto& m : meta.m) out.max_m = std::max(out.max_m, Integer(abs(m)));
    const Integer base = out.r + 2 * out.Q * out.max_m + 1;
    const unsigned long l = ifs.size();
    for (int n = 0; n <= n_max; ++n) {
        TnResult t;
        if (census && ifs.is_homogeneous_algebraic() && homogeneous_depth(ifs.algebraic->beta, n) <= census->depth()) {
            t = t_n_homogeneous(*census, hull, n, TnVariant::WnDyadic);
        } else {
            t = t_n_section(ifs, hull, n, budget);
        }
        RationalBoundRow row;
        row.n = n;
        row.t = t.t;
        Integer np1 = n + 1, b;
        mpz_pow_ui(b.get_mpz_t(), np1.get_mpz_t(), l);
        Integer bd;
        mpz_pow_ui(bd.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(ifs.ambient_dim));
        row.bound = b * bd;
        row.ok = Integer(static_cast<long>(row.t)) < row.bound;
        out.ok = out.ok && row.ok;
        out.rows.push_back(row);
        if (!row.ok)
            throw CorrectnessAlarm("t_" + std::to_string(n) + " = " + std::to_string(row.t) + " is not below the proven bound " +
                                   row.bound.get_str());
    }
    return out;
}

}  // namespace mfs
