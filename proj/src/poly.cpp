#include "mfs/poly.hpp"

#include <stdexcept>
#include <utility>

namespace mfs {

QPoly::QPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

QPoly QPoly::constant(const Rational& c) { return QPoly(std::vector<Rational>{c}); }

QPoly QPoly::monomial(const Rational& c, int degree) {
    std::vector<Rational> v(static_cast<std::size_t>(degree) + 1);
    v.back() = c;
    return QPoly(std::move(v));
}

void QPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational QPoly::coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(c_.size())) return Rational(0);
    return c_[static_cast<std::size_t>(i)];
}

QPoly QPoly::operator+(const QPoly& o) const {
    std::vector<Rational> r(std::max(c_.size(), o.c_.size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i < c_.size()) r[i] += c_[i];
        if (i < o.c_.size()) r[i] += o.c_[i];
    }
    return QPoly(std::move(r));
}

QPoly QPoly::operator-() const {
    std::vector<Rational> r(c_.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = -c_[i];
    return QPoly(std::move(r));
}

QPoly QPoly::operator-(const QPoly& o) const { return *this + (-o); }

QPoly QPoly::operator*(const QPoly& o) const {
    if (is_zero() || o.is_zero()) return {};
    std::vector<Rational> r(c_.size() + o.c_.size() - 1);
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return QPoly(std::move(r));
}

QPoly QPoly::scaled(const Rational& s) const {
    std::vector<Rational> r(c_);
    for (auto& x : r) x *= s;
    return QPoly(std::move(r));
}

QPoly QPoly::derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Rational> r(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * static_cast<long>(i);
    return QPoly(std::move(r));
}

QPoly QPoly::monic() const {
    if (is_zero()) return {};
    return scaled(Rational(1) / leading());
}

Rational QPoly::evaluate(const Rational& x) const {
    Rational acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::complex<double> QPoly::evaluate(std::complex<double> x) const {
    std::complex<double> acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + it->get_d();
    return acc;
}

void QPoly::divmod(const QPoly& divisor, QPoly& quotient, QPoly& remainder) const {
    if (divisor.is_zero()) throw std::domain_error("polynomial division by zero");
    std::vector<Rational> rem(c_);
    int dd = divisor.degree();
    int qd = degree() - dd;
    std::vector<Rational> q(qd >= 0 ? static_cast<std::size_t>(qd) + 1 : 0);
    const Rational inv_lead = Rational(1) / divisor.leading();
    for (int k = qd; k >= 0; --k) {
        Rational f = rem[static_cast<std::size_t>(k + dd)] * inv_lead;
        q[static_cast<std::size_t>(k)] = f;
        if (f == 0) continue;
        for (int j = 0; j <= dd; ++j)
            rem[static_cast<std::size_t>(k + j)] -= f * divisor.c_[static_cast<std::size_t>(j)];
    }
    quotient = QPoly(std::move(q));
    remainder = QPoly(std::move(rem));
}

QPoly QPoly::operator%(const QPoly& divisor) const {
    QPoly q, r;
    divmod(divisor, q, r);
    return r;
}

QPoly gcd(QPoly a, QPoly b) {
    while (!b.is_zero()) {
        QPoly r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

bool is_squarefree(const QPoly& p) {
    if (p.degree() <= 0) return true;
    return gcd(p, p.derivative()).degree() == 0;
}

namespace {

int sign(const Rational& x) { return sgn(x); }

int sign_changes(const std::vector<QPoly>& seq, const Rational& x) {
    int changes = 0;
    int last = 0;
    for (const auto& p : seq) {
        int s = sign(p.evaluate(x));
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

}  // namespace

int count_real_roots(const QPoly& p, const Rational& lo, const Rational& hi) {
    if (p.is_zero()) throw std::domain_error("count_real_roots of zero polynomial");
    // Work with the squarefree part so the count is of distinct roots.
    QPoly g = gcd(p, p.derivative());
    QPoly sq = p;
    if (g.degree() > 0) {
        QPoly q, r;
        p.divmod(g, q, r);
        sq = q;
    }
    std::vector<QPoly> seq{sq, sq.derivative()};
    while (!seq.back().is_zero()) {
        QPoly r = seq[seq.size() - 2] % seq.back();
        if (r.is_zero()) break;
        seq.push_back(-r);
    }
    return sign_changes(seq, lo) - sign_changes(seq, hi);
}

bool is_self_reciprocal(const QPoly& p) {
    const auto& c = p.coeffs();
    if (c.empty()) return false;
    for (std::size_t i = 0, j = c.size() - 1; i < j; ++i, --j)
        if (c[i] != c[j]) return false;
    return true;
}

QPoly reciprocal_trace_polynomial(const QPoly& p) {
    if (!is_self_reciprocal(p) || p.degree() % 2 != 0)
        throw std::domain_error("reciprocal_trace_polynomial needs an even-degree self-reciprocal polynomial");
    const int k = p.degree() / 2;
    // V_i(y) = x^i + x^{-i} expressed in y = x + 1/x.
    std::vector<QPoly> v;
    v.push_back(QPoly::constant(2));
    v.push_back(QPoly::monomial(1, 1));
    for (int i = 2; i <= k; ++i) v.push_back(QPoly::monomial(1, 1) * v[i - 1] - v[i - 2]);
    QPoly r = QPoly::constant(p.coeff(k));
    for (int i = 1; i <= k; ++i) r = r + v[static_cast<std::size_t>(i)].scaled(p.coeff(k + i));
    return r;
}

QPoly characteristic_polynomial(const QMatrix& a) {
    const std::size_t n = a.size();
    // M_0 = 0, c_n = 1; M_k = A M_{k-1} + c_{n-k+1} I; c_{n-k} = -tr(A M_k)/k.
    std::vector<Rational> c(n + 1);
    c[n] = 1;
    QMatrix m(n, std::vector<Rational>(n));
    for (std::size_t k = 1; k <= n; ++k) {
        QMatrix next(n, std::vector<Rational>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                Rational s = 0;
                for (std::size_t t = 0; t < n; ++t) s += a[i][t] * m[t][j];
                next[i][j] = s;
            }
            next[i][i] += c[n - k + 1];
        }
        m = std::move(next);
        Rational tr = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t = 0; t < n; ++t) tr += a[i][t] * m[t][i];
        c[n - k] = -tr / static_cast<long>(k);
    }
    return QPoly(std::move(c));
}

}  // namespace mfs

namespace mfs {

namespace {

using ModPoly = std::vector<long long>;  // constant term first, trimmed

void mp_trim(ModPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

long long inv_mod(long long a, long long p) {
    long long r = 1, e = p - 2;
    a %= p;
    while (e > 0) {
        if (e & 1) r = r * a % p;
        a = a * a % p;
        e >>= 1;
    }
    return r;
}

ModPoly mp_rem(ModPoly a, const ModPoly& b, long long p) {
    const long long inv = inv_mod(b.back(), p);
    while (a.size() >= b.size()) {
        const long long c = a.back() * inv % p;
        const std::size_t off = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) a[off + i] = ((a[off + i] - c * b[i]) % p + p) % p;
        mp_trim(a);
    }
    return a;
}

ModPoly mp_div(ModPoly a, const ModPoly& b, long long p) {
    const long long inv = inv_mod(b.back(), p);
    ModPoly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, 0);
    while (a.size() >= b.size()) {
        const long long c = a.back() * inv % p;
        const std::size_t off = a.size() - b.size();
        q[off] = c;
        for (std::size_t i = 0; i < b.size(); ++i) a[off + i] = ((a[off + i] - c * b[i]) % p + p) % p;
        mp_trim(a);
    }
    return q;
}

ModPoly mp_mulmod(const ModPoly& a, const ModPoly& b, const ModPoly& f, long long p) {
    if (a.empty() || b.empty()) return {};
    ModPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    }
    mp_trim(r);
    return mp_rem(std::move(r), f, p);
}

ModPoly mp_powmod(ModPoly base, long long e, const ModPoly& f, long long p) {
    ModPoly r{1};
    base = mp_rem(std::move(base), f, p);
    while (e > 0) {
        if (e & 1) r = mp_mulmod(r, base, f, p);
        base = mp_mulmod(base, base, f, p);
        e >>= 1;
    }
    return r;
}

ModPoly mp_gcd(ModPoly a, ModPoly b, long long p) {
    while (!b.empty()) {
        ModPoly r = mp_rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

ModPoly mp_sub(ModPoly a, const ModPoly& b, long long p) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = ((a[i] - b[i]) % p + p) % p;
    mp_trim(a);
    return a;
}

// Degrees of the irreducible factors of a squarefree monic f mod p.
std::vector<int> factor_degrees(const ModPoly& f, long long p) {
    std::vector<int> out;
    ModPoly rem = f;
    ModPoly h{0, 1};
    const ModPoly x{0, 1};
    for (int i = 1; 2 * i <= static_cast<int>(rem.size()) - 1; ++i) {
        h = mp_powmod(h, p, rem, p);
        const ModPoly g = mp_gcd(rem, mp_sub(h, x, p), p);
        const int dg = static_cast<int>(g.size()) - 1;
        if (dg > 0) {
            for (int k = 0; k < dg / i; ++k) out.push_back(i);
            rem = mp_div(rem, g, p);
            h = mp_rem(h, rem, p);
        }
    }
    if (rem.size() > 1) out.push_back(static_cast<int>(rem.size()) - 1);
    return out;
}

}  // namespace

Irreducibility irreducibility_check(const std::vector<Integer>& monic, int max_prime) {
    const int d = static_cast<int>(monic.size()) - 1;
    if (d <= 1) return Irreducibility::Proven;
    const Integer& c0 = monic.front();
    if (c0 == 0) return Irreducibility::Reducible;
    // Integer roots divide the constant term.
    if (abs(c0) <= 1000000) {
        const long a = Integer(abs(c0)).get_si();
        QPoly f([&] {
            std::vector<Rational> c;
            for (const auto& z : monic) c.emplace_back(z);
            return c;
        }());
        for (long k = 1; k <= a; ++k) {
            if (a % k != 0) continue;
            if (f.evaluate(Rational(k)) == 0 || f.evaluate(Rational(-k)) == 0) return Irreducibility::Reducible;
        }
    }
    // possible[k]: a factor of degree k over Q is still consistent with every pattern seen.
    std::vector<bool> possible(static_cast<std::size_t>(d + 1), true);
    for (long long p = 2; p <= max_prime; ++p) {
        bool prime = true;
        for (long long q = 2; q * q <= p; ++q) prime = prime && p % q != 0;
        if (!prime) continue;
        ModPoly f;
        for (const auto& z : monic) {
            Integer r;
            mpz_fdiv_r_ui(r.get_mpz_t(), z.get_mpz_t(), static_cast<unsigned long>(p));
            f.push_back(r.get_si());
        }
        mp_trim(f);
        ModPoly df;
        for (std::size_t i = 1; i < f.size(); ++i) df.push_back(static_cast<long long>(i) % p * f[i] % p);
        mp_trim(df);
        if (df.empty() || mp_gcd(f, df, p).size() != 1) continue;  // p divides the discriminant
        std::vector<bool> sums(static_cast<std::size_t>(d + 1), false);
        sums[0] = true;
        for (int deg : factor_degrees(f, p)) {
            for (int s = d; s >= deg; --s) sums[static_cast<std::size_t>(s)] = sums[static_cast<std::size_t>(s)] || sums[static_cast<std::size_t>(s - deg)];
        }
        bool any = false;
        for (int k = 1; k < d; ++k) {
            possible[static_cast<std::size_t>(k)] = possible[static_cast<std::size_t>(k)] && sums[static_cast<std::size_t>(k)];
            any = any || possible[static_cast<std::size_t>(k)];
        }
        if (!any) return Irreducibility::Proven;
    }
    return Irreducibility::Unknown;
}

}  // namespace mfs
