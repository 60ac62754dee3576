#include "mfs/number_field.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfs/errors.hpp"

namespace mfs {

namespace {

using cld = std::complex<long double>;

cld eval_ld(const std::vector<Integer>& c, cld x, cld* deriv) {
    cld p = 0, dp = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        dp = dp * x + p;
        p = p * x + static_cast<long double>(it->get_d());
    }
    if (deriv) *deriv = dp;
    return p;
}

long double eval_scale(const std::vector<Integer>& c, long double r) {
    long double s = 0, pw = 1;
    for (const auto& ci : c) {
        s += std::fabs(static_cast<long double>(ci.get_d())) * pw;
        pw *= r;
    }
    return s;
}

std::vector<std::complex<double>> polynomial_roots(const std::vector<Integer>& c) {
    const int deg = static_cast<int>(c.size()) - 1;
    if (deg == 1) return {std::complex<double>(-c[0].get_d(), 0.0)};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -c[static_cast<std::size_t>(i)].get_d();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue solve failed");
    std::vector<std::complex<double>> roots;
    for (int i = 0; i < deg; ++i) {
        cld z(solver.eigenvalues()[i].real(), solver.eigenvalues()[i].imag());
        for (int it = 0; it < 60; ++it) {
            cld d;
            cld p = eval_ld(c, z, &d);
            if (std::abs(d) == 0) break;
            cld step = p / d;
            z -= step;
            if (std::abs(step) <= 1e-19L * (1 + std::abs(z))) break;
        }
        // Conjugate pairs of a real polynomial: snap tiny imaginary parts.
        double re = static_cast<double>(z.real());
        double im = static_cast<double>(z.imag());
        if (std::fabs(im) < 1e-14 * (1 + std::fabs(re))) im = 0.0;
        roots.emplace_back(re, im);
    }
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return roots;
}

void append_mpz(std::string& out, const mpz_t z) {
    const int s = mpz_sgn(z);
    out.push_back(static_cast<char>(s + 1));
    const std::size_t n = mpz_size(z);
    out.append(reinterpret_cast<const char*>(&n), sizeof n);
    for (std::size_t i = 0; i < n; ++i) {
        mp_limb_t limb = mpz_getlimbn(z, static_cast<mp_size_t>(i));
        out.append(reinterpret_cast<const char*>(&limb), sizeof limb);
    }
}

}  // namespace

std::shared_ptr<const NumberField> NumberField::create(const std::vector<Integer>& minimal_polynomial,
                                                       int root_index, const Integer& denominator_bound) {
    if (minimal_polynomial.size() < 2) throw ParseError("minimal polynomial must have degree >= 1");
    if (minimal_polynomial.back() != 1) throw ParseError("minimal polynomial must be monic");
    if (denominator_bound <= 0) throw ParseError("denominator bound M must be a positive integer");
    std::shared_ptr<NumberField> f(new NumberField());
    f->minpoly_int_ = minimal_polynomial;
    std::vector<Rational> qc;
    for (const auto& z : minimal_polynomial) qc.emplace_back(z);
    f->minpoly_ = QPoly(qc);
    f->degree_ = f->minpoly_.degree();
    f->denominator_bound_ = denominator_bound;
    if (!is_squarefree(f->minpoly_))
        throw ParseError("minimal polynomial is not squarefree, hence not irreducible");
    switch (irreducibility_check(minimal_polynomial)) {
        case Irreducibility::Reducible:
            throw ParseError("minimal polynomial has an integer root, hence is reducible");
        case Irreducibility::Unknown:
            f->warnings_.push_back("irreducibility of the minimal polynomial could not be certified modulo small primes");
            break;
        case Irreducibility::Proven:
            break;
    }

    auto roots = polynomial_roots(minimal_polynomial);
    if (root_index < 0 || root_index >= static_cast<int>(roots.size()))
        throw ParseError("root_index out of range for a degree " + std::to_string(f->degree_) + " field");
    f->root_index_ = root_index;
    std::rotate(roots.begin(), roots.begin() + root_index, roots.begin() + root_index + 1);
    f->conjugates_ = roots;
    for (const auto& z : roots) {
        cld zz(z.real(), z.imag());
        long double scale = eval_scale(minimal_polynomial, std::abs(zz));
        double res = static_cast<double>(std::abs(eval_ld(minimal_polynomial, zz, nullptr)) / std::max(1.0L, scale));
        f->max_residual_ = std::max(f->max_residual_, res);
    }
    if (f->max_residual_ > 1e-12)
        throw NumericalError("conjugate refinement residual " + std::to_string(f->max_residual_) + " above 1e-12");
    f->distinguished_real_ = roots.front().imag() == 0.0;

    // x^k mod minpoly for k in [deg, 2deg-2].
    const int d = f->degree_;
    std::vector<Rational> cur(static_cast<std::size_t>(d));
    if (d >= 1) {
        // x^deg = -sum_{i<deg} c_i x^i
        for (int i = 0; i < d; ++i) cur[static_cast<std::size_t>(i)] = -qc[static_cast<std::size_t>(i)];
        for (int k = d; k <= 2 * d - 2; ++k) {
            f->reduction_.push_back(cur);
            // multiply by x
            std::vector<Rational> next(static_cast<std::size_t>(d));
            Rational top = cur[static_cast<std::size_t>(d - 1)];
            for (int i = d - 1; i >= 1; --i) next[static_cast<std::size_t>(i)] = cur[static_cast<std::size_t>(i - 1)];
            next[0] = 0;
            for (int i = 0; i < d; ++i) next[static_cast<std::size_t>(i)] -= top * qc[static_cast<std::size_t>(i)];
            cur = std::move(next);
        }
    }

    if (f->distinguished_real_) {
        mpf_class x(roots.front().real(), kHighPrecisionBits);
        for (int it = 0; it < 12; ++it) {
            mpf_class p(0, kHighPrecisionBits), dp(0, kHighPrecisionBits);
            for (auto c = minimal_polynomial.rbegin(); c != minimal_polynomial.rend(); ++c) {
                dp = dp * x + p;
                p = p * x + mpf_class(*c, kHighPrecisionBits);
            }
            if (dp == 0) break;
            x -= p / dp;
        }
        f->lambda_hp_ = x;
    }
    return f;
}

std::shared_ptr<const NumberField> NumberField::rationals() {
    static const auto q = create({Integer(-1), Integer(1)}, 0, 1);
    return q;
}

bool NumberField::same_as(const NumberField& o) const {
    return this == &o || (minpoly_int_ == o.minpoly_int_ && root_index_ == o.root_index_);
}

// ---------------------------------------------------------------------------

AlgebraicNumber::AlgebraicNumber(FieldPtr field, std::vector<Rational> coeffs)
    : field_(std::move(field)), c_(std::move(coeffs)) {
    for (auto& q : c_) {
        if (q.get_den() == 0) throw DomainError("zero denominator");
        q.canonicalize();
    }
    const auto d = static_cast<std::size_t>(field_->degree());
    if (c_.size() > d) {
        // Reduce modulo the minimal polynomial.
        QPoly r = QPoly(c_) % field_->minimal_polynomial();
        c_ = r.coeffs();
    }
    c_.resize(d);
}

AlgebraicNumber AlgebraicNumber::zero(const FieldPtr& f) { return AlgebraicNumber(f, {}); }

AlgebraicNumber AlgebraicNumber::one(const FieldPtr& f) { return from_rational(f, 1); }

AlgebraicNumber AlgebraicNumber::generator(const FieldPtr& f) {
    return AlgebraicNumber(f, {Rational(0), Rational(1)});
}

AlgebraicNumber AlgebraicNumber::from_rational(const FieldPtr& f, const Rational& q) {
    return AlgebraicNumber(f, {q});
}

bool AlgebraicNumber::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Rational& x) { return x == 0; });
}

void AlgebraicNumber::require_same_field(const AlgebraicNumber& o) const {
    if (!field_ || !o.field_ || !field_->same_as(*o.field_))
        throw FieldMismatch("operands belong to different number fields");
}

AlgebraicNumber AlgebraicNumber::operator+(const AlgebraicNumber& o) const {
    require_same_field(o);
    AlgebraicNumber r(*this);
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
    return r;
}

AlgebraicNumber AlgebraicNumber::operator-(const AlgebraicNumber& o) const {
    require_same_field(o);
    AlgebraicNumber r(*this);
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] -= o.c_[i];
    return r;
}

AlgebraicNumber AlgebraicNumber::operator-() const {
    AlgebraicNumber r(*this);
    for (auto& x : r.c_) x = -x;
    return r;
}

AlgebraicNumber AlgebraicNumber::scaled(const Rational& s) const {
    AlgebraicNumber r(*this);
    for (auto& x : r.c_) x *= s;
    return r;
}

AlgebraicNumber AlgebraicNumber::operator*(const AlgebraicNumber& o) const {
    require_same_field(o);
    const int d = field_->degree();
    std::vector<Rational> prod(static_cast<std::size_t>(2 * d - 1));
    for (int i = 0; i < d; ++i) {
        if (c_[static_cast<std::size_t>(i)] == 0) continue;
        for (int j = 0; j < d; ++j)
            prod[static_cast<std::size_t>(i + j)] += c_[static_cast<std::size_t>(i)] * o.c_[static_cast<std::size_t>(j)];
    }
    const auto& table = field_->reduction_table();
    std::vector<Rational> out(prod.begin(), prod.begin() + d);
    for (int k = d; k <= 2 * d - 2; ++k) {
        const Rational& t = prod[static_cast<std::size_t>(k)];
        if (t == 0) continue;
        const auto& row = table[static_cast<std::size_t>(k - d)];
        for (int i = 0; i < d; ++i) out[static_cast<std::size_t>(i)] += t * row[static_cast<std::size_t>(i)];
    }
    AlgebraicNumber r;
    r.field_ = field_;
    r.c_ = std::move(out);
    return r;
}

AlgebraicNumber AlgebraicNumber::pow(unsigned n) const {
    AlgebraicNumber result = one(field_);
    AlgebraicNumber base = *this;
    while (n) {
        if (n & 1u) result = result * base;
        base = base * base;
        n >>= 1u;
    }
    return result;
}

AlgebraicNumber AlgebraicNumber::inverse() const {
    if (is_zero()) throw DomainError("inverse of zero");
    // Extended Euclid: s*a + t*m = g, g a nonzero constant since m is irreducible.
    QPoly a(c_), m = field_->minimal_polynomial();
    QPoly r0 = m, r1 = a, s0, s1 = QPoly::constant(1);
    while (!r1.is_zero()) {
        QPoly q, r;
        r0.divmod(r1, q, r);
        QPoly s = s0 - q * s1;
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s);
    }
    if (r0.degree() != 0)
        throw DomainError("element is a zero divisor; the minimal polynomial is reducible");
    QPoly inv = s0.scaled(Rational(1) / r0.leading());
    return AlgebraicNumber(field_, inv.coeffs());
}

bool AlgebraicNumber::operator==(const AlgebraicNumber& o) const {
    require_same_field(o);
    return c_ == o.c_;
}

std::complex<double> AlgebraicNumber::embed(int j) const {
    const auto& z = field_->conjugates()[static_cast<std::size_t>(j)];
    std::complex<long double> x(z.real(), z.imag()), acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + static_cast<long double>(it->get_d());
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

std::vector<std::complex<double>> AlgebraicNumber::embed_all() const {
    std::vector<std::complex<double>> v;
    v.reserve(static_cast<std::size_t>(field_->degree()));
    for (int j = 0; j < field_->degree(); ++j) v.push_back(embed(j));
    return v;
}

double AlgebraicNumber::real_value() const {
    if (!field_->distinguished_is_real()) throw DomainError("distinguished embedding is not real");
    return embed(0).real();
}

int AlgebraicNumber::sign() const {
    if (!field_->distinguished_is_real()) throw DomainError("sign needs a real distinguished embedding");
    if (is_zero()) return 0;
    const long double x = field_->distinguished().real();
    long double acc = 0, scale = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        long double ci = static_cast<long double>(it->get_d());
        acc = acc * x + ci;
        scale = scale * std::fabs(x) + std::fabs(ci);
    }
    if (std::fabs(acc) > 1e-12L * (scale + 1e-300L)) return acc > 0 ? 1 : -1;
    // Close call: re-evaluate with the high precision root.
    const auto bits = NumberField::kHighPrecisionBits;
    mpf_class hx(field_->distinguished_high_precision(), bits), hacc(0, bits);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) hacc = hacc * hx + mpf_class(*it, bits);
    mpf_class bound(static_cast<double>(scale), bits);
    mpf_class eps(1, bits);
    mpf_div_2exp(eps.get_mpf_t(), eps.get_mpf_t(), bits - 64);
    bound = (bound + 1) * eps;
    if (abs(hacc) > bound) return sgn(hacc);
    throw NumericalError("cannot certify the sign of " + to_string());
}

QMatrix AlgebraicNumber::multiplication_matrix() const {
    const int d = field_->degree();
    QMatrix m(static_cast<std::size_t>(d), std::vector<Rational>(static_cast<std::size_t>(d)));
    AlgebraicNumber basis = one(field_);
    const AlgebraicNumber lam = d > 1 ? generator(field_) : one(field_);
    for (int k = 0; k < d; ++k) {
        AlgebraicNumber col = *this * basis;
        for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = col.c_[static_cast<std::size_t>(i)];
        basis = basis * lam;
    }
    return m;
}

QPoly AlgebraicNumber::characteristic_polynomial() const {
    return mfs::characteristic_polynomial(multiplication_matrix());
}

Rational AlgebraicNumber::norm() const {
    QPoly cp = characteristic_polynomial();
    Rational c0 = cp.coeff(0);
    return field_->degree() % 2 == 0 ? c0 : Rational(-c0);
}

bool AlgebraicNumber::is_algebraic_integer() const {
    QPoly cp = characteristic_polynomial();
    return std::all_of(cp.coeffs().begin(), cp.coeffs().end(),
                       [](const Rational& x) { return x.get_den() == 1; });
}

std::string AlgebraicNumber::canonical_key() const {
    std::string key;
    key.reserve(c_.size() * 24);
    for (const auto& q : c_) {
        append_mpz(key, q.get_num_mpz_t());
        append_mpz(key, q.get_den_mpz_t());
    }
    return key;
}

std::string AlgebraicNumber::to_string() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? ", " : "") << mfs::to_string(c_[i]);
    os << "]";
    return os.str();
}

int compare(const AlgebraicNumber& a, const AlgebraicNumber& b) { return (a - b).sign(); }

NormProductCheck norm_product(std::span<const std::complex<double>> values, double rel_tol) {
    NormProductCheck out;
    std::complex<double> p = 1.0;
    for (const auto& v : values) p *= v;
    out.product = p;
    const double mag = std::abs(p);
    const double tol = rel_tol * (1.0 + mag);
    const double nearest = std::round(p.real());
    if (std::fabs(p.imag()) > tol || std::fabs(p.real() - nearest) > tol)
        throw NumericalError("conjugate product " + std::to_string(p.real()) + "+" + std::to_string(p.imag()) +
                             "i is not within tolerance of an integer");
    out.nearest = Integer(nearest);
    out.is_zero = out.nearest == 0;
    return out;
}

}  // namespace mfs
