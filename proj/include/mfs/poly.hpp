#pragma once

#include <complex>
#include <vector>

#include "mfs/rational.hpp"

namespace mfs {

// Dense univariate polynomial over Q, constant term first. The zero polynomial
// is the empty vector; otherwise the leading coefficient is nonzero.
class QPoly {
public:
    QPoly() = default;
    explicit QPoly(std::vector<Rational> coeffs);
    static QPoly constant(const Rational& c);
    static QPoly monomial(const Rational& c, int degree);

    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    const std::vector<Rational>& coeffs() const { return c_; }
    Rational coeff(int i) const;
    const Rational& leading() const { return c_.back(); }

    QPoly operator+(const QPoly& o) const;
    QPoly operator-(const QPoly& o) const;
    QPoly operator*(const QPoly& o) const;
    QPoly operator-() const;
    QPoly scaled(const Rational& s) const;
    bool operator==(const QPoly& o) const { return c_ == o.c_; }

    QPoly derivative() const;
    QPoly monic() const;
    Rational evaluate(const Rational& x) const;
    std::complex<double> evaluate(std::complex<double> x) const;

    // Euclidean division: *this = q * divisor + r with deg r < deg divisor.
    void divmod(const QPoly& divisor, QPoly& quotient, QPoly& remainder) const;
    QPoly operator%(const QPoly& divisor) const;

private:
    void trim();
    std::vector<Rational> c_;
};

// Monic gcd (zero if both inputs are zero).
QPoly gcd(QPoly a, QPoly b);

bool is_squarefree(const QPoly& p);

// Number of distinct real roots of p in the half-open interval (lo, hi],
// counted with a Sturm sequence. p must be nonzero.
int count_real_roots(const QPoly& p, const Rational& lo, const Rational& hi);

bool is_self_reciprocal(const QPoly& p);

// For a self-reciprocal p of even degree 2k, the degree-k polynomial R with
// x^{-k} p(x) = R(x + 1/x). Roots of p on the unit circle correspond to real
// roots of R in [-2, 2].
QPoly reciprocal_trace_polynomial(const QPoly& p);

using QMatrix = std::vector<std::vector<Rational>>;

// Characteristic polynomial det(xI - A) (monic) by Faddeev-LeVerrier.
QPoly characteristic_polynomial(const QMatrix& a);

}  // namespace mfs

namespace mfs {

enum class Irreducibility { Proven, Reducible, Unknown };

// Monic integer polynomial, constant term first. Proven when the factor degree
// patterns modulo small primes leave no room for a proper factor; Reducible
// when an integer root is found; Unknown otherwise (e.g. x^4 + 1).
Irreducibility irreducibility_check(const std::vector<Integer>& monic, int max_prime = 500);

}  // namespace mfs
