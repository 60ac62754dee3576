#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mfs/poly.hpp"
#include "mfs/rational.hpp"

namespace mfs {

class AlgebraicNumber;

// Q(lambda) for an algebraic integer lambda with monic integer minimal
// polynomial. Immutable after construction; share through shared_ptr.
//
// Conjugates are the numeric roots of the minimal polynomial. They are sorted
// by (real part desc, imaginary part desc); `root_index` picks the distinguished
// embedding from that order, which is then moved to position 0. The remaining
// roots keep their sorted order.
class NumberField {
public:
    static std::shared_ptr<const NumberField> create(const std::vector<Integer>& minimal_polynomial,
                                                     int root_index = 0,
                                                     const Integer& denominator_bound = 1);
    // The field Q itself (minimal polynomial x - 1).
    static std::shared_ptr<const NumberField> rationals();

    int degree() const { return degree_; }
    const QPoly& minimal_polynomial() const { return minpoly_; }
    const std::vector<Integer>& minimal_polynomial_integers() const { return minpoly_int_; }
    const std::vector<std::complex<double>>& conjugates() const { return conjugates_; }
    const std::complex<double>& distinguished() const { return conjugates_.front(); }
    bool distinguished_is_real() const { return distinguished_real_; }
    int root_index() const { return root_index_; }
    const Integer& denominator_bound() const { return denominator_bound_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    double max_root_residual() const { return max_residual_; }

    bool same_as(const NumberField& o) const;

    // x^k mod minpoly for deg <= k <= 2 deg - 2, as coefficient vectors.
    const std::vector<std::vector<Rational>>& reduction_table() const { return reduction_; }

    // Distinguished real root to high precision (only when it is real).
    const mpf_class& distinguished_high_precision() const { return lambda_hp_; }

    static constexpr unsigned long kHighPrecisionBits = 384;

private:
    NumberField() = default;

    int degree_ = 0;
    int root_index_ = 0;
    QPoly minpoly_;
    std::vector<Integer> minpoly_int_;
    std::vector<std::complex<double>> conjugates_;
    bool distinguished_real_ = false;
    Integer denominator_bound_ = 1;
    std::vector<std::vector<Rational>> reduction_;
    mpf_class lambda_hp_{0, kHighPrecisionBits};
    std::vector<std::string> warnings_;
    double max_residual_ = 0;
};

using FieldPtr = std::shared_ptr<const NumberField>;

// Element of Q(lambda) stored as its reduced coefficient vector in the power
// basis 1, lambda, ..., lambda^{deg-1}. Equal elements have identical vectors.
class AlgebraicNumber {
public:
    AlgebraicNumber() = default;
    AlgebraicNumber(FieldPtr field, std::vector<Rational> coeffs);

    static AlgebraicNumber zero(const FieldPtr& f);
    static AlgebraicNumber one(const FieldPtr& f);
    static AlgebraicNumber generator(const FieldPtr& f);
    static AlgebraicNumber from_rational(const FieldPtr& f, const Rational& q);

    const FieldPtr& field() const { return field_; }
    const std::vector<Rational>& coeffs() const { return c_; }
    bool is_zero() const;

    AlgebraicNumber operator+(const AlgebraicNumber& o) const;
    AlgebraicNumber operator-(const AlgebraicNumber& o) const;
    AlgebraicNumber operator*(const AlgebraicNumber& o) const;
    AlgebraicNumber operator-() const;
    AlgebraicNumber scaled(const Rational& s) const;
    AlgebraicNumber pow(unsigned n) const;
    // Throws DomainError on zero input.
    AlgebraicNumber inverse() const;
    bool operator==(const AlgebraicNumber& o) const;
    bool operator!=(const AlgebraicNumber& o) const { return !(*this == o); }

    // Value at conjugate j (0 = distinguished).
    std::complex<double> embed(int j) const;
    std::vector<std::complex<double>> embed_all() const;
    // Real value at the distinguished (real) embedding.
    double real_value() const;
    // Exact sign at the distinguished real embedding (0 iff the element is 0).
    int sign() const;

    // Matrix of multiplication by this element in the power basis.
    QMatrix multiplication_matrix() const;
    QPoly characteristic_polynomial() const;
    // Exact field norm (product over all conjugates).
    Rational norm() const;
    bool is_algebraic_integer() const;

    // Fixed binary serialization of the coefficient limbs; equal iff elements equal.
    std::string canonical_key() const;
    std::string to_string() const;

private:
    void require_same_field(const AlgebraicNumber& o) const;
    FieldPtr field_;
    std::vector<Rational> c_;
};

// Three-way comparison at the distinguished real embedding; exact.
int compare(const AlgebraicNumber& a, const AlgebraicNumber& b);

struct NormProductCheck {
    std::complex<double> product;
    Integer nearest;
    bool is_zero = false;
};

// Numeric product of per-conjugate values, asserted to lie within
// rel_tol * (1 + |product|) of an integer. Throws NumericalError otherwise.
NormProductCheck norm_product(std::span<const std::complex<double>> values, double rel_tol = 1e-6);

}  // namespace mfs
