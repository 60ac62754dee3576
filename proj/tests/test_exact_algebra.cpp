#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "gen.hpp"
#include "mfs/errors.hpp"
#include "mfs/number_field.hpp"
#include "mfs/poly.hpp"

using namespace mfs;

namespace {

FieldPtr golden() { return NumberField::create({-1, -1, 1}); }
FieldPtr sqrt2() { return NumberField::create({-2, 0, 1}); }
FieldPtr salem() { return NumberField::create({1, -1, -1, -1, 1}); }
FieldPtr cubic() { return NumberField::create({-1, -1, 0, 1}); }

AlgebraicNumber el(const FieldPtr& f, std::vector<Rational> c) { return AlgebraicNumber(f, std::move(c)); }

// Reference product: plain polynomial multiplication followed by Euclidean
// remainder modulo the minimal polynomial.
AlgebraicNumber reference_mul(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    const QPoly p = QPoly(a.coeffs()) * QPoly(b.coeffs());
    const QPoly r = p % a.field()->minimal_polynomial();
    std::vector<Rational> c(static_cast<std::size_t>(a.field()->degree()), Rational(0));
    for (int i = 0; i <= r.degree(); ++i) c[static_cast<std::size_t>(i)] = r.coeff(i);
    return AlgebraicNumber(a.field(), c);
}

}  // namespace

TEST(ExactAlgebra, AdditionExamples) {
    auto f = golden();
    auto x = AlgebraicNumber::generator(f);
    EXPECT_EQ(AlgebraicNumber::zero(f) + x, x);
    EXPECT_EQ(x + x * x, el(f, {1, 2}));
    auto g = sqrt2();
    auto y = AlgebraicNumber::generator(g);
    EXPECT_EQ((AlgebraicNumber::one(g) + y) + (AlgebraicNumber::one(g) - y), AlgebraicNumber::from_rational(g, 2));
}

TEST(ExactAlgebra, MultiplicationExamples) {
    auto f = golden();
    auto x = AlgebraicNumber::generator(f);
    EXPECT_EQ(x * AlgebraicNumber::one(f), x);
    EXPECT_EQ(x * x, el(f, {1, 1}));
    auto g = sqrt2();
    auto y = AlgebraicNumber::generator(g);
    EXPECT_EQ(y * y, AlgebraicNumber::from_rational(g, 2));
}

TEST(ExactAlgebra, InverseExamples) {
    auto f = golden();
    EXPECT_EQ(AlgebraicNumber::one(f).inverse(), AlgebraicNumber::one(f));
    EXPECT_EQ(AlgebraicNumber::generator(f).inverse(), el(f, {-1, 1}));
    auto g = sqrt2();
    EXPECT_EQ(AlgebraicNumber::generator(g).inverse(), el(g, {0, Rational(1, 2)}));
    EXPECT_THROW(AlgebraicNumber::zero(f).inverse(), DomainError);
}

TEST(ExactAlgebra, NormProductExamples) {
    std::vector<std::complex<double>> zeros(3, 0.0);
    auto z = norm_product(zeros);
    EXPECT_TRUE(z.is_zero);
    EXPECT_EQ(z.nearest, 0);

    auto g = sqrt2();
    auto a = AlgebraicNumber::one(g) + AlgebraicNumber::generator(g);
    auto e = a.embed_all();
    auto r = norm_product(e);
    EXPECT_EQ(r.nearest, -1);
    EXPECT_EQ(a.norm(), -1);

    auto f = golden();
    auto l = AlgebraicNumber::generator(f);
    EXPECT_EQ(norm_product(l.embed_all()).nearest, -1);
    EXPECT_EQ(l.norm(), -1);

    std::vector<std::complex<double>> bad{0.5, 1.0};
    EXPECT_THROW(norm_product(bad), NumericalError);
}

TEST(ExactAlgebra, ConjugatesAndResiduals) {
    auto f = golden();
    ASSERT_EQ(f->conjugates().size(), 2u);
    EXPECT_NEAR(f->conjugates()[0].real(), (1 + std::sqrt(5.0)) / 2, 1e-14);
    EXPECT_NEAR(f->conjugates()[1].real(), (1 - std::sqrt(5.0)) / 2, 1e-14);
    EXPECT_LE(f->max_root_residual(), 1e-12);

    auto s = salem();
    int unit = 0;
    for (const auto& z : s->conjugates()) {
        EXPECT_LE(std::abs((((z - 1.0) * z - 1.0) * z - 1.0) * z + 1.0), 1e-9);
        if (std::fabs(std::abs(z) - 1) < 1e-9) ++unit;
    }
    EXPECT_EQ(unit, 2);
    EXPECT_NEAR(s->distinguished().real(), 1.7220838057390422, 1e-12);

    auto second = NumberField::create({-1, -1, 1}, 1);
    EXPECT_NEAR(second->distinguished().real(), (1 - std::sqrt(5.0)) / 2, 1e-14);
    EXPECT_THROW(NumberField::create({-1, -1, 1}, 2), ParseError);
}

TEST(ExactAlgebra, InvalidFields) {
    EXPECT_THROW(NumberField::create({1, 2, 1}), ParseError);       // (x+1)^2
    EXPECT_THROW(NumberField::create({0, -1, 0, 1}), ParseError);   // x^3 - x
    EXPECT_THROW(NumberField::create({1, 2}), ParseError);          // not monic
    EXPECT_THROW(NumberField::create({-2, 1}, 0, 0), ParseError);   // M = 0
    auto f = NumberField::create({1, 0, 0, 0, 1});                  // x^4 + 1, not certified
    EXPECT_FALSE(f->warnings().empty());
    EXPECT_TRUE(golden()->warnings().empty());
}

TEST(ExactAlgebra, IrreducibilityCheck) {
    EXPECT_EQ(irreducibility_check({-1, -1, 1}), Irreducibility::Proven);
    EXPECT_EQ(irreducibility_check({1, -1, -1, -1, 1}), Irreducibility::Proven);
    EXPECT_EQ(irreducibility_check({2, 0, 0, 0, 1}), Irreducibility::Proven);
    EXPECT_EQ(irreducibility_check({-1, -1, 0, 1}), Irreducibility::Proven);
    EXPECT_EQ(irreducibility_check({-6, 1, 1}), Irreducibility::Reducible);  // (x+3)(x-2)
    EXPECT_EQ(irreducibility_check({1, 0, 0, 0, 1}), Irreducibility::Unknown);
    EXPECT_EQ(irreducibility_check({1, 0, 1, 0, 1}), Irreducibility::Unknown);  // (x^2+x+1)(x^2-x+1)
}

TEST(ExactAlgebra, FieldMismatch) {
    auto a = AlgebraicNumber::generator(golden());
    auto b = AlgebraicNumber::generator(sqrt2());
    EXPECT_THROW(a + b, FieldMismatch);
    EXPECT_THROW(a * b, FieldMismatch);
}

TEST(ExactAlgebraProperty, RingAxiomsExact) {
    gen::Rng rng(1);
    for (const auto& f : {golden(), sqrt2(), salem(), cubic()}) {
        for (int it = 0; it < 200; ++it) {
            auto a = rng.element(f, 50), b = rng.element(f, 50), c = rng.element(f, 50);
            EXPECT_EQ((a * b) * c, a * (b * c));
            EXPECT_EQ(a * (b + c), a * b + a * c);
            EXPECT_EQ(a + b, b + a);
            EXPECT_EQ(a * b, b * a);
            EXPECT_EQ(a - a, AlgebraicNumber::zero(f));
        }
    }
}

TEST(ExactAlgebraProperty, ProductMatchesEuclideanRemainder) {
    gen::Rng rng(2);
    for (const auto& f : {golden(), sqrt2(), salem(), cubic()}) {
        for (int it = 0; it < 200; ++it) {
            auto a = rng.element(f, 1000), b = rng.element(f, 1000);
            EXPECT_EQ(a * b, reference_mul(a, b));
        }
    }
}

TEST(ExactAlgebraProperty, InverseAndCanonicalKeys) {
    gen::Rng rng(3);
    for (const auto& f : {golden(), sqrt2(), salem(), cubic()}) {
        for (int it = 0; it < 100; ++it) {
            auto a = rng.nonzero_element(f, 100), b = rng.element(f, 100), c = rng.element(f, 100);
            EXPECT_EQ(a * a.inverse(), AlgebraicNumber::one(f));
            EXPECT_EQ(((b + c) * a).canonical_key(), (a * c + b * a).canonical_key());
            EXPECT_EQ((a * b * a.inverse()).canonical_key(), b.canonical_key());
            if (b != c) EXPECT_NE(b.canonical_key(), c.canonical_key());
        }
    }
}

TEST(ExactAlgebraProperty, EmbeddingIsHomomorphism) {
    gen::Rng rng(4);
    for (const auto& f : {golden(), sqrt2(), salem(), cubic()}) {
        for (int it = 0; it < 200; ++it) {
            auto a = rng.element(f, 1000), b = rng.element(f, 1000);
            for (int j = 0; j < f->degree(); ++j) {
                const auto ea = a.embed(j), eb = b.embed(j);
                const double mag = 1 + std::abs(ea) + std::abs(eb);
                EXPECT_LT(std::abs((a + b).embed(j) - (ea + eb)), 1e-9 * mag);
                EXPECT_LT(std::abs((a * b).embed(j) - ea * eb), 1e-9 * mag * mag);
            }
        }
    }
}

TEST(ExactAlgebraProperty, NormEqualsProductOfEmbeddings) {
    gen::Rng rng(5);
    for (const auto& f : {golden(), sqrt2(), salem(), cubic()}) {
        for (int it = 0; it < 100; ++it) {
            auto a = rng.element(f, 20);
            std::complex<double> p = 1;
            for (const auto& z : a.embed_all()) p *= z;
            const double n = a.norm().get_d();
            EXPECT_NEAR(p.real(), n, 1e-8 * (1 + std::fabs(n)));
            EXPECT_NEAR(p.imag(), 0, 1e-8 * (1 + std::fabs(n)));
        }
    }
}

TEST(ExactAlgebra, SignDecidesNearCancellation) {
    // F_n lambda - F_{n+1} = -psi^n with psi = (1 - sqrt 5)/2, so its sign is (-1)^(n+1).
    auto f = golden();
    auto l = AlgebraicNumber::generator(f);
    Integer a = 0, b = 1;  // F_0, F_1
    for (int n = 1; n <= 90; ++n) {
        Integer c = a + b;
        a = b;
        b = c;  // a = F_n, b = F_{n+1}
        auto x = l.scaled(Rational(a)) - AlgebraicNumber::from_rational(f, Rational(b));
        EXPECT_EQ(x.sign(), n % 2 == 1 ? 1 : -1) << "n = " << n;
    }
    EXPECT_EQ(AlgebraicNumber::zero(f).sign(), 0);
}

TEST(ExactAlgebra, AlgebraicIntegers) {
    auto f = golden();
    EXPECT_TRUE(AlgebraicNumber::generator(f).is_algebraic_integer());
    EXPECT_FALSE(el(f, {Rational(1, 2), 0}).is_algebraic_integer());
    // (1 + sqrt 5)/2 is integral in Q(sqrt 5) even with half coefficients.
    auto g = NumberField::create({-5, 0, 1});
    EXPECT_TRUE(el(g, {Rational(1, 2), Rational(1, 2)}).is_algebraic_integer());
}

TEST(Poly, SturmCountsMatchNumericRoots) {
    gen::Rng rng(6);
    for (int it = 0; it < 50; ++it) {
        // Product of distinct linear factors with known integer roots.
        std::vector<long> roots;
        QPoly p = QPoly::constant(1);
        const int k = static_cast<int>(rng.integer(1, 5));
        while (static_cast<int>(roots.size()) < k) {
            long r = rng.integer(-6, 6);
            if (std::find(roots.begin(), roots.end(), r) != roots.end()) continue;
            roots.push_back(r);
            p = p * QPoly({Rational(-r), Rational(1)});
        }
        const long lo = rng.integer(-7, 0), hi = rng.integer(0, 7);
        int expected = 0;
        for (long r : roots) expected += (r > lo && r <= hi) ? 1 : 0;
        EXPECT_EQ(count_real_roots(p, Rational(lo), Rational(hi)), expected);
    }
}

TEST(Poly, ReciprocalTracePolynomial) {
    const QPoly salem_p({1, -1, -1, -1, 1});
    ASSERT_TRUE(is_self_reciprocal(salem_p));
    const QPoly r = reciprocal_trace_polynomial(salem_p);
    EXPECT_EQ(r.degree(), 2);
    EXPECT_EQ(count_real_roots(r, Rational(-2), Rational(2)), 1);
    EXPECT_FALSE(is_self_reciprocal(QPoly({-1, -1, 1})));
}

TEST(Rational, Parsing) {
    EXPECT_EQ(parse_rational("3"), 3);
    EXPECT_EQ(parse_rational("-7/12"), Rational(-7, 12));
    EXPECT_EQ(parse_rational("0.125"), Rational(1, 8));
    EXPECT_EQ(parse_rational("2.5E+2"), 250);
    EXPECT_EQ(parse_rational("1e-3"), Rational(1, 1000));
    EXPECT_EQ(rational_from_double(0.1), Rational(1, 10));
    EXPECT_THROW(parse_rational("1/0"), ParseError);
    EXPECT_THROW(parse_rational("abc"), ParseError);
    EXPECT_EQ(floor_plus_one(Rational(4, 3)), 2);
    EXPECT_EQ(floor_plus_one(Rational(2)), 3);
}
