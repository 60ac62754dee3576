#pragma once

#include <random>
#include <vector>

#include "mfs/number_field.hpp"

// Hand-rolled generators for the property tests.
namespace gen {

using mfs::AlgebraicNumber;
using mfs::FieldPtr;
using mfs::Integer;
using mfs::Rational;

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}

    long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(eng); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
    bool coin() { return integer(0, 1) == 1; }

    // num/den with |num| <= height, 1 <= den <= height.
    Rational rational(long height) {
        Rational q(Integer(integer(-height, height)), Integer(integer(1, height)));
        q.canonicalize();
        return q;
    }

    AlgebraicNumber element(const FieldPtr& f, long height) {
        std::vector<Rational> c;
        for (int i = 0; i < f->degree(); ++i) c.push_back(rational(height));
        return AlgebraicNumber(f, c);
    }

    AlgebraicNumber nonzero_element(const FieldPtr& f, long height) {
        for (;;) {
            auto a = element(f, height);
            if (!a.is_zero()) return a;
        }
    }

    std::vector<double> probability(std::size_t l, double floor = 0.02) {
        std::vector<double> p(l);
        double s = 0;
        for (auto& x : p) s += (x = floor + real(0, 1));
        for (auto& x : p) x /= s;
        return p;
    }
};

}  // namespace gen
