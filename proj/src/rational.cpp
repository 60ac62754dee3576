#include "mfs/rational.hpp"

#include <charconv>
#include <cctype>
#include <system_error>

#include "mfs/errors.hpp"

namespace mfs {

namespace {

Integer pow10(unsigned long e) {
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
        negative = s[pos] == '-';
        ++pos;
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    bool any_digit = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            any_digit = true;
            if (seen_point) ++frac_digits;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) throw ParseError("not a number: '" + std::string(whole) + "'");
    long exponent = 0;
    if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
        ++pos;
        auto tail = s.substr(pos);
        if (!tail.empty() && tail.front() == '+') tail.remove_prefix(1);
        auto [end, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), exponent);
        if (ec != std::errc() || end != tail.data() + tail.size() || tail.empty())
            throw ParseError("bad exponent in '" + std::string(whole) + "'");
        pos = s.size();
    }
    if (pos != s.size()) throw ParseError("trailing characters in '" + std::string(whole) + "'");
    if (exponent > 4000 || exponent < -4000) throw ParseError("exponent out of range in '" + std::string(whole) + "'");

    Integer num(digits, 10);
    long shift = exponent - frac_digits;
    Rational r;
    if (shift >= 0) {
        r = Rational(num * pow10(static_cast<unsigned long>(shift)));
    } else {
        r = Rational(num, pow10(static_cast<unsigned long>(-shift)));
        r.canonicalize();
    }
    return negative ? Rational(-r) : r;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    auto s = trim(text);
    if (s.empty()) throw ParseError("empty number");
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return parse_decimal(s, text);
    Rational num = parse_decimal(trim(s.substr(0, slash)), text);
    Rational den = parse_decimal(trim(s.substr(slash + 1)), text);
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    Rational r = num / den;
    r.canonicalize();
    return r;
}

Rational rational_from_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw ParseError("cannot format double");
    return parse_rational(std::string_view(buf, static_cast<std::size_t>(end - buf)));
}

std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Integer lcm(const Integer& a, const Integer& b) {
    Integer r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

Integer floor_plus_one(const Rational& q) {
    Integer f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return f + 1;
}

}  // namespace mfs
