#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include <boost/multiprecision/gmp.hpp>

#include "microlocal/error.hpp"

namespace microlocal {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

/// Parses "a", "-a" or "a/b" with integer a, b (b ≠ 0). Floating point
/// notation is rejected.
inline Rational parse_rational(std::string_view text)
{
    auto parse_int = [&](std::string_view s) -> Integer {
        std::size_t i = 0;
        if (!s.empty() && (s[0] == '-' || s[0] == '+'))
            ++i;
        if (i == s.size())
            throw InvalidInput("malformed rational '" + std::string(text) + "'");
        for (std::size_t k = i; k < s.size(); ++k)
            if (s[k] < '0' || s[k] > '9')
                throw InvalidInput("malformed rational '" + std::string(text) + "'");
        return Integer(std::string(s[0] == '+' ? s.substr(1) : s));
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return Rational(parse_int(text));
    Integer num = parse_int(text.substr(0, slash));
    std::string_view den_text = text.substr(slash + 1);
    if (!den_text.empty() && den_text[0] == '-')
        throw InvalidInput("malformed rational '" + std::string(text) + "'");
    Integer den = parse_int(den_text);
    if (den == 0)
        throw InvalidInput("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
}

/// Canonical text form "num/den" (reduced, positive denominator).
inline std::string to_string(const Rational& x)
{
    return numerator(x).str() + "/" + denominator(x).str();
}

namespace exactalg {

/// Coefficient ring: ℚ, 𝔽_p or ℤ. Every scalar is stored as a Rational in
/// canonical form for its ring (integers for ℤ, residues in [0, p) for 𝔽_p).
class Ring
{
public:
    enum class Kind { rationals, prime_field, integers };

    static Ring rationals() { return Ring(Kind::rationals, 0); }
    static Ring integers() { return Ring(Kind::integers, 0); }
    static Ring prime_field(std::int64_t p)
    {
        if (p < 2)
            throw InvalidInput("prime field characteristic must be ≥ 2");
        for (std::int64_t d = 2; d * d <= p; ++d)
            if (p % d == 0)
                throw InvalidInput("characteristic " + std::to_string(p) + " is not prime");
        return Ring(Kind::prime_field, p);
    }

    /// "q", "z" or "fp:<p>".
    static Ring parse(std::string_view name)
    {
        if (name == "q")
            return rationals();
        if (name == "z")
            return integers();
        if (name.substr(0, 3) == "fp:") {
            std::string digits(name.substr(3));
            if (digits.empty() || digits.size() > 9
                || digits.find_first_not_of("0123456789") != std::string::npos)
                throw InvalidInput("malformed ring '" + std::string(name) + "'");
            return prime_field(std::stoll(digits));
        }
        throw InvalidInput("unknown ring '" + std::string(name) + "'");
    }

    Kind kind() const { return kind_; }
    std::int64_t characteristic() const { return p_; }
    bool is_field() const { return kind_ != Kind::integers; }

    std::string name() const
    {
        switch (kind_) {
        case Kind::rationals: return "q";
        case Kind::integers: return "z";
        case Kind::prime_field: return "fp:" + std::to_string(p_);
        }
        return {};
    }

    /// Maps an arbitrary rational into this ring's canonical form, or throws
    /// when it has no image (non-integers in ℤ, denominators divisible by p).
    Rational reduce(const Rational& x) const
    {
        switch (kind_) {
        case Kind::rationals:
            return x;
        case Kind::integers:
            if (denominator(x) != 1)
                throw InvalidInput("non-integral scalar " + to_string(x) + " over z");
            return x;
        case Kind::prime_field: {
            Integer p(p_);
            Integer den = denominator(x) % p;
            if (den == 0)
                throw InvalidInput("denominator divisible by " + std::to_string(p_));
            Integer num = numerator(x) % p;
            if (num < 0)
                num += p;
            if (denominator(x) != 1)
                num = (num * inverse_mod(den)) % p;
            return Rational(num);
        }
        }
        return x;
    }

    Rational add(const Rational& a, const Rational& b) const { return wrap(a + b); }
    Rational sub(const Rational& a, const Rational& b) const { return wrap(a - b); }
    Rational mul(const Rational& a, const Rational& b) const { return wrap(a * b); }
    Rational neg(const Rational& a) const { return wrap(-a); }

    bool is_unit(const Rational& a) const
    {
        if (kind_ == Kind::integers)
            return a == 1 || a == -1;
        return a != 0;
    }

    Rational inverse(const Rational& a) const
    {
        if (!is_unit(a))
            throw PreconditionError("scalar " + to_string(a) + " is not a unit in " + name());
        if (kind_ == Kind::prime_field)
            return Rational(inverse_mod(numerator(a)));
        return 1 / a;
    }

    /// Euclidean division a = q·b + r with r "smaller" than b; over fields r = 0.
    std::pair<Rational, Rational> divmod(const Rational& a, const Rational& b) const
    {
        if (kind_ != Kind::integers) {
            Rational q = mul(a, inverse(b));
            return {q, Rational(0)};
        }
        Integer q = numerator(a) / numerator(b); // truncating
        Integer r = numerator(a) - q * numerator(b);
        return {Rational(q), Rational(r)};
    }

    /// Euclidean norm comparison used for pivot selection.
    bool norm_less(const Rational& a, const Rational& b) const
    {
        if (kind_ != Kind::integers)
            return false;
        return abs(numerator(a)) < abs(numerator(b));
    }

    /// Unit u such that u·a is the canonical associate (1 over fields, |a| over ℤ).
    Rational normalizing_unit(const Rational& a) const
    {
        if (kind_ != Kind::integers)
            return inverse(a);
        return a < 0 ? Rational(-1) : Rational(1);
    }

    /// True when a divides b.
    bool divides(const Rational& a, const Rational& b) const
    {
        if (a == 0)
            return b == 0;
        if (kind_ != Kind::integers)
            return true;
        return numerator(b) % numerator(a) == 0;
    }

    bool operator==(const Ring& other) const = default;

private:
    Ring(Kind kind, std::int64_t p) : kind_(kind), p_(p) {}

    Rational wrap(Rational x) const
    {
        if (kind_ != Kind::prime_field)
            return x;
        Integer p(p_);
        Integer n = numerator(x) % p;
        if (n < 0)
            n += p;
        return Rational(n);
    }

    Integer inverse_mod(const Integer& a) const
    {
        // Fermat; p fits in 63 bits.
        Integer p(p_);
        Integer base = a % p;
        if (base < 0)
            base += p;
        Integer result = 1;
        std::int64_t e = p_ - 2;
        while (e > 0) {
            if (e & 1)
                result = (result * base) % p;
            base = (base * base) % p;
            e >>= 1;
        }
        return result;
    }

    Kind kind_;
    std::int64_t p_;
};

} // namespace exactalg
} // namespace microlocal
