#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmp.h>

namespace tri {

/// Arbitrary-precision rational, a thin value-semantics wrapper around GMP's
/// mpq_t. Always stored in canonical form (reduced, positive denominator).
class Rational {
  public:
    Rational() { mpq_init(v_); }
    Rational(Rational const& o) {
        mpq_init(v_);
        mpq_set(v_, o.v_);
    }
    Rational(Rational&& o) noexcept {
        mpq_init(v_);
        mpq_swap(v_, o.v_);
    }
    Rational& operator=(Rational const& o) {
        if (this != &o) mpq_set(v_, o.v_);
        return *this;
    }
    Rational& operator=(Rational&& o) noexcept {
        if (this != &o) mpq_swap(v_, o.v_);
        return *this;
    }
    ~Rational() { mpq_clear(v_); }

    Rational(long n) {
        mpq_init(v_);
        mpq_set_si(v_, n, 1);
    }
    Rational(int n) : Rational(static_cast<long>(n)) {}
    Rational(long num, long den);

    /// Parses "p/q" or "p". Throws std::invalid_argument on malformed input
    /// or zero denominator.
    static Rational parse(std::string_view s);

    long num_long() const { return mpz_get_si(mpq_numref(v_)); }
    long den_long() const { return mpz_get_si(mpq_denref(v_)); }

    bool is_zero() const { return mpq_sgn(v_) == 0; }
    int sign() const { return mpq_sgn(v_); }

    /// Correctly rounded (nearest, ties to even) conversion.
    double to_double() const;

    std::string str() const;

    Rational& operator+=(Rational const& o) {
        mpq_add(v_, v_, o.v_);
        return *this;
    }
    Rational& operator-=(Rational const& o) {
        mpq_sub(v_, v_, o.v_);
        return *this;
    }
    Rational& operator*=(Rational const& o) {
        mpq_mul(v_, v_, o.v_);
        return *this;
    }
    Rational& operator/=(Rational const& o);

    friend Rational operator+(Rational a, Rational const& b) { return a += b; }
    friend Rational operator-(Rational a, Rational const& b) { return a -= b; }
    friend Rational operator*(Rational a, Rational const& b) { return a *= b; }
    friend Rational operator/(Rational a, Rational const& b) { return a /= b; }
    friend Rational operator-(Rational const& a) {
        Rational r;
        mpq_neg(r.v_, a.v_);
        return r;
    }

    friend bool operator==(Rational const& a, Rational const& b) { return mpq_equal(a.v_, b.v_) != 0; }
    friend bool operator!=(Rational const& a, Rational const& b) { return !(a == b); }
    friend bool operator<(Rational const& a, Rational const& b) { return mpq_cmp(a.v_, b.v_) < 0; }
    friend bool operator<=(Rational const& a, Rational const& b) { return mpq_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>(Rational const& a, Rational const& b) { return mpq_cmp(a.v_, b.v_) > 0; }
    friend bool operator>=(Rational const& a, Rational const& b) { return mpq_cmp(a.v_, b.v_) >= 0; }

    friend Rational abs(Rational const& a) {
        Rational r;
        mpq_abs(r.v_, a.v_);
        return r;
    }

  private:
    mpq_t v_;
};

std::ostream& operator<<(std::ostream& os, Rational const& q);

}  // namespace tri
