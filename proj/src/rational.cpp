#include "trianglescope/rational.hpp"

#include <mpfr.h>

#include <ostream>
#include <stdexcept>

namespace tri {

Rational::Rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    mpq_init(v_);
    mpq_set_si(v_, num, 1);
    Rational d;
    mpq_set_si(d.v_, den, 1);
    mpq_div(v_, v_, d.v_);
}

Rational Rational::parse(std::string_view s) {
    auto slash = s.find('/');
    Rational r;
    std::string num(s.substr(0, slash));
    if (num.empty()) throw std::invalid_argument("Rational: empty numerator");
    if (mpz_set_str(mpq_numref(r.v_), num.c_str(), 10) != 0)
        throw std::invalid_argument("Rational: bad numerator '" + num + "'");
    if (slash != std::string_view::npos) {
        std::string den(s.substr(slash + 1));
        if (den.empty() || mpz_set_str(mpq_denref(r.v_), den.c_str(), 10) != 0)
            throw std::invalid_argument("Rational: bad denominator '" + den + "'");
        if (mpz_sgn(mpq_denref(r.v_)) == 0) throw std::invalid_argument("Rational: zero denominator");
    }
    mpq_canonicalize(r.v_);
    return r;
}

Rational& Rational::operator/=(Rational const& o) {
    if (o.is_zero()) throw std::domain_error("Rational: division by zero");
    mpq_div(v_, v_, o.v_);
    return *this;
}

double Rational::to_double() const {
    mpfr_t t;
    mpfr_init2(t, 53);
    mpfr_set_q(t, v_, MPFR_RNDN);
    double d = mpfr_get_d(t, MPFR_RNDN);
    mpfr_clear(t);
    return d;
}

std::string Rational::str() const {
    char* c = mpq_get_str(nullptr, 10, v_);
    std::string s(c);
    void (*freefn)(void*, size_t);
    mp_get_memory_functions(nullptr, nullptr, &freefn);
    freefn(c, s.size() + 1);
    return s;
}

std::ostream& operator<<(std::ostream& os, Rational const& q) { return os << q.str(); }

}  // namespace tri
