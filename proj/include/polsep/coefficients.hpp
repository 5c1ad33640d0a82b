// Coefficient domains for the trig-Laurent kernel: exact rationals and
// arbitrary-precision binary floats.  Every expression type in this library
// is generic over one of these two domains.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace polsep {

struct DomainMismatchError : std::runtime_error {
    explicit DomainMismatchError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation left its mathematical domain (non-integrable term, invalid
/// branch, degenerate configuration).
struct MathDomainError : std::runtime_error {
    explicit MathDomainError(const std::string& what) : std::runtime_error(what) {}
};

using Rational = boost::multiprecision::cpp_rational;
using BigInt   = boost::multiprecision::cpp_int;

/// Arbitrary-precision binary float.  The precision (decimal digits) travels
/// with each value; arithmetic between values of different precision is
/// rejected rather than silently rounded.
class BigFloat {
  public:
    using Backend = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                                  boost::multiprecision::et_off>;

    static constexpr unsigned kDefaultDigits = 50;

    // Note: assigning a Backend temporary would drag along its (default)
    // precision, so values are assigned first and widened afterwards.
    BigFloat() : v_(0) { v_.precision(kDefaultDigits); }
    explicit BigFloat(double x, unsigned digits = kDefaultDigits) {
        v_ = x;
        v_.precision(digits);
    }
    BigFloat(long n, unsigned digits) {
        v_ = n;
        v_.precision(digits);
    }
    explicit BigFloat(const Backend& v) : v_(v) {}

    static BigFloat from_rational(long p, long q, unsigned digits = kDefaultDigits) {
        BigFloat r;
        r.v_ = p;
        r.v_.precision(digits);
        Backend d(q);
        d.precision(digits);
        r.v_ /= d;
        return r;
    }

    unsigned digits() const { return v_.precision(); }
    const Backend& raw() const { return v_; }
    Backend& raw() { return v_; }

    BigFloat operator-() const { BigFloat out(*this); out.v_ = -out.v_; return out; }
    BigFloat operator+(const BigFloat& o) const { BigFloat out(*this); out += o; return out; }
    BigFloat operator-(const BigFloat& o) const { BigFloat out(*this); out -= o; return out; }
    BigFloat operator*(const BigFloat& o) const { BigFloat out(*this); out *= o; return out; }
    BigFloat operator/(const BigFloat& o) const { BigFloat out(*this); out /= o; return out; }
    BigFloat& operator+=(const BigFloat& o) { check(o); v_ += o.v_; return *this; }
    BigFloat& operator-=(const BigFloat& o) { check(o); v_ -= o.v_; return *this; }
    BigFloat& operator*=(const BigFloat& o) { check(o); v_ *= o.v_; return *this; }
    BigFloat& operator/=(const BigFloat& o) { check(o); v_ /= o.v_; return *this; }

    bool operator==(const BigFloat& o) const { return v_ == o.v_; }
    bool operator!=(const BigFloat& o) const { return v_ != o.v_; }
    bool operator<(const BigFloat& o) const { return v_ < o.v_; }

    double to_double() const { return v_.convert_to<double>(); }
    std::string str() const { return v_.str(); }

  private:
    void check(const BigFloat& o) const {
        if (v_.precision() != o.v_.precision())
            throw DomainMismatchError("BigFloat precision mismatch: " + std::to_string(v_.precision()) +
                                      " vs " + std::to_string(o.v_.precision()));
    }
    Backend v_;
};

// Traits used by the generic kernel code.
template <typename C>
struct CoeffTraits;

template <>
struct CoeffTraits<Rational> {
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static Rational from_long(long n) { return Rational(n); }
    static Rational ratio(long p, long q) { return Rational(p, q); }
    static bool is_zero(const Rational& c) { return c == 0; }
    static double to_double(const Rational& c) { return c.convert_to<double>(); }
    static Rational neg(const Rational& c) { return -c; }
    static std::string str(const Rational& c) {
        return c.str();
    }
    static constexpr bool exact = true;
};

template <>
struct CoeffTraits<BigFloat> {
    static BigFloat zero() { return BigFloat(); }
    static BigFloat one() { return BigFloat(1.0); }
    static BigFloat from_long(long n) { return BigFloat(static_cast<double>(n)); }
    static BigFloat ratio(long p, long q) { return BigFloat::from_rational(p, q); }
    static bool is_zero(const BigFloat& c) { return c == BigFloat(0.0, c.digits()); }
    static double to_double(const BigFloat& c) { return c.to_double(); }
    static BigFloat neg(const BigFloat& c) { return -c; }
    static std::string str(const BigFloat& c) { return c.str(); }
    static constexpr bool exact = false;
};

}  // namespace polsep
