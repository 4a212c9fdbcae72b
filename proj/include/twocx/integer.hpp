#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>
#include <limits>
#include <stdexcept>
#include <Eigen/Core>

namespace twocx {

/// Arbitrary-precision signed integer usable as an Eigen scalar.
///
/// boost::multiprecision numbers carry templated converting constructors that
/// collide with Eigen's scalar promotion machinery; this thin value wrapper
/// exposes only the operations the library needs.
class Integer {
 public:
  using Rep = boost::multiprecision::cpp_int;

  Integer() = default;
  Integer(int x) : v_(x) {}
  Integer(long x) : v_(x) {}
  Integer(long long x) : v_(x) {}
  Integer(unsigned long x) : v_(x) {}
  Integer(unsigned long long x) : v_(x) {}
  explicit Integer(Rep r) : v_(std::move(r)) {}

  static Integer parse(std::string_view text);

  const Rep& rep() const { return v_; }

  Integer& operator+=(const Integer& o) {
    v_ += o.v_;
    return *this;
  }
  Integer& operator-=(const Integer& o) {
    v_ -= o.v_;
    return *this;
  }
  Integer& operator*=(const Integer& o) {
    v_ *= o.v_;
    return *this;
  }
  // Truncating division, matching the built-in integer types.
  Integer& operator/=(const Integer& o) {
    v_ /= o.v_;
    return *this;
  }
  Integer& operator%=(const Integer& o) {
    v_ %= o.v_;
    return *this;
  }

  friend Integer operator+(Integer a, const Integer& b) { return a += b; }
  friend Integer operator-(Integer a, const Integer& b) { return a -= b; }
  friend Integer operator*(Integer a, const Integer& b) { return a *= b; }
  friend Integer operator/(Integer a, const Integer& b) { return a /= b; }
  friend Integer operator%(Integer a, const Integer& b) { return a %= b; }
  friend Integer operator-(const Integer& a) { return Integer(Rep(-a.v_)); }

  friend bool operator==(const Integer& a, const Integer& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Integer& a, const Integer& b) {
    const int c = a.v_.compare(b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  bool is_zero() const { return v_.is_zero(); }
  int sign() const { return v_.sign(); }

  /// Value as int64 if it fits.
  std::optional<std::int64_t> to_int64() const;

  std::string str() const { return v_.str(); }

  friend std::ostream& operator<<(std::ostream& os, const Integer& a) { return os << a.v_; }

 private:
  Rep v_;
};

inline Integer abs(const Integer& a) { return a.sign() < 0 ? -a : a; }

inline Integer gcd(const Integer& a, const Integer& b) {
  return Integer(boost::multiprecision::gcd(a.rep(), b.rep()));
}

inline Integer Integer::parse(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty integer literal");
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (start == s.size()) throw std::invalid_argument("bad integer literal: " + s);
  for (std::size_t i = start; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("bad integer literal: " + s);
  }
  if (s[0] == '+') s.erase(0, 1);
  return Integer(Rep(s));
}

inline std::optional<std::int64_t> Integer::to_int64() const {
  static const Rep lo = Rep(std::numeric_limits<std::int64_t>::min());
  static const Rep hi = Rep(std::numeric_limits<std::int64_t>::max());
  if (v_ < lo || v_ > hi) return std::nullopt;
  return v_.convert_to<std::int64_t>();
}

using Rational = boost::multiprecision::cpp_rational;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using IntMatrix = Matrix<Integer>;

}  // namespace twocx

namespace Eigen {

template <>
struct NumTraits<twocx::Integer> : GenericNumTraits<twocx::Integer> {
  using Real = twocx::Integer;
  using NonInteger = twocx::Integer;
  using Literal = twocx::Integer;
  using Nested = twocx::Integer;

  enum {
    IsComplex = 0,
    IsInteger = 1,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 16,
    MulCost = 32
  };

  static inline int digits10() { return 0; }
  static inline twocx::Integer epsilon() { return 0; }
  static inline twocx::Integer dummy_precision() { return 0; }
  static inline twocx::Integer highest() { return 0; }
  static inline twocx::Integer lowest() { return 0; }
};

}  // namespace Eigen
