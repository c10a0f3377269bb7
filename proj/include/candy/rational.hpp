#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace candy {

// Exact non-negative-denominator fraction, always kept in lowest terms.
class Rational {
public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den) {
    if (den_ == 0) throw std::domain_error("Rational: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const auto g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  // a/b when b > 0, else 0. Used for every precision/recall/F1 ratio.
  static constexpr Rational ratio_or_zero(std::int64_t a, std::int64_t b) {
    return b > 0 ? Rational(a, b) : Rational(0);
  }

  constexpr std::int64_t num() const noexcept { return num_; }
  constexpr std::int64_t den() const noexcept { return den_; }

  double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend constexpr bool operator==(const Rational&, const Rational&) = default;
  friend constexpr std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
  }

  // Fixed-point rendering with `places` decimals, ties rounded to even.
  std::string to_fixed(int places = 4) const {
    __int128 scale = 1;
    for (int i = 0; i < places; ++i) scale *= 10;
    const bool negative = num_ < 0;
    const __int128 scaled = static_cast<__int128>(negative ? -num_ : num_) * scale;
    __int128 q = scaled / den_;
    const __int128 r = scaled % den_;
    if (2 * r > den_ || (2 * r == den_ && q % 2 == 1)) ++q;
    const auto whole = static_cast<std::int64_t>(q / scale);
    auto frac = std::to_string(static_cast<std::int64_t>(q % scale));
    std::string out = (negative && q != 0 ? "-" : "") + std::to_string(whole);
    if (places > 0) out += "." + std::string(places - frac.size(), '0') + frac;
    return out;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.num_ << '/' << r.den_;
  }

private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace candy
