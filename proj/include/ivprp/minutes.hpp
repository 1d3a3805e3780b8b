#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <string>

namespace ivprp {

/// A duration or clock reading in minutes, stored exactly as hundredths of a
/// minute so that schedule comparisons never depend on floating-point rounding.
class Minutes {
 public:
  constexpr Minutes() = default;

  static constexpr Minutes from_centi(std::int64_t centi) {
    Minutes m;
    m.centi_ = centi;
    return m;
  }
  static Minutes from_double(double minutes) {
    return from_centi(static_cast<std::int64_t>(std::llround(minutes * 100.0)));
  }
  static constexpr Minutes whole(std::int64_t minutes) { return from_centi(minutes * 100); }
  static constexpr Minutes max() {
    return from_centi(std::numeric_limits<std::int64_t>::max() / 4);
  }

  constexpr std::int64_t centi() const { return centi_; }
  double value() const { return static_cast<double>(centi_) / 100.0; }

  constexpr Minutes operator+(Minutes o) const { return from_centi(centi_ + o.centi_); }
  constexpr Minutes operator-(Minutes o) const { return from_centi(centi_ - o.centi_); }
  constexpr Minutes operator-() const { return from_centi(-centi_); }
  constexpr Minutes operator*(std::int64_t k) const { return from_centi(centi_ * k); }
  constexpr Minutes& operator+=(Minutes o) {
    centi_ += o.centi_;
    return *this;
  }
  constexpr Minutes& operator-=(Minutes o) {
    centi_ -= o.centi_;
    return *this;
  }
  // Rounds toward negative infinity at centi-minute resolution.
  constexpr Minutes halved() const {
    return from_centi(centi_ >= 0 ? centi_ / 2 : -((-centi_ + 1) / 2));
  }

  constexpr auto operator<=>(const Minutes&) const = default;

  /// Shortest decimal rendering ("14.5", "20", "0.01").
  std::string str() const {
    std::int64_t a = centi_ < 0 ? -centi_ : centi_;
    std::string s = centi_ < 0 ? "-" : "";
    s += std::to_string(a / 100);
    std::int64_t frac = a % 100;
    if (frac != 0) {
      s += '.';
      s += static_cast<char>('0' + frac / 10);
      if (frac % 10 != 0) s += static_cast<char>('0' + frac % 10);
    }
    return s;
  }

 private:
  std::int64_t centi_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, Minutes m) { return os << m.str(); }

}  // namespace ivprp
