#pragma once

#include <array>
#include <cstdint>

namespace ssm {

/// Exact fixed-point accumulator for point masses.
///
/// Values are stored as a 256-bit unsigned integer in units of 2^-200, so
/// sums do not depend on the order in which terms are added. Conversion back
/// to double is correctly rounded.
class Mass {
 public:
  Mass() = default;

  static Mass from_double(double w);

  Mass& operator+=(const Mass& o) noexcept {
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < limb_.size(); ++i) {
      carry += static_cast<unsigned __int128>(limb_[i]) + o.limb_[i];
      limb_[i] = static_cast<std::uint64_t>(carry);
      carry >>= 64;
    }
    return *this;
  }

  friend Mass operator+(Mass a, const Mass& b) noexcept { return a += b; }

  friend bool operator==(const Mass& a, const Mass& b) noexcept {
    return a.limb_ == b.limb_;
  }

  friend bool operator<(const Mass& a, const Mass& b) noexcept {
    for (std::size_t i = a.limb_.size(); i-- > 0;) {
      if (a.limb_[i] != b.limb_[i]) return a.limb_[i] < b.limb_[i];
    }
    return false;
  }

  bool is_zero() const noexcept {
    return (limb_[0] | limb_[1] | limb_[2] | limb_[3]) == 0;
  }

  double to_double() const noexcept;

 private:
  std::array<std::uint64_t, 4> limb_{};
};

}  // namespace ssm
