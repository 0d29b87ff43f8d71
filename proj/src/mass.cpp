#include "ssm/mass.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace ssm {

namespace {
constexpr int kFracBits = 200;
}

Mass Mass::from_double(double w) {
  if (!(w >= 0.0) || w >= std::ldexp(1.0, 255 - kFracBits)) {
    throw std::invalid_argument("Mass::from_double: value out of range");
  }
  Mass out;
  if (w == 0.0) return out;
  int e = 0;
  const double f = std::frexp(w, &e);
  auto mant = static_cast<std::uint64_t>(std::ldexp(f, 53));
  int shift = e - 53 + kFracBits;
  if (shift < 0) {
    // Below the resolution of the accumulator: truncate.
    if (shift <= -64) return out;
    mant >>= -shift;
    shift = 0;
  }
  const int limb = shift / 64;
  const int bit = shift % 64;
  out.limb_[limb] |= mant << bit;
  if (bit != 0 && limb + 1 < 4) out.limb_[limb + 1] |= mant >> (64 - bit);
  return out;
}

double Mass::to_double() const noexcept {
  int top = 3;
  while (top >= 0 && limb_[top] == 0) --top;
  if (top < 0) return 0.0;
  const int msb = top * 64 + 63 - std::countl_zero(limb_[top]);
  if (msb < 64) {
    return std::ldexp(static_cast<double>(limb_[0]), -kFracBits);
  }
  // Take the 64 bits ending at msb and fold everything below into a sticky bit.
  const int low = msb - 63;
  const int lw = low / 64;
  const int lb = low % 64;
  std::uint64_t window = limb_[lw] >> lb;
  if (lb != 0 && lw + 1 < 4) window |= limb_[lw + 1] << (64 - lb);
  bool sticky = false;
  for (int i = 0; i < lw && !sticky; ++i) sticky = limb_[i] != 0;
  if (!sticky && lb != 0) sticky = (limb_[lw] & ((std::uint64_t{1} << lb) - 1)) != 0;
  if (sticky) window |= 1u;
  return std::ldexp(static_cast<double>(window), low - kFracBits);
}

}  // namespace ssm
