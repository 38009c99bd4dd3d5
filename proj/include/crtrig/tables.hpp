// The 512-entry table of sin(j pi / 256) used for output compensation.
#pragma once

#include <array>
#include <cassert>

namespace crtrig {

// hi[j] is the binary64 nearest sin(j pi / 256); lo[j] is the binary64
// nearest the remainder sin(j pi / 256) - hi[j].
struct SinTable {
  std::array<double, 512> hi{};
  std::array<double, 512> lo{};

  friend bool operator==(const SinTable&, const SinTable&) = default;
};

const SinTable& sin_table();

inline double sin_entry(int kp) {
  assert(kp >= 0 && kp < 512);
  return sin_table().hi[kp];
}
inline double cos_entry(int kp) {
  assert(kp >= 0 && kp < 512);
  return sin_table().hi[(kp + 128) & 511];
}

}  // namespace crtrig
