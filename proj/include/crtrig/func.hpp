#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crtrig {

enum class Func { Sin, Cos, Tan };

inline constexpr Func kAllFuncs[] = {Func::Sin, Func::Cos, Func::Tan};

inline std::string_view to_string(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
  }
  return "?";
}

inline Func parse_func(std::string_view name) {
  if (name == "sin") return Func::Sin;
  if (name == "cos") return Func::Cos;
  if (name == "tan") return Func::Tan;
  throw std::invalid_argument("unknown function: " + std::string(name));
}

}  // namespace crtrig
