#include "crtrig/poly.hpp"
#include "crtrig/rangered.hpp"
#include "crtrig/tables.hpp"

namespace crtrig {

const PiConstants& pi_constants() {
  static const PiConstants c{
#include "generated/pi_constants.inc"
  };
  return c;
}

const SinTable& sin_table() {
  static const SinTable t{
#include "generated/sin_table.inc"
  };
  return t;
}

const KernelPolys& builtin_polys() {
  static const KernelPolys k{
#include "generated/polys.inc"
  };
  return k;
}

}  // namespace crtrig
