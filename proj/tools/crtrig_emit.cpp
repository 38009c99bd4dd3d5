// Regenerates data/*.txt and src/generated/*.inc from the oracle.  With
// --taylor-polys, also writes truncated Taylor coefficients as a starting
// point for the generator.
#include <cstdio>
#include <cstring>
#include <exception>
#include <string>

#include "crtrig/artifacts.hpp"
#include "crtrig/poly.hpp"

int main(int argc, char** argv) {
  const bool taylor = argc == 3 && std::strcmp(argv[2], "--taylor-polys") == 0;
  if (argc != 2 && !taylor) {
    std::fprintf(stderr, "usage: crtrig_emit <source-root> [--taylor-polys]\n");
    return 2;
  }
  const std::string root = argv[1];
  try {
    const crtrig::PiConstants c = crtrig::gen_pi_constants(1024);
    const crtrig::SinTable t = crtrig::build_sin_table();
    crtrig::write_text_file(root + "/data/pi_constants.txt", crtrig::format_pi_constants(c));
    crtrig::write_text_file(root + "/data/sin_table.txt", crtrig::format_sin_table(t));
    crtrig::write_text_file(root + "/src/generated/pi_constants.inc", crtrig::pi_constants_inc(c));
    crtrig::write_text_file(root + "/src/generated/sin_table.inc", crtrig::sin_table_inc(t));
    const std::uint64_t sum = crtrig::table_checksum(t);
    std::printf("sin table checksum 0x%016llx\n", static_cast<unsigned long long>(sum));
    if (taylor) {
      const crtrig::KernelPolys k{crtrig::taylor_pair(7, 6), crtrig::taylor_pair(9, 8)};
      crtrig::write_text_file(root + "/data/poly_reduced.txt",
                              crtrig::format_poly_file({k.reduced, "reduced", std::string(crtrig::kEvalOrder), sum, 0}));
      crtrig::write_text_file(root + "/data/poly_small.txt",
                              crtrig::format_poly_file({k.small, "small", std::string(crtrig::kEvalOrder), sum, 0}));
      crtrig::write_text_file(root + "/src/generated/polys.inc", crtrig::polys_inc(k));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "crtrig_emit: %s\n", e.what());
    return 1;
  }
  return 0;
}
