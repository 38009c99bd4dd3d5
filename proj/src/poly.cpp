#include "crtrig/poly.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>


namespace crtrig {

PolyPair make_poly_pair(int sin_degree, int cos_degree) {
  if (sin_degree < 1 || sin_degree % 2 != 1 || (sin_degree + 1) / 2 > kMaxTerms)
    throw std::invalid_argument("sin degree must be odd, 1.." + std::to_string(2 * kMaxTerms - 1));
  if (cos_degree < 0 || cos_degree % 2 != 0 || cos_degree / 2 + 1 > kMaxTerms)
    throw std::invalid_argument("cos degree must be even, 0.." + std::to_string(2 * kMaxTerms - 2));
  PolyPair pp;
  pp.sin_terms = (sin_degree + 1) / 2;
  pp.cos_terms = cos_degree / 2 + 1;
  pp.sin_coeffs[0] = 1.0;
  pp.cos_coeffs[0] = 1.0;
  return pp;
}

PolyPair taylor_pair(int sin_degree, int cos_degree) {
  PolyPair pp = make_poly_pair(sin_degree, cos_degree);
  double fact = 1;  // n!, exact for n <= 18
  for (int n = 1; n <= 2 * kMaxTerms; ++n) {
    fact *= n;
    const double sign = (n / 2) % 2 ? -1.0 : 1.0;
    if (n % 2 == 1 && n / 2 < pp.sin_terms) pp.sin_coeffs[n / 2] = sign / fact;
    if (n % 2 == 0 && n / 2 < pp.cos_terms) pp.cos_coeffs[n / 2] = sign / fact;
  }
  return pp;
}

void check_poly_pair(const PolyPair& pp) {
  if (pp.sin_terms < 1 || pp.sin_terms > kMaxTerms || pp.cos_terms < 1 || pp.cos_terms > kMaxTerms)
    throw std::invalid_argument("polynomial term count out of range");
  if (pp.sin_coeffs[0] != 1.0 || pp.cos_coeffs[0] != 1.0)
    throw std::invalid_argument("c1 and d0 must be 1");
  for (int i = pp.sin_terms; i < kMaxTerms; ++i)
    if (pp.sin_coeffs[i] != 0) throw std::invalid_argument("coefficient beyond sin degree");
  for (int i = pp.cos_terms; i < kMaxTerms; ++i)
    if (pp.cos_coeffs[i] != 0) throw std::invalid_argument("coefficient beyond cos degree");
}

namespace {

std::string hexf(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string coeff_list(const std::array<double, kMaxTerms>& v) {
  std::string s = "{";
  for (int i = 0; i < kMaxTerms; ++i) s += (i ? ", " : "") + hexf(v[i]);
  return s + "}";
}

std::string pair_inc(const PolyPair& pp) {
  return "{.sin_coeffs = " + coeff_list(pp.sin_coeffs) + ",\n    .cos_coeffs = " +
         coeff_list(pp.cos_coeffs) + ",\n    .sin_terms = " + std::to_string(pp.sin_terms) +
         ", .cos_terms = " + std::to_string(pp.cos_terms) + "}";
}

}  // namespace

std::string format_poly_file(const PolyFile& f) {
  char sum[24];
  std::snprintf(sum, sizeof sum, "0x%016" PRIx64, f.table_checksum);
  std::ostringstream os;
  os << "# domain " << f.domain << '\n'
     << "# sin_degree " << f.pair.sin_degree() << '\n'
     << "# cos_degree " << f.pair.cos_degree() << '\n'
     << "# eval_order " << f.eval_order << '\n'
     << "# table_checksum " << sum << '\n'
     << "# generator_version " << f.generator_version << '\n';
  for (int i = 0; i < f.pair.sin_terms; ++i) os << "sin " << i << ' ' << hexf(f.pair.sin_coeffs[i]) << '\n';
  for (int i = 0; i < f.pair.cos_terms; ++i) os << "cos " << i << ' ' << hexf(f.pair.cos_coeffs[i]) << '\n';
  return os.str();
}

PolyFile parse_poly_file(const std::string& text) {
  PolyFile f;
  std::istringstream is(text);
  std::string line;
  int sin_degree = -1, cos_degree = -1;
  std::array<bool, kMaxTerms> seen_s{}, seen_c{};
  std::array<double, kMaxTerms> s{}, c{};
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key, value;
      ls >> hash >> key >> value;
      if (key == "domain") f.domain = value;
      else if (key == "sin_degree") sin_degree = std::stoi(value);
      else if (key == "cos_degree") cos_degree = std::stoi(value);
      else if (key == "eval_order") f.eval_order = value;
      else if (key == "table_checksum") f.table_checksum = std::strtoull(value.c_str(), nullptr, 16);
      else if (key == "generator_version") f.generator_version = std::stoi(value);
      continue;
    }
    std::string tag, value;
    int i = -1;
    if (!(ls >> tag >> i >> value) || i < 0 || i >= kMaxTerms)
      throw std::runtime_error("bad coefficient line: " + line);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (*end != '\0') throw std::runtime_error("bad coefficient value: " + value);
    if (tag == "sin") {
      s[i] = v;
      seen_s[i] = true;
    } else if (tag == "cos") {
      c[i] = v;
      seen_c[i] = true;
    } else {
      throw std::runtime_error("bad coefficient tag: " + tag);
    }
  }
  if (sin_degree < 0 || cos_degree < 0) throw std::runtime_error("coefficient file lacks degree headers");
  if (f.eval_order != kEvalOrder) throw std::runtime_error("unsupported evaluation order " + f.eval_order);
  f.pair = make_poly_pair(sin_degree, cos_degree);
  for (int i = 0; i < kMaxTerms; ++i) {
    const bool want_s = i < f.pair.sin_terms, want_c = i < f.pair.cos_terms;
    if (seen_s[i] != want_s || seen_c[i] != want_c)
      throw std::runtime_error("coefficient lines do not match the degrees");
  }
  f.pair.sin_coeffs = s;
  f.pair.cos_coeffs = c;
  check_poly_pair(f.pair);
  return f;
}

std::string polys_inc(const KernelPolys& k) {
  return "// Generated by crtrig generate poly.\n.reduced = " + pair_inc(k.reduced) +
         ",\n.small = " + pair_inc(k.small) + ",\n";
}

}  // namespace crtrig
