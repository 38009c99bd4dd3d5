#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "crtrig/artifacts.hpp"
#include "crtrig/fpcore.hpp"

namespace crtrig {
namespace {

std::string hexf(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string hexw(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016" PRIx64, v);
  return buf;
}

double parse_hexf(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw std::runtime_error("bad hex float: " + s);
  return v;
}

std::uint64_t parse_hexw(const std::string& s) {
  char* end = nullptr;
  const std::uint64_t v = std::strtoull(s.c_str(), &end, 16);
  if (end == s.c_str() || *end != '\0') throw std::runtime_error("bad hex word: " + s);
  return v;
}

template <std::size_t N>
void put_doubles(std::ostringstream& os, const char* tag, const std::array<double, N>& v) {
  for (std::size_t i = 0; i < N; ++i) os << tag << ' ' << i << ' ' << hexf(v[i]) << '\n';
}

template <std::size_t N>
void put_doubles_exp(std::ostringstream& os, const char* tag, const std::array<double, N>& v,
                     const std::array<int, N>& e) {
  for (std::size_t i = 0; i < N; ++i)
    os << tag << ' ' << i << ' ' << hexf(v[i]) << ' ' << e[i] << '\n';
}

template <typename T, std::size_t N>
std::string braced(const std::array<T, N>& v, std::string (*fmt)(T)) {
  std::string s = "{";
  for (std::size_t i = 0; i < N; ++i) {
    if (i) s += ", ";
    s += fmt(v[i]);
  }
  return s + "}";
}

std::string int_str(int v) { return std::to_string(v); }

}  // namespace

std::string format_pi_constants(const PiConstants& c) {
  std::ostringstream os;
  put_doubles_exp(os, "pieces28", c.pieces28, c.pieces28_exp);
  put_doubles(os, "tails28", c.tails28);
  put_doubles_exp(os, "pieces53", c.pieces53, c.pieces53_exp);
  put_doubles(os, "small53", c.small53);
  for (std::size_t i = 0; i < c.words64.size(); ++i)
    os << "words64 " << i << ' ' << hexw(c.words64[i]) << '\n';
  os << "tail192 0 " << hexf(c.tail192) << '\n';
  os << "p1 0 " << hexw(c.p1) << '\n';
  os << "p0 0 " << hexw(c.p0) << '\n';
  os << "tail80 0 " << hexf(c.tail80) << '\n';
  os << "pi_over_256 0 " << hexf(c.pi_over_256) << '\n';
  os << "pi_over_256_lo 0 " << hexf(c.pi_over_256_lo) << '\n';
  os << "two_pow_minus_64 0 " << hexf(c.two_pow_minus_64) << '\n';
  return os.str();
}

PiConstants parse_pi_constants(const std::string& text) {
  PiConstants c;
  std::istringstream is(text);
  std::string line;
  int seen = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag, value, extra;
    std::size_t idx = 0;
    if (!(ls >> tag >> idx >> value)) throw std::runtime_error("bad constants line: " + line);
    ls >> extra;
    auto at = [&](auto& arr) -> auto& {
      if (idx >= arr.size()) throw std::runtime_error("index out of range: " + line);
      return arr[idx];
    };
    auto last_bit = [&] {
      if (extra.empty()) throw std::runtime_error("missing exponent: " + line);
      return std::stoi(extra);
    };
    if (tag == "pieces28") {
      at(c.pieces28) = parse_hexf(value);
      at(c.pieces28_exp) = last_bit();
    } else if (tag == "tails28") {
      at(c.tails28) = parse_hexf(value);
    } else if (tag == "pieces53") {
      at(c.pieces53) = parse_hexf(value);
      at(c.pieces53_exp) = last_bit();
    } else if (tag == "small53") {
      at(c.small53) = parse_hexf(value);
    } else if (tag == "words64") {
      at(c.words64) = parse_hexw(value);
    } else if (tag == "tail192") {
      c.tail192 = parse_hexf(value);
    } else if (tag == "p1") {
      c.p1 = parse_hexw(value);
    } else if (tag == "p0") {
      c.p0 = parse_hexw(value);
    } else if (tag == "tail80") {
      c.tail80 = parse_hexf(value);
    } else if (tag == "pi_over_256") {
      c.pi_over_256 = parse_hexf(value);
    } else if (tag == "pi_over_256_lo") {
      c.pi_over_256_lo = parse_hexf(value);
    } else if (tag == "two_pow_minus_64") {
      c.two_pow_minus_64 = parse_hexf(value);
    } else {
      throw std::runtime_error("unknown layout tag: " + tag);
    }
    ++seen;
  }
  if (seen != 31) throw std::runtime_error("constants file has " + std::to_string(seen) + " entries");
  return c;
}

std::string format_sin_table(const SinTable& t) {
  std::ostringstream os;
  for (int j = 0; j < 512; ++j) os << j << ' ' << hexf(t.hi[j]) << ' ' << hexf(t.lo[j]) << '\n';
  return os.str();
}

SinTable parse_sin_table(const std::string& text) {
  SinTable t;
  std::istringstream is(text);
  std::string line;
  int count = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int j = -1;
    std::string hi, lo;
    if (!(ls >> j >> hi >> lo) || j != count) throw std::runtime_error("bad table line: " + line);
    t.hi[j] = parse_hexf(hi);
    t.lo[j] = parse_hexf(lo);
    ++count;
  }
  if (count != 512) throw std::runtime_error("table has " + std::to_string(count) + " entries");
  return t;
}

std::string pi_constants_inc(const PiConstants& c) {
  std::ostringstream os;
  os << "// Generated by crtrig_emit from the oracle's expansion of 256/pi.\n";
  os << ".pieces28 = " << braced(c.pieces28, hexf) << ",\n";
  os << ".pieces28_exp = " << braced(c.pieces28_exp, int_str) << ",\n";
  os << ".tails28 = " << braced(c.tails28, hexf) << ",\n";
  os << ".pieces53 = " << braced(c.pieces53, hexf) << ",\n";
  os << ".pieces53_exp = " << braced(c.pieces53_exp, int_str) << ",\n";
  os << ".small53 = " << braced(c.small53, hexf) << ",\n";
  os << ".words64 = " << braced(c.words64, hexw) << ",\n";
  os << ".tail192 = " << hexf(c.tail192) << ",\n";
  os << ".p1 = " << hexw(c.p1) << ",\n";
  os << ".p0 = " << hexw(c.p0) << ",\n";
  os << ".tail80 = " << hexf(c.tail80) << ",\n";
  os << ".pi_over_256 = " << hexf(c.pi_over_256) << ",\n";
  os << ".pi_over_256_lo = " << hexf(c.pi_over_256_lo) << ",\n";
  os << ".two_pow_minus_64 = " << hexf(c.two_pow_minus_64) << ",\n";
  return os.str();
}

std::string sin_table_inc(const SinTable& t) {
  std::ostringstream os;
  os << "// Generated by crtrig_emit: sin(j pi / 256) as hi + lo.\n";
  for (int part = 0; part < 2; ++part) {
    const auto& v = part == 0 ? t.hi : t.lo;
    os << (part == 0 ? ".hi = {\n" : ".lo = {\n");
    for (int j = 0; j < 512; ++j) os << "    " << hexf(v[j]) << ",\n";
    os << "},\n";
  }
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

std::uint64_t table_checksum(const SinTable& t) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (int j = 0; j < 512; ++j) {
    mix(double_bits(t.hi[j]));
    mix(double_bits(t.lo[j]));
  }
  return h;
}

}  // namespace crtrig
