#include "crtrig/oracle.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace crtrig {

double OracleValue::ro34() const {
  if (nan) return std::numeric_limits<double>::quiet_NaN();
  if (value.sig == 0) return value.negative ? -0.0 : 0.0;
  return value_34(round_to_format(value, kFormat34, RoundingMode::ToOdd));
}

std::uint64_t OracleValue::rounded(FpFormat fmt, RoundingMode mode) const {
  if (nan) return fmt.quiet_nan();
  return round_to_format(value, fmt, mode);
}

Oracle::Oracle() = default;

OracleTriple Oracle::eval_all(std::uint32_t x) {
  OracleTriple out;
  if (fast_eval_all(x, out)) return out;
  ++fallbacks_;
  out.sin = mpfr_.eval(Func::Sin, x);
  out.cos = mpfr_.eval(Func::Cos, x);
  out.tan = mpfr_.eval(Func::Tan, x);
  return out;
}

RoundingInterval interval_around(double v34, bool exact) {
  RoundingInterval ri;
  if (exact || std::isnan(v34)) {
    ri.lo = ri.hi = v34;
    return ri;
  }
  const bool neg = std::signbit(v34);
  const std::uint64_t p = pattern_34(std::fabs(v34));
  const double below = value_34(p - 1);
  const double above = value_34(p + 1);
  double lo = std::nextafter(below, INFINITY);
  double hi = std::nextafter(above, 0.0);
  if (neg) {
    const double t = lo;
    lo = -hi;
    hi = -t;
  }
  ri.lo = lo;
  ri.hi = hi;
  return ri;
}

RoundingInterval Oracle::rounding_interval(Func f, std::uint32_t x) {
  const OracleValue v = eval(f, x);
  RoundingInterval ri = interval_around(v.ro34(), !v.nan && !v.value.sticky);
  ri.func = f;
  ri.input = x;
  return ri;
}

namespace {

void put_record(char* out, const CacheRecord& r) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<char>((r.input >> (8 * i)) & 0xff);
  const std::uint64_t b = double_bits(r.ro34);
  for (int i = 0; i < 8; ++i) out[4 + i] = static_cast<char>((b >> (8 * i)) & 0xff);
}

void write_records(std::ofstream& os, std::span<const CacheRecord> records) {
  std::vector<char> buf(records.size() * 12);
  for (std::size_t i = 0; i < records.size(); ++i) put_record(buf.data() + 12 * i, records[i]);
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace

void write_cache(const std::string& path, std::span<const CacheRecord> records) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write oracle cache " + path);
  write_records(os, records);
}

void append_cache(const std::string& path, std::span<const CacheRecord> records) {
  std::ofstream os(path, std::ios::binary | std::ios::app);
  if (!os) throw std::runtime_error("cannot append to oracle cache " + path);
  write_records(os, records);
}

std::vector<CacheRecord> read_cache(const std::string& path) {
  std::ifstream is(path, std::ios::binary | std::ios::ate);
  if (!is) return {};
  const auto size = static_cast<std::size_t>(is.tellg());
  if (size % 12 != 0) throw std::runtime_error("truncated oracle cache " + path);
  is.seekg(0);
  std::vector<unsigned char> buf(size);
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));
  std::vector<CacheRecord> out(size / 12);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const unsigned char* p = buf.data() + 12 * i;
    std::uint32_t in = 0;
    std::uint64_t b = 0;
    for (int j = 0; j < 4; ++j) in |= static_cast<std::uint32_t>(p[j]) << (8 * j);
    for (int j = 0; j < 8; ++j) b |= static_cast<std::uint64_t>(p[4 + j]) << (8 * j);
    out[i] = {in, bits_double(b)};
  }
  return out;
}

}  // namespace crtrig
