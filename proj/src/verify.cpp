#include "crtrig/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <unordered_map>

#include "crtrig/artifacts.hpp"
#include "crtrig/kernels.hpp"
#include "crtrig/oracle.hpp"
#include "crtrig/sweep.hpp"
#include "crtrig/tables.hpp"
#include "json.hpp"

namespace crtrig {
namespace {

std::string hex(std::uint64_t v, int digits) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%0*llx", digits, static_cast<unsigned long long>(v));
  return buf;
}

PolyPair load_one(const std::string& path, const std::string& domain, std::uint64_t checksum) {
  if (!std::filesystem::exists(path)) throw ArtifactError("missing coefficient file " + path);
  PolyFile f;
  try {
    f = parse_poly_file(read_text_file(path));
  } catch (const std::exception& e) {
    throw ArtifactError(path + ": " + e.what());
  }
  if (f.domain != domain) throw ArtifactError(path + ": domain is " + f.domain + ", expected " + domain);
  if (f.table_checksum != checksum) throw ArtifactError(path + ": built against a different sin table");
  return f.pair;
}

// Keeps the `cap` smallest records by input pattern.
void keep_smallest(std::vector<FailureRecord>& v, std::size_t cap) {
  auto less = [](const FailureRecord& a, const FailureRecord& b) { return a.input_bits < b.input_bits; };
  if (v.size() > cap) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(cap), v.end(), less);
    v.resize(cap);
  }
  std::sort(v.begin(), v.end(), less);
}

using Cache = std::unordered_map<std::uint32_t, double>;

constexpr std::uint64_t kMaxCacheWrite = std::uint64_t{1} << 27;

}  // namespace

KernelPolys load_kernel_polys(const std::string& dir) {
  const std::uint64_t sum = table_checksum(sin_table());
  return {load_one(dir + "/poly_reduced.txt", "reduced", sum), load_one(dir + "/poly_small.txt", "small", sum)};
}

InputScope InputScope::parse(std::string_view text) {
  InputScope s;
  if (text == "exhaustive") return s;
  if (text.rfind("file:", 0) == 0 && text.size() > 5) {
    s.kind = Kind::File;
    s.path = std::string(text.substr(5));
    return s;
  }
  if (text.rfind("random:", 0) == 0) {
    const std::string rest(text.substr(7));
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
      char* end1 = nullptr;
      char* end2 = nullptr;
      const std::string a = rest.substr(0, colon), b = rest.substr(colon + 1);
      s.kind = Kind::Random;
      s.n = std::strtoull(a.c_str(), &end1, 10);
      s.seed = std::strtoull(b.c_str(), &end2, 10);
      if (!a.empty() && !b.empty() && *end1 == '\0' && *end2 == '\0') return s;
    }
  }
  throw std::invalid_argument("bad scope '" + std::string(text) + "': expected exhaustive, random:N:SEED or file:PATH");
}

std::string InputScope::str() const {
  switch (kind) {
    case Kind::Exhaustive: return "exhaustive";
    case Kind::Random: return "random:" + std::to_string(n) + ":" + std::to_string(seed);
    case Kind::File: return "file:" + path;
  }
  return "?";
}

std::vector<std::uint32_t> random_patterns(std::uint64_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) x = static_cast<std::uint32_t>(rng() >> 32);
  return v;
}

std::vector<std::uint32_t> read_pattern_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ArtifactError("cannot open input file " + path);
  std::vector<std::uint32_t> v;
  std::string line;
  while (std::getline(is, line)) {
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    char* end = nullptr;
    const unsigned long long x = std::strtoull(line.c_str() + start, &end, 0);
    if (end == line.c_str() + start || x > 0xffffffffULL)
      throw std::invalid_argument(path + ": bad pattern line: " + line);
    v.push_back(static_cast<std::uint32_t>(x));
  }
  return v;
}

std::string VerifyReport::json() const {
  nlohmann::json fails = nlohmann::json::array();
  const int digits = (fmt + 3) / 4;
  for (const FailureRecord& r : first_failures)
    fails.push_back({{"input_bits", hex(r.input_bits, 8)},
                     {"expected_bits", hex(r.expected_bits, digits)},
                     {"got_bits", hex(r.got_bits, digits)}});
  const nlohmann::json j = {{"kind", "verify"},
                            {"func", std::string(to_string(func))},
                            {"fmt", fmt},
                            {"mode", std::string(to_string(mode))},
                            {"strategy", std::string(to_string(strategy))},
                            {"scope", scope},
                            {"total", total},
                            {"mismatches", mismatches},
                            {"first_failures", fails},
                            {"wall_time_seconds", wall_time_seconds}};
  return j.dump();
}

std::vector<VerifyReport> run_verify(const VerifyOptions& o) {
  if (o.fmt_lo < 10 || o.fmt_hi > 32 || o.fmt_lo > o.fmt_hi)
    throw std::invalid_argument("formats must satisfy 10 <= lo <= hi <= 32");
  if (o.funcs.empty() || o.modes.empty() || o.strategies.empty())
    throw std::invalid_argument("empty function, mode or strategy set");
  for (RoundingMode m : o.modes)
    if (m == RoundingMode::ToOdd) throw std::invalid_argument("round-to-odd is not a user mode");
  const auto start = std::chrono::steady_clock::now();

  const std::size_t nf = o.funcs.size(), nfmt = static_cast<std::size_t>(o.fmt_hi - o.fmt_lo + 1),
                    nm = o.modes.size(), ns = o.strategies.size();
  const std::size_t nrep = nf * nfmt * nm * ns;
  auto index = [&](std::size_t f, std::size_t fmt, std::size_t m, std::size_t s) {
    return ((f * nfmt + fmt) * nm + m) * ns + s;
  };

  std::vector<Cache> caches(nf);
  std::vector<char> cached(nf, 0);
  if (!o.oracle_cache.empty()) {
    for (std::size_t f = 0; f < nf; ++f) {
      const std::string path = o.oracle_cache + "/" + std::string(to_string(o.funcs[f])) + ".ro34";
      if (!std::filesystem::exists(path)) continue;
      for (const CacheRecord& r : read_cache(path)) caches[f][r.input] = r.ro34;
      cached[f] = 1;
    }
  }
  const bool need_oracle = std::find(cached.begin(), cached.end(), 0) != cached.end();

  const bool exhaustive = o.scope.kind == InputScope::Kind::Exhaustive;
  std::vector<std::uint32_t> list;
  if (o.scope.kind == InputScope::Kind::Random) list = random_patterns(o.scope.n, o.scope.seed);
  if (o.scope.kind == InputScope::Kind::File) list = read_pattern_file(o.scope.path);
  const std::uint64_t count = exhaustive ? (std::uint64_t{1} << (o.fmt_hi - 1)) : list.size();
  const std::uint64_t records = exhaustive ? 2 * count : count;
  const bool write_cache_files = !o.oracle_cache.empty() && records <= kMaxCacheWrite;
  if (!o.oracle_cache.empty() && need_oracle && !write_cache_files)
    std::fprintf(stderr, "verify: %llu inputs are too many to cache; evaluating the oracle directly\n",
                 static_cast<unsigned long long>(records));

  const int jobs = o.jobs > 0 ? o.jobs : default_jobs();
  struct Worker {
    std::vector<std::uint64_t> total, mism;
    std::vector<std::vector<FailureRecord>> fails;
    std::vector<std::vector<CacheRecord>> out_cache;
    std::unique_ptr<Oracle> oracle;
    std::uint64_t pending = 0;
  };
  std::vector<Worker> workers(jobs);
  for (Worker& w : workers) {
    w.total.assign(nrep, 0);
    w.mism.assign(nrep, 0);
    w.fails.resize(nrep);
    w.out_cache.resize(nf);
    if (need_oracle) w.oracle = std::make_unique<Oracle>();
  }
  std::atomic<std::uint64_t> done{0};
  std::mutex progress_mu;

  auto check = [&](Worker& w, std::uint32_t x, const OracleTriple* t) {
    double r34[4];
    for (std::size_t f = 0; f < nf; ++f) {
      const Func fn = o.funcs[f];
      double c34 = 0;
      if (cached[f]) {
        const auto it = caches[f].find(x);
        if (it == caches[f].end()) throw ArtifactError("oracle cache lacks input " + hex(x, 8));
        c34 = it->second;
      } else if (write_cache_files) {
        w.out_cache[f].push_back({x, (*t)[fn].ro34()});
      }
      for (std::size_t s = 0; s < ns; ++s) r34[s] = eval34(o.polys, fn, x, o.strategies[s]);
      for (std::size_t k = 0; k < nfmt; ++k) {
        const int bits = o.fmt_lo + static_cast<int>(k);
        if (exhaustive && (x & ((std::uint64_t{1} << (32 - bits)) - 1)) != 0) continue;
        const FpFormat fmt{bits};
        for (std::size_t m = 0; m < nm; ++m) {
          const std::uint64_t expect =
              cached[f] ? round_from_34(c34, fmt, o.modes[m]) : (*t)[fn].rounded(fmt, o.modes[m]);
          for (std::size_t s = 0; s < ns; ++s) {
            const std::size_t i = index(f, k, m, s);
            ++w.total[i];
            const std::uint64_t got = round_from_34(r34[s], fmt, o.modes[m]);
            if (got == expect) continue;
            ++w.mism[i];
            w.fails[i].push_back({x, expect, got});
            if (w.fails[i].size() > 2 * o.max_failures) keep_smallest(w.fails[i], o.max_failures);
          }
        }
      }
    }
  };

  auto tick = [&](Worker& w) {
    if (++w.pending < (1u << 16)) return;
    const std::uint64_t before = done.fetch_add(w.pending);
    const std::uint64_t after = before + w.pending;
    w.pending = 0;
    if (!o.progress || (before >> 26) == (after >> 26)) return;
    std::lock_guard<std::mutex> lock(progress_mu);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::fprintf(stderr, "verify: %llu of %llu (%.0f s)\n", static_cast<unsigned long long>(after),
                 static_cast<unsigned long long>(count), sec);
  };

  sweep_plain(0, count, jobs, [&](int wi, std::uint32_t idx) {
    Worker& w = workers[wi];
    if (exhaustive) {
      const std::uint32_t x = idx << (32 - o.fmt_hi);
      OracleTriple t, nt;
      if (need_oracle) {
        t = w.oracle->eval_all(x);
        nt = {negate(t.sin, Func::Sin), negate(t.cos, Func::Cos), negate(t.tan, Func::Tan)};
      }
      check(w, x, &t);
      check(w, x | 0x80000000u, &nt);
    } else {
      const std::uint32_t x = list[idx];
      OracleTriple t;
      if (need_oracle) t = w.oracle->eval_all(x);
      check(w, x, &t);
    }
    tick(w);
  });

  if (write_cache_files) {
    std::filesystem::create_directories(o.oracle_cache);
    for (std::size_t f = 0; f < nf; ++f) {
      if (cached[f]) continue;
      std::vector<CacheRecord> all;
      for (Worker& w : workers) all.insert(all.end(), w.out_cache[f].begin(), w.out_cache[f].end());
      std::sort(all.begin(), all.end(), [](const CacheRecord& a, const CacheRecord& b) { return a.input < b.input; });
      all.erase(std::unique(all.begin(), all.end(), [](const CacheRecord& a, const CacheRecord& b) {
        return a.input == b.input;
      }), all.end());
      write_cache(o.oracle_cache + "/" + std::string(to_string(o.funcs[f])) + ".ro34", all);
    }
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::vector<VerifyReport> out;
  out.reserve(nrep);
  for (std::size_t f = 0; f < nf; ++f)
    for (std::size_t k = 0; k < nfmt; ++k)
      for (std::size_t m = 0; m < nm; ++m)
        for (std::size_t s = 0; s < ns; ++s) {
          const std::size_t i = index(f, k, m, s);
          VerifyReport r;
          r.func = o.funcs[f];
          r.fmt = o.fmt_lo + static_cast<int>(k);
          r.mode = o.modes[m];
          r.strategy = o.strategies[s];
          r.scope = o.scope.str();
          r.wall_time_seconds = wall;
          for (Worker& w : workers) {
            r.total += w.total[i];
            r.mismatches += w.mism[i];
            r.first_failures.insert(r.first_failures.end(), w.fails[i].begin(), w.fails[i].end());
          }
          keep_smallest(r.first_failures, o.max_failures);
          out.push_back(std::move(r));
        }
  return out;
}

}  // namespace crtrig
