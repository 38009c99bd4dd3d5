#include "crtrig/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace crtrig {
namespace {

constexpr std::uint64_t kChunk = 1 << 16;

template <typename Body>
void run_chunks(std::uint64_t from, std::uint64_t to, int jobs, Body body,
                const std::function<void(std::uint64_t)>& progress) {
  if (jobs <= 0) jobs = default_jobs();
  std::atomic<std::uint64_t> next{from};
  std::atomic<std::uint64_t> done{0};
  std::mutex report;
  std::exception_ptr error;
  auto worker = [&](int id) {
    try {
      for (;;) {
        const std::uint64_t lo = next.fetch_add(kChunk);
        if (lo >= to) break;
        const std::uint64_t hi = std::min(to, lo + kChunk);
        body(id, lo, hi);
        const std::uint64_t total = done.fetch_add(hi - lo) + (hi - lo);
        if (progress) {
          std::lock_guard<std::mutex> g(report);
          progress(total);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> g(report);
      if (!error) error = std::current_exception();
      next.store(to);
    }
  };
  std::vector<std::thread> threads;
  for (int i = 1; i < jobs; ++i) threads.emplace_back(worker, i);
  worker(0);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

int default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

void sweep_oracle(std::uint64_t from, std::uint64_t to, int jobs, const SweepFn& fn,
                  const std::function<void(std::uint64_t)>& progress) {
  if (jobs <= 0) jobs = default_jobs();
  std::vector<Oracle> oracles(jobs);
  run_chunks(
      from, to, jobs,
      [&](int id, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t b = lo; b < hi; ++b) {
          const auto bits = static_cast<std::uint32_t>(b);
          fn(id, bits, oracles[id].eval_all(bits));
        }
      },
      progress);
}

void sweep_plain(std::uint64_t from, std::uint64_t to, int jobs, const PlainSweepFn& fn) {
  run_chunks(
      from, to, jobs,
      [&](int id, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t b = lo; b < hi; ++b) fn(id, static_cast<std::uint32_t>(b));
      },
      {});
}

OracleValue negate(const OracleValue& v, Func f) {
  OracleValue out = v;
  if (f != Func::Cos && !v.nan) out.value.negative = !out.value.negative;
  return out;
}

}  // namespace crtrig
