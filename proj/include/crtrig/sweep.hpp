// Parallel traversal of binary32 patterns with oracle values.
#pragma once

#include <cstdint>
#include <functional>

#include "crtrig/oracle.hpp"

namespace crtrig {

// Calls fn(worker, bits, oracle) for every bits in [from, to).  Workers take
// 2^16-pattern chunks in increasing order; fn must be safe to call
// concurrently for distinct workers.  `progress`, if set, receives the
// number of finished patterns from one thread at a time.
using SweepFn = std::function<void(int worker, std::uint32_t bits, const OracleTriple& oracle)>;
void sweep_oracle(std::uint64_t from, std::uint64_t to, int jobs, const SweepFn& fn,
                  const std::function<void(std::uint64_t done)>& progress = {});

// As above without oracle evaluation.
using PlainSweepFn = std::function<void(int worker, std::uint32_t bits)>;
void sweep_plain(std::uint64_t from, std::uint64_t to, int jobs, const PlainSweepFn& fn);

// Oracle value of -x given the value at x.
OracleValue negate(const OracleValue& v, Func f);

// Number of workers to use when the caller passes 0.
int default_jobs();

}  // namespace crtrig
