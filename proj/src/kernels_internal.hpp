// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared machinery for the kernel translation units: fixed-size block
// decomposition with per-block Kahan accumulation and an index-ordered
// combine, so sums are bit-identical for any worker count.

#ifndef ASYMPTOTICA_KERNELS_INTERNAL_HPP
#define ASYMPTOTICA_KERNELS_INTERNAL_HPP

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "asymptotica/kernels.hpp"

namespace asymptotica::kernels::detail {

constexpr std::uint64_t kBlock = 1u << 15;

template <class BlockFn>
double blocked_sum(std::uint64_t begin, std::uint64_t end, BlockFn block_fn) {
  if (begin >= end) return 0.0;
  std::uint64_t nblocks = (end - begin + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks);
  unsigned workers = thread_count();
  if (workers > nblocks) workers = static_cast<unsigned>(nblocks);
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < nblocks; ++i) {
      std::uint64_t b0 = begin + i * kBlock;
      std::uint64_t b1 = b0 + kBlock < end ? b0 + kBlock : end;
      partial[i] = block_fn(b0, b1);
    }
  } else {
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
      for (;;) {
        std::uint64_t i = next.fetch_add(1);
        if (i >= nblocks) return;
        std::uint64_t b0 = begin + i * kBlock;
        std::uint64_t b1 = b0 + kBlock < end ? b0 + kBlock : end;
        partial[i] = block_fn(b0, b1);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t i = 0; i < nblocks; ++i) {
    double y = partial[i] - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

template <class TermFn>
double scalar_block(std::uint64_t b0, std::uint64_t b1, TermFn term) {
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t j = b0; j < b1; ++j) {
    double y = term(j) - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace asymptotica::kernels::detail

#endif  // ASYMPTOTICA_KERNELS_INTERNAL_HPP
