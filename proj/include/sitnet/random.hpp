#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

namespace sitnet {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: draw k of stream (seed, stream) is
// mix64(key + k * golden), with key derived from the pair. Any draw of any
// stream is addressable without touching the others, which is what makes
// chunked parallel sampling reproducible for every worker count.
//
// Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix64(seed ^ mix64(stream + kGolden)) | 1ULL) {}

  constexpr result_type operator()() noexcept { return mix64(key_ + (++counter_) * kGolden); }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t counter() const noexcept { return counter_; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Items per Monte Carlo chunk. Chunk i always uses stream i, so results only
// depend on (seed, total count).
inline constexpr std::size_t kChunkSize = 4096;

inline unsigned default_worker_count() {
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(chunk_index, begin, end) -> Acc over [0, total) split into
// kChunkSize chunks on `workers` threads, then folds the chunk results in
// chunk order with merge(acc, part).
template <class Acc, class Fn, class Merge>
Acc parallel_chunks(std::size_t total, unsigned workers, Fn&& fn, Merge&& merge) {
  const std::size_t chunks = (total + kChunkSize - 1) / kChunkSize;
  std::vector<Acc> parts(chunks);
  auto run = [&](std::size_t c) {
    const std::size_t begin = c * kChunkSize;
    parts[c] = fn(c, begin, std::min(total, begin + kChunkSize));
  };
  workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(chunks, 1)));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t c; (c = next.fetch_add(1)) < chunks;) {
            try {
              run(c);
            } catch (...) {
              if (!failed.exchange(true)) failure = std::current_exception();
              return;
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  Acc acc{};
  for (auto& part : parts) merge(acc, part);
  return acc;
}

}  // namespace sitnet
