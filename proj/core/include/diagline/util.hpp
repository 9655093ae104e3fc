#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace diagline {

// 64-bit FNV-1a, used for instance and config digests.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Fixed 17-significant-digit rendering; round-trips doubles exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based generator: the value depends only on (seed, index, lane), so
// any partition of the index space across threads yields identical samples.
inline double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t lane) {
  std::uint64_t h = splitmix64(seed ^ splitmix64(index * 0x632be59bd9b4e019ULL + lane));
  h = splitmix64(h + lane);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Effective worker count: explicit request, else DIAGLINE_THREADS, else hardware.
unsigned resolve_threads(unsigned requested);

// Runs body(block) for block in [0, blocks) on up to `threads` workers with a
// static interleaved partition. Each block must write only its own output.
template <class Body>
void parallel_blocks(std::size_t blocks, unsigned threads, Body&& body) {
  threads = resolve_threads(threads);
  if (threads <= 1 || blocks <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) body(b);
    return;
  }
  if (threads > blocks) threads = static_cast<unsigned>(blocks);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t b = t; b < blocks; b += threads) body(b);
    });
  }
  for (auto& th : pool) th.join();
}

// Pairwise-tree sum; result depends only on the order of `v`.
template <class T>
T tree_sum(const std::vector<T>& v, std::size_t lo, std::size_t hi) {
  if (hi <= lo) return T{};
  if (hi - lo == 1) return v[lo];
  std::size_t mid = lo + (hi - lo) / 2;
  return tree_sum(v, lo, mid) + tree_sum(v, mid, hi);
}

template <class T>
T tree_sum(const std::vector<T>& v) {
  return tree_sum(v, 0, v.size());
}

}  // namespace diagline
