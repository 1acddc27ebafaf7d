#pragma once

#include <atomic>
#include <cstdint>

namespace emi::counters {

/// Process-wide tallies of expensive solver invocations. Online prediction
/// must leave these untouched; tests and the streaming harness read them.
struct Snapshot {
  std::uint64_t lp_solves = 0;
  std::uint64_t mle_fits = 0;
};

namespace detail {
inline std::atomic<std::uint64_t>& lp_counter() {
  static std::atomic<std::uint64_t> c{0};
  return c;
}
inline std::atomic<std::uint64_t>& mle_counter() {
  static std::atomic<std::uint64_t> c{0};
  return c;
}
}  // namespace detail

inline Snapshot snapshot() {
  return {detail::lp_counter().load(std::memory_order_relaxed),
          detail::mle_counter().load(std::memory_order_relaxed)};
}

inline void record_lp_solve() {
  detail::lp_counter().fetch_add(1, std::memory_order_relaxed);
}

inline void record_mle_fit() {
  detail::mle_counter().fetch_add(1, std::memory_order_relaxed);
}

}  // namespace emi::counters
