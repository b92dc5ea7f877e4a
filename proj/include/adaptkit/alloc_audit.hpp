// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>

namespace adaptkit::alloc_audit {

/// Counting state shared with the operator new replacements in
/// alloc_hooks.hpp. Only allocations made by a thread while it is armed are
/// counted.
struct State {
  static inline thread_local bool armed = false;
  static inline std::atomic<std::uint64_t> count{0};
  static inline std::atomic<bool> installed{false};
};

inline bool hooks_installed() noexcept { return State::installed.load(); }
inline std::uint64_t count() noexcept { return State::count.load(); }

/// Arms counting on the current thread for the scope's lifetime.
class Scope {
 public:
  Scope() noexcept : prev_(State::armed) { State::armed = true; }
  ~Scope() { State::armed = prev_; }
  Scope(const Scope&) = delete;
  Scope& operator=(const Scope&) = delete;

 private:
  bool prev_;
};

inline void note_allocation() noexcept {
  if (State::armed) State::count.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace adaptkit::alloc_audit
