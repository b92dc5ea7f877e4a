// SPDX-License-Identifier: Apache-2.0
//
// Replaces the global allocation functions with counting versions. Include
// from exactly one translation unit of an executable.
#pragma once


#include <cstdlib>
#include <new>

#include "adaptkit/alloc_audit.hpp"

namespace adaptkit::alloc_audit::detail {

inline void* checked_malloc(std::size_t n) {
  note_allocation();
  if (void* p = std::malloc(n == 0 ? 1 : n)) return p;
  throw std::bad_alloc();
}

inline void* checked_aligned(std::size_t n, std::align_val_t al) {
  note_allocation();
  const auto a = static_cast<std::size_t>(al);
  const std::size_t rounded = ((n == 0 ? 1 : n) + a - 1) / a * a;
  if (void* p = std::aligned_alloc(a, rounded)) return p;
  throw std::bad_alloc();
}

// Kept out of line so the compiler never sees new/free paired at a call site.
[[gnu::noinline]] inline void release(void* p) noexcept { std::free(p); }

inline const bool kRegistered = [] {
  State::installed = true;
  return true;
}();

}  // namespace adaptkit::alloc_audit::detail

void* operator new(std::size_t n) { return adaptkit::alloc_audit::detail::checked_malloc(n); }
void* operator new[](std::size_t n) { return adaptkit::alloc_audit::detail::checked_malloc(n); }
void* operator new(std::size_t n, std::align_val_t a) { return adaptkit::alloc_audit::detail::checked_aligned(n, a); }
void* operator new[](std::size_t n, std::align_val_t a) { return adaptkit::alloc_audit::detail::checked_aligned(n, a); }
void* operator new(std::size_t n, const std::nothrow_t&) noexcept {
  adaptkit::alloc_audit::note_allocation();
  return std::malloc(n == 0 ? 1 : n);
}
void* operator new[](std::size_t n, const std::nothrow_t&) noexcept {
  adaptkit::alloc_audit::note_allocation();
  return std::malloc(n == 0 ? 1 : n);
}
void operator delete(void* p) noexcept { adaptkit::alloc_audit::detail::release(p); }
void operator delete[](void* p) noexcept { adaptkit::alloc_audit::detail::release(p); }
void operator delete(void* p, std::size_t) noexcept { adaptkit::alloc_audit::detail::release(p); }
void operator delete[](void* p, std::size_t) noexcept { adaptkit::alloc_audit::detail::release(p); }
void operator delete(void* p, std::align_val_t) noexcept { adaptkit::alloc_audit::detail::release(p); }
void operator delete[](void* p, std::align_val_t) noexcept { adaptkit::alloc_audit::detail::release(p); }
void operator delete(void* p, std::size_t, std::align_val_t) noexcept { adaptkit::alloc_audit::detail::release(p); }
void operator delete[](void* p, std::size_t, std::align_val_t) noexcept { adaptkit::alloc_audit::detail::release(p); }
