// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "adaptkit/core.hpp"

namespace adaptkit {

/// Fixed-capacity multi-channel FIFO of float frames.
///
/// Storage is allocated once in the constructor. Push and pop copy frames in
/// and out; neither touches the heap. Channel count is not capped at
/// kMaxChannels because the same queue carries parameter lanes.
class CircularQueue {
 public:
  CircularQueue() = default;

  CircularQueue(int channels, std::size_t capacity)
      : channels_(channels), capacity_(capacity), data_(static_cast<std::size_t>(channels) * capacity) {
    if (channels < 1) fail(ErrorKind::InvalidConfig, "queue needs at least one channel");
  }

  int channels() const noexcept { return channels_; }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t fill() const noexcept { return fill_; }
  std::size_t space() const noexcept { return capacity_ - fill_; }
  bool empty() const noexcept { return fill_ == 0; }

  void clear() noexcept {
    read_ = 0;
    fill_ = 0;
  }

  /// Appends `count` frames read from planar memory (`src + c * stride + offset`).
  void push(const float* src, std::size_t stride, std::size_t offset, std::size_t count) {
    if (count > space())
      fail(ErrorKind::InvalidConfig, "circular queue overflow: push " + std::to_string(count) + " into " +
                                         std::to_string(space()) + " free frames");
    std::size_t write = (read_ + fill_) % (capacity_ == 0 ? 1 : capacity_);
    const std::size_t first = std::min(count, capacity_ - write);
    for (int c = 0; c < channels_; ++c) {
      const float* in = src + static_cast<std::size_t>(c) * stride + offset;
      float* lane = lane_ptr(c);
      std::copy_n(in, first, lane + write);
      std::copy_n(in + first, count - first, lane);
    }
    fill_ += count;
  }

  void push(const AudioBlock& block, std::size_t offset, std::size_t count) {
    if (block.channels() != channels_) shape_mismatch("queue channels", channels_, block.channels());
    if (offset + count > block.frames()) shape_mismatch("queue push range", block.frames(), offset + count);
    push(block.samples().data(), block.frames(), offset, count);
  }

  void push(const AudioBlock& block) { push(block, 0, block.frames()); }

  void push_silence(std::size_t count) {
    if (count > space()) fail(ErrorKind::InvalidConfig, "circular queue overflow while pre-seeding");
    std::size_t write = (read_ + fill_) % (capacity_ == 0 ? 1 : capacity_);
    const std::size_t first = std::min(count, capacity_ - write);
    for (int c = 0; c < channels_; ++c) {
      float* lane = lane_ptr(c);
      std::fill_n(lane + write, first, 0.0f);
      std::fill_n(lane, count - first, 0.0f);
    }
    fill_ += count;
  }

  /// Copies the oldest `count` frames out without consuming them. Returns
  /// false (and copies nothing) when fewer than `count` frames are queued.
  bool peek(float* dst, std::size_t stride, std::size_t offset, std::size_t count) const {
    if (count > fill_) return false;
    const std::size_t first = std::min(count, capacity_ - read_);
    for (int c = 0; c < channels_; ++c) {
      float* out = dst + static_cast<std::size_t>(c) * stride + offset;
      const float* lane = lane_ptr(c);
      std::copy_n(lane + read_, first, out);
      std::copy_n(lane, count - first, out + first);
    }
    return true;
  }

  /// Drops the oldest `count` frames. Returns false on underflow, leaving the
  /// queue untouched.
  bool discard(std::size_t count) noexcept {
    if (count > fill_) return false;
    fill_ -= count;
    read_ = fill_ == 0 ? 0 : (read_ + count) % capacity_;
    return true;
  }

  bool pop(float* dst, std::size_t stride, std::size_t offset, std::size_t count) {
    if (!peek(dst, stride, offset, count)) return false;
    discard(count);
    return true;
  }

  /// Pops into frames [offset, offset + count) of `dst`.
  bool pop(AudioBlock& dst, std::size_t offset, std::size_t count) {
    if (dst.channels() != channels_) shape_mismatch("queue channels", channels_, dst.channels());
    if (offset + count > dst.frames()) shape_mismatch("queue pop range", dst.frames(), offset + count);
    return pop(dst.samples().data(), dst.frames(), offset, count);
  }

  bool peek(AudioBlock& dst, std::size_t offset, std::size_t count) const {
    if (dst.channels() != channels_) shape_mismatch("queue channels", channels_, dst.channels());
    if (offset + count > dst.frames()) shape_mismatch("queue peek range", dst.frames(), offset + count);
    return peek(dst.samples().data(), dst.frames(), offset, count);
  }

  /// Allocating convenience; std::nullopt signals underflow.
  std::optional<AudioBlock> pop(std::size_t count) {
    if (count > fill_) return std::nullopt;
    AudioBlock out(channels_, count);
    pop(out, 0, count);
    return out;
  }

 private:
  float* lane_ptr(int c) noexcept { return data_.data() + static_cast<std::size_t>(c) * capacity_; }
  const float* lane_ptr(int c) const noexcept { return data_.data() + static_cast<std::size_t>(c) * capacity_; }

  int channels_ = 1;
  std::size_t capacity_ = 0;
  std::size_t read_ = 0;
  std::size_t fill_ = 0;
  std::vector<float> data_;
};

}  // namespace adaptkit
