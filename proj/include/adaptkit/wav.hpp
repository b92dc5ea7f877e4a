// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "adaptkit/bytes.hpp"
#include "adaptkit/core.hpp"

namespace adaptkit {

struct WavAudio {
  SampleRate rate;
  AudioBlock audio;
};

namespace detail {

inline constexpr std::uint16_t kWavPcm = 1;
inline constexpr std::uint16_t kWavFloat = 3;
inline constexpr std::uint16_t kWavExtensible = 0xFFFE;

}  // namespace detail

/// Decodes RIFF/WAVE holding 16-bit PCM or 32-bit IEEE float. Unknown chunks
/// are skipped. Malformed data raises IoError.
inline WavAudio decode_wav(std::span<const std::uint8_t> data) {
  try {
    ByteReader r(data, ErrorKind::InvalidConfig, "wav");
    if (r.str(4) != "RIFF") r.error("missing RIFF tag");
    r.u32();
    if (r.str(4) != "WAVE") r.error("missing WAVE tag");

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    while (r.remaining() >= 8) {
      const std::string id = r.str(4);
      const std::uint32_t size = r.u32();
      if (id == "fmt ") {
        if (size < 16) r.error("fmt chunk too small");
        auto body = r.raw(size);
        ByteReader f(body, ErrorKind::InvalidConfig, "wav fmt");
        format = f.u16();
        channels = f.u16();
        rate = f.u32();
        f.u32();
        f.u16();
        bits = f.u16();
        if (format == detail::kWavExtensible) {
          if (size < 26) r.error("extensible fmt chunk too small");
          f.u16();
          f.u16();
          f.u32();
          format = f.u16();
        }
        have_fmt = true;
      } else if (id == "data") {
        if (!have_fmt) r.error("data chunk before fmt chunk");
        if (channels < 1 || channels > kMaxChannels)
          r.error("unsupported channel count " + std::to_string(channels));
        if (rate == 0) r.error("zero sample rate");
        const bool pcm16 = format == detail::kWavPcm && bits == 16;
        const bool f32 = format == detail::kWavFloat && bits == 32;
        if (!pcm16 && !f32) r.error("only 16-bit PCM and 32-bit float are supported");
        const std::size_t width = bits / 8;
        const std::size_t frames = std::min<std::size_t>(size, r.remaining()) / (width * channels);
        WavAudio out{SampleRate(rate), AudioBlock(channels, frames)};
        for (std::size_t i = 0; i < frames; ++i) {
          for (int c = 0; c < channels; ++c) {
            out.audio.at(c, i) = pcm16 ? static_cast<float>(static_cast<std::int16_t>(r.u16())) / 32768.0f : r.f32();
          }
        }
        return out;
      } else {
        r.raw(std::min<std::uint64_t>(size + (size & 1u), r.remaining()));
      }
    }
    r.error("no data chunk");
  } catch (const AdaptError& e) {
    throw IoError(e.what());
  }
}

/// Encodes 32-bit float RIFF/WAVE.
inline Bytes encode_wav(const AudioBlock& audio, SampleRate rate) {
  const auto ch = static_cast<std::uint32_t>(audio.channels());
  const auto data_bytes = static_cast<std::uint64_t>(audio.frames()) * ch * 4;
  if (data_bytes > 0xFFFFFFFFull - 36) fail(ErrorKind::InvalidConfig, "audio too long for RIFF");
  ByteWriter w;
  w.raw(std::string("RIFF"));
  w.u32(static_cast<std::uint32_t>(36 + data_bytes));
  w.raw(std::string("WAVEfmt "));
  w.u32(16);
  w.u16(detail::kWavFloat);
  w.u16(static_cast<std::uint16_t>(ch));
  w.u32(static_cast<std::uint32_t>(rate.hz()));
  w.u32(static_cast<std::uint32_t>(rate.hz()) * ch * 4);
  w.u16(static_cast<std::uint16_t>(ch * 4));
  w.u16(32);
  w.raw(std::string("data"));
  w.u32(static_cast<std::uint32_t>(data_bytes));
  w.bytes().reserve(w.bytes().size() + data_bytes);
  for (std::size_t i = 0; i < audio.frames(); ++i)
    for (int c = 0; c < audio.channels(); ++c) w.f32(audio.at(c, i));
  return w.take();
}

/// 16-bit PCM writer, used to produce fixtures for the reader.
inline Bytes encode_wav_pcm16(const AudioBlock& audio, SampleRate rate) {
  const auto ch = static_cast<std::uint32_t>(audio.channels());
  const auto data_bytes = static_cast<std::uint32_t>(audio.frames() * ch * 2);
  ByteWriter w;
  w.raw(std::string("RIFF"));
  w.u32(36 + data_bytes);
  w.raw(std::string("WAVEfmt "));
  w.u32(16);
  w.u16(detail::kWavPcm);
  w.u16(static_cast<std::uint16_t>(ch));
  w.u32(static_cast<std::uint32_t>(rate.hz()));
  w.u32(static_cast<std::uint32_t>(rate.hz()) * ch * 2);
  w.u16(static_cast<std::uint16_t>(ch * 2));
  w.u16(16);
  w.raw(std::string("data"));
  w.u32(data_bytes);
  for (std::size_t i = 0; i < audio.frames(); ++i) {
    for (int c = 0; c < audio.channels(); ++c) {
      const float s = std::clamp(audio.at(c, i), -1.0f, 32767.0f / 32768.0f);
      w.u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(s * 32768.0f))));
    }
  }
  return w.take();
}

inline WavAudio read_wav(const std::string& path) { return decode_wav(read_file(path)); }

inline void write_wav(const std::string& path, const AudioBlock& audio, SampleRate rate) {
  write_file(path, encode_wav(audio, rate));
}

}  // namespace adaptkit
