#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgespeech/storage.hpp"

namespace edgespeech {

/// Mono audio, samples normalized to [-1, 1].
struct AudioBuffer {
    std::vector<float> samples;
    int sample_rate = 0;

    double duration_s() const {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

namespace detail {

inline std::uint16_t get_u16(const std::byte* p) {
    return static_cast<std::uint16_t>(std::to_integer<unsigned>(p[0]) |
                                      (std::to_integer<unsigned>(p[1]) << 8));
}

}  // namespace detail

/// Parse a RIFF/WAVE container holding 16-bit signed PCM, 1 or 2 channels.
/// Stereo is downmixed to mono by arithmetic mean; samples are scaled by
/// 1/32768.
inline AudioBuffer load_wav(const std::string& path) {
    std::vector<std::byte> bytes;
    try {
        bytes = read_file_bytes(path);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("cannot open WAV file: " + path);
    }
    auto fail = [&](const std::string& why) -> std::runtime_error {
        return std::runtime_error("malformed WAV header (" + why + "): " + path);
    };

    if (bytes.size() < 12) throw fail("file too small");
    if (std::memcmp(bytes.data(), "RIFF", 4) != 0) throw fail("missing RIFF magic");
    if (std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) throw fail("missing WAVE tag");

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    const std::byte* pcm = nullptr;
    std::size_t pcm_bytes = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const std::uint32_t chunk_size = get_u32(bytes.data() + pos + 4);
        pos += 8;
        if (pos + chunk_size > bytes.size()) throw fail("truncated chunk");
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw fail("short fmt chunk");
            const std::byte* f = bytes.data() + pos;
            format = detail::get_u16(f);
            channels = detail::get_u16(f + 2);
            rate = get_u32(f + 4);
            bits = detail::get_u16(f + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            pcm = bytes.data() + pos;
            pcm_bytes = chunk_size;
        }
        pos += chunk_size + (chunk_size & 1);  // chunks are word-aligned
    }

    if (!have_fmt || pcm == nullptr) throw fail("missing fmt or data chunk");
    if (format != 1)
        throw std::runtime_error("unsupported WAV compression code " + std::to_string(format) +
                                 ": " + path);
    if (bits != 16)
        throw std::runtime_error("unsupported WAV bit depth " + std::to_string(bits) + ": " + path);
    if (channels < 1 || channels > 2)
        throw std::runtime_error("unsupported WAV channel count " + std::to_string(channels) +
                                 ": " + path);
    if (rate == 0) throw fail("zero sample rate");

    const std::size_t frame_bytes = 2u * channels;
    const std::size_t frames = pcm_bytes / frame_bytes;
    AudioBuffer buf;
    buf.sample_rate = static_cast<int>(rate);
    buf.samples.resize(frames);
    constexpr float kScale = 1.0f / 32768.0f;
    for (std::size_t i = 0; i < frames; ++i) {
        const std::byte* fp = pcm + i * frame_bytes;
        auto sample = [&](std::size_t ch) {
            return static_cast<std::int16_t>(detail::get_u16(fp + 2 * ch));
        };
        if (channels == 1) {
            buf.samples[i] = static_cast<float>(sample(0)) * kScale;
        } else {
            const float l = static_cast<float>(sample(0)) * kScale;
            const float r = static_cast<float>(sample(1)) * kScale;
            buf.samples[i] = 0.5f * (l + r);
        }
    }
    return buf;
}

/// Write mono 16-bit PCM. Utility for producing fixtures and test clips.
inline void save_wav(const std::string& path, const AudioBuffer& buf) {
    if (buf.sample_rate <= 0) throw std::invalid_argument("save_wav: sample_rate must be positive");
    const std::uint32_t n = static_cast<std::uint32_t>(buf.samples.size());
    const std::uint32_t data_bytes = n * 2;
    std::vector<std::byte> out;
    out.reserve(44 + data_bytes);
    auto put_tag = [&](const char* t) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>(t[i]));
    };
    auto put_u16v = [&](std::uint16_t v) {
        out.push_back(static_cast<std::byte>(v & 0xff));
        out.push_back(static_cast<std::byte>(v >> 8));
    };
    const auto rate = static_cast<std::uint32_t>(buf.sample_rate);
    put_tag("RIFF");
    put_u32(out, 36 + data_bytes);
    put_tag("WAVE");
    put_tag("fmt ");
    put_u32(out, 16);
    put_u16v(1);  // PCM
    put_u16v(1);  // mono
    put_u32(out, rate);
    put_u32(out, rate * 2);  // byte rate
    put_u16v(2);             // block align
    put_u16v(16);            // bits
    put_tag("data");
    put_u32(out, data_bytes);
    for (float s : buf.samples) {
        // Inverse of the loader's s/32768 convention; +1.0 saturates at 32767.
        const float c = std::min(1.0f, std::max(-1.0f, s));
        const long q = std::lrintf(c * 32768.0f);
        const auto v = static_cast<std::int16_t>(std::min(32767L, std::max(-32768L, q)));
        put_u16v(static_cast<std::uint16_t>(v));
    }
    atomic_write_file(path, out);
}

/// Linear-interpolation resampling. Output length = round(n * target/source).
/// Identity (bitwise) when the rates already match.
inline AudioBuffer resample(const AudioBuffer& buf, int target_rate) {
    if (buf.samples.empty()) throw std::invalid_argument("resample: empty buffer");
    if (target_rate <= 0) throw std::invalid_argument("resample: target rate must be positive");
    if (buf.sample_rate == target_rate) return buf;

    const std::size_t n_in = buf.samples.size();
    const double ratio = static_cast<double>(target_rate) / buf.sample_rate;
    const auto n_out = static_cast<std::size_t>(std::llround(static_cast<double>(n_in) * ratio));

    AudioBuffer out;
    out.sample_rate = target_rate;
    out.samples.resize(n_out);
    const double step = static_cast<double>(buf.sample_rate) / target_rate;
    for (std::size_t i = 0; i < n_out; ++i) {
        const double pos = static_cast<double>(i) * step;
        auto idx = static_cast<std::size_t>(pos);
        if (idx >= n_in - 1) {
            out.samples[i] = buf.samples[n_in - 1];
            continue;
        }
        const float frac = static_cast<float>(pos - static_cast<double>(idx));
        out.samples[i] = buf.samples[idx] + frac * (buf.samples[idx + 1] - buf.samples[idx]);
    }
    return out;
}

}  // namespace edgespeech
