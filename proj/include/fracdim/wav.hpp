#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracdim/errors.hpp"
#include "fracdim/time_series.hpp"

namespace fracdim {

enum class SampleFormat {
    pcm_u8,
    pcm_s16,
    pcm_s24,
    pcm_s32,
    ieee_float32,
};

inline const char* to_string(SampleFormat f) {
    switch (f) {
        case SampleFormat::pcm_u8: return "u8";
        case SampleFormat::pcm_s16: return "s16";
        case SampleFormat::pcm_s24: return "s24";
        case SampleFormat::pcm_s32: return "s32";
        case SampleFormat::ieee_float32: return "f32";
    }
    return "unknown";
}

// Decoded audio: one vector of normalized samples per channel, all the
// same length. Integer depths map onto [-1, 1) via s / 2^(bits-1)
// (8-bit unsigned as (s - 128) / 128); float payloads pass through.
struct AudioClip {
    std::uint32_t sample_rate = 44100;
    std::vector<std::vector<double>> channels;

    std::size_t frame_count() const { return channels.empty() ? 0 : channels[0].size(); }
};

namespace detail {

inline std::uint16_t read_u16(std::span<const std::uint8_t> d, std::size_t off) {
    return static_cast<std::uint16_t>(d[off] | (d[off + 1] << 8));
}

inline std::uint32_t read_u32(std::span<const std::uint8_t> d, std::size_t off) {
    return static_cast<std::uint32_t>(d[off]) |
           (static_cast<std::uint32_t>(d[off + 1]) << 8) |
           (static_cast<std::uint32_t>(d[off + 2]) << 16) |
           (static_cast<std::uint32_t>(d[off + 3]) << 24);
}

inline bool chunk_id_is(std::span<const std::uint8_t> d, std::size_t off, const char* id) {
    return d[off] == static_cast<std::uint8_t>(id[0]) &&
           d[off + 1] == static_cast<std::uint8_t>(id[1]) &&
           d[off + 2] == static_cast<std::uint8_t>(id[2]) &&
           d[off + 3] == static_cast<std::uint8_t>(id[3]);
}

inline void push_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

inline void push_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

} // namespace detail

// Decodes a RIFF/WAVE buffer. PCM (format code 1) at 8/16/24/32 bits and
// IEEE float (code 3) at 32 bits are supported. Any malformed input
// raises WavError with a kind describing the first defect found; the
// parser never reads out of bounds.
inline AudioClip parse_wav(std::span<const std::uint8_t> data) {
    if (data.size() < 4)
        throw WavError(WavErrorKind::truncated, "buffer smaller than a RIFF header");
    if (!detail::chunk_id_is(data, 0, "RIFF"))
        throw WavError(WavErrorKind::not_riff, "missing RIFF magic");
    if (data.size() < 12)
        throw WavError(WavErrorKind::truncated, "buffer ends inside the RIFF header");
    if (!detail::chunk_id_is(data, 8, "WAVE"))
        throw WavError(WavErrorKind::not_riff, "RIFF form is not WAVE");

    bool have_fmt = false, have_data = false;
    std::uint16_t format_code = 0, num_channels = 0, block_align = 0, bits = 0;
    std::uint32_t sample_rate = 0;
    std::size_t data_off = 0, data_len = 0;

    std::size_t off = 12;
    while (off + 8 <= data.size()) {
        const std::uint32_t csize = detail::read_u32(data, off + 4);
        const std::size_t payload = off + 8;
        if (csize > data.size() - payload)
            throw WavError(WavErrorKind::truncated, "chunk extends past the end of the buffer");

        if (detail::chunk_id_is(data, off, "fmt ")) {
            if (have_fmt)
                throw WavError(WavErrorKind::duplicate_fmt, "second fmt chunk");
            if (csize < 16)
                throw WavError(WavErrorKind::inconsistent, "fmt chunk shorter than 16 bytes");
            format_code = detail::read_u16(data, payload + 0);
            num_channels = detail::read_u16(data, payload + 2);
            sample_rate = detail::read_u32(data, payload + 4);
            block_align = detail::read_u16(data, payload + 12);
            bits = detail::read_u16(data, payload + 14);
            have_fmt = true;
        } else if (detail::chunk_id_is(data, off, "data")) {
            if (have_data)
                throw WavError(WavErrorKind::duplicate_data, "second data chunk");
            data_off = payload;
            data_len = csize;
            have_data = true;
        }
        // Unknown chunks are skipped; RIFF pads odd-sized chunks.
        off = payload + csize + (csize & 1);
    }

    if (!have_fmt)
        throw WavError(WavErrorKind::missing_fmt, "no fmt chunk");
    if (!have_data)
        throw WavError(WavErrorKind::missing_data, "no data chunk");
    if (num_channels == 0)
        throw WavError(WavErrorKind::inconsistent, "fmt declares zero channels");
    if (sample_rate == 0)
        throw WavError(WavErrorKind::inconsistent, "fmt declares zero sample rate");

    if (format_code == 1) {
        if (bits != 8 && bits != 16 && bits != 24 && bits != 32)
            throw WavError(WavErrorKind::unsupported_depth,
                           "PCM bit depth " + std::to_string(bits));
    } else if (format_code == 3) {
        if (bits != 32)
            throw WavError(WavErrorKind::unsupported_depth,
                           "float bit depth " + std::to_string(bits));
    } else {
        throw WavError(WavErrorKind::unsupported_format,
                       "format code " + std::to_string(format_code));
    }

    const std::size_t bytes_per = bits / 8;
    const std::size_t expect_align = bytes_per * num_channels;
    if (block_align != expect_align)
        throw WavError(WavErrorKind::inconsistent,
                       "block align " + std::to_string(block_align) + " does not match " +
                           std::to_string(expect_align));
    if (data_len % expect_align != 0)
        throw WavError(WavErrorKind::inconsistent,
                       "data length is not a whole number of frames");

    const std::size_t frames = data_len / expect_align;
    AudioClip clip;
    clip.sample_rate = sample_rate;
    clip.channels.assign(num_channels, std::vector<double>(frames));

    for (std::size_t f = 0; f < frames; ++f) {
        std::size_t at = data_off + f * expect_align;
        for (std::size_t ch = 0; ch < num_channels; ++ch, at += bytes_per) {
            double v = 0.0;
            if (format_code == 3) {
                const std::uint32_t raw = detail::read_u32(data, at);
                v = static_cast<double>(std::bit_cast<float>(raw));
            } else if (bits == 8) {
                v = (static_cast<int>(data[at]) - 128) / 128.0;
            } else if (bits == 16) {
                const auto s = static_cast<std::int16_t>(detail::read_u16(data, at));
                v = s / 32768.0;
            } else if (bits == 24) {
                std::int32_t s = static_cast<std::int32_t>(data[at]) |
                                 (static_cast<std::int32_t>(data[at + 1]) << 8) |
                                 (static_cast<std::int32_t>(data[at + 2]) << 16);
                if (s & 0x800000) s |= static_cast<std::int32_t>(0xff000000u);
                v = s / 8388608.0;
            } else { // 32
                const auto s = static_cast<std::int32_t>(detail::read_u32(data, at));
                v = s / 2147483648.0;
            }
            clip.channels[ch][f] = v;
        }
    }
    return clip;
}

namespace detail {

inline std::int64_t quantize(double v, std::int64_t scale, std::int64_t lo, std::int64_t hi) {
    const auto q = static_cast<std::int64_t>(std::llround(v * static_cast<double>(scale)));
    return std::max(lo, std::min(hi, q));
}

} // namespace detail

// Encodes a clip as a canonical minimal WAV (fmt + data). Samples outside
// [-1, 1] are clamped; *clipped_count (when given) receives how many.
inline std::vector<std::uint8_t> write_wav(const AudioClip& clip, SampleFormat format,
                                           std::size_t* clipped_count = nullptr) {
    if (clip.channels.empty())
        throw std::invalid_argument("clip has no channels");
    if (clip.sample_rate == 0)
        throw std::invalid_argument("clip sample rate is zero");
    const std::size_t frames = clip.channels[0].size();
    for (const auto& ch : clip.channels) {
        if (ch.size() != frames)
            throw std::invalid_argument("clip channels have unequal lengths");
        for (double v : ch)
            if (!std::isfinite(v))
                throw std::invalid_argument("clip contains a non-finite sample");
    }

    const std::uint16_t num_channels = static_cast<std::uint16_t>(clip.channels.size());
    if (clip.channels.size() > 0xffff)
        throw std::invalid_argument("too many channels for WAV");

    std::uint16_t bits = 0, code = 1;
    switch (format) {
        case SampleFormat::pcm_u8: bits = 8; break;
        case SampleFormat::pcm_s16: bits = 16; break;
        case SampleFormat::pcm_s24: bits = 24; break;
        case SampleFormat::pcm_s32: bits = 32; break;
        case SampleFormat::ieee_float32: bits = 32; code = 3; break;
    }
    const std::size_t bytes_per = bits / 8;
    const std::size_t block_align = bytes_per * num_channels;
    const std::size_t data_len = frames * block_align;
    const std::size_t pad = data_len & 1;

    std::size_t clipped = 0;
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_len + pad);

    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    detail::push_u32(out, static_cast<std::uint32_t>(36 + data_len + pad));
    out.insert(out.end(), {'W', 'A', 'V', 'E'});
    out.insert(out.end(), {'f', 'm', 't', ' '});
    detail::push_u32(out, 16);
    detail::push_u16(out, code);
    detail::push_u16(out, num_channels);
    detail::push_u32(out, clip.sample_rate);
    detail::push_u32(out, static_cast<std::uint32_t>(clip.sample_rate * block_align));
    detail::push_u16(out, static_cast<std::uint16_t>(block_align));
    detail::push_u16(out, bits);
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    detail::push_u32(out, static_cast<std::uint32_t>(data_len));

    for (std::size_t f = 0; f < frames; ++f) {
        for (std::size_t ch = 0; ch < num_channels; ++ch) {
            double v = clip.channels[ch][f];
            if (v < -1.0) { v = -1.0; ++clipped; }
            else if (v > 1.0) { v = 1.0; ++clipped; }

            switch (format) {
                case SampleFormat::pcm_u8: {
                    const auto q = detail::quantize(v, 128, -128, 127);
                    out.push_back(static_cast<std::uint8_t>(q + 128));
                    break;
                }
                case SampleFormat::pcm_s16: {
                    const auto q = detail::quantize(v, 32768, -32768, 32767);
                    detail::push_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
                    break;
                }
                case SampleFormat::pcm_s24: {
                    const auto q = detail::quantize(v, 8388608, -8388608, 8388607);
                    const auto u = static_cast<std::uint32_t>(static_cast<std::int32_t>(q));
                    out.push_back(static_cast<std::uint8_t>(u & 0xff));
                    out.push_back(static_cast<std::uint8_t>((u >> 8) & 0xff));
                    out.push_back(static_cast<std::uint8_t>((u >> 16) & 0xff));
                    break;
                }
                case SampleFormat::pcm_s32: {
                    const auto q = detail::quantize(v, 2147483648LL, -2147483648LL, 2147483647LL);
                    detail::push_u32(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(q)));
                    break;
                }
                case SampleFormat::ieee_float32: {
                    detail::push_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
                    break;
                }
            }
        }
    }
    if (pad)
        out.push_back(0);

    if (clipped_count)
        *clipped_count = clipped;
    return out;
}

// Averages all channels into one series. A stereo clip with identical
// channels averages back to the original channel exactly.
inline TimeSeries to_mono(const AudioClip& clip) {
    if (clip.channels.empty())
        throw std::invalid_argument("clip has no channels");
    if (clip.sample_rate == 0)
        throw std::invalid_argument("clip sample rate is zero");
    const std::size_t frames = clip.channels[0].size();
    for (const auto& ch : clip.channels)
        if (ch.size() != frames)
            throw std::invalid_argument("clip channels have unequal lengths");

    TimeSeries ts{{}, static_cast<double>(clip.sample_rate)};
    ts.samples.resize(frames);
    const double inv = 1.0 / static_cast<double>(clip.channels.size());
    for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (const auto& ch : clip.channels)
            acc += ch[f];
        ts.samples[f] = acc * inv;
    }
    return ts;
}

} // namespace fracdim
