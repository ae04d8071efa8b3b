#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgespeech/audio.hpp"
#include "edgespeech/nn.hpp"

namespace edgespeech {

/// T x D matrix of per-frame acoustic features, row per frame.
using FeatureMatrix = Matrix;

/// The engine's canonical input rate; spectrogram() rejects anything else.
inline constexpr int kCanonicalSampleRate = 16000;

/// Front-end configuration. Defaults: 25 ms window / 10 ms hop at 16 kHz,
/// 512-point FFT, 26 mel filters, 9 context frames per side (D = 26*19 = 494).
struct FeatureConfig {
    int window_ms = 25;
    int hop_ms = 10;
    int fft_size = 512;
    int n_mel = 26;      // 0 = raw log-power spectrogram
    int n_context = 9;   // frames stacked on each side

    int window_samples(int sample_rate) const { return sample_rate * window_ms / 1000; }
    int hop_samples(int sample_rate) const { return sample_rate * hop_ms / 1000; }

    /// Feature width before context stacking.
    int base_dim() const { return n_mel > 0 ? n_mel : fft_size / 2 + 1; }
    /// Feature width after context stacking.
    int feature_dim() const { return base_dim() * (2 * n_context + 1); }

    void validate() const {
        if (window_ms <= 0 || hop_ms <= 0) throw std::invalid_argument("feature config: window and hop must be positive");
        if (hop_ms > window_ms) throw std::invalid_argument("feature config: hop must not exceed window");
        if (fft_size <= 0 || (fft_size & (fft_size - 1)) != 0)
            throw std::invalid_argument("feature config: fft_size must be a power of two");
        if (n_mel < 0 || n_context < 0) throw std::invalid_argument("feature config: negative counts");
    }
};

namespace detail {

/// Iterative radix-2 FFT, in place. Size must be a power of two.
inline void fft_radix2(std::vector<double>& re, std::vector<double>& im) {
    const std::size_t n = re.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) {
            std::swap(re[i], re[j]);
            std::swap(im[i], im[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const double wr = std::cos(ang), wi = std::sin(ang);
        for (std::size_t i = 0; i < n; i += len) {
            double cr = 1.0, ci = 0.0;
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::size_t a = i + k, b = i + k + len / 2;
                const double tr = re[b] * cr - im[b] * ci;
                const double ti = re[b] * ci + im[b] * cr;
                re[b] = re[a] - tr;
                im[b] = im[a] - ti;
                re[a] += tr;
                im[a] += ti;
                const double ncr = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = ncr;
            }
        }
    }
}

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular filters spaced evenly on the mel scale from 0 Hz to Nyquist.
/// Returned as an n_mel x n_bins weight matrix (peaks at 1, unnormalized).
inline std::vector<std::vector<float>> mel_filterbank(int n_mel, int n_bins, int fft_size,
                                                      int sample_rate) {
    const double mel_max = hz_to_mel(sample_rate / 2.0);
    std::vector<double> hz_points(static_cast<std::size_t>(n_mel) + 2);
    for (int i = 0; i < n_mel + 2; ++i)
        hz_points[i] = mel_to_hz(mel_max * i / (n_mel + 1));

    std::vector<std::vector<float>> fb(n_mel, std::vector<float>(n_bins, 0.0f));
    for (int m = 0; m < n_mel; ++m) {
        const double lo = hz_points[m], mid = hz_points[m + 1], hi = hz_points[m + 2];
        for (int k = 0; k < n_bins; ++k) {
            const double f = static_cast<double>(k) * sample_rate / fft_size;
            double w = 0.0;
            if (f > lo && f < mid)
                w = (f - lo) / (mid - lo);
            else if (f >= mid && f < hi)
                w = (hi - f) / (hi - mid);
            fb[m][k] = static_cast<float>(w);
        }
    }
    return fb;
}

inline std::vector<float> hann_window(int n) {
    std::vector<float> w(n);
    if (n == 1) {
        w[0] = 1.0f;
        return w;
    }
    for (int i = 0; i < n; ++i)
        w[i] = static_cast<float>(0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1)));
    return w;
}

}  // namespace detail

/// Log-power spectrogram (or log-mel when cfg.n_mel > 0).
///
/// Frames of window_ms with hop_ms stride, Hann window, magnitude-squared FFT,
/// then log(power + 1e-10). Frame count T = 1 + floor((N - W) / H).
inline FeatureMatrix spectrogram(const AudioBuffer& buf, const FeatureConfig& cfg = {}) {
    cfg.validate();
    if (buf.sample_rate != kCanonicalSampleRate)
        throw std::invalid_argument("spectrogram: expected " + std::to_string(kCanonicalSampleRate) +
                                    " Hz input, got " + std::to_string(buf.sample_rate));
    const int w = cfg.window_samples(buf.sample_rate);
    const int h = cfg.hop_samples(buf.sample_rate);
    if (cfg.fft_size < w)
        throw std::invalid_argument("spectrogram: fft_size smaller than the window");
    const auto n = buf.samples.size();
    if (n < static_cast<std::size_t>(w))
        throw std::invalid_argument("spectrogram: audio shorter than one window");

    constexpr double kLogFloor = 1e-10;
    const std::size_t frames = 1 + (n - static_cast<std::size_t>(w)) / static_cast<std::size_t>(h);
    const int n_bins = cfg.fft_size / 2 + 1;
    const auto window = detail::hann_window(w);
    const auto mel = cfg.n_mel > 0
                         ? detail::mel_filterbank(cfg.n_mel, n_bins, cfg.fft_size, buf.sample_rate)
                         : std::vector<std::vector<float>>{};

    FeatureMatrix feat(frames, static_cast<std::size_t>(cfg.base_dim()));
    std::vector<double> re(static_cast<std::size_t>(cfg.fft_size));
    std::vector<double> im(static_cast<std::size_t>(cfg.fft_size));
    std::vector<double> power(static_cast<std::size_t>(n_bins));

    for (std::size_t t = 0; t < frames; ++t) {
        const float* src = buf.samples.data() + t * static_cast<std::size_t>(h);
        std::fill(re.begin(), re.end(), 0.0);
        std::fill(im.begin(), im.end(), 0.0);
        for (int i = 0; i < w; ++i) re[i] = static_cast<double>(src[i]) * window[i];
        detail::fft_radix2(re, im);
        for (int k = 0; k < n_bins; ++k) power[k] = re[k] * re[k] + im[k] * im[k];

        float* out = feat.row(t);
        if (cfg.n_mel > 0) {
            for (int m = 0; m < cfg.n_mel; ++m) {
                double acc = 0.0;
                for (int k = 0; k < n_bins; ++k) acc += mel[m][k] * power[k];
                out[m] = static_cast<float>(std::log(acc + kLogFloor));
            }
        } else {
            for (int k = 0; k < n_bins; ++k)
                out[k] = static_cast<float>(std::log(power[k] + kLogFloor));
        }
    }
    return feat;
}

/// Widen each frame to the concatenation of frames t-C .. t+C, zero-padded at
/// the utterance edges. T is unchanged; D becomes D * (2C + 1).
inline FeatureMatrix add_context(const FeatureMatrix& feat, int n_context) {
    if (feat.rows == 0) throw std::invalid_argument("add_context: empty feature matrix");
    if (n_context < 0) throw std::invalid_argument("add_context: negative context");
    if (n_context == 0) return feat;

    const std::size_t d = feat.cols;
    const int span = 2 * n_context + 1;
    FeatureMatrix out(feat.rows, d * static_cast<std::size_t>(span));
    for (std::size_t t = 0; t < feat.rows; ++t) {
        float* dst = out.row(t);
        for (int c = -n_context; c <= n_context; ++c) {
            const auto block = static_cast<std::size_t>(c + n_context) * d;
            const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) + c;
            if (src >= 0 && src < static_cast<std::ptrdiff_t>(feat.rows))
                std::copy_n(feat.row(static_cast<std::size_t>(src)), d, dst + block);
            // out of range stays zero
        }
    }
    return out;
}

/// Per-column standardization over the utterance: (x - mean) / (stddev + 1e-8).
inline FeatureMatrix normalize(const FeatureMatrix& feat) {
    if (feat.rows == 0) throw std::invalid_argument("normalize: empty feature matrix");
    FeatureMatrix out(feat.rows, feat.cols);
    const auto t_count = static_cast<double>(feat.rows);
    for (std::size_t c = 0; c < feat.cols; ++c) {
        double sum = 0.0;
        for (std::size_t t = 0; t < feat.rows; ++t) sum += feat.at(t, c);
        const double mean = sum / t_count;
        double var = 0.0;
        for (std::size_t t = 0; t < feat.rows; ++t) {
            const double d = feat.at(t, c) - mean;
            var += d * d;
        }
        const double stddev = std::sqrt(var / t_count);
        const double inv = 1.0 / (stddev + 1e-8);
        for (std::size_t t = 0; t < feat.rows; ++t)
            out.at(t, c) = static_cast<float>((feat.at(t, c) - mean) * inv);
    }
    return out;
}

}  // namespace edgespeech
