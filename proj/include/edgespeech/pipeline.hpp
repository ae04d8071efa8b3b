#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>

#include "edgespeech/acoustic_model.hpp"
#include "edgespeech/alphabet.hpp"
#include "edgespeech/audio.hpp"
#include "edgespeech/decoder.hpp"
#include "edgespeech/features.hpp"
#include "edgespeech/model_io.hpp"
#include "edgespeech/trie.hpp"

namespace edgespeech {

enum class DecodeMode { Greedy, Beam };

struct TranscribeOptions {
    LoadStrategy strategy = LoadStrategy::Eager;
    DecodeMode decode = DecodeMode::Greedy;
    BeamConfig beam{};
    std::string trie_path{};  // empty = decode without a vocabulary scorer
    FeatureConfig features{};
    int threads = 1;       // >= 2 parallelizes the two recurrence directions
    float relu_clip = 0.0f;
};

struct TranscribeResult {
    Transcript transcript;
    ModelDims dims{};
    double load_model_s = 0.0;   // model + alphabet (+ trie) time-to-handle
    double inference_s = 0.0;    // features + forward pass + decode
    double audio_duration_s = 0.0;  // from the WAV header, before resampling
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// End-to-end flow: load model/alphabet/trie, read audio, resample to the
/// canonical rate, extract stacked-and-normalized features, run the forward
/// pass, decode. Stage failures surface as exceptions naming the stage.
inline TranscribeResult transcribe_file(const std::string& model_path,
                                        const std::string& alphabet_path,
                                        const std::string& audio_path,
                                        const TranscribeOptions& opts = {}) {
    TranscribeResult res;

    const auto t_load = std::chrono::steady_clock::now();
    const ModelWeights weights = load_model(model_path, opts.strategy);
    const Alphabet ab = Alphabet::from_file(alphabet_path);
    std::optional<VocabTrie> trie;
    if (!opts.trie_path.empty()) trie = load_trie(opts.trie_path, opts.strategy);
    res.load_model_s = detail::seconds_since(t_load);
    res.dims = weights.dims;

    if (ab.num_classes() != weights.dims.alphabet_size)
        throw std::runtime_error(
            "transcribe: alphabet defines " + std::to_string(ab.num_classes()) +
            " classes but the model expects " + std::to_string(weights.dims.alphabet_size));
    if (opts.features.feature_dim() != static_cast<int>(weights.dims.feat_dim))
        throw std::runtime_error(
            "transcribe: feature configuration yields dimension " +
            std::to_string(opts.features.feature_dim()) + " but the model expects " +
            std::to_string(weights.dims.feat_dim));

    const AudioBuffer audio = load_wav(audio_path);
    res.audio_duration_s = audio.duration_s();

    const auto t_inf = std::chrono::steady_clock::now();
    const AudioBuffer canonical = resample(audio, kCanonicalSampleRate);
    const FeatureMatrix features =
        normalize(add_context(spectrogram(canonical, opts.features), opts.features.n_context));
    ForwardOptions fwd;
    fwd.threads = opts.threads;
    fwd.relu_clip = opts.relu_clip;
    const CharDistribution dist = forward(weights, features, fwd);
    res.transcript = opts.decode == DecodeMode::Beam
                         ? beam_decode(dist, ab, opts.beam, trie ? &*trie : nullptr)
                         : greedy_decode(dist, ab);
    res.inference_s = detail::seconds_since(t_inf);
    return res;
}

}  // namespace edgespeech
