#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "edgespeech/acoustic_model.hpp"
#include "edgespeech/alphabet.hpp"
#include "edgespeech/nn.hpp"
#include "edgespeech/trie.hpp"

namespace edgespeech {

struct BeamConfig {
    std::uint32_t beam_width = 64;
    float lm_weight = 0.75f;  // alpha, weight on the vocabulary score
    float word_bonus = 1.0f;  // beta, added per completed word
};

struct Transcript {
    std::string text;
    double log_prob = 0.0;
    /// Frame index at which each character of `text` was first emitted.
    std::vector<std::uint32_t> frame_spans;
};

namespace detail {

/// Log-domain floor standing in for log(0); keeps -inf out of the arithmetic.
inline constexpr double kLogZero = -1e30;

inline double log_clamped(double p) { return p > 0.0 ? std::log(p) : kLogZero; }

inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b <= kLogZero) return a;
    return a + std::log1p(std::exp(b - a));
}

inline void require_class_match(const CharDistribution& dist, const Alphabet& ab,
                                const char* who) {
    if (dist.cols != ab.num_classes())
        throw std::invalid_argument(std::string(who) + ": distribution has " +
                                    std::to_string(dist.cols) + " classes but alphabet expects " +
                                    std::to_string(ab.num_classes()));
}

}  // namespace detail

/// Best-path decode: per-frame argmax (ties to the lowest class index),
/// collapse consecutive duplicates, drop blanks.
/// log_prob is the summed log of the per-frame maxima.
inline Transcript greedy_decode(const CharDistribution& dist, const Alphabet& ab) {
    detail::require_class_match(dist, ab, "greedy_decode");
    const std::size_t blank = ab.blank_index();

    Transcript out;
    std::size_t prev = blank;
    for (std::size_t t = 0; t < dist.rows; ++t) {
        const float* row = dist.row(t);
        std::size_t best = 0;
        for (std::size_t k = 1; k < dist.cols; ++k)
            if (row[k] > row[best]) best = k;
        out.log_prob += detail::log_clamped(row[best]);
        if (best != blank && best != prev) {
            out.text.push_back(ab.char_at(best));
            out.frame_spans.push_back(static_cast<std::uint32_t>(t));
        }
        prev = best;
    }
    return out;
}

namespace detail {

struct PrefixState {
    double p_blank = kLogZero;      // log P(prefix, last path symbol blank)
    double p_non_blank = kLogZero;  // log P(prefix, last path symbol non-blank)
    double lm = 0.0;                // accumulated vocabulary score + word bonus
    std::vector<std::uint32_t> frames;

    double score() const { return log_add(p_blank, p_non_blank) + lm; }
};

}  // namespace detail

/// CTC prefix beam search over collapsed labelings, keeping (p_blank,
/// p_non_blank) per prefix in log space.
///
/// With a scorer, a word completed at a space boundary contributes
/// lm_weight * log P_vocab (0 if the word is in the trie, -10 otherwise) plus
/// word_bonus. Without a scorer the score is pure CTC. Deterministic: beams
/// are ranked by (score, then lexicographically smaller prefix).
inline Transcript beam_decode(const CharDistribution& dist, const Alphabet& ab,
                              const BeamConfig& cfg = {}, const VocabTrie* scorer = nullptr) {
    detail::require_class_match(dist, ab, "beam_decode");
    if (cfg.beam_width < 1) throw std::invalid_argument("beam_decode: beam_width must be >= 1");
    using detail::PrefixState;

    constexpr double kOovLogPenalty = -10.0;
    const std::size_t blank = ab.blank_index();

    // Vocabulary contribution when `prefix + ' '` completes a word.
    auto word_score = [&](std::string_view prefix) -> double {
        if (scorer == nullptr) return 0.0;
        const auto space = prefix.find_last_of(' ');
        const std::string_view word =
            space == std::string_view::npos ? prefix : prefix.substr(space + 1);
        if (word.empty()) return 0.0;  // collapsed double space, no word completed
        const double vocab = scorer->contains(word) ? 0.0 : kOovLogPenalty;
        return static_cast<double>(cfg.lm_weight) * vocab + static_cast<double>(cfg.word_bonus);
    };

    std::map<std::string, PrefixState> beam;
    beam[""] = PrefixState{0.0, detail::kLogZero, 0.0, {}};

    for (std::size_t t = 0; t < dist.rows; ++t) {
        const float* row = dist.row(t);
        const double log_blank = detail::log_clamped(row[blank]);
        std::map<std::string, PrefixState> next;

        for (const auto& [prefix, state] : beam) {
            const double total = detail::log_add(state.p_blank, state.p_non_blank);

            // Path stays on this prefix through a blank.
            {
                auto [it, inserted] = next.try_emplace(prefix);
                if (inserted) {
                    it->second.lm = state.lm;
                    it->second.frames = state.frames;
                }
                it->second.p_blank = detail::log_add(it->second.p_blank, total + log_blank);
            }

            // Path stays on this prefix by repeating its last character.
            if (!prefix.empty()) {
                const auto last = ab.index_of(prefix.back());
                const double log_last = detail::log_clamped(row[*last]);
                auto [it, inserted] = next.try_emplace(prefix);
                if (inserted) {
                    it->second.lm = state.lm;
                    it->second.frames = state.frames;
                }
                it->second.p_non_blank =
                    detail::log_add(it->second.p_non_blank, state.p_non_blank + log_last);
            }

            // Extensions by each non-blank character.
            for (std::size_t k = 0; k < ab.size(); ++k) {
                const double log_k = detail::log_clamped(row[k]);
                const char c = ab.char_at(k);
                std::string extended = prefix + c;

                // A repeated character needs an intervening blank to count as
                // a new emission; only the blank-suffixed mass extends.
                const bool repeat = !prefix.empty() && prefix.back() == c;
                const double mass = repeat ? state.p_blank : total;

                auto [it, inserted] = next.try_emplace(std::move(extended));
                if (inserted) {
                    it->second.lm = state.lm + (c == ' ' ? word_score(prefix) : 0.0);
                    it->second.frames = state.frames;
                    it->second.frames.push_back(static_cast<std::uint32_t>(t));
                }
                it->second.p_non_blank = detail::log_add(it->second.p_non_blank, mass + log_k);
            }
        }

        // Keep the top beam_width prefixes; ties break toward the
        // lexicographically smaller prefix (map order is already lexicographic).
        if (next.size() > cfg.beam_width) {
            std::vector<const std::string*> order;
            order.reserve(next.size());
            for (const auto& [prefix, state] : next) order.push_back(&prefix);
            std::stable_sort(order.begin(), order.end(),
                             [&](const std::string* a, const std::string* b) {
                                 return next.at(*a).score() > next.at(*b).score();
                             });
            std::map<std::string, PrefixState> pruned;
            for (std::size_t i = 0; i < cfg.beam_width; ++i)
                pruned.emplace(*order[i], std::move(next.at(*order[i])));
            next = std::move(pruned);
        }
        beam = std::move(next);
    }

    const std::string* best = nullptr;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const auto& [prefix, state] : beam) {
        const double s = state.score();
        if (best == nullptr || s > best_score) {  // equal scores keep the earlier (smaller) prefix
            best = &prefix;
            best_score = s;
        }
    }

    Transcript out;
    out.text = *best;
    out.log_prob = best_score;
    out.frame_spans = beam.at(*best).frames;
    return out;
}

}  // namespace edgespeech
