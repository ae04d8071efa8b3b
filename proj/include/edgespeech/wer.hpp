#pragma once

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace edgespeech {

/// Alignment counts from a minimum-edit-distance backtrace.
/// S + D + I equals the edit distance; rate = (S + D + I) / ref_len and may
/// exceed 1 when the hypothesis inserts beyond the reference length.
struct ErrorBreakdown {
    std::size_t substitutions = 0;
    std::size_t deletions = 0;
    std::size_t insertions = 0;
    std::size_t ref_len = 0;
    double rate = 0.0;

    std::size_t distance() const { return substitutions + deletions + insertions; }
    bool operator==(const ErrorBreakdown&) const = default;
};

/// Lowercase; keep letters, digits, apostrophes; collapse every other
/// character and whitespace run to a single space; trim.
inline std::string normalize_transcript(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (const char ch : text) {
        const auto u = static_cast<unsigned char>(ch);
        if (std::isalnum(u) || ch == '\'')
            out.push_back(static_cast<char>(std::tolower(u)));
        else if (out.empty() || out.back() != ' ')
            out.push_back(' ');
    }
    if (!out.empty() && out.front() == ' ') out.erase(out.begin());
    if (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

inline std::vector<std::string> tokenize_words(std::string_view text) {
    const std::string norm = normalize_transcript(text);
    std::vector<std::string> words;
    std::string cur;
    for (const char ch : norm) {
        if (ch == ' ') {
            if (!cur.empty()) words.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

namespace detail {

/// Unit-cost Levenshtein over token sequences with a counting backtrace.
/// Ties in the backtrace prefer substitution, then deletion, then insertion.
template <typename T>
ErrorBreakdown edit_breakdown(const std::vector<T>& ref, const std::vector<T>& hyp) {
    const std::size_t r = ref.size(), h = hyp.size();
    std::vector<std::size_t> dp((r + 1) * (h + 1));
    auto cell = [&](std::size_t i, std::size_t j) -> std::size_t& {
        return dp[i * (h + 1) + j];
    };
    for (std::size_t i = 0; i <= r; ++i) cell(i, 0) = i;
    for (std::size_t j = 0; j <= h; ++j) cell(0, j) = j;
    for (std::size_t i = 1; i <= r; ++i)
        for (std::size_t j = 1; j <= h; ++j) {
            const std::size_t diag = cell(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
            const std::size_t del = cell(i - 1, j) + 1;
            const std::size_t ins = cell(i, j - 1) + 1;
            cell(i, j) = std::min(diag, std::min(del, ins));
        }

    ErrorBreakdown out;
    out.ref_len = r;
    std::size_t i = r, j = h;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && cell(i, j) == cell(i - 1, j - 1)) {
            --i, --j;  // match
        } else if (i > 0 && j > 0 && cell(i, j) == cell(i - 1, j - 1) + 1) {
            ++out.substitutions, --i, --j;
        } else if (i > 0 && cell(i, j) == cell(i - 1, j) + 1) {
            ++out.deletions, --i;
        } else {
            ++out.insertions, --j;
        }
    }
    out.rate = static_cast<double>(out.distance()) / static_cast<double>(out.ref_len);
    return out;
}

}  // namespace detail

/// Word error rate: Levenshtein alignment over whitespace-split tokens of
/// the normalized transcripts. Throws if the reference normalizes to zero
/// tokens.
inline ErrorBreakdown word_error_rate(std::string_view ref, std::string_view hyp) {
    const std::vector<std::string> r = tokenize_words(ref);
    if (r.empty()) throw std::invalid_argument("word_error_rate: empty reference");
    return detail::edit_breakdown(r, tokenize_words(hyp));
}

/// Character error rate: the same alignment over the characters of the
/// normalized transcripts, spaces included.
inline ErrorBreakdown char_error_rate(std::string_view ref, std::string_view hyp) {
    const std::string rn = normalize_transcript(ref);
    if (rn.empty()) throw std::invalid_argument("char_error_rate: empty reference");
    const std::string hn = normalize_transcript(hyp);
    return detail::edit_breakdown(std::vector<char>(rn.begin(), rn.end()),
                                  std::vector<char>(hn.begin(), hn.end()));
}

}  // namespace edgespeech
