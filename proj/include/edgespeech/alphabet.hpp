#pragma once

#include <array>
#include <cstddef>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace edgespeech {

/// Ordered character set for the output layer. The CTC blank is implicit and
/// always the last softmax class, so K = size() + 1.
///
/// File format: UTF-8 text, one character per line. A line holding a single
/// space denotes the space character; lines starting with '#' are comments.
/// Entries must be single-byte and distinct.
class Alphabet {
  public:
    Alphabet() = default;

    explicit Alphabet(std::string_view chars) {
        for (char c : chars) add_char(c, "alphabet");
    }

    static Alphabet from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open alphabet file: " + path);
        Alphabet ab;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty() && line.front() == '#') continue;
            if (line.empty())
                throw std::runtime_error("alphabet file has an empty line: " + path);
            if (line.size() != 1)
                throw std::runtime_error("alphabet entries must be single characters: " + path);
            ab.add_char(line[0], path);
        }
        if (ab.size() == 0) throw std::runtime_error("alphabet file has no entries: " + path);
        return ab;
    }

    std::size_t size() const { return chars_.size(); }
    std::size_t blank_index() const { return chars_.size(); }
    /// Softmax class count, blank included.
    std::size_t num_classes() const { return chars_.size() + 1; }

    char char_at(std::size_t index) const {
        if (index >= chars_.size()) throw std::out_of_range("alphabet: index out of range");
        return chars_[index];
    }

    std::optional<std::size_t> index_of(char c) const {
        const int idx = lookup_[static_cast<unsigned char>(c)];
        if (idx < 0) return std::nullopt;
        return static_cast<std::size_t>(idx);
    }

    const std::string& chars() const { return chars_; }

  private:
    void add_char(char c, const std::string& origin) {
        if (lookup_[static_cast<unsigned char>(c)] >= 0)
            throw std::runtime_error("duplicate alphabet character '" + std::string(1, c) +
                                     "': " + origin);
        lookup_[static_cast<unsigned char>(c)] = static_cast<int>(chars_.size());
        chars_.push_back(c);
    }

    std::string chars_;
    std::array<int, 256> lookup_ = [] {
        std::array<int, 256> a{};
        a.fill(-1);
        return a;
    }();
};

}  // namespace edgespeech
