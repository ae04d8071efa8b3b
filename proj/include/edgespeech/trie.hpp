#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <utility>
#include <string>
#include <string_view>
#include <vector>

#include "edgespeech/alphabet.hpp"
#include "edgespeech/storage.hpp"

namespace edgespeech {

/// One trie node. Children are stored contiguously in the node array, sorted
/// by character code; `child_offset` indexes the first child. Node 0 is the
/// root (code 0). Offsets are strictly forward, so the structure is acyclic
/// by construction.
struct TrieNode {
    std::uint32_t code = 0;         // byte value of the incoming edge character
    std::uint32_t is_word_end = 0;  // 1 if a stored word ends here
    std::uint32_t child_count = 0;
    std::uint64_t child_offset = 0;  // index of first child in the node array

    bool operator==(const TrieNode&) const = default;
};

namespace detail {

inline constexpr std::size_t kTrieRecordBytes = 20;  // 3 x u32 + 1 x u64
inline constexpr std::size_t kTrieHeaderBytes = 12;  // "EDST" + u64 count

inline TrieNode decode_trie_node(const std::byte* rec) {
    TrieNode n;
    n.code = get_u32(rec);
    n.is_word_end = get_u32(rec + 4);
    n.child_count = get_u32(rec + 8);
    n.child_offset = get_u64(rec + 12);
    return n;
}

}  // namespace detail

/// Read-only vocabulary trie over single words (no spaces). Backed either by
/// a materialized node array (Eager) or by a mapped file whose records are
/// decoded on access, so a query faults in only the pages on its path.
class VocabTrie {
  public:
    VocabTrie() = default;

    static VocabTrie from_nodes(std::vector<TrieNode> nodes) {
        VocabTrie t;
        t.nodes_ = std::move(nodes);
        t.count_ = t.nodes_.size();
        return t;
    }

    static VocabTrie from_mapping(MappedFile file, std::size_t record_start,
                                  std::uint64_t count) {
        VocabTrie t;
        t.file_ = std::move(file);
        t.records_ = t.file_.data() + record_start;
        t.count_ = count;
        return t;
    }

    std::size_t node_count() const { return count_; }
    bool mapped() const { return records_ != nullptr; }

    TrieNode node(std::size_t i) const {
        if (i >= count_) throw std::out_of_range("VocabTrie: node index out of range");
        if (records_ != nullptr)
            return detail::decode_trie_node(records_ + i * detail::kTrieRecordBytes);
        return nodes_[i];
    }

    /// True iff `word` was stored (exact membership).
    bool contains(std::string_view word) const {
        const auto hit = walk(word);
        return hit.found && hit.node.is_word_end != 0;
    }

    /// True iff some stored word starts with `p` (a stored word is a prefix
    /// of itself).
    bool has_prefix(std::string_view p) const { return walk(p).found; }

  private:
    struct WalkResult {
        bool found = false;
        TrieNode node;
    };

    WalkResult walk(std::string_view s) const {
        if (count_ == 0) return {};
        TrieNode cur = node(0);
        for (const char ch : s) {
            const auto code = static_cast<std::uint32_t>(static_cast<unsigned char>(ch));
            // Binary search among the children, which are contiguous and
            // sorted by code.
            std::size_t lo = 0, hi = cur.child_count;
            bool matched = false;
            while (lo < hi) {
                const std::size_t mid = lo + (hi - lo) / 2;
                const TrieNode child = node(cur.child_offset + mid);
                if (child.code == code) {
                    cur = child;
                    matched = true;
                    break;
                }
                if (child.code < code)
                    lo = mid + 1;
                else
                    hi = mid;
            }
            if (!matched) return {};
        }
        return {true, cur};
    }

    std::vector<TrieNode> nodes_;
    MappedFile file_;
    const std::byte* records_ = nullptr;
    std::size_t count_ = 0;
};

/// Build a trie from a word list. Words are deduplicated; each must be drawn
/// from the alphabet's characters excluding space. Empty strings are ignored.
inline VocabTrie build_trie(const std::vector<std::string>& words, const Alphabet& ab) {
    if (words.empty()) throw std::invalid_argument("build_trie: empty word list");
    for (const std::string& w : words)
        for (const char c : w)
            if (c == ' ' || !ab.index_of(c).has_value())
                throw std::invalid_argument("build_trie: word contains out-of-alphabet character: \"" +
                                            w + "\"");

    // Intermediate linked form; renumbered breadth-first below so that the
    // children of every node land contiguously after it. Inserting in sorted
    // order means every new edge appends past a parent's existing children
    // (sorted neighbors share the longest prefix), so each node's child list
    // stays code-sorted with no per-node search structure.
    struct TmpNode {
        std::vector<std::pair<std::uint32_t, std::size_t>> kids;  // (code, tmp index)
        bool end = false;
    };
    std::vector<TmpNode> tmp(1);
    {
        std::vector<std::string> sorted(words);
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

        std::vector<std::size_t> path;  // tmp index per character of the current word
        std::string prev;
        for (const std::string& w : sorted) {
            if (w.empty()) continue;
            std::size_t keep = 0;
            while (keep < prev.size() && keep < w.size() && prev[keep] == w[keep]) ++keep;
            path.resize(keep);
            std::size_t at = keep == 0 ? 0 : path[keep - 1];
            for (std::size_t d = keep; d < w.size(); ++d) {
                const auto code = static_cast<std::uint32_t>(static_cast<unsigned char>(w[d]));
                tmp.push_back(TmpNode{});
                tmp[at].kids.emplace_back(code, tmp.size() - 1);
                at = tmp.size() - 1;
                path.push_back(at);
            }
            tmp[at].end = true;
            prev = w;
        }
    }

    // Breadth-first renumbering: parent indices always precede child indices,
    // making child offsets strictly forward.
    std::vector<TrieNode> nodes(tmp.size());
    std::vector<std::size_t> order;  // BFS queue of tmp indices
    order.reserve(tmp.size());
    order.push_back(0);
    std::vector<std::size_t> new_index(tmp.size(), 0);
    for (std::size_t head = 0; head < order.size(); ++head) {
        const TmpNode& src = tmp[order[head]];
        const std::size_t first_child = order.size();
        for (const auto& [code, tmp_idx] : src.kids) {
            new_index[tmp_idx] = order.size();
            order.push_back(tmp_idx);
        }
        TrieNode& dst = nodes[head];
        dst.is_word_end = src.end ? 1u : 0u;
        dst.child_count = static_cast<std::uint32_t>(src.kids.size());
        dst.child_offset = src.kids.empty() ? 0u : static_cast<std::uint64_t>(first_child);
    }
    // Second pass fills edge codes now that every node knows its new slot.
    for (std::size_t head = 0; head < order.size(); ++head) {
        const TmpNode& src = tmp[order[head]];
        for (const auto& [code, tmp_idx] : src.kids) nodes[new_index[tmp_idx]].code = code;
    }
    return VocabTrie::from_nodes(std::move(nodes));
}

/// Serialize: "EDST" magic, 64-bit node count, then packed 20-byte records
/// (code, is_word_end, child_count: u32; child_offset: u64), little-endian.
/// Returns the byte count written. The write is atomic (temp file + rename).
inline std::uint64_t save_trie(const VocabTrie& t, const std::string& path) {
    std::vector<std::byte> out;
    out.reserve(detail::kTrieHeaderBytes + t.node_count() * detail::kTrieRecordBytes);
    const char magic[4] = {'E', 'D', 'S', 'T'};
    for (const char c : magic) out.push_back(static_cast<std::byte>(c));
    put_u64(out, t.node_count());
    for (std::size_t i = 0; i < t.node_count(); ++i) {
        const TrieNode n = t.node(i);
        put_u32(out, n.code);
        put_u32(out, n.is_word_end);
        put_u32(out, n.child_count);
        put_u64(out, n.child_offset);
    }
    atomic_write_file(path, out);
    return out.size();
}

/// Load a trie. Eager materializes every node up front; Mapped keeps the file
/// mapping and decodes records on access so queries fault in only their path.
inline VocabTrie load_trie(const std::string& path, LoadStrategy strategy) {
    if (strategy == LoadStrategy::Eager) {
        const std::vector<std::byte> bytes = read_file_bytes(path);
        if (bytes.size() < detail::kTrieHeaderBytes ||
            std::memcmp(bytes.data(), "EDST", 4) != 0)
            throw std::runtime_error("load_trie: bad magic in " + path);
        const std::uint64_t count = get_u64(bytes.data() + 4);
        if (bytes.size() < detail::kTrieHeaderBytes + count * detail::kTrieRecordBytes)
            throw std::runtime_error("load_trie: truncated node array in " + path);
        std::vector<TrieNode> nodes;
        nodes.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i)
            nodes.push_back(detail::decode_trie_node(bytes.data() + detail::kTrieHeaderBytes +
                                                     i * detail::kTrieRecordBytes));
        return VocabTrie::from_nodes(std::move(nodes));
    }
    MappedFile file = MappedFile::open(path);
    file.advise_random();  // trie walks hop across levels; readahead only bloats RSS
    if (file.size() < detail::kTrieHeaderBytes || std::memcmp(file.data(), "EDST", 4) != 0)
        throw std::runtime_error("load_trie: bad magic in " + path);
    const std::uint64_t count = get_u64(file.data() + 4);
    if (file.size() < detail::kTrieHeaderBytes + count * detail::kTrieRecordBytes)
        throw std::runtime_error("load_trie: truncated node array in " + path);
    return VocabTrie::from_mapping(std::move(file), detail::kTrieHeaderBytes, count);
}

/// Read a UTF-8 word list, one word per line; blank lines and lines starting
/// with '#' are skipped; trailing carriage returns are stripped.
inline std::vector<std::string> load_word_list(const std::string& path) {
    const std::vector<std::byte> bytes = read_file_bytes(path);
    std::vector<std::string> words;
    std::string line;
    auto flush = [&] {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line.front() != '#') words.push_back(line);
        line.clear();
    };
    for (const std::byte b : bytes) {
        const char c = static_cast<char>(b);
        if (c == '\n')
            flush();
        else
            line.push_back(c);
    }
    flush();
    return words;
}

}  // namespace edgespeech
