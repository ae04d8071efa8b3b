#pragma once

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgespeech {

/// How to bring a model or trie file into the process.
///   Eager:  read and materialize every byte up front (payload checksum verified).
///   Mapped: map the file; tensor/trie bytes are faulted in on first access.
/// Loaded values are identical across modes; only the load cost profile differs.
enum class LoadStrategy { Eager, Mapped };

inline const char* to_string(LoadStrategy s) {
    return s == LoadStrategy::Eager ? "eager" : "mapped";
}

/// Read-only memory-mapped file. Move-only RAII over open/mmap.
class MappedFile {
  public:
    MappedFile() = default;
    MappedFile(const MappedFile&) = delete;
    MappedFile& operator=(const MappedFile&) = delete;

    MappedFile(MappedFile&& o) noexcept : data_(o.data_), size_(o.size_), fd_(o.fd_) {
        o.data_ = nullptr;
        o.size_ = 0;
        o.fd_ = -1;
    }
    MappedFile& operator=(MappedFile&& o) noexcept {
        if (this != &o) {
            close();
            data_ = o.data_;
            size_ = o.size_;
            fd_ = o.fd_;
            o.data_ = nullptr;
            o.size_ = 0;
            o.fd_ = -1;
        }
        return *this;
    }
    ~MappedFile() { close(); }

    static MappedFile open(const std::string& path) {
        MappedFile f;
        f.fd_ = ::open(path.c_str(), O_RDONLY);
        if (f.fd_ < 0) throw std::runtime_error("cannot open file: " + path);
        struct stat st{};
        if (::fstat(f.fd_, &st) != 0) throw std::runtime_error("cannot stat file: " + path);
        f.size_ = static_cast<std::size_t>(st.st_size);
        if (f.size_ == 0) throw std::runtime_error("empty file: " + path);
        void* p = ::mmap(nullptr, f.size_, PROT_READ, MAP_PRIVATE, f.fd_, 0);
        if (p == MAP_FAILED) throw std::runtime_error("mmap failed: " + path);
        f.data_ = static_cast<const std::byte*>(p);
        return f;
    }

    const std::byte* data() const { return data_; }
    std::size_t size() const { return size_; }
    explicit operator bool() const { return data_ != nullptr; }

    /// Tell the kernel accesses will be scattered. Without this, readahead
    /// and fault-around pull whole neighborhoods of pages into the resident
    /// set on every touch, defeating the point of lazy loading for
    /// pointer-chasing structures.
    void advise_random() const noexcept {
        if (data_) ::madvise(const_cast<std::byte*>(data_), size_, MADV_RANDOM);
    }

  private:
    void close() {
        if (data_) {
            ::munmap(const_cast<std::byte*>(data_), size_);
            data_ = nullptr;
        }
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
        size_ = 0;
    }

    const std::byte* data_ = nullptr;
    std::size_t size_ = 0;
    int fd_ = -1;
};

// ---- little-endian primitives -------------------------------------------
// All on-disk integers and floats are little-endian regardless of host.

inline void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::vector<std::byte>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32(const std::byte* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(std::to_integer<unsigned>(p[i])) << (8 * i);
    return v;
}

inline std::uint64_t get_u64(const std::byte* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(std::to_integer<unsigned>(p[i])) << (8 * i);
    return v;
}

/// Append a float array as little-endian 32-bit payloads.
inline void put_f32_array(std::vector<std::byte>& out, std::span<const float> v) {
    if constexpr (std::endian::native == std::endian::little) {
        const auto* p = reinterpret_cast<const std::byte*>(v.data());
        out.insert(out.end(), p, p + v.size() * 4);
    } else {
        for (float f : v) put_u32(out, std::bit_cast<std::uint32_t>(f));
    }
}

// ---- CRC-32 ---------------------------------------------------------------

/// CRC-32 (reflected polynomial 0xEDB88320, the zlib/IEEE variant).
inline std::uint32_t crc32(std::span<const std::byte> bytes, std::uint32_t seed = 0) {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t n = 0; n < 256; ++n) {
            std::uint32_t c = n;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[n] = c;
        }
        return t;
    }();
    std::uint32_t c = seed ^ 0xFFFFFFFFu;
    for (std::byte b : bytes)
        c = table[(c ^ std::to_integer<std::uint32_t>(b)) & 0xffu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

// ---- whole-file helpers -----------------------------------------------------

inline std::vector<std::byte> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    std::vector<std::byte> bytes(size);
    if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size)))
        throw std::runtime_error("cannot read file: " + path);
    return bytes;
}

/// Write bytes to a temp file in the target directory, then rename over the
/// destination. Readers never observe a torn file.
inline void atomic_write_file(const std::string& path, std::span<const std::byte> bytes) {
    namespace fs = std::filesystem;
    const fs::path dest(path);
    fs::path tmp = dest;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, dest, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("cannot replace file: " + path);
    }
}

}  // namespace edgespeech
