#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgespeech/acoustic_model.hpp"
#include "edgespeech/nn.hpp"
#include "edgespeech/storage.hpp"

namespace edgespeech {

/// xorshift64* generator used to fill synthetic model weights. Fully pinned
/// so the same seed and dimensions produce bit-identical weights everywhere:
///   state <- seed, or 0x9E3779B97F4A7C15 if seed == 0
///   x ^= x >> 12; x ^= x << 25; x ^= x >> 27; output = x * 0x2545F4914F6CDD1D
/// A weight takes the top 53 bits of the output as a uniform double in
/// [0, 1), shifts it to [-0.5, 0.5), and rounds to float.
class WeightRng {
  public:
    explicit WeightRng(std::uint64_t seed)
        : state_(seed != 0 ? seed : 0x9E3779B97F4A7C15ull) {}

    std::uint64_t next_u64() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1Dull;
    }

    float next_weight() {
        const std::uint64_t top = next_u64() >> 11;  // 53 uniform bits
        return static_cast<float>(static_cast<double>(top) * (1.0 / 9007199254740992.0) - 0.5);
    }

  private:
    std::uint64_t state_;
};

/// Name, shape, and element count of one tensor in canonical file order.
struct TensorSpec {
    const char* name;  // at most 7 characters; stored as an 8-byte padded tag
    std::size_t rows;
    std::size_t cols;

    std::size_t elems() const { return rows * cols; }
    std::size_t bytes() const { return elems() * sizeof(float); }
};

inline constexpr std::size_t kModelTensorCount = 14;
inline constexpr std::uint32_t kModelVersion = 1;
inline constexpr std::size_t kTensorAlignment = 64;

/// The 14 tensors of the acoustic model in serialization order. Biases are
/// 1 x len matrices.
inline std::vector<TensorSpec> model_tensor_layout(const ModelDims& dims) {
    const std::size_t d = dims.feat_dim, h = dims.n_hidden, k = dims.alphabet_size;
    return {
        {"W1", h, d}, {"b1", 1, h}, {"W2", h, h},   {"b2", 1, h},   {"W3", h, h},
        {"b3", 1, h}, {"W4", h, h}, {"b4", 1, h},   {"Wr_f", h, h}, {"Wr_b", h, h},
        {"W5", h, h}, {"b5", 1, h}, {"W6", k, h},   {"b6", 1, k},
    };
}

namespace detail {

inline constexpr std::size_t kModelHeaderBytes = 28;     // magic..tensor_count + crc32
inline constexpr std::size_t kOffsetEntryBytes = 24;     // 8-byte tag + rows + cols + offset

inline std::size_t align_up(std::size_t v, std::size_t a) { return (v + a - 1) / a * a; }

/// Wire ModelWeights views onto 14 float pointers in layout order.
inline ModelWeights assemble_weights(const ModelDims& dims,
                                     const std::vector<const float*>& ptrs,
                                     std::shared_ptr<const void> storage) {
    const auto layout = model_tensor_layout(dims);
    auto mat = [&](std::size_t i) {
        return MatrixView{layout[i].rows, layout[i].cols, ptrs[i]};
    };
    auto vec = [&](std::size_t i) {
        return std::span<const float>(ptrs[i], layout[i].elems());
    };
    ModelWeights w;
    w.dims = dims;
    w.w1 = mat(0);
    w.b1 = vec(1);
    w.w2 = mat(2);
    w.b2 = vec(3);
    w.w3 = mat(4);
    w.b3 = vec(5);
    w.w4 = mat(6);
    w.b4 = vec(7);
    w.wr_f = mat(8);
    w.wr_b = mat(9);
    w.w5 = mat(10);
    w.b5 = vec(11);
    w.w6 = mat(12);
    w.b6 = vec(13);
    w.storage = std::move(storage);
    return w;
}

/// Gather the 14 tensors of `w` in layout order.
inline std::vector<std::span<const float>> tensor_payloads(const ModelWeights& w) {
    return {w.w1.flat(), w.b1, w.w2.flat(), w.b2,   w.w3.flat(), w.b3,   w.w4.flat(),
            w.b4,        w.wr_f.flat(),     w.wr_b.flat(),       w.w5.flat(),
            w.b5,        w.w6.flat(),       w.b6};
}

}  // namespace detail

/// Byte offset of each tensor payload in the file, plus the total file size.
/// The header and offset table come first; every tensor begins on a 64-byte
/// boundary; the file ends at the last tensor's final byte.
struct ModelFilePlan {
    std::vector<std::uint64_t> offsets;
    std::uint64_t file_size = 0;
    std::uint64_t payload_start = 0;  // first tensor's offset; CRC covers from here
};

inline ModelFilePlan plan_model_file(const ModelDims& dims) {
    const auto layout = model_tensor_layout(dims);
    ModelFilePlan plan;
    std::size_t at = detail::align_up(
        detail::kModelHeaderBytes + layout.size() * detail::kOffsetEntryBytes,
        kTensorAlignment);
    plan.payload_start = at;
    for (const TensorSpec& t : layout) {
        at = detail::align_up(at, kTensorAlignment);
        plan.offsets.push_back(at);
        at += t.bytes();
    }
    plan.file_size = at;
    return plan;
}

/// Deterministically generate a full weight set: every tensor is filled in
/// serialization order from one WeightRng stream, values in [-0.5, 0.5).
inline ModelWeights gen_model(std::uint64_t seed, const ModelDims& dims) {
    if (!dims.valid()) throw std::invalid_argument("gen_model: invalid model dimensions");
    const auto layout = model_tensor_layout(dims);
    std::size_t total = 0;
    for (const TensorSpec& t : layout) total += t.elems();

    auto values = std::make_shared<std::vector<float>>();
    values->reserve(total);
    WeightRng rng(seed);
    for (std::size_t i = 0; i < total; ++i) values->push_back(rng.next_weight());

    std::vector<const float*> ptrs;
    std::size_t at = 0;
    for (const TensorSpec& t : layout) {
        ptrs.push_back(values->data() + at);
        at += t.elems();
    }
    return detail::assemble_weights(dims, ptrs, values);
}

/// Serialize to the "EDSM" format:
///   magic "EDSM" | version u32 | feat_dim u32 | n_hidden u32 |
///   alphabet_size u32 | tensor_count u32 | payload_crc32 u32 |
///   offset table (per tensor: 8-byte zero-padded name tag, rows u32,
///   cols u32, byte_offset u64) | 64-byte-aligned tensor payloads,
///   row-major little-endian float32.
/// The CRC-32 (polynomial 0xEDB88320) covers every byte from the first
/// tensor offset to end of file and is verified on Eager loads. The write is
/// atomic (temp file + rename). Returns the byte count written.
inline std::uint64_t save_model(const ModelWeights& w, const ModelDims& dims,
                                const std::string& path) {
    const ShapeReport report = validate(w, dims);
    if (!report.pass)
        throw std::invalid_argument("save_model: weights fail validation\n" + report.to_string());

    const auto layout = model_tensor_layout(dims);
    const ModelFilePlan plan = plan_model_file(dims);
    const auto payloads = detail::tensor_payloads(w);

    std::vector<std::byte> out;
    out.reserve(plan.file_size);
    for (const char c : {'E', 'D', 'S', 'M'}) out.push_back(static_cast<std::byte>(c));
    put_u32(out, kModelVersion);
    put_u32(out, dims.feat_dim);
    put_u32(out, dims.n_hidden);
    put_u32(out, dims.alphabet_size);
    put_u32(out, static_cast<std::uint32_t>(layout.size()));
    const std::size_t crc_field_at = out.size();
    put_u32(out, 0);  // payload CRC, patched below

    for (std::size_t i = 0; i < layout.size(); ++i) {
        char tag[8] = {};
        std::strncpy(tag, layout[i].name, sizeof(tag) - 1);
        for (const char c : tag) out.push_back(static_cast<std::byte>(c));
        put_u32(out, static_cast<std::uint32_t>(layout[i].rows));
        put_u32(out, static_cast<std::uint32_t>(layout[i].cols));
        put_u64(out, plan.offsets[i]);
    }

    for (std::size_t i = 0; i < layout.size(); ++i) {
        out.resize(plan.offsets[i], std::byte{0});  // alignment padding
        put_f32_array(out, payloads[i]);
    }

    const std::uint32_t crc =
        crc32(std::span<const std::byte>(out.data() + plan.payload_start,
                                         out.size() - plan.payload_start));
    std::byte crc_le[4];
    crc_le[0] = static_cast<std::byte>(crc & 0xff);
    crc_le[1] = static_cast<std::byte>((crc >> 8) & 0xff);
    crc_le[2] = static_cast<std::byte>((crc >> 16) & 0xff);
    crc_le[3] = static_cast<std::byte>((crc >> 24) & 0xff);
    std::memcpy(out.data() + crc_field_at, crc_le, 4);

    atomic_write_file(path, out);
    return out.size();
}

namespace detail {

struct ParsedModelHeader {
    ModelDims dims;
    std::uint32_t stored_crc = 0;
    std::vector<std::uint64_t> offsets;
    std::uint64_t payload_start = 0;
    std::uint64_t expected_size = 0;
};

/// Validate header + offset table against the canonical layout. `file_size`
/// is the actual byte count available.
inline ParsedModelHeader parse_model_header(const std::byte* data, std::uint64_t file_size,
                                            const std::string& path) {
    if (file_size < kModelHeaderBytes)
        throw std::runtime_error("load_model: truncated model file " + path);
    if (std::memcmp(data, "EDSM", 4) != 0)
        throw std::runtime_error("load_model: bad magic in " + path);
    const std::uint32_t version = get_u32(data + 4);
    if (version != kModelVersion)
        throw std::runtime_error("load_model: unsupported model version " +
                                 std::to_string(version) + " in " + path);
    ParsedModelHeader h;
    h.dims.feat_dim = get_u32(data + 8);
    h.dims.n_hidden = get_u32(data + 12);
    h.dims.alphabet_size = get_u32(data + 16);
    const std::uint32_t tensor_count = get_u32(data + 20);
    h.stored_crc = get_u32(data + 24);
    if (!h.dims.valid() || tensor_count != kModelTensorCount)
        throw std::runtime_error("load_model: offset table inconsistency in " + path);

    const auto layout = model_tensor_layout(h.dims);
    const std::uint64_t table_end =
        kModelHeaderBytes + layout.size() * kOffsetEntryBytes;
    if (file_size < table_end)
        throw std::runtime_error("load_model: truncated model file " + path);

    std::uint64_t prev_end = 0;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        const std::byte* entry = data + kModelHeaderBytes + i * kOffsetEntryBytes;
        char tag[9] = {};
        std::memcpy(tag, entry, 8);
        const std::uint32_t rows = get_u32(entry + 8);
        const std::uint32_t cols = get_u32(entry + 12);
        const std::uint64_t offset = get_u64(entry + 16);
        const bool tag_ok = std::strncmp(tag, layout[i].name, 8) == 0;
        const bool shape_ok = rows == layout[i].rows && cols == layout[i].cols;
        const bool aligned = offset % kTensorAlignment == 0;
        const bool forward = offset >= table_end && (i == 0 || offset >= prev_end);
        if (!tag_ok || !shape_ok || !aligned || !forward)
            throw std::runtime_error("load_model: offset table inconsistency in " + path);
        if (offset + layout[i].bytes() > file_size)
            throw std::runtime_error("load_model: truncated model file " + path);
        if (i == 0) h.payload_start = offset;
        prev_end = offset + layout[i].bytes();
        h.offsets.push_back(offset);
    }
    h.expected_size = prev_end;
    return h;
}

}  // namespace detail

/// Load a model. Eager reads and materializes every tensor up front and
/// verifies the payload checksum; Mapped maps the file and returns
/// immediately, so tensor bytes are faulted in on first access (no checksum
/// pass, by design). Both strategies expose identical values.
inline ModelWeights load_model(const std::string& path, LoadStrategy strategy) {
    if (strategy == LoadStrategy::Eager) {
        auto bytes = std::make_shared<std::vector<std::byte>>(read_file_bytes(path));
        const auto h = detail::parse_model_header(bytes->data(), bytes->size(), path);
        const std::uint32_t actual_crc = crc32(std::span<const std::byte>(
            bytes->data() + h.payload_start, bytes->size() - h.payload_start));
        if (actual_crc != h.stored_crc)
            throw std::runtime_error("load_model: checksum mismatch in " + path);

        // Materialize all payloads into one owned float buffer.
        const auto layout = model_tensor_layout(h.dims);
        std::size_t total = 0;
        for (const TensorSpec& t : layout) total += t.elems();
        auto values = std::make_shared<std::vector<float>>(total);
        std::vector<const float*> ptrs;
        std::size_t at = 0;
        for (std::size_t i = 0; i < layout.size(); ++i) {
            std::memcpy(values->data() + at, bytes->data() + h.offsets[i], layout[i].bytes());
            ptrs.push_back(values->data() + at);
            at += layout[i].elems();
        }
        return detail::assemble_weights(h.dims, ptrs, values);
    }

    auto file = std::make_shared<MappedFile>(MappedFile::open(path));
    const auto h = detail::parse_model_header(file->data(), file->size(), path);
    static_assert(std::endian::native == std::endian::little,
                  "mapped tensor views assume a little-endian host");
    std::vector<const float*> ptrs;
    for (const std::uint64_t offset : h.offsets)
        ptrs.push_back(reinterpret_cast<const float*>(file->data() + offset));
    return detail::assemble_weights(h.dims, ptrs, file);
}

}  // namespace edgespeech
