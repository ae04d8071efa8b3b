#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgespeech {

using Vec = std::vector<float>;

/// Non-owning view of a row-major float matrix. The pointed-to storage must
/// outlive the view (model weights keep theirs alive via a shared handle).
struct MatrixView {
    std::size_t rows = 0;
    std::size_t cols = 0;
    const float* data = nullptr;

    const float* row(std::size_t r) const { return data + r * cols; }
    float at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::size_t size() const { return rows * cols; }
    std::span<const float> flat() const { return {data, rows * cols}; }
};

/// Owning row-major float matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, float fill = 0.0f)
        : rows(r), cols(c), data(r * c, fill) {}

    float& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    float at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    float* row(std::size_t r) { return data.data() + r * cols; }
    const float* row(std::size_t r) const { return data.data() + r * cols; }
    std::span<const float> row_span(std::size_t r) const { return {row(r), cols}; }

    MatrixView view() const { return {rows, cols, data.data()}; }
    operator MatrixView() const { return view(); }

    bool operator==(const Matrix&) const = default;
};

/// y = W x + b. Storage is float32; accumulation runs in float32 registers.
inline Vec affine(const MatrixView& w, std::span<const float> x, std::span<const float> b) {
    if (w.cols != x.size())
        throw std::invalid_argument("affine: weight has " + std::to_string(w.cols) +
                                    " columns but input has " + std::to_string(x.size()));
    if (w.rows != b.size())
        throw std::invalid_argument("affine: weight has " + std::to_string(w.rows) +
                                    " rows but bias has " + std::to_string(b.size()));
    Vec y(w.rows);
    for (std::size_t i = 0; i < w.rows; ++i) {
        const float* wr = w.row(i);
        float acc = 0.0f;
        for (std::size_t j = 0; j < w.cols; ++j) acc += wr[j] * x[j];
        y[i] = acc + b[i];
    }
    return y;
}

/// acc += W x. Used by the recurrent layer to fold the recurrence term into a
/// precomputed input projection.
inline void add_matvec(const MatrixView& w, std::span<const float> x, Vec& acc) {
    if (w.cols != x.size() || w.rows != acc.size())
        throw std::invalid_argument("add_matvec: dimension mismatch");
    for (std::size_t i = 0; i < w.rows; ++i) {
        const float* wr = w.row(i);
        float s = 0.0f;
        for (std::size_t j = 0; j < w.cols; ++j) s += wr[j] * x[j];
        acc[i] += s;
    }
}

/// Elementwise max(0, x).
inline Vec relu(Vec x) {
    for (float& v : x)
        if (v < 0.0f) v = 0.0f;
    return x;
}

/// Elementwise min(max(0, x), cap). cap <= 0 means no clipping.
inline Vec relu_clipped(Vec x, float cap) {
    if (cap <= 0.0f) return relu(std::move(x));
    for (float& v : x) v = std::clamp(v, 0.0f, cap);
    return x;
}

/// Max-shifted softmax. Exponentials and the normalizing sum run in double;
/// the result rows sum to 1 within a few float ulps.
inline Vec softmax(std::span<const float> logits) {
    if (logits.empty()) throw std::invalid_argument("softmax: empty input");
    const float m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> e(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        e[i] = std::exp(static_cast<double>(logits[i]) - static_cast<double>(m));
        sum += e[i];
    }
    Vec out(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i)
        out[i] = static_cast<float>(e[i] / sum);
    return out;
}

}  // namespace edgespeech
