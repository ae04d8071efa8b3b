#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "edgespeech/nn.hpp"

namespace edgespeech {

/// T x K matrix of per-frame character probabilities, blank included.
/// Each row is a softmax output and sums to 1.
using CharDistribution = Matrix;

struct ModelDims {
    std::uint32_t feat_dim = 0;       // input width D
    std::uint32_t n_hidden = 0;       // hidden width (2048 in the released models)
    std::uint32_t alphabet_size = 0;  // softmax classes K, blank included

    bool valid() const { return feat_dim > 0 && n_hidden > 0 && alphabet_size >= 2; }
    bool operator==(const ModelDims&) const = default;
};

/// Immutable weight set for the five-hidden-layer network: three dense input
/// layers, a bidirectional recurrent layer sharing its input map (w4/b4)
/// between directions with distinct recurrence matrices, a merge layer, and
/// the softmax output layer.
///
/// Views alias backing memory owned by `storage` (either a materialized
/// buffer or a memory-mapped file), so copies are cheap and a loaded model
/// can be shared across threads.
struct ModelWeights {
    ModelDims dims;

    MatrixView w1, w2, w3, w4, wr_f, wr_b, w5, w6;
    std::span<const float> b1, b2, b3, b4, b5, b6;

    std::shared_ptr<const void> storage;
};

/// One tensor's expected-vs-actual shape plus a finiteness scan.
struct TensorCheck {
    std::string name;
    std::size_t want_rows = 0, want_cols = 0;
    std::size_t got_rows = 0, got_cols = 0;
    bool shape_ok = false;
    bool finite = false;

    bool ok() const { return shape_ok && finite; }
};

struct ShapeReport {
    std::vector<TensorCheck> tensors;
    bool pass = false;

    std::string to_string() const {
        std::string out;
        for (const auto& t : tensors) {
            out += t.name + ": expected " + std::to_string(t.want_rows) + "x" +
                   std::to_string(t.want_cols) + ", actual " + std::to_string(t.got_rows) + "x" +
                   std::to_string(t.got_cols);
            if (!t.shape_ok)
                out += " SHAPE MISMATCH";
            else if (!t.finite)
                out += " NON-FINITE VALUES";
            else
                out += " ok";
            out += "\n";
        }
        out += pass ? "pass\n" : "fail\n";
        return out;
    }
};

/// Check every tensor against the dimensions. Lists all 14 tensors (weights
/// and biases) with expected vs. actual shape; any NaN/inf fails the tensor.
inline ShapeReport validate(const ModelWeights& w, const ModelDims& dims) {
    const std::size_t d = dims.feat_dim, h = dims.n_hidden, k = dims.alphabet_size;
    ShapeReport report;
    report.pass = true;

    auto finite = [](std::span<const float> v) {
        for (float x : v)
            if (!std::isfinite(x)) return false;
        return true;
    };
    auto check_m = [&](const std::string& name, const MatrixView& m, std::size_t rows,
                       std::size_t cols) {
        TensorCheck c{name, rows, cols, m.rows, m.cols, m.rows == rows && m.cols == cols, false};
        c.finite = m.data != nullptr && c.shape_ok && finite(m.flat());
        report.pass = report.pass && c.ok();
        report.tensors.push_back(std::move(c));
    };
    auto check_b = [&](const std::string& name, std::span<const float> b, std::size_t len) {
        TensorCheck c{name, 1,        len, b.empty() ? std::size_t{0} : std::size_t{1},
                      b.size(), b.size() == len, false};
        c.finite = c.shape_ok && finite(b);
        report.pass = report.pass && c.ok();
        report.tensors.push_back(std::move(c));
    };

    check_m("W1", w.w1, h, d);
    check_b("b1", w.b1, h);
    check_m("W2", w.w2, h, h);
    check_b("b2", w.b2, h);
    check_m("W3", w.w3, h, h);
    check_b("b3", w.b3, h);
    check_m("W4", w.w4, h, h);
    check_b("b4", w.b4, h);
    check_m("Wr_f", w.wr_f, h, h);
    check_m("Wr_b", w.wr_b, h, h);
    check_m("W5", w.w5, h, h);
    check_b("b5", w.b5, h);
    check_m("W6", w.w6, k, h);
    check_b("b6", w.b6, k);
    return report;
}

struct ForwardOptions {
    /// >= 2 runs the forward and backward recurrences on separate threads.
    /// Results are identical to sequential execution either way.
    int threads = 1;
    /// Activation cap; 0 keeps the plain max(0, x) activation.
    float relu_clip = 0.0f;
};

namespace detail {

inline Vec activate(Vec v, float clip) {
    return clip > 0.0f ? relu_clipped(std::move(v), clip) : relu(std::move(v));
}

enum class Direction { Forward, Backward };

/// Shared recurrence scan: state_t = g(W4 h3_t + Wr state_prev + b4), with a
/// zero initial state, walking t ascending (forward) or descending (backward).
inline std::vector<Vec> scan_recurrence(const ModelWeights& w, std::span<const Vec> h3,
                                        Direction dir, float relu_clip) {
    const MatrixView& wr = dir == Direction::Forward ? w.wr_f : w.wr_b;
    for (const Vec& v : h3)
        if (v.size() != w.w4.cols)
            throw std::invalid_argument("recurrence: state width " + std::to_string(v.size()) +
                                        " does not match n_hidden " + std::to_string(w.w4.cols));
    const std::size_t t_count = h3.size();
    std::vector<Vec> out(t_count);
    Vec state(w.w4.rows, 0.0f);
    for (std::size_t step = 0; step < t_count; ++step) {
        const std::size_t t = dir == Direction::Forward ? step : t_count - 1 - step;
        Vec pre = affine(w.w4, h3[t], w.b4);
        add_matvec(wr, state, pre);
        state = activate(std::move(pre), relu_clip);
        out[t] = state;
    }
    return out;
}

}  // namespace detail

/// Left-to-right half of the recurrent layer, exposed for testing.
inline std::vector<Vec> forward_recurrence(const ModelWeights& w, std::span<const Vec> h3,
                                           float relu_clip = 0.0f) {
    return detail::scan_recurrence(w, h3, detail::Direction::Forward, relu_clip);
}

/// Right-to-left half of the recurrent layer, exposed for testing.
inline std::vector<Vec> backward_recurrence(const ModelWeights& w, std::span<const Vec> h3,
                                            float relu_clip = 0.0f) {
    return detail::scan_recurrence(w, h3, detail::Direction::Backward, relu_clip);
}

/// Full forward pass: per-frame dense stack, bidirectional recurrence, merge
/// by elementwise sum, dense layer five, per-frame softmax. Deterministic:
/// identical weights and input give bit-identical output, with or without
/// recurrence-direction threading.
inline CharDistribution forward(const ModelWeights& w, const Matrix& x,
                                const ForwardOptions& opts = {}) {
    if (x.cols != w.dims.feat_dim)
        throw std::invalid_argument("forward: input width " + std::to_string(x.cols) +
                                    " does not match model feat_dim " +
                                    std::to_string(w.dims.feat_dim));
    if (x.rows == 0) throw std::invalid_argument("forward: empty input");

    const std::size_t t_count = x.rows;
    const float clip = opts.relu_clip;

    std::vector<Vec> h3(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        Vec h1 = detail::activate(affine(w.w1, x.row_span(t), w.b1), clip);
        Vec h2 = detail::activate(affine(w.w2, h1, w.b2), clip);
        h3[t] = detail::activate(affine(w.w3, h2, w.b3), clip);
    }

    std::vector<Vec> hf, hb;
    if (opts.threads >= 2) {
        std::thread fwd([&] { hf = forward_recurrence(w, h3, clip); });
        hb = backward_recurrence(w, h3, clip);
        fwd.join();
    } else {
        hf = forward_recurrence(w, h3, clip);
        hb = backward_recurrence(w, h3, clip);
    }

    CharDistribution out(t_count, w.dims.alphabet_size);
    for (std::size_t t = 0; t < t_count; ++t) {
        Vec h4 = hf[t];
        for (std::size_t i = 0; i < h4.size(); ++i) h4[i] += hb[t][i];
        Vec h5 = detail::activate(affine(w.w5, h4, w.b5), clip);
        Vec probs = softmax(affine(w.w6, h5, w.b6));
        std::copy(probs.begin(), probs.end(), out.row(t));
    }
    return out;
}

}  // namespace edgespeech
