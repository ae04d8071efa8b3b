#include "edgespeech/nn.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_helpers.hpp"

using namespace edgespeech;

namespace {

Matrix from_d(const ref::DMat& m) {
    Matrix out(m.size(), m[0].size());
    for (std::size_t i = 0; i < out.rows; ++i)
        for (std::size_t j = 0; j < out.cols; ++j)
            out.at(i, j) = static_cast<float>(m[i][j]);
    return out;
}

}  // namespace

TEST(Affine, IdentityMatrix) {
    Matrix w(2, 2);
    w.at(0, 0) = 1.0f;
    w.at(1, 1) = 1.0f;
    const Vec x{3.0f, 4.0f}, b{0.0f, 0.0f};
    const Vec y = affine(w.view(), x, b);
    EXPECT_EQ(y, (Vec{3.0f, 4.0f}));
}

TEST(Affine, HandComputedSum) {
    Matrix w(2, 2);
    w.at(0, 0) = 1.0f, w.at(0, 1) = 2.0f;
    w.at(1, 0) = 3.0f, w.at(1, 1) = 4.0f;
    const Vec y = affine(w.view(), Vec{1.0f, 1.0f}, Vec{1.0f, 1.0f});
    EXPECT_EQ(y, (Vec{4.0f, 8.0f}));
}

TEST(Affine, MatchesDoubleOracleOnRandom8x8) {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        ref::DMat w(8, ref::DVec(8));
        ref::DVec x(8), b(8);
        for (auto& row : w)
            for (double& v : row) v = u(rng);
        for (double& v : x) v = u(rng);
        for (double& v : b) v = u(rng);

        const Matrix wf = from_d(w);
        Vec xf(8), bf(8);
        for (int i = 0; i < 8; ++i) xf[i] = static_cast<float>(x[i]);
        for (int i = 0; i < 8; ++i) bf[i] = static_cast<float>(b[i]);
        // Oracle consumes the float-rounded operands the kernel actually sees.
        ref::DMat wd(8, ref::DVec(8));
        ref::DVec xd(8), bd(8);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) wd[i][j] = wf.at(i, j);
        for (int i = 0; i < 8; ++i) xd[i] = xf[i], bd[i] = bf[i];

        const Vec got = affine(wf.view(), xf, bf);
        const ref::DVec want = ref::affine_d(wd, xd, bd);
        for (int i = 0; i < 8; ++i) {
            const double denom = std::max(1.0, std::abs(want[i]));
            EXPECT_NEAR(got[i], want[i], 1e-6 * denom);
        }
    }
}

TEST(Affine, DistributesOverVectorAddition) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    Matrix w(6, 6);
    for (float& v : w.data) v = u(rng);
    Vec x(6), y(6), zero(6, 0.0f);
    for (float& v : x) v = u(rng);
    for (float& v : y) v = u(rng);
    Vec xy(6);
    for (int i = 0; i < 6; ++i) xy[i] = x[i] + y[i];

    const Vec lhs = affine(w.view(), xy, zero);
    const Vec a = affine(w.view(), x, zero);
    const Vec b = affine(w.view(), y, zero);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(lhs[i], a[i] + b[i], 1e-6);
}

TEST(Affine, DimensionMismatchThrows) {
    Matrix w(2, 3);
    EXPECT_THROW(affine(w.view(), Vec{1.0f, 2.0f}, Vec{0.0f, 0.0f}), std::invalid_argument);
    EXPECT_THROW(affine(w.view(), Vec{1.0f, 2.0f, 3.0f}, Vec{0.0f}), std::invalid_argument);
}

TEST(Relu, ClampsNegatives) {
    EXPECT_EQ(relu(Vec{-3.0f, 0.0f, 5.0f}), (Vec{0.0f, 0.0f, 5.0f}));
    EXPECT_EQ(relu(Vec{-1.0f, -2.0f}), (Vec{0.0f, 0.0f}));
    EXPECT_EQ(relu(Vec{1.0f, 0.5f}), (Vec{1.0f, 0.5f}));
}

TEST(Relu, Idempotent) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<float> u(-10.0f, 10.0f);
    Vec x(64);
    for (float& v : x) v = u(rng);
    const Vec once = relu(x);
    EXPECT_EQ(relu(once), once);
}

TEST(Relu, ClippedCapsAtTwenty) {
    const Vec y = relu_clipped(Vec{-5.0f, 3.0f, 25.0f, 20.0f}, 20.0f);
    EXPECT_EQ(y, (Vec{0.0f, 3.0f, 20.0f, 20.0f}));
    // Non-positive cap degrades to the plain activation.
    EXPECT_EQ(relu_clipped(Vec{-5.0f, 25.0f}, 0.0f), (Vec{0.0f, 25.0f}));
}

TEST(Softmax, UniformOnEqualLogits) {
    const Vec y = softmax(Vec{0.0f, 0.0f, 0.0f, 0.0f});
    for (const float v : y) EXPECT_NEAR(v, 0.25f, 1e-7f);
}

TEST(Softmax, SingleElementIsOne) {
    const Vec y = softmax(Vec{7.3f});
    ASSERT_EQ(y.size(), 1u);
    EXPECT_FLOAT_EQ(y[0], 1.0f);
}

TEST(Softmax, KnownThreeClassValues) {
    const Vec y = softmax(Vec{1.0f, 2.0f, 3.0f});
    EXPECT_NEAR(y[0], 0.090031, 1e-5);
    EXPECT_NEAR(y[1], 0.244728, 1e-5);
    EXPECT_NEAR(y[2], 0.665241, 1e-5);
}

TEST(Softmax, MatchesDoubleOracle) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 32;
        ref::DVec xd(n);
        Vec xf(n);
        for (std::size_t i = 0; i < n; ++i) {
            xf[i] = static_cast<float>(u(rng));
            xd[i] = xf[i];
        }
        const Vec got = softmax(xf);
        const ref::DVec want = ref::softmax_d(xd);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], want[i], 1e-6);
    }
}

TEST(Softmax, SumsToOneAcrossRandomLengths) {
    std::mt19937 rng(13);
    std::uniform_real_distribution<float> u(-20.0f, 20.0f);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 64;
        Vec x(n);
        for (float& v : x) v = u(rng);
        const Vec y = softmax(x);
        double sum = 0.0;
        for (const float v : y) {
            EXPECT_GT(v, 0.0f);
            EXPECT_LE(v, 1.0f);
            sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-6);
    }
}

TEST(Softmax, ShiftInvariance) {
    std::mt19937 rng(17);
    std::uniform_real_distribution<float> u(-10.0f, 10.0f);
    std::uniform_real_distribution<float> shift(-5.0f, 5.0f);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 24;
        Vec x(n), xs(n);
        const float c = shift(rng);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = u(rng);
            xs[i] = x[i] + c;
        }
        const Vec a = softmax(x), b = softmax(xs);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(a[i], b[i], 1e-6);
    }
}

TEST(Softmax, ArgmaxInvariance) {
    std::mt19937 rng(19);
    std::uniform_real_distribution<float> u(-30.0f, 30.0f);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng() % 48;
        Vec x(n);
        for (float& v : x) v = u(rng);
        const Vec y = softmax(x);
        const auto ax = std::max_element(x.begin(), x.end()) - x.begin();
        const auto ay = std::max_element(y.begin(), y.end()) - y.begin();
        EXPECT_EQ(ax, ay);
    }
}

TEST(Softmax, EmptyThrows) { EXPECT_THROW(softmax(Vec{}), std::invalid_argument); }

TEST(MatrixType, ViewAndEquality) {
    Matrix m(2, 3);
    for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = static_cast<float>(i);
    const MatrixView v = m.view();
    EXPECT_EQ(v.rows, 2u);
    EXPECT_EQ(v.cols, 3u);
    EXPECT_EQ(v.at(1, 2), 5.0f);
    Matrix copy = m;
    EXPECT_EQ(copy, m);
    copy.at(0, 0) = 42.0f;
    EXPECT_NE(copy, m);
}
