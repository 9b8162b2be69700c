#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ksense/eig.hpp"
#include "ksense/kernels.hpp"
#include "ksense/random.hpp"

using namespace ksense;

namespace {

FrameSet random_frames(std::size_t m, std::size_t d, Rng& rng, double scale = 1.0) {
    std::vector<double> data(m * d);
    for (auto& x : data) x = scale * rng.normal();
    return FrameSet(std::move(data), d);
}

std::vector<KernelSpec> psd_kernels() {
    return {KernelSpec::linear(),          KernelSpec::polynomial(1.0, 2),      KernelSpec::polynomial(0.5, 3),
            KernelSpec::gaussian_rbf(2.0), KernelSpec::rbf(0.3),                KernelSpec::heavy_tailed_rbf(0.5, 0.5, 1.0),
            KernelSpec::heavy_tailed_rbf(0.2, 1.0, 2.0)};
}

}  // namespace

TEST_CASE("kernel values") {
    const std::vector<double> e1{1.0, 0.0};
    CHECK(eval_kernel(KernelSpec::polynomial(1.0, 2), e1, e1) == 4.0);
    CHECK(eval_kernel(KernelSpec::gaussian_rbf(0.7), e1, e1) == 1.0);

    // sigma = 15/sqrt2 gives 2 sigma^2 = 225; ||x - y||^2 = 9^2 + 12^2 = 225.
    const std::vector<double> x{9.0, 12.0}, zero{0.0, 0.0};
    const auto k = KernelSpec::gaussian_rbf(15.0 / std::sqrt(2.0));
    CHECK(std::abs(eval_kernel(k, x, zero) - std::exp(-1.0)) <= 1e-15);
    // Half the squared distance halves the exponent.
    const std::vector<double> half{7.5, 7.5};
    CHECK(std::abs(eval_kernel(k, half, zero) - std::exp(-0.5)) <= 1e-15);

    CHECK(eval_kernel(KernelSpec::linear(), x, e1) == 9.0);
    CHECK(eval_kernel(KernelSpec::tanh_nn(0.5), e1, e1) == doctest::Approx(std::tanh(1.5)));

    // Signed power keeps negative samples well defined.
    const std::vector<double> neg{-4.0}, pos{4.0};
    const double ht = eval_kernel(KernelSpec::heavy_tailed_rbf(1.0, 0.5, 1.0), neg, pos);
    CHECK(ht == doctest::Approx(std::exp(-4.0)));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(KernelSpec::polynomial(-1.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::polynomial(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::gaussian_rbf(0.0), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::rbf(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::heavy_tailed_rbf(1.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::tanh_nn(NAN), std::invalid_argument);
    const std::vector<double> a{1.0}, b{1.0, 2.0};
    CHECK_THROWS_AS(eval_kernel(KernelSpec::linear(), a, b), std::invalid_argument);
    CHECK(kernel_kind_from_string("heavy_tailed_rbf") == KernelKind::heavy_tailed_rbf);
    CHECK_THROWS_AS(kernel_kind_from_string("cubic"), std::invalid_argument);
}

TEST_CASE("symmetry and gaussian/rbf equivalence") {
    Rng rng(12);
    auto kernels = psd_kernels();
    kernels.push_back(KernelSpec::tanh_nn(-0.3));
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x(7), y(7);
        for (auto& v : x) v = rng.normal();
        for (auto& v : y) v = rng.normal();
        for (const auto& k : kernels) CHECK(eval_kernel(k, x, y) == eval_kernel(k, y, x));
        const double sigma = 0.5 + rng.uniform() * 3.0;
        const double g = eval_kernel(KernelSpec::gaussian_rbf(sigma), x, y);
        const double r = eval_kernel(KernelSpec::rbf(1.0 / (2.0 * sigma * sigma)), x, y);
        CHECK(std::abs(g - r) <= 1e-15 * std::abs(g));
    }
}

TEST_CASE("gram matrix vs double loop") {
    Rng rng(2);
    const auto frames = random_frames(9, 5, rng);
    for (const auto& k : psd_kernels()) {
        const auto g = gram_matrix(k, frames);
        for (std::size_t i = 0; i < 9; ++i) {
            for (std::size_t j = 0; j < 9; ++j) {
                const double direct = k(frames.frame(i), frames.frame(j));
                CHECK(std::abs(g(i, j) - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
            }
        }
    }
    const auto one = gram_matrix(KernelSpec::gaussian_rbf(1.0), FrameSet({3.0, 4.0}, 2));
    CHECK(one.order() == 1);
    CHECK(one(0, 0) == 1.0);
}

TEST_CASE("Mercer PSD property") {
    Rng rng(77);
    for (const auto& k : psd_kernels()) {
        for (int rep = 0; rep < 10; ++rep) {
            const std::size_t m = 2 + rng.next_u64() % 31;
            const auto values = sym_eigenvalues(gram_matrix(k, random_frames(m, 6, rng)));
            CHECK(values.back() >= -1e-8 * std::max(1.0, values.front()));
        }
    }
}

TEST_CASE("cross gram") {
    // a = {[1,0], [0,1], [1,1]}, b = {[2,0], [0,3]} under the linear kernel.
    const FrameSet a({1, 0, 0, 1, 1, 1}, 2);
    const FrameSet b({2, 0, 0, 3}, 2);
    const auto g = cross_gram(KernelSpec::linear(), a, b);
    REQUIRE(g.rows() == 3);
    REQUIRE(g.cols() == 2);
    const double expected[3][2] = {{2, 0}, {0, 3}, {2, 3}};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(g(i, j) == expected[i][j]);

    const FrameSet ortho_a({1, 0, 0, 0}, 2), ortho_b({0, 1, 0, 5}, 2);
    const auto z = cross_gram(KernelSpec::linear(), ortho_a, ortho_b);
    for (double v : z.data()) CHECK(v == 0.0);

    Rng rng(6);
    const auto f = random_frames(6, 4, rng);
    for (const auto& k : psd_kernels()) {
        const auto self = cross_gram(k, f, f);
        const auto gram = gram_matrix(k, f);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(self(i, j) - gram(i, j)) <= 1e-12 * std::max(1.0, std::abs(gram(i, j))));
    }
    CHECK_THROWS_AS(cross_gram(KernelSpec::linear(), a, FrameSet({1, 2, 3}, 3)), std::invalid_argument);
}

TEST_CASE("gram centering") {
    SUBCASE("constant matrix centers to zero") {
        const auto c = center_gram(SymMatrix(Matrix(4, 4, 1.0)));
        for (double v : c.matrix().data()) CHECK(std::abs(v) <= 1e-15);
    }
    SUBCASE("random 5x5 vs explicit 1_M products") {
        Rng rng(9);
        const auto k = gram_matrix(KernelSpec::polynomial(1.0, 2), random_frames(5, 3, rng));
        const std::size_t m = 5;
        const double w = 1.0 / m;
        // 1_M K, K 1_M, 1_M K 1_M by plain loops.
        Matrix ok(m, m), ko(m, m), oko(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t l = 0; l < m; ++l) {
                    ok(i, j) += w * k(l, j);
                    ko(i, j) += k(i, l) * w;
                }
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t l = 0; l < m; ++l) oko(i, j) += ok(i, l) * w;
        const auto c = center_gram(k);
        const double scale = k.matrix().frobenius_norm();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                CHECK(std::abs(c(i, j) - (k(i, j) - ok(i, j) - ko(i, j) + oko(i, j))) <= 1e-12 * scale);
        for (std::size_t i = 0; i < m; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < m; ++j) row += c(i, j);
            CHECK(std::abs(row) <= 1e-9 * scale);
        }
        const auto twice = center_gram(c);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) CHECK(std::abs(twice(i, j) - c(i, j)) <= 1e-12 * scale);
    }
}

TEST_CASE("kernel vector centering") {
    const std::vector<double> ones{1, 1, 1};
    for (double v : center_kernel_vector(ones)) CHECK(v == 0.0);
    const std::vector<double> two{2, 0};
    const auto c = center_kernel_vector(two);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == -1.0);

    Rng rng(7);
    std::vector<double> kt(7);
    for (auto& v : kt) v = rng.uniform();
    double mean = 0.0;
    for (double v : kt) mean += v / 7.0;
    const auto out = center_kernel_vector(kt);
    double sum = 0.0, biggest = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(std::abs(out[i] - (kt[i] - mean)) <= 1e-15);
        sum += out[i];
        biggest = std::max(biggest, std::abs(kt[i]));
    }
    CHECK(std::abs(sum) <= 1e-12 * 7 * biggest);
    CHECK_THROWS_AS(center_kernel_vector(std::vector<double>{}), std::invalid_argument);
}
