#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "ksense/framing.hpp"
#include "ksense/random.hpp"

using namespace ksense;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("ksense_test_framing_" + name);
}

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("quarter-period sine") {
    const std::vector<double> f{0.25}, p{0.0};
    const auto s = generate_sinusoid_mix(f, p, 4);
    const double expected[] = {0.0, 1.0, 0.0, -1.0};
    for (std::size_t n = 0; n < 4; ++n) CHECK(std::abs(s[n] - expected[n]) <= 1e-12);
}

TEST_CASE("three-tone mix starts at zero and has brute-force power") {
    const std::vector<double> f{0.1, 0.2, 0.3}, p{0.0, 0.0, 0.0};
    const auto s = generate_sinusoid_mix(f, p, 500);
    CHECK(std::abs(s[0]) < 1e-15);

    // Oracle: direct long-double summation of the tones.
    long double acc = 0.0L;
    for (int n = 0; n < 500; ++n) {
        long double x = 0.0L;
        for (double fj : f) x += std::sin(2.0L * std::numbers::pi_v<long double> * fj * n);
        acc += x * x;
    }
    const double oracle = static_cast<double>(acc / 500.0L);
    CHECK(std::abs(s.power() - oracle) < 1e-12);
    // 500 samples hold whole periods of every tone, so the cross terms cancel.
    CHECK(std::abs(oracle - 1.5) < 1e-12);
}

TEST_CASE("sinusoid argument errors") {
    const std::vector<double> none;
    const std::vector<double> one{0.1}, two{0.1, 0.2}, bad{0.5};
    const std::vector<double> zero{0.0};
    const std::vector<double> nan{std::nan("")};
    CHECK_THROWS_AS(generate_sinusoid_mix(none, none, 10), std::invalid_argument);
    CHECK_THROWS_AS(generate_sinusoid_mix(one, two, 10), std::invalid_argument);
    CHECK_THROWS_AS(generate_sinusoid_mix(bad, zero, 10), std::invalid_argument);
    CHECK_THROWS_AS(generate_sinusoid_mix(nan, zero, 10), std::invalid_argument);
}

TEST_CASE("gaussian noise moments and determinism") {
    const auto a = generate_gaussian_noise(100000, 1.0, 7);
    CHECK(std::abs(mean_of(a.samples())) <= 0.02);

    const auto b = generate_gaussian_noise(100000, 4.0, 7);
    const double var = variance_of(b.samples());
    CHECK(var >= 3.85);
    CHECK(var <= 4.15);

    const auto c = generate_gaussian_noise(100000, 1.0, 7);
    CHECK(std::equal(a.samples().begin(), a.samples().end(), c.samples().begin()));

    CHECK_THROWS_AS(generate_gaussian_noise(10, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_gaussian_noise(10, -1.0, 1), std::invalid_argument);
}

TEST_CASE("noise variance from SNR") {
    CHECK(SnrSpec{0.0, 1.0}.noise_variance() == doctest::Approx(1.0));
    CHECK(SnrSpec{-20.0, 1.0}.noise_variance() == doctest::Approx(100.0));
    CHECK(SnrSpec{-10.0, 1.5}.noise_variance() == doctest::Approx(15.0));
    CHECK_THROWS_AS((SnrSpec{0.0, 0.0}.noise_variance()), std::invalid_argument);
}

TEST_CASE("mix_at_snr adds noise of the implied variance") {
    const std::vector<double> f{0.1, 0.2, 0.3}, p{0.0, 0.0, 0.0};
    const auto clean = generate_sinusoid_mix(f, p, 20000);
    const auto noisy = mix_at_snr(clean, -10.0, 11);
    std::vector<double> diff(clean.size());
    for (std::size_t n = 0; n < diff.size(); ++n) diff[n] = noisy[n] - clean[n];
    const double expected = SnrSpec{-10.0, clean.power()}.noise_variance();
    CHECK(std::abs(variance_of(diff) / expected - 1.0) < 0.05);

    const auto zero = SampleStream(std::vector<double>(16, 0.0));
    CHECK_THROWS_AS(mix_at_snr(zero, 0.0, 1), std::invalid_argument);
}

TEST_CASE("frame counts and offsets") {
    std::vector<double> ramp(500);
    for (std::size_t n = 0; n < ramp.size(); ++n) ramp[n] = static_cast<double>(n);
    const SampleStream stream(ramp);

    SUBCASE("d=128, stride 1") {
        const auto frames = frame_signal(stream, 128, 1);
        CHECK(frames.count() == 373);
        CHECK(frames.dim() == 128);
        for (std::size_t k = 0; k < 128; ++k) CHECK(frames.frame(0)[k] == stream[k]);
    }
    SUBCASE("single frame equals the stream") {
        const SampleStream five(std::vector<double>{1, 2, 3, 4, 5});
        const auto frames = frame_signal(five, 5, 1);
        REQUIRE(frames.count() == 1);
        for (std::size_t k = 0; k < 5; ++k) CHECK(frames.frame(0)[k] == five[k]);
    }
    SUBCASE("L=10, d=4, stride 3 starts at 0, 3, 6") {
        const SampleStream ten(std::vector<double>(ramp.begin(), ramp.begin() + 10));
        const auto frames = frame_signal(ten, 4, 3);
        REQUIRE(frames.count() == 3);
        CHECK(frames.frame(0)[0] == 0.0);
        CHECK(frames.frame(1)[0] == 3.0);
        CHECK(frames.frame(2)[0] == 6.0);
        CHECK(frames.frame(2)[3] == 9.0);
    }
    SUBCASE("too short") { CHECK_THROWS_AS(frame_signal(stream, 501, 1), std::invalid_argument); }
}

TEST_CASE("sample stream rejects non-finite input") {
    CHECK_THROWS_AS(SampleStream(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(SampleStream(std::vector<double>{1.0, INFINITY}), std::invalid_argument);
}

TEST_CASE("AR(1) surrogate") {
    SUBCASE("coefficient zero is unit-power white noise") {
        const auto s = generate_ar1(5000, 0.0, 3);
        CHECK(s.power() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("lag-1 autocorrelation tracks the coefficient") {
        const auto s = generate_ar1(100000, 0.95, 5);
        double num = 0.0, den = 0.0;
        for (std::size_t n = 0; n < s.size(); ++n) {
            den += s[n] * s[n];
            if (n + 1 < s.size()) num += s[n] * s[n + 1];
        }
        const double rho = num / den;
        CHECK(rho >= 0.93);
        CHECK(rho <= 0.97);
        CHECK(s.power() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("deterministic") {
        const auto a = generate_ar1(1000, 0.9, 42);
        const auto b = generate_ar1(1000, 0.9, 42);
        CHECK(std::equal(a.samples().begin(), a.samples().end(), b.samples().begin()));
    }
    CHECK_THROWS_AS(generate_ar1(10, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_ar1(10, -1.5, 1), std::invalid_argument);
}

TEST_CASE("csv loading") {
    const auto path = temp_file("basic.csv");
    {
        std::ofstream out(path);
        out << "1.0\n-2.5\n";
    }
    const auto s = load_samples(path, SampleFormat::csv);
    REQUIRE(s.size() == 2);
    CHECK(s[0] == 1.0);
    CHECK(s[1] == -2.5);

    {
        std::ofstream out(path);
        out << "3.25";  // no trailing newline
    }
    CHECK(load_samples(path, SampleFormat::csv)[0] == 3.25);

    {
        std::ofstream out(path);
        out << "1.0\nabc\n";
    }
    CHECK_THROWS_AS(load_samples(path, SampleFormat::csv), std::runtime_error);

    {
        std::ofstream out(path);
    }
    CHECK_THROWS_AS(load_samples(path, SampleFormat::csv), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("f64le loading") {
    const auto path = temp_file("basic.f64");
    {
        // IEEE-754: 0.0 is all zero bytes, 1.0 is 0x3FF0000000000000.
        const unsigned char bytes[16] = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0xF0, 0x3F};
        std::ofstream out(path, std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes), 16);
    }
    const auto s = load_samples(path, SampleFormat::f64le);
    REQUIRE(s.size() == 2);
    CHECK(s[0] == 0.0);
    CHECK(s[1] == 1.0);

    {
        std::ofstream out(path, std::ios::binary);
        out.write("\0\0\0\0\0\0\0\0\0\0\0", 11);
    }
    CHECK_THROWS_AS(load_samples(path, SampleFormat::f64le), std::runtime_error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_samples(path, SampleFormat::f64le), std::runtime_error);
}

TEST_CASE("save/load round trip preserves values exactly") {
    Rng rng(99);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> v(1 + rng.next_u64() % 200);
        for (auto& x : v) x = rng.normal() * std::pow(10.0, static_cast<double>(rng.next_u64() % 20) - 10.0);
        const SampleStream stream(v);
        for (auto fmt : {SampleFormat::csv, SampleFormat::f64le}) {
            const auto path = temp_file("roundtrip");
            save_samples(path, stream, fmt);
            const auto back = load_samples(path, fmt);
            REQUIRE(back.size() == stream.size());
            CHECK(std::equal(back.samples().begin(), back.samples().end(), stream.samples().begin()));
            std::filesystem::remove(path);
        }
    }
}

TEST_CASE("trial seeds are distinct across purposes, SNRs, and trials") {
    const auto a = trial_seed(1, SeedPurpose::calibration, -10.0, 0);
    CHECK(a != trial_seed(1, SeedPurpose::heldout, -10.0, 0));
    CHECK(a != trial_seed(1, SeedPurpose::calibration, -12.0, 0));
    CHECK(a != trial_seed(1, SeedPurpose::calibration, -10.0, 1));
    CHECK(a == trial_seed(1, SeedPurpose::calibration, -10.0, 0));
}
