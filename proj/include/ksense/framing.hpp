#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ksense {

/// A finite, nonempty sequence of real samples.
class SampleStream {
public:
    explicit SampleStream(std::vector<double> samples);

    std::size_t size() const noexcept { return samples_.size(); }
    std::span<const double> samples() const noexcept { return samples_; }
    double operator[](std::size_t n) const noexcept { return samples_[n]; }

    /// Mean-square amplitude (1/L) sum x(n)^2.
    double power() const noexcept;

private:
    std::vector<double> samples_;
};

/// M frames of dimension d stored contiguously, frame-major.
class FrameSet {
public:
    FrameSet(std::vector<double> data, std::size_t dim, std::size_t stride = 1);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t count() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
    std::size_t stride() const noexcept { return stride_; }
    bool empty() const noexcept { return data_.empty(); }

    std::span<const double> frame(std::size_t j) const noexcept {
        return {data_.data() + j * dim_, dim_};
    }
    std::span<const double> data() const noexcept { return data_; }

private:
    std::vector<double> data_;
    std::size_t dim_;
    std::size_t stride_;
};

/// Target SNR together with the power of the signal it refers to.
/// SNR(dB) = 10 log10(signal power / noise variance).
struct SnrSpec {
    double snr_db = 0.0;
    double signal_power = 1.0;

    /// sigma^2 = signal_power / 10^(snr_db/10); throws if not finite and positive.
    double noise_variance() const;
};

enum class SampleFormat { csv, f64le };

SampleStream generate_sinusoid_mix(std::span<const double> freqs, std::span<const double> phases,
                                   std::size_t length);

SampleStream generate_gaussian_noise(std::size_t length, double variance, std::uint64_t seed);

/// signal + white Gaussian noise at the variance implied by snr_db and the
/// signal's own mean-square power.
SampleStream mix_at_snr(const SampleStream& signal, double snr_db, std::uint64_t seed);

/// Sample-wise sum of two equal-length streams.
SampleStream add_streams(const SampleStream& a, const SampleStream& b);

/// Frame j covers samples [j*stride, j*stride + d); M = floor((L-d)/stride) + 1.
FrameSet frame_signal(const SampleStream& stream, std::size_t d, std::size_t stride);

/// AR(1) process s(n) = coeff*s(n-1) + e(n), rescaled to unit mean-square power.
SampleStream generate_ar1(std::size_t length, double coeff, std::uint64_t seed);

SampleStream load_samples(const std::filesystem::path& path, SampleFormat format);
void save_samples(const std::filesystem::path& path, const SampleStream& stream, SampleFormat format);

}  // namespace ksense
