#include "ksense/framing.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ksense/random.hpp"

namespace ksense {

SampleStream::SampleStream(std::vector<double> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw std::invalid_argument("sample stream must not be empty");
    for (double v : samples_) {
        if (!std::isfinite(v)) throw std::invalid_argument("sample stream contains a non-finite value");
    }
}

double SampleStream::power() const noexcept {
    double acc = 0.0;
    for (double v : samples_) acc += v * v;
    return acc / static_cast<double>(samples_.size());
}

FrameSet::FrameSet(std::vector<double> data, std::size_t dim, std::size_t stride)
    : data_(std::move(data)), dim_(dim), stride_(stride) {
    if (dim_ == 0) throw std::invalid_argument("frame dimension must be positive");
    if (stride_ == 0) throw std::invalid_argument("frame stride must be positive");
    if (data_.size() % dim_ != 0) throw std::invalid_argument("frame data is not a whole number of frames");
}

double SnrSpec::noise_variance() const {
    if (!std::isfinite(snr_db) || !std::isfinite(signal_power) || signal_power < 0.0) {
        throw std::invalid_argument("SNR settings must be finite with non-negative signal power");
    }
    const double variance = signal_power / std::pow(10.0, snr_db / 10.0);
    if (!std::isfinite(variance) || variance <= 0.0) {
        throw std::invalid_argument("SNR settings imply a noise variance that is not finite and positive");
    }
    return variance;
}

SampleStream generate_sinusoid_mix(std::span<const double> freqs, std::span<const double> phases,
                                   std::size_t length) {
    if (freqs.empty()) throw std::invalid_argument("sinusoid mix needs at least one frequency");
    if (freqs.size() != phases.size()) throw std::invalid_argument("frequency and phase lists differ in length");
    if (length == 0) throw std::invalid_argument("stream length must be positive");
    for (std::size_t j = 0; j < freqs.size(); ++j) {
        if (!std::isfinite(freqs[j]) || !std::isfinite(phases[j])) {
            throw std::invalid_argument("sinusoid parameters must be finite");
        }
        if (std::abs(freqs[j]) >= 0.5) throw std::invalid_argument("sinusoid frequency must satisfy |f| < 0.5");
    }
    std::vector<double> out(length, 0.0);
    for (std::size_t n = 0; n < length; ++n) {
        double acc = 0.0;
        for (std::size_t j = 0; j < freqs.size(); ++j) {
            acc += std::sin(2.0 * std::numbers::pi * freqs[j] * static_cast<double>(n) + phases[j]);
        }
        out[n] = acc;
    }
    return SampleStream(std::move(out));
}

SampleStream generate_gaussian_noise(std::size_t length, double variance, std::uint64_t seed) {
    if (length == 0) throw std::invalid_argument("stream length must be positive");
    if (!std::isfinite(variance) || variance <= 0.0) throw std::invalid_argument("noise variance must be positive");
    Rng rng(seed);
    const double scale = std::sqrt(variance);
    std::vector<double> out(length);
    for (auto& v : out) v = scale * rng.normal();
    return SampleStream(std::move(out));
}

SampleStream add_streams(const SampleStream& a, const SampleStream& b) {
    if (a.size() != b.size()) throw std::invalid_argument("streams differ in length");
    std::vector<double> out(a.size());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = a[n] + b[n];
    return SampleStream(std::move(out));
}

SampleStream mix_at_snr(const SampleStream& signal, double snr_db, std::uint64_t seed) {
    const double power = signal.power();
    if (power <= 0.0) throw std::invalid_argument("cannot set SNR against a zero-power signal");
    const double variance = SnrSpec{snr_db, power}.noise_variance();
    return add_streams(signal, generate_gaussian_noise(signal.size(), variance, seed));
}

FrameSet frame_signal(const SampleStream& stream, std::size_t d, std::size_t stride) {
    if (d == 0 || stride == 0) throw std::invalid_argument("frame dimension and stride must be positive");
    if (stream.size() < d) throw std::invalid_argument("stream is shorter than one frame");
    const std::size_t count = (stream.size() - d) / stride + 1;
    std::vector<double> data(count * d);
    const auto samples = stream.samples();
    for (std::size_t j = 0; j < count; ++j) {
        std::copy_n(samples.begin() + static_cast<std::ptrdiff_t>(j * stride), d,
                    data.begin() + static_cast<std::ptrdiff_t>(j * d));
    }
    return FrameSet(std::move(data), d, stride);
}

SampleStream generate_ar1(std::size_t length, double coeff, std::uint64_t seed) {
    if (length == 0) throw std::invalid_argument("stream length must be positive");
    if (!std::isfinite(coeff) || std::abs(coeff) >= 1.0) throw std::invalid_argument("AR(1) coefficient must satisfy |coeff| < 1");
    Rng rng(seed);
    std::vector<double> out(length);
    double prev = 0.0;
    for (auto& v : out) {
        prev = coeff * prev + rng.normal();
        v = prev;
    }
    double power = 0.0;
    for (double v : out) power += v * v;
    power /= static_cast<double>(length);
    const double scale = 1.0 / std::sqrt(power);
    for (auto& v : out) v *= scale;
    return SampleStream(std::move(out));
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

SampleStream load_csv(std::istream& in, const std::filesystem::path& path) {
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto field = trim(line);
        if (field.empty()) {
            // Only a trailing newline is tolerated; blank lines in the middle are malformed.
            if (in.peek() == std::char_traits<char>::eof()) break;
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": empty line");
        }
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": malformed sample '" +
                                     std::string(field) + "'");
        }
        values.push_back(v);
    }
    if (values.empty()) throw std::runtime_error(path.string() + ": no samples");
    return SampleStream(std::move(values));
}

SampleStream load_f64le(std::istream& in, const std::filesystem::path& path) {
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (bytes.empty()) throw std::runtime_error(path.string() + ": no samples");
    if (bytes.size() % 8 != 0) throw std::runtime_error(path.string() + ": truncated 8-byte record");
    std::vector<double> values(bytes.size() / 8);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint64_t word = 0;
        for (int b = 7; b >= 0; --b) {
            word = (word << 8) | static_cast<unsigned char>(bytes[i * 8 + static_cast<std::size_t>(b)]);
        }
        values[i] = std::bit_cast<double>(word);
        if (!std::isfinite(values[i])) {
            throw std::runtime_error(path.string() + ": record " + std::to_string(i) + " is not finite");
        }
    }
    return SampleStream(std::move(values));
}

}  // namespace

SampleStream load_samples(const std::filesystem::path& path, SampleFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return format == SampleFormat::csv ? load_csv(in, path) : load_f64le(in, path);
}

void save_samples(const std::filesystem::path& path, const SampleStream& stream, SampleFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    if (format == SampleFormat::csv) {
        out << std::setprecision(17);
        for (double v : stream.samples()) out << v << '\n';
    } else {
        for (double v : stream.samples()) {
            auto word = std::bit_cast<std::uint64_t>(v);
            char buf[8];
            for (auto& c : buf) {
                c = static_cast<char>(word & 0xff);
                word >>= 8;
            }
            out.write(buf, 8);
        }
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace ksense
