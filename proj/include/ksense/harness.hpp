#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "ksense/detectors.hpp"
#include "ksense/framing.hpp"
#include "ksense/kernels.hpp"
#include "ksense/random.hpp"

namespace ksense {

struct SinusoidSource {
    std::vector<double> freqs{0.1, 0.2, 0.3};
    std::vector<double> phases{0.0, 0.0, 0.0};
};

struct Ar1Source {
    double coeff = 0.95;
    std::uint64_t seed = 1;
};

struct FileSource {
    std::filesystem::path path;
    SampleFormat format = SampleFormat::csv;
};

using SignalSource = std::variant<SinusoidSource, Ar1Source, FileSource>;

/// Produces `length` clean samples. File sources are truncated to `length`
/// and must hold at least that many samples.
SampleStream make_clean_signal(const SignalSource& source, std::size_t length);

struct ExperimentConfig {
    DetectorSpec detector;
    SignalSource source = SinusoidSource{};
    std::size_t d = 128;
    std::size_t stride = 1;
    std::size_t length = 500;
    std::vector<double> snr_grid;
    std::size_t trials = 1000;
    double target_pf = 0.1;
    std::uint64_t base_seed = 1;
    unsigned threads = 0;  // 0 = hardware concurrency
};

/// Throws std::invalid_argument naming the offending field. The SNR grid is
/// checked by run_sweep, since ROC and calibration runs take a single SNR.
void validate(const ExperimentConfig& config);

struct SweepRow {
    double snr_db = 0.0;
    double threshold = 0.0;
    double pd = 0.0;
    double pf = 0.0;
};

struct TrialReport {
    DetectorKind detector = DetectorKind::pca;
    std::size_t trials = 0;
    std::vector<SweepRow> rows;  // ascending snr_db
};

struct RocPoint {
    double pf = 0.0;
    double pd = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // pf nondecreasing

    /// Trapezoidal area under the curve.
    double area() const noexcept;
};

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Rethrows the first exception raised by any call.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Empirical (1 - target_pf) quantile with linear interpolation between order
/// statistics. NumericalError if every score is identical.
double quantile_threshold(std::vector<double> scores, double target_pf);

/// Fraction of scores strictly above the threshold.
double exceedance_rate(const std::vector<double>& scores, double threshold) noexcept;

/// Clean signal, its training frames, and its power, shared by every trial.
class Experiment {
public:
    explicit Experiment(const ExperimentConfig& config);

    const ExperimentConfig& config() const noexcept { return config_; }
    const SampleStream& clean() const noexcept { return clean_; }
    const FrameSet& training() const noexcept { return training_; }
    double signal_power() const noexcept { return power_; }
    double noise_variance(double snr_db) const { return SnrSpec{snr_db, power_}.noise_variance(); }

    Detector build_detector(double snr_db) const;

    /// Scores `trials` realizations. With signal_present the clean signal is
    /// added to fresh noise; otherwise frames are pure noise.
    std::vector<double> score_trials(const Detector& detector, double snr_db, SeedPurpose purpose,
                                     bool signal_present) const;

private:
    ExperimentConfig config_;
    SampleStream clean_;
    FrameSet training_;
    double power_;
};

double calibrate_threshold(const Experiment& experiment, const Detector& detector, double snr_db);
double calibrate_threshold(const ExperimentConfig& config, double snr_db);

TrialReport run_sweep(const ExperimentConfig& config);

/// Builds the curve from already-scored noise-only and signal-present trials.
RocCurve roc_from_scores(const std::vector<double>& noise_scores, const std::vector<double>& signal_scores);
RocCurve roc_curve(const ExperimentConfig& config, double snr_db);

struct SimilarityMethod {
    DetectorKind kind = DetectorKind::pca;  // pca or kpca
    std::optional<KernelSpec> kernel;       // required for kpca
};

/// Trains on segment 0 and scores every later whole segment against it.
std::vector<double> segment_similarity(const SampleStream& stream, std::size_t segment_len,
                                       const SimilarityMethod& method, std::size_t d, std::size_t stride);

void write_report_csv(std::ostream& out, const TrialReport& report);
void write_roc_csv(std::ostream& out, const RocCurve& curve);
void write_similarity_csv(std::ostream& out, const std::vector<double>& similarities);

}  // namespace ksense
