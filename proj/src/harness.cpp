#include "ksense/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

namespace ksense {

SampleStream make_clean_signal(const SignalSource& source, std::size_t length) {
    struct Visitor {
        std::size_t length;
        SampleStream operator()(const SinusoidSource& s) const {
            return generate_sinusoid_mix(s.freqs, s.phases, length);
        }
        SampleStream operator()(const Ar1Source& s) const { return generate_ar1(length, s.coeff, s.seed); }
        SampleStream operator()(const FileSource& s) const {
            auto stream = load_samples(s.path, s.format);
            if (stream.size() < length) {
                throw std::invalid_argument(s.path.string() + " holds " + std::to_string(stream.size()) +
                                            " samples, " + std::to_string(length) + " required");
            }
            const auto samples = stream.samples();
            return SampleStream(std::vector<double>(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(length)));
        }
    };
    return std::visit(Visitor{length}, source);
}

void validate(const ExperimentConfig& c) {
    if (c.d == 0) throw std::invalid_argument("d must be positive");
    if (c.stride == 0) throw std::invalid_argument("stride must be positive");
    if (c.length < c.d) throw std::invalid_argument("length must be at least d");
    if (c.trials == 0) throw std::invalid_argument("trials must be positive");
    if (!(c.target_pf > 0.0 && c.target_pf < 1.0)) throw std::invalid_argument("target_pf must lie in (0, 1)");
    for (double s : c.snr_grid) {
        if (!std::isfinite(s)) throw std::invalid_argument("snr grid values must be finite");
    }
    if ((c.detector.kind == DetectorKind::kpca || c.detector.kind == DetectorKind::kglrt) && !c.detector.kernel) {
        throw std::invalid_argument("detector " + std::string(to_string(c.detector.kind)) + " needs a kernel");
    }
    if (c.detector.kind == DetectorKind::kglrt && !c.detector.kernel->is_gaussian_family()) {
        throw std::invalid_argument("kglrt detector needs a gaussian_rbf or rbf kernel");
    }
}

double RocCurve::area() const noexcept {
    double acc = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        acc += (points[i].pf - points[i - 1].pf) * 0.5 * (points[i].pd + points[i - 1].pd);
    }
    return acc;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = count;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

double quantile_threshold(std::vector<double> scores, double target_pf) {
    if (scores.empty()) throw std::invalid_argument("cannot calibrate on zero scores");
    if (!(target_pf > 0.0 && target_pf < 1.0)) throw std::invalid_argument("target_pf must lie in (0, 1)");
    std::sort(scores.begin(), scores.end());
    if (scores.front() == scores.back()) {
        throw NumericalError("degenerate score distribution: all calibration scores are equal");
    }
    const double pos = (1.0 - target_pf) * static_cast<double>(scores.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, scores.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return scores[lo] + frac * (scores[hi] - scores[lo]);
}

double exceedance_rate(const std::vector<double>& scores, double threshold) noexcept {
    if (scores.empty()) return 0.0;
    const auto hits = std::count_if(scores.begin(), scores.end(), [&](double s) { return s > threshold; });
    return static_cast<double>(hits) / static_cast<double>(scores.size());
}

Experiment::Experiment(const ExperimentConfig& config)
    : config_((validate(config), config)),
      clean_(make_clean_signal(config.source, config.length)),
      training_(frame_signal(clean_, config.d, config.stride)),
      power_(clean_.power()) {
    if (power_ <= 0.0) throw std::invalid_argument("clean signal has zero power; SNR is undefined");
}

Detector Experiment::build_detector(double snr_db) const {
    return make_detector(config_.detector, training_, noise_variance(snr_db));
}

std::vector<double> Experiment::score_trials(const Detector& detector, double snr_db, SeedPurpose purpose,
                                             bool signal_present) const {
    const double variance = noise_variance(snr_db);
    std::vector<double> scores(config_.trials);
    parallel_for(config_.trials, config_.threads, [&](std::size_t trial) {
        const auto seed = trial_seed(config_.base_seed, purpose, snr_db, trial);
        auto noise = generate_gaussian_noise(config_.length, variance, seed);
        const auto received = signal_present ? add_streams(clean_, noise) : std::move(noise);
        scores[trial] = detector.score(frame_signal(received, config_.d, config_.stride));
    });
    return scores;
}

double calibrate_threshold(const Experiment& experiment, const Detector& detector, double snr_db) {
    if (experiment.config().trials < 50) throw std::invalid_argument("calibration needs at least 50 trials");
    const auto scores = experiment.score_trials(detector, snr_db, SeedPurpose::calibration, false);
    return quantile_threshold(scores, experiment.config().target_pf);
}

double calibrate_threshold(const ExperimentConfig& config, double snr_db) {
    const Experiment experiment(config);
    return calibrate_threshold(experiment, experiment.build_detector(snr_db), snr_db);
}

TrialReport run_sweep(const ExperimentConfig& config) {
    if (config.snr_grid.empty()) throw std::invalid_argument("snr grid must not be empty");
    const Experiment experiment(config);
    auto grid = config.snr_grid;
    std::sort(grid.begin(), grid.end());

    TrialReport report{config.detector.kind, config.trials, {}};
    for (double snr : grid) {
        const auto detector = experiment.build_detector(snr);
        const double threshold = calibrate_threshold(experiment, detector, snr);
        const auto present = experiment.score_trials(detector, snr, SeedPurpose::detection, true);
        const auto heldout = experiment.score_trials(detector, snr, SeedPurpose::heldout, false);
        report.rows.push_back({snr, threshold, exceedance_rate(present, threshold), exceedance_rate(heldout, threshold)});
    }
    return report;
}

RocCurve roc_from_scores(const std::vector<double>& noise_scores, const std::vector<double>& signal_scores) {
    if (noise_scores.empty() || signal_scores.empty()) throw std::invalid_argument("ROC needs scores under both hypotheses");
    std::vector<double> noise = noise_scores, signal = signal_scores;
    std::sort(noise.begin(), noise.end(), std::greater<>());
    std::sort(signal.begin(), signal.end(), std::greater<>());
    std::vector<double> thresholds = noise;
    thresholds.insert(thresholds.end(), signal.begin(), signal.end());
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    // Decide "signal" when score >= threshold; walk thresholds downward.
    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    std::size_t noise_hits = 0, signal_hits = 0;
    const auto n0 = static_cast<double>(noise.size());
    const auto n1 = static_cast<double>(signal.size());
    for (double t : thresholds) {
        while (noise_hits < noise.size() && noise[noise_hits] >= t) ++noise_hits;
        while (signal_hits < signal.size() && signal[signal_hits] >= t) ++signal_hits;
        curve.points.push_back({static_cast<double>(noise_hits) / n0, static_cast<double>(signal_hits) / n1});
    }
    return curve;
}

RocCurve roc_curve(const ExperimentConfig& config, double snr_db) {
    if (!std::isfinite(snr_db)) throw std::invalid_argument("snr must be finite");
    const Experiment experiment(config);
    const auto detector = experiment.build_detector(snr_db);
    const auto noise = experiment.score_trials(detector, snr_db, SeedPurpose::roc_noise, false);
    const auto signal = experiment.score_trials(detector, snr_db, SeedPurpose::roc_signal, true);
    return roc_from_scores(noise, signal);
}

std::vector<double> segment_similarity(const SampleStream& stream, std::size_t segment_len,
                                       const SimilarityMethod& method, std::size_t d, std::size_t stride) {
    if (segment_len < d) throw std::invalid_argument("segment length must be at least d");
    if (stream.size() < 2 * segment_len) throw std::invalid_argument("stream holds fewer than two segments");
    if (method.kind != DetectorKind::pca && method.kind != DetectorKind::kpca) {
        throw std::invalid_argument("segment similarity supports pca and kpca only");
    }
    if (method.kind == DetectorKind::kpca && !method.kernel) throw std::invalid_argument("kpca similarity needs a kernel");

    const auto samples = stream.samples();
    const std::size_t segments = stream.size() / segment_len;
    const auto segment_frames = [&](std::size_t s) {
        const auto begin = samples.begin() + static_cast<std::ptrdiff_t>(s * segment_len);
        return frame_signal(SampleStream(std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(segment_len))),
                            d, stride);
    };

    const auto reference = segment_frames(0);
    std::vector<double> out;
    out.reserve(segments - 1);
    if (method.kind == DetectorKind::pca) {
        const auto templ = train_pca(reference);
        for (std::size_t s = 1; s < segments; ++s) out.push_back(score_pca(templ, segment_frames(s)));
    } else {
        const auto templ = train_kpca(*method.kernel, reference);
        for (std::size_t s = 1; s < segments; ++s) out.push_back(score_kpca(templ, segment_frames(s)));
    }
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void write_report_csv(std::ostream& out, const TrialReport& report) {
    out << "snr_db,threshold,pd,pf\n";
    for (const auto& r : report.rows) {
        out << fmt(r.snr_db) << ',' << fmt(r.threshold) << ',' << fmt(r.pd) << ',' << fmt(r.pf) << '\n';
    }
}

void write_roc_csv(std::ostream& out, const RocCurve& curve) {
    out << "pf,pd\n";
    for (const auto& p : curve.points) out << fmt(p.pf) << ',' << fmt(p.pd) << '\n';
}

void write_similarity_csv(std::ostream& out, const std::vector<double>& similarities) {
    for (double s : similarities) out << fmt(s) << '\n';
}

}  // namespace ksense
