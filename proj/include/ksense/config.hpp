#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "ksense/harness.hpp"

namespace ksense {

/// Malformed or invalid configuration. The CLI maps it to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimilarityConfig {
    std::size_t segment_len = 500;
    SimilarityMethod method;
    /// Total stream length for generated sources; file sources use the whole file.
    std::optional<std::size_t> stream_length;
};

/// Version-1 JSON configuration document.
///
///   {
///     "version": 1,
///     "detector": {"kind": "kpca", "kernel": {"kind": "polynomial", "c": 1, "degree": 2},
///                  "rank_tol": 1e-8, "centering": false},
///     "signal": {"source": "sinusoid", "freqs": [0.1, 0.2, 0.3], "phases": [0, 0, 0]},
///     "d": 128, "stride": 1, "length": 500,
///     "snr_db": [-24, -22], "trials": 1000, "target_pf": 0.1, "base_seed": 1,
///     "output": "sweep.csv",
///     "similarity": {"segment_len": 500, "method": "kpca", "kernel": {...}, "stream_length": 25000}
///   }
///
/// Unknown keys are rejected at every level. Signal sources are "sinusoid",
/// "ar1" (coeff, seed) and "file" (path, format: "csv" | "f64le").
struct CliConfig {
    ExperimentConfig experiment;
    std::optional<std::filesystem::path> output;
    std::optional<SimilarityConfig> similarity;
};

/// Parses and validates. Relative file paths resolve against `base_dir`.
CliConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
CliConfig load_config(const std::filesystem::path& path);

KernelSpec parse_kernel_json(const std::string& json_text);

/// The stream fed to segment_similarity for this configuration.
SampleStream similarity_stream(const CliConfig& config);

}  // namespace ksense
