#include "ksense/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "ksense/config.hpp"
#include "ksense/harness.hpp"

namespace ksense {

namespace {

struct Options {
    std::string config_path;
    std::string out_path;
    unsigned threads = 0;
    std::optional<double> snr;
};

// Opens the destination chosen by --out, then the config's "output", then `fallback`.
void emit(const Options& opts, const CliConfig& cfg, std::ostream& fallback,
          const std::function<void(std::ostream&)>& write) {
    std::filesystem::path path;
    if (!opts.out_path.empty()) {
        path = opts.out_path;
    } else if (cfg.output) {
        path = *cfg.output;
    }
    if (path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    write(file);
    if (!file) throw std::runtime_error("failed writing " + path.string());
}

std::string format_threshold(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kernel-method spectrum sensing: detection sweeps, ROC curves, and template similarity"};
    app.require_subcommand(1);

    Options opts;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "JSON experiment configuration")->required();
        sub->add_option("--out", opts.out_path, "Output file (overrides the config's \"output\")");
        sub->add_option("--threads", opts.threads, "Worker threads, 0 = auto")->default_val(0);
    };
    auto* sweep = app.add_subcommand("sweep", "Detection rate versus SNR at a calibrated false-alarm rate");
    auto* roc = app.add_subcommand("roc", "ROC curve at one SNR");
    auto* similarity = app.add_subcommand("similarity", "Segment-to-first-segment template similarity");
    auto* calibrate = app.add_subcommand("calibrate", "Print the calibrated threshold at one SNR");
    for (auto* sub : {sweep, roc, similarity, calibrate}) add_common(sub);
    for (auto* sub : {roc, calibrate}) sub->add_option("--snr", opts.snr, "SNR in dB")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    }

    CliConfig cfg;
    try {
        cfg = load_config(opts.config_path);
        cfg.experiment.threads = opts.threads;
        if (sweep->parsed() && cfg.experiment.snr_grid.empty()) {
            throw ConfigError("config: sweep needs a non-empty 'snr_db' grid");
        }
        if (similarity->parsed() && !cfg.similarity) throw ConfigError("config: similarity needs a 'similarity' section");
        if (opts.snr && !std::isfinite(*opts.snr)) throw ConfigError("--snr must be finite");
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    }

    try {
        if (sweep->parsed()) {
            const auto report = run_sweep(cfg.experiment);
            emit(opts, cfg, out, [&](std::ostream& s) { write_report_csv(s, report); });
        } else if (roc->parsed()) {
            const auto curve = roc_curve(cfg.experiment, *opts.snr);
            emit(opts, cfg, out, [&](std::ostream& s) { write_roc_csv(s, curve); });
        } else if (similarity->parsed()) {
            const auto& sim = *cfg.similarity;
            const auto values = segment_similarity(similarity_stream(cfg), sim.segment_len, sim.method,
                                                   cfg.experiment.d, cfg.experiment.stride);
            emit(opts, cfg, out, [&](std::ostream& s) { write_similarity_csv(s, values); });
        } else {
            out << format_threshold(calibrate_threshold(cfg.experiment, *opts.snr)) << '\n';
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
    return kExitOk;
}

}  // namespace ksense
