#include "ksense/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace ksense {

namespace {

using nlohmann::json;

// Reads fields from one JSON object and rejects any key nobody asked for.
class ObjectReader {
public:
    ObjectReader(const json& node, std::string where) : node_(node), where_(std::move(where)) {
        if (!node_.is_object()) fail("expected a JSON object");
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    const json& at(const std::string& key) {
        seen_.insert(key);
        if (!node_.contains(key)) fail("missing required key '" + key + "'");
        return node_.at(key);
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    double number(const std::string& key) { return as_number(at(key), key); }
    double number_or(const std::string& key, double fallback) {
        const auto* v = find(key);
        return v ? as_number(*v, key) : fallback;
    }

    std::uint64_t unsigned_or(const std::string& key, std::uint64_t fallback) {
        const auto* v = find(key);
        return v ? as_unsigned(*v, key) : fallback;
    }
    std::uint64_t unsigned_at(const std::string& key) { return as_unsigned(at(key), key); }

    std::string string(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_string()) fail("'" + key + "' must be a string");
        return v.get<std::string>();
    }

    bool boolean_or(const std::string& key, bool fallback) {
        const auto* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) fail("'" + key + "' must be true or false");
        return v->get<bool>();
    }

    std::vector<double> numbers(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_array()) fail("'" + key + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) out.push_back(as_number(e, key));
        return out;
    }

    void finish() const {
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.contains(key)) fail("unknown key '" + key + "'");
        }
    }

    [[noreturn]] void fail(const std::string& message) const { throw ConfigError(where_ + ": " + message); }

private:
    double as_number(const json& v, const std::string& key) const {
        if (!v.is_number()) fail("'" + key + "' must be a number");
        return v.get<double>();
    }
    std::uint64_t as_unsigned(const json& v, const std::string& key) const {
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            fail("'" + key + "' must be a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    const json& node_;
    std::string where_;
    std::set<std::string> seen_;
};

KernelSpec parse_kernel(const json& node, const std::string& where) {
    ObjectReader r(node, where);
    const auto kind_name = r.string("kind");
    KernelKind kind{};
    try {
        kind = kernel_kind_from_string(kind_name);
    } catch (const std::invalid_argument& e) {
        r.fail(e.what());
    }
    try {
        KernelSpec spec = KernelSpec::linear();
        switch (kind) {
            case KernelKind::linear: break;
            case KernelKind::polynomial: {
                const double c = r.number("c");
                const auto degree = r.unsigned_at("degree");
                spec = KernelSpec::polynomial(c, static_cast<int>(degree));
                break;
            }
            case KernelKind::gaussian_rbf: spec = KernelSpec::gaussian_rbf(r.number("sigma")); break;
            case KernelKind::rbf: spec = KernelSpec::rbf(r.number("gamma")); break;
            case KernelKind::heavy_tailed_rbf: {
                const double gamma = r.number("gamma");
                const double a = r.number("a");
                const double b = r.number("b");
                spec = KernelSpec::heavy_tailed_rbf(gamma, a, b);
                break;
            }
            case KernelKind::tanh_nn: spec = KernelSpec::tanh_nn(r.number("b")); break;
        }
        r.finish();
        return spec;
    } catch (const std::invalid_argument& e) {
        r.fail(e.what());
    }
}

DetectorSpec parse_detector(const json& node) {
    ObjectReader r(node, "detector");
    DetectorKind kind{};
    try {
        kind = detector_kind_from_string(r.string("kind"));
    } catch (const std::invalid_argument& e) {
        r.fail(e.what());
    }
    DetectorSpec spec = default_detector_spec(kind);
    if (const auto* k = r.find("kernel")) {
        if (kind != DetectorKind::kpca && kind != DetectorKind::kglrt) r.fail("'kernel' only applies to kpca and kglrt");
        spec.kernel = parse_kernel(*k, "detector.kernel");
    }
    spec.rank_tol = r.number_or("rank_tol", spec.rank_tol);
    if (!(spec.rank_tol >= 0.0 && spec.rank_tol < 1.0)) r.fail("'rank_tol' must lie in [0, 1)");
    spec.centering = r.boolean_or("centering", spec.centering);
    if (kind == DetectorKind::kglrt && !spec.kernel->is_gaussian_family()) {
        r.fail("kglrt needs a gaussian_rbf or rbf kernel");
    }
    r.finish();
    return spec;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
}

SignalSource parse_signal(const json& node, const std::filesystem::path& base_dir) {
    ObjectReader r(node, "signal");
    const auto source = r.string("source");
    SignalSource out;
    if (source == "sinusoid") {
        SinusoidSource s;
        if (r.has("freqs")) s.freqs = r.numbers("freqs");
        if (r.has("phases")) {
            s.phases = r.numbers("phases");
        } else {
            s.phases.assign(s.freqs.size(), 0.0);
        }
        if (s.freqs.empty()) r.fail("'freqs' must not be empty");
        if (s.freqs.size() != s.phases.size()) r.fail("'freqs' and 'phases' differ in length");
        for (double f : s.freqs) {
            if (!(std::abs(f) < 0.5)) r.fail("sinusoid frequencies must satisfy |f| < 0.5");
        }
        out = s;
    } else if (source == "ar1") {
        Ar1Source s;
        s.coeff = r.number_or("coeff", s.coeff);
        s.seed = r.unsigned_or("seed", s.seed);
        if (!(std::abs(s.coeff) < 1.0)) r.fail("'coeff' must satisfy |coeff| < 1");
        out = s;
    } else if (source == "file") {
        FileSource s;
        s.path = resolve(base_dir, r.string("path"));
        if (const auto* f = r.find("format")) {
            if (!f->is_string()) r.fail("'format' must be a string");
            const auto name = f->get<std::string>();
            if (name == "csv") {
                s.format = SampleFormat::csv;
            } else if (name == "f64le") {
                s.format = SampleFormat::f64le;
            } else {
                r.fail("unknown format '" + name + "'");
            }
        }
        if (!std::filesystem::exists(s.path)) r.fail("file '" + s.path.string() + "' does not exist");
        out = s;
    } else {
        r.fail("unknown source '" + source + "'");
    }
    r.finish();
    return out;
}

SimilarityConfig parse_similarity(const json& node) {
    ObjectReader r(node, "similarity");
    SimilarityConfig s;
    s.segment_len = r.unsigned_or("segment_len", s.segment_len);
    if (s.segment_len == 0) r.fail("'segment_len' must be positive");
    if (const auto* m = r.find("method")) {
        if (!m->is_string()) r.fail("'method' must be a string");
        const auto name = m->get<std::string>();
        if (name == "pca") {
            s.method.kind = DetectorKind::pca;
        } else if (name == "kpca") {
            s.method.kind = DetectorKind::kpca;
            s.method.kernel = KernelSpec::polynomial(1.0, 2);
        } else {
            r.fail("'method' must be \"pca\" or \"kpca\"");
        }
    }
    if (const auto* k = r.find("kernel")) {
        if (s.method.kind != DetectorKind::kpca) r.fail("'kernel' only applies to the kpca method");
        s.method.kernel = parse_kernel(*k, "similarity.kernel");
    }
    if (const auto* len = r.find("stream_length")) {
        if (!len->is_number_unsigned() || len->get<std::uint64_t>() == 0) r.fail("'stream_length' must be a positive integer");
        s.stream_length = len->get<std::size_t>();
    }
    r.finish();
    return s;
}

}  // namespace

CliConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ObjectReader r(root, "config");
    const auto& version = r.at("version");
    if (!version.is_number_integer() || version.get<int>() != 1) r.fail("unsupported 'version' (expected 1)");

    CliConfig cfg;
    auto& e = cfg.experiment;
    e.detector = parse_detector(r.at("detector"));
    if (const auto* s = r.find("signal")) e.source = parse_signal(*s, base_dir);
    e.d = r.unsigned_or("d", e.d);
    e.stride = r.unsigned_or("stride", e.stride);
    e.length = r.unsigned_or("length", e.length);
    if (r.has("snr_db")) e.snr_grid = r.numbers("snr_db");
    e.trials = r.unsigned_or("trials", e.trials);
    e.target_pf = r.number_or("target_pf", e.target_pf);
    e.base_seed = r.unsigned_or("base_seed", e.base_seed);
    if (const auto* out = r.find("output")) {
        if (!out->is_string()) r.fail("'output' must be a string");
        cfg.output = resolve(base_dir, out->get<std::string>());
    }
    if (const auto* sim = r.find("similarity")) cfg.similarity = parse_similarity(*sim);
    r.finish();

    try {
        validate(e);
    } catch (const std::invalid_argument& err) {
        r.fail(err.what());
    }
    // File sources are read once here so short or malformed files surface as configuration errors.
    if (const auto* file = std::get_if<FileSource>(&e.source)) {
        try {
            const auto stream = load_samples(file->path, file->format);
            if (stream.size() < e.length && !cfg.similarity) {
                r.fail("file '" + file->path.string() + "' holds " + std::to_string(stream.size()) +
                       " samples, fewer than length " + std::to_string(e.length));
            }
            if (cfg.similarity && stream.size() < 2 * cfg.similarity->segment_len) {
                r.fail("file '" + file->path.string() + "' is shorter than two similarity segments");
            }
        } catch (const std::runtime_error& err) {
            if (dynamic_cast<const ConfigError*>(&err)) throw;
            r.fail(err.what());
        }
    }
    if (cfg.similarity) {
        const auto& s = *cfg.similarity;
        if (s.segment_len < e.d) r.fail("similarity segment_len must be at least d");
        if (!std::holds_alternative<FileSource>(e.source)) {
            const std::size_t total = s.stream_length.value_or(0);
            if (total < 2 * s.segment_len) r.fail("similarity.stream_length must cover at least two segments");
        }
    }
    return cfg;
}

CliConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.parent_path());
}

KernelSpec parse_kernel_json(const std::string& json_text) {
    try {
        return parse_kernel(json::parse(json_text), "kernel");
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("kernel is not valid JSON: ") + e.what());
    }
}

SampleStream similarity_stream(const CliConfig& config) {
    const auto& source = config.experiment.source;
    if (const auto* file = std::get_if<FileSource>(&source)) return load_samples(file->path, file->format);
    if (!config.similarity || !config.similarity->stream_length) {
        throw ConfigError("similarity.stream_length is required for generated signals");
    }
    return make_clean_signal(source, *config.similarity->stream_length);
}

}  // namespace ksense
