#include "ksense/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ksense {

namespace {

void require_same_dim(std::size_t expected, const FrameSet& received) {
    if (received.empty()) throw std::invalid_argument("received frame set is empty");
    if (received.dim() != expected) {
        throw std::invalid_argument("received frames have dimension " + std::to_string(received.dim()) +
                                    ", template expects " + std::to_string(expected));
    }
}

// Leading Gram eigenvector rescaled so that mu * <beta, beta> = 1.
EigenPair normalized_leading_beta(const SymMatrix& gram) {
    auto lead = leading_eigvec(gram);
    const double trace = gram.trace();
    if (!(lead.value > 1e-12 * std::abs(trace)) || lead.value <= 0.0) {
        throw NumericalError("degenerate Gram matrix: leading eigenvalue is not positive");
    }
    const double scale = 1.0 / std::sqrt(lead.value);
    for (auto& b : lead.vector) b *= scale;
    return lead;
}

}  // namespace

// ---------------------------------------------------------------------------

PcaTemplate train_pca(const FrameSet& training) {
    return PcaTemplate{leading_eigvec(sample_covariance(training)).vector};
}

double lag_scan_similarity(std::span<const double> templ, std::span<const double> received) {
    const std::size_t d = templ.size();
    double best = 0.0;
    // l = d only touches the zero padding, so it never beats l = 0.
    for (std::size_t lag = 0; lag <= d; ++lag) {
        double acc = 0.0;
        for (std::size_t k = 0; k + lag < d; ++k) acc += templ[k] * received[k + lag];
        best = std::max(best, std::abs(acc));
    }
    return best;
}

double score_pca(const PcaTemplate& t, const FrameSet& received) {
    require_same_dim(t.v1.size(), received);
    const auto lead = leading_eigvec(sample_covariance(received));
    return lag_scan_similarity(t.v1, lead.vector);
}

// ---------------------------------------------------------------------------

Matrix center_cross_gram(const Matrix& kt) {
    const std::size_t rows = kt.rows();
    const std::size_t cols = kt.cols();
    std::vector<double> row_mean(rows, 0.0), col_mean(cols, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            row_mean[i] += kt(i, j);
            col_mean[j] += kt(i, j);
        }
        total += row_mean[i];
    }
    for (auto& v : row_mean) v /= static_cast<double>(cols);
    for (auto& v : col_mean) v /= static_cast<double>(rows);
    total /= static_cast<double>(rows * cols);
    Matrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) out(i, j) = kt(i, j) - row_mean[i] - col_mean[j] + total;
    }
    return out;
}

KpcaTemplate train_kpca(const KernelSpec& kernel, const FrameSet& training, bool centered) {
    if (training.count() < 2) throw std::invalid_argument("kernel PCA needs at least two training frames");
    auto gram = gram_matrix(kernel, training);
    if (centered) gram = center_gram(gram);
    auto lead = normalized_leading_beta(gram);
    return KpcaTemplate{kernel, training, std::move(lead.vector), lead.value, centered};
}

double score_kpca(const KpcaTemplate& t, const FrameSet& received) {
    require_same_dim(t.training.dim(), received);
    auto received_gram = gram_matrix(t.kernel, received);
    if (t.centered) received_gram = center_gram(received_gram);
    const auto received_beta = normalized_leading_beta(received_gram).vector;

    Matrix kt = cross_gram(t.kernel, t.training, received);
    if (t.centered) kt = center_cross_gram(kt);
    return std::abs(dot(t.beta1, multiply(kt, received_beta)));
}

// ---------------------------------------------------------------------------

SubspaceTemplate train_glrt(const FrameSet& training, double rank_tol) {
    if (!(rank_tol >= 0.0)) throw std::invalid_argument("rank tolerance must be non-negative");
    const auto eig = sym_eig(sample_covariance(training));
    const double lead = eig.values.front();
    std::size_t rank = 0;
    if (lead > 0.0) {
        while (rank < eig.values.size() && eig.values[rank] > rank_tol * lead) ++rank;
    }
    if (rank == 0) throw NumericalError("training covariance has no eigenvalue above the rank cut");
    const std::size_t d = eig.values.size();
    Matrix basis(d, rank);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < rank; ++k) basis(i, k) = eig.vectors(i, k);
    }
    return SubspaceTemplate{std::move(basis)};
}

double glrt_frame_statistic(const SubspaceTemplate& t, std::span<const double> y) {
    const double energy = dot(y, y);
    if (energy == 0.0) return 1.0;
    const auto coeffs = multiply_transposed(t.basis, y);
    const auto projected = multiply(t.basis, coeffs);
    double residual = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - projected[i];
        residual += r * r;
    }
    if (residual <= energy / kStatisticCap) return kStatisticCap;
    return energy / residual;
}

double score_glrt(const SubspaceTemplate& t, const FrameSet& received) {
    require_same_dim(t.basis.rows(), received);
    double acc = 0.0;
    for (std::size_t f = 0; f < received.count(); ++f) acc += glrt_frame_statistic(t, received.frame(f));
    return acc / static_cast<double>(received.count());
}

// ---------------------------------------------------------------------------

KglrtTemplate train_kglrt(const KernelSpec& kernel, const FrameSet& training, double rank_tol, bool centered) {
    if (!kernel.is_gaussian_family()) {
        throw std::invalid_argument("kernel GLRT requires a gaussian_rbf or rbf kernel, got " +
                                    std::string(to_string(kernel.kind())));
    }
    if (training.count() < 2) throw std::invalid_argument("kernel GLRT needs at least two training frames");
    if (!(rank_tol >= 0.0)) throw std::invalid_argument("rank tolerance must be non-negative");

    auto gram = gram_matrix(kernel, training);
    if (centered) gram = center_gram(gram);
    const auto eig = sym_eig(gram);
    const double lead = eig.values.front();
    if (!(lead > 1e-12 * std::abs(gram.trace())) || lead <= 0.0) {
        throw NumericalError("degenerate Gram matrix: leading eigenvalue is not positive");
    }
    std::size_t rank = 0;
    while (rank < eig.values.size() && eig.values[rank] > rank_tol * lead) ++rank;

    const std::size_t m = training.count();
    Matrix betas(m, rank);
    std::vector<double> mus(rank);
    for (std::size_t k = 0; k < rank; ++k) {
        mus[k] = eig.values[k];
        const double scale = 1.0 / std::sqrt(mus[k]);
        for (std::size_t i = 0; i < m; ++i) betas(i, k) = eig.vectors(i, k) * scale;
    }
    return KglrtTemplate{kernel, training, std::move(betas), std::move(mus), centered};
}

double kglrt_projection(const KglrtTemplate& t, std::span<const double> y) {
    const double norm = norm2(y);
    if (norm == 0.0) throw NumericalError("kernel GLRT cannot normalize an all-zero received frame");
    std::vector<double> unit(y.begin(), y.end());
    for (auto& v : unit) v /= norm;

    const std::size_t m = t.training.count();
    std::vector<double> kt(m);
    for (std::size_t i = 0; i < m; ++i) kt[i] = t.kernel(unit, t.training.frame(i));
    if (t.centered) kt = center_kernel_vector(kt);

    const auto coeffs = multiply_transposed(t.betas, kt);
    return dot(coeffs, coeffs);
}

double kglrt_frame_statistic(const KglrtTemplate& t, std::span<const double> y, bool capped) {
    // p <= 1 exactly; roundoff can overshoot for frames inside the training span.
    const double p = std::min(kglrt_projection(t, y), 1.0);
    const double denom = 1.0 - p;
    if (capped && denom < 1.0 / kStatisticCap) return kStatisticCap;
    return 1.0 / denom;
}

double score_kglrt(const KglrtTemplate& t, const FrameSet& received, bool capped) {
    require_same_dim(t.training.dim(), received);
    double acc = 0.0;
    for (std::size_t f = 0; f < received.count(); ++f) acc += kglrt_frame_statistic(t, received.frame(f), capped);
    return acc / static_cast<double>(received.count());
}

// ---------------------------------------------------------------------------

EcModel make_ec_model(const SymMatrix& sigma_x, double noise_var) {
    if (!std::isfinite(noise_var) || noise_var <= 0.0) throw std::invalid_argument("EC noise variance must be positive");
    const auto eig = sym_eig(sigma_x);
    const std::size_t d = sigma_x.order();
    std::vector<double> shrink(d);
    for (std::size_t k = 0; k < d; ++k) {
        const double lambda = std::max(eig.values[k], 0.0);
        shrink[k] = lambda / (lambda + noise_var);
    }
    Matrix w(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) acc += eig.vectors(i, k) * shrink[k] * eig.vectors(j, k);
            w(i, j) = acc;
            w(j, i) = acc;
        }
    }
    return EcModel{sigma_x, noise_var, std::move(w)};
}

EcModel train_ec(const FrameSet& training, double noise_var) {
    return make_ec_model(sample_covariance(training), noise_var);
}

double score_ec(const EcModel& m, const FrameSet& received) {
    require_same_dim(m.w.rows(), received);
    double acc = 0.0;
    for (std::size_t f = 0; f < received.count(); ++f) {
        const auto y = received.frame(f);
        acc += dot(y, multiply(m.w, y));
    }
    return acc / static_cast<double>(received.count());
}

// ---------------------------------------------------------------------------

double score_mme(const FrameSet& received) {
    if (received.empty()) throw std::invalid_argument("received frame set is empty");
    const auto values = sym_eigenvalues(sample_covariance(received));
    const double largest = values.front();
    if (largest <= 0.0) return 1.0;
    const double smallest = std::max(values.back(), 1e-12 * largest);
    return largest / smallest;
}

// ---------------------------------------------------------------------------

std::string_view to_string(DetectorKind kind) noexcept {
    switch (kind) {
        case DetectorKind::pca: return "pca";
        case DetectorKind::kpca: return "kpca";
        case DetectorKind::glrt: return "glrt";
        case DetectorKind::kglrt: return "kglrt";
        case DetectorKind::ec: return "ec";
        case DetectorKind::mme: return "mme";
    }
    return "unknown";
}

DetectorKind detector_kind_from_string(std::string_view name) {
    for (auto kind : {DetectorKind::pca, DetectorKind::kpca, DetectorKind::glrt, DetectorKind::kglrt,
                      DetectorKind::ec, DetectorKind::mme}) {
        if (to_string(kind) == name) return kind;
    }
    throw std::invalid_argument("unknown detector '" + std::string(name) + "'");
}

DetectorSpec default_detector_spec(DetectorKind kind) {
    DetectorSpec spec;
    spec.kind = kind;
    if (kind == DetectorKind::kpca) spec.kernel = KernelSpec::polynomial(1.0, 2);
    if (kind == DetectorKind::kglrt) spec.kernel = KernelSpec::gaussian_rbf(15.0 / std::numbers::sqrt2);
    return spec;
}

double Detector::score(const FrameSet& received) const {
    struct Visitor {
        const FrameSet& y;
        double operator()(const PcaTemplate& t) const { return score_pca(t, y); }
        double operator()(const KpcaTemplate& t) const { return score_kpca(t, y); }
        double operator()(const SubspaceTemplate& t) const { return score_glrt(t, y); }
        double operator()(const KglrtTemplate& t) const { return score_kglrt(t, y); }
        double operator()(const EcModel& m) const { return score_ec(m, y); }
        double operator()(const MmeDetector&) const { return score_mme(y); }
    };
    return std::visit(Visitor{received}, state_);
}

Detector make_detector(const DetectorSpec& spec, const FrameSet& training, double noise_var) {
    const auto need_kernel = [&]() -> const KernelSpec& {
        if (!spec.kernel) throw std::invalid_argument(std::string(to_string(spec.kind)) + " detector needs a kernel");
        return *spec.kernel;
    };
    switch (spec.kind) {
        case DetectorKind::pca: return Detector(train_pca(training));
        case DetectorKind::kpca: return Detector(train_kpca(need_kernel(), training, spec.centering));
        case DetectorKind::glrt: return Detector(train_glrt(training, spec.rank_tol));
        case DetectorKind::kglrt:
            return Detector(train_kglrt(need_kernel(), training, spec.rank_tol, spec.centering));
        case DetectorKind::ec: return Detector(train_ec(training, noise_var));
        case DetectorKind::mme: return Detector(MmeDetector{});
    }
    throw std::invalid_argument("unknown detector kind");
}

}  // namespace ksense
