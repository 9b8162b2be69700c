#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "ksense/eig.hpp"
#include "ksense/framing.hpp"
#include "ksense/kernels.hpp"
#include "ksense/matrix.hpp"

namespace ksense {

/// GLRT-type statistics are capped here when the residual energy vanishes.
inline constexpr double kStatisticCap = 1e12;
/// Relative eigenvalue cut that defines "nonzero" for subspace detectors.
inline constexpr double kDefaultRankTol = 1e-8;

// ---------------------------------------------------------------------------
// PCA: leading eigenvector of the training covariance, matched by lag scan.

struct PcaTemplate {
    std::vector<double> v1;
};

PcaTemplate train_pca(const FrameSet& training);

/// max over l = 0..d of |sum_k v1[k] * w[k+l]|, where w is the leading
/// eigenvector of the received covariance and w[k] = 0 for k >= d.
double score_pca(const PcaTemplate& t, const FrameSet& received);

/// The lag scan alone, for two equal-length unit vectors.
double lag_scan_similarity(std::span<const double> templ, std::span<const double> received);

// ---------------------------------------------------------------------------
// Kernel PCA: leading feature-space eigenvector expressed through Gram
// coefficients, normalized so that mu1 * <beta1, beta1> = 1.

struct KpcaTemplate {
    KernelSpec kernel;
    FrameSet training;
    std::vector<double> beta1;
    double mu1 = 0.0;
    bool centered = false;
};

KpcaTemplate train_kpca(const KernelSpec& kernel, const FrameSet& training, bool centered = false);

/// |beta1^T K^t beta1~| where beta1~ comes from the received Gram matrix.
double score_kpca(const KpcaTemplate& t, const FrameSet& received);

/// Double-centers a cross-Gram matrix so both sides are mean-removed in feature space.
Matrix center_cross_gram(const Matrix& kt);

// ---------------------------------------------------------------------------
// GLRT on the matched subspace spanned by the training covariance.

struct SubspaceTemplate {
    Matrix basis;  // d x r, orthonormal columns

    std::size_t rank() const noexcept { return basis.cols(); }
};

SubspaceTemplate train_glrt(const FrameSet& training, double rank_tol = kDefaultRankTol);

/// y^T y / y^T (I - T T^T) y for one frame, capped at kStatisticCap.
double glrt_frame_statistic(const SubspaceTemplate& t, std::span<const double> y);

/// Frame-averaged GLRT statistic.
double score_glrt(const SubspaceTemplate& t, const FrameSet& received);

// ---------------------------------------------------------------------------
// Kernel GLRT with a Gaussian kernel and an exact identity projector.

struct KglrtTemplate {
    KernelSpec kernel;
    FrameSet training;
    Matrix betas;  // M x K; column k is u_k / sqrt(mu_k) for unit eigenvector u_k
    std::vector<double> mus;
    bool centered = false;

    std::size_t rank() const noexcept { return betas.cols(); }
};

KglrtTemplate train_kglrt(const KernelSpec& kernel, const FrameSet& training, double rank_tol = kDefaultRankTol,
                          bool centered = false);

/// p = k_T^T B B^T k_T for one received frame (normalized to unit length first).
double kglrt_projection(const KglrtTemplate& t, std::span<const double> y);

/// 1 / (1 - p) for one frame; capped at kStatisticCap unless `capped` is false.
double kglrt_frame_statistic(const KglrtTemplate& t, std::span<const double> y, bool capped = true);

double score_kglrt(const KglrtTemplate& t, const FrameSet& received, bool capped = true);

// ---------------------------------------------------------------------------
// Estimator-correlator with known signal covariance and noise variance.

struct EcModel {
    SymMatrix sigma_x;
    double noise_var;
    Matrix w;  // Sigma_x (Sigma_x + sigma^2 I)^{-1}
};

EcModel train_ec(const FrameSet& training, double noise_var);
EcModel make_ec_model(const SymMatrix& sigma_x, double noise_var);

/// (1/M) sum_i y_i^T W y_i.
double score_ec(const EcModel& m, const FrameSet& received);

// ---------------------------------------------------------------------------
// Maximum-minimum eigenvalue ratio of the received covariance (blind).

double score_mme(const FrameSet& received);

// ---------------------------------------------------------------------------
// Uniform front for the harness.

enum class DetectorKind { pca, kpca, glrt, kglrt, ec, mme };

std::string_view to_string(DetectorKind kind) noexcept;
DetectorKind detector_kind_from_string(std::string_view name);

struct DetectorSpec {
    DetectorKind kind = DetectorKind::pca;
    std::optional<KernelSpec> kernel;  // required for kpca and kglrt
    double rank_tol = kDefaultRankTol;
    bool centering = false;
};

/// Defaults: polynomial(c=1, degree 2) for kernel PCA and a
/// Gaussian kernel with sigma = 15/sqrt(2) for kernel GLRT.
DetectorSpec default_detector_spec(DetectorKind kind);

struct MmeDetector {};

/// A trained detector. Immutable once built; score() is safe to call concurrently.
class Detector {
public:
    using State = std::variant<PcaTemplate, KpcaTemplate, SubspaceTemplate, KglrtTemplate, EcModel, MmeDetector>;

    explicit Detector(State state) : state_(std::move(state)) {}

    double score(const FrameSet& received) const;
    const State& state() const noexcept { return state_; }

private:
    State state_;
};

/// Trains the detector named by `spec` on clean training frames. `noise_var`
/// is only used by the estimator-correlator, which assumes it is known.
Detector make_detector(const DetectorSpec& spec, const FrameSet& training, double noise_var);

}  // namespace ksense
