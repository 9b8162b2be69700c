#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ksense/framing.hpp"
#include "ksense/matrix.hpp"

namespace ksense {

enum class KernelKind { linear, polynomial, gaussian_rbf, rbf, heavy_tailed_rbf, tanh_nn };

std::string_view to_string(KernelKind kind) noexcept;
KernelKind kernel_kind_from_string(std::string_view name);

/// A kernel function and its parameters. Construct through the named factories,
/// which validate parameter ranges.
class KernelSpec {
public:
    static KernelSpec linear();
    /// (<x,y> + c)^degree, c >= 0, degree >= 1.
    static KernelSpec polynomial(double c, int degree);
    /// exp(-||x-y||^2 / (2 sigma^2)), sigma > 0.
    static KernelSpec gaussian_rbf(double sigma);
    /// exp(-gamma ||x-y||^2), gamma > 0.
    static KernelSpec rbf(double gamma);
    /// exp(-gamma ||x^a - y^a||^b) with x^a = sign(x)|x|^a elementwise.
    static KernelSpec heavy_tailed_rbf(double gamma, double a, double b);
    /// tanh(<x,y> + b). Not positive semidefinite in general.
    static KernelSpec tanh_nn(double b);

    KernelKind kind() const noexcept { return kind_; }
    double c() const noexcept { return c_; }
    int degree() const noexcept { return degree_; }
    double sigma() const noexcept { return sigma_; }
    double gamma() const noexcept { return gamma_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }

    bool is_gaussian_family() const noexcept {
        return kind_ == KernelKind::gaussian_rbf || kind_ == KernelKind::rbf;
    }

    double operator()(std::span<const double> x, std::span<const double> y) const;

private:
    KernelSpec() = default;

    KernelKind kind_ = KernelKind::linear;
    double c_ = 0.0;
    int degree_ = 1;
    double sigma_ = 1.0;
    double gamma_ = 1.0;
    double a_ = 1.0;
    double b_ = 0.0;
};

double eval_kernel(const KernelSpec& k, std::span<const double> x, std::span<const double> y);

/// K(i,j) = k(x_i, x_j). Rows are filled independently, so the result does not
/// depend on how the work is split.
SymMatrix gram_matrix(const KernelSpec& k, const FrameSet& frames);

/// (M_a x M_b) matrix with entry (i,j) = k(a_i, b_j).
Matrix cross_gram(const KernelSpec& k, const FrameSet& a, const FrameSet& b);

/// K_c = K - 1_M K - K 1_M + 1_M K 1_M with (1_M)_ij = 1/M.
SymMatrix center_gram(const SymMatrix& k);

/// k - mean(k) * ones.
std::vector<double> center_kernel_vector(std::span<const double> kt);

}  // namespace ksense
