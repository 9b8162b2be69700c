#include "ksense/kernels.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ksense {

std::string_view to_string(KernelKind kind) noexcept {
    switch (kind) {
        case KernelKind::linear: return "linear";
        case KernelKind::polynomial: return "polynomial";
        case KernelKind::gaussian_rbf: return "gaussian_rbf";
        case KernelKind::rbf: return "rbf";
        case KernelKind::heavy_tailed_rbf: return "heavy_tailed_rbf";
        case KernelKind::tanh_nn: return "tanh_nn";
    }
    return "unknown";
}

KernelKind kernel_kind_from_string(std::string_view name) {
    for (auto kind : {KernelKind::linear, KernelKind::polynomial, KernelKind::gaussian_rbf, KernelKind::rbf,
                      KernelKind::heavy_tailed_rbf, KernelKind::tanh_nn}) {
        if (to_string(kind) == name) return kind;
    }
    throw std::invalid_argument("unknown kernel kind '" + std::string(name) + "'");
}

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

double signed_power(double x, double a) { return std::copysign(std::pow(std::abs(x), a), x); }

double from_inner_product(const KernelSpec& k, double ip);

}  // namespace

KernelSpec KernelSpec::linear() { return KernelSpec{}; }

KernelSpec KernelSpec::polynomial(double c, int degree) {
    require(std::isfinite(c) && c >= 0.0, "polynomial kernel needs c >= 0");
    require(degree >= 1, "polynomial kernel needs degree >= 1");
    KernelSpec k;
    k.kind_ = KernelKind::polynomial;
    k.c_ = c;
    k.degree_ = degree;
    return k;
}

KernelSpec KernelSpec::gaussian_rbf(double sigma) {
    require(std::isfinite(sigma) && sigma > 0.0, "gaussian_rbf kernel needs sigma > 0");
    KernelSpec k;
    k.kind_ = KernelKind::gaussian_rbf;
    k.sigma_ = sigma;
    return k;
}

KernelSpec KernelSpec::rbf(double gamma) {
    require(std::isfinite(gamma) && gamma > 0.0, "rbf kernel needs gamma > 0");
    KernelSpec k;
    k.kind_ = KernelKind::rbf;
    k.gamma_ = gamma;
    return k;
}

KernelSpec KernelSpec::heavy_tailed_rbf(double gamma, double a, double b) {
    require(std::isfinite(gamma) && gamma > 0.0, "heavy_tailed_rbf kernel needs gamma > 0");
    require(std::isfinite(a) && a > 0.0, "heavy_tailed_rbf kernel needs a > 0");
    require(std::isfinite(b) && b > 0.0, "heavy_tailed_rbf kernel needs b > 0");
    KernelSpec k;
    k.kind_ = KernelKind::heavy_tailed_rbf;
    k.gamma_ = gamma;
    k.a_ = a;
    k.b_ = b;
    return k;
}

KernelSpec KernelSpec::tanh_nn(double b) {
    require(std::isfinite(b), "tanh_nn kernel needs a finite b");
    KernelSpec k;
    k.kind_ = KernelKind::tanh_nn;
    k.b_ = b;
    return k;
}

double KernelSpec::operator()(std::span<const double> x, std::span<const double> y) const {
    if (x.size() != y.size()) throw std::invalid_argument("kernel arguments differ in dimension");
    const std::size_t n = x.size();
    switch (kind_) {
        case KernelKind::linear: return dot(x, y);
        case KernelKind::polynomial: return from_inner_product(*this, dot(x, y));
        case KernelKind::tanh_nn: return std::tanh(dot(x, y) + b_);
        case KernelKind::gaussian_rbf:
        case KernelKind::rbf: {
            double s0 = 0.0, s1 = 0.0;
            std::size_t i = 0;
            for (; i + 2 <= n; i += 2) {
                const double d0 = x[i] - y[i];
                const double d1 = x[i + 1] - y[i + 1];
                s0 += d0 * d0;
                s1 += d1 * d1;
            }
            if (i < n) s0 += (x[i] - y[i]) * (x[i] - y[i]);
            const double dist2 = s0 + s1;
            const double g = kind_ == KernelKind::rbf ? gamma_ : 1.0 / (2.0 * sigma_ * sigma_);
            return std::exp(-g * dist2);
        }
        case KernelKind::heavy_tailed_rbf: {
            double dist2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double diff = signed_power(x[i], a_) - signed_power(y[i], a_);
                dist2 += diff * diff;
            }
            return std::exp(-gamma_ * std::pow(std::sqrt(dist2), b_));
        }
    }
    return 0.0;
}

double eval_kernel(const KernelSpec& k, std::span<const double> x, std::span<const double> y) { return k(x, y); }

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> as_rows(const FrameSet& f) {
    return {f.data().data(), static_cast<Eigen::Index>(f.count()), static_cast<Eigen::Index>(f.dim())};
}

bool inner_product_kernel(KernelKind kind) {
    return kind == KernelKind::linear || kind == KernelKind::polynomial || kind == KernelKind::tanh_nn;
}

// Kernel value from a precomputed inner product <x, y>.
double from_inner_product(const KernelSpec& k, double ip) {
    switch (k.kind()) {
        case KernelKind::polynomial: {
            const double base = ip + k.c();
            double out = 1.0;
            for (int i = 0; i < k.degree(); ++i) out *= base;
            return out;
        }
        case KernelKind::tanh_nn: return std::tanh(ip + k.b());
        default: return ip;
    }
}

}  // namespace

SymMatrix gram_matrix(const KernelSpec& k, const FrameSet& frames) {
    if (frames.empty()) throw std::invalid_argument("Gram matrix of an empty frame set");
    const std::size_t m = frames.count();
    Matrix g(m, m);
    if (inner_product_kernel(k.kind())) {
        const auto x = as_rows(frames);
        const RowMajor ip = x * x.transpose();
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i; j < m; ++j) {
                const double v = from_inner_product(k, ip(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
                g(i, j) = v;
                g(j, i) = v;
            }
        }
        return SymMatrix(std::move(g));
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            const double v = k(frames.frame(i), frames.frame(j));
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return SymMatrix(std::move(g));
}

Matrix cross_gram(const KernelSpec& k, const FrameSet& a, const FrameSet& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("cross-Gram frame sets differ in dimension");
    Matrix g(a.count(), b.count());
    if (inner_product_kernel(k.kind())) {
        const RowMajor ip = as_rows(a) * as_rows(b).transpose();
        for (std::size_t i = 0; i < a.count(); ++i) {
            for (std::size_t j = 0; j < b.count(); ++j) {
                g(i, j) = from_inner_product(k, ip(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            }
        }
        return g;
    }
    for (std::size_t i = 0; i < a.count(); ++i) {
        for (std::size_t j = 0; j < b.count(); ++j) g(i, j) = k(a.frame(i), b.frame(j));
    }
    return g;
}

SymMatrix center_gram(const SymMatrix& k) {
    const std::size_t m = k.order();
    const double inv = 1.0 / static_cast<double>(m);
    std::vector<double> row_mean(m, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) row_mean[i] += k(i, j);
        total += row_mean[i];
        row_mean[i] *= inv;
    }
    total *= inv * inv;
    // K is symmetric, so column means equal row means.
    Matrix c(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            const double v = k(i, j) - row_mean[i] - row_mean[j] + total;
            c(i, j) = v;
            c(j, i) = v;
        }
    }
    return SymMatrix(std::move(c));
}

std::vector<double> center_kernel_vector(std::span<const double> kt) {
    if (kt.empty()) throw std::invalid_argument("cannot center an empty kernel vector");
    double mean = 0.0;
    for (double v : kt) mean += v;
    mean /= static_cast<double>(kt.size());
    std::vector<double> out(kt.begin(), kt.end());
    for (auto& v : out) v -= mean;
    return out;
}

}  // namespace ksense
