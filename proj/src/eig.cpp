#include "ksense/eig.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ksense/random.hpp"

namespace ksense {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> Matrix::column(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
}

double Matrix::frobenius_norm() const noexcept {
    double acc = 0.0;
    for (double v : data_) acc += v * v;
    return std::sqrt(acc);
}

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) throw std::invalid_argument("symmetric matrix must be square and nonempty");
    const std::size_t n = m_.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double a = m_(i, j);
            if (!std::isfinite(a)) throw std::invalid_argument("matrix has a non-finite entry");
            if (std::abs(a - m_(j, i)) > 1e-12 * std::max(1.0, std::abs(a))) {
                throw std::invalid_argument("matrix is not symmetric at (" + std::to_string(i) + ", " +
                                            std::to_string(j) + ")");
            }
        }
    }
}

double SymMatrix::trace() const noexcept {
    double t = 0.0;
    for (std::size_t i = 0; i < order(); ++i) t += m_(i, i);
    return t;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    // Four independent partial sums; the summation order is fixed, so results
    // are reproducible, and the compiler can keep the lanes in registers.
    const std::size_t n = a.size();
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

double norm2(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
    std::vector<double> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

std::vector<double> multiply_transposed(const Matrix& a, std::span<const double> x) {
    std::vector<double> y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto r = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += r[j] * x[i];
    }
    return y;
}

void normalize_sign(std::span<double> v) noexcept {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    }
    if (!v.empty() && v[best] < 0.0) {
        for (auto& x : v) x = -x;
    }
}

SymMatrix sample_covariance(const FrameSet& frames) {
    if (frames.empty()) throw std::invalid_argument("sample covariance of an empty frame set");
    const std::size_t d = frames.dim();
    const std::size_t count = frames.count();
    Matrix r(d, d);
    for (std::size_t f = 0; f < count; ++f) {
        const auto x = frames.frame(f);
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = x[i];
            auto row = r.row(i);
            for (std::size_t j = i; j < d; ++j) row[j] += xi * x[j];
        }
    }
    const double inv = 1.0 / static_cast<double>(count);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            r(i, j) *= inv;
            r(j, i) = r(i, j);
        }
    }
    return SymMatrix(std::move(r));
}

namespace {

// Sort descending (stable w.r.t. input order) and apply the sign convention.
SymEig finalize(std::vector<double> values, const Matrix& vectors) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    SymEig out{std::vector<double>(n), Matrix(n, n)};
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = values[order[k]];
        for (std::size_t i = 0; i < n; ++i) col[i] = vectors(i, order[k]);
        normalize_sign(col);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = col[i];
    }
    return out;
}

Eigen::Map<const Eigen::MatrixXd> as_eigen(const SymMatrix& a) {
    const auto n = static_cast<Eigen::Index>(a.order());
    return {a.matrix().data().data(), n, n};
}

SymEig tridiagonal_eig(const SymMatrix& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(as_eigen(a));
    if (solver.info() != Eigen::Success) throw NumericalError("tridiagonal QR failed to converge");
    const std::size_t n = a.order();
    std::vector<double> values(n);
    Matrix vectors(n, n);
    // Eigen returns ascending order; reversing keeps the descending sort stable.
    for (std::size_t k = 0; k < n; ++k) {
        const auto src = static_cast<Eigen::Index>(n - 1 - k);
        values[k] = solver.eigenvalues()(src);
        for (std::size_t i = 0; i < n; ++i) vectors(i, k) = solver.eigenvectors()(static_cast<Eigen::Index>(i), src);
    }
    return finalize(std::move(values), vectors);
}

// Solves (T - shift I) x = b in place for a symmetric tridiagonal T, using
// Gaussian elimination with partial pivoting. Zero pivots are perturbed.
void solve_shifted_tridiagonal(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub, double shift,
                               double tiny, std::vector<double>& b) {
    const std::size_t n = b.size();
    std::vector<double> d(n), u1(n, 0.0), u2(n, 0.0), l(n, 0.0);
    std::vector<char> swapped(n, 0);
    // Row i holds (lower = sub[i-1], diag = d[i]-shift, upper = sub[i]).
    std::vector<double> lower(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = diag(static_cast<Eigen::Index>(i)) - shift;
        if (i + 1 < n) u1[i] = sub(static_cast<Eigen::Index>(i));
        if (i + 1 < n) lower[i + 1] = sub(static_cast<Eigen::Index>(i));
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double below = lower[i + 1];
        if (std::abs(below) > std::abs(d[i])) {
            // Swap rows i and i+1.
            swapped[i] = 1;
            const double m = d[i] / below;
            l[i] = m;
            const double row_d = below, row_u1 = d[i + 1], row_u2 = (i + 2 < n) ? u1[i + 1] : 0.0;
            const double new_next_d = u1[i] - m * row_u1;
            const double new_next_u1 = u2[i] - m * row_u2;
            d[i] = row_d;
            u1[i] = row_u1;
            u2[i] = row_u2;
            d[i + 1] = new_next_d;
            if (i + 2 < n) u1[i + 1] = new_next_u1;
        } else {
            if (d[i] == 0.0) d[i] = tiny;
            const double m = below / d[i];
            l[i] = m;
            d[i + 1] -= m * u1[i];
            if (i + 2 < n) u1[i + 1] -= m * u2[i];
        }
    }
    if (d[n - 1] == 0.0) d[n - 1] = tiny;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (swapped[i]) std::swap(b[i], b[i + 1]);
        b[i + 1] -= l[i] * b[i];
    }
    for (std::size_t k = n; k-- > 0;) {
        double acc = b[k];
        if (k + 1 < n) acc -= u1[k] * b[k + 1];
        if (k + 2 < n) acc -= u2[k] * b[k + 2];
        b[k] = acc / (std::abs(d[k]) < tiny ? std::copysign(tiny, d[k] == 0.0 ? 1.0 : d[k]) : d[k]);
    }
}

EigenPair leading_by_inverse_iteration(const SymMatrix& a) {
    const std::size_t n = a.order();
    Eigen::Tridiagonalization<Eigen::MatrixXd> tri(as_eigen(a));
    const Eigen::VectorXd diag = tri.diagonal();
    const Eigen::VectorXd sub = tri.subDiagonal();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> values;
    values.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (values.info() != Eigen::Success) throw NumericalError("tridiagonal QR failed to converge");
    const double lambda = values.eigenvalues()(static_cast<Eigen::Index>(n - 1));

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        scale = std::max(scale, std::abs(diag(static_cast<Eigen::Index>(i))));
        if (i + 1 < n) scale = std::max(scale, std::abs(sub(static_cast<Eigen::Index>(i))));
    }
    const double tiny = std::max(scale, 1e-300) * 1e-15;

    std::vector<double> z(n);
    Rng rng(0x1ead5eedULL);
    for (auto& v : z) v = rng.uniform() - 0.5;
    for (int iter = 0; iter < 3; ++iter) {
        solve_shifted_tridiagonal(diag, sub, lambda, tiny, z);
        const double nz = norm2(z);
        if (!std::isfinite(nz) || nz == 0.0) throw NumericalError("inverse iteration broke down");
        for (auto& v : z) v /= nz;
    }

    Eigen::Map<Eigen::VectorXd> zmap(z.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd v = tri.matrixQ() * zmap;
    EigenPair out{lambda, std::vector<double>(v.data(), v.data() + n)};
    const double nv = norm2(out.vector);
    for (auto& x : out.vector) x /= nv;
    normalize_sign(out.vector);
    return out;
}

}  // namespace

SymEig jacobi_eig(const SymMatrix& sym) {
    const std::size_t n = sym.order();
    Matrix a = sym.matrix();
    Matrix v = Matrix::identity(n);
    const double threshold = 1e-12 * a.frobenius_norm();

    constexpr int kMaxSweeps = 100;
    bool converged = false;
    for (int sweep = 0; sweep <= kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i != j) off += a(i, j) * a(i, j);
            }
        }
        if (std::sqrt(off) <= threshold) {
            converged = true;
            break;
        }
        if (sweep == kMaxSweeps) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged) throw NumericalError("Jacobi iteration did not converge within 100 sweeps");

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
    return finalize(std::move(values), v);
}

SymEig sym_eig(const SymMatrix& a, EigMethod method) {
    if (method == EigMethod::automatic) {
        method = a.order() <= kJacobiMaxOrder ? EigMethod::jacobi : EigMethod::tridiagonal;
    }
    return method == EigMethod::jacobi ? jacobi_eig(a) : tridiagonal_eig(a);
}

std::vector<double> sym_eigenvalues(const SymMatrix& a) {
    if (a.order() <= kJacobiMaxOrder) return jacobi_eig(a).values;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(as_eigen(a), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("tridiagonal QR failed to converge");
    const std::size_t n = a.order();
    std::vector<double> values(n);
    for (std::size_t k = 0; k < n; ++k) values[k] = solver.eigenvalues()(static_cast<Eigen::Index>(n - 1 - k));
    return values;
}

EigenPair leading_eigvec(const SymMatrix& a) {
    if (a.order() <= kJacobiMaxOrder) {
        auto full = jacobi_eig(a);
        return {full.values[0], full.vector(0)};
    }
    return leading_by_inverse_iteration(a);
}

}  // namespace ksense
