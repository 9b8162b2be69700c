#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "ksense/framing.hpp"
#include "ksense/matrix.hpp"

namespace ksense {

/// Raised when an eigensolver or a detector meets a numerically degenerate input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Eigenvalues sorted descending; column j of `vectors` pairs with values[j].
/// Each column is sign-normalized so its largest-magnitude entry is positive.
struct SymEig {
    std::vector<double> values;
    Matrix vectors;

    std::vector<double> vector(std::size_t j) const { return vectors.column(j); }
};

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;
};

enum class EigMethod {
    /// Jacobi up to kJacobiMaxOrder, Householder tridiagonal QR beyond.
    automatic,
    jacobi,
    tridiagonal,
};

inline constexpr std::size_t kJacobiMaxOrder = 64;

/// R = (1/M) sum x_i x_i^T, no mean removal.
SymMatrix sample_covariance(const FrameSet& frames);

/// Cyclic Jacobi rotations: stop when the off-diagonal Frobenius norm drops to
/// 1e-12 * ||A||_F; NumericalError after 100 sweeps.
SymEig jacobi_eig(const SymMatrix& a);

SymEig sym_eig(const SymMatrix& a, EigMethod method = EigMethod::automatic);

/// Eigenvalues only, descending.
std::vector<double> sym_eigenvalues(const SymMatrix& a);

/// Largest eigenvalue and its sign-normalized unit eigenvector. Large matrices
/// use tridiagonalization plus inverse iteration instead of a full decomposition.
EigenPair leading_eigvec(const SymMatrix& a);

/// Flip v so its largest-magnitude component (lowest index on ties) is positive.
void normalize_sign(std::span<double> v) noexcept;

}  // namespace ksense
