// spectral.hpp — Hermitian validation, eigendecomposition, matrix functions
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "workpen/matrix.hpp"

namespace workpen {

// Hermiticity tolerance applied by validating wrappers before symmetrizing.
inline constexpr double kHermTol = 1e-12;

// Wrapper asserting H = H† within tol at construction; stores (M + M†)/2.
class HermitianOperator {
  public:
    explicit HermitianOperator(const ComplexMatrix& m, double tol = kHermTol);

    const ComplexMatrix& matrix() const noexcept { return m_; }
    std::size_t dim() const noexcept { return m_.dim(); }

  private:
    ComplexMatrix m_;
};

// Eigenpairs of a Hermitian matrix: H = V diag(values) V†, values ascending,
// columns of `vectors` are the corresponding orthonormal eigenvectors.
struct SpectralDecomposition {
    std::vector<double> values;
    ComplexMatrix vectors;
};

// (M + M†)/2 — projection onto the Hermitian subspace.
ComplexMatrix hermitize(const ComplexMatrix& m);

// Cyclic complex Jacobi. Sweeps until off(A) <= off_threshold or max_sweeps
// full sweeps elapse (then ConvergenceError).
SpectralDecomposition eigh(const HermitianOperator& h, std::size_t max_sweeps = 100,
                           double off_threshold = 1e-13);

// V f(Λ) V†.  DomainError when f produces NaN/Inf on any eigenvalue.
ComplexMatrix matrix_function(const SpectralDecomposition& eig,
                              const std::function<double(double)>& f);
ComplexMatrix matrix_function(const HermitianOperator& h, const std::function<double(double)>& f);

// Re Tr(AB) without forming the product; the imaginary part must vanish
// (both arguments Hermitian in every use here) and is asserted ≤ 1e−10.
double trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

// Unit-trace positive-semidefinite Hermitian state.
class DensityMatrix {
  public:
    explicit DensityMatrix(const ComplexMatrix& m, double tol = 1e-10);

    const ComplexMatrix& matrix() const noexcept { return m_; }
    std::size_t dim() const noexcept { return m_.dim(); }

  private:
    ComplexMatrix m_;
};

// Validating constructor wrapper (kept as a free function for binding code).
DensityMatrix density_from(const ComplexMatrix& m, double tol = 1e-10);

}  // namespace workpen
