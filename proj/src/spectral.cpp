#include "workpen/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace workpen {

HermitianOperator::HermitianOperator(const ComplexMatrix& m, double tol) {
    if (m.dim() < 2) throw DimMismatchError("HermitianOperator: dimension must be at least 2");
    if (m.hermiticity_deviation() > tol) {
        throw NonHermitianError("HermitianOperator: matrix deviates from its adjoint beyond tolerance");
    }
    m_ = m.symmetrized();
}

ComplexMatrix hermitize(const ComplexMatrix& m) { return m.symmetrized(); }

namespace {

// sqrt of the sum of squared moduli strictly off the diagonal.
double off_diagonal_norm(const ComplexMatrix& a) {
    double s = 0.0;
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// One two-sided rotation A <- G†AG zeroing A_pq, V <- VG.  The complex phase
// of A_pq is folded into the rotation so the 2x2 block reduces to the real
// Jacobi formulas.
void rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
    const Complex z = a(p, q);
    const double r = std::abs(z);
    if (r < 1e-300) {  // below any meaningful scale; zero it and move on
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        return;
    }
    const Complex phase = z / r;  // e^{i phi}
    const double ap = a(p, p).real();
    const double aq = a(q, q).real();
    const double tau = (aq - ap) / (2.0 * r);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    const Complex gpq = s * phase;         // G_pq
    const Complex gqp = -s * std::conj(phase);  // G_qp

    const std::size_t n = a.dim();
    // Columns: A <- AG
    for (std::size_t i = 0; i < n; ++i) {
        const Complex aip = a(i, p);
        const Complex aiq = a(i, q);
        a(i, p) = aip * c + aiq * gqp;
        a(i, q) = aip * gpq + aiq * c;
    }
    // Rows: A <- G†A
    for (std::size_t j = 0; j < n; ++j) {
        const Complex apj = a(p, j);
        const Complex aqj = a(q, j);
        a(p, j) = c * apj + std::conj(gqp) * aqj;
        a(q, j) = std::conj(gpq) * apj + c * aqj;
    }
    // Pin the analytically-known entries to kill accumulated round-off.
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = Complex(a(p, p).real(), 0.0);
    a(q, q) = Complex(a(q, q).real(), 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const Complex vip = v(i, p);
        const Complex viq = v(i, q);
        v(i, p) = vip * c + viq * gqp;
        v(i, q) = vip * gpq + viq * c;
    }
}

}  // namespace

SpectralDecomposition eigh(const HermitianOperator& h, std::size_t max_sweeps,
                           double off_threshold) {
    const std::size_t n = h.dim();
    ComplexMatrix a = h.matrix();
    ComplexMatrix v = ComplexMatrix::identity(n);

    bool converged = off_diagonal_norm(a) <= off_threshold;
    for (std::size_t sweep = 0; !converged && sweep < max_sweeps; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                if (std::abs(a(p, q)) > 0.0) rotate(a, v, p, q);
        converged = off_diagonal_norm(a) <= off_threshold;
    }
    if (!converged) throw ConvergenceError("eigh: Jacobi sweeps exceeded the iteration cap");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    SpectralDecomposition out;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

ComplexMatrix matrix_function(const SpectralDecomposition& eig,
                              const std::function<double(double)>& f) {
    const std::size_t n = eig.values.size();
    std::vector<double> fv(n);
    for (std::size_t k = 0; k < n; ++k) {
        fv[k] = f(eig.values[k]);
        if (!std::isfinite(fv[k])) {
            throw DomainError("matrix_function: function value is not finite on an eigenvalue");
        }
    }
    // V f(Λ) V†, assembled directly: M_ij = Σ_k f_k V_ik conj(V_jk).
    ComplexMatrix m(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            const Complex w = fv[k] * eig.vectors(i, k);
            for (std::size_t j = 0; j < n; ++j) m(i, j) += w * std::conj(eig.vectors(j, k));
        }
    return m.symmetrized();
}

ComplexMatrix matrix_function(const HermitianOperator& h, const std::function<double(double)>& f) {
    return matrix_function(eigh(h), f);
}

double trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw DimMismatchError("trace_product: dimension mismatch");
    Complex t{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) t += a(i, j) * b(j, i);
    if (std::abs(t.imag()) > 1e-10) {
        throw DomainError("trace_product: imaginary part exceeds tolerance");
    }
    return t.real();
}

DensityMatrix::DensityMatrix(const ComplexMatrix& m, double tol) {
    if (m.hermiticity_deviation() > 1e-12) {
        throw NotADensityMatrixError("not a density matrix: hermiticity violated");
    }
    const ComplexMatrix sym = m.symmetrized();
    if (std::abs(sym.trace().real() - 1.0) > tol || std::abs(sym.trace().imag()) > tol) {
        throw NotADensityMatrixError("not a density matrix: trace violated");
    }
    const auto eig = eigh(HermitianOperator(sym));
    if (eig.values.front() < -tol) {
        throw NotADensityMatrixError("not a density matrix: positivity violated");
    }
    m_ = sym;
}

DensityMatrix density_from(const ComplexMatrix& m, double tol) { return DensityMatrix(m, tol); }

}  // namespace workpen
