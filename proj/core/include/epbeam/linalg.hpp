#pragma once

// Dense complex linear algebra kernel for small matrices (dim <= 64):
// products, matrix exponential (scaling-and-squaring, Pade [13/13]),
// full non-Hermitian eigendecomposition (Householder Hessenberg reduction
// followed by implicit single-shift QR with deflation), exact nilpotent
// exponentials, and singular-value diagnostics.
//
// The eigensolver is purely numerical: it never consults the model's
// closed-form spectrum, so it can serve as an independent cross-check.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace epbeam {

using Complex = std::complex<double>;

/// Numerical failure inside an iterative kernel (non-convergence, overflow).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Knobs for the linalg kernel. Defaults are what the test suite pins down;
/// every threshold used by the kernel lives here.
struct Tolerances {
    // expm: maximum number of squarings before "matrix norm out of range".
    int expm_max_squarings = 64;
    // eig: iteration cap is eig_iter_factor * dim (spec floor is 30 * dim).
    int eig_iter_factor = 40;
    // Lexicographic sort: real parts closer than this are treated as ties
    // and ordered by imaginary part. Keeps spectra with analytically equal
    // real parts (e.g. above a critical point) deterministically ordered.
    double sort_fuzz = 1e-8;
    // Defective-cluster refinement. A size-k single-linkage cluster with
    // link radius refine_link*(u*scale)^(1/k) and diameter below
    // refine_diam*(u*scale)^(1/k) is collapsed to its mean; the mean of a
    // perturbed k-fold Jordan block is first-order exact while the members
    // individually carry O((u*scale)^(1/k)) error. The cluster's eigenvector
    // columns are replaced by the null direction of (A - mean*I).
    bool refine_defective_clusters = true;
    double refine_link = 8.0;
    double refine_diam = 15.0;
    // Threshold (relative to unit vector norm) below which a component is
    // treated as zero when fixing the eigenvector phase.
    double phase_zero = 1e-12;
};

/// Dense square complex matrix, row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(int dim) : dim_(check_dim(dim)), a_(static_cast<size_t>(dim) * dim) {}

    static ComplexMatrix identity(int dim);

    int dim() const { return dim_; }

    Complex& operator()(int r, int c) { return a_[static_cast<size_t>(r) * dim_ + c]; }
    const Complex& operator()(int r, int c) const { return a_[static_cast<size_t>(r) * dim_ + c]; }

    const std::vector<Complex>& entries() const { return a_; }

    bool finite() const;

private:
    static int check_dim(int dim) {
        if (dim < 1) throw std::invalid_argument("ComplexMatrix: dim must be >= 1");
        return dim;
    }
    int dim_ = 0;
    std::vector<Complex> a_;
};

/// Dense complex vector.
class ComplexVector {
public:
    ComplexVector() = default;
    explicit ComplexVector(int dim) : v_(check_dim(dim)) {}

    int dim() const { return static_cast<int>(v_.size()); }

    Complex& operator[](int i) { return v_[static_cast<size_t>(i)]; }
    const Complex& operator[](int i) const { return v_[static_cast<size_t>(i)]; }

    bool finite() const;

private:
    static size_t check_dim(int dim) {
        if (dim < 1) throw std::invalid_argument("ComplexVector: dim must be >= 1");
        return static_cast<size_t>(dim);
    }
    std::vector<Complex> v_;
};

// Arithmetic. Dimensions must agree; mismatches throw std::invalid_argument.
ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, const ComplexMatrix& a);
ComplexVector operator*(const ComplexMatrix& a, const ComplexVector& x);

ComplexMatrix adjoint(const ComplexMatrix& a);
ComplexMatrix transpose(const ComplexMatrix& a);

double norm_max(const ComplexMatrix& a);       // max |a_ij|
double norm_one(const ComplexMatrix& a);       // max column sum
double norm_frobenius(const ComplexMatrix& a);
double norm2(const ComplexVector& x);

/// Result of eig(): eigenvalues in fuzzy-lexicographic (real, imag) order,
/// unit-norm right eigenvector columns with the first non-negligible
/// component rotated to the non-negative real axis.
struct EigenDecomposition {
    std::vector<Complex> eigenvalues;
    ComplexMatrix right_eigenvectors;
    bool converged = false;
    double residual = 0.0;  // max_k ||A v_k - lambda_k v_k||_2
};

/// e^M by scaling-and-squaring with a Pade [13/13] approximant.
/// Throws NumericalError("matrix norm out of range") if more than
/// tol.expm_max_squarings squarings would be required.
ComplexMatrix expm(const ComplexMatrix& m, const Tolerances& tol = {});

/// Exact terminating series sum_{k<=kmax} M^k/k! for strictly triangular M.
/// `bandwidth` is the offset of the first nonzero diagonal (>= 1); the series
/// stops at kmax = (dim-1)/bandwidth. Rejects non-strictly-triangular input.
ComplexMatrix nilpotent_expm(const ComplexMatrix& m, int bandwidth = 1);

/// Full eigendecomposition of a general complex matrix (dim <= 64).
/// Hessenberg reduction + implicit single-shift QR, then Schur back-
/// substitution for the eigenvectors. Defective clusters are refined per
/// Tolerances (see there). Throws NumericalError("non-convergence") if the
/// QR iteration exceeds tol.eig_iter_factor * dim sweeps.
EigenDecomposition eig(const ComplexMatrix& m, const Tolerances& tol = {});

/// Smallest singular value. Route: smallest eigenpair of M^dagger M, then
/// the value is re-evaluated as ||M v||_2 which restores absolute accuracy
/// ~u*sigma_max near rank deficiency (the squared eigenvalue alone only
/// resolves sigma down to sqrt(u)*sigma_max). Relative accuracy is ~u*cond(M).
double min_singular_value(const ComplexMatrix& m, const Tolerances& tol = {});

/// Smallest singular value together with its right singular vector.
std::pair<double, ComplexVector> min_singular_pair(const ComplexMatrix& m,
                                                   const Tolerances& tol = {});

/// Fuzzy-lexicographic comparison order used for spectra: sorts by real part,
/// treats real parts within `fuzz` of each other (by consecutive gaps) as
/// ties and orders those by imaginary part. Returns the permutation.
std::vector<int> lexicographic_order(const std::vector<Complex>& values, double fuzz);

/// Deterministic scalar RNG (splitmix64); used wherever seeded randomness is
/// needed so results do not depend on the standard library's distributions.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : s_(seed) {}
    std::uint64_t next();
    double uniform01();                       // [0, 1)
    double uniform(double lo, double hi);     // [lo, hi)
    Complex complex_in_square();              // re, im in [-1, 1)
private:
    std::uint64_t s_;
};

}  // namespace epbeam
