#include "epbeam/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace epbeam {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
    if (a.dim() != b.dim()) throw std::invalid_argument(std::string(op) + ": dimension mismatch");
}

void require_finite(const ComplexMatrix& a, const char* op) {
    if (!a.finite()) throw std::invalid_argument(std::string(op) + ": non-finite entries");
}

}  // namespace

bool ComplexMatrix::finite() const {
    for (const Complex& z : a_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

bool ComplexVector::finite() const {
    for (int i = 0; i < dim(); ++i)
        if (!std::isfinite(v_[i].real()) || !std::isfinite(v_[i].imag())) return false;
    return true;
}

ComplexMatrix ComplexMatrix::identity(int dim) {
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "operator+");
    ComplexMatrix c(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) c(i, j) = a(i, j) + b(i, j);
    return c;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "operator-");
    ComplexMatrix c(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "operator*");
    const int n = a.dim();
    ComplexMatrix c(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex(0.0)) continue;
            for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
    ComplexMatrix c(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) c(i, j) = s * a(i, j);
    return c;
}

ComplexVector operator*(const ComplexMatrix& a, const ComplexVector& x) {
    if (a.dim() != x.dim()) throw std::invalid_argument("matrix*vector: dimension mismatch");
    ComplexVector y(a.dim());
    for (int i = 0; i < a.dim(); ++i) {
        Complex s = 0.0;
        for (int j = 0; j < a.dim(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
    ComplexMatrix c(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) c(i, j) = std::conj(a(j, i));
    return c;
}

ComplexMatrix transpose(const ComplexMatrix& a) {
    ComplexMatrix c(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) c(i, j) = a(j, i);
    return c;
}

double norm_max(const ComplexMatrix& a) {
    double m = 0.0;
    for (const Complex& z : a.entries()) m = std::max(m, std::abs(z));
    return m;
}

double norm_one(const ComplexMatrix& a) {
    double m = 0.0;
    for (int j = 0; j < a.dim(); ++j) {
        double s = 0.0;
        for (int i = 0; i < a.dim(); ++i) s += std::abs(a(i, j));
        m = std::max(m, s);
    }
    return m;
}

double norm_frobenius(const ComplexMatrix& a) {
    double s = 0.0;
    for (const Complex& z : a.entries()) s += std::norm(z);
    return std::sqrt(s);
}

double norm2(const ComplexVector& x) {
    double s = 0.0;
    for (int i = 0; i < x.dim(); ++i) s += std::norm(x[i]);
    return std::sqrt(s);
}

std::uint64_t SplitMix64::next() {
    s_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double SplitMix64::uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

Complex SplitMix64::complex_in_square() {
    const double re = uniform(-1.0, 1.0);
    const double im = uniform(-1.0, 1.0);
    return {re, im};
}

// ---------------------------------------------------------------------------
// Linear solve (partial-pivot LU), used by the Pade approximant.

namespace {

void lu_solve_in_place(ComplexMatrix& a, ComplexMatrix& b) {
    const int n = a.dim();
    std::vector<int> piv(n);
    std::iota(piv.begin(), piv.end(), 0);
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(a(i, k));
            if (v > best) { best = v; p = i; }
        }
        if (best == 0.0) throw NumericalError("singular matrix in linear solve");
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            for (int j = 0; j < n; ++j) std::swap(b(k, j), b(p, j));
        }
        for (int i = k + 1; i < n; ++i) {
            const Complex f = a(i, k) / a(k, k);
            a(i, k) = f;
            for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            for (int j = 0; j < n; ++j) b(i, j) -= f * b(k, j);
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int i = n - 1; i >= 0; --i) {
            Complex s = b(i, j);
            for (int k = i + 1; k < n; ++k) s -= a(i, k) * b(k, j);
            b(i, j) = s / a(i, i);
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix exponential: Higham's scaling-and-squaring with Pade [13/13].

ComplexMatrix expm(const ComplexMatrix& m, const Tolerances& tol) {
    require_finite(m, "expm");
    const int n = m.dim();
    constexpr double theta13 = 5.371920351148152;
    static const double b[14] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};

    const double nrm = norm_one(m);
    int s = 0;
    if (nrm > theta13) {
        s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
        if (s > tol.expm_max_squarings) throw NumericalError("matrix norm out of range");
    }
    const Complex scale(std::ldexp(1.0, -s), 0.0);
    ComplexMatrix a = scale * m;

    const ComplexMatrix id = ComplexMatrix::identity(n);
    const ComplexMatrix a2 = a * a;
    const ComplexMatrix a4 = a2 * a2;
    const ComplexMatrix a6 = a2 * a4;

    ComplexMatrix w = b[13] * a6 + b[11] * a4 + b[9] * a2;
    ComplexMatrix u = a * (a6 * w + (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id));
    ComplexMatrix w2 = b[12] * a6 + b[10] * a4 + b[8] * a2;
    ComplexMatrix v = a6 * w2 + (b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id);

    ComplexMatrix p = v + u;
    ComplexMatrix q = v - u;
    lu_solve_in_place(q, p);  // p := q^{-1} p

    for (int i = 0; i < s; ++i) p = p * p;
    return p;
}

ComplexMatrix nilpotent_expm(const ComplexMatrix& m, int bandwidth) {
    require_finite(m, "nilpotent_expm");
    const int n = m.dim();
    if (bandwidth < 1) throw std::invalid_argument("nilpotent_expm: bandwidth must be >= 1");

    bool lower_ok = true, upper_ok = true;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (m(i, j) == Complex(0.0)) continue;
            if (i <= j) lower_ok = false;  // strictly lower allows i > j only
            if (i >= j) upper_ok = false;
        }
    if (!lower_ok && !upper_ok)
        throw std::invalid_argument("nilpotent_expm: matrix is not strictly triangular");

    const int kmax = (n - 1) / bandwidth;
    ComplexMatrix out = ComplexMatrix::identity(n);
    ComplexMatrix term = ComplexMatrix::identity(n);
    for (int k = 1; k <= kmax; ++k) {
        term = Complex(1.0 / k, 0.0) * (term * m);
        out = out + term;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Eigendecomposition.

namespace {

struct Givens {
    double c;   // real cosine
    Complex s;  // complex sine, c^2 + |s|^2 = 1
};

// zrotg-style rotation: G = [[c, s], [-conj(s), c]] maps (f, g) to (r, 0).
Givens make_givens(Complex f, Complex g) {
    const double af = std::abs(f), ag = std::abs(g);
    if (ag == 0.0) return {1.0, 0.0};
    if (af == 0.0) return {0.0, Complex(1.0)};
    const double d = std::hypot(af, ag);
    const Complex fs = f / af;
    return {af / d, fs * std::conj(g) / d};
}

// Eigenvalues of a complex 2x2, used for the Wilkinson shift.
std::pair<Complex, Complex> eig2x2(Complex a, Complex b, Complex c, Complex d) {
    const Complex tr = a + d;
    const Complex disc = std::sqrt(tr * tr - 4.0 * (a * d - b * c));
    return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

// Householder reduction to upper Hessenberg; accumulates Q (A = Q H Q^dagger).
void hessenberg(ComplexMatrix& a, ComplexMatrix& q) {
    const int n = a.dim();
    q = ComplexMatrix::identity(n);
    std::vector<Complex> v(n);
    for (int k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (int i = k + 1; i < n; ++i) xnorm += std::norm(a(i, k));
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        const Complex x0 = a(k + 1, k);
        const Complex phase = (std::abs(x0) > 0.0) ? x0 / std::abs(x0) : Complex(1.0);
        const Complex alpha = -phase * xnorm;
        double vnorm2 = 0.0;
        for (int i = k + 1; i < n; ++i) {
            v[i] = a(i, k) - (i == k + 1 ? alpha : Complex(0.0));
            vnorm2 += std::norm(v[i]);
        }
        if (vnorm2 == 0.0) continue;
        // A := (I - 2 v v^dagger) A (left), then A := A (I - 2 v v^dagger) (right)
        for (int j = k; j < n; ++j) {
            Complex s = 0.0;
            for (int i = k + 1; i < n; ++i) s += std::conj(v[i]) * a(i, j);
            s *= 2.0 / vnorm2;
            for (int i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
        }
        for (int i = 0; i < n; ++i) {
            Complex s = 0.0;
            for (int j = k + 1; j < n; ++j) s += a(i, j) * v[j];
            s *= 2.0 / vnorm2;
            for (int j = k + 1; j < n; ++j) a(i, j) -= s * std::conj(v[j]);
        }
        for (int i = 0; i < n; ++i) {
            Complex s = 0.0;
            for (int j = k + 1; j < n; ++j) s += q(i, j) * v[j];
            s *= 2.0 / vnorm2;
            for (int j = k + 1; j < n; ++j) q(i, j) -= s * std::conj(v[j]);
        }
        for (int i = k + 2; i < n; ++i) a(i, k) = 0.0;
        a(k + 1, k) = alpha;
    }
}

// Implicit single-shift QR on an upper Hessenberg matrix; reduces to upper
// triangular (complex Schur form), accumulating the unitary into q.
bool schur_qr(ComplexMatrix& h, ComplexMatrix& q, int max_iter) {
    const int n = h.dim();
    const double hnorm = std::max(norm_frobenius(h), kEps);
    int hi = n - 1;
    int iter_total = 0;
    int stalls = 0;
    while (hi > 0) {
        // deflate converged subdiagonals
        int l = hi;
        while (l > 0) {
            const double sub = std::abs(h(l, l - 1));
            const double diag = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (sub <= kEps * (diag + hnorm)) {
                h(l, l - 1) = 0.0;
                break;
            }
            --l;
        }
        if (l == hi) {
            --hi;
            stalls = 0;
            continue;
        }
        if (++iter_total > max_iter) return false;

        Complex mu;
        if (++stalls % 16 == 0) {
            // exceptional shift to break symmetric stalemates
            mu = h(hi, hi) + Complex(0.75 * std::abs(h(hi, hi - 1)), 0.0);
        } else {
            auto [m1, m2] = eig2x2(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
            mu = (std::abs(m1 - h(hi, hi)) < std::abs(m2 - h(hi, hi))) ? m1 : m2;
        }

        // chase the bulge
        Complex x = h(l, l) - mu;
        Complex y = h(l + 1, l);
        for (int k = l; k < hi; ++k) {
            const Givens g = make_givens(x, y);
            const int jlo = (k > l) ? k - 1 : l;
            for (int j = jlo; j < n; ++j) {  // rows k, k+1 from the left
                const Complex t1 = h(k, j), t2 = h(k + 1, j);
                h(k, j) = g.c * t1 + g.s * t2;
                h(k + 1, j) = -std::conj(g.s) * t1 + g.c * t2;
            }
            const int ihi = std::min(hi, k + 2);
            for (int i = 0; i <= ihi; ++i) {  // columns k, k+1 from the right
                const Complex t1 = h(i, k), t2 = h(i, k + 1);
                h(i, k) = g.c * t1 + t2 * std::conj(g.s);
                h(i, k + 1) = -t1 * g.s + g.c * t2;
            }
            for (int i = 0; i < n; ++i) {
                const Complex t1 = q(i, k), t2 = q(i, k + 1);
                q(i, k) = g.c * t1 + t2 * std::conj(g.s);
                q(i, k + 1) = -t1 * g.s + g.c * t2;
            }
            if (k < hi - 1) {
                x = h(k + 1, k);
                y = h(k + 2, k);
            }
        }
    }
    return true;
}

// Right eigenvector of the triangular factor for eigenvalue t(k,k) by guarded
// back-substitution, mapped back through q.
ComplexVector schur_vector(const ComplexMatrix& t, const ComplexMatrix& q, int k) {
    const int n = t.dim();
    const double smin = kEps * std::max(norm_frobenius(t), 1.0);
    std::vector<Complex> y(static_cast<size_t>(k) + 1);
    y[k] = 1.0;
    for (int i = k - 1; i >= 0; --i) {
        Complex s = 0.0;
        for (int j = i + 1; j <= k; ++j) s += t(i, j) * y[j];
        Complex d = t(i, i) - t(k, k);
        if (std::abs(d) < smin) d = smin;
        y[i] = -s / d;
        const double mag = std::abs(y[i]);
        if (mag > 1e100) {  // rescale to dodge overflow in long chains
            for (int j = i; j <= k; ++j) y[j] /= mag;
        }
    }
    ComplexVector v(n);
    for (int i = 0; i < n; ++i) {
        Complex s = 0.0;
        for (int j = 0; j <= k; ++j) s += q(i, j) * y[j];
        v[i] = s;
    }
    const double nrm = norm2(v);
    for (int i = 0; i < n; ++i) v[i] /= nrm;
    return v;
}

void fix_phase(ComplexVector& v, double zero_tol) {
    for (int i = 0; i < v.dim(); ++i) {
        const double mag = std::abs(v[i]);
        if (mag > zero_tol) {
            const Complex rot = std::conj(v[i]) / mag;
            for (int j = 0; j < v.dim(); ++j) v[j] *= rot;
            return;
        }
    }
}

double column_residual(const ComplexMatrix& a, const ComplexMatrix& v, Complex lambda, int col) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        Complex r = 0.0;
        for (int j = 0; j < a.dim(); ++j) r += a(i, j) * v(j, col);
        r -= lambda * v(i, col);
        s += std::norm(r);
    }
    return std::sqrt(s);
}

EigenDecomposition eig_core(const ComplexMatrix& m, const Tolerances& tol) {
    const int n = m.dim();
    EigenDecomposition out;
    out.right_eigenvectors = ComplexMatrix(n);
    if (n == 1) {
        out.eigenvalues = {m(0, 0)};
        out.right_eigenvectors(0, 0) = 1.0;
        out.converged = true;
        return out;
    }
    ComplexMatrix t = m;
    ComplexMatrix q;
    hessenberg(t, q);
    out.converged = schur_qr(t, q, std::max(30, tol.eig_iter_factor) * n);
    if (!out.converged) throw NumericalError("non-convergence");
    out.eigenvalues.resize(n);
    for (int k = 0; k < n; ++k) out.eigenvalues[k] = t(k, k);
    for (int k = 0; k < n; ++k) {
        ComplexVector v = schur_vector(t, q, k);
        for (int i = 0; i < n; ++i) out.right_eigenvectors(i, k) = v[i];
    }
    return out;
}

void apply_order(EigenDecomposition& d, const std::vector<int>& order) {
    const int n = static_cast<int>(d.eigenvalues.size());
    std::vector<Complex> lam(n);
    ComplexMatrix v(n);
    for (int k = 0; k < n; ++k) {
        lam[k] = d.eigenvalues[order[k]];
        for (int i = 0; i < n; ++i) v(i, k) = d.right_eigenvectors(i, order[k]);
    }
    d.eigenvalues = std::move(lam);
    d.right_eigenvectors = std::move(v);
}

// Collapse numerically defective clusters: the mean of a size-k cluster is
// first-order exact for a k-fold Jordan eigenvalue, and the geometric
// eigenvector is recovered as the null direction of (A - mean I).
void refine_clusters(const ComplexMatrix& a, EigenDecomposition& d, const Tolerances& tol) {
    const int n = a.dim();
    const double scale = std::max(1.0, norm_frobenius(a));
    std::vector<bool> done(n, false);
    for (int k = n; k >= 2; --k) {
        const double rlink = tol.refine_link * std::pow(kEps * scale, 1.0 / k);
        const double rdiam = tol.refine_diam * std::pow(kEps * scale, 1.0 / k);
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (!done[i]) idx.push_back(i);
        if (static_cast<int>(idx.size()) < k) continue;
        // single-linkage components at radius rlink
        std::vector<int> comp(idx.size());
        std::iota(comp.begin(), comp.end(), 0);
        std::function<int(int)> find = [&](int x) {
            while (comp[x] != x) x = comp[x] = comp[comp[x]];
            return x;
        };
        for (size_t i = 0; i < idx.size(); ++i)
            for (size_t j = i + 1; j < idx.size(); ++j)
                if (std::abs(d.eigenvalues[idx[i]] - d.eigenvalues[idx[j]]) <= rlink)
                    comp[find(static_cast<int>(i))] = find(static_cast<int>(j));
        std::vector<std::vector<int>> groups(idx.size());
        for (size_t i = 0; i < idx.size(); ++i) groups[find(static_cast<int>(i))].push_back(idx[i]);
        for (const auto& g : groups) {
            if (static_cast<int>(g.size()) != k) continue;
            double diam = 0.0;
            for (size_t i = 0; i < g.size(); ++i)
                for (size_t j = i + 1; j < g.size(); ++j)
                    diam = std::max(diam, std::abs(d.eigenvalues[g[i]] - d.eigenvalues[g[j]]));
            if (diam > rdiam) continue;
            Complex mu = 0.0;
            for (int i : g) mu += d.eigenvalues[i];
            mu /= static_cast<double>(k);
            ComplexMatrix shifted = a;
            for (int i = 0; i < n; ++i) shifted(i, i) -= mu;
            Tolerances inner = tol;
            inner.refine_defective_clusters = false;
            ComplexVector v = min_singular_pair(shifted, inner).second;
            fix_phase(v, tol.phase_zero);
            for (int i : g) {
                d.eigenvalues[i] = mu;
                for (int r = 0; r < n; ++r) d.right_eigenvectors(r, i) = v[r];
                done[i] = true;
            }
        }
    }
}

}  // namespace

std::vector<int> lexicographic_order(const std::vector<Complex>& values, double fuzz) {
    const int n = static_cast<int>(values.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return values[i].real() < values[j].real();
    });
    // group runs of consecutive near-equal real parts, sort each by imag
    int start = 0;
    while (start < n) {
        int end = start + 1;
        while (end < n &&
               values[order[end]].real() - values[order[end - 1]].real() <= fuzz)
            ++end;
        std::stable_sort(order.begin() + start, order.begin() + end, [&](int i, int j) {
            return values[i].imag() < values[j].imag();
        });
        start = end;
    }
    return order;
}

EigenDecomposition eig(const ComplexMatrix& m, const Tolerances& tol) {
    require_finite(m, "eig");
    if (m.dim() > 64) throw std::invalid_argument("eig: dim must be <= 64");
    EigenDecomposition d = eig_core(m, tol);
    if (tol.refine_defective_clusters) refine_clusters(m, d, tol);
    for (int k = 0; k < m.dim(); ++k) {
        ComplexVector v(m.dim());
        for (int i = 0; i < m.dim(); ++i) v[i] = d.right_eigenvectors(i, k);
        fix_phase(v, tol.phase_zero);
        for (int i = 0; i < m.dim(); ++i) d.right_eigenvectors(i, k) = v[i];
    }
    apply_order(d, lexicographic_order(d.eigenvalues, tol.sort_fuzz));
    double res = 0.0;
    for (int k = 0; k < m.dim(); ++k)
        res = std::max(res, column_residual(m, d.right_eigenvectors, d.eigenvalues[k], k));
    d.residual = res;
    return d;
}

std::pair<double, ComplexVector> min_singular_pair(const ComplexMatrix& m, const Tolerances& tol) {
    require_finite(m, "min_singular_value");
    const int n = m.dim();
    const ComplexMatrix gram = adjoint(m) * m;  // Hermitian PSD
    Tolerances inner = tol;
    inner.refine_defective_clusters = false;  // Hermitian spectra are never defective
    EigenDecomposition d = eig(gram, inner);
    int best = 0;
    double bestval = d.eigenvalues[0].real();
    for (int k = 1; k < n; ++k)
        if (d.eigenvalues[k].real() < bestval) {
            bestval = d.eigenvalues[k].real();
            best = k;
        }
    ComplexVector v(n);
    for (int i = 0; i < n; ++i) v[i] = d.right_eigenvectors(i, best);
    // re-evaluate through M itself: ||Mv|| resolves sigma ~ u*||M|| where the
    // squared eigenvalue bottoms out at sqrt(u)*||M||
    return {norm2(m * v), v};
}

double min_singular_value(const ComplexMatrix& m, const Tolerances& tol) {
    return min_singular_pair(m, tol).first;
}

}  // namespace epbeam
