#include "epbeam/spectrum.hpp"

#include <algorithm>
#include <cmath>

namespace epbeam {

Complex delta_lambda(const ModelParams& p) {
    validate(p);
    const auto [nu, nu_prime] = couplings(p);
    return std::sqrt(Complex(4.0 * nu * nu_prime - p.gamma * p.gamma, 0.0));
}

std::vector<Complex> analytic_eigenvalues(const ModelParams& p, double sort_fuzz) {
    validate(p);
    const Complex dl = delta_lambda(p);
    const int n = p.n_photons;
    const Complex base = Complex(p.omega0, -p.gamma / 2.0) * static_cast<double>(n);
    std::vector<Complex> lam(n + 1);
    for (int k = 0; k <= n; ++k) lam[k] = base + (k - n / 2.0) * dl;
    std::vector<int> order = lexicographic_order(lam, sort_fuzz);
    std::vector<Complex> sorted(n + 1);
    for (int k = 0; k <= n; ++k) sorted[k] = lam[order[k]];
    return sorted;
}

double critical_gamma(double nu0, double eta) {
    if (!(nu0 > 0.0)) throw std::invalid_argument("critical_gamma: nu0 must be > 0");
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("critical_gamma: eta must lie in [0, 1]");
    return 2.0 * nu0 * std::sqrt(1.0 - eta * eta);
}

double critical_eta(double nu0, double gamma) {
    if (!(nu0 > 0.0)) throw std::invalid_argument("critical_eta: nu0 must be > 0");
    if (!(gamma >= 0.0 && gamma <= 2.0 * nu0)) throw NumericalError("gamma out of range");
    return std::sqrt(4.0 * nu0 * nu0 - gamma * gamma) / (2.0 * nu0);
}

EpReport ep_report(const ModelParams& p) {
    validate(p);
    EpReport rep;
    rep.gamma_c = critical_gamma(p.nu0, p.eta);
    rep.order = p.n_photons + 1;
    if (p.gamma <= 2.0 * p.nu0) rep.eta_c = critical_eta(p.nu0, p.gamma);
    return rep;
}

ComplexMatrix analytic_eigenvectors(const ModelParams& p, double degeneracy_threshold,
                                    const Tolerances& tol) {
    validate(p);
    const Complex dl = delta_lambda(p);
    if (std::abs(dl) <= degeneracy_threshold) throw NumericalError("at exceptional point");

    const auto [nu, nu_prime] = couplings(p);
    const int n = p.n_photons;
    // theta kills the J- component of the similarity-transformed Hamiltonian:
    // nu theta^2 + gamma theta + nu_prime = 0, principal-root branch.
    const Complex root = std::sqrt(Complex(p.gamma * p.gamma - 4.0 * nu * nu_prime, 0.0));
    const Complex theta = (-p.gamma + root) / (2.0 * nu);
    const Complex phi = nu / (2.0 * theta * nu + p.gamma);

    const Complex mi(0.0, -1.0);
    const ComplexMatrix em = nilpotent_expm(mi * theta * j_minus(n), 1);
    const ComplexMatrix ep = nilpotent_expm(mi * phi * j_plus(n), 1);
    ComplexMatrix v = em * ep;  // column r is e^{-i theta J-} e^{-i phi J+} e_r

    // eigenvalue of column m under this transform chain
    std::vector<Complex> lam(n + 1);
    const Complex base = Complex(p.omega0, -p.gamma / 2.0) * static_cast<double>(n);
    for (int m = 0; m <= n; ++m) lam[m] = base + mi * root * (m - n / 2.0);

    for (int c = 0; c <= n; ++c) {
        double nrm = 0.0;
        for (int r = 0; r <= n; ++r) nrm += std::norm(v(r, c));
        nrm = std::sqrt(nrm);
        int first = -1;
        for (int r = 0; r <= n; ++r)
            if (std::abs(v(r, c)) / nrm > tol.phase_zero) { first = r; break; }
        const Complex rot = std::conj(v(first, c)) / std::abs(v(first, c));
        for (int r = 0; r <= n; ++r) v(r, c) *= rot / nrm;
    }

    std::vector<int> order = lexicographic_order(lam, tol.sort_fuzz);
    ComplexMatrix sorted(n + 1);
    for (int c = 0; c <= n; ++c)
        for (int r = 0; r <= n; ++r) sorted(r, c) = v(r, order[c]);
    return sorted;
}

SpectrumResult numeric_spectrum(const ModelParams& p, const Tolerances& tol) {
    validate(p);
    SpectrumResult res;
    res.params = p;
    EigenDecomposition d = eig(hamiltonian(p), tol);
    res.eigenvalues = std::move(d.eigenvalues);
    res.right_eigenvectors = std::move(d.right_eigenvectors);
    double spread = 0.0;
    for (size_t i = 0; i < res.eigenvalues.size(); ++i)
        for (size_t j = i + 1; j < res.eigenvalues.size(); ++j)
            spread = std::max(spread, std::abs(res.eigenvalues[i] - res.eigenvalues[j]));
    res.eigenvalue_spread = spread;
    res.eigenvector_min_sv = min_singular_value(res.right_eigenvectors, tol);
    return res;
}

std::vector<SpinRow> spin_projections(const ModelParams& p, double degeneracy_threshold,
                                      const Tolerances& tol) {
    validate(p);
    const int n = p.n_photons;
    ComplexMatrix v(n + 1);
    if (std::abs(delta_lambda(p)) > degeneracy_threshold) {
        v = analytic_eigenvectors(p, degeneracy_threshold, tol);
    } else {
        v = numeric_spectrum(p, tol).right_eigenvectors;
    }
    const ComplexMatrix jp = j_plus(n), jm = j_minus(n);
    const ComplexMatrix jx = Complex(0.5) * (jp + jm);
    const ComplexMatrix jy = Complex(0.0, -0.5) * (jp - jm);
    const ComplexMatrix jz = j_z(n);

    auto expectation = [n](const ComplexMatrix& op, const ComplexMatrix& vecs, int col) {
        Complex s = 0.0;
        for (int i = 0; i <= n; ++i) {
            Complex row = 0.0;
            for (int j = 0; j <= n; ++j) row += op(i, j) * vecs(j, col);
            s += std::conj(vecs(i, col)) * row;
        }
        return s.real();
    };

    std::vector<SpinRow> rows(n + 1);
    for (int c = 0; c <= n; ++c) {
        rows[c].r = c - n / 2.0;
        rows[c].jx = expectation(jx, v, c);
        rows[c].jy = expectation(jy, v, c);
        rows[c].jz = expectation(jz, v, c);
    }
    return rows;
}

ExponentFit ep_exponent_fit(const ModelParams& params_at_ep, PerturbationMode mode,
                            std::uint64_t seed, std::vector<double> eps_grid,
                            double residual_threshold, const Tolerances& tol) {
    validate(params_at_ep);
    if (std::abs(delta_lambda(params_at_ep)) > 1e-10)
        throw std::invalid_argument("ep_exponent_fit: params do not sit at an exceptional point");
    if (eps_grid.empty()) {
        const int npts = 12;
        for (int i = 0; i < npts; ++i)
            eps_grid.push_back(std::pow(10.0, -10.0 + 5.0 * i / (npts - 1)));
    }
    if (eps_grid.size() < 8)
        throw std::invalid_argument("ep_exponent_fit: need at least 8 grid points");

    const int n = params_at_ep.n_photons;
    std::vector<double> xs, ys;
    if (mode == PerturbationMode::gamma) {
        const double gamma_c = critical_gamma(params_at_ep.nu0, params_at_ep.eta);
        for (double eps : eps_grid) {
            ModelParams q = params_at_ep;
            q.gamma = gamma_c - eps;
            if (q.gamma < 0.0) throw std::invalid_argument("ep_exponent_fit: eps exceeds gamma_c");
            const double spread = n * std::abs(delta_lambda(q));
            xs.push_back(std::log(eps));
            ys.push_back(std::log(spread));
        }
    } else {
        const ComplexMatrix h = hamiltonian(params_at_ep);
        SplitMix64 rng(seed);
        ComplexMatrix b(n + 1);
        double maxentry = 0.0;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                b(i, j) = rng.complex_in_square();
                maxentry = std::max(maxentry, std::abs(b(i, j)));
            }
        b = Complex(1.0 / maxentry) * b;
        Tolerances raw = tol;
        raw.refine_defective_clusters = false;  // the splitting is the measurement
        for (double eps : eps_grid) {
            EigenDecomposition d;
            try {
                d = eig(h + Complex(eps) * b, raw);
            } catch (const NumericalError&) {
                throw NumericalError("fit unreliable");
            }
            double spread = 0.0;
            for (size_t i = 0; i < d.eigenvalues.size(); ++i)
                for (size_t j = i + 1; j < d.eigenvalues.size(); ++j)
                    spread = std::max(spread, std::abs(d.eigenvalues[i] - d.eigenvalues[j]));
            xs.push_back(std::log(eps));
            ys.push_back(std::log(spread));
        }
    }

    const size_t npts = xs.size();
    double xm = 0.0, ym = 0.0;
    for (size_t i = 0; i < npts; ++i) { xm += xs[i]; ym += ys[i]; }
    xm /= npts; ym /= npts;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < npts; ++i) {
        sxx += (xs[i] - xm) * (xs[i] - xm);
        sxy += (xs[i] - xm) * (ys[i] - ym);
    }
    ExponentFit fit;
    fit.slope = sxy / sxx;
    const double inter = ym - fit.slope * xm;
    double ss = 0.0;
    for (size_t i = 0; i < npts; ++i) {
        const double r = ys[i] - fit.slope * xs[i] - inter;
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / npts);
    if (fit.residual > residual_threshold) throw NumericalError("fit unreliable");
    return fit;
}

}  // namespace epbeam
