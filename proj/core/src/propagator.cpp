#include "epbeam/propagator.hpp"

#include <cmath>
#include <cstdio>

#include "epbeam/spectrum.hpp"

namespace epbeam {

namespace {

constexpr double kSeriesThreshold = 1e-6;   // |z * delta_lambda| below: even series
constexpr double kSingularD = 1e-12;        // |D| below: factorization singular
constexpr double kAutoFallback = 1e-6;      // |D| below: auto backend switches to expm
constexpr double kDualPivot = 0.1;          // |D| below: opposite-pivot assembly

// Shared trigonometric kernel of the closed forms. sin_over_dl and cos_u are
// even in delta_lambda, so the principal branch of the square root never
// matters; the small-|u| series keeps the exceptional-point line exact.
struct WnKernel {
    Complex sin_over_dl;  // sin(z dl/2)/dl
    Complex cos_u;        // cos(z dl/2)
    Complex d;            // cos u + (gamma/dl) sin u
    Complex d_tilde;      // cos u - (gamma/dl) sin u
};

WnKernel wn_kernel(const ModelParams& p, double z) {
    const Complex dl = delta_lambda(p);
    WnKernel k;
    if (std::abs(z * dl) <= kSeriesThreshold) {
        const Complex w = (z * dl / 2.0) * (z * dl / 2.0);
        k.sin_over_dl = (z / 2.0) * (1.0 - w / 6.0 + w * w / 120.0);
        k.cos_u = 1.0 - w / 2.0 + w * w / 24.0;
    } else {
        const Complex u = z * dl / 2.0;
        k.sin_over_dl = std::sin(u) / dl;
        k.cos_u = std::cos(u);
    }
    k.d = k.cos_u + p.gamma * k.sin_over_dl;
    k.d_tilde = k.cos_u - p.gamma * k.sin_over_dl;
    return k;
}

// Diagonal of e^{-i f_z J_z} as exact integer powers base^(n-2m); equal to
// e^{-i f_z (m - N/2)} for any branch of the logarithm behind f_z.
ComplexMatrix jz_exponential(Complex base, int n) {
    ComplexMatrix d(n + 1);
    Complex pos = 1.0;  // base^0
    std::vector<Complex> powers(2 * n + 1);
    powers[n] = 1.0;  // exponent 0 at offset n
    for (int e = 1; e <= n; ++e) {
        pos *= base;
        powers[n + e] = pos;
        powers[n - e] = 1.0 / pos;
    }
    for (int m = 0; m <= n; ++m) d(m, m) = powers[n + (n - 2 * m)];
    return d;
}

// The factored propagator is the spin-N/2 representation of the 2x2 group
// element g = [[a, b], [c, d]] with a = D, d = D~, b = -i (2 nu'/dl) sin u,
// c = -i (2 nu/dl) sin u, det g = 1. The Eq.-(16) product is the rep of the
// Gauss factorization pivoted on a; near zeros of D that loses ~u/|D|^N, so
// the same element is then assembled pivoting on d, or on c via three exact
// shears when both diagonal entries are small (which requires |c| ~>= 1).
ComplexMatrix wei_norman_matrix(const ModelParams& p, double z, bool forced) {
    const auto [nu, nu_prime] = couplings(p);
    const int n = p.n_photons;
    const WnKernel k = wn_kernel(p, z);
    if (forced && std::abs(k.d) <= kSingularD) throw NumericalError("factorization singular");

    const Complex mi(0.0, -1.0);
    const Complex pref = std::exp(mi * Complex(p.omega0, -p.gamma / 2.0) *
                                  static_cast<double>(n) * z);
    const double abs_d = std::abs(k.d), abs_dt = std::abs(k.d_tilde);
    if (abs_d >= kDualPivot || (abs_d >= abs_dt && abs_dt < kDualPivot)) {
        // standard order e^{-i f+ J+} e^{-i f_z J_z} e^{-i f- J-}
        const Complex f_plus = 2.0 * nu * k.sin_over_dl / k.d;
        const Complex f_minus = 2.0 * nu_prime * k.sin_over_dl / k.d;
        const ComplexMatrix lp = nilpotent_expm(mi * f_plus * j_plus(n), 1);
        const ComplexMatrix lm = nilpotent_expm(mi * f_minus * j_minus(n), 1);
        return pref * (lp * jz_exponential(k.d, n) * lm);
    }
    if (abs_dt >= kDualPivot) {
        // pivot on d: e^{g- J-} diag e^{g+ J+}
        const Complex g_plus = 2.0 * nu * k.sin_over_dl / k.d_tilde;
        const Complex g_minus = 2.0 * nu_prime * k.sin_over_dl / k.d_tilde;
        const ComplexMatrix um = nilpotent_expm(mi * g_minus * j_minus(n), 1);
        const ComplexMatrix lp = nilpotent_expm(mi * g_plus * j_plus(n), 1);
        return pref * (um * jz_exponential(1.0 / k.d_tilde, n) * lp);
    }
    // both diagonal entries small (gamma/|dl| small near a tan pole): pivot
    // on c through g = U-((a-1)/c) L+(c) U-((d-1)/c)
    const Complex c = mi * 2.0 * nu * k.sin_over_dl;
    const ComplexMatrix u1 = nilpotent_expm((k.d - 1.0) / c * j_minus(n), 1);
    const ComplexMatrix lc = nilpotent_expm(c * j_plus(n), 1);
    const ComplexMatrix u2 = nilpotent_expm((k.d_tilde - 1.0) / c * j_minus(n), 1);
    return pref * (u1 * (lc * u2));
}

}  // namespace

WeiNormanFactors f_factors(const ModelParams& p, double z) {
    validate(p);
    if (!std::isfinite(z)) throw std::invalid_argument("f_factors: z must be finite");
    const auto [nu, nu_prime] = couplings(p);
    const WnKernel k = wn_kernel(p, z);
    if (std::abs(k.d) <= kSingularD) throw NumericalError("factorization singular");
    WeiNormanFactors f;
    f.z = z;
    f.f_plus = 2.0 * nu * k.sin_over_dl / k.d;
    f.f_minus = 2.0 * nu_prime * k.sin_over_dl / k.d;
    f.f_z = Complex(0.0, -2.0) * std::log(k.d);
    return f;
}

WeiNormanRates f_ode_rhs(const ModelParams& p, const WeiNormanFactors& f) {
    validate(p);
    const auto [nu, nu_prime] = couplings(p);
    const Complex i(0.0, 1.0);
    WeiNormanRates r;
    r.df_minus = nu_prime * std::exp(-i * f.f_z);
    r.df_plus = nu + nu_prime * f.f_plus * f.f_plus - p.gamma * f.f_plus;
    r.df_z = -i * p.gamma + 2.0 * i * nu_prime * f.f_plus;
    return r;
}

ComplexMatrix propagator(const ModelParams& p, double z, Backend backend, const Tolerances& tol) {
    validate(p);
    if (!(z >= 0.0)) throw std::invalid_argument("propagator: z must be >= 0");
    switch (backend) {
        case Backend::wei_norman:
            return wei_norman_matrix(p, z, /*forced=*/true);
        case Backend::expm: {
            const ComplexMatrix h = hamiltonian(p);
            return expm(Complex(0.0, -z) * h, tol);
        }
        case Backend::automatic: {
            const WnKernel k = wn_kernel(p, z);
            if (std::abs(k.d) <= kAutoFallback) {
                const ComplexMatrix h = hamiltonian(p);
                return expm(Complex(0.0, -z) * h, tol);
            }
            return wei_norman_matrix(p, z, /*forced=*/false);
        }
    }
    throw std::logic_error("propagator: unknown backend");
}

Trajectory evolve(const ModelParams& p, const ComplexVector& initial,
                  const std::vector<double>& z_grid, const Tolerances& tol) {
    validate(p);
    if (initial.dim() != p.dim())
        throw std::invalid_argument("evolve: initial state has wrong dimension");
    if (!initial.finite() || norm2(initial) == 0.0)
        throw std::invalid_argument("evolve: initial state must be finite with nonzero norm");
    if (z_grid.empty() || z_grid.front() < 0.0)
        throw std::invalid_argument("evolve: z_grid must start at 0");
    for (size_t i = 1; i < z_grid.size(); ++i)
        if (!(z_grid[i] > z_grid[i - 1]))
            throw std::invalid_argument("evolve: z_grid must be strictly increasing");

    Trajectory traj;
    traj.params = p;
    traj.points.reserve(z_grid.size());
    for (double z : z_grid) {
        TrajectoryPoint pt;
        pt.z = z;
        pt.amplitudes = propagator(p, z, Backend::automatic, tol) * initial;
        double s = 0.0;
        for (int m = 0; m < pt.amplitudes.dim(); ++m) s += std::norm(pt.amplitudes[m]);
        if (s < 1e-300) {
            char msg[64];
            std::snprintf(msg, sizeof(msg), "state annihilated at z=%.17g", z);
            throw NumericalError(msg);
        }
        pt.survival = s;
        pt.occupation.resize(pt.amplitudes.dim());
        for (int m = 0; m < pt.amplitudes.dim(); ++m)
            pt.occupation[m] = std::norm(pt.amplitudes[m]) / s;
        traj.points.push_back(std::move(pt));
    }
    return traj;
}

WeiNormanFactors unidirectional_series(const ModelParams& p, double z) {
    validate(p);
    const double eps = 1.0 - p.eta;
    if (eps > 0.1) throw NumericalError("outside asymptotic regime");
    if (!(p.gamma > 0.0))
        throw std::invalid_argument("unidirectional_series: gamma must be > 0");
    const double nu0 = p.nu0, g = p.gamma;
    const double t = std::exp(-g * z);
    WeiNormanFactors f;
    f.z = z;
    f.f_plus = (2.0 * nu0 / g) * (1.0 - t) +
               eps * (-nu0 * (1.0 - t) / g + 4.0 * nu0 * nu0 * nu0 / (g * g * g) * (1.0 - t * t) -
                      8.0 * nu0 * nu0 * nu0 / (g * g) * z * t);
    f.f_z = Complex(0.0, -g * z) +
            eps * Complex(0.0, 4.0 * nu0 * nu0 / (g * g) * (g * z - 1.0 + t));
    f.f_minus = eps * (nu0 / g) * (1.0 - t);
    return f;
}

}  // namespace epbeam
