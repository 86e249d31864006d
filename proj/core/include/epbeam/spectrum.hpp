#pragma once

// Analytic and numeric eigensystems of the beam-splitter Hamiltonian,
// exceptional-point location and coalescence diagnostics, spin-projection
// portraits of the eigenmodes, and sensitivity-exponent fits near an EP.

#include <optional>
#include <vector>

#include "epbeam/model.hpp"

namespace epbeam {

/// Numeric eigensystem at one parameter point plus coalescence diagnostics.
struct SpectrumResult {
    ModelParams params;
    std::vector<Complex> eigenvalues;   // N+1 values, lexicographic order
    ComplexMatrix right_eigenvectors;   // unit columns aligned with eigenvalues
    double eigenvalue_spread = 0.0;     // max pairwise |lambda_i - lambda_j|
    double eigenvector_min_sv = 0.0;    // smallest singular value of the column matrix
};

/// Critical-point summary: the EP here is always of order N+1.
struct EpReport {
    double gamma_c;                 // 2 nu0 sqrt(1 - eta^2)
    std::optional<double> eta_c;    // sqrt(4 nu0^2 - gamma^2)/(2 nu0) if gamma <= 2 nu0
    int order;                      // N + 1
};

/// Adjacent eigenvalue gap sqrt(4 nu0^2 (1-eta^2) - gamma^2), principal root:
/// purely real below the critical dissipation, purely imaginary above.
Complex delta_lambda(const ModelParams& p);

/// Closed-form eigenvalues (omega0 - i gamma/2) N + r * delta_lambda for
/// r in {-N/2, ..., N/2}, sorted lexicographically.
std::vector<Complex> analytic_eigenvalues(const ModelParams& p, double sort_fuzz = 1e-8);

/// Critical dissipation 2 nu0 sqrt(1 - eta^2).
double critical_gamma(double nu0, double eta);

/// Critical non-reciprocity sqrt(4 nu0^2 - gamma^2)/(2 nu0); requires
/// 0 <= gamma <= 2 nu0, otherwise throws NumericalError("gamma out of range").
double critical_eta(double nu0, double gamma);

EpReport ep_report(const ModelParams& p);

/// Closed-form right eigenvectors: columns exp(-i theta J-) exp(-i phi J+) e_r
/// with theta the root of nu theta^2 + gamma theta + nu_prime = 0 (branch
/// (-gamma + sqrt(gamma^2 - 4 nu nu_prime))/(2 nu)) and phi = nu/(2 theta nu
/// + gamma). Both exponentials are exact nilpotent polynomials. Columns are
/// normalized, phase-fixed, and ordered like analytic_eigenvalues.
/// Throws NumericalError("at exceptional point") when |delta_lambda| <=
/// degeneracy_threshold, where phi diverges; callers fall back to the
/// numeric decomposition there.
ComplexMatrix analytic_eigenvectors(const ModelParams& p, double degeneracy_threshold = 1e-8,
                                    const Tolerances& tol = {});

/// Numeric eigensystem of hamiltonian(p) with coalescence diagnostics filled.
SpectrumResult numeric_spectrum(const ModelParams& p, const Tolerances& tol = {});

/// One eigenmode's spin-projection expectation values <v|J_alpha|v>.
struct SpinRow {
    double r;   // mode label in {-N/2, ..., N/2}, following eigenvalue order
    double jx;
    double jy;
    double jz;
};

/// Spin projections of all N+1 unit right eigenvectors (analytic away from
/// the EP, numeric otherwise). At the EP all rows repeat the coalesced mode.
std::vector<SpinRow> spin_projections(const ModelParams& p, double degeneracy_threshold = 1e-8,
                                      const Tolerances& tol = {});

enum class PerturbationMode { gamma, generic };

struct ExponentFit {
    double slope;
    double residual;  // rms of the log-log fit residuals
};

/// Log-log slope of the eigenvalue splitting against perturbation strength at
/// an exceptional point. Mode gamma detunes gamma -> gamma_c - eps and
/// evaluates the closed-form gap (slope 1/2 on this model's critical line;
/// the numeric solver cannot resolve the genuine splitting below its own
/// (u)^(1/(N+1)) defectiveness floor, so this mode is analytic by design).
/// Mode generic perturbs H -> H + eps*B with a seeded random complex B of
/// unit max-entry and measures the raw numeric spectrum; slope ~ 1/(N+1).
/// eps_grid defaults to 12 log-spaced points in [1e-10, 1e-5].
/// Throws NumericalError("fit unreliable") if the rms residual exceeds
/// residual_threshold or the eigensolver fails at a grid point.
ExponentFit ep_exponent_fit(const ModelParams& params_at_ep, PerturbationMode mode,
                            std::uint64_t seed = 12345,
                            std::vector<double> eps_grid = {},
                            double residual_threshold = 0.25,
                            const Tolerances& tol = {});

}  // namespace epbeam
