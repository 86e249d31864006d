#pragma once

// Wei-Norman factorized evolution operator for the beam splitter:
// G(z) = e^{-i(omega0 - i gamma/2) N z} e^{-i f+ J+} e^{-i f_z J_z} e^{-i f- J-},
// closed-form disentangling functions with robust handling of the
// exceptional-point and unidirectional limits, trajectory evolution, and
// post-selected occupation statistics.

#include <vector>

#include "epbeam/model.hpp"

namespace epbeam {

/// The disentangling functions at one propagation distance.
struct WeiNormanFactors {
    Complex f_plus;
    Complex f_z;
    Complex f_minus;
    double z = 0.0;
};

/// Right-hand sides of the coupled factor ODEs, in the order
/// (d f-/dz, d f+/dz, d f_z/dz).
struct WeiNormanRates {
    Complex df_minus;
    Complex df_plus;
    Complex df_z;
};

enum class Backend { wei_norman, expm, automatic };

/// Closed-form factors. With u = z*delta_lambda/2 and
/// D = cos u + (gamma/delta_lambda) sin u:
///   f_z = -2i ln D,  f+ = (2 nu/delta_lambda) sin u / D,
///   f- = (2 nu'/delta_lambda) sin u / D.
/// Algebraically equal to the tan-based forms where those are finite, but
/// evaluable across tan poles and at nu' = 0. Near the exceptional point
/// (|z*delta_lambda| <= 1e-6) the even power series in (z*delta_lambda/2)^2
/// is used, which reduces to sin u/delta_lambda -> z/2, D -> 1 + gamma z/2.
/// Throws NumericalError("factorization singular") when |D| <= 1e-12 (an
/// isolated z where the factorization breaks; the propagator itself stays
/// finite, use the expm backend there).
WeiNormanFactors f_factors(const ModelParams& p, double z);

/// The printed ODE system: df-/dz = nu' e^{-i f_z},
/// df+/dz = nu + nu' f+^2 - gamma f+, df_z/dz = -i gamma + 2 i nu' f+.
WeiNormanRates f_ode_rhs(const ModelParams& p, const WeiNormanFactors& f);

/// Evolution operator G(z). Backend wei_norman assembles the factorized
/// product (for |D| < 0.1 the value-identical opposite-pivot ordering
/// e^{g- J-} e^{g_z J_z} e^{g+ J+} is used, which avoids the u/|D|^N
/// cancellation of the direct product near factorization poles); backend
/// expm computes e^{-iHz} by scaling-and-squaring; automatic uses
/// wei_norman and falls back to expm when |D| <= 1e-6.
ComplexMatrix propagator(const ModelParams& p, double z, Backend backend = Backend::automatic,
                         const Tolerances& tol = {});

/// One record of a propagated trajectory.
struct TrajectoryPoint {
    double z;
    ComplexVector amplitudes;        // unnormalized G(z) * initial
    double survival;                 // squared norm (post-selection probability)
    std::vector<double> occupation;  // P(m) = |amp_m|^2 / survival
};

struct Trajectory {
    ModelParams params;
    std::vector<TrajectoryPoint> points;
};

/// Propagates `initial` across z_grid (strictly increasing from 0) with the
/// automatic backend. Throws NumericalError("state annihilated") when the
/// survival probability drops below 1e-300.
Trajectory evolve(const ModelParams& p, const ComplexVector& initial,
                  const std::vector<double>& z_grid, const Tolerances& tol = {});

/// First order in eps = 1 - eta of the factors near the unidirectional
/// limit, with coefficients fixed from the exact closed forms (T = e^{-gamma z}):
///   f+ = (2 nu0/gamma)(1-T)
///        + eps [ -nu0(1-T)/gamma + (4 nu0^3/gamma^3)(1-T^2) - (8 nu0^3/gamma^2) z T ]
///   f_z = -i gamma z + eps (4 i nu0^2/gamma^2)(gamma z - 1 + T)
///   f-  = eps (nu0/gamma)(1-T)
/// Requires gamma > 0 and eps <= 0.1, else NumericalError("outside asymptotic
/// regime").
WeiNormanFactors unidirectional_series(const ModelParams& p, double z);

}  // namespace epbeam
