#pragma once

// Fock-subspace representation of the two-waveguide beam splitter with N
// photons: basis labeling, SU(2) generator matrices in the Schwinger
// representation, the non-reciprocal lossy Hamiltonian, and canonical
// initial states.
//
// Basis convention used everywhere in this project: |phi_m> = |N-m, m>,
// m photons in the lossy guide b, ordered ascending in m.

#include "epbeam/linalg.hpp"

namespace epbeam {

/// The five physical parameters of one beam-splitter instance. All
/// quantities are dimensionless.
struct ModelParams {
    double omega0 = 1.0;   // on-site energy
    double nu0 = 1.0;      // coupling scale, > 0
    double eta = 0.0;      // non-reciprocity, in [0, 1]
    double gamma = 0.0;    // dissipation of guide b, >= 0
    int n_photons = 1;     // total photon number N >= 1

    int dim() const { return n_photons + 1; }
};

/// Throws std::invalid_argument if any parameter is out of range.
void validate(const ModelParams& p);

/// Directional couplings nu = nu0(1+eta), nu_prime = nu0(1-eta).
struct Couplings {
    double nu;
    double nu_prime;
};

Couplings couplings(const ModelParams& p);

/// Raising operator J+ = b^dag a: strictly lower triangular, entry
/// sqrt((N-m)(m+1)) mapping m -> m+1.
ComplexMatrix j_plus(int n_photons);

/// Lowering operator J- = a^dag b = transpose of J+.
ComplexMatrix j_minus(int n_photons);

/// J_z = (b^dag b - a^dag a)/2: diagonal with entries m - N/2.
ComplexMatrix j_z(int n_photons);

/// Beam-splitter Hamiltonian in the N-photon subspace: tridiagonal with
/// diagonal omega0*N - i*gamma*m, sub-diagonal nu*sqrt((N-m)(m+1)) and
/// super-diagonal nu_prime*sqrt(m(N-m+1)). Entrywise equal to the SU(2)
/// form (omega0 - i*gamma/2)*N*I + nu*J+ + nu_prime*J- - i*gamma*J_z.
ComplexMatrix hamiltonian(const ModelParams& p);

/// (|N,0> + |0,N>)/sqrt(2): amplitude 1/sqrt(2) at m = 0 and m = N.
ComplexVector noon_state(int n_photons);

/// Basis state |N-m, m>: unit vector at index m. Throws on m out of range.
ComplexVector fock_state(int m, int n_photons);

}  // namespace epbeam
