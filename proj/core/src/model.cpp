#include "epbeam/model.hpp"

#include <cmath>

namespace epbeam {

void validate(const ModelParams& p) {
    if (!(p.nu0 > 0.0)) throw std::invalid_argument("ModelParams: nu0 must be > 0");
    if (!(p.eta >= 0.0 && p.eta <= 1.0))
        throw std::invalid_argument("ModelParams: eta must lie in [0, 1]");
    if (!(p.gamma >= 0.0)) throw std::invalid_argument("ModelParams: gamma must be >= 0");
    if (p.n_photons < 1) throw std::invalid_argument("ModelParams: n_photons must be >= 1");
    if (!std::isfinite(p.omega0)) throw std::invalid_argument("ModelParams: omega0 must be finite");
}

Couplings couplings(const ModelParams& p) {
    validate(p);
    return {p.nu0 * (1.0 + p.eta), p.nu0 * (1.0 - p.eta)};
}

ComplexMatrix j_plus(int n_photons) {
    if (n_photons < 1) throw std::invalid_argument("j_plus: n_photons must be >= 1");
    ComplexMatrix j(n_photons + 1);
    for (int m = 0; m < n_photons; ++m)
        j(m + 1, m) = std::sqrt(static_cast<double>(n_photons - m) * (m + 1));
    return j;
}

ComplexMatrix j_minus(int n_photons) { return transpose(j_plus(n_photons)); }

ComplexMatrix j_z(int n_photons) {
    if (n_photons < 1) throw std::invalid_argument("j_z: n_photons must be >= 1");
    ComplexMatrix j(n_photons + 1);
    for (int m = 0; m <= n_photons; ++m) j(m, m) = m - n_photons / 2.0;
    return j;
}

ComplexMatrix hamiltonian(const ModelParams& p) {
    const auto [nu, nu_prime] = couplings(p);
    const int n = p.n_photons;
    ComplexMatrix h(n + 1);
    for (int m = 0; m <= n; ++m) {
        h(m, m) = Complex(p.omega0 * n, -p.gamma * m);
        if (m < n) h(m + 1, m) = nu * std::sqrt(static_cast<double>(n - m) * (m + 1));
        if (m > 0) h(m - 1, m) = nu_prime * std::sqrt(static_cast<double>(m) * (n - m + 1));
    }
    return h;
}

ComplexVector noon_state(int n_photons) {
    if (n_photons < 1) throw std::invalid_argument("noon_state: n_photons must be >= 1");
    ComplexVector v(n_photons + 1);
    v[0] = v[n_photons] = 1.0 / std::sqrt(2.0);
    return v;
}

ComplexVector fock_state(int m, int n_photons) {
    if (n_photons < 1) throw std::invalid_argument("fock_state: n_photons must be >= 1");
    if (m < 0 || m > n_photons) throw std::invalid_argument("fock_state: index out of range");
    ComplexVector v(n_photons + 1);
    v[m] = 1.0;
    return v;
}

}  // namespace epbeam
