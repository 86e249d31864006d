#include "doctest.h"

#include <cmath>

#include "epbeam/model.hpp"

using namespace epbeam;

TEST_CASE("couplings") {
    CHECK(couplings({1.0, 1.0, 0.0, 0.0, 1}).nu == 1.0);
    CHECK(couplings({1.0, 1.0, 0.0, 0.0, 1}).nu_prime == 1.0);
    CHECK(couplings({1.0, 1.0, 1.0, 0.0, 1}).nu == 2.0);
    CHECK(couplings({1.0, 1.0, 1.0, 0.0, 1}).nu_prime == 0.0);
    CHECK(couplings({1.0, 1.0, 0.8, 0.0, 1}).nu == doctest::Approx(1.8).epsilon(1e-15));
    CHECK(couplings({1.0, 1.0, 0.8, 0.0, 1}).nu_prime == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("params validation") {
    CHECK_THROWS_AS(validate(ModelParams{1.0, 0.0, 0.0, 0.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(ModelParams{1.0, 1.0, -0.1, 0.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(ModelParams{1.0, 1.0, 1.1, 0.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(ModelParams{1.0, 1.0, 0.0, -1.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(ModelParams{1.0, 1.0, 0.0, 0.0, 0}), std::invalid_argument);
}

TEST_CASE("ladder operators, small N") {
    const ComplexMatrix jp1 = j_plus(1);
    CHECK(jp1(1, 0) == Complex(1.0));
    CHECK(jp1(0, 1) == Complex(0.0));
    const ComplexMatrix jz1 = j_z(1);
    CHECK(jz1(0, 0) == Complex(-0.5));
    CHECK(jz1(1, 1) == Complex(0.5));

    const ComplexMatrix jp2 = j_plus(2);
    CHECK(std::abs(jp2(1, 0) - std::sqrt(2.0)) <= 1e-15);
    CHECK(std::abs(jp2(2, 1) - std::sqrt(2.0)) <= 1e-15);
    const ComplexMatrix jz2 = j_z(2);
    CHECK(jz2(0, 0) == Complex(-1.0));
    CHECK(jz2(1, 1) == Complex(0.0));
    CHECK(jz2(2, 2) == Complex(1.0));
}

TEST_CASE("su(2) commutators and Casimir up to N = 12") {
    for (int n = 1; n <= 12; ++n) {
        const ComplexMatrix jp = j_plus(n), jm = j_minus(n), jz = j_z(n);
        CHECK(norm_max(jp * jm - jm * jp - 2.0 * jz) <= 1e-12);
        CHECK(norm_max(jz * jp - jp * jz - jp) <= 1e-12);
        CHECK(norm_max(jz * jm - jm * jz - Complex(-1.0) * jm) <= 1e-12);
        const ComplexMatrix jx = Complex(0.5) * (jp + jm);
        const ComplexMatrix jy = Complex(0.0, -0.5) * (jp - jm);
        const double j = n / 2.0;
        const ComplexMatrix cas = jx * jx + jy * jy + jz * jz;
        CHECK(norm_max(cas - Complex(j * (j + 1.0)) * ComplexMatrix::identity(n + 1)) <= 1e-12);
    }
}

TEST_CASE("hamiltonian: single-photon cases") {
    const ComplexMatrix h0 = hamiltonian({1.0, 1.0, 0.0, 0.0, 1});
    CHECK(h0(0, 0) == Complex(1.0));
    CHECK(h0(0, 1) == Complex(1.0));
    CHECK(h0(1, 0) == Complex(1.0));
    CHECK(h0(1, 1) == Complex(1.0));

    const ComplexMatrix h2 = hamiltonian({1.0, 1.0, 0.0, 2.0, 1});
    CHECK(h2(0, 0) == Complex(1.0, 0.0));
    CHECK(h2(1, 1) == Complex(1.0, -2.0));
    CHECK(h2(0, 1) == Complex(1.0));
    CHECK(h2(1, 0) == Complex(1.0));
}

TEST_CASE("hamiltonian equals its su(2) form") {
    SplitMix64 rng(31415);
    for (int n = 1; n <= 10; ++n) {
        ModelParams p;
        p.n_photons = n;
        p.omega0 = rng.uniform(-1.0, 2.0);
        p.nu0 = rng.uniform(0.2, 2.0);
        p.eta = rng.uniform01();
        p.gamma = rng.uniform(0.0, 4.0);
        const auto [nu, nup] = couplings(p);
        const ComplexMatrix su2 =
            Complex(p.omega0, -p.gamma / 2.0) * (Complex(static_cast<double>(n)) *
                                                 ComplexMatrix::identity(n + 1)) +
            Complex(nu) * j_plus(n) + Complex(nup) * j_minus(n) +
            Complex(0.0, -p.gamma) * j_z(n);
        CHECK(norm_max(hamiltonian(p) - su2) <= 1e-14);
    }
}

TEST_CASE("hamiltonian is tridiagonal and Hermitian iff lossless reciprocal") {
    for (int n : {1, 3, 6}) {
        for (double eta : {0.0, 0.5, 1.0})
            for (double g : {0.0, 1.3}) {
                const ModelParams p{1.0, 1.0, eta, g, n};
                const ComplexMatrix h = hamiltonian(p);
                for (int i = 0; i <= n; ++i)
                    for (int j = 0; j <= n; ++j)
                        if (std::abs(i - j) > 1) CHECK(h(i, j) == Complex(0.0));
                const double dev = norm_max(h - adjoint(h));
                if (g == 0.0 && eta == 0.0)
                    CHECK(dev == 0.0);
                else
                    CHECK(dev > 0.0);
            }
    }
}

TEST_CASE("noon state") {
    const ComplexVector v2 = noon_state(2);
    CHECK(std::abs(v2[0] - 1.0 / std::sqrt(2.0)) <= 1e-15);
    CHECK(v2[1] == Complex(0.0));
    CHECK(std::abs(v2[2] - 1.0 / std::sqrt(2.0)) <= 1e-15);

    const ComplexVector v4 = noon_state(4);
    for (int m = 1; m < 4; ++m) CHECK(v4[m] == Complex(0.0));
    CHECK(std::abs(v4[0] - 1.0 / std::sqrt(2.0)) <= 1e-15);
    CHECK(std::abs(v4[4] - 1.0 / std::sqrt(2.0)) <= 1e-15);

    for (int n = 1; n <= 20; ++n) CHECK(std::abs(norm2(noon_state(n)) - 1.0) <= 1e-15);
}

TEST_CASE("fock states are orthonormal") {
    CHECK(fock_state(0, 2)[0] == Complex(1.0));
    CHECK(fock_state(1, 2)[1] == Complex(1.0));
    CHECK(fock_state(1, 2)[0] == Complex(0.0));
    CHECK_THROWS_AS(fock_state(3, 2), std::invalid_argument);
    CHECK_THROWS_AS(fock_state(-1, 2), std::invalid_argument);
    for (int m = 0; m <= 3; ++m)
        for (int mp = 0; mp <= 3; ++mp) {
            Complex dot = 0.0;
            const ComplexVector a = fock_state(m, 3), b = fock_state(mp, 3);
            for (int i = 0; i <= 3; ++i) dot += std::conj(a[i]) * b[i];
            CHECK(std::abs(dot - (m == mp ? 1.0 : 0.0)) == 0.0);
        }
}
