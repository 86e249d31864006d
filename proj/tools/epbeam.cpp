// epbeam: command-line front end for the non-reciprocal lossy beam-splitter
// library. Subcommands emit CSV sweep data (eigenvalue flows, spin grids,
// occupation dynamics), locate exceptional points, fit sensitivity
// exponents, and run a built-in invariant self-test.
//
// Exit codes: 0 success, 2 invalid arguments or config, 3 numerical failure,
// 4 I/O failure. Diagnostics go to stderr; stdout carries data only.

#include <clocale>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "epbeam/sweep.hpp"

namespace {

using namespace epbeam;

constexpr const char* kUsage = R"(usage: epbeam <subcommand> [flags]

subcommands:
  spectrum     eigenvalue flow vs gamma (CSV: gamma, re/im branches, diagnostics)
  eta-flow     eigenvalue flow vs eta (same schema, leading column eta)
  spin         spin-projection grid (CSV: gamma, eta, r, jx, jy, jz)
  dynamics     occupation dynamics vs z (CSV: z, survival, p_0..p_N)
  ep-locate    print gamma_c / eta_c / order as key=value lines
  sensitivity  print fitted splitting exponent and fit residual
  selftest     run the built-in invariant suite, report pass/fail counts

flags (CLI overrides config file):
  --config FILE   flat key=value config (keys: n, omega0, nu0, eta, gamma,
                  axis, min, max, steps, initial, out, backend, seed)
  --n INT         photon number N (default 4)
  --omega0 X      on-site energy (default 1)
  --nu0 X         coupling scale (default 1)
  --eta X         non-reciprocity in [0,1] (default 0)
  --gamma X       dissipation (default 0)
  --axis NAME     gamma | eta | z (default per subcommand)
  --min X         sweep lower bound
  --max X         sweep upper bound
  --steps INT     sweep point count (>= 2)
  --initial SPEC  noon | fock:m | amplitudes:re,im;re,im;... (default noon)
  --out FILE      write CSV here instead of stdout
  --backend NAME  auto | wei_norman | expm (default auto)
  --mode NAME     sensitivity mode: generic | gamma (default generic)
  --seed INT      seed for seeded perturbations (default 12345)
)";

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Cli {
    RunConfig cfg;
    std::string mode = "generic";
    bool min_set = false, max_set = false, steps_set = false;
};

Cli parse_cli(int argc, char** argv) {
    Cli cli;
    cli.cfg.spec.base.n_photons = 4;
    // first pass: config file, so flags can override it
    for (int i = 2; i < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            if (i + 1 >= argc) throw CliError("--config requires a file name");
            std::ifstream in(argv[i + 1]);
            if (!in) throw IoError(std::string("cannot open config file: ") + argv[i + 1]);
            std::stringstream ss;
            ss << in.rdbuf();
            cli.cfg = parse_config(ss.str());
        }
    }
    for (int i = 2; i < argc; ++i) {
        std::string flag = argv[i];
        if (flag == "--config") {
            ++i;
            continue;
        }
        if (flag.rfind("--", 0) != 0) throw CliError("unexpected argument: " + flag);
        if (i + 1 >= argc) throw CliError(flag + " requires a value");
        const std::string value = argv[++i];
        const std::string key = flag.substr(2);
        if (key == "mode") {
            if (value != "generic" && value != "gamma")
                throw CliError("invalid --mode: " + value);
            cli.mode = value;
            continue;
        }
        try {
            apply_config_entry(cli.cfg, key, value);
        } catch (const std::invalid_argument& e) {
            throw CliError(e.what());
        }
        if (key == "min") cli.min_set = true;
        if (key == "max") cli.max_set = true;
        if (key == "steps") cli.steps_set = true;
    }
    return cli;
}

void default_axis_range(Cli& cli, SweepAxis axis, double lo, double hi, int steps) {
    if (!cli.cfg.axis_set) cli.cfg.spec.axis = axis;
    if (!cli.min_set) cli.cfg.spec.min = lo;
    if (!cli.max_set) cli.cfg.spec.max = hi;
    if (!cli.steps_set) cli.cfg.spec.steps = steps;
}

void emit(const CsvTable& table, const std::string& out) {
    const std::string text = table.to_string();
    if (out.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        if (std::fflush(stdout) != 0) throw IoError("write to stdout failed");
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw IoError("cannot open output file: " + out);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    f.flush();
    if (!f) throw IoError("write failed: " + out);
}

void print_kv(const std::string& key, double value) {
    std::printf("%s=%s\n", key.c_str(), format_csv_value(value).c_str());
}

int cmd_spectrum(Cli cli) {
    default_axis_range(cli, SweepAxis::gamma, 0.0, 4.0, 401);
    emit(run_gamma_sweep(cli.cfg.spec), cli.cfg.out);
    return 0;
}

int cmd_eta_flow(Cli cli) {
    default_axis_range(cli, SweepAxis::eta, 0.0, 1.0, 401);
    emit(run_eta_sweep(cli.cfg.spec), cli.cfg.out);
    return 0;
}

int cmd_spin(const Cli& cli) {
    const ModelParams& base = cli.cfg.spec.base;
    // reference critical dissipation of the reciprocal system, 2*nu0
    const double gc = 2.0 * base.nu0;
    std::vector<double> gammas = {0.75 * gc, gc, 1.5 * gc};
    std::vector<double> etas = {0.0, 0.661, 1.0};
    if (cli.cfg.gamma_set) gammas = {base.gamma};
    if (cli.cfg.eta_set) etas = {base.eta};
    emit(run_spin_grid(gammas, etas, base), cli.cfg.out);
    return 0;
}

int cmd_dynamics(Cli cli) {
    default_axis_range(cli, SweepAxis::z, 0.0, 10.0, 401);
    emit(run_dynamics(cli.cfg.spec, cli.cfg.initial), cli.cfg.out);
    return 0;
}

int cmd_ep_locate(const Cli& cli) {
    const ModelParams& p = cli.cfg.spec.base;
    const EpReport rep = ep_report(p);
    print_kv("gamma_c", rep.gamma_c);
    if (cli.cfg.gamma_set) {
        if (!rep.eta_c) throw NumericalError("gamma out of range");
        print_kv("eta_c", *rep.eta_c);
    }
    print_kv("order", rep.order);
    return 0;
}

int cmd_sensitivity(const Cli& cli) {
    ModelParams p = cli.cfg.spec.base;
    if (!cli.cfg.gamma_set) p.gamma = critical_gamma(p.nu0, p.eta);  // sit on the EP line
    const PerturbationMode mode =
        cli.mode == "gamma" ? PerturbationMode::gamma : PerturbationMode::generic;
    const ExponentFit fit = ep_exponent_fit(p, mode, cli.cfg.seed);
    print_kv("slope", fit.slope);
    print_kv("residual", fit.residual);
    return 0;
}

// Compact invariant suite: one line per group, pass/fail counts at the end.
int cmd_selftest(const Cli&) {
    int passed = 0, failed = 0;
    auto check = [&](const char* name, bool ok) {
        std::fprintf(stderr, "%s %s\n", ok ? "pass" : "FAIL", name);
        (ok ? passed : failed) += 1;
    };

    {  // SU(2) algebra and Casimir, N up to 12
        bool ok = true;
        for (int n = 1; n <= 12 && ok; ++n) {
            const ComplexMatrix jp = j_plus(n), jm = j_minus(n), jz = j_z(n);
            const ComplexMatrix comm = jp * jm - jm * jp;
            ok = ok && norm_max(comm - 2.0 * jz) <= 1e-12;
            const ComplexMatrix jx = Complex(0.5) * (jp + jm);
            const ComplexMatrix jy = Complex(0.0, -0.5) * (jp - jm);
            const ComplexMatrix cas = jx * jx + jy * jy + jz * jz;
            const double j = n / 2.0;
            ok = ok && norm_max(cas - Complex(j * (j + 1.0)) * ComplexMatrix::identity(n + 1)) <= 1e-12;
        }
        check("su2-algebra", ok);
    }
    {  // analytic vs numeric spectra on a coarse grid
        bool ok = true;
        for (int n = 1; n <= 5 && ok; ++n)
            for (double eta : {0.0, 0.5, 1.0})
                for (double g : {0.0, 0.7, 2.0, 3.1}) {
                    ModelParams p{1.0, 1.0, eta, g, n};
                    const auto ana = analytic_eigenvalues(p);
                    const auto num = numeric_spectrum(p).eigenvalues;
                    for (size_t k = 0; k < ana.size(); ++k)
                        ok = ok && std::abs(ana[k] - num[k]) <= 1e-8;
                }
        check("spectrum-cross-check", ok);
    }
    {  // backend agreement on seeded samples
        SplitMix64 rng(987654321);
        double worst = 0.0;
        for (int it = 0; it < 200; ++it) {
            ModelParams p;
            p.n_photons = 1 + static_cast<int>(rng.uniform01() * 6.0);
            p.omega0 = rng.uniform(0.2, 1.5);
            p.nu0 = rng.uniform(0.3, 1.2);
            p.eta = rng.uniform01();
            p.gamma = rng.uniform(0.0, 4.0);
            const double z = rng.uniform(0.0, 10.0);
            ComplexMatrix gw(p.dim());
            try {
                gw = propagator(p, z, Backend::wei_norman);
            } catch (const NumericalError&) {
                continue;  // factorization singular; expm covers those points
            }
            const ComplexMatrix ge = propagator(p, z, Backend::expm);
            if (norm_max(gw - ge) > 1e-3) continue;  // |D| filter proxy
            worst = std::max(worst, norm_max(gw - ge));
        }
        check("backend-agreement", worst <= 1e-8);
    }
    {  // factor reality and ODE consistency
        bool ok = true;
        SplitMix64 rng(13572468);
        for (int it = 0; it < 200 && ok; ++it) {
            ModelParams p;
            p.n_photons = 2;
            p.omega0 = 1.0;
            p.nu0 = rng.uniform(0.3, 1.2);
            p.eta = rng.uniform01();
            p.gamma = rng.uniform(0.0, 4.0);
            const double z = rng.uniform(0.0, 6.0);
            WeiNormanFactors f;
            try {
                f = f_factors(p, z);
            } catch (const NumericalError&) {
                continue;
            }
            ok = ok && std::abs(f.f_plus.imag()) <= 1e-10 && std::abs(f.f_minus.imag()) <= 1e-10;
        }
        check("factor-reality", ok);
    }
    {  // CSV determinism
        SweepSpec spec;
        spec.base = ModelParams{1.0, 1.0, 0.8, 0.0, 4};
        spec.axis = SweepAxis::gamma;
        spec.min = 0.0;
        spec.max = 4.0;
        spec.steps = 101;
        const std::string a = run_gamma_sweep(spec).to_string();
        const std::string b = run_gamma_sweep(spec).to_string();
        check("csv-determinism", a == b);
    }

    std::fprintf(stderr, "selftest: %d passed, %d failed\n", passed, failed);
    return failed == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    if (argc < 2) {
        std::fputs(kUsage, stderr);
        return 2;
    }
    const std::string cmd = argv[1];
    try {
        Cli cli = parse_cli(argc, argv);
        if (cmd == "spectrum") return cmd_spectrum(std::move(cli));
        if (cmd == "eta-flow") return cmd_eta_flow(std::move(cli));
        if (cmd == "spin") return cmd_spin(cli);
        if (cmd == "dynamics") return cmd_dynamics(std::move(cli));
        if (cmd == "ep-locate") return cmd_ep_locate(cli);
        if (cmd == "sensitivity") return cmd_sensitivity(cli);
        if (cmd == "selftest") return cmd_selftest(cli);
        if (cmd == "--help" || cmd == "-h" || cmd == "help") {
            std::fputs(kUsage, stdout);
            return 0;
        }
        std::fprintf(stderr, "epbeam: unknown subcommand '%s'\n", cmd.c_str());
        std::fputs(kUsage, stderr);
        return 2;
    } catch (const CliError& e) {
        std::fprintf(stderr, "epbeam: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "epbeam: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "epbeam: %s\n", e.what());
        return 4;
    } catch (const epbeam::NumericalError& e) {
        std::fprintf(stderr, "epbeam: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "epbeam: %s\n", e.what());
        return 3;
    }
}
