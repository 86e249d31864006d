#pragma once

// Parameter sweeps that emit the data behind the reference figures:
// eigenvalue flows against dissipation or non-reciprocity with coalescence
// diagnostics and continuity-matched branches, spin-projection grids,
// occupation dynamics, and the flat key=value run configuration.

#include <iosfwd>
#include <string>
#include <vector>

#include "epbeam/propagator.hpp"
#include "epbeam/spectrum.hpp"

namespace epbeam {

enum class SweepAxis { gamma, eta, z };

enum class SweepOutput { eigenvalues, diagnostics, spin, occupation, survival };

struct SweepSpec {
    ModelParams base;
    SweepAxis axis = SweepAxis::gamma;
    double min = 0.0;
    double max = 4.0;
    int steps = 401;
    std::vector<SweepOutput> outputs;
};

void validate(const SweepSpec& spec);

/// Numeric table with a fixed header. Serialized as UTF-8 CSV: comma
/// separator, '.' decimal point, 17 significant digits, LF line endings,
/// header always present.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::string to_string() const;
    void write(std::ostream& os) const;
};

/// Formats one value the way CsvTable does ("%.17g", C locale).
std::string format_csv_value(double v);

/// Eigenvalue flow against gamma. Columns: gamma, re_lambda_0..N,
/// im_lambda_0..N, spread, eigvec_min_sv. Branches are continuity-matched
/// step to step by greedy minimal-distance assignment (ties broken by
/// lexicographic pair order); the first step is sorted lexicographically.
CsvTable run_gamma_sweep(const SweepSpec& spec, const Tolerances& tol = {});

/// Same schema with leading column eta.
CsvTable run_eta_sweep(const SweepSpec& spec, const Tolerances& tol = {});

/// Spin-projection grid. Columns: gamma, eta, r, jx, jy, jz.
CsvTable run_spin_grid(const std::vector<double>& gammas, const std::vector<double>& etas,
                       const ModelParams& base, const Tolerances& tol = {});

/// Initial-state selector for dynamics runs.
struct InitialState {
    enum class Kind { noon, fock, amplitudes } kind = Kind::noon;
    int fock_m = 0;
    std::vector<Complex> amplitudes;

    ComplexVector build(int n_photons) const;
};

/// Occupation dynamics along z. Columns: z, survival, p_0..p_N.
CsvTable run_dynamics(const SweepSpec& spec, const InitialState& initial,
                      const Tolerances& tol = {});

/// Result of a coalescence scan along gamma or eta: the grid argmin of the
/// metric (eigenvalue spread, tie-broken by eigenvector min-SV) plus whether
/// the threshold metric (spread <= spread_max and min-SV <= min_sv_max)
/// fired there, and the first grid value where it fired (NaN if never).
struct EpScanResult {
    double param_at_min = 0.0;
    double spread_at_min = 0.0;
    double min_sv_at_min = 0.0;
    bool metric_fired = false;
    double first_fired = 0.0;
};

EpScanResult locate_ep_scan(const SweepSpec& spec, double spread_max = 1e-6,
                            double min_sv_max = 1e-3, const Tolerances& tol = {});

/// Full run configuration: a SweepSpec plus run options shared by the CLI
/// and the config file.
struct RunConfig {
    SweepSpec spec;
    InitialState initial;
    std::string out;             // empty: standard output
    Backend backend = Backend::automatic;
    std::uint64_t seed = 12345;
    bool axis_set = false;
    bool gamma_set = false;
    bool eta_set = false;
};

/// Parses flat `key = value` lines (keys: n, omega0, nu0, eta, gamma, axis,
/// min, max, steps, initial, out, backend, seed; '#' starts a comment).
/// Throws std::invalid_argument on unknown keys or malformed values.
RunConfig parse_config(const std::string& text);

/// Applies one key=value assignment (shared by config parsing and CLI flags).
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace epbeam
