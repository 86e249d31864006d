#include "epbeam/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace epbeam {

void validate(const SweepSpec& spec) {
    validate(spec.base);
    if (!(spec.min < spec.max)) throw std::invalid_argument("SweepSpec: min must be < max");
    if (spec.steps < 2) throw std::invalid_argument("SweepSpec: steps must be >= 2");
    switch (spec.axis) {
        case SweepAxis::gamma:
            if (spec.min < 0.0) throw std::invalid_argument("SweepSpec: gamma must be >= 0");
            break;
        case SweepAxis::eta:
            if (spec.min < 0.0 || spec.max > 1.0)
                throw std::invalid_argument("SweepSpec: eta must lie in [0, 1]");
            break;
        case SweepAxis::z:
            if (spec.min < 0.0) throw std::invalid_argument("SweepSpec: z must be >= 0");
            break;
    }
}

std::string format_csv_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string CsvTable::to_string() const {
    std::string out;
    for (size_t c = 0; c < header.size(); ++c) {
        if (c) out += ',';
        out += header[c];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_csv_value(row[c]);
        }
        out += '\n';
    }
    return out;
}

void CsvTable::write(std::ostream& os) const { os << to_string(); }

namespace {

std::vector<double> grid(double lo, double hi, int steps) {
    std::vector<double> g(steps);
    for (int i = 0; i < steps; ++i) g[i] = lo + (hi - lo) * i / (steps - 1);
    return g;
}

// Greedy minimal-distance assignment of current eigenvalues to the previous
// step's branches; adequate for at most a handful of branches and fully
// deterministic (distance ties resolved by lexicographic pair order).
std::vector<int> match_branches(const std::vector<Complex>& prev,
                                const std::vector<Complex>& cur) {
    const int n = static_cast<int>(prev.size());
    struct Entry {
        double d;
        int branch, value;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) entries.push_back({std::abs(prev[i] - cur[j]), i, j});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.branch != b.branch) return a.branch < b.branch;
        return a.value < b.value;
    });
    std::vector<int> assign(n, -1);
    std::vector<bool> branch_used(n, false), value_used(n, false);
    int assigned = 0;
    for (const Entry& e : entries) {
        if (assigned == n) break;
        if (branch_used[e.branch] || value_used[e.value]) continue;
        assign[e.branch] = e.value;
        branch_used[e.branch] = value_used[e.value] = true;
        ++assigned;
    }
    return assign;  // assign[branch] = index into cur
}

CsvTable eigenvalue_sweep(const SweepSpec& spec, const char* axis_name, const Tolerances& tol) {
    validate(spec);
    const int n = spec.base.n_photons;
    CsvTable table;
    table.header.push_back(axis_name);
    for (int k = 0; k <= n; ++k) table.header.push_back("re_lambda_" + std::to_string(k));
    for (int k = 0; k <= n; ++k) table.header.push_back("im_lambda_" + std::to_string(k));
    table.header.push_back("spread");
    table.header.push_back("eigvec_min_sv");

    std::vector<Complex> branches;
    for (double x : grid(spec.min, spec.max, spec.steps)) {
        ModelParams p = spec.base;
        if (spec.axis == SweepAxis::gamma)
            p.gamma = x;
        else
            p.eta = std::clamp(x, 0.0, 1.0);
        SpectrumResult res;
        try {
            res = numeric_spectrum(p, tol);
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " at " + axis_name + "=" +
                                 format_csv_value(x));
        }
        std::vector<Complex> cur(n + 1);
        if (branches.empty()) {
            cur = res.eigenvalues;  // already lexicographically sorted
        } else {
            const std::vector<int> assign = match_branches(branches, res.eigenvalues);
            for (int b = 0; b <= n; ++b) cur[b] = res.eigenvalues[assign[b]];
        }
        branches = cur;
        std::vector<double> row;
        row.push_back(x);
        for (int k = 0; k <= n; ++k) row.push_back(cur[k].real());
        for (int k = 0; k <= n; ++k) row.push_back(cur[k].imag());
        row.push_back(res.eigenvalue_spread);
        row.push_back(res.eigenvector_min_sv);
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace

CsvTable run_gamma_sweep(const SweepSpec& spec, const Tolerances& tol) {
    if (spec.axis != SweepAxis::gamma)
        throw std::invalid_argument("run_gamma_sweep: axis must be gamma");
    return eigenvalue_sweep(spec, "gamma", tol);
}

CsvTable run_eta_sweep(const SweepSpec& spec, const Tolerances& tol) {
    if (spec.axis != SweepAxis::eta) throw std::invalid_argument("run_eta_sweep: axis must be eta");
    return eigenvalue_sweep(spec, "eta", tol);
}

CsvTable run_spin_grid(const std::vector<double>& gammas, const std::vector<double>& etas,
                       const ModelParams& base, const Tolerances& tol) {
    CsvTable table;
    table.header = {"gamma", "eta", "r", "jx", "jy", "jz"};
    for (double g : gammas)
        for (double e : etas) {
            ModelParams p = base;
            p.gamma = g;
            p.eta = e;
            for (const SpinRow& row : spin_projections(p, 1e-8, tol))
                table.rows.push_back({g, e, row.r, row.jx, row.jy, row.jz});
        }
    return table;
}

ComplexVector InitialState::build(int n_photons) const {
    switch (kind) {
        case Kind::noon:
            return noon_state(n_photons);
        case Kind::fock:
            return fock_state(fock_m, n_photons);
        case Kind::amplitudes: {
            if (static_cast<int>(amplitudes.size()) != n_photons + 1)
                throw std::invalid_argument("initial amplitudes must have N+1 entries");
            ComplexVector v(n_photons + 1);
            for (int i = 0; i <= n_photons; ++i) v[i] = amplitudes[i];
            if (norm2(v) == 0.0) throw std::invalid_argument("initial amplitudes are all zero");
            return v;
        }
    }
    throw std::logic_error("InitialState: unknown kind");
}

CsvTable run_dynamics(const SweepSpec& spec, const InitialState& initial, const Tolerances& tol) {
    validate(spec);
    if (spec.axis != SweepAxis::z) throw std::invalid_argument("run_dynamics: axis must be z");
    const int n = spec.base.n_photons;
    CsvTable table;
    table.header = {"z", "survival"};
    for (int m = 0; m <= n; ++m) table.header.push_back("p_" + std::to_string(m));

    std::vector<double> zs = grid(spec.min, spec.max, spec.steps);
    const Trajectory traj = evolve(spec.base, initial.build(n), zs, tol);
    for (const TrajectoryPoint& pt : traj.points) {
        std::vector<double> row{pt.z, pt.survival};
        row.insert(row.end(), pt.occupation.begin(), pt.occupation.end());
        table.rows.push_back(std::move(row));
    }
    return table;
}

EpScanResult locate_ep_scan(const SweepSpec& spec, double spread_max, double min_sv_max,
                            const Tolerances& tol) {
    validate(spec);
    if (spec.axis == SweepAxis::z)
        throw std::invalid_argument("locate_ep_scan: axis must be gamma or eta");
    EpScanResult res;
    res.first_fired = std::numeric_limits<double>::quiet_NaN();
    bool have = false;
    for (double x : grid(spec.min, spec.max, spec.steps)) {
        ModelParams p = spec.base;
        if (spec.axis == SweepAxis::gamma)
            p.gamma = x;
        else
            p.eta = std::clamp(x, 0.0, 1.0);
        const SpectrumResult s = numeric_spectrum(p, tol);
        const bool fired = s.eigenvalue_spread <= spread_max && s.eigenvector_min_sv <= min_sv_max;
        if (fired && std::isnan(res.first_fired)) res.first_fired = x;
        const bool better =
            !have || s.eigenvalue_spread < res.spread_at_min ||
            (s.eigenvalue_spread == res.spread_at_min && s.eigenvector_min_sv < res.min_sv_at_min);
        if (better) {
            res.param_at_min = x;
            res.spread_at_min = s.eigenvalue_spread;
            res.min_sv_at_min = s.eigenvector_min_sv;
            res.metric_fired = fired;
            have = true;
        }
    }
    return res;
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("invalid numeric value for '" + key + "': " + value);
    }
    if (pos != value.size())
        throw std::invalid_argument("invalid numeric value for '" + key + "': " + value);
    return v;
}

long parse_long(const std::string& key, const std::string& value) {
    size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(value, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("invalid integer value for '" + key + "': " + value);
    }
    if (pos != value.size())
        throw std::invalid_argument("invalid integer value for '" + key + "': " + value);
    return v;
}

InitialState parse_initial(const std::string& value) {
    InitialState init;
    if (value == "noon") {
        init.kind = InitialState::Kind::noon;
        return init;
    }
    if (value.rfind("fock:", 0) == 0) {
        init.kind = InitialState::Kind::fock;
        init.fock_m = static_cast<int>(parse_long("initial", value.substr(5)));
        return init;
    }
    if (value.rfind("amplitudes:", 0) == 0) {
        // semicolon-separated re,im pairs: amplitudes:0.7,0;0,0;0.7,0
        init.kind = InitialState::Kind::amplitudes;
        std::stringstream ss(value.substr(11));
        std::string pair;
        while (std::getline(ss, pair, ';')) {
            const size_t comma = pair.find(',');
            if (comma == std::string::npos)
                throw std::invalid_argument("initial amplitudes entries must be re,im pairs");
            init.amplitudes.emplace_back(parse_double("initial", pair.substr(0, comma)),
                                         parse_double("initial", pair.substr(comma + 1)));
        }
        if (init.amplitudes.empty())
            throw std::invalid_argument("initial amplitudes list is empty");
        return init;
    }
    throw std::invalid_argument("invalid initial state: " + value +
                                " (expected noon, fock:m, or amplitudes:...)");
}

}  // namespace

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "n") {
        cfg.spec.base.n_photons = static_cast<int>(parse_long(key, value));
    } else if (key == "omega0") {
        cfg.spec.base.omega0 = parse_double(key, value);
    } else if (key == "nu0") {
        cfg.spec.base.nu0 = parse_double(key, value);
    } else if (key == "eta") {
        cfg.spec.base.eta = parse_double(key, value);
        cfg.eta_set = true;
    } else if (key == "gamma") {
        cfg.spec.base.gamma = parse_double(key, value);
        cfg.gamma_set = true;
    } else if (key == "axis") {
        if (value == "gamma")
            cfg.spec.axis = SweepAxis::gamma;
        else if (value == "eta")
            cfg.spec.axis = SweepAxis::eta;
        else if (value == "z")
            cfg.spec.axis = SweepAxis::z;
        else
            throw std::invalid_argument("invalid axis: " + value);
        cfg.axis_set = true;
    } else if (key == "min") {
        cfg.spec.min = parse_double(key, value);
    } else if (key == "max") {
        cfg.spec.max = parse_double(key, value);
    } else if (key == "steps") {
        cfg.spec.steps = static_cast<int>(parse_long(key, value));
    } else if (key == "initial") {
        cfg.initial = parse_initial(value);
    } else if (key == "out") {
        cfg.out = value;
    } else if (key == "backend") {
        if (value == "wei_norman")
            cfg.backend = Backend::wei_norman;
        else if (value == "expm")
            cfg.backend = Backend::expm;
        else if (value == "auto")
            cfg.backend = Backend::automatic;
        else
            throw std::invalid_argument("invalid backend: " + value);
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_long(key, value));
    } else {
        throw std::invalid_argument("unknown config key: " + key);
    }
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    cfg.spec.base.n_photons = 4;  // run-level default; the headline case
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(ss, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

}  // namespace epbeam
