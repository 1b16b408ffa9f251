// Config parsing, scenario execution, eps sweeps and verification campaigns.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ddrec/verify.hpp"

namespace ddrec {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    // [params]
    double tau_n = 1.0, tau_p = 1.0;
    double n0 = 1.0, p0 = 1.0;
    double eps = 0.1, eps0 = 1.0;
    // [grid]
    int n_cells = 200;
    // [stepper]
    StepperConfig stepper;
    // [initial]
    std::string initial_family = "constant";  // constant, step, gaussian_bump, zero_patch
    double amp_n = 1.0, amp_p = 1.0;
    double ntr0 = 0.5;
    bool ntr_explicit = false;       // config set a numeric ntr
    bool ntr_from_quasi_eq = false;  // initial ntr = quasi-equilibrium of (n, p)
    // [potential]
    PotentialFamily potential = PotentialFamily::Constant;
    double pot_amp_n = 0.0, pot_amp_p = 0.0;
    // [sweep]
    std::vector<double> eps_sweep;  // empty: single run at eps
    std::uint64_t seed = 1;
    std::string output = "out";
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// Materialized per-eps problem: params/grid built from the config.
SimParams make_params(const ScenarioConfig& cfg, const Grid1D& grid, double eps);
State make_initial_state(const ScenarioConfig& cfg, const SimParams& params,
                         const Grid1D& grid);

struct EpsRun {
    double eps = 0;
    std::vector<DiagnosticsRow> rows;
    std::optional<DecayFit> fit;
    bool already_converged = false;
    double final_l1_n = 0, final_l1_p = 0;
    std::string csv_path;
};

struct CheckSummary {
    std::string name;
    long samples = 0;
    double sup_ratio = 0;
    long violations = 0;
};

struct RunReport {
    std::vector<EpsRun> runs;
    // eps vs sup over outputs of ||n_eps - n_0||_1 + ||p_eps - p_0||_1
    std::vector<std::pair<double, double>> limit_table;
    std::vector<CheckSummary> checks;
    long violation_count = 0;
};

// Runs every eps in the sweep (or the single configured eps), writes one
// diagnostics CSV per eps under cfg.output, fits decay rates, and builds the
// limit-comparison table when an eps = 0 run is present.
RunReport run_scenario(const ScenarioConfig& cfg);

// Monte-Carlo verification campaign: all functional-inequality checks with
// n_samples each; writes a summary CSV and JSON dumps for any violations.
RunReport run_verification(const ScenarioConfig& cfg, long n_samples);

std::string format_g17(double x);
void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRow>& rows);
std::vector<DiagnosticsRow> read_diagnostics_csv(const std::string& path);

} // namespace ddrec
