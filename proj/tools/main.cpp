// Command-line front end: equilibrium, simulate, sweep, verify, fit.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>

#include "ddrec/scenario.hpp"

using nlohmann::json;

namespace {

// 0 = ok, 1 = config error, 2 = solver error, 3 = invariant violations
constexpr int kOk = 0, kConfigError = 1, kSolverError = 2, kViolations = 3;

json equilibrium_json(const ddrec::EquilibriumState& eq, const ddrec::SimParams& params,
                      double M) {
    const auto bounds = ddrec::equilibrium_bounds(params, M);
    return {{"n_star", eq.n_star},
            {"p_star", eq.p_star},
            {"ntr_inf", eq.ntr_inf},
            {"M", eq.M},
            {"alpha", bounds.alpha},
            {"beta", bounds.beta}};
}

json fit_json(const std::optional<ddrec::DecayFit>& fit) {
    if (!fit) return {{"status", "window too short"}};
    return {{"K", fit->K}, {"r2", fit->r2}, {"t_lo", fit->t_lo},
            {"t_hi", fit->t_hi}, {"points", fit->points}};
}

json report_json(const ddrec::RunReport& report) {
    json runs = json::array();
    for (const auto& r : report.runs) {
        json jr = {{"eps", r.eps},
                   {"outputs", r.rows.size()},
                   {"final_l1_n", r.final_l1_n},
                   {"final_l1_p", r.final_l1_p},
                   {"already_converged", r.already_converged},
                   {"csv", r.csv_path},
                   {"fit", fit_json(r.fit)}};
        runs.push_back(jr);
    }
    json limit = json::array();
    for (const auto& [eps, gap] : report.limit_table)
        limit.push_back({{"eps", eps}, {"sup_l1_gap_to_srh", gap}});
    json checks = json::array();
    for (const auto& c : report.checks)
        checks.push_back({{"check", c.name}, {"samples", c.samples},
                          {"sup_ratio", c.sup_ratio}, {"violations", c.violations}});
    return {{"runs", runs}, {"limit_table", limit}, {"checks", checks},
            {"violations", report.violation_count}};
}

int finish(const ddrec::RunReport& report) {
    std::cout << report_json(report).dump(2) << '\n';
    return report.violation_count > 0 ? kViolations : kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Drift-diffusion-recombination laboratory"};
    app.require_subcommand(1);

    std::string config_path, csv_path;
    long n_samples = 1000;
    double eq_M = 0.0;

    auto* eq_cmd = app.add_subcommand("equilibrium", "Solve the stationary state, print JSON");
    eq_cmd->add_option("config", config_path, "Scenario config (defaults used if omitted)");
    eq_cmd->add_option("--M", eq_M, "Conserved charge (overrides the initial data)");

    auto* sim_cmd = app.add_subcommand("simulate", "Run one scenario at the configured eps");
    sim_cmd->add_option("config", config_path, "Scenario config")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "Run the configured eps sweep");
    sweep_cmd->add_option("config", config_path, "Scenario config")->required();

    auto* verify_cmd = app.add_subcommand("verify", "Monte-Carlo inequality verification");
    verify_cmd->add_option("config", config_path, "Scenario config")->required();
    verify_cmd->add_option("--samples", n_samples, "Samples per check")->check(CLI::PositiveNumber);

    auto* fit_cmd = app.add_subcommand("fit", "Fit a decay rate to a diagnostics CSV");
    fit_cmd->add_option("csv", csv_path, "Diagnostics CSV file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (eq_cmd->parsed()) {
            ddrec::ScenarioConfig cfg;
            if (!config_path.empty()) cfg = ddrec::load_config(config_path);
            const ddrec::Grid1D grid = ddrec::build_grid(cfg.n_cells);
            const ddrec::SimParams params = ddrec::make_params(cfg, grid, cfg.eps);
            double M = eq_M;
            if (eq_cmd->count("--M") == 0 && !config_path.empty()) {
                const ddrec::State init = ddrec::make_initial_state(cfg, params, grid);
                M = ddrec::state_mass(init, params);
            }
            const auto eq = ddrec::solve_equilibrium(params, M);
            std::cout << equilibrium_json(eq, params, M).dump(2) << '\n';
            return kOk;
        }
        if (sim_cmd->parsed() || sweep_cmd->parsed()) {
            ddrec::ScenarioConfig cfg = ddrec::load_config(config_path);
            if (sim_cmd->parsed()) cfg.eps_sweep.clear();
            return finish(ddrec::run_scenario(cfg));
        }
        if (verify_cmd->parsed()) {
            ddrec::ScenarioConfig cfg = ddrec::load_config(config_path);
            return finish(ddrec::run_verification(cfg, n_samples));
        }
        if (fit_cmd->parsed()) {
            const auto rows = ddrec::read_diagnostics_csv(csv_path);
            std::cout << fit_json(ddrec::fit_decay_rate(rows)).dump(2) << '\n';
            return kOk;
        }
    } catch (const ddrec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSolverError;
    }
    return kOk;
}
