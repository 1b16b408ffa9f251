#include "ddrec/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

namespace ddrec {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& path, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(path + ": not a number: '" + v + "'");
    }
}

long parse_long(const std::string& path, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(path + ": not an integer: '" + v + "'");
    }
}

void require_positive(const std::string& path, double x) {
    if (!(x > 0.0)) throw ConfigError(path + ": must be > 0");
}

std::vector<double> parse_list(const std::string& path, const std::string& v) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        std::istringstream sub(item);
        std::string tok;
        while (sub >> tok) out.push_back(parse_double(path, tok));
    }
    if (out.empty()) throw ConfigError(path + ": empty list");
    return out;
}

} // namespace

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig cfg;
    std::string section;
    bool saw_params = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"params", "grid", "stepper", "initial", "potential", "sweep"};
            if (std::find_if(std::begin(known), std::end(known),
                             [&](const char* k) { return section == k; }) == std::end(known))
                throw ConfigError(section + ": unknown section");
            if (section == "params") saw_params = true;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const std::string path = section + "." + key;
        if (section.empty())
            throw ConfigError(key + ": key outside any section");

        if (section == "params") {
            if (key == "tau_n") { cfg.tau_n = parse_double(path, val); require_positive(path, cfg.tau_n); }
            else if (key == "tau_p") { cfg.tau_p = parse_double(path, val); require_positive(path, cfg.tau_p); }
            else if (key == "n0") { cfg.n0 = parse_double(path, val); require_positive(path, cfg.n0); }
            else if (key == "p0") { cfg.p0 = parse_double(path, val); require_positive(path, cfg.p0); }
            else if (key == "eps") {
                cfg.eps = parse_double(path, val);
                if (cfg.eps < 0.0) throw ConfigError(path + ": must be >= 0");
            } else if (key == "eps0") { cfg.eps0 = parse_double(path, val); require_positive(path, cfg.eps0); }
            else throw ConfigError(path + ": unknown key");
        } else if (section == "grid") {
            if (key == "n_cells") {
                cfg.n_cells = static_cast<int>(parse_long(path, val));
                if (cfg.n_cells < 2) throw ConfigError(path + ": must be >= 2");
            } else throw ConfigError(path + ": unknown key");
        } else if (section == "stepper") {
            if (key == "dt") { cfg.stepper.dt = parse_double(path, val); require_positive(path, cfg.stepper.dt); }
            else if (key == "t_end") {
                cfg.stepper.t_end = parse_double(path, val);
                if (cfg.stepper.t_end < 0.0) throw ConfigError(path + ": must be >= 0");
            } else if (key == "output_every") {
                cfg.stepper.output_every = static_cast<int>(parse_long(path, val));
                if (cfg.stepper.output_every < 1) throw ConfigError(path + ": must be >= 1");
            } else if (key == "linear_tol") {
                cfg.stepper.linear_tol = parse_double(path, val);
                require_positive(path, cfg.stepper.linear_tol);
            } else throw ConfigError(path + ": unknown key");
        } else if (section == "initial") {
            if (key == "family") {
                static const char* fams[] = {"constant", "step", "gaussian_bump", "zero_patch"};
                if (std::find_if(std::begin(fams), std::end(fams),
                                 [&](const char* f) { return val == f; }) == std::end(fams))
                    throw ConfigError(path + ": unknown initial family '" + val + "'");
                cfg.initial_family = val;
            } else if (key == "amp_n") { cfg.amp_n = parse_double(path, val); require_positive(path, cfg.amp_n); }
            else if (key == "amp_p") { cfg.amp_p = parse_double(path, val); require_positive(path, cfg.amp_p); }
            else if (key == "ntr") {
                if (val == "eq") {
                    cfg.ntr_from_quasi_eq = true;
                } else {
                    cfg.ntr0 = parse_double(path, val);
                    if (cfg.ntr0 < 0.0 || cfg.ntr0 > 1.0) throw ConfigError(path + ": must be in [0,1]");
                    cfg.ntr_explicit = true;
                }
            } else throw ConfigError(path + ": unknown key");
        } else if (section == "potential") {
            if (key == "family") {
                try {
                    cfg.potential = potential_family_from_string(val);
                } catch (const std::exception&) {
                    throw ConfigError(path + ": unknown potential family '" + val + "'");
                }
            } else if (key == "amp_n") cfg.pot_amp_n = parse_double(path, val);
            else if (key == "amp_p") cfg.pot_amp_p = parse_double(path, val);
            else throw ConfigError(path + ": unknown key");
        } else if (section == "sweep") {
            if (key == "eps") cfg.eps_sweep = parse_list(path, val);
            else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(path, val));
            else if (key == "output") cfg.output = val;
            else throw ConfigError(path + ": unknown key");
        }
    }
    if (!saw_params) throw ConfigError("params: missing required section");
    for (double e : cfg.eps_sweep) {
        if (e < 0.0) throw ConfigError("sweep.eps: must be >= 0");
        if (e > cfg.eps0) throw ConfigError("sweep.eps: exceeds params.eps0");
    }
    if (cfg.eps > cfg.eps0) throw ConfigError("params.eps: exceeds params.eps0");
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

SimParams make_params(const ScenarioConfig& cfg, const Grid1D& grid, double eps) {
    SimParams p;
    p.tau_n = cfg.tau_n;
    p.tau_p = cfg.tau_p;
    p.n0 = cfg.n0;
    p.p0 = cfg.p0;
    p.eps = eps;
    p.eps0 = cfg.eps0;
    p.potentials = make_potentials(grid, cfg.potential, cfg.pot_amp_n, cfg.pot_amp_p);
    p.validate();
    return p;
}

State make_initial_state(const ScenarioConfig& cfg, const SimParams& params,
                         const Grid1D& grid) {
    State st;
    st.t = 0.0;
    const std::string& fam = cfg.initial_family;
    if (fam == "constant") {
        st.n = Field(grid, cfg.amp_n);
        st.p = Field(grid, cfg.amp_p);
        st.ntr = Field(grid, cfg.ntr0);
    } else if (fam == "step") {
        st.n = Field::from_fn(grid, [&](double x) { return cfg.amp_n * (x < 0.5 ? 1.5 : 0.5); });
        st.p = Field::from_fn(grid, [&](double x) { return cfg.amp_p * (x < 0.5 ? 0.5 : 1.5); });
        st.ntr = Field(grid, cfg.ntr0);
    } else if (fam == "gaussian_bump") {
        st.n = Field::from_fn(grid, [&](double x) {
            return cfg.amp_n * (0.1 + std::exp(-50.0 * (x - 0.35) * (x - 0.35)));
        });
        st.p = Field::from_fn(grid, [&](double x) {
            return cfg.amp_p * (0.1 + std::exp(-50.0 * (x - 0.65) * (x - 0.65)));
        });
        st.ntr = Field(grid, cfg.ntr0);
    } else if (fam == "zero_patch") {
        st.n = Field::from_fn(grid, [&](double x) { return x < 0.5 ? cfg.amp_n : 0.0; });
        st.p = Field::from_fn(grid, [&](double x) { return x >= 0.5 ? cfg.amp_p : 0.0; });
        st.ntr = Field::from_fn(grid, [](double x) {
            if (x < 0.2) return 1.0;
            if (x > 0.8) return 0.0;
            return 0.5;
        });
    } else {
        throw ConfigError("initial.family: unknown initial family '" + fam + "'");
    }
    // default trap start is the quasi-equilibrium manifold (continuous
    // comparison with the eps = 0 branch); zero_patch keeps its own profile
    const bool want_eq =
        cfg.ntr_from_quasi_eq || (!cfg.ntr_explicit && fam != "zero_patch");
    if (want_eq) st.ntr = ntr_quasi_equilibrium(st.n, st.p, params);
    return st;
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "t,nbar,pbar,ntrbar,mass,E,D,E_rel,l1_n,l1_p,l1_ntr,ckp,maxn,maxp,singular_flag\n";
    for (const auto& r : rows) {
        out << format_g17(r.t) << ',' << format_g17(r.nbar) << ',' << format_g17(r.pbar)
            << ',' << format_g17(r.ntrbar) << ',' << format_g17(r.mass) << ','
            << format_g17(r.E) << ',' << format_g17(r.D) << ',' << format_g17(r.E_rel)
            << ',' << format_g17(r.l1_n) << ',' << format_g17(r.l1_p) << ','
            << format_g17(r.l1_ntr) << ',' << format_g17(r.ckp) << ','
            << format_g17(r.maxn) << ',' << format_g17(r.maxp) << ','
            << (r.singular ? 1 : 0) << '\n';
    }
}

std::vector<DiagnosticsRow> read_diagnostics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (trim(line) != "t,nbar,pbar,ntrbar,mass,E,D,E_rel,l1_n,l1_p,l1_ntr,ckp,maxn,maxp,singular_flag")
        throw std::runtime_error(path + ": unexpected CSV header");
    std::vector<DiagnosticsRow> rows;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        double v[15];
        for (int i = 0; i < 15; ++i) {
            if (!std::getline(ls, cell, ','))
                throw std::runtime_error(path + ": short row");
            v[i] = parse_double(path, trim(cell));
        }
        DiagnosticsRow r;
        r.t = v[0]; r.nbar = v[1]; r.pbar = v[2]; r.ntrbar = v[3]; r.mass = v[4];
        r.E = v[5]; r.D = v[6]; r.E_rel = v[7]; r.l1_n = v[8]; r.l1_p = v[9];
        r.l1_ntr = v[10]; r.ckp = v[11]; r.maxn = v[12]; r.maxp = v[13];
        r.singular = v[14] != 0.0;
        rows.push_back(r);
    }
    return rows;
}

namespace {

std::string eps_token(double eps) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", eps);
    return buf;
}

nlohmann::json state_to_json(const State& st) {
    return {{"t", st.t},
            {"n", st.n.values},
            {"p", st.p.values},
            {"ntr", st.ntr.values}};
}

void dump_violation(const std::string& dir, const std::string& tag, long index,
                    const nlohmann::json& doc) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir + "/violation_" + tag + "_" + std::to_string(index) + ".json");
    out << doc.dump(2) << '\n';
}

struct EpsRunData {
    EpsRun run;
    std::vector<Field> n_frames, p_frames;
    long violations = 0;
};

EpsRunData run_one_eps(const ScenarioConfig& cfg, const Grid1D& grid, double eps) {
    EpsRunData data;
    data.run.eps = eps;
    const SimParams params = make_params(cfg, grid, eps);
    const State initial = make_initial_state(cfg, params, grid);
    const double mass0 = state_mass(initial, params);
    const EquilibriumState eq = solve_equilibrium(params, mass0);
    const double E0 = eps > 0 ? entropy(initial, params)
                              : entropy_srh(initial.n, initial.p, params);
    const double M1 = l1_mass_cap(params, E0);

    long dumped = 0;
    double prev_E = 0;
    bool have_prev = false;
    const auto observe = [&](const State& st, int /*step*/) {
        DiagnosticsRow row = make_diagnostics_row(st, eq, params);
        std::vector<std::string> viols;
        if (std::abs(row.mass - mass0) > 1e-10) viols.push_back("mass drift");
        if (min_value(st.n) < 0.0 || min_value(st.p) < 0.0) viols.push_back("negative density");
        if (eps > 0 && (min_value(st.ntr) < 0.0 || max_value(st.ntr) > 1.0))
            viols.push_back("trap occupancy out of [0,1]");
        if (have_prev && row.E > prev_E + 1e-10) viols.push_back("entropy increase");
        if (row.E_rel < row.ckp - 1e-10) viols.push_back("ckp bound violated");
        if (row.nbar > M1 + 1e-9 || row.pbar > M1 + 1e-9) viols.push_back("mass cap exceeded");
        prev_E = row.E;
        have_prev = true;
        if (!viols.empty()) {
            data.violations += static_cast<long>(viols.size());
            if (dumped < 3) {
                dump_violation(cfg.output, "eps_" + eps_token(eps), dumped++,
                               {{"eps", eps}, {"kinds", viols}, {"row_t", row.t},
                                {"state", state_to_json(st)}});
            }
        }
        data.run.rows.push_back(row);
        data.n_frames.push_back(st.n);
        data.p_frames.push_back(st.p);
    };

    simulate(initial, params, cfg.stepper, observe);

    if (!data.run.rows.empty()) {
        data.run.final_l1_n = data.run.rows.back().l1_n;
        data.run.final_l1_p = data.run.rows.back().l1_p;
        data.run.already_converged = data.run.rows.front().E_rel < 1e-10;
    }
    data.run.fit = fit_decay_rate(data.run.rows);
    std::filesystem::create_directories(cfg.output);
    data.run.csv_path = cfg.output + "/eps_" + eps_token(eps) + ".csv";
    write_diagnostics_csv(data.run.csv_path, data.run.rows);
    return data;
}

} // namespace

RunReport run_scenario(const ScenarioConfig& cfg) {
    const Grid1D grid = build_grid(cfg.n_cells);
    std::vector<double> eps_list = cfg.eps_sweep;
    if (eps_list.empty()) eps_list.push_back(cfg.eps);

    // independent trajectories: one task per eps
    std::vector<std::future<EpsRunData>> futs;
    futs.reserve(eps_list.size());
    for (double eps : eps_list)
        futs.push_back(std::async(std::launch::async,
                                  [&cfg, &grid, eps] { return run_one_eps(cfg, grid, eps); }));

    RunReport report;
    std::vector<EpsRunData> datas;
    for (auto& f : futs) datas.push_back(f.get());
    for (auto& d : datas) {
        report.violation_count += d.violations;
        report.runs.push_back(d.run);
    }

    const auto zero = std::find_if(datas.begin(), datas.end(),
                                   [](const EpsRunData& d) { return d.run.eps == 0.0; });
    if (zero != datas.end()) {
        for (const auto& d : datas) {
            if (d.run.eps == 0.0) continue;
            const std::size_t m = std::min(d.n_frames.size(), zero->n_frames.size());
            double sup = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                sup = std::max(sup, l1_distance(d.n_frames[k], zero->n_frames[k]) +
                                        l1_distance(d.p_frames[k], zero->p_frames[k]));
            }
            report.limit_table.emplace_back(d.run.eps, sup);
        }
    }
    return report;
}

namespace {

struct ViolationSink {
    const ScenarioConfig& cfg;
    std::string tag;
    long count = 0;
    long dumped = 0;
    void record(std::uint64_t seed, const nlohmann::json& extra) {
        ++count;
        if (dumped < 3) {
            nlohmann::json doc = extra;
            doc["seed"] = seed;
            doc["check"] = tag;
            dump_violation(cfg.output, tag, dumped++, doc);
        }
    }
};

// lhs > rhs beyond roundoff slack
bool exceeds(double lhs, double rhs) {
    return lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs));
}

Field random_positive_field(const Grid1D& grid, Rng& rng, double lo, double hi) {
    Field f(grid);
    for (int i = 0; i < grid.n_cells; ++i) f[i] = rng.log_uniform(lo, hi);
    return f;
}

} // namespace

RunReport run_verification(const ScenarioConfig& cfg, long n_samples) {
    if (n_samples < 1) throw ConfigError("verify: n_samples must be >= 1");
    const Grid1D grid = build_grid(cfg.n_cells);
    std::vector<double> eps_list = cfg.eps_sweep;
    if (eps_list.empty()) eps_list.push_back(cfg.eps);

    RunReport report;

    // eep_ratio: one supremum per eps in the sweep (the eps-uniformity table)
    for (double eps : eps_list) {
        if (eps <= 0.0) continue;  // the EEP constant is an eps > 0 statement
        const SimParams params = make_params(cfg, grid, eps);
        const State init = make_initial_state(cfg, params, grid);
        const double M = state_mass(init, params);
        const EquilibriumState eq = solve_equilibrium(params, M);
        const double M1 = l1_mass_cap(params, entropy(init, params));
        ViolationSink sink{cfg, "eep_ratio_eps_" + eps_token(eps)};
        CheckSummary cs{sink.tag, 0, 0.0, 0};
        for (long i = 0; i < n_samples; ++i) {
            const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
            const AdmissibleState adm = sample_admissible(params, grid, M, M1, seed);
            const double erel = relative_entropy(adm.state, eq, params);
            const double d = entropy_production(adm.state, params).value;
            ++cs.samples;
            if (d <= 1e-14) {
                if (erel > 1e-10)
                    sink.record(seed, {{"E_rel", erel}, {"D", d}, {"state", state_to_json(adm.state)}});
                continue;
            }
            cs.sup_ratio = std::max(cs.sup_ratio, erel / d);
        }
        cs.violations = sink.count;
        report.checks.push_back(cs);
    }

    const double eps_main = eps_list.front() > 0.0 ? eps_list.front() : 0.1;
    const SimParams params = make_params(cfg, grid, eps_main);
    const State init = make_initial_state(cfg, params, grid);
    const double M = state_mass(init, params);
    const EquilibriumState eq = solve_equilibrium(params, M);
    const double M1 = l1_mass_cap(params, entropy(init, params));
    const double munbar = cell_average(params.potentials.mu_n);
    const double mupbar = cell_average(params.potentials.mu_p);
    const double cap_a = M1 / (params.n0 * min_value(params.potentials.mu_n));
    const double cap_b = M1 / (params.p0 * min_value(params.potentials.mu_p));

    {  // homogeneous four-variable inequality
        ViolationSink sink{cfg, "homogeneous_eep"};
        CheckSummary cs{"homogeneous_eep", 0, 0.0, 0};
        Rng rng(cfg.seed ^ 0x686f6dull);
        for (long i = 0; i < n_samples; ++i) {
            const double ntr = rng.uniform(1e-3, 1.0 - 1e-3);
            const double c = std::sqrt(ntr), d = std::sqrt(1.0 - ntr);
            const double b = rng.log_uniform(1e-3, 10.0);
            const double a2 =
                (M + params.p0 * mupbar * b * b - params.eps * ntr) / (params.n0 * munbar);
            if (a2 <= 0.0) continue;
            ++cs.samples;
            const CheckPair pr = homogeneous_eep_check(std::sqrt(a2), b, c, d, params, M);
            if (pr.rhs < 1e-14) {
                if (pr.lhs > 1e-10)
                    sink.record(cfg.seed + i, {{"lhs", pr.lhs}, {"rhs", pr.rhs}});
            } else {
                cs.sup_ratio = std::max(cs.sup_ratio, pr.lhs / pr.rhs);
            }
        }
        cs.violations = sink.count;
        report.checks.push_back(cs);
    }

    {  // inhomogeneous (field) version
        ViolationSink sink{cfg, "inhomogeneous_eep"};
        CheckSummary cs{"inhomogeneous_eep", 0, 0.0, 0};
        Rng rng(cfg.seed ^ 0x696e68ull);
        for (long i = 0; i < n_samples; ++i) {
            QuadState q;
            q.c = Field(grid);
            q.d = Field(grid);
            double c2bar = 0.0;
            for (int k = 0; k < grid.n_cells; ++k) {
                const double ntr = rng.uniform(1e-3, 1.0 - 1e-3);
                q.c[k] = std::sqrt(ntr);
                q.d[k] = std::sqrt(1.0 - ntr);
                c2bar += ntr;
            }
            c2bar *= grid.h;
            q.b = random_positive_field(grid, rng, 1e-2, 1.0);
            double B = 0.0;
            for (int k = 0; k < grid.n_cells; ++k)
                B += params.potentials.mu_p[k] * q.b[k] * q.b[k];
            B *= grid.h;
            double T = M + params.p0 * B - params.eps * c2bar;
            if (T <= 0.0) {
                const double scale =
                    std::sqrt((params.eps * c2bar - M + 1.0) / (params.p0 * B));
                for (int k = 0; k < grid.n_cells; ++k) q.b[k] *= scale;
                B *= scale * scale;
                T = 1.0;
            }
            q.a = random_positive_field(grid, rng, 1e-2, 1.0);
            double A = 0.0;
            for (int k = 0; k < grid.n_cells; ++k)
                A += params.potentials.mu_n[k] * q.a[k] * q.a[k];
            A *= grid.h;
            const double ka = std::sqrt(T / (params.n0 * A));
            for (int k = 0; k < grid.n_cells; ++k) q.a[k] *= ka;
            double a2bar = 0.0, b2bar = 0.0;
            for (int k = 0; k < grid.n_cells; ++k) {
                a2bar += q.a[k] * q.a[k];
                b2bar += q.b[k] * q.b[k];
            }
            a2bar *= grid.h;
            b2bar *= grid.h;
            if (a2bar > cap_a || b2bar > cap_b) continue;
            ++cs.samples;
            const CheckPair pr = inhomogeneous_eep_check(q, params, M);
            if (pr.rhs < 1e-14) {
                if (pr.lhs > 1e-10)
                    sink.record(cfg.seed + i, {{"lhs", pr.lhs}, {"rhs", pr.rhs}});
            } else {
                cs.sup_ratio = std::max(cs.sup_ratio, pr.lhs / pr.rhs);
            }
        }
        cs.violations = sink.count;
        report.checks.push_back(cs);
    }

    {  // indirect diffusion transfer, exact factor 4
        ViolationSink sink{cfg, "indirect_diffusion"};
        CheckSummary cs{"indirect_diffusion", 0, 0.0, 0};
        Rng rng(cfg.seed ^ 0x696464ull);
        for (long i = 0; i < n_samples; ++i) {
            QuadState q;
            q.c = Field(grid);
            q.d = Field(grid);
            for (int k = 0; k < grid.n_cells; ++k) {
                const double ntr = rng.uniform(0.0, 1.0);
                q.c[k] = std::sqrt(ntr);
                q.d[k] = std::sqrt(1.0 - ntr);
            }
            q.a = random_positive_field(grid, rng, 1e-3, 10.0);
            q.b = random_positive_field(grid, rng, 1e-3, 10.0);
            ++cs.samples;
            const DiffusionTransferResult r = indirect_diffusion_check(q);
            cs.sup_ratio = std::max({cs.sup_ratio,
                                     r.rhs_c > 0 ? r.lhs_c / r.rhs_c : 0.0,
                                     r.rhs_d > 0 ? r.lhs_d / r.rhs_d : 0.0});
            if (exceeds(r.lhs_c, r.rhs_c) || exceeds(r.lhs_d, r.rhs_d))
                sink.record(cfg.seed + i,
                            {{"lhs_c", r.lhs_c}, {"rhs_c", r.rhs_c},
                             {"lhs_d", r.lhs_d}, {"rhs_d", r.rhs_d}});
        }
        cs.violations = sink.count;
        report.checks.push_back(cs);
    }

    {  // flux lemma
        ViolationSink sink{cfg, "flux_lemma"};
        CheckSummary cs{"flux_lemma", 0, 0.0, 0};
        Rng rng(cfg.seed ^ 0x666c78ull);
        for (long i = 0; i < n_samples; ++i) {
            Field f = random_positive_field(grid, rng, 1e-3, 10.0);
            for (int k = 0; k < grid.n_cells; ++k)
                if (rng.uniform() < 0.05) f[k] = 0.0;
            const Field g = random_positive_field(grid, rng, 0.1, 10.0);
            ++cs.samples;
            const CheckPair pr = flux_lemma_check(f, g);
            if (pr.rhs < 1e-14) {
                if (pr.lhs > 1e-10)
                    sink.record(cfg.seed + i, {{"lhs", pr.lhs}, {"rhs", pr.rhs}});
            } else {
                cs.sup_ratio = std::max(cs.sup_ratio, pr.lhs / pr.rhs);
            }
        }
        cs.violations = sink.count;
        report.checks.push_back(cs);
    }

    {  // log-Sobolev ratio
        ViolationSink sink{cfg, "logsob_ratio"};
        CheckSummary cs{"logsob_ratio", 0, 0.0, 0};
        Rng rng(cfg.seed ^ 0x6c6f67ull);
        for (long i = 0; i < n_samples; ++i) {
            const Field n = random_positive_field(grid, rng, 1e-2, 1e2);
            ++cs.samples;
            const CheckPair pr = logsob_ratio_check(n, params);
            if (pr.lhs < -1e-12)
                sink.record(cfg.seed + i, {{"lhs", pr.lhs}, {"rhs", pr.rhs}});
            if (pr.rhs > 1e-14)
                cs.sup_ratio = std::max(cs.sup_ratio, pr.lhs / pr.rhs);
        }
        cs.violations = sink.count;
        report.checks.push_back(cs);
    }

    {  // reaction domination, exact factor 1
        ViolationSink sink{cfg, "reaction_domination"};
        CheckSummary cs{"reaction_domination", 0, 0.0, 0};
        for (long i = 0; i < n_samples; ++i) {
            const std::uint64_t seed = cfg.seed + 0x72646f6dull + static_cast<std::uint64_t>(i);
            const AdmissibleState adm = sample_admissible(params, grid, M, M1, seed);
            ++cs.samples;
            const ReactionDominationResult r = reaction_domination_check(adm, params);
            cs.sup_ratio = std::max({cs.sup_ratio,
                                     r.n_side.rhs > 0 ? r.n_side.lhs / r.n_side.rhs : 0.0,
                                     r.p_side.rhs > 0 ? r.p_side.lhs / r.p_side.rhs : 0.0});
            if (exceeds(r.n_side.lhs, r.n_side.rhs) || exceeds(r.p_side.lhs, r.p_side.rhs))
                sink.record(seed, {{"n_lhs", r.n_side.lhs}, {"n_rhs", r.n_side.rhs},
                                   {"p_lhs", r.p_side.lhs}, {"p_rhs", r.p_side.rhs},
                                   {"state", state_to_json(adm.state)}});
        }
        cs.violations = sink.count;
        report.checks.push_back(cs);
    }

    {  // averaged conservation identity
        ViolationSink sink{cfg, "mass_identity"};
        CheckSummary cs{"mass_identity", 0, 0.0, 0};
        for (long i = 0; i < n_samples; ++i) {
            const std::uint64_t seed = cfg.seed + 0x6d617373ull + static_cast<std::uint64_t>(i);
            const AdmissibleState adm = sample_admissible(params, grid, M, M1, seed);
            ++cs.samples;
            const double res = std::abs(mass_identity_check(adm, eq, params));
            cs.sup_ratio = std::max(cs.sup_ratio, res);
            if (res > 1e-10)
                sink.record(seed, {{"residual", res}, {"state", state_to_json(adm.state)}});
        }
        cs.violations = sink.count;
        report.checks.push_back(cs);
    }

    for (const auto& c : report.checks) report.violation_count += c.violations;

    std::filesystem::create_directories(cfg.output);
    std::ofstream out(cfg.output + "/verification.csv");
    out << "check,samples,sup_ratio,violations\n";
    for (const auto& c : report.checks)
        out << c.name << ',' << c.samples << ',' << format_g17(c.sup_ratio) << ','
            << c.violations << '\n';
    return report;
}

} // namespace ddrec
