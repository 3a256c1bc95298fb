#include "fullerlab/cli.hpp"

#include "fullerlab/analysis.hpp"
#include "fullerlab/jsonio.hpp"
#include "fullerlab/problems.hpp"
#include "fullerlab/simulate.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fullerlab {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
}

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

// Matrix option: a JSON file of rational-string rows, or "I" / "I<n>" for an
// identity matrix.
QMatrix parse_matrix_spec(const std::string& spec) {
    if (!spec.empty() && spec[0] == 'I') {
        int n = 1;
        if (spec.size() > 1) n = std::stoi(spec.substr(1));
        return QMatrix::identity(n);
    }
    return qmatrix_from_json(Json::parse(read_file(spec)));
}

// Poly option: a file of polynomial text (also "@path"), or inline text.
Poly parse_poly_spec(const std::string& spec, int nvars) {
    if (!spec.empty() && spec[0] == '@') return Poly::from_text(read_file(spec.substr(1)), nvars);
    if (fs::exists(spec)) return Poly::from_text(read_file(spec), nvars);
    return Poly::from_text(spec, nvars);
}

struct ProblemOptions {
    std::string problem;
    std::string m1_spec, m2_spec;
    std::string t_spec, m_spec, q_spec, c_spec;
};

AffineSystem resolve_problem(const ProblemOptions& po, Json& config) {
    config["problem"] = po.problem;
    if (po.problem == "fuller-classic") return fuller_classic();
    if (po.problem == "time-optimal-di") return time_optimal_di();
    if (po.problem == "fuller-multi") {
        if (po.m1_spec.empty() || po.m2_spec.empty())
            throw std::invalid_argument("fuller-multi requires --m1 and --m2");
        QMatrix m1 = parse_matrix_spec(po.m1_spec);
        QMatrix m2 = parse_matrix_spec(po.m2_spec);
        config["m1"] = qmatrix_to_json(m1);
        config["m2"] = qmatrix_to_json(m2);
        return fuller_multi(m1, m2);
    }
    if (po.problem == "hamiltonian") {
        if (po.t_spec.empty() || po.m_spec.empty() || po.q_spec.empty() || po.c_spec.empty())
            throw std::invalid_argument("hamiltonian requires --t, --m, --q and --c");
        QMatrix t = parse_matrix_spec(po.t_spec);
        QMatrix m = parse_matrix_spec(po.m_spec);
        Poly q = parse_poly_spec(po.q_spec, t.rows);
        Poly c = parse_poly_spec(po.c_spec, t.rows);
        config["t"] = qmatrix_to_json(t);
        config["m"] = qmatrix_to_json(m);
        config["q"] = q.to_text();
        config["c"] = c.to_text();
        return hamiltonian_family(t, m, q, c);
    }
    // Anything else is a problem JSON path.
    AffineSystem sys = problem_from_json(Json::parse(read_file(po.problem)));
    config["problem_file"] = po.problem;
    return sys;
}

void add_problem_options(CLI::App* cmd, ProblemOptions& po) {
    cmd->add_option("problem", po.problem,
                    "fuller-classic | fuller-multi | hamiltonian | time-optimal-di | <problem.json>")
        ->required();
    cmd->add_option("--m1", po.m1_spec, "M1 matrix (JSON file, or I / I<n>)");
    cmd->add_option("--m2", po.m2_spec, "M2 matrix (JSON file, or I / I<n>)");
    cmd->add_option("--t", po.t_spec, "T matrix (JSON file, or I / I<n>)");
    cmd->add_option("--m", po.m_spec, "M matrix (JSON file, or I / I<n>)");
    cmd->add_option("--q", po.q_spec, "potential Q as polynomial text (or @file)");
    cmd->add_option("--c", po.c_spec, "cost c as polynomial text (or @file)");
}

int cmd_analyze(const ProblemOptions& po, uint64_t seed, const std::string& out_dir,
                const std::string& point_csv, double tau_rank, double tau_eig, int max_depth,
                int perturbations, double perturbation_magnitude) {
    Json problem_config;
    problem_config["command"] = "analyze";
    AffineSystem sys = resolve_problem(po, problem_config);

    AnalyzeOptions opts;
    opts.seed = seed;
    opts.tau_rank = tau_rank;
    opts.tau_eig = tau_eig;
    opts.max_depth = max_depth;
    opts.perturbations = perturbations;
    opts.perturbation_magnitude = perturbation_magnitude;
    if (!point_csv.empty()) opts.point = parse_doubles(point_csv);

    Json report = analysis_report(sys, opts);
    report["config"].update(problem_config);

    std::string text = report.dump(2) + "\n";
    if (out_dir.empty()) {
        std::cout << text;
    } else {
        write_file(fs::path(out_dir) / "analyze.json", text);
        std::cout << "certificate=" << report["certificate"]["verdict"].get<std::string>() << " -> "
                  << (fs::path(out_dir) / "analyze.json").string() << "\n";
    }
    return 0;
}

int cmd_simulate(const ProblemOptions& po, const std::string& mode, const std::string& z0_csv,
                 const std::string& p0_csv, double lambda, const std::string& x0_csv, double beta,
                 const std::vector<std::string>& laws, double horizon, SimOptions opts,
                 uint64_t seed, const std::string& out_dir) {
    Json config;
    config["command"] = "simulate";
    config["mode"] = mode;
    config["seed"] = seed;
    config["horizon"] = horizon;
    config["rel_tol"] = opts.rel_tol;
    config["abs_tol"] = opts.abs_tol;
    config["tol_event"] = opts.tol_event;
    config["zeno_floor"] = opts.zeno_floor;
    config["graze_slope"] = opts.graze_slope;
    config["target_ball"] = opts.target_ball;
    config["h_max"] = opts.h_max;

    AffineSystem sys = resolve_problem(po, config);

    Trajectory traj;
    if (mode == "extremal") {
        AugmentedSystem aug = augment(sys);
        std::vector<double> z0 = parse_doubles(z0_csv);
        std::vector<double> p0 = parse_doubles(p0_csv);
        if (z0.empty()) throw std::invalid_argument("extremal mode requires --z0 (augmented state, cost first)");
        if (p0.empty()) throw std::invalid_argument("extremal mode requires --p0 (state adjoint)");
        config["z0"] = z0;
        config["p0"] = p0;
        config["lambda"] = lambda;
        traj = integrate_extremal(aug, z0, p0, lambda, horizon, opts);
    } else if (mode == "feedback") {
        std::vector<double> x0 = parse_doubles(x0_csv);
        if (x0.empty()) throw std::invalid_argument("feedback mode requires --x0");
        config["x0"] = x0;
        FeedbackLaw law;
        if (!laws.empty()) {
            std::vector<Poly> surfaces;
            for (const auto& s : laws) surfaces.push_back(parse_poly_spec(s, sys.n));
            law = FeedbackLaw::polynomial(std::move(surfaces));
            config["law"] = laws;
        } else if (std::isfinite(beta)) {
            law = FeedbackLaw::fuller_curve(beta);
            config["beta"] = beta;
        } else {
            throw std::invalid_argument("feedback mode requires --beta or --law");
        }
        traj = simulate_feedback(sys, law, x0, horizon, opts);
    } else {
        throw std::invalid_argument("--mode must be extremal or feedback");
    }

    ChatterReport chatter = fit_chatter(traj);

    fs::path dir(out_dir.empty() ? "." : out_dir);
    {
        std::ostringstream os;
        write_trajectory_csv(os, traj);
        write_file(dir / "trajectory.csv", os.str());
    }
    {
        std::ostringstream os;
        write_events_csv(os, traj);
        write_file(dir / "events.csv", os.str());
    }
    Json cj = chatter_to_json(chatter);
    cj["config"] = config;
    write_file(dir / "chatter.json", cj.dump(2) + "\n");

    Json run;
    run["config"] = config;
    run["events"] = traj.events.size();
    run["grazing"] = traj.grazing_count;
    run["terminated_by"] = to_string(traj.terminated_by);
    run["final_time"] = traj.final_time;
    run["samples"] = traj.samples.size();
    if (mode == "extremal") run["max_abs_hamiltonian"] = traj.max_abs_hamiltonian;
    if (!traj.error_message.empty()) run["error"] = traj.error_message;
    write_file(dir / "run.json", run.dump(2) + "\n");

    std::ostringstream summary;
    summary << "events=" << traj.events.size() << " terminated_by=" << to_string(traj.terminated_by);
    for (const auto& ci : chatter.inputs) {
        if (ci.rho) {
            summary << " input" << ci.input_index << ": rho=" << *ci.rho << " fit_r2=" << ci.fit_r2
                    << (ci.accumulation ? " accumulation" : "");
        } else {
            summary << " input" << ci.input_index << ": " << ci.status;
        }
    }
    std::cout << summary.str() << "\n";

    if (traj.terminated_by == StopReason::error) {
        std::cerr << "error: integration failed: " << traj.error_message
                  << " (last valid time " << traj.final_time << ")\n";
        return 1;
    }
    return 0;
}

int cmd_chatter(const std::string& events_path, const std::string& out_path) {
    std::ifstream in(events_path);
    if (!in) throw std::invalid_argument("cannot open events file: " + events_path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("events file is empty");
    Trajectory traj;
    int max_input = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        SwitchEvent e;
        std::getline(ss, field, ',');
        e.t = std::stod(field);
        std::getline(ss, field, ',');
        e.input_index = std::stoi(field);
        std::getline(ss, field, ',');
        e.direction = std::stoi(field);
        if (std::getline(ss, field, ',')) e.phi_slope = std::stod(field);
        max_input = std::max(max_input, e.input_index);
        traj.events.push_back(e);
    }
    traj.input_dim = max_input + 1;

    ChatterReport rep = fit_chatter(traj);
    Json j = chatter_to_json(rep);
    Json config;
    config["command"] = "chatter";
    config["events_file"] = events_path;
    j["config"] = config;
    std::string text = j.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Singular-arc and chattering analysis for affine optimal-control systems"};
    app.require_subcommand(1);

    ProblemOptions apo, spo;
    uint64_t a_seed = 0, s_seed = 0;
    std::string a_out, a_point;
    double a_tau_rank = 1e-9, a_tau_eig = 1e-9;
    int a_max_depth = 12, a_pert = 8;
    double a_pert_mag = 1e-2;

    CLI::App* analyze = app.add_subcommand("analyze", "symbolic ladder, cone and certificate report");
    add_problem_options(analyze, apo);
    analyze->add_option("--seed", a_seed, "seed for sampled perturbation points");
    analyze->add_option("--out", a_out, "output directory (default: report to stdout)");
    analyze->add_option("--point", a_point, "candidate singular point, comma-separated (default origin)");
    analyze->add_option("--tau-rank", a_tau_rank, "relative rank tolerance")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--tau-eig", a_tau_eig, "eigenvalue tolerance for the GLC test")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--max-depth", a_max_depth, "derivative ladder depth cap")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--perturbations", a_pert, "number of sampled rank points");
    analyze->add_option("--perturbation-magnitude", a_pert_mag, "sampled point magnitude");

    std::string s_mode = "feedback", s_z0, s_p0, s_x0, s_out;
    double s_lambda = 1.0, s_beta = std::nan(""), s_horizon = 10.0;
    std::vector<std::string> s_laws;
    SimOptions sopts;

    CLI::App* simulate = app.add_subcommand("simulate", "integrate an extremal or closed-loop run");
    add_problem_options(simulate, spo);
    simulate->add_option("--mode", s_mode, "extremal | feedback");
    simulate->add_option("--z0", s_z0, "extremal initial augmented state (cost first), comma-separated");
    simulate->add_option("--p0", s_p0, "extremal initial state adjoint, comma-separated");
    simulate->add_option("--lambda", s_lambda, "cost multiplier (1 normal, 0 abnormal)");
    simulate->add_option("--x0", s_x0, "feedback initial state, comma-separated");
    simulate->add_option("--beta", s_beta, "feedback switching-curve parameter: s = x + beta*v*|v|");
    simulate->add_option("--law", s_laws, "feedback switching surface as polynomial text (one per input)");
    simulate->add_option("--horizon", s_horizon, "integration horizon")->check(CLI::PositiveNumber);
    simulate->add_option("--tol-event", sopts.tol_event, "event time localization tolerance")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--zeno-floor", sopts.zeno_floor, "inter-switch interval that stops the run")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--graze-slope", sopts.graze_slope, "slope below which contacts are grazing")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--target-ball", sopts.target_ball, "feedback: stop at state norm below this");
    simulate->add_option("--rel-tol", sopts.rel_tol, "integrator relative tolerance")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--abs-tol", sopts.abs_tol, "integrator absolute tolerance")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--h-max", sopts.h_max, "maximum step size")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", s_seed, "seed recorded in outputs");
    simulate->add_option("--out", s_out, "output directory (default: current directory)");

    std::string c_events, c_out;
    CLI::App* chatter = app.add_subcommand("chatter", "fit switch-interval geometry from an events CSV");
    chatter->add_option("--events", c_events, "events CSV (t,input,direction,slope)")->required();
    chatter->add_option("--out", c_out, "output file (default: stdout)");

    std::vector<const char*> argv;
    argv.push_back("fullerlab");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (analyze->parsed())
            return cmd_analyze(apo, a_seed, a_out, a_point, a_tau_rank, a_tau_eig, a_max_depth,
                               a_pert, a_pert_mag);
        if (simulate->parsed())
            return cmd_simulate(spo, s_mode, s_z0, s_p0, s_lambda, s_x0, s_beta, s_laws, s_horizon,
                                sopts, s_seed, s_out);
        if (chatter->parsed()) return cmd_chatter(c_events, c_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace fullerlab
