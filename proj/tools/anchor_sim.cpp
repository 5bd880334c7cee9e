// anchor-sim: batch trials, planning, shell fitting and trace replay.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "anchor/harness.hpp"

using namespace anchor;

namespace {

constexpr int kOk = 0;
constexpr int kCellFailure = 1;
constexpr int kConfigError = 2;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct RunArgs {
    std::string scenario;
    std::string level = "all";
    std::string ablation = "full";
    int trials = 20;
    std::uint64_t seed = 0;
    std::string out;
    std::string trace_dir;
    std::string shell;
    unsigned threads = 0;
};

int cmd_run(const RunArgs& a) {
    BatchConfig cfg;
    try {
        cfg.scenarios = discover_scenarios(a.scenario);
        if (a.level == "all") {
            cfg.levels.clear();
            for (const ScenarioEntry& e : cfg.scenarios) {
                if (std::find(cfg.levels.begin(), cfg.levels.end(), e.scenario.level) == cfg.levels.end()) {
                    cfg.levels.push_back(e.scenario.level);
                }
            }
            std::sort(cfg.levels.begin(), cfg.levels.end());
        } else {
            cfg.levels = {std::stoi(a.level)};
        }
        if (a.ablation == "all") {
            cfg.ablations = {Ablation::Full, Ablation::NoAlign, Ablation::NoRecovery, Ablation::OpenLoop};
        } else {
            cfg.ablations = {*ablation_from_name(a.ablation)};
        }
        cfg.shell = a.shell.empty() ? default_shell() : load_shell(a.shell);
    } catch (const std::exception& e) {
        std::cerr << "anchor-sim: " << e.what() << '\n';
        return kConfigError;
    }
    cfg.trials = a.trials;
    cfg.base_seed = a.seed;
    cfg.trace_dir = a.trace_dir;
    cfg.threads = a.threads;
    const BatchReport report = run_batch(cfg);
    std::ofstream csv(a.out);
    if (!csv) {
        std::cerr << "anchor-sim: cannot write " << a.out << '\n';
        return kConfigError;
    }
    write_csv(csv, report);
    write_table(std::cout, report);
    for (const CellStats& c : report.cells) {
        if (!c.error.empty()) {
            std::cerr << "anchor-sim: level " << c.level << " " << ablation_name(c.ablation) << ": " << c.error << '\n';
        }
    }
    return report.any_cell_failed() ? kCellFailure : kOk;
}

int cmd_plan(const std::string& path) {
    PlanningProblem p;
    try {
        p = parse_problem(slurp(path));
    } catch (const std::exception& e) {
        std::cerr << "anchor-sim: " << e.what() << '\n';
        return kConfigError;
    }
    const std::optional<Plan> plan_ = plan(p);
    if (!plan_) {
        std::cerr << "anchor-sim: goal unreachable\n";
        return kCellFailure;
    }
    for (const Action& a : plan_->actions) {
        std::cout << a.str() << '\n';
    }
    return kOk;
}

int cmd_fit_shell(const std::string& arm_path, const std::string& out, unsigned threads) {
    ShellFitJob job;
    try {
        job = parse_arm_params(slurp(arm_path));
    } catch (const std::exception& e) {
        std::cerr << "anchor-sim: " << e.what() << '\n';
        return kConfigError;
    }
    try {
        const DualEllipsoidShell shell =
            fit_shell(sample_workspace(job.arm, job.fit, job.seed, threads), job.fit, job.arm.mount_offset);
        save_shell(out, shell);
        const Eigen::Vector3d ao = shell.outer.semi_axes();
        const Eigen::Vector3d ai = shell.inner.semi_axes();
        std::cout << "outer semi-axes " << ao.transpose() << "\ninner semi-axes " << ai.transpose() << "\noffset "
                  << shell.offset().x << ' ' << shell.offset().y << ' ' << shell.offset().z << '\n';
    } catch (const FitError& e) {
        std::cerr << "anchor-sim: " << e.what() << '\n';
        return kCellFailure;
    } catch (const std::exception& e) {
        std::cerr << "anchor-sim: " << e.what() << '\n';
        return kConfigError;
    }
    return kOk;
}

int cmd_replay(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "anchor-sim: cannot open " << path << '\n';
        return kConfigError;
    }
    ReplayResult r;
    try {
        r = replay_trace(in);
    } catch (const std::exception& e) {
        std::cerr << "anchor-sim: " << e.what() << '\n';
        return kConfigError;
    }
    std::cout << "status " << (r.success ? "success" : "failure " + r.reason) << '\n';
    std::cout << "cycles " << r.cycles << '\n';
    std::cout << "states " << (r.mismatched_cycles.empty() ? "consistent" : "inconsistent") << '\n';
    for (int c : r.mismatched_cycles) {
        std::cout << "  mismatch at cycle " << c << '\n';
    }
    const bool agrees = r.success == r.logged_success && r.mismatched_cycles.empty();
    return agrees ? kOk : kCellFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anchor-sim: closed-loop mobile manipulation simulator"};
    app.require_subcommand(1);

    RunArgs run;
    CLI::App* run_cmd = app.add_subcommand("run", "Run a batch of trials and write a CSV report");
    run_cmd->add_option("--scenario", run.scenario, "Scenario file or directory")->required();
    run_cmd->add_option("--level", run.level, "1, 2, 3 or all")->check(CLI::IsMember({"1", "2", "3", "all"}));
    run_cmd->add_option("--ablation", run.ablation, "full, no-align, no-recovery, open-loop or all")
        ->check(CLI::IsMember({"full", "no-align", "no-recovery", "open-loop", "all"}));
    run_cmd->add_option("--trials", run.trials, "Trials per cell")->check(CLI::PositiveNumber);
    run_cmd->add_option("--seed", run.seed, "Base seed");
    run_cmd->add_option("--out", run.out, "CSV output path")->required();
    run_cmd->add_option("--trace-dir", run.trace_dir, "Write one trace per trial here");
    run_cmd->add_option("--shell", run.shell, "Shell file (default: fitted from the default arm)");
    run_cmd->add_option("--threads", run.threads, "Worker threads (0 = all cores)");

    std::string problem;
    CLI::App* plan_cmd = app.add_subcommand("plan", "Plan for a PDDL problem, one action per line");
    plan_cmd->add_option("--problem", problem, "problem.pddl")->required();

    std::string arm, shell_out;
    unsigned fit_threads = 0;
    CLI::App* fit_cmd = app.add_subcommand("fit-shell", "Fit the dual-ellipsoid shell for an arm");
    fit_cmd->add_option("--arm", arm, "Arm parameter file")->required();
    fit_cmd->add_option("--out", shell_out, "Shell output path")->required();
    fit_cmd->add_option("--threads", fit_threads, "Worker threads (0 = all cores)");

    std::string trace;
    CLI::App* replay_cmd = app.add_subcommand("replay", "Re-derive states and terminal status from a trace");
    replay_cmd->add_option("--trace", trace, "Trace file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }
    try {
        if (*run_cmd) {
            return cmd_run(run);
        }
        if (*plan_cmd) {
            return cmd_plan(problem);
        }
        if (*fit_cmd) {
            return cmd_fit_shell(arm, shell_out, fit_threads);
        }
        return cmd_replay(trace);
    } catch (const std::exception& e) {
        std::cerr << "anchor-sim: " << e.what() << '\n';
        return kConfigError;
    }
}
