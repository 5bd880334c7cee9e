#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "anchor/executive.hpp"

namespace anchor {

struct ScenarioEntry {
    std::string path;
    Scenario scenario;
};

/// A file, or every *.scn file below a directory (sorted by path).
/// Throws std::runtime_error on load failure.
std::vector<ScenarioEntry> discover_scenarios(const std::string& path);

struct CellStats {
    int level = 1;
    Ablation ablation = Ablation::Full;
    int trials = 0;
    int successes = 0;
    std::map<ActionName, StageStats> stages;
    int l1_detected = 0;
    int l1_recovered = 0;
    int l2_detected = 0;
    int l2_recovered = 0;
    long total_steps = 0;
    double wall_seconds = 0.0;
    std::string error;

    int detected() const { return l1_detected + l2_detected; }
    int recovered() const { return l1_recovered + l2_recovered; }
    void add(const TrialTrace& t);
    void merge(const CellStats& o);
};

struct BatchReport {
    std::vector<CellStats> cells;

    bool any_cell_failed() const;
};

struct BatchConfig {
    std::vector<ScenarioEntry> scenarios;
    std::vector<int> levels{1, 2, 3};
    std::vector<Ablation> ablations{Ablation::Full};
    int trials = 1;
    std::uint64_t base_seed = 0;
    std::string trace_dir;
    unsigned threads = 0;
    DualEllipsoidShell shell;
    SimConfig sim;
    RecoveryConfig recovery;
};

/// Trial i of a cell runs the (i mod n)-th scenario of that level with seed
/// base_seed + i. Cells without scenarios are reported with an error.
BatchReport run_batch(const BatchConfig& cfg);

void write_csv(std::ostream& out, const BatchReport& report);
void write_table(std::ostream& out, const BatchReport& report);

}  // namespace anchor
