#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anchor/sim.hpp"

namespace anchor {

enum class Ablation { Full, NoAlign, NoRecovery, OpenLoop };

const char* ablation_name(Ablation a);
std::optional<Ablation> ablation_from_name(const std::string& s);

struct TrialConfig {
    Scenario scenario;
    RngSeed seed;
    Ablation ablation = Ablation::Full;
    /// Overrides the scenario's budget when set.
    std::optional<int> max_cycles;
    RecoveryConfig recovery;
    SimConfig sim;
};

struct StageStats {
    int attempts = 0;
    int successes = 0;
};

/// A run of anomalies on one (action, object) key, closed by that key's next
/// success. Recovered if the key later succeeds or the trial succeeds.
struct AnomalyEvent {
    Layer layer = Layer::L1;
    RetryKey key;
    bool recovered = false;
};

struct TrialTrace {
    bool success = false;
    std::string reason;
    int cycles = 0;
    int steps = 0;
    std::map<ActionName, StageStats> stages;
    std::vector<AnomalyEvent> events;
    std::vector<Action> dispatched;
    /// Line-oriented log; contains no wall-clock values.
    std::string text;
};

/// Runs one trial; `shell` is used unless the scenario names its own shell file.
TrialTrace run_trial(const TrialConfig& cfg, const DualEllipsoidShell& shell);

struct ReplayResult {
    bool success = false;
    std::string reason;
    int cycles = 0;
    /// Cycles whose logged state differs from the state re-derived from the snapshot.
    std::vector<int> mismatched_cycles;
    /// Terminal status written in the log, for comparison.
    bool logged_success = false;
};

/// Re-derives every logged state and the terminal status from the snapshots.
/// Throws std::runtime_error on a malformed trace.
ReplayResult replay_trace(std::istream& in);

}  // namespace anchor
