#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

namespace anchor {

enum class AnomalyKind {
    EmptyGrasp,
    GripperSlip,
    PlacementMiss,
    TargetDisplaced,
    TargetOccluded,
    SceneChanged,
    Unreachable,
    TargetMissing,
};

enum class Layer { L1, L2 };
enum class Directive { RetryLocal, EscalateReplan, Terminate };
enum class RecoveryMode { Nominal, L1Retry, L2Replan, TerminalFailure };

const char* kind_name(AnomalyKind k);
std::optional<AnomalyKind> kind_from_name(const std::string& s);
const char* layer_name(Layer l);
const char* directive_name(Directive d);
std::optional<Directive> directive_from_name(const std::string& s);

/// (action, object) the retry budget is kept for.
using RetryKey = std::pair<std::string, std::string>;

struct Anomaly {
    AnomalyKind kind = AnomalyKind::EmptyGrasp;
    int detected_at_cycle = 0;
    std::string evidence;
    RetryKey key;
};

struct RecoveryConfig {
    int l1_retry_limit = 2;
    bool enabled = true;

    void validate() const;
};

struct RecoveryState {
    std::map<RetryKey, int> l1_attempts;
    RecoveryMode mode = RecoveryMode::Nominal;
};

Layer classify(AnomalyKind k);

/// Routes an anomaly to the lowest layer able to handle it and updates the counters.
Directive handle(RecoveryState& state, const Anomaly& a, const RecoveryConfig& cfg);

/// Resets the retry counter of a key after its action succeeds.
void on_success(RecoveryState& state, const RetryKey& key);

/// "recovery cycle=.. kind=.. layer=.. directive=.. attempt=.."
std::string event_line(const Anomaly& a, Directive d, int attempt);

}  // namespace anchor
