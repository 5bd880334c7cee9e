#include "anchor/recovery.hpp"

#include <stdexcept>

namespace anchor {

namespace {

constexpr AnomalyKind kAllKinds[] = {
    AnomalyKind::EmptyGrasp,     AnomalyKind::GripperSlip,  AnomalyKind::PlacementMiss, AnomalyKind::TargetDisplaced,
    AnomalyKind::TargetOccluded, AnomalyKind::SceneChanged, AnomalyKind::Unreachable,   AnomalyKind::TargetMissing,
};

}  // namespace

const char* kind_name(AnomalyKind k) {
    switch (k) {
    case AnomalyKind::EmptyGrasp:
        return "EmptyGrasp";
    case AnomalyKind::GripperSlip:
        return "GripperSlip";
    case AnomalyKind::PlacementMiss:
        return "PlacementMiss";
    case AnomalyKind::TargetDisplaced:
        return "TargetDisplaced";
    case AnomalyKind::TargetOccluded:
        return "TargetOccluded";
    case AnomalyKind::SceneChanged:
        return "SceneChanged";
    case AnomalyKind::Unreachable:
        return "Unreachable";
    case AnomalyKind::TargetMissing:
        return "TargetMissing";
    }
    return "?";
}

std::optional<AnomalyKind> kind_from_name(const std::string& s) {
    for (AnomalyKind k : kAllKinds) {
        if (s == kind_name(k)) {
            return k;
        }
    }
    return std::nullopt;
}

const char* layer_name(Layer l) { return l == Layer::L1 ? "L1" : "L2"; }

const char* directive_name(Directive d) {
    switch (d) {
    case Directive::RetryLocal:
        return "RetryLocal";
    case Directive::EscalateReplan:
        return "EscalateReplan";
    case Directive::Terminate:
        return "Terminate";
    }
    return "?";
}

std::optional<Directive> directive_from_name(const std::string& s) {
    for (Directive d : {Directive::RetryLocal, Directive::EscalateReplan, Directive::Terminate}) {
        if (s == directive_name(d)) {
            return d;
        }
    }
    return std::nullopt;
}

void RecoveryConfig::validate() const {
    if (l1_retry_limit < 0) {
        throw std::invalid_argument("recovery: l1_retry_limit must be >= 0");
    }
}

Layer classify(AnomalyKind k) {
    switch (k) {
    case AnomalyKind::EmptyGrasp:
    case AnomalyKind::GripperSlip:
    case AnomalyKind::PlacementMiss:
        return Layer::L1;
    default:
        return Layer::L2;
    }
}

Directive handle(RecoveryState& state, const Anomaly& a, const RecoveryConfig& cfg) {
    cfg.validate();
    if (!cfg.enabled || a.kind == AnomalyKind::Unreachable || a.kind == AnomalyKind::TargetMissing) {
        state.mode = RecoveryMode::TerminalFailure;
        return Directive::Terminate;
    }
    if (classify(a.kind) == Layer::L1) {
        int& n = state.l1_attempts[a.key];
        if (n < cfg.l1_retry_limit) {
            ++n;
            state.mode = RecoveryMode::L1Retry;
            return Directive::RetryLocal;
        }
    }
    // Fresh plan, fresh budget.
    state.l1_attempts.clear();
    state.mode = RecoveryMode::L2Replan;
    return Directive::EscalateReplan;
}

void on_success(RecoveryState& state, const RetryKey& key) {
    state.l1_attempts.erase(key);
    if (state.mode != RecoveryMode::TerminalFailure) {
        state.mode = RecoveryMode::Nominal;
    }
}

std::string event_line(const Anomaly& a, Directive d, int attempt) {
    return "recovery cycle=" + std::to_string(a.detected_at_cycle) + " kind=" + kind_name(a.kind) +
           " layer=" + layer_name(classify(a.kind)) + " directive=" + directive_name(d) +
           " attempt=" + std::to_string(attempt) + " key=" + a.key.first + ":" + a.key.second;
}

}  // namespace anchor
