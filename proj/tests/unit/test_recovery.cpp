#include <doctest.h>

#include <stdexcept>

#include "anchor/recovery.hpp"

using namespace anchor;

namespace {

Anomaly anomaly(AnomalyKind k, const std::string& action = "grasp", const std::string& obj = "orange",
                int cycle = 3) {
    return Anomaly{k, cycle, "test", {action, obj}};
}

const AnomalyKind kAll[] = {AnomalyKind::EmptyGrasp,      AnomalyKind::GripperSlip,    AnomalyKind::PlacementMiss,
                            AnomalyKind::TargetDisplaced, AnomalyKind::TargetOccluded, AnomalyKind::SceneChanged,
                            AnomalyKind::Unreachable,     AnomalyKind::TargetMissing};

}  // namespace

TEST_CASE("classify splits execution faults from world faults") {
    CHECK(classify(AnomalyKind::EmptyGrasp) == Layer::L1);
    CHECK(classify(AnomalyKind::GripperSlip) == Layer::L1);
    CHECK(classify(AnomalyKind::PlacementMiss) == Layer::L1);
    CHECK(classify(AnomalyKind::TargetDisplaced) == Layer::L2);
    CHECK(classify(AnomalyKind::TargetOccluded) == Layer::L2);
    CHECK(classify(AnomalyKind::SceneChanged) == Layer::L2);
    for (AnomalyKind k : kAll) {
        CHECK(kind_from_name(kind_name(k)) == k);
    }
    CHECK_FALSE(kind_from_name("Gremlins").has_value());
}

TEST_CASE("handle: L1 retries up to the limit then escalates") {
    RecoveryState st;
    const RecoveryConfig cfg;
    const Anomaly a = anomaly(AnomalyKind::EmptyGrasp);
    CHECK(handle(st, a, cfg) == Directive::RetryLocal);
    CHECK(st.mode == RecoveryMode::L1Retry);
    CHECK(st.l1_attempts.at(a.key) == 1);
    CHECK(handle(st, a, cfg) == Directive::RetryLocal);
    CHECK(st.l1_attempts.at(a.key) == 2);
    CHECK(handle(st, a, cfg) == Directive::EscalateReplan);
    CHECK(st.mode == RecoveryMode::L2Replan);
    // the replan starts a fresh budget
    CHECK(st.l1_attempts.empty());
    CHECK(handle(st, a, cfg) == Directive::RetryLocal);
}

TEST_CASE("handle: budgets are per (action, object)") {
    RecoveryState st;
    RecoveryConfig cfg;
    cfg.l1_retry_limit = 1;
    CHECK(handle(st, anomaly(AnomalyKind::EmptyGrasp, "grasp", "orange"), cfg) == Directive::RetryLocal);
    CHECK(handle(st, anomaly(AnomalyKind::PlacementMiss, "place", "orange"), cfg) == Directive::RetryLocal);
    CHECK(handle(st, anomaly(AnomalyKind::EmptyGrasp, "grasp", "cup"), cfg) == Directive::RetryLocal);
    CHECK(handle(st, anomaly(AnomalyKind::EmptyGrasp, "grasp", "orange"), cfg) == Directive::EscalateReplan);
}

TEST_CASE("handle: zero retry limit escalates immediately") {
    RecoveryState st;
    RecoveryConfig cfg;
    cfg.l1_retry_limit = 0;
    CHECK(handle(st, anomaly(AnomalyKind::GripperSlip), cfg) == Directive::EscalateReplan);
}

TEST_CASE("handle: L2 kinds replan, hopeless kinds terminate") {
    const RecoveryConfig cfg;
    for (AnomalyKind k : {AnomalyKind::TargetDisplaced, AnomalyKind::TargetOccluded, AnomalyKind::SceneChanged}) {
        RecoveryState st;
        CHECK(handle(st, anomaly(k), cfg) == Directive::EscalateReplan);
    }
    for (AnomalyKind k : {AnomalyKind::Unreachable, AnomalyKind::TargetMissing}) {
        RecoveryState st;
        CHECK(handle(st, anomaly(k), cfg) == Directive::Terminate);
        CHECK(st.mode == RecoveryMode::TerminalFailure);
    }
}

TEST_CASE("handle: disabled recovery terminates on everything") {
    RecoveryConfig cfg;
    cfg.enabled = false;
    for (AnomalyKind k : kAll) {
        RecoveryState st;
        CHECK(handle(st, anomaly(k), cfg) == Directive::Terminate);
        CHECK(st.mode == RecoveryMode::TerminalFailure);
    }
}

TEST_CASE("on_success resets only its own key") {
    RecoveryState st;
    const RecoveryConfig cfg;
    handle(st, anomaly(AnomalyKind::EmptyGrasp, "grasp", "orange"), cfg);
    handle(st, anomaly(AnomalyKind::PlacementMiss, "place", "orange"), cfg);
    on_success(st, {"grasp", "orange"});
    CHECK(st.l1_attempts.count({"grasp", "orange"}) == 0);
    CHECK(st.l1_attempts.at({"place", "orange"}) == 1);
    CHECK(st.mode == RecoveryMode::Nominal);

    RecoveryState dead;
    handle(dead, anomaly(AnomalyKind::TargetMissing), cfg);
    on_success(dead, {"grasp", "orange"});
    CHECK(dead.mode == RecoveryMode::TerminalFailure);
}

TEST_CASE("event_line format") {
    const Anomaly a = anomaly(AnomalyKind::EmptyGrasp, "grasp", "orange", 12);
    CHECK(event_line(a, Directive::RetryLocal, 1) ==
          "recovery cycle=12 kind=EmptyGrasp layer=L1 directive=RetryLocal attempt=1 key=grasp:orange");
    const Anomaly b = anomaly(AnomalyKind::TargetDisplaced, "align", "bowl", 4);
    CHECK(event_line(b, Directive::EscalateReplan, 0) ==
          "recovery cycle=4 kind=TargetDisplaced layer=L2 directive=EscalateReplan attempt=0 key=align:bowl");
    CHECK(directive_from_name("Terminate") == Directive::Terminate);
}

TEST_CASE("negative retry limit is a config error") {
    RecoveryConfig cfg;
    cfg.l1_retry_limit = -1;
    RecoveryState st;
    CHECK_THROWS_AS(handle(st, anomaly(AnomalyKind::EmptyGrasp), cfg), std::invalid_argument);
}
