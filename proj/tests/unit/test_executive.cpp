#include <doctest.h>

#include <map>
#include <sstream>

#include "anchor/executive.hpp"
#include "oracles.hpp"

using namespace anchor;

namespace {

TrialConfig trial(const std::string& fixture, std::uint64_t seed, Ablation ab = Ablation::Full) {
    TrialConfig c;
    c.scenario = load_scenario(oracle::fixture(fixture));
    c.seed = RngSeed{seed};
    c.ablation = ab;
    return c;
}

std::map<ActionName, int> histogram(const TrialTrace& t) {
    std::map<ActionName, int> h;
    for (const Action& a : t.dispatched) {
        ++h[a.name];
    }
    return h;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) {
        out.push_back(l);
    }
    return out;
}

}  // namespace

TEST_CASE("noiseless level-1 task runs the nominal plan") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const TrialTrace t = run_trial(trial("level1_noiseless.scn", seed), default_shell());
        INFO("seed " << seed << "\n" << t.text);
        CHECK(t.success);
        CHECK(t.cycles <= 8);
        CHECK(t.events.empty());
        auto h = histogram(t);
        CHECK(h[ActionName::ObjFind] >= 1);
        CHECK(h[ActionName::ObjFind] <= 2);
        CHECK(h[ActionName::Align] == 2);
        CHECK(h[ActionName::Grasp] == 1);
        CHECK(h[ActionName::Place] == 1);
        CHECK(t.steps == static_cast<int>(t.dispatched.size()));
        CHECK(t.dispatched.back().str() == "(place orange bowl)");
    }
}

TEST_CASE("a goal that already holds needs no actions") {
    const TrialTrace t = run_trial(trial("preplaced.scn", 1), default_shell());
    CHECK(t.success);
    CHECK(t.dispatched.empty());
    CHECK(t.cycles == 1);
}

TEST_CASE("displaced target: closed loop recovers, open loop does not") {
    const TrialTrace open = run_trial(trial("fig1_displaced.scn", 1, Ablation::OpenLoop), default_shell());
    CHECK_FALSE(open.success);
    const TrialTrace full = run_trial(trial("fig1_displaced.scn", 1), default_shell());
    INFO(full.text);
    CHECK(full.success);
    CHECK_FALSE(full.events.empty());
    bool recovered = false;
    for (const AnomalyEvent& e : full.events) {
        recovered = recovered || e.recovered;
    }
    CHECK(recovered);
}

TEST_CASE("closed loop dispatches the head of each fresh plan, once per cycle") {
    for (const char* f : {"level1_noiseless.scn", "fig1_displaced.scn", "slip_carry.scn"}) {
        const TrialTrace t = run_trial(trial(f, 7), default_shell());
        INFO(f << "\n" << t.text);
        std::string head;
        int dispatches_this_cycle = 0;
        for (const std::string& l : lines(t.text)) {
            if (l.rfind("cycle ", 0) == 0) {
                dispatches_this_cycle = 0;
                head.clear();
            } else if (l.rfind("plan ", 0) == 0) {
                const std::string rest = l.substr(5);
                head = rest.substr(0, rest.find(')') + 1);
            } else if (l.rfind("dispatch ", 0) == 0) {
                ++dispatches_this_cycle;
                CHECK(dispatches_this_cycle == 1);
                CHECK(l.substr(9) == head);
            }
        }
    }
}

TEST_CASE("replaying a trace reproduces its states and verdict") {
    for (Ablation ab : {Ablation::Full, Ablation::NoAlign, Ablation::NoRecovery, Ablation::OpenLoop}) {
        for (const char* f : {"level1_noiseless.scn", "fig1_displaced.scn", "slip_carry.scn"}) {
            const TrialTrace t = run_trial(trial(f, 11, ab), default_shell());
            std::istringstream in(t.text);
            const ReplayResult r = replay_trace(in);
            INFO(f << " " << ablation_name(ab));
            CHECK(r.mismatched_cycles.empty());
            CHECK(r.success == t.success);
            CHECK(r.logged_success == t.success);
            CHECK(r.cycles == t.cycles);
            if (!t.success) {
                CHECK(r.reason == t.reason);
            }
        }
    }
    std::istringstream junk("trace v1\nstate (found\n");
    CHECK_THROWS_AS(replay_trace(junk), std::runtime_error);
}

TEST_CASE("trials are deterministic in their seed") {
    const TrialTrace a = run_trial(trial("fig1_displaced.scn", 5), default_shell());
    const TrialTrace b = run_trial(trial("fig1_displaced.scn", 5), default_shell());
    CHECK(a.text == b.text);
    CHECK(a.success == b.success);
    CHECK(a.dispatched == b.dispatched);
}

TEST_CASE("the cycle budget override stops the trial") {
    TrialConfig c = trial("level1_noiseless.scn", 1);
    c.max_cycles = 2;
    const TrialTrace t = run_trial(c, default_shell());
    CHECK_FALSE(t.success);
    CHECK(t.reason == "cycle budget exhausted");
    CHECK(t.cycles == 2);
}

TEST_CASE("ablation names") {
    for (Ablation a : {Ablation::Full, Ablation::NoAlign, Ablation::NoRecovery, Ablation::OpenLoop}) {
        CHECK(ablation_from_name(ablation_name(a)) == a);
    }
    CHECK_FALSE(ablation_from_name("half").has_value());
}
