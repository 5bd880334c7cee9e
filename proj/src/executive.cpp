#include "anchor/executive.hpp"

#include <istream>
#include <sstream>
#include <stdexcept>

namespace anchor {

const char* ablation_name(Ablation a) {
    switch (a) {
    case Ablation::Full:
        return "full";
    case Ablation::NoAlign:
        return "no-align";
    case Ablation::NoRecovery:
        return "no-recovery";
    case Ablation::OpenLoop:
        return "open-loop";
    }
    return "?";
}

std::optional<Ablation> ablation_from_name(const std::string& s) {
    for (Ablation a : {Ablation::Full, Ablation::NoAlign, Ablation::NoRecovery, Ablation::OpenLoop}) {
        if (s == ablation_name(a)) {
            return a;
        }
    }
    return std::nullopt;
}

namespace {

std::string shell_line(const DualEllipsoidShell& shell) {
    std::ostringstream s;
    write_shell(s, shell);
    std::string out = "shell";
    std::istringstream in(s.str());
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        out += ' ' + line;
    }
    return out;
}

DualEllipsoidShell parse_shell_line(const std::string& line) {
    std::istringstream in(line.substr(6));
    std::string text = "anchor-shell v1\n";
    std::string tok;
    while (in >> tok) {
        text += tok + '\n';
    }
    std::istringstream body(text);
    return read_shell(body);
}

std::string plan_string(const Plan& p) {
    std::string s;
    for (const Action& a : p.actions) {
        s += (s.empty() ? "" : " ") + a.str();
    }
    return s.empty() ? "-" : s;
}

class Executive {
public:
    Executive(const TrialConfig& cfg, const DualEllipsoidShell& shell)
        : cfg_(cfg), sim_cfg_(configure(cfg)), world_(cfg.scenario, shell, sim_cfg_, cfg.seed), rec_cfg_(cfg.recovery) {
        rec_cfg_.enabled = cfg.recovery.enabled && cfg.ablation != Ablation::NoRecovery &&
                           cfg.ablation != Ablation::OpenLoop;
        budget_ = cfg.max_cycles.value_or(cfg.scenario.max_cycles);
        if (budget_ < 1) {
            throw std::invalid_argument("max_cycles must be >= 1");
        }
        const Scenario& sc = cfg.scenario;
        log_ << "trace v1\n";
        log_ << "scenario " << (sc.name.empty() ? "-" : sc.name) << '\n';
        log_ << "level " << sc.level << '\n';
        log_ << "ablation " << ablation_name(cfg.ablation) << '\n';
        log_ << "seed " << cfg.seed.value << '\n';
        log_ << "task " << sc.task.task_obj << ' ' << sc.task.task_container << '\n';
        const PredicateConfig& pc = sim_cfg_.predicates;
        log_ << "predicates " << format_double(pc.eps_near) << ' ' << format_double(pc.eps_in) << ' '
             << format_double(pc.load_threshold) << ' ' << (pc.shell_check ? 1 : 0) << '\n';
        log_ << shell_line(shell) << '\n';
    }

    TrialTrace run() {
        if (cfg_.ablation == Ablation::OpenLoop) {
            run_open_loop();
        } else {
            run_closed_loop();
        }
        if (trace_.success) {
            for (AnomalyEvent& e : trace_.events) {
                e.recovered = true;
            }
        }
        log_ << "terminal " << (trace_.success ? "success" : "failure " + trace_.reason) << '\n';
        trace_.steps = static_cast<int>(trace_.dispatched.size());
        trace_.text = log_.str();
        return trace_;
    }

private:
    static SimConfig configure(const TrialConfig& cfg) {
        SimConfig s = cfg.sim;
        if (cfg.ablation == Ablation::NoAlign) {
            s.refine_alignment = false;
            s.predicates.shell_check = false;
        }
        return s;
    }

    SymbolicState goal() const {
        return {Atom{Pred::In, cfg_.scenario.task.task_obj, cfg_.scenario.task.task_container}};
    }

    void fired(const std::vector<std::string>& ds) {
        for (const std::string& d : ds) {
            log_ << "disturbance " << d << '\n';
        }
    }

    SymbolicState observe(int cycle) {
        world_.anchors().cycle = cycle;
        world_.perceive();
        world_.anchors().cycle = cycle;
        write_snapshot(log_, world_.anchors());
        const SymbolicState s = world_.state();
        log_ << "state " << (s.empty() ? "-" : state_string(s)) << '\n';
        return s;
    }

    PrimitiveOutcome execute(const Action& a) {
        world_.count_dispatch(a.name);
        const int k = world_.dispatch_count(a.name);
        fired(world_.fire(TriggerKind::Before, k, a.name));
        // Where the target was believed to be when the action started; the
        // primitive may re-perceive before reporting a failure.
        if (const ObjectAnchor* t = world_.anchors().find(a.args.at(0)); t && t->last_observed_cycle) {
            dispatched_at_ = t->expected_position;
        } else {
            dispatched_at_.reset();
        }
        log_ << "dispatch " << a.str() << '\n';
        trace_.dispatched.push_back(a);
        StageStats& st = trace_.stages[a.name];
        ++st.attempts;
        PrimitiveOutcome out = dispatch(world_, a);
        fired(world_.fire(TriggerKind::After, k, a.name));
        if (out.success) {
            ++st.successes;
            log_ << "outcome success" << (out.detail.empty() ? "" : " " + out.detail) << '\n';
            const RetryKey key{action_name(a.name), a.args.at(0)};
            on_success(rec_state_, key);
            if (auto it = open_.find(key); it != open_.end()) {
                trace_.events[it->second].recovered = true;
                open_.erase(it);
            }
        } else {
            log_ << "outcome failure " << kind_name(*out.anomaly) << ' ' << out.detail << '\n';
        }
        return out;
    }

    Directive route(const Anomaly& an) {
        if (!open_.count(an.key)) {
            open_[an.key] = trace_.events.size();
            trace_.events.push_back({classify(an.kind), an.key, false});
        }
        const Directive d = handle(rec_state_, an, rec_cfg_);
        const auto it = rec_state_.l1_attempts.find(an.key);
        log_ << event_line(an, d, it == rec_state_.l1_attempts.end() ? 0 : it->second) << '\n';
        return d;
    }

    // Local re-perception and re-alignment without re-navigating. Returns an
    // L2 anomaly if the target turns out to be gone or moved.
    std::optional<Anomaly> retry_local(const Anomaly& an, int cycle) {
        const std::string& task_obj = cfg_.scenario.task.task_obj;
        std::string target = an.kind == AnomalyKind::EmptyGrasp ? an.key.second : task_obj;
        const ObjectAnchor* a = world_.anchors().find(target);
        if (an.kind == AnomalyKind::EmptyGrasp && a && a->last_observed_cycle) {
            const Point3 before = dispatched_at_.value_or(a->expected_position);
            world_.face(before);
            bool seen = false;
            for (int i = 0; i < 2; ++i) {
                world_.perceive();
                const ObjectAnchor* now = world_.anchors().find(target);
                seen = seen || (now && now->last_observed_cycle == world_.tick());
            }
            const ObjectAnchor* now = world_.anchors().find(target);
            if (!seen) {
                return Anomaly{AnomalyKind::TargetOccluded, cycle, "target not re-observed", an.key};
            }
            if ((now->expected_position - before).norm() > 0.15) {
                return Anomaly{AnomalyKind::TargetDisplaced, cycle, "target re-observed elsewhere", an.key};
            }
        } else {
            for (int i = 0; i < 2; ++i) {
                world_.perceive();
            }
        }
        const PrimitiveOutcome re = primitive_align(world_, target);
        log_ << "realign " << target << ' ' << (re.success ? "success" : kind_name(*re.anomaly)) << '\n';
        return std::nullopt;
    }

    void escalate(const Anomaly& an) {
        const std::string& id = an.key.second;
        const ObjectAnchor* a = world_.anchors().find(id);
        const bool fresh = a && a->last_observed_cycle == world_.tick();
        if (a && (!fresh || an.kind == AnomalyKind::SceneChanged)) {
            world_.anchors().objects.erase(id);
            log_ << "invalidate " << id << '\n';
        }
    }

    // Returns false when the trial terminates.
    bool recover(const Anomaly& an, int cycle) {
        Directive d = route(an);
        if (d == Directive::RetryLocal) {
            if (auto l2 = retry_local(an, cycle)) {
                d = route(*l2);
                if (d == Directive::EscalateReplan) {
                    escalate(*l2);
                }
            }
        } else if (d == Directive::EscalateReplan) {
            escalate(an);
        }
        if (d == Directive::Terminate) {
            trace_.reason = kind_name(an.kind);
            return false;
        }
        return true;
    }

    void run_closed_loop() {
        for (int cycle = 0; cycle < budget_; ++cycle) {
            trace_.cycles = cycle + 1;
            log_ << "cycle " << cycle << '\n';
            fired(world_.fire(TriggerKind::Cycle, cycle));
            const SymbolicState s = observe(cycle);
            if (satisfies(s, goal())) {
                trace_.success = true;
                return;
            }
            const std::optional<Plan> p = plan(build_problem(cfg_.scenario.task, s));
            log_ << "plan " << (p ? plan_string(*p) : "none") << '\n';
            if (!p) {
                const Anomaly an{AnomalyKind::Unreachable, cycle, "planner found no plan", {"plan", "-"}};
                if (!recover(an, cycle)) {
                    return;
                }
                continue;
            }
            const Action& a = p->actions.front();
            const PrimitiveOutcome out = execute(a);
            if (!out.success) {
                const Anomaly an{*out.anomaly, cycle, out.detail, {action_name(a.name), a.args.at(0)}};
                if (!recover(an, cycle)) {
                    return;
                }
            }
        }
        trace_.reason = "cycle budget exhausted";
    }

    void run_open_loop() {
        log_ << "cycle 0\n";
        fired(world_.fire(TriggerKind::Cycle, 0));
        const SymbolicState s0 = observe(0);
        trace_.cycles = 1;
        if (satisfies(s0, goal())) {
            trace_.success = true;
            return;
        }
        const std::optional<Plan> p = plan(build_problem(cfg_.scenario.task, s0));
        log_ << "plan " << (p ? plan_string(*p) : "none") << '\n';
        if (!p) {
            recover({AnomalyKind::Unreachable, 0, "planner found no plan", {"plan", "-"}}, 0);
            return;
        }
        int cycle = 0;
        for (const Action& a : p->actions) {
            if (cycle > 0) {
                log_ << "cycle " << cycle << '\n';
                fired(world_.fire(TriggerKind::Cycle, cycle));
                trace_.cycles = cycle + 1;
            }
            const PrimitiveOutcome out = execute(a);
            if (!out.success) {
                recover({*out.anomaly, cycle, out.detail, {action_name(a.name), a.args.at(0)}}, cycle);
                return;
            }
            ++cycle;
        }
        log_ << "cycle " << cycle << '\n';
        trace_.cycles = cycle + 1;
        if (satisfies(observe(cycle), goal())) {
            trace_.success = true;
        } else {
            trace_.reason = "plan finished without reaching the goal";
        }
    }

    TrialConfig cfg_;
    SimConfig sim_cfg_;
    World world_;
    RecoveryConfig rec_cfg_;
    RecoveryState rec_state_;
    int budget_ = 100;
    std::map<RetryKey, std::size_t> open_;
    std::optional<Point3> dispatched_at_;
    TrialTrace trace_;
    std::ostringstream log_;
};

}  // namespace

TrialTrace run_trial(const TrialConfig& cfg, const DualEllipsoidShell& shell) {
    if (!cfg.scenario.shell_path.empty()) {
        const DualEllipsoidShell own = load_shell(cfg.scenario.shell_path);
        return Executive(cfg, own).run();
    }
    return Executive(cfg, shell).run();
}

ReplayResult replay_trace(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    if (lines.empty() || lines[0] != "trace v1") {
        throw std::runtime_error("replay: missing 'trace v1' header");
    }
    ReplayResult r;
    PredicateConfig pc;
    std::optional<DualEllipsoidShell> shell;
    SymbolicState goal;
    bool have_task = false, have_pred = false, have_terminal = false;
    SymbolicState last;
    std::optional<AnchorStore> last_store;
    std::string last_failure, logged_reason;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string& l = lines[i];
        std::istringstream ls(l);
        std::string tag;
        ls >> tag;
        if (tag == "task") {
            std::string o, c;
            if (!(ls >> o >> c)) {
                throw std::runtime_error("replay: bad task line");
            }
            goal = {Atom{Pred::In, o, c}};
            have_task = true;
        } else if (tag == "predicates") {
            int sc = 1;
            if (!(ls >> pc.eps_near >> pc.eps_in >> pc.load_threshold >> sc)) {
                throw std::runtime_error("replay: bad predicates line");
            }
            pc.shell_check = sc != 0;
            have_pred = true;
        } else if (tag == "shell") {
            shell = parse_shell_line(l);
        } else if (tag == "cycle") {
            ++r.cycles;
        } else if (tag == "snapshot") {
            std::string block;
            std::size_t j = i;
            for (; j < lines.size(); ++j) {
                block += lines[j] + '\n';
                if (lines[j] == "end") {
                    break;
                }
            }
            std::istringstream bs(block);
            last_store = read_snapshot(bs);
            if (!last_store || !shell || !have_pred) {
                throw std::runtime_error("replay: snapshot before header or malformed");
            }
            last = derive_state(*last_store, pc, *shell);
            i = j;
        } else if (tag == "state") {
            if (!last_store) {
                throw std::runtime_error("replay: state line without snapshot");
            }
            std::string logged = l.substr(6);
            const std::string derived = last.empty() ? "-" : state_string(last);
            if (logged != derived) {
                r.mismatched_cycles.push_back(last_store->cycle);
            }
        } else if (tag == "recovery") {
            if (l.find("directive=Terminate") != std::string::npos) {
                const auto k = l.find("kind=");
                last_failure = l.substr(k + 5, l.find(' ', k) - k - 5);
            }
        } else if (tag == "terminal") {
            std::string status;
            ls >> status;
            r.logged_success = status == "success";
            if (!r.logged_success) {
                std::getline(ls >> std::ws, logged_reason);
            }
            have_terminal = true;
        }
    }
    if (!have_task || !have_terminal) {
        throw std::runtime_error("replay: trace lacks task or terminal line");
    }
    r.success = last_store.has_value() && satisfies(last, goal);
    if (!r.success) {
        // Prefer the recovery layer's verdict, then whatever the executive logged.
        r.reason = !last_failure.empty() ? last_failure
                   : !logged_reason.empty() ? logged_reason
                                            : "cycle budget exhausted";
    }
    return r;
}

}  // namespace anchor
