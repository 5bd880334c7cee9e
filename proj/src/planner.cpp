#include "anchor/planner.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace anchor {

void TaskSpec::validate() const {
    if (task_obj.empty() || task_container.empty() || task_obj == task_container) {
        throw std::invalid_argument("task: task_obj and task_container must be distinct non-empty symbols");
    }
}

const char* action_name(ActionName a) {
    switch (a) {
    case ActionName::Align:
        return "align";
    case ActionName::Grasp:
        return "grasp";
    case ActionName::ObjFind:
        return "obj_find";
    case ActionName::Place:
        return "place";
    }
    return "?";
}

std::optional<ActionName> action_from_name(const std::string& s) {
    for (ActionName a : {ActionName::Align, ActionName::Grasp, ActionName::ObjFind, ActionName::Place}) {
        if (s == action_name(a)) {
            return a;
        }
    }
    return std::nullopt;
}

std::string Action::str() const {
    std::string s = "(";
    s += action_name(name);
    for (const std::string& a : args) {
        s += ' ';
        s += a;
    }
    return s + ")";
}

PlanningProblem build_problem(const TaskSpec& task, const SymbolicState& state) {
    task.validate();
    PlanningProblem p;
    p.objects = {task.task_obj, task.task_container};
    std::set<std::string> others;
    for (const Atom& a : state) {
        for (const std::string* s : {&a.a, &a.b}) {
            if (!s->empty() && *s != task.task_obj && *s != task.task_container) {
                others.insert(*s);
            }
        }
    }
    p.objects.insert(p.objects.end(), others.begin(), others.end());
    p.init = state;
    p.goal = {Atom{Pred::In, task.task_obj, task.task_container}};
    return p;
}

namespace {

bool has(const SymbolicState& s, Pred p, const std::string& a, const std::string& b = {}) {
    return s.count(Atom{p, a, b}) > 0;
}

bool holding_any(const SymbolicState& s) {
    return std::any_of(s.begin(), s.end(), [](const Atom& a) { return a.pred == Pred::Holding; });
}

}  // namespace

bool applicable(const Action& a, const SymbolicState& s) {
    const std::string& o = a.args.at(0);
    switch (a.name) {
    case ActionName::ObjFind:
        return !has(s, Pred::Near, o);
    case ActionName::Align:
        return has(s, Pred::Found, o) && has(s, Pred::Near, o);
    case ActionName::Grasp:
        return has(s, Pred::Aligned, o) && !holding_any(s);
    case ActionName::Place:
        return a.args.at(1) != o && has(s, Pred::Holding, o) && has(s, Pred::Aligned, a.args[1]);
    }
    return false;
}

SymbolicState apply(const Action& a, const SymbolicState& s) {
    SymbolicState n = s;
    const std::string& o = a.args.at(0);
    switch (a.name) {
    case ActionName::ObjFind:
        n.insert({Pred::Found, o, {}});
        n.insert({Pred::Near, o, {}});
        break;
    case ActionName::Align:
        n.insert({Pred::Aligned, o, {}});
        break;
    case ActionName::Grasp:
        n.insert({Pred::Holding, o, {}});
        break;
    case ActionName::Place:
        n.insert({Pred::In, o, a.args.at(1)});
        n.erase({Pred::Holding, o, {}});
        break;
    }
    return n;
}

bool satisfies(const SymbolicState& s, const SymbolicState& goal) {
    return std::includes(s.begin(), s.end(), goal.begin(), goal.end());
}

std::vector<Action> ground_actions(const std::vector<std::string>& objects) {
    std::vector<Action> out;
    for (ActionName n : {ActionName::Align, ActionName::Grasp, ActionName::ObjFind}) {
        for (const std::string& o : objects) {
            out.push_back({n, {o}});
        }
    }
    for (const std::string& o : objects) {
        for (const std::string& c : objects) {
            if (o != c) {
                out.push_back({ActionName::Place, {o, c}});
            }
        }
    }
    return out;
}

std::optional<Plan> plan(const PlanningProblem& problem) {
    if (satisfies(problem.init, problem.goal)) {
        return Plan{};
    }
    const std::vector<Action> actions = ground_actions(problem.objects);
    struct Node {
        SymbolicState state;
        int parent;
        int action;
    };
    std::vector<Node> nodes{{problem.init, -1, -1}};
    std::set<SymbolicState> seen{problem.init};
    std::deque<int> frontier{0};
    while (!frontier.empty()) {
        const int i = frontier.front();
        frontier.pop_front();
        for (std::size_t k = 0; k < actions.size(); ++k) {
            if (!applicable(actions[k], nodes[static_cast<std::size_t>(i)].state)) {
                continue;
            }
            SymbolicState next = anchor::apply(actions[k], nodes[static_cast<std::size_t>(i)].state);
            if (!seen.insert(next).second) {
                continue;
            }
            const bool done = satisfies(next, problem.goal);
            nodes.push_back({std::move(next), i, static_cast<int>(k)});
            const int j = static_cast<int>(nodes.size()) - 1;
            if (done) {
                Plan p;
                for (int at = j; nodes[static_cast<std::size_t>(at)].parent >= 0;
                     at = nodes[static_cast<std::size_t>(at)].parent) {
                    p.actions.push_back(actions[static_cast<std::size_t>(nodes[static_cast<std::size_t>(at)].action)]);
                }
                std::reverse(p.actions.begin(), p.actions.end());
                return p;
            }
            frontier.push_back(j);
        }
    }
    return std::nullopt;
}

std::string export_domain() {
    return "(define (domain anchor)\n"
           "  (:requirements :strips :typing :negative-preconditions)\n"
           "  (:types item)\n"
           "  (:predicates (found ?o - item) (near ?o - item) (aligned ?o - item) (holding ?o - item)\n"
           "               (in ?o - item ?c - item) (hand-full))\n"
           "  (:action obj_find\n"
           "    :parameters (?o - item)\n"
           "    :precondition (not (near ?o))\n"
           "    :effect (and (found ?o) (near ?o)))\n"
           "  (:action align\n"
           "    :parameters (?o - item)\n"
           "    :precondition (and (found ?o) (near ?o))\n"
           "    :effect (aligned ?o))\n"
           "  (:action grasp\n"
           "    :parameters (?o - item)\n"
           "    :precondition (and (aligned ?o) (not (hand-full)))\n"
           "    :effect (and (holding ?o) (hand-full)))\n"
           "  (:action place\n"
           "    :parameters (?o - item ?c - item)\n"
           "    :precondition (and (holding ?o) (aligned ?c))\n"
           "    :effect (and (in ?o ?c) (not (holding ?o)) (not (hand-full)))))\n";
}

std::string export_problem(const PlanningProblem& problem) {
    std::string s = "(define (problem anchor-task)\n  (:domain anchor)\n  (:objects";
    for (const std::string& o : problem.objects) {
        s += ' ' + o;
    }
    s += " - item)\n  (:init ";
    std::vector<std::string> lits;
    for (const Atom& a : problem.init) {
        lits.push_back(a.str());
    }
    if (holding_any(problem.init)) {
        lits.push_back("(hand-full)");
    }
    for (std::size_t i = 0; i < lits.size(); ++i) {
        s += (i ? " " : "") + lits[i];
    }
    s += ")\n  (:goal (and";
    for (const Atom& a : problem.goal) {
        s += ' ' + a.str();
    }
    s += ")))\n";
    return s;
}

namespace {

struct Sexp {
    std::string atom;
    std::vector<Sexp> list;
    bool is_list = false;
};

class SexpReader {
public:
    explicit SexpReader(const std::string& text) : text_(text) {}

    Sexp read_top() {
        Sexp s = read();
        skip_space();
        if (pos_ != text_.size()) {
            throw std::runtime_error("pddl: trailing text after top-level form");
        }
        return s;
    }

private:
    void skip_space() {
        while (pos_ < text_.size()) {
            if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            } else if (text_[pos_] == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    Sexp read() {
        skip_space();
        if (pos_ >= text_.size()) {
            throw std::runtime_error("pddl: unexpected end of input");
        }
        Sexp s;
        if (text_[pos_] == '(') {
            ++pos_;
            s.is_list = true;
            for (;;) {
                skip_space();
                if (pos_ >= text_.size()) {
                    throw std::runtime_error("pddl: unbalanced parentheses");
                }
                if (text_[pos_] == ')') {
                    ++pos_;
                    return s;
                }
                s.list.push_back(read());
            }
        }
        if (text_[pos_] == ')') {
            throw std::runtime_error("pddl: unexpected ')'");
        }
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
               text_[pos_] != ')' && text_[pos_] != ';') {
            ++pos_;
        }
        std::string a = text_.substr(start, pos_ - start);
        std::transform(a.begin(), a.end(), a.begin(), [](unsigned char c) { return std::tolower(c); });
        s.atom = a;
        return s;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

bool head_is(const Sexp& s, const std::string& h) {
    return s.is_list && !s.list.empty() && !s.list[0].is_list && s.list[0].atom == h;
}

// Ground literal -> atom; nullopt for the hand-full bookkeeping literal.
std::optional<Atom> literal(const Sexp& s) {
    if (!s.is_list || s.list.empty() || s.list[0].is_list) {
        throw std::runtime_error("pddl: expected a ground literal");
    }
    for (const Sexp& e : s.list) {
        if (e.is_list) {
            throw std::runtime_error("pddl: nested term in literal");
        }
    }
    if (s.list[0].atom == "hand-full" && s.list.size() == 1) {
        return std::nullopt;
    }
    const std::optional<Pred> p = pred_from_name(s.list[0].atom);
    const std::size_t arity = (p == Pred::In) ? 3 : 2;
    if (!p || s.list.size() != arity) {
        throw std::runtime_error("pddl: unknown predicate or wrong arity: " + s.list[0].atom);
    }
    return Atom{*p, s.list[1].atom, arity == 3 ? s.list[2].atom : std::string{}};
}

}  // namespace

PlanningProblem parse_problem(const std::string& text) {
    const Sexp top = SexpReader(text).read_top();
    if (!head_is(top, "define") || top.list.size() < 2 || !head_is(top.list[1], "problem")) {
        throw std::runtime_error("pddl: expected (define (problem ...) ...)");
    }
    PlanningProblem p;
    bool have_objects = false, have_init = false, have_goal = false;
    for (std::size_t i = 2; i < top.list.size(); ++i) {
        const Sexp& sec = top.list[i];
        if (head_is(sec, ":domain")) {
            continue;
        }
        if (head_is(sec, ":objects")) {
            have_objects = true;
            for (std::size_t k = 1; k < sec.list.size(); ++k) {
                const Sexp& e = sec.list[k];
                if (e.is_list) {
                    throw std::runtime_error("pddl: bad :objects entry");
                }
                if (e.atom == "-") {
                    if (k + 1 >= sec.list.size() || sec.list[k + 1].atom != "item") {
                        throw std::runtime_error("pddl: objects must be of type item");
                    }
                    ++k;
                    continue;
                }
                p.objects.push_back(e.atom);
            }
        } else if (head_is(sec, ":init")) {
            have_init = true;
            for (std::size_t k = 1; k < sec.list.size(); ++k) {
                if (auto a = literal(sec.list[k])) {
                    p.init.insert(*a);
                }
            }
        } else if (head_is(sec, ":goal")) {
            have_goal = true;
            if (sec.list.size() != 2) {
                throw std::runtime_error("pddl: :goal takes one formula");
            }
            const Sexp& g = sec.list[1];
            if (head_is(g, "and")) {
                for (std::size_t k = 1; k < g.list.size(); ++k) {
                    if (auto a = literal(g.list[k])) {
                        p.goal.insert(*a);
                    }
                }
            } else if (auto a = literal(g)) {
                p.goal.insert(*a);
            }
        } else {
            throw std::runtime_error("pddl: unsupported problem section");
        }
    }
    if (!have_objects || !have_init || !have_goal) {
        throw std::runtime_error("pddl: problem needs :objects, :init and :goal");
    }
    const std::set<std::string> declared(p.objects.begin(), p.objects.end());
    if (declared.size() != p.objects.size()) {
        throw std::runtime_error("pddl: duplicate object");
    }
    for (const SymbolicState* s : {&p.init, &p.goal}) {
        for (const Atom& a : *s) {
            if (!declared.count(a.a) || (a.pred == Pred::In && !declared.count(a.b))) {
                throw std::runtime_error("pddl: literal names an undeclared object: " + a.str());
            }
        }
    }
    return p;
}

void parse_domain(const std::string& text) {
    const Sexp top = SexpReader(text).read_top();
    if (!head_is(top, "define") || top.list.size() < 2 || !head_is(top.list[1], "domain")) {
        throw std::runtime_error("pddl: expected (define (domain ...) ...)");
    }
    std::set<std::string> actions;
    for (std::size_t i = 2; i < top.list.size(); ++i) {
        const Sexp& sec = top.list[i];
        if (head_is(sec, ":action")) {
            if (sec.list.size() < 2 || sec.list[1].is_list || !action_from_name(sec.list[1].atom)) {
                throw std::runtime_error("pddl: unknown action in domain");
            }
            actions.insert(sec.list[1].atom);
        }
    }
    if (actions.size() != 4) {
        throw std::runtime_error("pddl: domain must declare obj_find, align, grasp and place");
    }
}

}  // namespace anchor
