#pragma once

#include <optional>
#include <string>
#include <vector>

#include "anchor/anchors.hpp"

namespace anchor {

struct TaskSpec {
    std::string task_obj;
    std::string task_container;
    std::string instruction_text;

    void validate() const;
};

enum class ActionName { Align, Grasp, ObjFind, Place };

const char* action_name(ActionName a);
std::optional<ActionName> action_from_name(const std::string& s);

struct Action {
    ActionName name = ActionName::ObjFind;
    std::vector<std::string> args;

    /// "(obj_find orange)"
    std::string str() const;
    friend bool operator==(const Action&, const Action&) = default;
};

struct Plan {
    std::vector<Action> actions;
    int cost() const { return static_cast<int>(actions.size()); }
};

struct PlanningProblem {
    /// Declaration order; it is also the argument tie-break order.
    std::vector<std::string> objects;
    SymbolicState init;
    SymbolicState goal;
};

/// Objects: task_obj, task_container, then every other object named in
/// `state`, by name. Init is the state itself; goal is in(task_obj, task_container).
PlanningProblem build_problem(const TaskSpec& task, const SymbolicState& state);

bool applicable(const Action& a, const SymbolicState& s);
/// Predicted successor state; assumes applicable(a, s).
SymbolicState apply(const Action& a, const SymbolicState& s);
bool satisfies(const SymbolicState& s, const SymbolicState& goal);

/// All ground actions over `objects`, ordered by name then argument positions
/// in declaration order.
std::vector<Action> ground_actions(const std::vector<std::string>& objects);

/// Breadth-first search; returns the shortest plan, first in action order
/// among equals, or nullopt when the goal is unreachable.
std::optional<Plan> plan(const PlanningProblem& problem);

std::string export_domain();
std::string export_problem(const PlanningProblem& problem);
/// Throws std::runtime_error on malformed input or unsupported constructs.
PlanningProblem parse_problem(const std::string& text);
/// Checks that `text` declares the fixed four-action domain.
void parse_domain(const std::string& text);

}  // namespace anchor
