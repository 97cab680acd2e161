#pragma once

// Exact symbolic predecessors of a constraint.

#include "phz/constraint.hpp"
#include "phz/targets.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace phz {

struct PreStep {
    Constraint pred;
    int task = 0;    // firing task, indexed in `pred`
    int from_pc = 0; // control sequence of that task before the step
    std::string rule;
};

struct PreOptions {
    /// The exit rule adds a task; it is skipped when the result would exceed this.
    int max_tasks = 1 << 20;
    /// When set, predecessors whose shape is not reachable are dropped.
    const Skeleton* skeleton = nullptr;
    /// Exit rule: only concretize when some reachable shape can lose an exiting task.
    bool lazy_exit = false;
    std::size_t cap = 5'000'000;
};

class PreOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Predecessors where task t of phi takes the step.
std::vector<PreStep> pre(const ControlSet& cs, const Constraint& phi, int t, const PreOptions& opts = {});
/// Predecessors with an extra task that leaves by exiting.
std::vector<PreStep> pre_exit(const ControlSet& cs, const Constraint& phi, const PreOptions& opts = {});
std::vector<PreStep> pre_all(const ControlSet& cs, const Constraint& phi, const PreOptions& opts = {});

/// Text of the statement fired from a control sequence.
std::string fired_statement(const ControlSet& cs, int from_pc);

} // namespace phz
