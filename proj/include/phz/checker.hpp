#pragma once

// Backward working-list reachability over constraints, with optional
// degree-bounding relaxation, and concrete replay of symbolic traces.

#include "phz/constraint.hpp"
#include "phz/pre.hpp"
#include "phz/targets.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace phz {

struct TraceStep {
    int task = 0;    // firing task, indexed in the constraint the step starts from
    int from_pc = 0;
    std::string stmt;
    std::string rule;
};

/// constraints[0] contains the initial configuration, constraints.back() is
/// bad; steps[i] leads from constraints[i] to constraints[i + 1].
struct Trace {
    std::vector<Constraint> constraints;
    std::vector<std::size_t> ids;
    std::vector<TraceStep> steps;
};

struct CheckOptions {
    int max_tasks = 4;
    int max_phasers = 2;
    std::optional<int> degree_bound;
    bool lazy_exit = false;
    /// Drop constraints whose shape the skeleton cannot reach.
    bool prune = true;
    /// Pop constraints with fewer tasks first instead of FIFO.
    bool by_task_count = false;
    std::size_t max_pops = 10'000'000;
    std::size_t skeleton_cap = 2'000'000;
    std::size_t target_cap = 2'000'000;
    /// Called on every constraint added to Visited.
    std::function<void(const Constraint&)> on_visit;
};

struct CheckStats {
    std::size_t targets = 0;
    std::size_t pops = 0;
    std::size_t generated = 0;
    std::size_t subsumed = 0;
    std::size_t visited = 0; // final antichain size
    int max_degree = 0;
    bool relaxed = false; // some relaxation weakened a constraint
    bool all_free = true; // every visited constraint was free
    double seconds = 0;
};

struct CheckResult {
    enum class Status { Unreachable, Reached, BoundExceeded };
    Status status = Status::Unreachable;
    std::optional<Trace> trace;
    std::string diagnostic;
    CheckStats stats;
};

std::string_view to_string(CheckResult::Status s);

/// Keeps the entailment-minimal constraints (the weakest ones).
std::vector<Constraint> minimize(std::vector<Constraint> phis);

CheckResult check(const ControlSet& cs, std::vector<Constraint> bad, const CheckOptions& opts,
                  const Skeleton* skeleton = nullptr);
/// Builds the targets of the property and runs check.
CheckResult check_property(const ControlSet& cs, Property kind, const CheckOptions& opts);

struct ReplayResult {
    bool ok = false;
    std::vector<ScheduleStep> schedule;
    std::vector<Configuration> path;
};

/// Looks for concrete configurations c_0 = c_init, c_i -> c_{i+1} with
/// c_i in constraints[i] and a last configuration that is bad.
ReplayResult replay_trace(const ControlSet& cs, const Trace& trace, Property kind,
                          std::size_t frontier_cap = 20'000);

} // namespace phz
