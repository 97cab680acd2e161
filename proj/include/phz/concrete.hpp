#pragma once

// Concrete operational semantics: configurations, single steps, the bad
// configuration predicates and a bounded breadth-first explorer.

#include "phz/lang.hpp"
#include "phz/property.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace phz {

using Phase = std::int64_t;
inline constexpr Phase kInfinitePhase = std::numeric_limits<Phase>::max();

struct Phases {
    Phase wait = 0;
    Phase sig = 0;
    auto operator<=>(const Phases&) const = default;
};

struct TaskState {
    int id = 0;
    int pc = -1;
    // Indexed by the task's phaser locals; -1 when undefined.
    std::vector<int> pv;
    auto operator<=>(const TaskState&) const = default;
};

struct Registration {
    int task = 0;
    Phases phases;
    auto operator<=>(const Registration&) const = default;
};

struct PhaserState {
    int id = 0;
    std::vector<Registration> regs; // sorted by task id
    auto operator<=>(const PhaserState&) const = default;

    const Registration* find(int task) const;
};

struct Configuration {
    std::uint64_t bv = 0;
    std::vector<TaskState> tasks;     // sorted by id
    std::vector<PhaserState> phasers; // sorted by id
    int next_task = 0;
    int next_phaser = 0;

    const TaskState* task(int id) const;
    const PhaserState* phaser(int id) const;
    const Phases* phases(int phaser, int task) const;

    /// Same state with ids renumbered by rank; equal keys mean equal states
    /// up to the fresh-id history.
    Configuration normalized() const;
    bool operator==(const Configuration& o) const;
};

std::string to_string(const ControlSet& cs, const Configuration& c);

Configuration initial(const ControlSet& cs);

struct StepResult {
    enum class Kind { Ok, Blocked, BadAssert, BadRuntime };
    Kind kind = Kind::Ok;
    Configuration next;
};

/// All outcomes of letting task `task_id` fire once (set-valued on ndet()).
std::vector<StepResult> step(const ControlSet& cs, const Configuration& c, int task_id);

struct Transition {
    int task = 0;
    int choice = 0;
    Configuration next;
};

/// Every Ok successor of c, in task order then choice order.
std::vector<Transition> successors(const ControlSet& cs, const Configuration& c);

struct BlockWitness {
    int phaser = 0;
    int by = 0;
};

std::optional<BlockWitness> is_blocked(const ControlSet& cs, const Configuration& c, int task_id);
/// A cycle t0 -> t1 -> ... of tasks each blocked by the next.
std::optional<std::vector<int>> is_deadlock(const ControlSet& cs, const Configuration& c);

struct RaceWitness {
    int writer = 0;
    int other = 0;
    int var = 0;
};

std::optional<RaceWitness> detect_race(const ControlSet& cs, const Configuration& c);
std::optional<int> assert_fault(const ControlSet& cs, const Configuration& c);
std::optional<int> runtime_fault(const ControlSet& cs, const Configuration& c);
bool is_bad(const ControlSet& cs, const Configuration& c, Property kind);

/// Checks wait <= sig across all registrations of each phaser and non-negativity.
bool phase_invariant_holds(const Configuration& c);

struct ScheduleStep {
    int task = 0;
    int choice = 0;
};

std::string format_schedule(const std::vector<ScheduleStep>& schedule);
std::vector<ScheduleStep> parse_schedule(const std::string& text);

/// Replays a schedule from the initial configuration; throws on an
/// impossible step. Returns every visited configuration.
std::vector<Configuration> replay_schedule(const ControlSet& cs, const std::vector<ScheduleStep>& schedule);

struct ExploreOptions {
    Phase phase_bound = 4;
    std::size_t max_states = 1'000'000;
    int task_bound = 8;
    int phaser_bound = 4;
    // Empty: look for any kind of bad configuration.
    std::optional<Property> property;
    // Keep exploring after a violation (used to collect states).
    bool stop_at_violation = true;
    std::function<void(const Configuration&)> on_state;
};

struct ExploreResult {
    enum class Status { Safe, Violation, Exhausted };
    Status status = Status::Safe;
    std::optional<Property> kind;
    std::vector<ScheduleStep> schedule;
    std::vector<Configuration> path;
    std::size_t states = 0;
    bool pruned = false; // some successor was cut by a bound
};

ExploreResult explore_bounded(const ControlSet& cs, const ExploreOptions& opts);

} // namespace phz
