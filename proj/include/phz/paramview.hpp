#pragma once

// Forward symbolic successors and a view-abstraction fixpoint for programs
// that spawn unboundedly many tasks over a bounded number of phasers.

#include "phz/checker.hpp"
#include "phz/constraint.hpp"
#include "phz/property.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace phz {

struct PostStep {
    Constraint succ;
    int task = 0; // firing task, indexed in the source constraint
    int from_pc = 0;
    std::string rule;
};

/// Successors where task t of phi takes a step (closed, strengthened, satisfiable).
std::vector<PostStep> post(const ControlSet& cs, const Constraint& phi, int t);
std::vector<PostStep> post_all(const ControlSet& cs, const Constraint& phi);

/// Restriction of phi to the given tasks (sorted, distinct); phasers are kept.
Constraint project_view(const Constraint& phi, std::span<const int> tasks);
/// Constraints with at most k tasks, whole, plus every k-task view of the larger ones.
std::vector<Constraint> abstract_k(std::span<const Constraint> phis, int k);
/// Constraints with k + 1 tasks glued from two k-task views that agree on
/// k - 1 tasks. Every configuration with k + 1 tasks whose k-views all lie
/// in the views is covered by some result. Task declarations that are
/// never spawned run at most once, so results with two of them are dropped.
std::vector<Constraint> concretize_k(const ControlSet& cs, std::span<const Constraint> views, int k);

/// Whether some configuration of phi is bad.
bool intersects_bad(const ControlSet& cs, const Constraint& phi, Property kind);

struct ParamOptions {
    int view_size = 1;
    /// Refinement stops after this view size.
    int max_view_size = 2;
    int degree_bound = 1;
    int max_phasers = 2;
    std::size_t max_views = 200'000;
    std::size_t max_rounds = 10'000;
};

struct FixpointStats {
    std::size_t rounds = 0;
    std::size_t posts = 0;
    std::size_t candidates = 0;
    std::size_t views = 0;
    int max_degree = 0;
    bool phaser_bound_hit = false;
    double seconds = 0;
};

struct Fixpoint {
    enum class Status { Stable, BadHit, Overflow };
    Status status = Status::Stable;
    std::vector<Constraint> views;
    /// The constraint that met the bad set, and whether it was a view.
    std::optional<Constraint> witness;
    std::string witness_level; // "view", "successor" or "concretized"
    std::optional<Trace> trace; // only without projections
    FixpointStats stats;
};

/// Least fixpoint from the views of the initial configuration. With
/// `project` false only constraints with at most k tasks are kept (no
/// views of larger ones), so the result under-approximates reachability
/// up to relaxation. Stops at the first bad hit when `kind` is set.
Fixpoint param_fixpoint(const ControlSet& cs, int k, bool project, const ParamOptions& opts,
                        std::optional<Property> kind = std::nullopt);

struct ParamResult {
    enum class Verdict { SafeForAllN, PotentialViolation, TraceViolation, BoundExceeded };
    Verdict verdict = Verdict::SafeForAllN;
    int view_size = 0; // size of the deciding run
    std::optional<Trace> trace;
    std::optional<ReplayResult> replay;
    std::optional<Constraint> witness;
    std::string diagnostic;
    std::vector<std::string> log; // one line per fixpoint run
    FixpointStats stats;
};

std::string_view to_string(ParamResult::Verdict v);

ParamResult param_check(const ControlSet& cs, Property kind, const ParamOptions& opts);

} // namespace phz
