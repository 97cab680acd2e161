#pragma once

// Symbolic constraints: a finite description of tasks, their control
// sequences and phaser variables, plus one gap-order graph per phaser over
// the wait (omega) and signal (sigma) phases of the registered tasks.
//
// A task is registered on a phaser iff its omega vertex is present. Its
// sigma vertex is absent when the registration carries an infinite signal
// phase (WAIT mode).

#include "phz/concrete.hpp"
#include "phz/gapgraph.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace phz {

inline Var omega(int task) { return static_cast<Var>(2 * task + 1); }
inline Var sigma(int task) { return static_cast<Var>(2 * task + 2); }
inline int task_of(Var v) { return (static_cast<int>(v) - 1) / 2; }
inline bool is_sigma(Var v) { return v != kZero && v % 2 == 0; }

struct SymTask {
    int pc = -1;
    std::vector<int> pv; // phaser index per local, -1 when undefined
    auto operator<=>(const SymTask&) const = default;
};

struct Constraint {
    std::uint64_t bv = 0;
    std::vector<SymTask> tasks;
    std::vector<GapGraph> graphs; // one per phaser

    int num_tasks() const { return static_cast<int>(tasks.size()); }
    int num_phasers() const { return static_cast<int>(graphs.size()); }

    bool is_registered(int t, int p) const { return graphs[p].has_var(omega(t)); }
    bool has_signal(int t, int p) const { return graphs[p].has_var(sigma(t)); }
    std::vector<int> registered(int p) const;

    bool operator==(const Constraint& o) const;
};

std::vector<int> registered(const GapGraph& g);
bool is_registered(int t, const GapGraph& g);

/// Raises sigma->omega, sigma->0 and omega->0 weights to at least 0 and
/// closes; nullopt when a graph becomes unsatisfiable.
std::optional<Constraint> strengthen(Constraint phi);
bool is_strengthened(const Constraint& phi);
/// All graphs closed and satisfiable.
bool is_well_formed(const Constraint& phi);

Constraint constraint_of(const Configuration& c);

/// phi is weaker than psi (every configuration of psi is one of phi).
bool entails(const Constraint& phi, const Constraint& psi);
bool satisfies(const Configuration& c, const Constraint& phi);

int degree_of(const Constraint& phi);
bool is_free(const Constraint& phi);
bool is_free(const GapGraph& g);
Constraint relax(const Constraint& phi, int k);

/// Removes task t, relabelling the vertices of later tasks.
void remove_task(Constraint& phi, int t);
/// Removes phaser p; later phaser indices shift down in every pv.
void remove_phaser(Constraint& phi, int p);

/// Cheap invariant of the entailment preorder: equal keys are necessary
/// for entailment in either direction.
struct ShapeKey {
    std::uint64_t bv = 0;
    int phasers = 0;
    std::vector<std::uint64_t> tasks; // sorted per-task signatures
    auto operator<=>(const ShapeKey&) const = default;
};

ShapeKey shape_key(const Constraint& phi);

std::string to_string(const ControlSet& cs, const Constraint& phi);

} // namespace phz
