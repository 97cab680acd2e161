#pragma once

// Bad constraints for the four properties, and the phase-free "skeleton"
// of a program: the set of configuration shapes (everything but the phase
// values) reachable when waits never block.

#include "phz/concrete.hpp"
#include "phz/constraint.hpp"
#include "phz/property.hpp"

#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

namespace phz {

/// Registration status of a task on one phaser.
enum class RegKind : std::uint8_t { None, Finite, WaitOnly };

struct TaskShape {
    int pc = -1;
    std::vector<int> pv;
    std::vector<RegKind> regs; // one per phaser
    auto operator<=>(const TaskShape&) const = default;
};

struct Shape {
    std::uint64_t bv = 0;
    int phasers = 0;
    std::vector<TaskShape> tasks;
    auto operator<=>(const Shape&) const = default;
};

Shape shape_of(const Constraint& phi);
Shape shape_of(const Configuration& c);
/// Representative of the shape modulo task and phaser renaming.
Shape canonical(const Shape& s);
/// Configuration with this shape and all finite phases at 0.
Configuration zero_configuration(const Shape& s);

/// Weakest strengthened graph over the given registrations:
/// sigma^t >= omega^u >= 0 for all registered t (finite) and u.
GapGraph top_of(std::span<const int> registered, std::span<const int> finite);
/// The shape with top_of graphs on every phaser.
Constraint top_constraint(const Shape& s);

/// Whether every configuration of the shape is bad (assert, race, runtime).
bool shape_is_bad(const ControlSet& cs, const Shape& s, Property kind);
/// Bad constraints of one shape; for deadlock one per simple wait cycle.
std::vector<Constraint> bad_constraints(const ControlSet& cs, const Shape& s, Property kind);

class TargetOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Eager enumeration over all shapes with n tasks and p phasers.
/// Throws TargetOverflow when more than `cap` shapes would be visited.
std::vector<Constraint> bad_set(const ControlSet& cs, Property kind, int n, int p, std::size_t cap = 2'000'000);

class Skeleton {
public:
    /// Forward exploration of shapes with at most the given numbers of
    /// tasks and phasers. Throws TargetOverflow past `cap` shapes.
    Skeleton(const ControlSet& cs, int max_tasks, int max_phasers, std::size_t cap = 2'000'000);

    const std::set<Shape>& shapes() const { return shapes_; }
    bool contains(const Shape& canonical_shape) const { return shapes_.contains(canonical_shape); }
    bool may_contain(const Constraint& phi) const;
    /// Some reachable shape becomes this one when a task at an exit point leaves.
    bool has_exit_parent(const Constraint& phi) const;
    bool pruned() const { return pruned_; }

    /// Bad constraints over all reachable shapes.
    std::vector<Constraint> bad_set(Property kind) const;

private:
    const ControlSet* cs_;
    std::set<Shape> shapes_;
    std::set<Shape> exit_parents_;
    bool pruned_ = false;
};

} // namespace phz
