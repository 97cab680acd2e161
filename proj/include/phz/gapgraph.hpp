#pragma once

// Gap-order constraint graphs. An edge a --k--> b stands for a - b >= k.
// Vertex 0 is the constant zero; every graph contains it.

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace phz {

using Weight = std::int32_t;
using Var = std::uint16_t;

inline constexpr Weight kNegInf = std::numeric_limits<Weight>::min();
inline constexpr Weight kPosInf = std::numeric_limits<Weight>::max();
inline constexpr Var kZero = 0;

/// Saturating sum; +inf dominates -inf.
Weight add_weights(Weight a, Weight b);

struct Clause {
    Var a = kZero;
    Var b = kZero;
    Weight k = 0;
};

class GapGraph {
public:
    /// The empty graph: only the zero vertex, trivially satisfiable.
    GapGraph();
    /// Graph over the given variables with no constraints between them.
    explicit GapGraph(std::vector<Var> vars);

    static GapGraph unsat();

    bool is_unsat() const { return unsat_; }
    bool is_closed() const { return closed_; }

    std::span<const Var> vars() const { return vars_; }
    bool has_var(Var v) const { return index_of(v) >= 0; }
    /// Matrix index of a vertex: 0 for the zero vertex, -1 when absent.
    int index_of(Var v) const;
    int dim() const { return static_cast<int>(vars_.size()) + 1; }
    Var var_at(int index) const { return index == 0 ? kZero : vars_[index - 1]; }

    Weight at(int i, int j) const { return m_[static_cast<std::size_t>(i) * dim() + j]; }
    Weight edge(Var a, Var b) const;

    /// Tightens a - b >= k (keeps the maximum); marks the graph open.
    void raise(Var a, Var b, Weight k);
    void raise_at(int i, int j, Weight k);
    /// Overwrites an edge weight; marks the graph open.
    void set_at(int i, int j, Weight k);

    /// In-place closure; turns into the unsat graph on a positive cycle.
    void close_in_place();

    bool operator==(const GapGraph& o) const;
    std::size_t hash() const;

private:
    void make_unsat();

    std::vector<Var> vars_; // sorted, never contains kZero
    std::vector<Weight> m_; // dim x dim, row-major
    bool closed_ = true;
    bool unsat_ = false;
};

GapGraph graph_of(std::span<const Clause> clauses, std::span<const Var> extra_vars = {});
GapGraph close(GapGraph g);
bool is_sat(const GapGraph& g);
/// Largest k such that a closed edge carries the finite weight -k.
int degree(const GapGraph& g);
GapGraph conjoin(const GapGraph& g, const GapGraph& h);
GapGraph substitute(const GapGraph& g, const std::map<Var, Var>& renaming);
GapGraph project_away(const GapGraph& g, std::span<const Var> vars);
/// Graph whose solutions are those of g with v moved by delta (new v = old v + delta).
GapGraph shift(const GapGraph& g, Var v, Weight delta);
/// g is weaker than h: same vertices, every weight of h at least that of g.
bool graph_entails(const GapGraph& g, const GapGraph& h);
/// Adds vertices (unconstrained) so the graph ranges over vars ∪ extra.
GapGraph with_vars(const GapGraph& g, std::span<const Var> extra);
/// Weakest closed graph with degree <= k entailed by g.
GapGraph relax_graph(const GapGraph& g, int k);

/// Evaluates every edge under a valuation of the graph's variables.
bool holds(const GapGraph& g, const std::function<long long(Var)>& value);

std::string to_dot(const GapGraph& g, const std::function<std::string(Var)>& name);

} // namespace phz
