#include "phz/constraint.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace phz {

std::vector<int> registered(const GapGraph& g)
{
    std::vector<int> out;
    for (Var v : g.vars())
        if (!is_sigma(v))
            out.push_back(task_of(v));
    return out;
}

bool is_registered(int t, const GapGraph& g)
{
    return g.has_var(omega(t));
}

std::vector<int> Constraint::registered(int p) const
{
    return phz::registered(graphs[p]);
}

bool Constraint::operator==(const Constraint& o) const
{
    return bv == o.bv && tasks == o.tasks && graphs == o.graphs;
}

namespace {

// Raise the invariant edges of g in place; returns false when nothing changed.
bool raise_invariants(GapGraph& g)
{
    bool changed = false;
    auto bump = [&](Var a, Var b) {
        int i = g.index_of(a), j = g.index_of(b);
        if (g.at(i, j) < 0) {
            g.raise_at(i, j, 0);
            changed = true;
        }
    };
    std::vector<Var> omegas, sigmas;
    for (Var v : g.vars())
        (is_sigma(v) ? sigmas : omegas).push_back(v);
    for (Var w : omegas)
        bump(w, kZero);
    for (Var s : sigmas) {
        bump(s, kZero);
        for (Var w : omegas)
            bump(s, w);
    }
    return changed;
}

} // namespace

std::optional<Constraint> strengthen(Constraint phi)
{
    for (GapGraph& g : phi.graphs) {
        raise_invariants(g);
        g.close_in_place();
        if (g.is_unsat())
            return std::nullopt;
    }
    return phi;
}

bool is_strengthened(const Constraint& phi)
{
    for (GapGraph g : phi.graphs)
        if (raise_invariants(g))
            return false;
    return true;
}

bool is_well_formed(const Constraint& phi)
{
    for (const GapGraph& g : phi.graphs) {
        if (g.is_unsat() || !g.is_closed())
            return false;
        for (Var v : g.vars()) {
            if (task_of(v) >= phi.num_tasks())
                return false;
            if (is_sigma(v) && !g.has_var(omega(task_of(v))))
                return false;
        }
    }
    for (const SymTask& t : phi.tasks)
        for (int p : t.pv)
            if (p >= phi.num_phasers())
                return false;
    return true;
}

Constraint constraint_of(const Configuration& c)
{
    Configuration n = c.normalized();
    Constraint phi;
    phi.bv = n.bv;
    for (const TaskState& t : n.tasks)
        phi.tasks.push_back({t.pc, t.pv});
    for (const PhaserState& p : n.phasers) {
        std::vector<Clause> clauses;
        std::vector<Var> vars;
        auto pin = [&](Var v, Phase value) {
            vars.push_back(v);
            clauses.push_back({v, kZero, static_cast<Weight>(value)});
            clauses.push_back({kZero, v, static_cast<Weight>(-value)});
        };
        for (const Registration& r : p.regs) {
            pin(omega(r.task), r.phases.wait);
            if (r.phases.sig != kInfinitePhase)
                pin(sigma(r.task), r.phases.sig);
        }
        phi.graphs.push_back(graph_of(clauses, vars));
    }
    return phi;
}

namespace {

std::uint64_t task_signature(const Constraint& phi, int t)
{
    const SymTask& task = phi.tasks[t];
    std::uint64_t defined = 0;
    for (std::size_t v = 0; v < task.pv.size() && v < 16; ++v)
        if (task.pv[v] >= 0)
            defined |= std::uint64_t{1} << v;
    std::uint64_t finite = 0, infinite = 0;
    for (int p = 0; p < phi.num_phasers(); ++p)
        if (phi.is_registered(t, p))
            ++(phi.has_signal(t, p) ? finite : infinite);
    return (static_cast<std::uint64_t>(task.pc) << 32) | (defined << 16) | (finite << 8) | infinite;
}

class Matcher {
public:
    Matcher(const Constraint& phi, const Constraint& psi) : a_(phi), b_(psi) {}

    bool run()
    {
        if (a_.bv != b_.bv || a_.num_tasks() != b_.num_tasks() || a_.num_phasers() != b_.num_phasers())
            return false;
        int n = a_.num_tasks();
        sig_a_.resize(n);
        sig_b_.resize(n);
        for (int t = 0; t < n; ++t) {
            sig_a_[t] = task_signature(a_, t);
            sig_b_[t] = task_signature(b_, t);
        }
        {
            auto x = sig_a_, y = sig_b_;
            std::sort(x.begin(), x.end());
            std::sort(y.begin(), y.end());
            if (x != y)
                return false;
        }
        tau_.assign(n, -1);
        tau_used_.assign(n, false);
        pi_.assign(a_.num_phasers(), -1);
        pi_inv_.assign(a_.num_phasers(), -1);
        return assign_task(0);
    }

private:
    bool assign_task(int t)
    {
        if (t == a_.num_tasks())
            return assign_phaser(0);
        for (int u = 0; u < b_.num_tasks(); ++u) {
            if (tau_used_[u] || sig_a_[t] != sig_b_[u])
                continue;
            std::vector<int> bound;
            tau_[t] = u;
            tau_used_[u] = true;
            if (bind_vars(t, u, bound) && assign_task(t + 1))
                return true;
            tau_[t] = -1;
            tau_used_[u] = false;
            unbind(bound);
        }
        return false;
    }

    bool bind_vars(int t, int u, std::vector<int>& bound)
    {
        const auto& pa = a_.tasks[t].pv;
        const auto& pb = b_.tasks[u].pv;
        if (pa.size() != pb.size())
            return false;
        for (std::size_t v = 0; v < pa.size(); ++v) {
            int p = pa[v], q = pb[v];
            if ((p < 0) != (q < 0))
                return false;
            if (p < 0)
                continue;
            if (pi_[p] == -1 && pi_inv_[q] == -1) {
                pi_[p] = q;
                pi_inv_[q] = p;
                bound.push_back(p);
                if (!phaser_matches(p, q))
                    return false;
            }
            else if (pi_[p] != q)
                return false;
        }
        return true;
    }

    void unbind(const std::vector<int>& bound)
    {
        for (int p : bound) {
            pi_inv_[pi_[p]] = -1;
            pi_[p] = -1;
        }
    }

    bool assign_phaser(int p)
    {
        if (p == a_.num_phasers()) {
            for (int q = 0; q < a_.num_phasers(); ++q)
                if (!phaser_matches(q, pi_[q]))
                    return false;
            return true;
        }
        if (pi_[p] >= 0)
            return assign_phaser(p + 1);
        for (int q = 0; q < b_.num_phasers(); ++q) {
            if (pi_inv_[q] >= 0 || !phaser_matches(p, q))
                continue;
            pi_[p] = q;
            pi_inv_[q] = p;
            if (assign_phaser(p + 1))
                return true;
            pi_[p] = -1;
            pi_inv_[q] = -1;
        }
        return false;
    }

    // Checks as much of phaser p ~ q as the current task assignment allows.
    bool phaser_matches(int p, int q) const
    {
        const GapGraph& g = a_.graphs[p];
        const GapGraph& h = b_.graphs[q];
        if (g.vars().size() != h.vars().size())
            return false;
        idx_.assign(static_cast<std::size_t>(g.dim()), -1);
        idx_[0] = 0;
        for (int i = 1; i < g.dim(); ++i) {
            Var v = g.var_at(i);
            int u = tau_[task_of(v)];
            if (u < 0)
                continue;
            int j = h.index_of(is_sigma(v) ? sigma(u) : omega(u));
            if (j < 0)
                return false;
            idx_[i] = j;
        }
        for (int i = 0; i < g.dim(); ++i) {
            if (idx_[i] < 0)
                continue;
            for (int j = 0; j < g.dim(); ++j)
                if (idx_[j] >= 0 && h.at(idx_[i], idx_[j]) < g.at(i, j))
                    return false;
        }
        return true;
    }

    const Constraint& a_;
    const Constraint& b_;
    std::vector<std::uint64_t> sig_a_, sig_b_;
    std::vector<int> tau_;
    std::vector<bool> tau_used_;
    std::vector<int> pi_, pi_inv_;
    mutable std::vector<int> idx_;
};

} // namespace

bool entails(const Constraint& phi, const Constraint& psi)
{
    return Matcher(phi, psi).run();
}

bool satisfies(const Configuration& c, const Constraint& phi)
{
    for (const PhaserState& p : c.phasers)
        for (const Registration& r : p.regs)
            if (r.phases.wait == kInfinitePhase)
                return false;
    return entails(phi, constraint_of(c));
}

int degree_of(const Constraint& phi)
{
    int d = 0;
    for (const GapGraph& g : phi.graphs)
        d = std::max(d, degree(g));
    return d;
}

bool is_free(const GapGraph& g)
{
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j) {
            Weight w = g.at(i, j);
            if (i == j || w == kNegInf)
                continue;
            Var a = g.var_at(i), b = g.var_at(j);
            bool shape = (is_sigma(a) && b != kZero && !is_sigma(b)) || (a != kZero && b == kZero);
            if (!shape || w < 0)
                return false;
        }
    return true;
}

bool is_free(const Constraint& phi)
{
    return std::all_of(phi.graphs.begin(), phi.graphs.end(), [](const GapGraph& g) { return is_free(g); });
}

Constraint relax(const Constraint& phi, int k)
{
    Constraint out = phi;
    for (GapGraph& g : out.graphs)
        g = relax_graph(g, k);
    return out;
}

void remove_task(Constraint& phi, int t)
{
    std::map<Var, Var> down;
    for (int u = t + 1; u < phi.num_tasks(); ++u) {
        down[omega(u)] = omega(u - 1);
        down[sigma(u)] = sigma(u - 1);
    }
    Var gone[] = {omega(t), sigma(t)};
    for (GapGraph& g : phi.graphs) {
        g = project_away(g, gone);
        g = substitute(g, down);
    }
    phi.tasks.erase(phi.tasks.begin() + t);
}

void remove_phaser(Constraint& phi, int p)
{
    phi.graphs.erase(phi.graphs.begin() + p);
    for (SymTask& t : phi.tasks)
        for (int& q : t.pv) {
            if (q == p)
                q = -1;
            else if (q > p)
                --q;
        }
}

ShapeKey shape_key(const Constraint& phi)
{
    ShapeKey k;
    k.bv = phi.bv;
    k.phasers = phi.num_phasers();
    for (int t = 0; t < phi.num_tasks(); ++t)
        k.tasks.push_back(task_signature(phi, t));
    std::sort(k.tasks.begin(), k.tasks.end());
    return k;
}

std::string to_string(const ControlSet& cs, const Constraint& phi)
{
    const Program& prg = cs.program();
    std::ostringstream os;
    os << "bools:";
    for (std::size_t b = 0; b < prg.bools.size(); ++b)
        os << " " << prg.bools[b] << "=" << (((phi.bv >> b) & 1U) ? "true" : "false");
    os << "\n";
    for (int t = 0; t < phi.num_tasks(); ++t) {
        const SymTask& task = phi.tasks[t];
        const TaskDecl& decl = prg.tasks.at(cs.owner(task.pc));
        os << "task " << t << " at " << cs.describe(task.pc);
        for (std::size_t v = 0; v < task.pv.size(); ++v)
            if (task.pv[v] >= 0)
                os << " " << decl.locals[v].name << "->p" << task.pv[v];
        os << "\n";
    }
    auto name = [](Var v) {
        if (v == kZero)
            return std::string("0");
        return (is_sigma(v) ? "s" : "w") + std::to_string(task_of(v));
    };
    for (int p = 0; p < phi.num_phasers(); ++p) {
        const GapGraph& g = phi.graphs[p];
        os << "phaser p" << p << ":";
        for (int i = 0; i < g.dim(); ++i)
            for (int j = 0; j < g.dim(); ++j)
                if (i != j && g.at(i, j) != kNegInf)
                    os << " " << name(g.var_at(i)) << "-" << name(g.var_at(j)) << ">=" << g.at(i, j);
        os << "\n";
    }
    return os.str();
}

} // namespace phz
