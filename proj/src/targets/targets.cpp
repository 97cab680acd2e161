#include "phz/targets.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace phz {

Shape shape_of(const Constraint& phi)
{
    Shape s;
    s.bv = phi.bv;
    s.phasers = phi.num_phasers();
    for (int t = 0; t < phi.num_tasks(); ++t) {
        TaskShape ts{phi.tasks[t].pc, phi.tasks[t].pv, {}};
        for (int p = 0; p < s.phasers; ++p)
            ts.regs.push_back(!phi.is_registered(t, p) ? RegKind::None
                              : phi.has_signal(t, p)   ? RegKind::Finite
                                                       : RegKind::WaitOnly);
        s.tasks.push_back(std::move(ts));
    }
    return s;
}

Shape shape_of(const Configuration& c)
{
    Configuration n = c.normalized();
    Shape s;
    s.bv = n.bv;
    s.phasers = static_cast<int>(n.phasers.size());
    for (const TaskState& t : n.tasks) {
        TaskShape ts{t.pc, t.pv, {}};
        for (const PhaserState& p : n.phasers) {
            const Registration* r = p.find(t.id);
            ts.regs.push_back(!r                                    ? RegKind::None
                              : r->phases.sig != kInfinitePhase ? RegKind::Finite
                                                                    : RegKind::WaitOnly);
        }
        s.tasks.push_back(std::move(ts));
    }
    return s;
}

Shape canonical(const Shape& s)
{
    std::vector<int> perm(s.phasers);
    std::iota(perm.begin(), perm.end(), 0);
    Shape best;
    bool first = true;
    do {
        Shape cand;
        cand.bv = s.bv;
        cand.phasers = s.phasers;
        for (const TaskShape& t : s.tasks) {
            TaskShape n{t.pc, t.pv, std::vector<RegKind>(t.regs.size())};
            for (int& p : n.pv)
                if (p >= 0)
                    p = perm[p];
            for (std::size_t p = 0; p < t.regs.size(); ++p)
                n.regs[perm[p]] = t.regs[p];
            cand.tasks.push_back(std::move(n));
        }
        std::sort(cand.tasks.begin(), cand.tasks.end());
        if (first || cand < best)
            best = std::move(cand);
        first = false;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

Configuration zero_configuration(const Shape& s)
{
    Configuration c;
    c.bv = s.bv;
    for (int t = 0; t < static_cast<int>(s.tasks.size()); ++t)
        c.tasks.push_back({t, s.tasks[t].pc, s.tasks[t].pv});
    for (int p = 0; p < s.phasers; ++p) {
        PhaserState ps{p, {}};
        for (int t = 0; t < static_cast<int>(s.tasks.size()); ++t) {
            RegKind k = s.tasks[t].regs[p];
            if (k != RegKind::None)
                ps.regs.push_back({t, {0, k == RegKind::Finite ? 0 : kInfinitePhase}});
        }
        c.phasers.push_back(std::move(ps));
    }
    c.next_task = static_cast<int>(s.tasks.size());
    c.next_phaser = s.phasers;
    return c;
}

GapGraph top_of(std::span<const int> registered, std::span<const int> finite)
{
    std::vector<Clause> cl;
    std::vector<Var> vars;
    for (int u : registered) {
        vars.push_back(omega(u));
        cl.push_back({omega(u), kZero, 0});
    }
    for (int t : finite) {
        vars.push_back(sigma(t));
        for (int u : registered)
            cl.push_back({sigma(t), omega(u), 0});
    }
    return graph_of(cl, vars);
}

Constraint top_constraint(const Shape& s)
{
    Constraint phi;
    phi.bv = s.bv;
    for (const TaskShape& t : s.tasks)
        phi.tasks.push_back({t.pc, t.pv});
    for (int p = 0; p < s.phasers; ++p) {
        std::vector<int> reg, fin;
        for (int t = 0; t < static_cast<int>(s.tasks.size()); ++t) {
            if (s.tasks[t].regs[p] != RegKind::None)
                reg.push_back(t);
            if (s.tasks[t].regs[p] == RegKind::Finite)
                fin.push_back(t);
        }
        phi.graphs.push_back(top_of(reg, fin));
    }
    return phi;
}

bool shape_is_bad(const ControlSet& cs, const Shape& s, Property kind)
{
    return kind != Property::Deadlock && is_bad(cs, zero_configuration(s), kind);
}

namespace {

struct WaitEdge {
    int to;
    int phaser;
};

void collect_cycles(const std::vector<std::vector<WaitEdge>>& out, int start, int at, std::vector<bool>& on_path,
                    std::vector<std::pair<int, WaitEdge>>& path, std::vector<std::vector<std::pair<int, WaitEdge>>>& found)
{
    for (const WaitEdge& e : out[at]) {
        if (e.to == start) {
            path.push_back({at, e});
            found.push_back(path);
            path.pop_back();
        }
        else if (e.to > start && !on_path[e.to]) {
            on_path[e.to] = true;
            path.push_back({at, e});
            collect_cycles(out, start, e.to, on_path, path, found);
            path.pop_back();
            on_path[e.to] = false;
        }
    }
}

} // namespace

std::vector<Constraint> bad_constraints(const ControlSet& cs, const Shape& s, Property kind)
{
    if (kind != Property::Deadlock) {
        if (shape_is_bad(cs, s, kind))
            return {top_constraint(s)};
        return {};
    }
    int n = static_cast<int>(s.tasks.size());
    std::vector<std::vector<WaitEdge>> out(n);
    for (int t = 0; t < n; ++t) {
        int pc = s.tasks[t].pc;
        if (cs.is_terminated(pc) || cs.head(pc).kind != Stmt::Kind::Wait)
            continue;
        int p = s.tasks[t].pv.at(cs.head(pc).var);
        if (p < 0 || s.tasks[t].regs[p] == RegKind::None)
            continue;
        for (int u = 0; u < n; ++u)
            if (s.tasks[u].regs[p] == RegKind::Finite)
                out[t].push_back({u, p});
    }
    std::vector<std::vector<std::pair<int, WaitEdge>>> cycles;
    std::vector<bool> on_path(n, false);
    std::vector<std::pair<int, WaitEdge>> path;
    for (int start = 0; start < n; ++start) {
        on_path[start] = true;
        collect_cycles(out, start, start, on_path, path, cycles);
        on_path[start] = false;
    }
    std::vector<Constraint> result;
    Constraint top = top_constraint(s);
    for (const auto& cycle : cycles) {
        Constraint phi = top;
        for (const auto& [t, e] : cycle)
            phi.graphs[e.phaser].raise(omega(t), sigma(e.to), 0);
        for (GapGraph& g : phi.graphs)
            g.close_in_place();
        if (auto st = strengthen(std::move(phi)))
            result.push_back(std::move(*st));
    }
    return result;
}

namespace {

std::vector<TaskShape> task_shapes(const ControlSet& cs, int p)
{
    const Program& prg = cs.program();
    std::vector<TaskShape> out;
    for (int pc = 0; pc < cs.size(); ++pc) {
        const TaskDecl& decl = prg.tasks.at(cs.owner(pc));
        std::vector<RegKind> kinds{RegKind::None};
        if (decl.has_mode(true))
            kinds.push_back(RegKind::Finite);
        if (decl.has_mode(false))
            kinds.push_back(RegKind::WaitOnly);
        std::size_t locals = decl.locals.size();
        std::vector<int> pv(locals, -1);
        // odometer over pv in {-1..p-1}^locals, then regs in kinds^p
        while (true) {
            std::vector<std::size_t> r(p, 0);
            while (true) {
                TaskShape ts{pc, pv, {}};
                for (int q = 0; q < p; ++q)
                    ts.regs.push_back(kinds[r[q]]);
                out.push_back(std::move(ts));
                int q = 0;
                while (q < p && ++r[q] == kinds.size())
                    r[q++] = 0;
                if (q == p)
                    break;
            }
            std::size_t v = 0;
            while (v < locals && ++pv[v] == p)
                pv[v++] = -1;
            if (v == locals)
                break;
        }
    }
    return out;
}

} // namespace

std::vector<Constraint> bad_set(const ControlSet& cs, Property kind, int n, int p, std::size_t cap)
{
    std::vector<TaskShape> desc = task_shapes(cs, p);
    // multisets of size n over desc, times boolean valuations
    double count = 1;
    for (int i = 0; i < n; ++i)
        count = count * static_cast<double>(desc.size() + i) / static_cast<double>(i + 1);
    std::size_t nb = cs.program().bools.size();
    count *= static_cast<double>(std::uint64_t{1} << nb);
    if (count > static_cast<double>(cap))
        throw TargetOverflow("bad-set enumeration for " + std::to_string(n) + " tasks and " + std::to_string(p) +
                             " phasers exceeds the cap (" + std::to_string(static_cast<long long>(count)) +
                             " shapes)");
    std::set<Shape> seen;
    std::vector<Constraint> out;
    std::vector<std::size_t> idx(n, 0);
    if (desc.empty() && n > 0)
        return out;
    while (true) {
        for (std::uint64_t bv = 0; bv < (std::uint64_t{1} << nb); ++bv) {
            Shape s;
            s.bv = bv;
            s.phasers = p;
            for (std::size_t i : idx)
                s.tasks.push_back(desc[i]);
            Shape c = canonical(s);
            if (!seen.insert(c).second)
                continue;
            for (Constraint& phi : bad_constraints(cs, c, kind))
                out.push_back(std::move(phi));
        }
        int i = n - 1;
        while (i >= 0 && idx[i] + 1 == desc.size())
            --i;
        if (i < 0)
            break;
        ++idx[i];
        for (int j = i + 1; j < n; ++j)
            idx[j] = idx[i];
    }
    return out;
}

Skeleton::Skeleton(const ControlSet& cs, int max_tasks, int max_phasers, std::size_t cap) : cs_(&cs)
{
    std::deque<Shape> queue;
    auto visit = [&](const Configuration& c) {
        if (static_cast<int>(c.tasks.size()) > max_tasks || static_cast<int>(c.phasers.size()) > max_phasers) {
            pruned_ = true;
            return;
        }
        Shape s = canonical(shape_of(c));
        if (shapes_.insert(s).second) {
            if (shapes_.size() > cap)
                throw TargetOverflow("skeleton exploration exceeds " + std::to_string(cap) + " shapes");
            queue.push_back(std::move(s));
        }
    };
    visit(initial(cs));
    while (!queue.empty()) {
        Shape s = std::move(queue.front());
        queue.pop_front();
        Configuration c = zero_configuration(s);
        for (const TaskState& t : c.tasks) {
            if (cs.is_exit_point(t.pc)) {
                Shape reduced = s;
                reduced.tasks.erase(reduced.tasks.begin() + t.id);
                exit_parents_.insert(canonical(reduced));
            }
            if (!cs.is_terminated(t.pc) && cs.head(t.pc).kind == Stmt::Kind::Wait) {
                int p = t.pv.at(cs.head(t.pc).var);
                if (p < 0 || !c.phases(p, t.id))
                    continue;
                Configuration n = c;
                n.tasks[t.id].pc = cs.tail(t.pc);
                visit(n);
                continue;
            }
            for (StepResult& r : step(cs, c, t.id))
                if (r.kind == StepResult::Kind::Ok)
                    visit(r.next);
        }
    }
}

bool Skeleton::may_contain(const Constraint& phi) const
{
    return shapes_.contains(canonical(shape_of(phi)));
}

bool Skeleton::has_exit_parent(const Constraint& phi) const
{
    return exit_parents_.contains(canonical(shape_of(phi)));
}

std::vector<Constraint> Skeleton::bad_set(Property kind) const
{
    std::vector<Constraint> out;
    for (const Shape& s : shapes_)
        for (Constraint& phi : bad_constraints(*cs_, s, kind))
            out.push_back(std::move(phi));
    return out;
}

} // namespace phz
