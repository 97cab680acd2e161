#include "phz/pre.hpp"

#include <algorithm>

namespace phz {

std::string fired_statement(const ControlSet& cs, int from_pc)
{
    if (cs.is_terminated(from_pc))
        return "<end>";
    return print_head(cs.program(), cs.owner(from_pc), cs.head(from_pc));
}

namespace {

class Collector {
public:
    Collector(const PreOptions& opts, std::vector<PreStep>& out) : opts_(opts), out_(out) {}

    void emit(Constraint psi, int task, int from_pc, const char* rule)
    {
        auto st = strengthen(std::move(psi));
        if (!st)
            return;
        if (opts_.skeleton && !opts_.skeleton->may_contain(*st))
            return;
        if (out_.size() >= opts_.cap)
            throw PreOverflow("predecessor enumeration exceeds " + std::to_string(opts_.cap) + " constraints");
        out_.push_back({std::move(*st), task, from_pc, rule});
    }

private:
    const PreOptions& opts_;
    std::vector<PreStep>& out_;
};

bool admits_zero(const GapGraph& g)
{
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j)
            if (i != j && g.at(i, j) != kNegInf && g.at(i, j) > 0)
                return false;
    return true;
}

void pre_new_phaser(const ControlSet& cs, const Constraint& phi, int t, int from, const Stmt& h, Collector& out)
{
    const TaskDecl& decl = cs.program().tasks.at(cs.owner(from));
    int p = phi.tasks[t].pv[h.var];
    if (p < 0)
        return;
    std::vector<int> reg = phi.registered(p);
    if (reg != std::vector<int>{t})
        return;
    if (phi.has_signal(t, p) != has_finite_signal(decl.locals[h.var].mode))
        return;
    for (int u = 0; u < phi.num_tasks(); ++u)
        for (std::size_t w = 0; w < phi.tasks[u].pv.size(); ++w)
            if (phi.tasks[u].pv[w] == p && (u != t || static_cast<int>(w) != h.var))
                return;
    if (!admits_zero(phi.graphs[p]))
        return;
    for (int q = -1; q < phi.num_phasers(); ++q) {
        if (q == p)
            continue;
        Constraint psi = phi;
        psi.tasks[t].pv[h.var] = q;
        psi.tasks[t].pc = from;
        remove_phaser(psi, p);
        out.emit(std::move(psi), t, from, "newPhaser");
    }
}

void pre_asynch(const ControlSet& cs, const Constraint& phi, int t, int from, const Stmt& h, Collector& out)
{
    const TaskDecl& callee = cs.program().tasks.at(h.callee);
    const std::vector<int>& tv = phi.tasks[t].pv;
    // phaser -> first parameter index it is passed as
    std::vector<int> first(phi.num_phasers(), -1);
    for (std::size_t i = 0; i < h.args.size(); ++i) {
        int p = tv[h.args[i]];
        if (p < 0 || !phi.is_registered(t, p))
            return; // the spawn would be a runtime error
        if (first[p] < 0)
            first[p] = static_cast<int>(i);
    }
    for (int u = 0; u < phi.num_tasks(); ++u) {
        if (u == t || phi.tasks[u].pc != cs.initial(h.callee))
            continue;
        const std::vector<int>& uv = phi.tasks[u].pv;
        bool ok = uv.size() == callee.locals.size();
        for (std::size_t i = 0; ok && i < uv.size(); ++i)
            ok = uv[i] == (i < h.args.size() ? tv[h.args[i]] : -1);
        for (int p = 0; ok && p < phi.num_phasers(); ++p) {
            bool expect_reg = first[p] >= 0;
            if (phi.is_registered(u, p) != expect_reg)
                ok = false;
            else if (expect_reg) {
                bool expect_sig = phi.has_signal(t, p) && has_finite_signal(callee.locals[first[p]].mode);
                ok = phi.has_signal(u, p) == expect_sig;
            }
        }
        if (!ok)
            continue;
        Constraint psi = phi;
        bool sat = true;
        for (int p = 0; p < psi.num_phasers() && sat; ++p) {
            if (first[p] < 0)
                continue;
            GapGraph& g = psi.graphs[p];
            g.raise(omega(u), omega(t), 0);
            g.raise(omega(t), omega(u), 0);
            if (g.has_var(sigma(u))) {
                g.raise(sigma(u), sigma(t), 0);
                g.raise(sigma(t), sigma(u), 0);
            }
            g.close_in_place();
            sat = !g.is_unsat();
        }
        if (!sat)
            continue;
        psi.tasks[t].pc = from;
        remove_task(psi, u);
        int nt = t - (u < t ? 1 : 0);
        out.emit(std::move(psi), nt, from, "asynch");
    }
}

} // namespace

std::vector<PreStep> pre(const ControlSet& cs, const Constraint& phi, int t, const PreOptions& opts)
{
    std::vector<PreStep> result;
    Collector out(opts, result);
    const Program& prg = cs.program();
    int to = phi.tasks.at(t).pc;
    for (const ControlEdge& e : cs.predecessors(to)) {
        int from = e.from;
        const Stmt& h = cs.head(from);
        const TaskDecl& decl = prg.tasks.at(cs.owner(from));
        auto moved = [&] {
            Constraint psi = phi;
            psi.tasks[t].pc = from;
            return psi;
        };
        int p = h.is_phaser_stmt() && h.kind != Stmt::Kind::Asynch && h.kind != Stmt::Kind::NewPhaser
                    ? phi.tasks[t].pv.at(h.var)
                    : -1;
        switch (h.kind) {
        case Stmt::Kind::Assign: {
            bool post = (phi.bv >> h.var) & 1U;
            for (int bit = 0; bit < 2; ++bit) {
                std::uint64_t bv = bit ? phi.bv | (std::uint64_t{1} << h.var) : phi.bv & ~(std::uint64_t{1} << h.var);
                CondValues v = evaluate(*h.cond, bv);
                if (post ? v.can_be_true : v.can_be_false) {
                    Constraint psi = moved();
                    psi.bv = bv;
                    out.emit(std::move(psi), t, from, "assign");
                }
            }
            break;
        }
        case Stmt::Kind::Assert:
            if (evaluate(*h.cond, phi.bv).can_be_true)
                out.emit(moved(), t, from, "assert");
            break;
        case Stmt::Kind::While:
        case Stmt::Kind::If: {
            CondValues v = evaluate(*h.cond, phi.bv);
            if (e.move == Move::CondTrue ? v.can_be_true : v.can_be_false)
                out.emit(moved(), t, from, e.move == Move::CondTrue ? "cond-true" : "cond-false");
            break;
        }
        case Stmt::Kind::Signal: {
            if (p < 0 || !phi.is_registered(t, p))
                break;
            Constraint psi = moved();
            if (psi.has_signal(t, p))
                psi.graphs[p] = shift(psi.graphs[p], sigma(t), -1);
            out.emit(std::move(psi), t, from, "signal");
            break;
        }
        case Stmt::Kind::Wait: {
            if (p < 0 || !phi.is_registered(t, p))
                break;
            Constraint psi = moved();
            GapGraph g = shift(psi.graphs[p], omega(t), -1);
            for (int u : psi.registered(p))
                if (g.has_var(sigma(u)))
                    g.raise(sigma(u), omega(t), 1);
            g.close_in_place();
            if (g.is_unsat())
                break;
            psi.graphs[p] = std::move(g);
            out.emit(std::move(psi), t, from, "wait");
            break;
        }
        case Stmt::Kind::Drop: {
            if (p < 0 || phi.is_registered(t, p))
                break;
            for (bool finite : {true, false}) {
                if (!decl.has_mode(finite))
                    continue;
                Constraint psi = moved();
                std::vector<Var> add{omega(t)};
                if (finite)
                    add.push_back(sigma(t));
                psi.graphs[p] = with_vars(psi.graphs[p], add);
                out.emit(std::move(psi), t, from, "drop");
            }
            break;
        }
        case Stmt::Kind::NewPhaser: pre_new_phaser(cs, phi, t, from, h, out); break;
        case Stmt::Kind::Asynch: pre_asynch(cs, phi, t, from, h, out); break;
        case Stmt::Kind::Exit: break; // exit points have no successors
        }
    }
    return result;
}

std::vector<PreStep> pre_exit(const ControlSet& cs, const Constraint& phi, const PreOptions& opts)
{
    std::vector<PreStep> result;
    if (phi.num_tasks() + 1 > opts.max_tasks)
        return result;
    if (opts.lazy_exit && opts.skeleton && !opts.skeleton->has_exit_parent(phi))
        return result;
    Collector out(opts, result);
    const Program& prg = cs.program();
    const int np = phi.num_phasers();
    const int t = phi.num_tasks();
    Shape base = opts.skeleton ? shape_of(phi) : Shape{};
    for (int pc : cs.exit_points()) {
        const TaskDecl& decl = prg.tasks.at(cs.owner(pc));
        std::vector<RegKind> kinds{RegKind::None};
        if (decl.has_mode(true))
            kinds.push_back(RegKind::Finite);
        if (decl.has_mode(false))
            kinds.push_back(RegKind::WaitOnly);
        std::size_t locals = decl.locals.size();
        std::vector<int> pv(locals, -1);
        while (true) {
            std::vector<std::size_t> r(np, 0);
            while (true) {
                bool keep = true;
                if (opts.skeleton) {
                    Shape s = base;
                    TaskShape ts{pc, pv, {}};
                    for (int q = 0; q < np; ++q)
                        ts.regs.push_back(kinds[r[q]]);
                    s.tasks.push_back(std::move(ts));
                    keep = opts.skeleton->contains(canonical(s));
                }
                if (keep) {
                    Constraint psi = phi;
                    psi.tasks.push_back({pc, pv});
                    for (int q = 0; q < np; ++q) {
                        if (kinds[r[q]] == RegKind::None)
                            continue;
                        std::vector<Var> add{omega(t)};
                        if (kinds[r[q]] == RegKind::Finite)
                            add.push_back(sigma(t));
                        psi.graphs[q] = with_vars(psi.graphs[q], add);
                    }
                    out.emit(std::move(psi), t, pc, "exit");
                }
                int q = 0;
                while (q < np && ++r[q] == kinds.size())
                    r[q++] = 0;
                if (q == np)
                    break;
            }
            std::size_t v = 0;
            while (v < locals && ++pv[v] == np)
                pv[v++] = -1;
            if (v == locals)
                break;
        }
    }
    return result;
}

std::vector<PreStep> pre_all(const ControlSet& cs, const Constraint& phi, const PreOptions& opts)
{
    std::vector<PreStep> out;
    for (int t = 0; t < phi.num_tasks(); ++t)
        for (PreStep& s : pre(cs, phi, t, opts))
            out.push_back(std::move(s));
    for (PreStep& s : pre_exit(cs, phi, opts))
        out.push_back(std::move(s));
    if (out.size() > opts.cap)
        throw PreOverflow("predecessor enumeration exceeds " + std::to_string(opts.cap) + " constraints");
    return out;
}

} // namespace phz
