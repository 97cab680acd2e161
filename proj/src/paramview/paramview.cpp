#include "phz/paramview.hpp"

#include "phz/targets.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <map>
#include <numeric>
#include <set>

namespace phz {

namespace {

GapGraph pinned_zero(std::vector<Var> vars)
{
    GapGraph g(vars);
    for (Var v : vars) {
        g.raise(v, kZero, 0);
        g.raise(kZero, v, 0);
    }
    g.close_in_place();
    return g;
}

class Emitter {
public:
    Emitter(std::vector<PostStep>& out, int t, int from) : out_(out), t_(t), from_(from) {}

    void operator()(Constraint psi, const char* rule)
    {
        auto st = strengthen(std::move(psi));
        if (st)
            out_.push_back({std::move(*st), t_, from_, rule});
    }

private:
    std::vector<PostStep>& out_;
    int t_;
    int from_;
};

// Phaser of a phaser statement when the access is legal.
int usable(const Constraint& phi, int t, int var)
{
    int p = phi.tasks[t].pv.at(var);
    return p >= 0 && phi.is_registered(t, p) ? p : -1;
}

void post_asynch(const ControlSet& cs, const Constraint& phi, int t, int from, const Stmt& h, Emitter& emit)
{
    const TaskDecl& callee = cs.program().tasks.at(h.callee);
    for (int v : h.args)
        if (usable(phi, t, v) < 0)
            return;
    Constraint psi = phi;
    psi.tasks[t].pc = cs.tail(from);
    const int u = phi.num_tasks();
    SymTask child{cs.initial(h.callee), std::vector<int>(callee.locals.size(), -1)};
    for (std::size_t i = 0; i < h.args.size(); ++i) {
        int p = phi.tasks[t].pv[h.args[i]];
        child.pv[i] = p;
        GapGraph& g = psi.graphs[p];
        if (g.has_var(omega(u)))
            continue; // passed twice: the first registration wins
        bool finite = phi.has_signal(t, p) && has_finite_signal(callee.locals[i].mode);
        std::vector<Var> add{omega(u)};
        if (finite)
            add.push_back(sigma(u));
        g = with_vars(g, add);
        g.raise(omega(u), omega(t), 0);
        g.raise(omega(t), omega(u), 0);
        if (finite) {
            g.raise(sigma(u), sigma(t), 0);
            g.raise(sigma(t), sigma(u), 0);
        }
        g.close_in_place();
    }
    psi.tasks.push_back(std::move(child));
    emit(std::move(psi), "asynch");
}

} // namespace

std::vector<PostStep> post(const ControlSet& cs, const Constraint& phi, int t)
{
    std::vector<PostStep> out;
    const int from = phi.tasks.at(t).pc;
    Emitter emit(out, t, from);
    if (cs.is_terminated(from)) {
        Constraint psi = phi;
        remove_task(psi, t);
        emit(std::move(psi), "exit");
        return out;
    }
    const Stmt& h = cs.head(from);
    const TaskDecl& decl = cs.program().tasks.at(cs.owner(from));
    auto moved = [&](int pc) {
        Constraint psi = phi;
        psi.tasks[t].pc = pc;
        return psi;
    };
    switch (h.kind) {
    case Stmt::Kind::NewPhaser: {
        Constraint psi = moved(cs.tail(from));
        std::vector<Var> vars{omega(t)};
        if (has_finite_signal(decl.locals[h.var].mode))
            vars.push_back(sigma(t));
        psi.tasks[t].pv[h.var] = psi.num_phasers();
        psi.graphs.push_back(pinned_zero(vars));
        emit(std::move(psi), "newPhaser");
        break;
    }
    case Stmt::Kind::Signal: {
        int p = usable(phi, t, h.var);
        if (p < 0)
            break;
        Constraint psi = moved(cs.tail(from));
        if (psi.has_signal(t, p))
            psi.graphs[p] = shift(psi.graphs[p], sigma(t), 1);
        emit(std::move(psi), "signal");
        break;
    }
    case Stmt::Kind::Wait: {
        int p = usable(phi, t, h.var);
        if (p < 0)
            break;
        Constraint psi = moved(cs.tail(from));
        GapGraph g = psi.graphs[p];
        for (int u : psi.registered(p))
            if (g.has_var(sigma(u)))
                g.raise(sigma(u), omega(t), 1);
        g.close_in_place();
        if (g.is_unsat())
            break;
        psi.graphs[p] = shift(g, omega(t), 1);
        emit(std::move(psi), "wait");
        break;
    }
    case Stmt::Kind::Drop: {
        int p = usable(phi, t, h.var);
        if (p < 0)
            break;
        Constraint psi = moved(cs.tail(from));
        Var gone[] = {omega(t), sigma(t)};
        psi.graphs[p] = project_away(psi.graphs[p], gone);
        emit(std::move(psi), "drop");
        break;
    }
    case Stmt::Kind::Asynch: post_asynch(cs, phi, t, from, h, emit); break;
    case Stmt::Kind::Exit: {
        Constraint psi = phi;
        remove_task(psi, t);
        emit(std::move(psi), "exit");
        break;
    }
    case Stmt::Kind::Assign: {
        CondValues v = evaluate(*h.cond, phi.bv);
        for (bool value : {true, false}) {
            if (value ? !v.can_be_true : !v.can_be_false)
                continue;
            Constraint psi = moved(cs.tail(from));
            if (value)
                psi.bv |= std::uint64_t{1} << h.var;
            else
                psi.bv &= ~(std::uint64_t{1} << h.var);
            emit(std::move(psi), "assign");
        }
        break;
    }
    case Stmt::Kind::Assert:
        if (evaluate(*h.cond, phi.bv).can_be_true)
            emit(moved(cs.tail(from)), "assert");
        break;
    case Stmt::Kind::While:
    case Stmt::Kind::If: {
        CondValues v = evaluate(*h.cond, phi.bv);
        if (v.can_be_true)
            emit(moved(cs.enter(from)), "cond-true");
        if (v.can_be_false)
            emit(moved(cs.tail(from)), "cond-false");
        break;
    }
    }
    return out;
}

std::vector<PostStep> post_all(const ControlSet& cs, const Constraint& phi)
{
    std::vector<PostStep> out;
    for (int t = 0; t < phi.num_tasks(); ++t)
        for (PostStep& s : post(cs, phi, t))
            out.push_back(std::move(s));
    return out;
}

Constraint project_view(const Constraint& phi, std::span<const int> tasks)
{
    Constraint psi = phi;
    for (int t = phi.num_tasks() - 1; t >= 0; --t)
        if (std::find(tasks.begin(), tasks.end(), t) == tasks.end())
            remove_task(psi, t);
    return psi;
}

namespace {

// Calls f on every k-subset of {0..n-1}, in lexicographic order.
template <class F>
void for_each_subset(int n, int k, F&& f)
{
    if (k > n)
        return;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        f(std::span<const int>(idx));
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i)
            --i;
        if (i < 0)
            return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j)
            idx[j] = idx[j - 1] + 1;
    }
}

RegKind reg_kind(const Constraint& phi, int t, int p)
{
    if (!phi.is_registered(t, p))
        return RegKind::None;
    return phi.has_signal(t, p) ? RegKind::Finite : RegKind::WaitOnly;
}

} // namespace

std::vector<Constraint> abstract_k(std::span<const Constraint> phis, int k)
{
    std::vector<Constraint> out;
    for (const Constraint& phi : phis) {
        if (phi.num_tasks() <= k) {
            out.push_back(phi);
            continue;
        }
        for_each_subset(phi.num_tasks(), k, [&](std::span<const int> u) { out.push_back(project_view(phi, u)); });
    }
    return out;
}

std::vector<Constraint> concretize_k(const ControlSet& cs, std::span<const Constraint> views, int k)
{
    std::vector<bool> spawned(cs.program().tasks.size(), false);
    for (int pc = 0; pc < cs.size(); ++pc)
        if (!cs.is_terminated(pc) && cs.head(pc).kind == Stmt::Kind::Asynch)
            spawned[cs.head(pc).callee] = true;
    auto possible = [&](const Constraint& c) {
        std::vector<int> count(spawned.size(), 0);
        for (const SymTask& t : c.tasks) {
            int d = cs.owner(t.pc);
            if (!spawned[d] && ++count[d] > 1)
                return false;
        }
        return true;
    };
    std::vector<const Constraint*> full;
    std::set<ShapeKey> keys;
    for (const Constraint& v : views)
        if (v.num_tasks() == k) {
            full.push_back(&v);
            keys.insert(shape_key(v));
        }
    std::vector<Constraint> out;
    for (const Constraint* a : full) {
        const int np = a->num_phasers();
        std::vector<int> pi(np);
        for (const Constraint* b : full) {
            if (b->bv != a->bv || b->num_phasers() != np)
                continue;
            std::iota(pi.begin(), pi.end(), 0);
            do { // b's phaser q is a's phaser pi[q]
                for (int i = 0; i < k; ++i) {
                    std::vector<int> ao; // a's tasks shared with b
                    for (int x = 0; x < k; ++x)
                        if (x != i)
                            ao.push_back(x);
                    for (int j = 0; j < k; ++j) {
                        std::vector<int> bo;
                        for (int x = 0; x < k; ++x)
                            if (x != j)
                                bo.push_back(x);
                        do {
                            auto mapped_pv = [&](int bt) {
                                std::vector<int> pv = b->tasks[bt].pv;
                                for (int& p : pv)
                                    if (p >= 0)
                                        p = pi[p];
                                return pv;
                            };
                            bool agree = true;
                            for (std::size_t m = 0; agree && m < ao.size(); ++m) {
                                int x = ao[m], y = bo[m];
                                agree = a->tasks[x].pc == b->tasks[y].pc && a->tasks[x].pv == mapped_pv(y);
                                for (int q = 0; agree && q < np; ++q)
                                    agree = reg_kind(*a, x, pi[q]) == reg_kind(*b, y, q);
                            }
                            if (!agree)
                                continue;
                            Constraint c = *a;
                            c.tasks.push_back({b->tasks[j].pc, mapped_pv(j)});
                            if (!possible(c))
                                continue;
                            std::map<Var, Var> ren;
                            for (std::size_t m = 0; m < bo.size(); ++m) {
                                ren[omega(bo[m])] = omega(ao[m]);
                                ren[sigma(bo[m])] = sigma(ao[m]);
                            }
                            ren[omega(j)] = omega(k);
                            ren[sigma(j)] = sigma(k);
                            bool sat = true;
                            for (int q = 0; sat && q < np; ++q) {
                                GapGraph& g = c.graphs[pi[q]];
                                g = conjoin(g, substitute(b->graphs[q], ren));
                                sat = !g.is_unsat();
                            }
                            if (!sat)
                                continue;
                            auto st = strengthen(std::move(c));
                            if (!st)
                                continue;
                            // every k-view of a configuration in the result is some view
                            bool covered = true;
                            for_each_subset(k + 1, k, [&](std::span<const int> u) {
                                if (covered)
                                    covered = keys.contains(shape_key(project_view(*st, u)));
                            });
                            if (covered)
                                out.push_back(std::move(*st));
                        } while (std::next_permutation(bo.begin(), bo.end()));
                    }
                }
            } while (std::next_permutation(pi.begin(), pi.end()));
        }
    }
    return minimize(std::move(out));
}

bool intersects_bad(const ControlSet& cs, const Constraint& phi, Property kind)
{
    Shape s = shape_of(phi);
    if (kind != Property::Deadlock)
        return shape_is_bad(cs, s, kind);
    for (const Constraint& beta : bad_constraints(cs, s, kind)) {
        bool sat = true;
        for (int p = 0; sat && p < phi.num_phasers(); ++p)
            sat = !conjoin(phi.graphs[p], beta.graphs[p]).is_unsat();
        if (sat)
            return true;
    }
    return false;
}

namespace {

// Entailment antichain with a parent link per element, for traces.
class Store {
public:
    struct Node {
        Constraint phi;
        std::size_t parent;
        TraceStep step;
        bool alive = true;
    };

    /// Adds phi unless covered; returns its id.
    std::optional<std::size_t> add(Constraint phi, std::size_t parent, TraceStep step)
    {
        ShapeKey key = shape_key(phi);
        auto& bucket = buckets_[key];
        for (std::size_t id : bucket)
            if (entails(nodes_[id].phi, phi))
                return std::nullopt;
        std::erase_if(bucket, [&](std::size_t id) {
            if (entails(phi, nodes_[id].phi)) {
                nodes_[id].alive = false;
                --alive_;
                return true;
            }
            return false;
        });
        std::size_t id = nodes_.size();
        nodes_.push_back({std::move(phi), parent == SIZE_MAX ? id : parent, std::move(step)});
        bucket.push_back(id);
        ++alive_;
        return id;
    }

    const Node& at(std::size_t id) const { return nodes_[id]; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t alive() const { return alive_; }

    std::vector<Constraint> alive_constraints() const
    {
        std::vector<Constraint> out;
        for (const Node& n : nodes_)
            if (n.alive)
                out.push_back(n.phi);
        return out;
    }

    Trace trace_to(std::size_t id) const
    {
        Trace tr;
        for (std::size_t n = id;; n = nodes_[n].parent) {
            tr.constraints.push_back(nodes_[n].phi);
            tr.ids.push_back(n);
            if (nodes_[n].parent == n)
                break;
            tr.steps.push_back(nodes_[n].step);
        }
        std::reverse(tr.constraints.begin(), tr.constraints.end());
        std::reverse(tr.ids.begin(), tr.ids.end());
        std::reverse(tr.steps.begin(), tr.steps.end());
        return tr;
    }

private:
    std::deque<Node> nodes_;
    std::map<ShapeKey, std::vector<std::size_t>> buckets_;
    std::size_t alive_ = 0;
};

} // namespace

Fixpoint param_fixpoint(const ControlSet& cs, int k, bool project, const ParamOptions& opts,
                        std::optional<Property> kind)
{
    auto start = std::chrono::steady_clock::now();
    Fixpoint fp;
    FixpointStats& st = fp.stats;
    Store store;
    auto finish = [&](Fixpoint::Status s) {
        fp.status = s;
        fp.views = store.alive_constraints();
        st.views = fp.views.size();
        st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return fp;
    };
    auto hit = [&](const Constraint& phi, const char* level) {
        return kind && intersects_bad(cs, phi, *kind) ? (fp.witness = phi, fp.witness_level = level, true) : false;
    };
    // successors are relaxed and capped by the phaser bound
    auto successors_of = [&](const Constraint& phi) {
        std::vector<PostStep> out;
        for (PostStep& s : post_all(cs, phi)) {
            ++st.posts;
            if (s.succ.num_phasers() > opts.max_phasers) {
                st.phaser_bound_hit = true;
                continue;
            }
            s.succ = relax(s.succ, opts.degree_bound);
            st.max_degree = std::max(st.max_degree, degree_of(s.succ));
            out.push_back(std::move(s));
        }
        return out;
    };

    Constraint init = constraint_of(initial(cs));
    if (hit(init, "view")) {
        fp.trace = Trace{{init}, {0}, {}};
        return finish(Fixpoint::Status::BadHit);
    }

    if (!project) {
        std::deque<std::size_t> work{*store.add(init, SIZE_MAX, {})};
        while (!work.empty()) {
            std::size_t id = work.front();
            work.pop_front();
            if (!store.at(id).alive)
                continue;
            if (++st.rounds > opts.max_views || store.alive() > opts.max_views)
                return finish(Fixpoint::Status::Overflow);
            const Constraint phi = store.at(id).phi;
            for (PostStep& s : successors_of(phi)) {
                if (s.succ.num_tasks() > k)
                    continue;
                TraceStep step{s.task, s.from_pc, fired_statement(cs, s.from_pc), s.rule};
                bool bad = hit(s.succ, "view");
                auto nid = store.add(std::move(s.succ), id, std::move(step));
                if (bad) {
                    // a covered successor still reaches bad through the covering element
                    if (nid)
                        fp.trace = store.trace_to(*nid);
                    return finish(Fixpoint::Status::BadHit);
                }
                if (nid)
                    work.push_back(*nid);
            }
        }
        return finish(Fixpoint::Status::Stable);
    }

    for (Constraint& v : abstract_k(std::span<const Constraint>(&init, 1), k))
        store.add(std::move(v), SIZE_MAX, {});
    Store done; // sources already expanded
    while (true) {
        if (++st.rounds > opts.max_rounds)
            return finish(Fixpoint::Status::Overflow);
        std::vector<Constraint> views = store.alive_constraints();
        std::vector<Constraint> sources = views;
        for (Constraint& c : concretize_k(cs, views, k)) {
            ++st.candidates;
            if (hit(c, "concretized"))
                return finish(Fixpoint::Status::BadHit);
            sources.push_back(std::move(c));
        }
        bool changed = false;
        for (const Constraint& src : sources) {
            if (!done.add(src, SIZE_MAX, {}))
                continue;
            for (PostStep& s : successors_of(src)) {
                if (hit(s.succ, "successor"))
                    return finish(Fixpoint::Status::BadHit);
                for (Constraint& v : abstract_k(std::span<const Constraint>(&s.succ, 1), k))
                    if (store.add(std::move(v), SIZE_MAX, {}))
                        changed = true;
            }
            if (store.alive() > opts.max_views)
                return finish(Fixpoint::Status::Overflow);
        }
        if (!changed)
            return finish(Fixpoint::Status::Stable);
    }
}

std::string_view to_string(ParamResult::Verdict v)
{
    switch (v) {
    case ParamResult::Verdict::SafeForAllN: return "safe-for-all-n";
    case ParamResult::Verdict::PotentialViolation: return "potential-violation";
    case ParamResult::Verdict::TraceViolation: return "trace-violation";
    case ParamResult::Verdict::BoundExceeded: return "bound-exceeded";
    }
    return "?";
}

ParamResult param_check(const ControlSet& cs, Property kind, const ParamOptions& opts)
{
    ParamResult r;
    auto note = [&](int k, const char* phase, const Fixpoint& f) {
        static constexpr const char* names[] = {"stable", "bad", "overflow"};
        std::string line = "k=" + std::to_string(k) + " " + phase + ": " + names[static_cast<int>(f.status)] +
                           ", " + std::to_string(f.stats.views) + " views, " + std::to_string(f.stats.posts) +
                           " posts";
        if (f.witness)
            line += ", bad " + f.witness_level;
        r.log.push_back(std::move(line));
        r.stats = f.stats;
    };
    for (int k = opts.view_size; k <= opts.max_view_size; ++k) {
        r.view_size = k;
        Fixpoint exact = param_fixpoint(cs, k, false, opts, kind);
        note(k, "whole", exact);
        if (exact.status == Fixpoint::Status::Overflow) {
            r.verdict = ParamResult::Verdict::BoundExceeded;
            r.diagnostic = "view fixpoint exceeded its iteration or size cap";
            return r;
        }
        if (exact.status == Fixpoint::Status::BadHit) {
            r.witness = exact.witness;
            r.trace = exact.trace;
            if (r.trace) {
                r.replay = replay_trace(cs, *r.trace, kind);
                if (r.replay->ok) {
                    r.verdict = ParamResult::Verdict::TraceViolation;
                    return r;
                }
            }
            r.verdict = ParamResult::Verdict::PotentialViolation;
            r.diagnostic = "symbolic trace does not replay; raise the degree bound";
            return r;
        }
        Fixpoint views = param_fixpoint(cs, k, true, opts, kind);
        note(k, "views", views);
        if (views.status == Fixpoint::Status::Overflow) {
            r.verdict = ParamResult::Verdict::BoundExceeded;
            r.diagnostic = "view fixpoint exceeded its iteration or size cap";
            return r;
        }
        if (views.status == Fixpoint::Status::Stable) {
            if (exact.stats.phaser_bound_hit || views.stats.phaser_bound_hit) {
                r.verdict = ParamResult::Verdict::BoundExceeded;
                r.diagnostic = "program creates more than " + std::to_string(opts.max_phasers) + " phasers";
                return r;
            }
            r.verdict = ParamResult::Verdict::SafeForAllN;
            return r;
        }
        r.witness = views.witness;
    }
    r.verdict = ParamResult::Verdict::PotentialViolation;
    r.diagnostic = "views of size " + std::to_string(opts.max_view_size) +
                   " meet the bad set; retry with a larger view size";
    return r;
}

} // namespace phz
