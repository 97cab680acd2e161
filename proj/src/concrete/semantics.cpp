#include "phz/concrete.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace phz {

std::string_view to_string(Property p)
{
    switch (p) {
    case Property::Assert: return "assert";
    case Property::Race: return "race";
    case Property::Runtime: return "runtime";
    case Property::Deadlock: return "deadlock";
    }
    return "?";
}

std::optional<Property> property_from_string(std::string_view s)
{
    for (Property p : kAllProperties)
        if (to_string(p) == s)
            return p;
    if (s == "assertion")
        return Property::Assert;
    return std::nullopt;
}

const Registration* PhaserState::find(int task) const
{
    auto it = std::lower_bound(regs.begin(), regs.end(), task,
                               [](const Registration& r, int t) { return r.task < t; });
    return it != regs.end() && it->task == task ? &*it : nullptr;
}

const TaskState* Configuration::task(int id) const
{
    auto it = std::lower_bound(tasks.begin(), tasks.end(), id, [](const TaskState& t, int i) { return t.id < i; });
    return it != tasks.end() && it->id == id ? &*it : nullptr;
}

const PhaserState* Configuration::phaser(int id) const
{
    auto it =
        std::lower_bound(phasers.begin(), phasers.end(), id, [](const PhaserState& p, int i) { return p.id < i; });
    return it != phasers.end() && it->id == id ? &*it : nullptr;
}

const Phases* Configuration::phases(int phaser_id, int task_id) const
{
    const PhaserState* p = phaser(phaser_id);
    if (!p)
        return nullptr;
    const Registration* r = p->find(task_id);
    return r ? &r->phases : nullptr;
}

Configuration Configuration::normalized() const
{
    Configuration out;
    out.bv = bv;
    auto task_rank = [&](int id) {
        return static_cast<int>(std::lower_bound(tasks.begin(), tasks.end(), id,
                                                 [](const TaskState& t, int i) { return t.id < i; }) -
                                tasks.begin());
    };
    auto phaser_rank = [&](int id) {
        return static_cast<int>(std::lower_bound(phasers.begin(), phasers.end(), id,
                                                 [](const PhaserState& p, int i) { return p.id < i; }) -
                                phasers.begin());
    };
    for (const TaskState& t : tasks) {
        TaskState n = t;
        n.id = task_rank(t.id);
        for (int& p : n.pv)
            if (p >= 0)
                p = phaser_rank(p);
        out.tasks.push_back(std::move(n));
    }
    for (const PhaserState& p : phasers) {
        PhaserState n{phaser_rank(p.id), {}};
        for (const Registration& r : p.regs)
            n.regs.push_back({task_rank(r.task), r.phases});
        out.phasers.push_back(std::move(n));
    }
    out.next_task = static_cast<int>(tasks.size());
    out.next_phaser = static_cast<int>(phasers.size());
    return out;
}

bool Configuration::operator==(const Configuration& o) const
{
    return bv == o.bv && tasks == o.tasks && phasers == o.phasers;
}

namespace {

std::string phase_str(Phase p)
{
    return p == kInfinitePhase ? "inf" : std::to_string(p);
}

TaskState& task_mut(Configuration& c, int id)
{
    auto it = std::lower_bound(c.tasks.begin(), c.tasks.end(), id, [](const TaskState& t, int i) { return t.id < i; });
    return *it;
}

PhaserState* phaser_mut(Configuration& c, int id)
{
    auto it = std::lower_bound(c.phasers.begin(), c.phasers.end(), id,
                               [](const PhaserState& p, int i) { return p.id < i; });
    return it != c.phasers.end() && it->id == id ? &*it : nullptr;
}

Registration* reg_mut(Configuration& c, int phaser_id, int task_id)
{
    PhaserState* p = phaser_mut(c, phaser_id);
    if (!p)
        return nullptr;
    auto it = std::lower_bound(p->regs.begin(), p->regs.end(), task_id,
                               [](const Registration& r, int t) { return r.task < t; });
    return it != p->regs.end() && it->task == task_id ? &*it : nullptr;
}

void add_reg(PhaserState& p, Registration r)
{
    auto it = std::lower_bound(p.regs.begin(), p.regs.end(), r.task,
                               [](const Registration& x, int t) { return x.task < t; });
    p.regs.insert(it, r);
}

void remove_reg(PhaserState& p, int task_id)
{
    std::erase_if(p.regs, [&](const Registration& r) { return r.task == task_id; });
}

void remove_task(Configuration& c, int task_id)
{
    std::erase_if(c.tasks, [&](const TaskState& t) { return t.id == task_id; });
    for (PhaserState& p : c.phasers)
        remove_reg(p, task_id);
}

// The phaser a phaser statement operates on, when the access is legal.
std::optional<int> usable_phaser(const Configuration& c, const TaskState& t, int var)
{
    int p = t.pv.at(var);
    if (p < 0 || !c.phases(p, t.id))
        return std::nullopt;
    return p;
}

bool faults_at_runtime(const Configuration& c, const TaskState& t, const Stmt& h)
{
    switch (h.kind) {
    case Stmt::Kind::Drop:
    case Stmt::Kind::Signal:
    case Stmt::Kind::Wait: return !usable_phaser(c, t, h.var);
    case Stmt::Kind::Asynch:
        return std::any_of(h.args.begin(), h.args.end(), [&](int v) { return !usable_phaser(c, t, v); });
    default: return false;
    }
}

} // namespace

std::string to_string(const ControlSet& cs, const Configuration& c)
{
    const Program& prg = cs.program();
    std::ostringstream os;
    os << "bools:";
    for (std::size_t b = 0; b < prg.bools.size(); ++b)
        os << " " << prg.bools[b] << "=" << (((c.bv >> b) & 1U) ? "true" : "false");
    os << "\n";
    for (const TaskState& t : c.tasks) {
        const TaskDecl& decl = prg.tasks.at(cs.owner(t.pc));
        os << "task " << t.id << " at " << cs.describe(t.pc);
        for (std::size_t v = 0; v < t.pv.size(); ++v)
            if (t.pv[v] >= 0)
                os << " " << decl.locals[v].name << "->p" << t.pv[v];
        os << "\n";
    }
    for (const PhaserState& p : c.phasers) {
        os << "phaser p" << p.id << ":";
        for (const Registration& r : p.regs)
            os << " t" << r.task << "(" << phase_str(r.phases.wait) << "," << phase_str(r.phases.sig) << ")";
        os << "\n";
    }
    return os.str();
}

Configuration initial(const ControlSet& cs)
{
    const Program& prg = cs.program();
    Configuration c;
    TaskState main;
    main.id = 0;
    main.pc = cs.initial(prg.entry);
    main.pv.assign(prg.tasks[prg.entry].locals.size(), -1);
    c.tasks.push_back(std::move(main));
    c.next_task = 1;
    return c;
}

std::vector<StepResult> step(const ControlSet& cs, const Configuration& c, int task_id)
{
    const TaskState* tp = c.task(task_id);
    if (!tp)
        throw std::invalid_argument("step of a task that does not exist");
    const TaskState& t = *tp;
    const Program& prg = cs.program();
    std::vector<StepResult> out;
    auto ok = [&](Configuration n) { out.push_back({StepResult::Kind::Ok, std::move(n)}); };
    auto bad = [&](StepResult::Kind k) { out.push_back({k, c}); };

    if (cs.is_terminated(t.pc)) {
        Configuration n = c;
        remove_task(n, t.id);
        ok(std::move(n));
        return out;
    }
    const Stmt& h = cs.head(t.pc);
    if (faults_at_runtime(c, t, h)) {
        bad(StepResult::Kind::BadRuntime);
        return out;
    }
    const TaskDecl& decl = prg.tasks.at(cs.owner(t.pc));
    auto advanced = [&](int pc) {
        Configuration n = c;
        task_mut(n, t.id).pc = pc;
        return n;
    };

    switch (h.kind) {
    case Stmt::Kind::NewPhaser: {
        Configuration n = advanced(cs.tail(t.pc));
        int p = n.next_phaser++;
        Phases ph{0, has_finite_signal(decl.locals[h.var].mode) ? 0 : kInfinitePhase};
        n.phasers.push_back({p, {{t.id, ph}}});
        task_mut(n, t.id).pv[h.var] = p;
        ok(std::move(n));
        break;
    }
    case Stmt::Kind::Signal: {
        Configuration n = advanced(cs.tail(t.pc));
        Registration* r = reg_mut(n, t.pv[h.var], t.id);
        if (r->phases.sig != kInfinitePhase)
            ++r->phases.sig;
        ok(std::move(n));
        break;
    }
    case Stmt::Kind::Wait: {
        if (is_blocked(cs, c, t.id)) {
            bad(StepResult::Kind::Blocked);
            break;
        }
        Configuration n = advanced(cs.tail(t.pc));
        ++reg_mut(n, t.pv[h.var], t.id)->phases.wait;
        ok(std::move(n));
        break;
    }
    case Stmt::Kind::Drop: {
        Configuration n = advanced(cs.tail(t.pc));
        remove_reg(*phaser_mut(n, t.pv[h.var]), t.id);
        ok(std::move(n));
        break;
    }
    case Stmt::Kind::Asynch: {
        Configuration n = advanced(cs.tail(t.pc));
        const TaskDecl& callee = prg.tasks.at(h.callee);
        TaskState u;
        u.id = n.next_task++;
        u.pc = cs.initial(h.callee);
        u.pv.assign(callee.locals.size(), -1);
        for (std::size_t i = 0; i < h.args.size(); ++i) {
            int p = t.pv[h.args[i]];
            u.pv[i] = p;
            PhaserState& ps = *phaser_mut(n, p);
            if (ps.find(u.id))
                continue; // same phaser passed twice: first registration wins
            Phases ph = *c.phases(p, t.id);
            if (!has_finite_signal(callee.locals[i].mode))
                ph.sig = kInfinitePhase;
            add_reg(ps, {u.id, ph});
        }
        n.tasks.push_back(std::move(u)); // fresh ids are the largest
        ok(std::move(n));
        break;
    }
    case Stmt::Kind::Exit: {
        Configuration n = c;
        remove_task(n, t.id);
        ok(std::move(n));
        break;
    }
    case Stmt::Kind::Assign: {
        CondValues v = evaluate(*h.cond, c.bv);
        for (bool value : {true, false}) {
            if (value ? !v.can_be_true : !v.can_be_false)
                continue;
            Configuration n = advanced(cs.tail(t.pc));
            if (value)
                n.bv |= std::uint64_t{1} << h.var;
            else
                n.bv &= ~(std::uint64_t{1} << h.var);
            ok(std::move(n));
        }
        break;
    }
    case Stmt::Kind::Assert: {
        CondValues v = evaluate(*h.cond, c.bv);
        if (v.can_be_false)
            bad(StepResult::Kind::BadAssert);
        if (v.can_be_true)
            ok(advanced(cs.tail(t.pc)));
        break;
    }
    case Stmt::Kind::While:
    case Stmt::Kind::If: {
        CondValues v = evaluate(*h.cond, c.bv);
        if (v.can_be_true)
            ok(advanced(cs.enter(t.pc)));
        if (v.can_be_false)
            ok(advanced(cs.tail(t.pc)));
        break;
    }
    }
    return out;
}

std::vector<Transition> successors(const ControlSet& cs, const Configuration& c)
{
    std::vector<Transition> out;
    for (const TaskState& t : c.tasks) {
        auto results = step(cs, c, t.id);
        for (std::size_t i = 0; i < results.size(); ++i)
            if (results[i].kind == StepResult::Kind::Ok)
                out.push_back({t.id, static_cast<int>(i), std::move(results[i].next)});
    }
    return out;
}

std::optional<BlockWitness> is_blocked(const ControlSet& cs, const Configuration& c, int task_id)
{
    const TaskState* t = c.task(task_id);
    if (!t || cs.is_terminated(t->pc))
        return std::nullopt;
    const Stmt& h = cs.head(t->pc);
    if (h.kind != Stmt::Kind::Wait)
        return std::nullopt;
    int p = t->pv.at(h.var);
    if (p < 0)
        return std::nullopt;
    const Phases* mine = c.phases(p, task_id);
    if (!mine)
        return std::nullopt;
    for (const Registration& r : c.phaser(p)->regs)
        if (r.phases.sig <= mine->wait)
            return BlockWitness{p, r.task};
    return std::nullopt;
}

std::optional<std::vector<int>> is_deadlock(const ControlSet& cs, const Configuration& c)
{
    // blocked-by graph; a deadlock is exactly a cycle in it
    std::vector<int> ids;
    for (const TaskState& t : c.tasks)
        ids.push_back(t.id);
    auto rank = [&](int id) { return static_cast<int>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin()); };
    std::vector<std::vector<int>> by(ids.size());
    for (const TaskState& t : c.tasks) {
        if (cs.is_terminated(t.pc) || cs.head(t.pc).kind != Stmt::Kind::Wait)
            continue;
        int p = t.pv.at(cs.head(t.pc).var);
        const Phases* mine = p >= 0 ? c.phases(p, t.id) : nullptr;
        if (!mine)
            continue;
        for (const Registration& r : c.phaser(p)->regs)
            if (r.phases.sig <= mine->wait)
                by[rank(t.id)].push_back(rank(r.task));
    }
    std::vector<int> color(ids.size(), 0), stack;
    std::optional<std::vector<int>> found;
    std::function<bool(int)> dfs = [&](int v) {
        color[v] = 1;
        stack.push_back(v);
        for (int w : by[v]) {
            if (color[w] == 1) {
                std::vector<int> cycle;
                auto it = std::find(stack.begin(), stack.end(), w);
                for (; it != stack.end(); ++it)
                    cycle.push_back(ids[*it]);
                found = std::move(cycle);
                return true;
            }
            if (color[w] == 0 && dfs(w))
                return true;
        }
        stack.pop_back();
        color[v] = 2;
        return false;
    };
    for (std::size_t v = 0; v < ids.size(); ++v)
        if (color[v] == 0 && dfs(static_cast<int>(v)))
            return found;
    return std::nullopt;
}

std::optional<RaceWitness> detect_race(const ControlSet& cs, const Configuration& c)
{
    for (const TaskState& t : c.tasks) {
        if (cs.is_terminated(t.pc) || cs.head(t.pc).kind != Stmt::Kind::Assign)
            continue;
        int b = cs.head(t.pc).var;
        for (const TaskState& u : c.tasks) {
            if (u.id == t.id || cs.is_terminated(u.pc))
                continue;
            const Stmt& s = cs.head(u.pc);
            bool hit = false;
            switch (s.kind) {
            case Stmt::Kind::Assign: hit = s.var == b || s.cond->mentions(b); break;
            case Stmt::Kind::If:
            case Stmt::Kind::While:
            case Stmt::Kind::Assert: hit = s.cond->mentions(b); break;
            default: break;
            }
            if (hit)
                return RaceWitness{t.id, u.id, b};
        }
    }
    return std::nullopt;
}

std::optional<int> assert_fault(const ControlSet& cs, const Configuration& c)
{
    for (const TaskState& t : c.tasks) {
        if (cs.is_terminated(t.pc))
            continue;
        const Stmt& h = cs.head(t.pc);
        if (h.kind == Stmt::Kind::Assert && evaluate(*h.cond, c.bv).can_be_false)
            return t.id;
    }
    return std::nullopt;
}

std::optional<int> runtime_fault(const ControlSet& cs, const Configuration& c)
{
    for (const TaskState& t : c.tasks)
        if (!cs.is_terminated(t.pc) && faults_at_runtime(c, t, cs.head(t.pc)))
            return t.id;
    return std::nullopt;
}

bool is_bad(const ControlSet& cs, const Configuration& c, Property kind)
{
    switch (kind) {
    case Property::Assert: return assert_fault(cs, c).has_value();
    case Property::Race: return detect_race(cs, c).has_value();
    case Property::Runtime: return runtime_fault(cs, c).has_value();
    case Property::Deadlock: return is_deadlock(cs, c).has_value();
    }
    return false;
}

bool phase_invariant_holds(const Configuration& c)
{
    for (const PhaserState& p : c.phasers) {
        for (const Registration& r : p.regs) {
            if (r.phases.wait < 0 || r.phases.sig < 0 || r.phases.wait == kInfinitePhase)
                return false;
            for (const Registration& q : p.regs)
                if (r.phases.wait > q.phases.sig)
                    return false;
        }
    }
    return true;
}

std::string format_schedule(const std::vector<ScheduleStep>& schedule)
{
    std::ostringstream os;
    for (const ScheduleStep& s : schedule)
        os << s.task << " " << s.choice << "\n";
    return os.str();
}

std::vector<ScheduleStep> parse_schedule(const std::string& text)
{
    std::vector<ScheduleStep> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        ScheduleStep s;
        if (!(ls >> s.task))
            continue;
        if (!(ls >> s.choice))
            s.choice = 0;
        std::string extra;
        if (ls >> extra)
            throw std::runtime_error("schedule line " + std::to_string(lineno) + ": unexpected '" + extra + "'");
        out.push_back(s);
    }
    return out;
}

std::vector<Configuration> replay_schedule(const ControlSet& cs, const std::vector<ScheduleStep>& schedule)
{
    std::vector<Configuration> path{initial(cs)};
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const ScheduleStep& s = schedule[i];
        const Configuration& c = path.back();
        if (!c.task(s.task))
            throw std::runtime_error("schedule step " + std::to_string(i + 1) + ": no task " + std::to_string(s.task));
        auto results = step(cs, c, s.task);
        if (s.choice < 0 || s.choice >= static_cast<int>(results.size()) ||
            results[s.choice].kind != StepResult::Kind::Ok)
            throw std::runtime_error("schedule step " + std::to_string(i + 1) + ": task " + std::to_string(s.task) +
                                     " cannot take choice " + std::to_string(s.choice));
        path.push_back(results[s.choice].next.normalized());
    }
    return path;
}

} // namespace phz
