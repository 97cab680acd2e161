#include "phz/checker.hpp"

#include <chrono>
#include <deque>
#include <map>
#include <queue>

namespace phz {

std::string_view to_string(CheckResult::Status s)
{
    switch (s) {
    case CheckResult::Status::Unreachable: return "unreachable";
    case CheckResult::Status::Reached: return "reached";
    case CheckResult::Status::BoundExceeded: return "bound-exceeded";
    }
    return "?";
}

namespace {

// Visited: an entailment antichain bucketed by shape key.
class Antichain {
public:
    /// Index of an element entailing phi (phi is subsumed), if any.
    bool subsumed(const Constraint& phi, const ShapeKey& key) const
    {
        auto it = buckets_.find(key);
        if (it == buckets_.end())
            return false;
        for (const auto& [id, psi] : it->second)
            if (entails(*psi, phi))
                return true;
        return false;
    }

    /// Removes the elements phi entails; returns their ids.
    std::vector<std::size_t> remove_entailed(const Constraint& phi, const ShapeKey& key)
    {
        std::vector<std::size_t> gone;
        auto it = buckets_.find(key);
        if (it == buckets_.end())
            return gone;
        std::erase_if(it->second, [&](const auto& e) {
            if (entails(phi, *e.second)) {
                gone.push_back(e.first);
                return true;
            }
            return false;
        });
        size_ -= gone.size();
        return gone;
    }

    void add(std::size_t id, const Constraint* phi, ShapeKey key)
    {
        buckets_[std::move(key)].push_back({id, phi});
        ++size_;
    }

    std::size_t size() const { return size_; }

private:
    std::map<ShapeKey, std::vector<std::pair<std::size_t, const Constraint*>>> buckets_;
    std::size_t size_ = 0;
};

struct Node {
    Constraint phi;
    std::size_t parent; // self for targets
    TraceStep step;     // from this node to its parent
    bool alive = true;
};

} // namespace

std::vector<Constraint> minimize(std::vector<Constraint> phis)
{
    std::vector<std::optional<Constraint>> keep;
    std::map<ShapeKey, std::vector<std::size_t>> by_key;
    for (Constraint& phi : phis) {
        ShapeKey key = shape_key(phi);
        auto& bucket = by_key[key];
        bool covered = false;
        for (std::size_t i : bucket)
            if (keep[i] && entails(*keep[i], phi)) {
                covered = true;
                break;
            }
        if (covered)
            continue;
        for (std::size_t i : bucket)
            if (keep[i] && entails(phi, *keep[i]))
                keep[i].reset();
        bucket.push_back(keep.size());
        keep.push_back(std::move(phi));
    }
    std::vector<Constraint> out;
    for (auto& k : keep)
        if (k)
            out.push_back(std::move(*k));
    return out;
}

CheckResult check(const ControlSet& cs, std::vector<Constraint> bad, const CheckOptions& opts,
                  const Skeleton* skeleton)
{
    auto start = std::chrono::steady_clock::now();
    CheckResult result;
    CheckStats& st = result.stats;
    std::deque<Node> nodes; // stable addresses for the antichain
    Antichain visited;
    std::deque<std::size_t> fifo;
    using Entry = std::pair<int, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> by_size;
    const Configuration init = initial(cs);

    PreOptions popts;
    popts.max_tasks = opts.max_tasks;
    popts.skeleton = opts.prune ? skeleton : nullptr;
    popts.lazy_exit = opts.lazy_exit;

    auto push = [&](std::size_t id) {
        if (opts.by_task_count)
            by_size.push({nodes[id].phi.num_tasks(), id});
        else
            fifo.push_back(id);
    };
    auto visit = [&](Constraint phi, std::size_t parent, TraceStep step) {
        ShapeKey key = shape_key(phi);
        if (visited.subsumed(phi, key)) {
            ++st.subsumed;
            return;
        }
        for (std::size_t gone : visited.remove_entailed(phi, key))
            nodes[gone].alive = false;
        std::size_t id = nodes.size();
        nodes.push_back({std::move(phi), parent == SIZE_MAX ? id : parent, std::move(step)});
        const Constraint& stored = nodes.back().phi;
        visited.add(id, &stored, std::move(key));
        st.max_degree = std::max(st.max_degree, degree_of(stored));
        st.all_free = st.all_free && is_free(stored);
        if (opts.on_visit)
            opts.on_visit(stored);
        push(id);
    };

    bad = minimize(std::move(bad));
    st.targets = bad.size();
    for (Constraint& phi : bad)
        visit(std::move(phi), SIZE_MAX, {});

    auto finish = [&] {
        st.visited = visited.size();
        st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    try {
        while (!fifo.empty() || !by_size.empty()) {
            std::size_t id;
            if (opts.by_task_count) {
                id = by_size.top().second;
                by_size.pop();
            }
            else {
                id = fifo.front();
                fifo.pop_front();
            }
            if (!nodes[id].alive)
                continue;
            if (++st.pops > opts.max_pops) {
                result.status = CheckResult::Status::BoundExceeded;
                result.diagnostic = "verification cap of " + std::to_string(opts.max_pops) + " constraints reached";
                finish();
                return result;
            }
            const Constraint phi = nodes[id].phi;
            if (phi.num_tasks() > opts.max_tasks || phi.num_phasers() > opts.max_phasers)
                continue;
            if (satisfies(init, phi)) {
                Trace tr;
                for (std::size_t n = id;; n = nodes[n].parent) {
                    tr.constraints.push_back(nodes[n].phi);
                    tr.ids.push_back(n);
                    if (nodes[n].parent == n)
                        break;
                    tr.steps.push_back(nodes[n].step);
                }
                result.status = CheckResult::Status::Reached;
                result.trace = std::move(tr);
                finish();
                return result;
            }
            for (PreStep& s : pre_all(cs, phi, popts)) {
                ++st.generated;
                Constraint next = std::move(s.pred);
                if (opts.degree_bound) {
                    Constraint r = relax(next, *opts.degree_bound);
                    if (!(r == next)) {
                        st.relaxed = true;
                        next = std::move(r);
                    }
                }
                visit(std::move(next), id, {s.task, s.from_pc, fired_statement(cs, s.from_pc), s.rule});
            }
        }
    }
    catch (const PreOverflow& e) {
        result.status = CheckResult::Status::BoundExceeded;
        result.diagnostic = e.what();
        finish();
        return result;
    }
    result.status = CheckResult::Status::Unreachable;
    finish();
    return result;
}

CheckResult check_property(const ControlSet& cs, Property kind, const CheckOptions& opts)
{
    std::vector<Constraint> bad;
    std::optional<Skeleton> skeleton;
    try {
        if (opts.prune) {
            skeleton.emplace(cs, opts.max_tasks, opts.max_phasers, opts.skeleton_cap);
            bad = skeleton->bad_set(kind);
        }
        else {
            for (int n = 1; n <= opts.max_tasks; ++n)
                for (int p = 0; p <= opts.max_phasers; ++p)
                    for (Constraint& phi : bad_set(cs, kind, n, p, opts.target_cap))
                        bad.push_back(std::move(phi));
        }
    }
    catch (const TargetOverflow& e) {
        CheckResult r;
        r.status = CheckResult::Status::BoundExceeded;
        r.diagnostic = e.what();
        return r;
    }
    return check(cs, std::move(bad), opts, skeleton ? &*skeleton : nullptr);
}

ReplayResult replay_trace(const ControlSet& cs, const Trace& trace, Property kind, std::size_t frontier_cap)
{
    struct Item {
        Configuration config;
        std::size_t parent;
        ScheduleStep via;
    };
    ReplayResult out;
    if (trace.constraints.empty())
        return out;
    std::vector<std::vector<Item>> layers(1);
    Configuration init = initial(cs).normalized();
    if (!satisfies(init, trace.constraints[0]))
        return out;
    layers[0].push_back({init, 0, {}});
    for (std::size_t i = 1; i < trace.constraints.size(); ++i) {
        std::vector<Item> next;
        const std::vector<Item>& cur = layers.back();
        for (std::size_t k = 0; k < cur.size(); ++k)
            for (Transition& tr : successors(cs, cur[k].config)) {
                Configuration d = tr.next.normalized();
                if (!satisfies(d, trace.constraints[i]))
                    continue;
                if (std::any_of(next.begin(), next.end(), [&](const Item& it) { return it.config == d; }))
                    continue;
                next.push_back({std::move(d), k, {tr.task, tr.choice}});
                if (next.size() >= frontier_cap)
                    break;
            }
        if (next.empty())
            return out;
        layers.push_back(std::move(next));
    }
    const std::vector<Item>& last = layers.back();
    for (std::size_t k = 0; k < last.size(); ++k) {
        if (!is_bad(cs, last[k].config, kind))
            continue;
        std::size_t at = k;
        for (std::size_t i = layers.size() - 1;; --i) {
            out.path.push_back(layers[i][at].config);
            if (i == 0)
                break;
            out.schedule.push_back(layers[i][at].via);
            at = layers[i][at].parent;
        }
        std::reverse(out.path.begin(), out.path.end());
        std::reverse(out.schedule.begin(), out.schedule.end());
        out.ok = true;
        return out;
    }
    return out;
}

} // namespace phz
