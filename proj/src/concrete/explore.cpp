#include "phz/concrete.hpp"

#include <deque>
#include <unordered_map>

namespace phz {

namespace {

struct ConfigHash {
    std::size_t operator()(const Configuration& c) const
    {
        std::size_t h = std::hash<std::uint64_t>{}(c.bv);
        auto mix = [&](long long v) { h = (h ^ static_cast<std::size_t>(v)) * 0x100000001b3ULL; };
        for (const TaskState& t : c.tasks) {
            mix(t.id);
            mix(t.pc);
            for (int p : t.pv)
                mix(p);
        }
        for (const PhaserState& p : c.phasers) {
            mix(-p.id - 1);
            for (const Registration& r : p.regs) {
                mix(r.task);
                mix(r.phases.wait);
                mix(r.phases.sig);
            }
        }
        return h;
    }
};

bool within_bounds(const Configuration& c, const ExploreOptions& o)
{
    if (static_cast<int>(c.tasks.size()) > o.task_bound || static_cast<int>(c.phasers.size()) > o.phaser_bound)
        return false;
    for (const PhaserState& p : c.phasers)
        for (const Registration& r : p.regs)
            if (r.phases.wait > o.phase_bound || (r.phases.sig != kInfinitePhase && r.phases.sig > o.phase_bound))
                return false;
    return true;
}

std::optional<Property> violation(const ControlSet& cs, const Configuration& c, const ExploreOptions& o)
{
    if (o.property)
        return is_bad(cs, c, *o.property) ? o.property : std::nullopt;
    for (Property p : kAllProperties)
        if (is_bad(cs, c, p))
            return p;
    return std::nullopt;
}

} // namespace

ExploreResult explore_bounded(const ControlSet& cs, const ExploreOptions& opts)
{
    struct Node {
        Configuration config;
        std::size_t parent;
        ScheduleStep via;
    };
    std::vector<Node> nodes;
    std::unordered_map<Configuration, std::size_t, ConfigHash> seen;
    std::deque<std::size_t> queue;
    ExploreResult result;

    auto trace_to = [&](std::size_t idx) {
        std::vector<std::size_t> chain;
        for (std::size_t i = idx; i != 0; i = nodes[i].parent)
            chain.push_back(i);
        result.path.push_back(nodes[0].config);
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            result.schedule.push_back(nodes[*it].via);
            result.path.push_back(nodes[*it].config);
        }
    };

    // returns true when exploration should stop
    auto discover = [&](Configuration c, std::size_t parent, ScheduleStep via) {
        auto [it, fresh] = seen.emplace(c, nodes.size());
        if (!fresh)
            return false;
        nodes.push_back({std::move(c), parent, via});
        std::size_t idx = nodes.size() - 1;
        const Configuration& cur = nodes[idx].config;
        if (opts.on_state)
            opts.on_state(cur);
        if (auto v = violation(cs, cur, opts)) {
            if (!result.kind) {
                result.status = ExploreResult::Status::Violation;
                result.kind = v;
                trace_to(idx);
            }
            if (opts.stop_at_violation)
                return true;
        }
        queue.push_back(idx);
        return false;
    };

    if (discover(initial(cs).normalized(), 0, {}))
        goto done;
    while (!queue.empty()) {
        if (nodes.size() > opts.max_states) {
            if (result.status != ExploreResult::Status::Violation)
                result.status = ExploreResult::Status::Exhausted;
            break;
        }
        std::size_t idx = queue.front();
        queue.pop_front();
        Configuration cur = nodes[idx].config;
        for (Transition& tr : successors(cs, cur)) {
            Configuration next = tr.next.normalized();
            if (!within_bounds(next, opts)) {
                result.pruned = true;
                continue;
            }
            if (discover(std::move(next), idx, {tr.task, tr.choice}))
                goto done;
        }
    }
done:
    result.states = nodes.size();
    return result;
}

} // namespace phz
