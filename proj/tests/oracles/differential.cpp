#include "differential.hpp"

#include "constraint_oracle.hpp"
#include "phz/paramview.hpp"
#include "phz/pre.hpp"
#include "phz/targets.hpp"
#include "support.hpp"

#include <chrono>
#include <map>
#include <set>

namespace phz::oracle {

std::vector<std::string> micro_corpus()
{
    return {"micro/m1_signal_wait.phz", "micro/m2_two_phasers.phz", "micro/m3_modes.phz",
            "micro/m4_runtime.phz",     "micro/m5_bools.phz",       "micro/m6_deadlock.phz"};
}

namespace {

constexpr int kTaskBound = 3;
constexpr int kPhaserBound = 2;

struct Universe {
    Program prg;
    ControlSet cs;
    std::vector<Configuration> states;
    // explored states followed by synthetic ones: reachable shapes with
    // random invariant-respecting phases
    std::vector<Configuration> probes;
    std::map<Shape, std::vector<std::size_t>> by_shape;

    Universe(const std::string& name, Phase bound, std::mt19937_64& rng)
        : prg(test::load(name)), cs(prg), states(sample_states(cs, bound, kTaskBound, kPhaserBound))
    {
        probes = states;
        std::set<Shape> shapes;
        for (const Configuration& c : states)
            shapes.insert(canonical(shape_of(c)));
        for (const Shape& s : shapes)
            for (int i = 0; i < 12; ++i)
                probes.push_back(random_phases(rng, zero_configuration(s), bound));
        for (std::size_t i = 0; i < probes.size(); ++i)
            by_shape[canonical(shape_of(probes[i]))].push_back(i);
    }

    static Configuration random_phases(std::mt19937_64& rng, Configuration c, Phase bound)
    {
        for (PhaserState& p : c.phasers) {
            Phase top = 0;
            for (Registration& r : p.regs) {
                r.phases.wait = static_cast<Phase>(rng() % (bound + 1));
                top = std::max(top, r.phases.wait);
            }
            for (Registration& r : p.regs)
                if (r.phases.sig != kInfinitePhase)
                    r.phases.sig = top + static_cast<Phase>(rng() % 3);
        }
        return c;
    }

    template <class F>
    void members(const Constraint& phi, F&& f) const
    {
        auto it = by_shape.find(canonical(shape_of(phi)));
        if (it == by_shape.end())
            return;
        for (std::size_t i : it->second)
            if (satisfies(probes[i], phi))
                f(probes[i]);
    }

    bool in_bounds(const Configuration& c) const
    {
        return static_cast<int>(c.tasks.size()) <= kTaskBound && static_cast<int>(c.phasers.size()) <= kPhaserBound;
    }
};

// The exact encoding of d plus a few random weakenings of it.
std::vector<Constraint> variants(std::mt19937_64& rng, const Configuration& d)
{
    std::vector<Constraint> out{constraint_of(d)};
    for (int i = 0; i < 4; ++i)
        if (auto w = strengthen(weaken(rng, out[0])))
            out.push_back(std::move(*w));
    return out;
}

} // namespace

SuiteReport pre_differential(const std::string& name, Phase phase_bound, std::uint64_t seed)
{
    auto start = std::chrono::steady_clock::now();
    SuiteReport rep;
    std::mt19937_64 rng(seed);
    Universe u(name, phase_bound, rng);
    PreOptions opts;
    opts.max_tasks = kTaskBound;

    for (const Configuration& c : u.states) {
        for (const Transition& tr : successors(u.cs, c)) {
            Configuration d = tr.next.normalized();
            if (!u.in_bounds(d))
                continue;
            ++rep.cases;
            for (const Constraint& phi_ : variants(rng, d)) {
                const Constraint* phi = &phi_;
                auto preds = pre_all(u.cs, *phi, opts);
                bool found = false;
                for (const PreStep& s : preds) {
                    if (!is_well_formed(s.pred) || !is_strengthened(s.pred))
                        rep.fail(name + ": malformed predecessor from rule " + s.rule);
                    if (satisfies(c, s.pred))
                        found = true;
                }
                if (!found)
                    rep.fail(name + ": step not covered by pre\n" + to_string(u.cs, c) + "-> task " +
                             std::to_string(tr.task) + "\n" + to_string(u.cs, d));
            }
        }
    }

    // soundness: every explored member of a predecessor steps into the constraint
    for (const Configuration& d : u.probes) {
        for (const Constraint& phi_ : variants(rng, d)) {
            const Constraint* phi = &phi_;
            for (const PreStep& s : pre_all(u.cs, *phi, opts)) {
                u.members(s.pred, [&](const Configuration& c) {
                    ++rep.cases;
                    bool ok = false;
                    for (const Transition& tr : successors(u.cs, c))
                        if (satisfies(tr.next, *phi)) {
                            ok = true;
                            break;
                        }
                    if (!ok)
                        rep.fail(name + ": rule " + s.rule + " admits a configuration with no step into the target\n" +
                                 to_string(u.cs, c) + "target:\n" + to_string(u.cs, *phi));
                });
            }
        }
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

SuiteReport post_differential(const std::string& name, Phase phase_bound, std::uint64_t seed)
{
    auto start = std::chrono::steady_clock::now();
    SuiteReport rep;
    std::mt19937_64 rng(seed);
    Universe u(name, phase_bound, rng);

    for (const Configuration& c : u.probes) {
        std::vector<Configuration> succs;
        for (Transition& tr : successors(u.cs, c))
            succs.push_back(tr.next.normalized());
        Constraint exact = constraint_of(c);
        // the encoding of a single configuration: successors are exact images
        std::vector<PostStep> posts = post_all(u.cs, exact);
        for (const PostStep& s : posts) {
            ++rep.cases;
            if (!is_well_formed(s.succ) || !is_strengthened(s.succ))
                rep.fail(name + ": malformed successor from rule " + s.rule);
            bool image = std::any_of(succs.begin(), succs.end(),
                                     [&](const Configuration& d) { return entails(constraint_of(d), s.succ); });
            if (!image)
                rep.fail(name + ": rule " + s.rule + " yields a non-successor of\n" + to_string(u.cs, c) +
                         "successor:\n" + to_string(u.cs, s.succ));
        }
        for (const Constraint& phi : variants(rng, c)) {
            std::vector<PostStep> ps = phi == exact ? posts : post_all(u.cs, phi);
            for (const Configuration& d : succs) {
                ++rep.cases;
                bool covered = std::any_of(ps.begin(), ps.end(), [&](const PostStep& s) { return satisfies(d, s.succ); });
                if (!covered)
                    rep.fail(name + ": step not covered by post\n" + to_string(u.cs, c) + "->\n" +
                             to_string(u.cs, d));
            }
        }
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace phz::oracle
