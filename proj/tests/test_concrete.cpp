#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phz/concrete.hpp"
#include "support.hpp"

using namespace phz;

namespace {

// Runs the single task of a straight-line prefix; returns the configuration
// before the first step that is not Ok.
Configuration run_main(const ControlSet& cs, int steps)
{
    Configuration c = initial(cs);
    for (int i = 0; i < steps; ++i) {
        auto r = step(cs, c, 0);
        REQUIRE(r.size() == 1);
        REQUIRE(r[0].kind == StepResult::Kind::Ok);
        c = r[0].next;
    }
    return c;
}

} // namespace

TEST_CASE("initial configuration")
{
    Program p = test::load("fig1.phz");
    ControlSet cs(p);
    Configuration c = initial(cs);
    CHECK(c.tasks.size() == 1);
    CHECK(c.phasers.empty());
    CHECK(c.bv == 0);
    CHECK(c.tasks[0].pc == cs.initial(p.entry));
    CHECK(c.tasks[0].pv == std::vector<int>{-1, -1});
}

TEST_CASE("phaser statements update phases")
{
    Program p = parse("main(){ v = newPhaser(); v.signal(); v.wait(); v.signal(); v.drop(); }");
    ControlSet cs(p);
    Configuration c = run_main(cs, 1);
    REQUIRE(c.phasers.size() == 1);
    CHECK(*c.phases(0, 0) == Phases{0, 0});
    CHECK(is_blocked(cs, c, 0).has_value() == false); // head is signal
    c = run_main(cs, 2);
    CHECK(*c.phases(0, 0) == Phases{0, 1});
    c = run_main(cs, 3);
    CHECK(*c.phases(0, 0) == Phases{1, 1});
    c = run_main(cs, 5);
    CHECK(c.phasers.size() == 1);
    CHECK(c.phasers[0].regs.empty());
    CHECK(cs.is_terminated(c.tasks[0].pc));
    auto last = step(cs, c, 0);
    REQUIRE(last.size() == 1);
    CHECK(last[0].next.tasks.empty());
}

TEST_CASE("wait without own signal blocks the task on itself")
{
    Program p = parse("main(){ v = newPhaser(); v.wait(); }");
    ControlSet cs(p);
    Configuration c = run_main(cs, 1);
    auto r = step(cs, c, 0);
    REQUIRE(r.size() == 1);
    CHECK(r[0].kind == StepResult::Kind::Blocked);
    auto w = is_blocked(cs, c, 0);
    REQUIRE(w);
    CHECK(w->by == 0);
    auto cycle = is_deadlock(cs, c);
    REQUIRE(cycle);
    CHECK(*cycle == std::vector<int>{0});
}

TEST_CASE("wait mode registrations never block")
{
    Program p = parse("main(){ v = newPhaser(WAIT); v.wait(); v.wait(); }");
    ControlSet cs(p);
    Configuration c = run_main(cs, 3);
    CHECK(c.phases(0, 0)->wait == 2);
    CHECK(c.phases(0, 0)->sig == kInfinitePhase);
}

TEST_CASE("asynch copies phases and applies the callee mode")
{
    Program p = parse("main(){ v = newPhaser(); v.signal(); asynch(w, v(WAIT)); asynch(s, v); }"
                      "w(q(WAIT)){ q.wait(); } s(q){ q.drop(); }");
    ControlSet cs(p);
    Configuration c = run_main(cs, 4);
    REQUIRE(c.tasks.size() == 3);
    CHECK(*c.phases(0, 1) == Phases{0, kInfinitePhase});
    CHECK(*c.phases(0, 2) == Phases{0, 1});
    CHECK(c.tasks[1].pv == std::vector<int>{0});
    CHECK(c.tasks[1].pc == cs.initial(p.find_task("w")));
    CHECK(phase_invariant_holds(c));
}

TEST_CASE("runtime faults")
{
    Program p = test::load("drop_then_signal.phz");
    ControlSet cs(p);
    Configuration c = run_main(cs, 2);
    CHECK(runtime_fault(cs, c) == 0);
    CHECK(is_bad(cs, c, Property::Runtime));
    auto r = step(cs, c, 0);
    REQUIRE(r.size() == 1);
    CHECK(r[0].kind == StepResult::Kind::BadRuntime);

    Program q = parse("main(){ if (false) { v = newPhaser(); } v.signal(); }");
    ControlSet qs(q);
    CHECK(runtime_fault(qs, step(qs, initial(qs), 0)[0].next) == 0);
}

TEST_CASE("assertions and ndet branching")
{
    Program p = parse("bool a; main(){ a = ndet(); assert(a); }");
    ControlSet cs(p);
    auto r = step(cs, initial(cs), 0);
    REQUIRE(r.size() == 2);
    CHECK(r[0].next.bv == 1);
    CHECK(r[1].next.bv == 0);
    CHECK_FALSE(assert_fault(cs, r[0].next));
    CHECK(assert_fault(cs, r[1].next) == 0);
}

TEST_CASE("race needs two distinct tasks")
{
    Program p = parse("bool x; main(){ asynch(w); x = true; } w(){ assert(x); }");
    ControlSet cs(p);
    Configuration c = run_main(cs, 1);
    auto race = detect_race(cs, c);
    REQUIRE(race);
    CHECK(race->writer == 0);
    CHECK(race->other == 1);
    Program q = parse("bool x; main(){ x = true; x = false; }");
    ControlSet qs(q);
    CHECK_FALSE(detect_race(qs, initial(qs)));
}

TEST_CASE("running example: safe for assertions and races, deadlocks without the initial signal")
{
    Program p = test::load("fig1.phz");
    ControlSet cs(p);
    ExploreOptions o;
    o.phase_bound = 4;
    o.task_bound = 4;
    o.phaser_bound = 2;
    for (Property k : {Property::Assert, Property::Race, Property::Runtime, Property::Deadlock}) {
        o.property = k;
        auto r = explore_bounded(cs, o);
        CHECK_MESSAGE(r.status == ExploreResult::Status::Safe, to_string(k));
        CHECK(r.pruned);
    }

    Program bug = test::load("fig1_no_consignal.phz");
    ControlSet bs(bug);
    o.property = Property::Deadlock;
    auto r = explore_bounded(bs, o);
    REQUIRE(r.status == ExploreResult::Status::Violation);
    auto path = replay_schedule(bs, r.schedule);
    CHECK(is_deadlock(bs, path.back()));
}

TEST_CASE("schedules round trip and replay deterministically")
{
    Program p = test::load("fig1_assert_bug.phz");
    ControlSet cs(p);
    ExploreOptions o;
    o.task_bound = 4;
    o.phaser_bound = 2;
    o.property = Property::Assert;
    auto r = explore_bounded(cs, o);
    REQUIRE(r.status == ExploreResult::Status::Violation);
    auto text = format_schedule(r.schedule);
    auto parsed = parse_schedule("# comment\n" + text);
    REQUIRE(parsed.size() == r.schedule.size());
    auto a = replay_schedule(cs, parsed);
    auto b = replay_schedule(cs, parsed);
    CHECK(a == b);
    CHECK(a.back() == r.path.back());
    CHECK(assert_fault(cs, a.back()));
    CHECK_THROWS(replay_schedule(cs, {{7, 0}}));
}

TEST_CASE("phase invariant holds on every explored configuration")
{
    for (const std::string& name : test::corpus_files()) {
        Program p = test::load(name);
        ControlSet cs(p);
        ExploreOptions o;
        o.phase_bound = 3;
        o.task_bound = 3;
        o.phaser_bound = 2;
        o.max_states = 20'000;
        o.stop_at_violation = false;
        int bad = 0;
        o.on_state = [&](const Configuration& c) { bad += !phase_invariant_holds(c); };
        explore_bounded(cs, o);
        CHECK_MESSAGE(bad == 0, name);
    }
}
