#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phz/checker.hpp"
#include "support.hpp"

using namespace phz;

namespace {

CheckResult run(const ControlSet& cs, Property kind, int tasks = 4, int phasers = 2)
{
    CheckOptions o;
    o.max_tasks = tasks;
    o.max_phasers = phasers;
    return check_property(cs, kind, o);
}

// Forward exploration bounded by the same sizes, as an independent verdict.
bool forward_reaches(const ControlSet& cs, Property kind, Phase bound, int tasks, int phasers)
{
    ExploreOptions o;
    o.phase_bound = bound;
    o.task_bound = tasks;
    o.phaser_bound = phasers;
    o.property = kind;
    o.stop_at_violation = true;
    return explore_bounded(cs, o).status == ExploreResult::Status::Violation;
}

} // namespace

TEST_CASE("signal after drop is a runtime error found in three steps")
{
    Program p = test::load("drop_then_signal.phz");
    ControlSet cs(p);
    CheckResult r = run(cs, Property::Runtime, 1, 1);
    REQUIRE(r.status == CheckResult::Status::Reached);
    REQUIRE(r.trace);
    CHECK(r.trace->steps.size() == 2);
    CHECK(r.trace->constraints.size() == 3);
    CHECK(r.trace->steps[0].stmt.find("newPhaser") != std::string::npos);
    CHECK(r.trace->steps[1].stmt.find("drop") != std::string::npos);
    ReplayResult rp = replay_trace(cs, *r.trace, Property::Runtime);
    REQUIRE(rp.ok);
    CHECK(rp.schedule.size() == 2);
    CHECK(runtime_fault(cs, rp.path.back()));
}

TEST_CASE("producer consumer example is assert safe")
{
    Program p = test::load("fig1.phz");
    ControlSet cs(p);
    CheckResult r = run(cs, Property::Assert);
    INFO(r.diagnostic);
    CHECK(r.status == CheckResult::Status::Unreachable);
    MESSAGE("fig1 assert: pops " << r.stats.pops << " visited " << r.stats.visited << " in " << r.stats.seconds
                                 << " s");
}

TEST_CASE("missing consumer signal deadlocks and the trace replays")
{
    Program p = test::load("fig1_no_consignal.phz");
    ControlSet cs(p);
    CheckResult r = run(cs, Property::Deadlock);
    INFO(r.diagnostic);
    REQUIRE(r.status == CheckResult::Status::Reached);
    ReplayResult rp = replay_trace(cs, *r.trace, Property::Deadlock);
    REQUIRE(rp.ok);
    CHECK(is_deadlock(cs, rp.path.back()));
    CHECK(is_deadlock(cs, replay_schedule(cs, rp.schedule).back()));
}

TEST_CASE("assert bug variant is found and replays")
{
    Program p = test::load("fig1_assert_bug.phz");
    ControlSet cs(p);
    CheckResult r = run(cs, Property::Assert);
    REQUIRE(r.status == CheckResult::Status::Reached);
    ReplayResult rp = replay_trace(cs, *r.trace, Property::Assert);
    REQUIRE(rp.ok);
    CHECK(assert_fault(cs, rp.path.back()));
}

TEST_CASE("verdicts agree with forward exploration on the micro corpus")
{
    for (const char* name : {"micro/m1_signal_wait.phz", "micro/m2_two_phasers.phz", "micro/m3_modes.phz",
                             "micro/m4_runtime.phz", "micro/m5_bools.phz", "micro/m6_deadlock.phz"}) {
        Program p = test::load(name);
        ControlSet cs(p);
        for (Property k : {Property::Assert, Property::Runtime, Property::Race, Property::Deadlock}) {
            CAPTURE(name);
            CAPTURE(static_cast<int>(k));
            CheckResult r = run(cs, k, 3, 2);
            REQUIRE(r.status != CheckResult::Status::BoundExceeded);
            bool fwd = forward_reaches(cs, k, 4, 3, 2);
            if (r.status == CheckResult::Status::Reached) {
                ReplayResult rp = replay_trace(cs, *r.trace, k);
                CHECK(rp.ok);
                CHECK(fwd);
            }
            else {
                // no counterexample below the phase bound either
                CHECK_FALSE(fwd);
            }
        }
    }
}

TEST_CASE("eager targets give the same verdicts as pruned ones")
{
    for (const char* name : {"micro/m1_signal_wait.phz", "micro/m4_runtime.phz", "micro/m6_deadlock.phz"}) {
        Program p = test::load(name);
        ControlSet cs(p);
        for (Property k : {Property::Runtime, Property::Deadlock}) {
            CAPTURE(name);
            CheckOptions o;
            o.max_tasks = 2;
            o.max_phasers = 2;
            CheckResult a = check_property(cs, k, o);
            o.prune = false;
            CheckResult b = check_property(cs, k, o);
            REQUIRE(b.status != CheckResult::Status::BoundExceeded);
            CHECK(a.status == b.status);
        }
    }
}

TEST_CASE("visited constraints of free-target runs stay free")
{
    Program p = test::load("fig1.phz");
    ControlSet cs(p);
    for (Property k : {Property::Assert, Property::Race, Property::Runtime}) {
        CheckOptions o;
        std::size_t seen = 0;
        bool all_free = true;
        o.on_visit = [&](const Constraint& phi) {
            ++seen;
            all_free = all_free && is_free(phi);
        };
        CheckResult r = check_property(cs, k, o);
        CAPTURE(to_string(k));
        CHECK(r.status == CheckResult::Status::Unreachable);
        CHECK(r.stats.all_free);
        CHECK_FALSE(r.stats.relaxed);
        CHECK(all_free);
        CHECK(seen >= r.stats.visited);
        if (k == Property::Assert)
            CHECK(r.stats.targets > 0);
    }
}

TEST_CASE("degree-bounded deadlock checking keeps every real deadlock")
{
    for (const char* name : {"fig1_no_consignal.phz", "ordered_phasers_deadlock_bug.phz",
                             "loopless_deadlock_bug.phz", "micro/m6_deadlock.phz"}) {
        Program p = test::load(name);
        ControlSet cs(p);
        REQUIRE(forward_reaches(cs, Property::Deadlock, 4, 4, 2));
        for (int k = 0; k <= 2; ++k) {
            CheckOptions o;
            o.degree_bound = k;
            int worst = 0;
            o.on_visit = [&](const Constraint& phi) { worst = std::max(worst, degree_of(phi)); };
            CheckResult r = check_property(cs, Property::Deadlock, o);
            CAPTURE(name);
            CAPTURE(k);
            CHECK(r.status == CheckResult::Status::Reached);
            CHECK(worst <= k);
        }
    }
}

TEST_CASE("minimize keeps the weakest constraints")
{
    Program p = parse("main(){ v = newPhaser(); v.signal(); v.wait(); }");
    ControlSet cs(p);
    Configuration c = initial(cs);
    c = step(cs, c, 0).at(0).next;
    c = step(cs, c, 0).at(0).next;
    Constraint exact = constraint_of(c);
    Constraint top = top_constraint(shape_of(exact));
    auto out = minimize({exact, top, exact});
    REQUIRE(out.size() == 1);
    CHECK(out[0] == top);
}

TEST_CASE("cap on popped constraints yields bound exceeded")
{
    Program p = test::load("fig1.phz");
    ControlSet cs(p);
    CheckOptions o;
    o.max_pops = 10;
    CheckResult r = check_property(cs, Property::Assert, o);
    CHECK(r.status == CheckResult::Status::BoundExceeded);
    CHECK(r.diagnostic.find("cap") != std::string::npos);
}
