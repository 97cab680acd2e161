#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles/constraint_oracle.hpp"
#include "oracles/differential.hpp"
#include "phz/pre.hpp"
#include "support.hpp"

using namespace phz;

namespace {

Configuration run_main(const ControlSet& cs, int steps)
{
    Configuration c = initial(cs);
    for (int i = 0; i < steps; ++i)
        c = step(cs, c, 0).at(0).next;
    return c;
}

} // namespace

TEST_CASE("no rule applies at the initial sequence of main")
{
    Program p = parse("main(){ v = newPhaser(); v.signal(); }");
    ControlSet cs(p);
    Constraint phi = constraint_of(initial(cs));
    CHECK(pre(cs, phi, 0).empty());
}

TEST_CASE("signal predecessor lowers the signal phase")
{
    Program p = parse("main(){ v = newPhaser(); v.signal(); }");
    ControlSet cs(p);
    Configuration c = run_main(cs, 2);
    Constraint phi = constraint_of(c); // sigma = 1, omega = 0
    auto preds = pre(cs, phi, 0);
    REQUIRE(preds.size() == 1);
    const GapGraph& g = preds[0].pred.graphs[0];
    CHECK(preds[0].rule == "signal");
    CHECK(g.edge(sigma(0), kZero) == 0);
    CHECK(g.edge(kZero, sigma(0)) == 0);
    CHECK(satisfies(run_main(cs, 1), preds[0].pred));
}

TEST_CASE("wait predecessor requires every signal ahead of the wait")
{
    Program p = parse("main(){ v = newPhaser(); v.signal(); v.wait(); }");
    ControlSet cs(p);
    Configuration c = run_main(cs, 3); // (1,1)
    auto preds = pre(cs, constraint_of(c), 0);
    REQUIRE(preds.size() == 1);
    CHECK(satisfies(run_main(cs, 2), preds[0].pred));
    // a post state with wait 1 but signal 0 has no predecessor
    c.phasers[0].regs[0].phases = {1, 0};
    CHECK(pre(cs, constraint_of(c), 0).empty());
}

TEST_CASE("newPhaser predecessors cover undefined and reused variables")
{
    Program p = parse("main(){ v = newPhaser(); v = newPhaser(); }");
    ControlSet cs(p);
    Configuration c = run_main(cs, 2);
    auto preds = pre(cs, constraint_of(c), 0);
    // v previously undefined or pointing at the other phaser
    REQUIRE(preds.size() == 2);
    CHECK(std::any_of(preds.begin(), preds.end(), [&](const PreStep& s) { return satisfies(run_main(cs, 1), s.pred); }));
}

TEST_CASE("exit predecessors re-add a task")
{
    Program p = parse("main(){ asynch(w); } w(){ exit; }");
    ControlSet cs(p);
    Configuration c = run_main(cs, 1);
    auto r = step(cs, c, 1);
    Constraint phi = constraint_of(r.at(0).next);
    auto preds = pre_exit(cs, phi);
    CHECK(std::any_of(preds.begin(), preds.end(), [&](const PreStep& s) { return satisfies(c, s.pred); }));
    PreOptions tight;
    tight.max_tasks = 2;
    CHECK(pre_exit(cs, constraint_of(c), tight).empty());
}

TEST_CASE("freeness is preserved")
{
    for (const std::string& name : oracle::micro_corpus()) {
        Program p = test::load(name);
        ControlSet cs(p);
        Skeleton sk(cs, 3, 2);
        PreOptions opts;
        opts.max_tasks = 3;
        for (Property k : {Property::Assert, Property::Race, Property::Runtime})
            for (const Constraint& phi : sk.bad_set(k))
                for (const PreStep& s : pre_all(cs, phi, opts))
                    CHECK_MESSAGE(is_free(s.pred), name << " rule " << s.rule);
    }
}

TEST_CASE("pre is exact on the micro corpus")
{
    for (const std::string& name : oracle::micro_corpus()) {
        auto rep = oracle::pre_differential(name, 3);
        for (const auto& m : rep.messages)
            MESSAGE(m);
        CHECK_MESSAGE(rep.failures == 0, name);
        CHECK(rep.cases > 0);
    }
}
