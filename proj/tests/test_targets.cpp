#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles/constraint_oracle.hpp"
#include "phz/targets.hpp"
#include "support.hpp"

using namespace phz;

TEST_CASE("weakest registration graphs")
{
    CHECK(top_of({}, {}).vars().empty());
    std::vector<int> one{0};
    GapGraph g = top_of(one, one);
    CHECK(g.edge(sigma(0), omega(0)) == 0);
    CHECK(g.edge(omega(0), kZero) == 0);
    CHECK(g.edge(sigma(0), kZero) == 0);
    CHECK(g.edge(omega(0), sigma(0)) == kNegInf);
    for (int n = 0; n <= 4; ++n) {
        std::vector<int> u(n);
        for (int i = 0; i < n; ++i)
            u[i] = i;
        GapGraph t = top_of(u, u);
        CHECK(is_free(t));
        CHECK(degree(t) == 0);
    }
}

TEST_CASE("canonical shapes ignore renaming")
{
    Program p = test::load("micro/m2_two_phasers.phz");
    ControlSet cs(p);
    std::mt19937_64 rng(2);
    for (const Configuration& c : oracle::sample_states(cs, 2)) {
        Configuration d = oracle::permuted(rng, c);
        CHECK(canonical(shape_of(c)) == canonical(shape_of(d)));
        CHECK(canonical(shape_of(c)) == canonical(shape_of(constraint_of(d))));
    }
}

TEST_CASE("small bad sets")
{
    Program p = parse("bool x; main(){ asynch(w); x = true; } w(){ if (x) { exit; } }");
    ControlSet cs(p);
    CHECK(bad_set(cs, Property::Deadlock, 1, 0).empty());
    auto race = bad_set(cs, Property::Race, 2, 0);
    CHECK_FALSE(race.empty());
    for (const Constraint& phi : race)
        CHECK(is_free(phi));
    Program big = test::load("fig1.phz");
    ControlSet bs(big);
    CHECK_THROWS_AS(bad_set(bs, Property::Race, 4, 2, 100'000), TargetOverflow);
}

TEST_CASE("deadlock constraints are degree 0 and not free")
{
    Program p = test::load("fig1_no_consignal.phz");
    ControlSet cs(p);
    Skeleton sk(cs, 4, 2);
    auto dead = sk.bad_set(Property::Deadlock);
    REQUIRE_FALSE(dead.empty());
    for (const Constraint& phi : dead) {
        CHECK(degree_of(phi) == 0);
        CHECK_FALSE(is_free(phi));
    }
    for (Property k : {Property::Assert, Property::Race, Property::Runtime})
        for (const Constraint& phi : sk.bad_set(k))
            CHECK(is_free(phi));
}

namespace {

// Two-sided check of the bad constraints against sampled configurations.
int two_sided(const std::string& name, Property kind, bool eager)
{
    Program p = test::load(name);
    ControlSet cs(p);
    auto states = oracle::sample_states(cs, 3);
    Skeleton sk(cs, 3, 2);
    std::vector<Constraint> bad;
    if (eager) {
        for (int n = 1; n <= 2; ++n)
            for (int q = 0; q <= 2; ++q)
                for (Constraint& phi : bad_set(cs, kind, n, q))
                    bad.push_back(std::move(phi));
    }
    else
        bad = sk.bad_set(kind);
    int hits = 0;
    for (const Configuration& c : states) {
        CHECK(sk.contains(canonical(shape_of(c))));
        bool is = is_bad(cs, c, kind);
        bool covered = std::any_of(bad.begin(), bad.end(), [&](const Constraint& phi) { return satisfies(c, phi); });
        CHECK_MESSAGE(is == covered, name << " " << to_string(kind) << "\n" << to_string(cs, c));
        hits += is;
    }
    return hits;
}

} // namespace

TEST_CASE("bad constraints match the concrete predicates")
{
    std::map<Property, int> hits;
    for (const char* name : {"micro/m1_signal_wait.phz", "micro/m2_two_phasers.phz", "micro/m3_modes.phz",
                             "micro/m4_runtime.phz", "micro/m5_bools.phz", "micro/m6_deadlock.phz"})
        for (Property k : kAllProperties)
            hits[k] += two_sided(name, k, false);
    for (Property k : {Property::Race, Property::Runtime, Property::Deadlock})
        CHECK(hits[k] > 0);
    for (Property k : kAllProperties)
        two_sided("micro/m6_deadlock.phz", k, true);
    two_sided("micro/m4_runtime.phz", Property::Runtime, true);
}
