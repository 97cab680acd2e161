#include "graph_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <sstream>
#include <tuple>

namespace phz::oracle {

namespace {

constexpr int kLo = -10;
constexpr int kHi = 10;
// Any satisfiable graph with at most 5 variables and weights in [-5, 5] has
// a solution within this range (simple paths have at most 5 edges).
constexpr int kWide = 30;

std::string show(const GapGraph& g)
{
    std::ostringstream os;
    if (g.is_unsat())
        return "false";
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j)
            if (i != j && g.at(i, j) != kNegInf)
                os << "v" << g.var_at(i) << "-v" << g.var_at(j) << ">=" << g.at(i, j) << " ";
    return os.str();
}

// Finite edges of h, indexed like base (h's vertices are a subset of base's).
struct EdgeList {
    bool unsat = false;
    std::vector<std::tuple<int, int, long long>> edges;

    EdgeList(const GapGraph& h, const GapGraph& base) : unsat(h.is_unsat())
    {
        if (unsat)
            return;
        for (int i = 0; i < h.dim(); ++i)
            for (int j = 0; j < h.dim(); ++j)
                if (i != j && h.at(i, j) != kNegInf)
                    edges.emplace_back(base.index_of(h.var_at(i)), base.index_of(h.var_at(j)), h.at(i, j));
    }

    bool holds(const std::vector<long long>& val) const
    {
        if (unsat)
            return false;
        for (auto [i, j, w] : edges)
            if (val[i] - val[j] < w)
                return false;
        return true;
    }
};

Clause random_clause(std::mt19937_64& rng, const std::vector<Var>& vars, int wlo, int whi)
{
    std::uniform_int_distribution<int> pick(0, static_cast<int>(vars.size()));
    std::uniform_int_distribution<int> weight(wlo, whi);
    Clause c;
    do {
        int a = pick(rng);
        int b = pick(rng);
        c.a = a == 0 ? kZero : vars[a - 1];
        c.b = b == 0 ? kZero : vars[b - 1];
    } while (c.a == c.b);
    c.k = weight(rng);
    return c;
}

} // namespace

bool exists_solution(const GapGraph& g, int lo, int hi)
{
    bool found = false;
    for_each_solution(g, lo, hi, [&](const std::vector<long long>&) {
        found = true;
        return false;
    });
    return found;
}

GapGraph random_graph(std::mt19937_64& rng, int nvars, int max_clauses, int wlo, int whi)
{
    std::vector<Var> vars;
    for (int i = 1; i <= nvars; ++i)
        vars.push_back(static_cast<Var>(i));
    std::uniform_int_distribution<int> count(0, max_clauses);
    std::vector<Clause> clauses;
    int k = count(rng);
    if (!vars.empty())
        for (int i = 0; i < k; ++i)
            clauses.push_back(random_clause(rng, vars, wlo, whi));
    // graph_of closes; keep an open copy to exercise closure itself
    GapGraph g(vars);
    for (const Clause& c : clauses)
        g.raise(c.a, c.b, c.k);
    return g;
}

SuiteReport run_graph_suite(std::uint64_t seed, int graphs)
{
    auto start = std::chrono::steady_clock::now();
    SuiteReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> nvars(1, 5);

    for (int gi = 0; gi < graphs; ++gi) {
        ++rep.cases;
        int n = nvars(rng);
        GapGraph g = random_graph(rng, n, 2 * n + 2, -5, 5);
        GapGraph h = random_graph(rng, n, n + 1, -5, 5);
        std::string tag = "graph " + std::to_string(gi) + " [" + show(g) + "]";
        GapGraph cg = close(g);

        // closure idempotence
        if (!(close(cg) == cg))
            rep.fail(tag + ": closure not idempotent");

        // satisfiability agrees with a wide exhaustive search
        bool sat = exists_solution(g, -kWide, kWide);
        if (is_sat(g) != sat)
            rep.fail(tag + ": is_sat disagrees with valuation search");
        if (cg.is_unsat() != !sat)
            rep.fail(tag + ": closure unsat flag disagrees with valuation search");

        GapGraph conj = conjoin(g, h);
        std::optional<GapGraph> proj;
        if (!cg.is_unsat()) {
            std::vector<Var> away;
            for (Var v : cg.vars())
                if (rng() % 2)
                    away.push_back(v);
            proj = project_away(cg, away);
        }
        EdgeList eg(g, g), ecg(cg, g), eh(h, g), econj(conj, g);
        std::optional<EdgeList> eproj;
        if (proj)
            eproj.emplace(*proj, g);

        // closure keeps the bounded solution set; conjunction is intersection
        for_each_solution(g, kLo, kHi, [&](const std::vector<long long>& v) {
            if (!ecg.holds(v)) {
                rep.fail(tag + ": closure lost a solution");
                return false;
            }
            if (eh.holds(v) != econj.holds(v)) {
                rep.fail(tag + ": conjoin differs from intersection");
                return false;
            }
            return true;
        });
        // no solution is gained by closing, none lost by projecting
        for_each_solution(cg, kLo, kHi, [&](const std::vector<long long>& v) {
            if (!eg.holds(v)) {
                rep.fail(tag + ": closure gained a solution");
                return false;
            }
            if (eproj && !eproj->holds(v)) {
                rep.fail(tag + ": projection lost a solution");
                return false;
            }
            return true;
        });
        for_each_solution(conj, kLo, kHi, [&](const std::vector<long long>& v) {
            if (!eg.holds(v) || !eh.holds(v)) {
                rep.fail(tag + ": conjoin admits a non-solution");
                return false;
            }
            return true;
        });

        if (cg.is_unsat())
            continue;

        // degree matches a scan of finite negative weights
        {
            int d = degree(cg);
            int scan = 0;
            for (int i = 0; i < cg.dim(); ++i)
                for (int j = 0; j < cg.dim(); ++j)
                    if (i != j && cg.at(i, j) != kNegInf && cg.at(i, j) < 0)
                        scan = std::max(scan, -cg.at(i, j));
            if (d != scan)
                rep.fail(tag + ": degree mismatch");
        }

        // projected solutions extend to solutions of the whole graph
        {
            std::vector<Var> free_vars;
            for (Var v : cg.vars())
                if (!proj->has_var(v))
                    free_vars.push_back(v);
            for_each_solution(*proj, kLo, kHi, [&](const std::vector<long long>& pv) {
                // substitute the projected values and search the remaining variables
                GapGraph rest(free_vars);
                bool ok = true;
                auto value_of = [&](Var v) -> std::optional<long long> {
                    if (v == kZero)
                        return 0;
                    int i = proj->index_of(v);
                    if (i < 0)
                        return std::nullopt;
                    return pv[i];
                };
                for (int i = 0; i < cg.dim() && ok; ++i)
                    for (int j = 0; j < cg.dim(); ++j) {
                        Weight w = cg.at(i, j);
                        if (i == j || w == kNegInf)
                            continue;
                        auto a = value_of(cg.var_at(i));
                        auto b = value_of(cg.var_at(j));
                        if (a && b) {
                            if (*a - *b < w)
                                ok = false;
                        }
                        else if (a)
                            rest.raise(kZero, cg.var_at(j), static_cast<Weight>(w - *a));
                        else if (b)
                            rest.raise(cg.var_at(i), kZero, static_cast<Weight>(w + *b));
                        else
                            rest.raise(cg.var_at(i), cg.var_at(j), w);
                    }
                if (!ok || !exists_solution(rest, -kWide - kHi, kWide + kHi)) {
                    rep.fail(tag + ": projection solution has no extension");
                    return false;
                }
                return true;
            });
        }

        // entailment soundness on a strengthened copy and on an arbitrary pair
        {
            GapGraph stronger = cg;
            std::vector<Var> vars(cg.vars().begin(), cg.vars().end());
            stronger.raise(random_clause(rng, vars, -5, 5).a, kZero, static_cast<Weight>(rng() % 11) - 5);
            stronger.close_in_place();
            if (!stronger.is_unsat()) {
                if (!graph_entails(cg, stronger))
                    rep.fail(tag + ": strengthening not entailed");
                EdgeList weak(cg, stronger);
                for_each_solution(stronger, kLo, kHi, [&](const std::vector<long long>& v) {
                    if (!weak.holds(v)) {
                        rep.fail(tag + ": entailment unsound");
                        return false;
                    }
                    return true;
                });
            }
            GapGraph ch = close(h);
            EdgeList weak(cg, ch);
            if (!ch.is_unsat() && graph_entails(cg, ch))
                for_each_solution(ch, kLo, kHi, [&](const std::vector<long long>& v) {
                    if (!weak.holds(v)) {
                        rep.fail(tag + ": entailment unsound on random pair");
                        return false;
                    }
                    return true;
                });
            if (!graph_entails(cg, cg))
                rep.fail(tag + ": entailment not reflexive");
        }

        // substitution round trip, shift laws
        {
            std::map<Var, Var> fwd, back;
            for (Var v : cg.vars()) {
                fwd[v] = static_cast<Var>(v + 100);
                back[static_cast<Var>(v + 100)] = v;
            }
            if (!(substitute(substitute(cg, fwd), back) == cg))
                rep.fail(tag + ": substitution round trip");
            Var v = cg.vars()[rng() % cg.vars().size()];
            Weight delta = static_cast<Weight>(rng() % 7) - 3;
            GapGraph s = shift(cg, v, delta);
            if (!(shift(s, v, -delta) == cg))
                rep.fail(tag + ": shift round trip");
            if (!(shift(cg, v, 0) == cg))
                rep.fail(tag + ": shift by zero");
            Var fresh = 999;
            GapGraph renamed = substitute(cg, {{v, fresh}});
            Clause eq[] = {{v, fresh, delta}, {fresh, v, static_cast<Weight>(-delta)}};
            GapGraph route = project_away(conjoin(renamed, graph_of(eq)), std::vector<Var>{fresh});
            if (!(route == s))
                rep.fail(tag + ": shift differs from rename-conjoin-project");
        }

        // relaxation weakens and bounds the degree
        {
            int k = static_cast<int>(rng() % 4);
            GapGraph r = relax_graph(cg, k);
            if (r.is_unsat() || degree(r) > k || !graph_entails(r, cg))
                rep.fail(tag + ": relaxation contract");
        }
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace phz::oracle
