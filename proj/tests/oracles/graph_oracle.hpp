#pragma once

#include "phz/gapgraph.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace phz::oracle {

struct SuiteReport {
    int cases = 0;
    int failures = 0;
    std::vector<std::string> messages;
    double seconds = 0;

    void fail(std::string msg)
    {
        ++failures;
        if (messages.size() < 20)
            messages.push_back(std::move(msg));
    }
};

/// Visits every integer valuation in [lo, hi]^n satisfying g (n = |vars(g)|).
/// The callback receives values indexed like the graph matrix (slot 0 is 0).
/// Returning false from the callback stops the enumeration.
template <class F>
void for_each_solution(const GapGraph& g, int lo, int hi, F&& f);

bool exists_solution(const GapGraph& g, int lo, int hi);

GapGraph random_graph(std::mt19937_64& rng, int nvars, int max_clauses, int wlo, int whi);

/// Randomized gap-graph properties against exhaustive valuation search.
SuiteReport run_graph_suite(std::uint64_t seed, int graphs);

// ---------------------------------------------------------------------------

template <class F>
void for_each_solution(const GapGraph& g, int lo, int hi, F&& f)
{
    if (g.is_unsat())
        return;
    const int n = g.dim();
    std::vector<long long> val(static_cast<std::size_t>(n), 0);
    std::vector<Weight> m(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m[i * n + j] = g.at(i, j);
    bool stop = false;
    auto rec = [&](auto&& self, int d) -> void {
        if (stop)
            return;
        if (d == n) {
            if (!f(static_cast<const std::vector<long long>&>(val)))
                stop = true;
            return;
        }
        // bounds on val[d] from the variables already assigned
        long long from = lo, to = hi;
        for (int i = 0; i < d; ++i) {
            Weight a = m[d * n + i];
            Weight b = m[i * n + d];
            if (a != kNegInf)
                from = std::max(from, val[i] + a);
            if (b != kNegInf)
                to = std::min(to, val[i] - b);
        }
        for (long long x = from; x <= to && !stop; ++x) {
            val[d] = x;
            self(self, d + 1);
        }
    };
    rec(rec, 1);
}

} // namespace phz::oracle
