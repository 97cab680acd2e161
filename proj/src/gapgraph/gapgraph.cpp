#include "phz/gapgraph.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace phz {

namespace {

constexpr long long kLimit = 1'000'000'000LL;

Weight clamp(long long v)
{
    if (v > kLimit || v < -kLimit)
        throw std::overflow_error("gap-order weight out of range");
    return static_cast<Weight>(v);
}

} // namespace

Weight add_weights(Weight a, Weight b)
{
    if (a == kPosInf || b == kPosInf)
        return kPosInf;
    if (a == kNegInf || b == kNegInf)
        return kNegInf;
    return clamp(static_cast<long long>(a) + b);
}

GapGraph::GapGraph() : m_(1, 0) {}

GapGraph::GapGraph(std::vector<Var> vars) : vars_(std::move(vars))
{
    std::sort(vars_.begin(), vars_.end());
    if (std::adjacent_find(vars_.begin(), vars_.end()) != vars_.end())
        throw std::invalid_argument("duplicate graph variable");
    if (!vars_.empty() && vars_.front() == kZero)
        throw std::invalid_argument("variable 0 is reserved for the zero vertex");
    int n = dim();
    m_.assign(static_cast<std::size_t>(n) * n, kNegInf);
    for (int i = 0; i < n; ++i)
        m_[static_cast<std::size_t>(i) * n + i] = 0;
}

GapGraph GapGraph::unsat()
{
    GapGraph g;
    g.make_unsat();
    return g;
}

void GapGraph::make_unsat()
{
    vars_.clear();
    m_.assign(1, kPosInf);
    unsat_ = true;
    closed_ = true;
}

int GapGraph::index_of(Var v) const
{
    if (v == kZero)
        return 0;
    auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
    if (it == vars_.end() || *it != v)
        return -1;
    return static_cast<int>(it - vars_.begin()) + 1;
}

Weight GapGraph::edge(Var a, Var b) const
{
    if (unsat_)
        return kPosInf;
    int i = index_of(a);
    int j = index_of(b);
    if (i < 0 || j < 0)
        throw std::out_of_range("edge on a variable not in the graph");
    return at(i, j);
}

void GapGraph::raise(Var a, Var b, Weight k)
{
    if (unsat_)
        return;
    int i = index_of(a);
    int j = index_of(b);
    if (i < 0 || j < 0)
        throw std::out_of_range("edge on a variable not in the graph");
    raise_at(i, j, k);
}

void GapGraph::raise_at(int i, int j, Weight k)
{
    if (unsat_)
        return;
    Weight& w = m_[static_cast<std::size_t>(i) * dim() + j];
    if (k > w) {
        w = k;
        closed_ = false;
    }
}

void GapGraph::set_at(int i, int j, Weight k)
{
    if (unsat_)
        return;
    m_[static_cast<std::size_t>(i) * dim() + j] = k;
    closed_ = false;
}

void GapGraph::close_in_place()
{
    if (unsat_ || closed_)
        return;
    const int n = dim();
    Weight* m = m_.data();
    for (int i = 0; i < n; ++i)
        if (m[i * n + i] > 0) {
            make_unsat();
            return;
        }
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            Weight ik = m[i * n + k];
            if (ik == kNegInf)
                continue;
            for (int j = 0; j < n; ++j) {
                Weight kj = m[k * n + j];
                if (kj == kNegInf)
                    continue;
                long long s = static_cast<long long>(ik) + kj;
                if (s > m[i * n + j])
                    m[i * n + j] = clamp(s);
            }
        }
        for (int i = 0; i < n; ++i)
            if (m[i * n + i] > 0) {
                make_unsat();
                return;
            }
    }
    closed_ = true;
}

bool GapGraph::operator==(const GapGraph& o) const
{
    return unsat_ == o.unsat_ && vars_ == o.vars_ && m_ == o.m_;
}

std::size_t GapGraph::hash() const
{
    std::size_t h = unsat_ ? 0x9e3779b97f4a7c15ULL : 0;
    for (Var v : vars_)
        h = h * 1000003 ^ v;
    for (Weight w : m_)
        h = h * 1000003 ^ static_cast<std::uint32_t>(w);
    return h;
}

GapGraph graph_of(std::span<const Clause> clauses, std::span<const Var> extra_vars)
{
    std::vector<Var> vars(extra_vars.begin(), extra_vars.end());
    for (const Clause& c : clauses) {
        if (c.k == kNegInf || c.k == kPosInf)
            throw std::invalid_argument("clause weight must be finite");
        vars.push_back(c.a);
        vars.push_back(c.b);
    }
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    if (!vars.empty() && vars.front() == kZero)
        vars.erase(vars.begin());
    GapGraph g(std::move(vars));
    for (const Clause& c : clauses)
        g.raise(c.a, c.b, c.k);
    g.close_in_place();
    return g;
}

GapGraph close(GapGraph g)
{
    g.close_in_place();
    return g;
}

bool is_sat(const GapGraph& g)
{
    if (g.is_closed())
        return !g.is_unsat();
    return !close(g).is_unsat();
}

int degree(const GapGraph& g)
{
    if (g.is_unsat())
        throw std::logic_error("degree of an unsatisfiable graph");
    if (!g.is_closed())
        throw std::logic_error("degree of a graph that is not closed");
    long long d = 0;
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j) {
            Weight w = g.at(i, j);
            if (i != j && w != kNegInf && w < 0)
                d = std::max(d, -static_cast<long long>(w));
        }
    return static_cast<int>(d);
}

GapGraph with_vars(const GapGraph& g, std::span<const Var> extra)
{
    if (g.is_unsat())
        return g;
    std::vector<Var> vars(g.vars().begin(), g.vars().end());
    bool added = false;
    for (Var v : extra)
        if (v != kZero && !g.has_var(v) && std::find(vars.begin(), vars.end(), v) == vars.end()) {
            vars.push_back(v);
            added = true;
        }
    if (!added)
        return g;
    GapGraph out(std::move(vars));
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j)
            if (i != j)
                out.set_at(out.index_of(g.var_at(i)), out.index_of(g.var_at(j)), g.at(i, j));
    if (g.is_closed())
        out.close_in_place();
    return out;
}

GapGraph conjoin(const GapGraph& g, const GapGraph& h)
{
    if (g.is_unsat() || h.is_unsat())
        return GapGraph::unsat();
    GapGraph out = with_vars(g, h.vars());
    for (int i = 0; i < h.dim(); ++i)
        for (int j = 0; j < h.dim(); ++j)
            if (i != j && h.at(i, j) != kNegInf)
                out.raise_at(out.index_of(h.var_at(i)), out.index_of(h.var_at(j)), h.at(i, j));
    out.close_in_place();
    return out;
}

GapGraph substitute(const GapGraph& g, const std::map<Var, Var>& renaming)
{
    if (g.is_unsat())
        return g;
    std::vector<Var> target;
    target.reserve(g.vars().size());
    for (Var v : g.vars()) {
        auto it = renaming.find(v);
        Var t = it == renaming.end() ? v : it->second;
        if (t == kZero)
            throw std::invalid_argument("cannot rename a variable onto the zero vertex");
        target.push_back(t);
    }
    std::vector<Var> sorted = target;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("renaming maps two variables onto one");
    GapGraph out(sorted);
    std::vector<int> idx(static_cast<std::size_t>(g.dim()));
    idx[0] = 0;
    for (std::size_t i = 0; i < target.size(); ++i)
        idx[i + 1] = out.index_of(target[i]);
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j)
            out.set_at(idx[i], idx[j], g.at(i, j));
    if (g.is_closed())
        out.close_in_place();
    return out;
}

GapGraph project_away(const GapGraph& g, std::span<const Var> vars)
{
    if (g.is_unsat())
        return g;
    if (!g.is_closed())
        throw std::logic_error("projection requires a closed graph");
    std::vector<Var> keep;
    for (Var v : g.vars())
        if (std::find(vars.begin(), vars.end(), v) == vars.end())
            keep.push_back(v);
    if (keep.size() == g.vars().size())
        return g;
    GapGraph out(keep);
    std::vector<int> src(static_cast<std::size_t>(out.dim()));
    for (int i = 0; i < out.dim(); ++i)
        src[i] = g.index_of(out.var_at(i));
    for (int i = 0; i < out.dim(); ++i)
        for (int j = 0; j < out.dim(); ++j)
            out.set_at(i, j, g.at(src[i], src[j]));
    // a principal submatrix of a closed matrix is closed
    out.close_in_place();
    return out;
}

GapGraph shift(const GapGraph& g, Var v, Weight delta)
{
    if (g.is_unsat())
        return g;
    if (!g.is_closed())
        throw std::logic_error("shift requires a closed graph");
    int k = g.index_of(v);
    if (k <= 0)
        throw std::out_of_range("shift of a variable not in the graph");
    GapGraph out = g;
    for (int j = 0; j < g.dim(); ++j) {
        if (j == k)
            continue;
        Weight row = g.at(k, j);
        if (row != kNegInf)
            out.set_at(k, j, add_weights(row, delta));
        Weight col = g.at(j, k);
        if (col != kNegInf)
            out.set_at(j, k, add_weights(col, -delta));
    }
    out.close_in_place();
    return out;
}

bool graph_entails(const GapGraph& g, const GapGraph& h)
{
    if (h.is_unsat())
        return true;
    if (g.is_unsat())
        return false;
    if (!std::equal(g.vars().begin(), g.vars().end(), h.vars().begin(), h.vars().end()))
        throw std::invalid_argument("entailment between graphs over different vertices");
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j)
            if (h.at(i, j) < g.at(i, j))
                return false;
    return true;
}

GapGraph relax_graph(const GapGraph& g, int k)
{
    if (k < 0)
        throw std::invalid_argument("relaxation bound must be non-negative");
    GapGraph base = close(g);
    if (base.is_unsat())
        return base;
    for (;;) {
        GapGraph closed = close(base);
        if (degree(closed) <= k)
            return closed;
        // Dropping the weights below -k may not be enough: shorter negative
        // edges can compose back into one. Then drop the most negative one.
        bool dropped = false;
        int wi = -1, wj = -1;
        Weight worst = 0;
        for (int i = 0; i < base.dim(); ++i)
            for (int j = 0; j < base.dim(); ++j) {
                Weight w = base.at(i, j);
                if (i == j || w == kNegInf || w >= 0)
                    continue;
                if (w < -k) {
                    base.set_at(i, j, kNegInf);
                    dropped = true;
                }
                else if (w < worst) {
                    worst = w;
                    wi = i;
                    wj = j;
                }
            }
        if (!dropped) {
            assert(wi >= 0);
            base.set_at(wi, wj, kNegInf);
        }
    }
}

bool holds(const GapGraph& g, const std::function<long long(Var)>& value)
{
    if (g.is_unsat())
        return false;
    std::vector<long long> val(static_cast<std::size_t>(g.dim()));
    for (int i = 0; i < g.dim(); ++i)
        val[i] = i == 0 ? 0 : value(g.var_at(i));
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j) {
            Weight w = g.at(i, j);
            if (w != kNegInf && val[i] - val[j] < w)
                return false;
        }
    return true;
}

std::string to_dot(const GapGraph& g, const std::function<std::string(Var)>& name)
{
    std::ostringstream os;
    os << "digraph gap {\n";
    if (g.is_unsat()) {
        os << "  false;\n}\n";
        return os.str();
    }
    for (int i = 0; i < g.dim(); ++i)
        os << "  \"" << name(g.var_at(i)) << "\";\n";
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j)
            if (i != j && g.at(i, j) != kNegInf)
                os << "  \"" << name(g.var_at(i)) << "\" -> \"" << name(g.var_at(j)) << "\" [label=\"" << g.at(i, j)
                   << "\"];\n";
    os << "}\n";
    return os.str();
}

} // namespace phz
