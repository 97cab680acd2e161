#include "phz/report.hpp"

#include <sstream>
#include <stdexcept>

namespace phz {

Json to_json(const GapGraph& g)
{
    Json j;
    if (g.is_unsat()) {
        j["unsat"] = true;
        return j;
    }
    j["vars"] = Json::array();
    for (Var v : g.vars())
        j["vars"].push_back(v);
    j["edges"] = Json::array();
    for (int a = 0; a < g.dim(); ++a)
        for (int b = 0; b < g.dim(); ++b)
            if (a != b && g.at(a, b) != kNegInf)
                j["edges"].push_back({g.var_at(a), g.var_at(b), g.at(a, b)});
    return j;
}

GapGraph graph_from_json(const Json& j)
{
    if (j.value("unsat", false))
        return GapGraph::unsat();
    GapGraph g(j.at("vars").get<std::vector<Var>>());
    for (const Json& e : j.at("edges"))
        g.raise(e.at(0).get<Var>(), e.at(1).get<Var>(), e.at(2).get<Weight>());
    g.close_in_place();
    return g;
}

Json to_json(const ControlSet& cs, const Constraint& phi)
{
    Json j;
    j["tasks"] = phi.num_tasks();
    j["phasers"] = phi.num_phasers();
    j["bools"] = phi.bv;
    j["pcs"] = Json::array();
    j["pvs"] = Json::array();
    j["at"] = Json::array();
    for (const SymTask& t : phi.tasks) {
        j["pcs"].push_back(t.pc);
        j["pvs"].push_back(t.pv);
        j["at"].push_back(cs.describe(t.pc));
    }
    j["graphs"] = Json::array();
    for (int p = 0; p < phi.num_phasers(); ++p) {
        Json g = to_json(phi.graphs[p]);
        g["phaser"] = p;
        j["graphs"].push_back(std::move(g));
    }
    j["text"] = to_string(cs, phi);
    return j;
}

Constraint constraint_from_json(const Json& j)
{
    Constraint phi;
    phi.bv = j.at("bools").get<std::uint64_t>();
    const Json& pcs = j.at("pcs");
    const Json& pvs = j.at("pvs");
    if (pcs.size() != pvs.size())
        throw std::runtime_error("pcs and pvs differ in length");
    for (std::size_t i = 0; i < pcs.size(); ++i)
        phi.tasks.push_back({pcs[i].get<int>(), pvs[i].get<std::vector<int>>()});
    for (const Json& g : j.at("graphs"))
        phi.graphs.push_back(graph_from_json(g));
    return phi;
}

Json trace_to_json(const ControlSet& cs, const Trace& tr, Property kind, std::string_view verdict)
{
    Json j;
    j["verdict"] = verdict;
    j["property"] = to_string(kind);
    j["path"] = tr.ids;
    j["steps"] = Json::array();
    for (std::size_t i = 0; i < tr.steps.size(); ++i) {
        const TraceStep& s = tr.steps[i];
        j["steps"].push_back({{"task", s.task},
                              {"stmt", s.stmt},
                              {"rule", s.rule},
                              {"fromPc", s.from_pc},
                              {"constraintId", tr.ids[i]}});
    }
    j["constraints"] = Json::object();
    for (std::size_t i = 0; i < tr.constraints.size(); ++i)
        j["constraints"][std::to_string(tr.ids[i])] = to_json(cs, tr.constraints[i]);
    return j;
}

Trace trace_from_json(const Json& j)
{
    Trace tr;
    tr.ids = j.at("path").get<std::vector<std::size_t>>();
    for (std::size_t id : tr.ids)
        tr.constraints.push_back(constraint_from_json(j.at("constraints").at(std::to_string(id))));
    for (const Json& s : j.at("steps"))
        tr.steps.push_back({s.at("task").get<int>(), s.value("fromPc", 0), s.at("stmt").get<std::string>(),
                            s.value("rule", std::string())});
    return tr;
}

std::string check_verdict(const CheckResult& r, const ReplayResult* replay)
{
    switch (r.status) {
    case CheckResult::Status::Unreachable: return "unreachable";
    case CheckResult::Status::BoundExceeded: return "bound-exceeded";
    case CheckResult::Status::Reached: return replay && replay->ok ? "reached" : "potential";
    }
    return "?";
}

namespace {

Json stats_json(const CheckStats& s)
{
    // wall-clock time is left out so that identical runs print identical JSON
    return {{"targets", s.targets},       {"pops", s.pops},        {"generated", s.generated},
            {"subsumed", s.subsumed},     {"visited", s.visited},  {"maxDegree", s.max_degree},
            {"relaxed", s.relaxed},       {"allFree", s.all_free}};
}

} // namespace

Json check_to_json(const ControlSet& cs, Property kind, const CheckOptions& opts, const CheckResult& r,
                   const ReplayResult* replay)
{
    std::string verdict = check_verdict(r, replay);
    Json j = r.trace ? trace_to_json(cs, *r.trace, kind, verdict) : Json{{"verdict", verdict}, {"property", to_string(kind)}};
    j["bounds"] = {{"maxTasks", opts.max_tasks}, {"maxPhasers", opts.max_phasers}};
    if (opts.degree_bound)
        j["bounds"]["degreeBound"] = *opts.degree_bound;
    j["stats"] = stats_json(r.stats);
    if (!r.diagnostic.empty())
        j["diagnostic"] = r.diagnostic;
    if (replay) {
        j["replay"] = {{"ok", replay->ok}};
        if (replay->ok) {
            j["replay"]["schedule"] = format_schedule(replay->schedule);
            j["replay"]["violation"] = describe_violation(cs, replay->path.back(), kind);
        }
    }
    return j;
}

std::string describe_violation(const ControlSet& cs, const Configuration& c, Property kind)
{
    auto at = [&](int id) {
        int pc = c.task(id)->pc;
        return "task " + std::to_string(id) + " at " +
               (cs.is_terminated(pc) ? std::string("<end>") : print_head(cs.program(), cs.owner(pc), cs.head(pc)));
    };
    std::ostringstream os;
    switch (kind) {
    case Property::Assert:
        if (auto t = assert_fault(cs, c))
            os << at(*t) << " fails its assertion";
        break;
    case Property::Runtime:
        if (auto t = runtime_fault(cs, c))
            os << at(*t) << " uses a phaser it is not registered on";
        break;
    case Property::Race:
        if (auto w = detect_race(cs, c))
            os << at(w->writer) << " races with " << at(w->other) << " on " << cs.program().bools.at(w->var);
        break;
    case Property::Deadlock:
        if (auto cycle = is_deadlock(cs, c)) {
            os << "deadlock:";
            for (int t : *cycle)
                os << " " << at(t) << " ->";
            os << " task " << cycle->front();
        }
        break;
    }
    return os.str();
}

std::string trace_to_text(const Trace& tr)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < tr.steps.size(); ++i)
        os << "step " << i + 1 << ": task " << tr.steps[i].task << " fires " << tr.steps[i].stmt << "\n";
    return os.str();
}

std::string check_to_text(const ControlSet& cs, Property kind, const CheckResult& r, const ReplayResult* replay)
{
    std::ostringstream os;
    os << "property: " << to_string(kind) << "\n";
    os << "verdict: " << check_verdict(r, replay) << "\n";
    if (!r.diagnostic.empty())
        os << "note: " << r.diagnostic << "\n";
    if (r.trace) {
        os << trace_to_text(*r.trace);
        if (replay && replay->ok) {
            os << "concrete schedule (task choice):\n" << format_schedule(replay->schedule);
            os << "final configuration:\n" << to_string(cs, replay->path.back());
            os << "violation: " << describe_violation(cs, replay->path.back(), kind) << "\n";
        }
        else if (replay)
            os << "the symbolic trace has no concrete replay (relaxation over-approximates)\n";
    }
    const CheckStats& s = r.stats;
    os << "targets " << s.targets << ", popped " << s.pops << ", generated " << s.generated << ", subsumed "
       << s.subsumed << ", visited " << s.visited << ", max degree " << s.max_degree << ", " << s.seconds << " s\n";
    return os.str();
}

Json param_to_json(const ControlSet& cs, Property kind, const ParamResult& r)
{
    std::string verdict(to_string(r.verdict));
    Json j = r.trace && r.verdict == ParamResult::Verdict::TraceViolation
                 ? trace_to_json(cs, *r.trace, kind, verdict)
                 : Json{{"verdict", verdict}, {"property", to_string(kind)}};
    j["viewSize"] = r.view_size;
    j["log"] = r.log;
    if (!r.diagnostic.empty())
        j["diagnostic"] = r.diagnostic;
    if (r.witness)
        j["witness"] = to_json(cs, *r.witness);
    if (r.replay && r.replay->ok)
        j["replay"] = {{"ok", true}, {"schedule", format_schedule(r.replay->schedule)}};
    return j;
}

std::string param_to_text(const ControlSet& cs, Property kind, const ParamResult& r)
{
    std::ostringstream os;
    os << "property: " << to_string(kind) << "\n";
    os << "verdict: " << to_string(r.verdict) << " (view size " << r.view_size << ")\n";
    if (!r.diagnostic.empty())
        os << "note: " << r.diagnostic << "\n";
    for (const std::string& l : r.log)
        os << "  " << l << "\n";
    if (r.verdict == ParamResult::Verdict::TraceViolation && r.trace) {
        os << trace_to_text(*r.trace);
        if (r.replay && r.replay->ok) {
            os << "final configuration:\n" << to_string(cs, r.replay->path.back());
            os << "violation: " << describe_violation(cs, r.replay->path.back(), kind) << "\n";
        }
    }
    else if (r.witness)
        os << "bad view:\n" << to_string(cs, *r.witness);
    return os.str();
}

} // namespace phz
