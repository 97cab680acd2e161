// phzverify: verification front end for phaser programs.
//
// Exit codes: 0 safe or unreachable, 1 violation or trace found,
// 2 usage or parse error, 3 resource bound exceeded.

#include "phz/checker.hpp"
#include "phz/paramview.hpp"
#include "phz/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace phz;

namespace {

constexpr int kSafe = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;
constexpr int kBound = 3;

struct Loaded {
    Program prg;
    ControlSet cs;
    explicit Loaded(Program p) : prg(std::move(p)), cs(prg) {}
};

std::unique_ptr<Loaded> load(const std::string& path)
{
    try {
        return std::make_unique<Loaded>(parse_file(path));
    }
    catch (const ParseError& e) {
        std::cerr << path << ":" << e.what() << "\n"; // what() starts with line:col
    }
    catch (const std::exception& e) {
        std::cerr << path << ": " << e.what() << "\n";
    }
    return nullptr;
}

Property parse_property(const std::string& s)
{
    return *property_from_string(s);
}

std::size_t verify_cap()
{
    if (const char* env = std::getenv("PHZ_VERIFY_CAP")) {
        try {
            return std::stoull(env);
        }
        catch (const std::exception&) {
            std::cerr << "ignoring malformed PHZ_VERIFY_CAP='" << env << "'\n";
        }
    }
    return 10'000'000;
}

bool write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    out << text;
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        return false;
    }
    return true;
}

struct CheckArgs {
    std::string file;
    std::string property = "assert";
    int max_tasks = 4;
    int max_phasers = 2;
    std::optional<int> degree_bound;
    bool lazy_exit = false;
    bool no_prune = false;
    bool by_task_count = false;
    std::string format = "text";
    std::string emit_trace;
};

int run_check(const CheckArgs& a)
{
    auto l = load(a.file);
    if (!l)
        return kUsage;
    Property kind = parse_property(a.property);
    CheckOptions o;
    o.max_tasks = a.max_tasks;
    o.max_phasers = a.max_phasers;
    o.degree_bound = a.degree_bound;
    o.lazy_exit = a.lazy_exit;
    o.prune = !a.no_prune;
    o.by_task_count = a.by_task_count;
    o.max_pops = verify_cap();
    CheckResult r = check_property(l->cs, kind, o);
    std::optional<ReplayResult> replay;
    if (r.trace)
        replay = replay_trace(l->cs, *r.trace, kind);
    const ReplayResult* rp = replay ? &*replay : nullptr;
    if (a.format == "json")
        std::cout << check_to_json(l->cs, kind, o, r, rp).dump(2) << "\n";
    else
        std::cout << check_to_text(l->cs, kind, r, rp);
    if (!a.emit_trace.empty() && r.trace &&
        !write_file(a.emit_trace, trace_to_json(l->cs, *r.trace, kind, check_verdict(r, rp)).dump(2) + "\n"))
        return kUsage;
    switch (r.status) {
    case CheckResult::Status::Unreachable: return kSafe;
    case CheckResult::Status::Reached: return kViolation;
    case CheckResult::Status::BoundExceeded: return kBound;
    }
    return kBound;
}

struct ParamArgs {
    std::string file;
    std::string property = "assert";
    int view_size = 1;
    std::optional<int> max_view_size;
    int degree_bound = 1;
    int max_phasers = 2;
    std::string format = "text";
};

int run_param(const ParamArgs& a)
{
    auto l = load(a.file);
    if (!l)
        return kUsage;
    Property kind = parse_property(a.property);
    ParamOptions o;
    o.view_size = a.view_size;
    o.max_view_size = a.max_view_size.value_or(a.view_size + 1);
    o.degree_bound = a.degree_bound;
    o.max_phasers = a.max_phasers;
    if (o.max_view_size < o.view_size) {
        std::cerr << "--max-view-size must be at least --view-size\n";
        return kUsage;
    }
    ParamResult r = param_check(l->cs, kind, o);
    if (a.format == "json")
        std::cout << param_to_json(l->cs, kind, r).dump(2) << "\n";
    else
        std::cout << param_to_text(l->cs, kind, r);
    switch (r.verdict) {
    case ParamResult::Verdict::SafeForAllN: return kSafe;
    case ParamResult::Verdict::TraceViolation:
    case ParamResult::Verdict::PotentialViolation: return kViolation;
    case ParamResult::Verdict::BoundExceeded: return kBound;
    }
    return kBound;
}

struct SimulateArgs {
    std::string file;
    Phase phase_bound = 4;
    std::size_t max_steps = 100'000;
    int max_tasks = 8;
    int max_phasers = 4;
    std::string schedule;
    std::optional<std::string> property;
};

int run_simulate(const SimulateArgs& a)
{
    auto l = load(a.file);
    if (!l)
        return kUsage;
    std::optional<Property> kind;
    if (a.property)
        kind = parse_property(*a.property);
    if (!a.schedule.empty()) {
        std::ifstream in(a.schedule);
        if (!in) {
            std::cerr << "cannot read " << a.schedule << "\n";
            return kUsage;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        std::vector<Configuration> path;
        try {
            path = replay_schedule(l->cs, parse_schedule(buf.str()));
        }
        catch (const std::exception& e) {
            std::cerr << a.schedule << ": " << e.what() << "\n";
            return kUsage;
        }
        for (std::size_t i = 0; i < path.size(); ++i)
            std::cout << "-- configuration " << i << "\n" << to_string(l->cs, path[i]);
        const Configuration& last = path.back();
        bool bad = kind ? is_bad(l->cs, last, *kind)
                        : std::any_of(std::begin(kAllProperties), std::end(kAllProperties),
                                      [&](Property k) { return is_bad(l->cs, last, k); });
        std::cout << (bad ? "verdict: violation\n" : "verdict: no violation at the end of the schedule\n");
        return bad ? kViolation : kSafe;
    }
    ExploreOptions o;
    o.phase_bound = a.phase_bound;
    o.max_states = a.max_steps;
    o.task_bound = a.max_tasks;
    o.phaser_bound = a.max_phasers;
    o.property = kind;
    ExploreResult r = explore_bounded(l->cs, o);
    std::cout << "states: " << r.states << (r.pruned ? " (some successors cut by the bounds)" : "") << "\n";
    switch (r.status) {
    case ExploreResult::Status::Violation:
        std::cout << "verdict: violation (" << to_string(*r.kind) << ")\n";
        std::cout << "schedule (task choice):\n" << format_schedule(r.schedule);
        std::cout << "final configuration:\n" << to_string(l->cs, r.path.back());
        std::cout << "violation: " << describe_violation(l->cs, r.path.back(), *r.kind) << "\n";
        return kViolation;
    case ExploreResult::Status::Safe: std::cout << "verdict: no violation within the bounds\n"; return kSafe;
    case ExploreResult::Status::Exhausted:
        std::cout << "verdict: state budget exhausted\n";
        return kBound;
    }
    return kBound;
}

int run_parse(const std::string& file, bool dump)
{
    auto l = load(file);
    if (!l)
        return kUsage;
    if (dump)
        std::cout << print(l->prg);
    else
        std::cout << file << ": " << l->prg.tasks.size() << " tasks, " << l->prg.bools.size() << " booleans, "
                  << l->cs.size() << " control sequences\n";
    return kSafe;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Verifier for phaser programs"};
    app.require_subcommand(1);
    const std::vector<std::string> all_props{"assert", "race", "runtime", "deadlock"};

    CheckArgs ca;
    CLI::App* check = app.add_subcommand("check", "bounded backward reachability");
    check->add_option("file", ca.file, "program")->required()->check(CLI::ExistingFile);
    check->add_option("--property", ca.property)->check(CLI::IsMember(all_props))->capture_default_str();
    check->add_option("--max-tasks", ca.max_tasks)->check(CLI::Range(1, 16))->capture_default_str();
    check->add_option("--max-phasers", ca.max_phasers)->check(CLI::Range(0, 8))->capture_default_str();
    check->add_option("--degree-bound", ca.degree_bound, "relax constraints to this degree")
        ->check(CLI::NonNegativeNumber);
    check->add_flag("--lazy-exit", ca.lazy_exit, "only add exiting tasks next to reachable shapes");
    check->add_flag("--no-prune", ca.no_prune, "enumerate all bad shapes instead of reachable ones");
    check->add_flag("--by-task-count", ca.by_task_count, "pop constraints with fewer tasks first");
    check->add_option("--format", ca.format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();
    check->add_option("--emit-trace", ca.emit_trace, "write the trace as JSON");

    ParamArgs pa;
    CLI::App* param = app.add_subcommand("param", "view abstraction for any number of tasks");
    param->add_option("file", pa.file, "program")->required()->check(CLI::ExistingFile);
    param->add_option("--property", pa.property)
        ->check(CLI::IsMember({"assert", "deadlock"}))
        ->capture_default_str();
    param->add_option("--view-size", pa.view_size)->check(CLI::Range(1, 4))->capture_default_str();
    param->add_option("--max-view-size", pa.max_view_size, "refine up to this size (default view size + 1)")
        ->check(CLI::Range(1, 5));
    param->add_option("--degree-bound", pa.degree_bound)->check(CLI::NonNegativeNumber)->capture_default_str();
    param->add_option("--max-phasers", pa.max_phasers)->check(CLI::Range(0, 8))->capture_default_str();
    param->add_option("--format", pa.format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();

    SimulateArgs sa;
    CLI::App* sim = app.add_subcommand("simulate", "explicit-state exploration or schedule replay");
    sim->add_option("file", sa.file, "program")->required()->check(CLI::ExistingFile);
    sim->add_option("--phase-bound", sa.phase_bound)->check(CLI::NonNegativeNumber)->capture_default_str();
    sim->add_option("--max-steps", sa.max_steps, "state budget")->capture_default_str();
    sim->add_option("--max-tasks", sa.max_tasks)->capture_default_str();
    sim->add_option("--max-phasers", sa.max_phasers)->capture_default_str();
    sim->add_option("--schedule", sa.schedule, "replay this schedule instead")->check(CLI::ExistingFile);
    sim->add_option("--property", sa.property)->check(CLI::IsMember(all_props));

    std::string parse_file_name;
    bool dump = false;
    CLI::App* parse_cmd = app.add_subcommand("parse", "parse and summarize a program");
    parse_cmd->add_option("file", parse_file_name, "program")->required()->check(CLI::ExistingFile);
    parse_cmd->add_flag("--dump-ast", dump, "print the program back");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kSafe : kUsage;
    }

    try {
        if (*check)
            return run_check(ca);
        if (*param)
            return run_param(pa);
        if (*sim)
            return run_simulate(sa);
        if (*parse_cmd)
            return run_parse(parse_file_name, dump);
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBound;
    }
    return kUsage;
}
