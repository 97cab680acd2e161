#include "phz/lang.hpp"

#include <algorithm>

namespace phz {

std::string_view to_string(RegMode mode)
{
    switch (mode) {
    case RegMode::SigWait: return "SIG_WAIT";
    case RegMode::Sig: return "SIG";
    case RegMode::Wait: return "WAIT";
    }
    return "?";
}

bool Cond::mentions(int bool_var) const
{
    switch (kind) {
    case Kind::Var: return var == bool_var;
    case Kind::Not: return lhs->mentions(bool_var);
    case Kind::Or:
    case Kind::And: return lhs->mentions(bool_var) || rhs->mentions(bool_var);
    default: return false;
    }
}

CondValues evaluate(const Cond& cond, std::uint64_t bools)
{
    using K = Cond::Kind;
    switch (cond.kind) {
    case K::Ndet: return {true, true};
    case K::True: return {false, true};
    case K::False: return {true, false};
    case K::Var: {
        bool v = (bools >> cond.var) & 1U;
        return {!v, v};
    }
    case K::Not: {
        auto a = evaluate(*cond.lhs, bools);
        return {a.can_be_true, a.can_be_false};
    }
    case K::Or: {
        auto a = evaluate(*cond.lhs, bools);
        auto b = evaluate(*cond.rhs, bools);
        return {a.can_be_false && b.can_be_false, a.can_be_true || b.can_be_true};
    }
    case K::And: {
        auto a = evaluate(*cond.lhs, bools);
        auto b = evaluate(*cond.rhs, bools);
        return {a.can_be_false || b.can_be_false, a.can_be_true && b.can_be_true};
    }
    }
    return {};
}

bool Stmt::is_phaser_stmt() const
{
    return kind == Kind::Drop || kind == Kind::Signal || kind == Kind::Wait || kind == Kind::Asynch;
}

bool TaskDecl::has_mode(bool finite_signal) const
{
    return std::any_of(locals.begin(), locals.end(), [&](const PhaserLocal& l) {
        return has_finite_signal(l.mode) == finite_signal;
    });
}

int Program::find_task(std::string_view name) const
{
    for (std::size_t i = 0; i < tasks.size(); ++i)
        if (tasks[i].name == name)
            return static_cast<int>(i);
    return -1;
}

int Program::find_bool(std::string_view name) const
{
    for (std::size_t i = 0; i < bools.size(); ++i)
        if (bools[i] == name)
            return static_cast<int>(i);
    return -1;
}

Stmt& Program::make_stmt()
{
    arena_.push_back(std::make_unique<Stmt>());
    return *arena_.back();
}

ParseError::ParseError(int line, int column, const std::string& message) :
    std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
    line_(line),
    column_(column)
{
}

} // namespace phz
