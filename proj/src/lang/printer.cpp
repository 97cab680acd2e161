#include "phz/lang.hpp"

#include <sstream>

namespace phz {

namespace {

int precedence(Cond::Kind k)
{
    switch (k) {
    case Cond::Kind::Or: return 1;
    case Cond::Kind::And: return 2;
    case Cond::Kind::Not: return 3;
    default: return 4;
    }
}

void print_cond(std::ostream& os, const Program& prg, const Cond& c, int outer)
{
    int prec = precedence(c.kind);
    bool parens = prec < outer;
    if (parens)
        os << '(';
    switch (c.kind) {
    case Cond::Kind::Ndet: os << "ndet()"; break;
    case Cond::Kind::True: os << "true"; break;
    case Cond::Kind::False: os << "false"; break;
    case Cond::Kind::Var: os << prg.bools.at(c.var); break;
    case Cond::Kind::Not:
        os << '!';
        print_cond(os, prg, *c.lhs, prec);
        break;
    case Cond::Kind::Or:
    case Cond::Kind::And:
        print_cond(os, prg, *c.lhs, prec);
        os << (c.kind == Cond::Kind::Or ? " || " : " && ");
        // left-associative: a right operand of equal precedence needs parens
        print_cond(os, prg, *c.rhs, prec + 1);
        break;
    }
    if (parens)
        os << ')';
}

const std::string& local_name(const Program& prg, int task, int var)
{
    return prg.tasks.at(task).locals.at(var).name;
}

void print_head_to(std::ostream& os, const Program& prg, int task, const Stmt& s)
{
    switch (s.kind) {
    case Stmt::Kind::NewPhaser:
        os << local_name(prg, task, s.var) << " = newPhaser("
           << to_string(prg.tasks[task].locals[s.var].mode) << ")";
        break;
    case Stmt::Kind::Asynch: {
        const TaskDecl& callee = prg.tasks.at(s.callee);
        os << "asynch(" << callee.name;
        for (std::size_t i = 0; i < s.args.size(); ++i)
            os << ", " << local_name(prg, task, s.args[i]) << "(" << to_string(callee.locals[i].mode) << ")";
        os << ")";
        break;
    }
    case Stmt::Kind::Drop: os << local_name(prg, task, s.var) << ".drop()"; break;
    case Stmt::Kind::Signal: os << local_name(prg, task, s.var) << ".signal()"; break;
    case Stmt::Kind::Wait: os << local_name(prg, task, s.var) << ".wait()"; break;
    case Stmt::Kind::Exit: os << "exit"; break;
    case Stmt::Kind::Assign:
        os << prg.bools.at(s.var) << " = ";
        print_cond(os, prg, *s.cond, 0);
        break;
    case Stmt::Kind::Assert:
        os << "assert(";
        print_cond(os, prg, *s.cond, 0);
        os << ")";
        break;
    case Stmt::Kind::While:
    case Stmt::Kind::If:
        os << (s.kind == Stmt::Kind::While ? "while (" : "if (");
        print_cond(os, prg, *s.cond, 0);
        os << ")";
        break;
    }
}

void print_block(std::ostream& os, const Program& prg, int task, const Block& b, int depth)
{
    std::string indent(static_cast<std::size_t>(depth) * 4, ' ');
    for (const Stmt* s : b) {
        os << indent;
        print_head_to(os, prg, task, *s);
        if (s->is_compound()) {
            os << " {\n";
            print_block(os, prg, task, s->body, depth + 1);
            os << indent << "}\n";
        }
        else
            os << ";\n";
    }
}

} // namespace

std::string print(const Program& prg, int /*task*/, const Cond& cond)
{
    std::ostringstream os;
    print_cond(os, prg, cond, 0);
    return os.str();
}

std::string print_head(const Program& prg, int task, const Stmt& stmt)
{
    std::ostringstream os;
    print_head_to(os, prg, task, stmt);
    return os.str();
}

std::string print(const Program& prg)
{
    std::ostringstream os;
    if (!prg.bools.empty()) {
        os << "bool ";
        for (std::size_t i = 0; i < prg.bools.size(); ++i)
            os << (i ? ", " : "") << prg.bools[i];
        os << ";\n\n";
    }
    for (std::size_t t = 0; t < prg.tasks.size(); ++t) {
        const TaskDecl& task = prg.tasks[t];
        if (t)
            os << "\n";
        os << task.name << "(";
        for (std::size_t i = 0; i < task.num_params; ++i)
            os << (i ? ", " : "") << task.locals[i].name << "(" << to_string(task.locals[i].mode) << ")";
        os << ") {\n";
        print_block(os, prg, static_cast<int>(t), task.body, 1);
        os << "}\n";
    }
    return os.str();
}

} // namespace phz
