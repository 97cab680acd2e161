#include "phz/lang.hpp"

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>

namespace phz {

namespace {

struct Token {
    enum class Kind { Ident, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    int line = 1;
    int col = 1;
};

std::vector<Token> lex(std::string_view src)
{
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            }
            else
                ++col;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            int l = line, cl = col;
            advance(2);
            while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/'))
                advance(1);
            if (i + 1 >= src.size())
                throw ParseError(l, cl, "unterminated block comment");
            advance(2);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            t.kind = Token::Kind::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        t.kind = Token::Kind::Punct;
        if ((c == '&' || c == '|') && i + 1 < src.size() && src[i + 1] == c) {
            t.text = std::string(2, c);
            advance(2);
            out.push_back(std::move(t));
            continue;
        }
        if (std::string_view("(){};,.=!*").find(c) == std::string_view::npos)
            throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        t.text = std::string(1, c);
        advance(1);
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

const char* const kKeywords[] = {"bool", "newPhaser", "asynch", "exit", "assert", "while", "if",
                                 "true", "false", "ndet", "SIG_WAIT", "SIG", "WAIT"};

bool is_keyword(const std::string& s)
{
    for (const char* k : kKeywords)
        if (s == k)
            return true;
    return false;
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(lex(src)) {}

    Program run()
    {
        while (peek_is("bool"))
            parse_bools();
        while (peek().kind != Token::Kind::End)
            parse_task();
        resolve_asynchs();
        prg_.entry = prg_.find_task("main");
        if (prg_.entry < 0)
            throw ParseError(peek().line, peek().col, "program has no 'main' task");
        if (prg_.tasks[prg_.entry].num_params != 0) {
            const auto& at = task_pos_[prg_.entry];
            throw ParseError(at.line, at.col, "'main' must not take parameters");
        }
        return std::move(prg_);
    }

private:
    struct VarRef {
        Stmt* stmt;
        std::string name;
        Token where;
        enum class Use { Target, Signal, Wait, Drop, Arg } use;
        std::optional<RegMode> mode;
        std::size_t arg_index = 0;
    };

    struct PendingAsynch {
        Stmt* stmt;
        int task;
        std::string callee;
        std::vector<std::optional<RegMode>> arg_modes;
        Token where;
    };

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool peek_is(std::string_view s, std::size_t k = 0) const { return peek(k).text == s && peek(k).kind != Token::Kind::End; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw ParseError(t.line, t.col, msg); }

    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    Token expect(std::string_view s)
    {
        if (!peek_is(s))
            fail(peek(), "expected '" + std::string(s) + "' but found " + describe(peek()));
        return next();
    }

    static std::string describe(const Token& t)
    {
        return t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    }

    Token ident()
    {
        if (peek().kind != Token::Kind::Ident || is_keyword(peek().text))
            fail(peek(), "expected identifier but found " + describe(peek()));
        return next();
    }

    bool accept(std::string_view s)
    {
        if (peek_is(s)) {
            next();
            return true;
        }
        return false;
    }

    std::optional<RegMode> mode_keyword()
    {
        if (accept("SIG_WAIT"))
            return RegMode::SigWait;
        if (accept("SIG"))
            return RegMode::Sig;
        if (accept("WAIT"))
            return RegMode::Wait;
        return std::nullopt;
    }

    RegMode expect_mode()
    {
        auto m = mode_keyword();
        if (!m)
            fail(peek(), "expected registration mode (SIG_WAIT, SIG or WAIT) but found " + describe(peek()));
        return *m;
    }

    void parse_bools()
    {
        expect("bool");
        do {
            Token t = ident();
            if (prg_.find_bool(t.text) >= 0)
                fail(t, "duplicate boolean variable '" + t.text + "'");
            prg_.bools.push_back(t.text);
        } while (accept(","));
        expect(";");
        if (prg_.bools.size() > 64)
            fail(peek(), "at most 64 boolean variables are supported");
    }

    void parse_task()
    {
        Token name = ident();
        if (prg_.find_task(name.text) >= 0)
            fail(name, "duplicate task '" + name.text + "'");
        if (prg_.find_bool(name.text) >= 0)
            fail(name, "task name '" + name.text + "' clashes with a boolean variable");
        TaskDecl decl;
        decl.name = name.text;
        expect("(");
        if (!peek_is(")")) {
            do {
                Token p = ident();
                PhaserLocal local{p.text, RegMode::SigWait};
                if (accept("(")) {
                    local.mode = expect_mode();
                    expect(")");
                }
                for (const auto& l : decl.locals)
                    if (l.name == p.text)
                        fail(p, "duplicate parameter '" + p.text + "'");
                if (prg_.find_bool(p.text) >= 0)
                    fail(p, "parameter '" + p.text + "' clashes with a boolean variable");
                decl.locals.push_back(local);
            } while (accept(","));
        }
        expect(")");
        decl.num_params = decl.locals.size();
        prg_.tasks.push_back(std::move(decl));
        task_pos_.push_back(name);
        current_ = static_cast<int>(prg_.tasks.size()) - 1;
        refs_.clear();
        explicit_modes_.clear();
        expect("{");
        Block body = parse_stmt_list();
        expect("}");
        accept(";");
        prg_.tasks[current_].body = std::move(body);
        resolve_locals();
    }

    Block parse_stmt_list()
    {
        Block out;
        while (!peek_is("}") && peek().kind != Token::Kind::End) {
            if (accept(";"))
                continue;
            out.push_back(parse_stmt());
        }
        return out;
    }

    Block parse_body()
    {
        if (accept("{")) {
            Block b = parse_stmt_list();
            expect("}");
            return b;
        }
        return Block{parse_stmt()};
    }

    Stmt* parse_stmt()
    {
        const Token& t = peek();
        Stmt& s = prg_.make_stmt();
        s.line = t.line;
        if (accept("exit")) {
            s.kind = Stmt::Kind::Exit;
            expect_terminator();
            return &s;
        }
        if (accept("assert")) {
            s.kind = Stmt::Kind::Assert;
            expect("(");
            s.cond = parse_cond();
            expect(")");
            expect_terminator();
            return &s;
        }
        if (peek_is("while") || peek_is("if")) {
            s.kind = next().text == "while" ? Stmt::Kind::While : Stmt::Kind::If;
            expect("(");
            s.cond = parse_cond();
            expect(")");
            s.body = parse_body();
            return &s;
        }
        if (peek_is("asynch")) {
            Token where = next();
            s.kind = Stmt::Kind::Asynch;
            expect("(");
            Token callee = ident();
            PendingAsynch pending{&s, current_, callee.text, {}, callee};
            while (accept(",")) {
                Token a = ident();
                std::optional<RegMode> m;
                if (accept("(")) {
                    m = expect_mode();
                    expect(")");
                }
                refs_.push_back({&s, a.text, a, VarRef::Use::Arg, m, pending.arg_modes.size()});
                pending.arg_modes.push_back(m);
            }
            expect(")");
            s.args.assign(pending.arg_modes.size(), -1);
            asynchs_.push_back(std::move(pending));
            expect_terminator();
            return &s;
        }
        Token name = ident();
        if (accept(".")) {
            Token op = ident_or_keyword();
            VarRef::Use use;
            if (op.text == "signal") {
                s.kind = Stmt::Kind::Signal;
                use = VarRef::Use::Signal;
            }
            else if (op.text == "wait") {
                s.kind = Stmt::Kind::Wait;
                use = VarRef::Use::Wait;
            }
            else if (op.text == "drop") {
                s.kind = Stmt::Kind::Drop;
                use = VarRef::Use::Drop;
            }
            else
                fail(op, "unknown phaser operation '" + op.text + "'");
            expect("(");
            expect(")");
            refs_.push_back({&s, name.text, name, use, std::nullopt, 0});
            expect_terminator();
            return &s;
        }
        expect("=");
        if (accept("newPhaser")) {
            s.kind = Stmt::Kind::NewPhaser;
            expect("(");
            std::optional<RegMode> m;
            if (!peek_is(")"))
                m = expect_mode();
            expect(")");
            if (prg_.find_bool(name.text) >= 0)
                fail(name, "cannot store a phaser in boolean variable '" + name.text + "'");
            refs_.push_back({&s, name.text, name, VarRef::Use::Target, m, 0});
            expect_terminator();
            return &s;
        }
        s.kind = Stmt::Kind::Assign;
        s.var = prg_.find_bool(name.text);
        if (s.var < 0)
            fail(name, "assignment to undeclared boolean variable '" + name.text + "'");
        s.cond = parse_cond();
        expect_terminator();
        return &s;
    }

    Token ident_or_keyword()
    {
        if (peek().kind != Token::Kind::Ident)
            fail(peek(), "expected identifier but found " + describe(peek()));
        return next();
    }

    void expect_terminator()
    {
        if (peek_is(";") || peek_is("}"))
            return;
        fail(peek(), "expected ';' but found " + describe(peek()));
    }

    std::unique_ptr<Cond> parse_cond() { return parse_or(); }

    std::unique_ptr<Cond> parse_or()
    {
        auto lhs = parse_and();
        while (accept("||")) {
            auto c = std::make_unique<Cond>();
            c->kind = Cond::Kind::Or;
            c->lhs = std::move(lhs);
            c->rhs = parse_and();
            lhs = std::move(c);
        }
        return lhs;
    }

    std::unique_ptr<Cond> parse_and()
    {
        auto lhs = parse_unary();
        while (accept("&&")) {
            auto c = std::make_unique<Cond>();
            c->kind = Cond::Kind::And;
            c->lhs = std::move(lhs);
            c->rhs = parse_unary();
            lhs = std::move(c);
        }
        return lhs;
    }

    std::unique_ptr<Cond> parse_unary()
    {
        auto c = std::make_unique<Cond>();
        if (accept("!")) {
            c->kind = Cond::Kind::Not;
            c->lhs = parse_unary();
            return c;
        }
        if (accept("(")) {
            auto inner = parse_cond();
            expect(")");
            return inner;
        }
        if (accept("*")) {
            c->kind = Cond::Kind::Ndet;
            return c;
        }
        if (accept("ndet")) {
            expect("(");
            expect(")");
            c->kind = Cond::Kind::Ndet;
            return c;
        }
        if (accept("true")) {
            c->kind = Cond::Kind::True;
            return c;
        }
        if (accept("false")) {
            c->kind = Cond::Kind::False;
            return c;
        }
        Token v = ident();
        c->kind = Cond::Kind::Var;
        c->var = prg_.find_bool(v.text);
        if (c->var < 0)
            fail(v, "undeclared boolean variable '" + v.text + "'");
        return c;
    }

    void resolve_locals()
    {
        TaskDecl& task = prg_.tasks[current_];
        auto find_local = [&](const std::string& n) -> int {
            for (std::size_t i = 0; i < task.locals.size(); ++i)
                if (task.locals[i].name == n)
                    return static_cast<int>(i);
            return -1;
        };
        // newPhaser targets introduce locals; their mode is fixed by the first
        // explicit annotation (or the parameter declaration).
        std::vector<bool> explicit_mode(task.locals.size(), true);
        for (auto& r : refs_) {
            if (r.use != VarRef::Use::Target)
                continue;
            int idx = find_local(r.name);
            if (idx < 0) {
                task.locals.push_back({r.name, r.mode.value_or(RegMode::SigWait)});
                explicit_mode.push_back(r.mode.has_value());
                idx = static_cast<int>(task.locals.size()) - 1;
            }
            else if (r.mode) {
                if (!explicit_mode[idx]) {
                    task.locals[idx].mode = *r.mode;
                    explicit_mode[idx] = true;
                }
                else if (task.locals[idx].mode != *r.mode)
                    fail(r.where, "phaser variable '" + r.name + "' is used with conflicting registration modes");
            }
            r.stmt->var = idx;
        }
        for (auto& r : refs_) {
            if (r.use == VarRef::Use::Target)
                continue;
            int idx = find_local(r.name);
            if (idx < 0)
                fail(r.where, "undeclared phaser variable '" + r.name + "'");
            RegMode m = task.locals[idx].mode;
            switch (r.use) {
            case VarRef::Use::Signal:
                if (m == RegMode::Wait)
                    fail(r.where, "signal on '" + r.name + "' which is registered in WAIT mode");
                r.stmt->var = idx;
                break;
            case VarRef::Use::Wait:
                if (m == RegMode::Sig)
                    fail(r.where, "wait on '" + r.name + "' which is registered in SIG mode");
                r.stmt->var = idx;
                break;
            case VarRef::Use::Drop: r.stmt->var = idx; break;
            case VarRef::Use::Arg: r.stmt->args[r.arg_index] = idx; break;
            case VarRef::Use::Target: break;
            }
        }
    }

    void resolve_asynchs()
    {
        for (auto& a : asynchs_) {
            int callee = prg_.find_task(a.callee);
            if (callee < 0)
                fail(a.where, "asynch of undeclared task '" + a.callee + "'");
            const TaskDecl& target = prg_.tasks[callee];
            if (target.num_params != a.arg_modes.size())
                fail(a.where, "task '" + a.callee + "' expects " + std::to_string(target.num_params) +
                                  " phaser argument(s), got " + std::to_string(a.arg_modes.size()));
            if (callee == prg_.find_task("main"))
                fail(a.where, "'main' cannot be spawned");
            a.stmt->callee = callee;
            const TaskDecl& caller = prg_.tasks[a.task];
            for (std::size_t i = 0; i < a.arg_modes.size(); ++i) {
                RegMode param = target.locals[i].mode;
                if (a.arg_modes[i] && *a.arg_modes[i] != param)
                    fail(a.where, "argument " + std::to_string(i + 1) + " of asynch(" + a.callee + ") is annotated " +
                                      std::string(to_string(*a.arg_modes[i])) + " but the parameter is " +
                                      std::string(to_string(param)));
                RegMode own = caller.locals[a.stmt->args[i]].mode;
                if (own != RegMode::SigWait && own != param)
                    fail(a.where, "a task registered in " + std::string(to_string(own)) +
                                      " mode cannot register another task in " + std::string(to_string(param)) +
                                      " mode");
            }
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Program prg_;
    int current_ = -1;
    std::vector<Token> task_pos_;
    std::vector<VarRef> refs_;
    std::vector<bool> explicit_modes_;
    std::vector<PendingAsynch> asynchs_;
};

} // namespace

Program parse(std::string_view text)
{
    return Parser(text).run();
}

Program parse_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

} // namespace phz
