#pragma once

// Phaser program language: AST, parser, pretty printer and the finite set
// of control sequences each task can be at.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace phz {

enum class RegMode : std::uint8_t { SigWait, Sig, Wait };

std::string_view to_string(RegMode mode);

/// A registration in WAIT mode carries an infinite signal phase.
inline bool has_finite_signal(RegMode mode) { return mode != RegMode::Wait; }

struct Cond {
    enum class Kind : std::uint8_t { Ndet, True, False, Var, Or, And, Not };

    Kind kind = Kind::True;
    int var = -1;
    std::unique_ptr<Cond> lhs;
    std::unique_ptr<Cond> rhs;

    bool mentions(int bool_var) const;
};

/// Outcome set of evaluating a condition: ndet() makes both values possible.
struct CondValues {
    bool can_be_false = false;
    bool can_be_true = false;
};

CondValues evaluate(const Cond& cond, std::uint64_t bools);

struct Stmt;
using Block = std::vector<const Stmt*>;

struct Stmt {
    enum class Kind : std::uint8_t {
        NewPhaser,
        Asynch,
        Drop,
        Signal,
        Wait,
        Exit,
        Assign,
        Assert,
        While,
        If,
    };

    Kind kind = Kind::Exit;
    // Phaser local for NewPhaser/Drop/Signal/Wait, bool variable for Assign.
    int var = -1;
    // Asynch: callee task and the caller-side phaser locals passed to it.
    int callee = -1;
    std::vector<int> args;
    std::unique_ptr<Cond> cond;
    Block body;
    int line = 0;

    bool is_phaser_stmt() const;
    bool is_compound() const { return kind == Kind::While || kind == Kind::If; }
};

struct PhaserLocal {
    std::string name;
    RegMode mode = RegMode::SigWait;
};

struct TaskDecl {
    std::string name;
    std::size_t num_params = 0;
    // Parameters come first, then locals introduced by newPhaser().
    std::vector<PhaserLocal> locals;
    Block body;

    bool has_mode(bool finite_signal) const;
};

class Program {
public:
    Program() = default;
    Program(Program&&) noexcept = default;
    Program& operator=(Program&&) noexcept = default;
    Program(const Program&) = delete;
    Program& operator=(const Program&) = delete;

    std::vector<std::string> bools;
    std::vector<TaskDecl> tasks;
    int entry = -1;

    int find_task(std::string_view name) const;
    int find_bool(std::string_view name) const;

    Stmt& make_stmt();
    std::size_t num_stmts() const { return arena_.size(); }

private:
    std::vector<std::unique_ptr<Stmt>> arena_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& message);

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

Program parse(std::string_view text);
Program parse_file(const std::string& path);

std::string print(const Program& prg);
std::string print(const Program& prg, int task, const Cond& cond);
/// One-line rendering of a statement head (compound bodies elided).
std::string print_head(const Program& prg, int task, const Stmt& stmt);

// ---------------------------------------------------------------------------
// Control sequences

struct ControlSeq {
    int owner = -1;
    std::vector<const Stmt*> items;

    bool terminated() const { return items.empty(); }
    auto operator<=>(const ControlSeq&) const = default;
};

/// How a task moves from one control sequence to the next.
enum class Move : std::uint8_t {
    Atomic,    // executed the head statement
    CondTrue,  // head is while/if and its condition held
    CondFalse, // head is while/if and its condition failed
};

struct ControlEdge {
    int from = -1;
    int to = -1;
    Move move = Move::Atomic;
};

/// The finite set of control sequences of a program, interned to integers.
/// The terminated sequence is kept per task so a pc still names its owner.
class ControlSet {
public:
    explicit ControlSet(const Program& prg);

    const Program& program() const { return *prg_; }
    int size() const { return static_cast<int>(seqs_.size()); }
    const ControlSeq& seq(int id) const { return seqs_.at(id); }
    int owner(int id) const { return seqs_.at(id).owner; }

    int initial(int task) const { return initial_.at(task); }
    int terminated(int task) const { return terminated_.at(task); }
    bool is_terminated(int id) const { return seqs_.at(id).terminated(); }
    /// Terminated sequences and sequences headed by `exit`.
    std::span<const int> exit_points() const { return exit_points_; }
    bool is_exit_point(int id) const;

    const Stmt& head(int id) const;
    int tail(int id) const;
    /// Sequence after the head's condition held (while/if only).
    int enter(int id) const;

    std::span<const ControlEdge> successors(int id) const { return succ_.at(id); }
    std::span<const ControlEdge> predecessors(int id) const { return pred_.at(id); }

    int find(const ControlSeq& s) const;
    std::string describe(int id) const;

private:
    int intern(ControlSeq s);

    const Program* prg_;
    std::vector<ControlSeq> seqs_;
    std::map<ControlSeq, int> index_;
    std::vector<int> initial_;
    std::vector<int> terminated_;
    std::vector<int> exit_points_;
    std::vector<int> tail_;
    std::vector<int> enter_;
    std::vector<std::vector<ControlEdge>> succ_;
    std::vector<std::vector<ControlEdge>> pred_;
};

inline ControlSet control_sequences(const Program& prg) { return ControlSet(prg); }

} // namespace phz
