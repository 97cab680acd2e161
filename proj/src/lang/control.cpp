#include "phz/lang.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <sstream>

namespace phz {

ControlSet::ControlSet(const Program& prg) : prg_(&prg)
{
    std::deque<int> todo;
    auto add = [&](ControlSeq s) {
        int before = size();
        int id = intern(std::move(s));
        if (id == before)
            todo.push_back(id);
        return id;
    };
    for (std::size_t t = 0; t < prg.tasks.size(); ++t) {
        int owner = static_cast<int>(t);
        initial_.push_back(add({owner, prg.tasks[t].body}));
        terminated_.push_back(add({owner, {}}));
    }
    while (!todo.empty()) {
        int id = todo.front();
        todo.pop_front();
        // copy: interning may reallocate seqs_
        ControlSeq s = seqs_[id];
        if (s.terminated()) {
            exit_points_.push_back(id);
            continue;
        }
        const Stmt& h = *s.items.front();
        ControlSeq rest{s.owner, std::vector<const Stmt*>(s.items.begin() + 1, s.items.end())};
        int tl = add(rest);
        tail_[id] = tl;
        switch (h.kind) {
        case Stmt::Kind::Exit:
            exit_points_.push_back(id);
            break;
        case Stmt::Kind::While: {
            ControlSeq in{s.owner, h.body};
            in.items.insert(in.items.end(), s.items.begin(), s.items.end());
            int en = add(std::move(in));
            enter_[id] = en;
            succ_[id].push_back({id, en, Move::CondTrue});
            succ_[id].push_back({id, tl, Move::CondFalse});
            break;
        }
        case Stmt::Kind::If: {
            ControlSeq in{s.owner, h.body};
            in.items.insert(in.items.end(), rest.items.begin(), rest.items.end());
            int en = add(std::move(in));
            enter_[id] = en;
            succ_[id].push_back({id, en, Move::CondTrue});
            succ_[id].push_back({id, tl, Move::CondFalse});
            break;
        }
        default:
            succ_[id].push_back({id, tl, Move::Atomic});
            break;
        }
    }
    std::sort(exit_points_.begin(), exit_points_.end());
    for (int id = 0; id < size(); ++id)
        for (const ControlEdge& e : succ_[id])
            pred_[e.to].push_back(e);
}

int ControlSet::intern(ControlSeq s)
{
    auto it = index_.find(s);
    if (it != index_.end())
        return it->second;
    int id = size();
    index_.emplace(s, id);
    seqs_.push_back(std::move(s));
    tail_.push_back(-1);
    enter_.push_back(-1);
    succ_.emplace_back();
    pred_.emplace_back();
    return id;
}

bool ControlSet::is_exit_point(int id) const
{
    return std::binary_search(exit_points_.begin(), exit_points_.end(), id);
}

const Stmt& ControlSet::head(int id) const
{
    const ControlSeq& s = seq(id);
    assert(!s.terminated());
    return *s.items.front();
}

int ControlSet::tail(int id) const
{
    assert(!seq(id).terminated());
    return tail_.at(id);
}

int ControlSet::enter(int id) const
{
    assert(enter_.at(id) >= 0);
    return enter_.at(id);
}

int ControlSet::find(const ControlSeq& s) const
{
    auto it = index_.find(s);
    return it == index_.end() ? -1 : it->second;
}

std::string ControlSet::describe(int id) const
{
    const ControlSeq& s = seq(id);
    std::ostringstream os;
    os << prg_->tasks.at(s.owner).name << "@";
    if (s.terminated())
        return os.str() + "<end>";
    for (std::size_t i = 0; i < s.items.size(); ++i) {
        if (i)
            os << "; ";
        os << print_head(*prg_, s.owner, *s.items[i]);
        if (i == 0 && s.items[i]->line > 0)
            os << " [line " << s.items[i]->line << "]";
        if (i == 2 && s.items.size() > 3) {
            os << "; ...";
            break;
        }
    }
    return os.str();
}

} // namespace phz
