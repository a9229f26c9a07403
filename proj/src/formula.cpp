#include "sosltl/formula.hpp"

#include <cctype>
#include <map>
#include <stdexcept>

namespace sosltl::ltl {

PropositionTable::PropositionTable(std::vector<std::string> names)
{
    for (auto& n : names)
        add(n);
}

int PropositionTable::find(const std::string& name) const
{
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name)
            return static_cast<int>(i);
    return -1;
}

int PropositionTable::add(const std::string& name)
{
    if (const int i = find(name); i >= 0)
        return i;
    if (size() >= kMaxProps)
        throw std::length_error("too many atomic propositions");
    names_.push_back(name);
    return size() - 1;
}

namespace {

Formula node(Op op, Formula a = nullptr, Formula b = nullptr, int atom = -1)
{
    return std::make_shared<const Node>(Node{op, atom, std::move(a), std::move(b)});
}

} // namespace

Formula make_true() { return node(Op::True); }
Formula make_false() { return node(Op::False); }
Formula make_atom(int index) { return node(Op::Atom, nullptr, nullptr, index); }
Formula make_not(Formula a) { return node(Op::Not, std::move(a)); }
Formula make_and(Formula a, Formula b) { return node(Op::And, std::move(a), std::move(b)); }
Formula make_or(Formula a, Formula b) { return node(Op::Or, std::move(a), std::move(b)); }
Formula make_implies(Formula a, Formula b) { return node(Op::Implies, std::move(a), std::move(b)); }
Formula make_until(Formula a, Formula b) { return node(Op::Until, std::move(a), std::move(b)); }
Formula make_release(Formula a, Formula b) { return node(Op::Release, std::move(a), std::move(b)); }
Formula make_eventually(Formula a) { return node(Op::Eventually, std::move(a)); }
Formula make_always(Formula a) { return node(Op::Always, std::move(a)); }

// Parser ---------------------------------------------------------------------

namespace {

enum class Tok { End, LParen, RParen, Not, And, Or, Implies, Until, Release, Eventually, Always, Next, True, False, Ident };

struct Token {
    Tok kind;
    std::size_t pos;
    std::string text;
};

std::vector<Token> lex(const std::string& s)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (c == '(' || c == ')') {
            out.push_back({c == '(' ? Tok::LParen : Tok::RParen, start, {}});
            ++i;
        } else if (c == '!' || c == '~') {
            out.push_back({Tok::Not, start, {}});
            ++i;
        } else if (c == '&') {
            i += (i + 1 < s.size() && s[i + 1] == '&') ? 2 : 1;
            out.push_back({Tok::And, start, {}});
        } else if (c == '|') {
            i += (i + 1 < s.size() && s[i + 1] == '|') ? 2 : 1;
            out.push_back({Tok::Or, start, {}});
        } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
            out.push_back({Tok::Implies, start, {}});
            i += 2;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
                ++i;
            std::string w = s.substr(start, i - start);
            Tok k = Tok::Ident;
            if (w == "G")
                k = Tok::Always;
            else if (w == "F")
                k = Tok::Eventually;
            else if (w == "U")
                k = Tok::Until;
            else if (w == "R")
                k = Tok::Release;
            else if (w == "X")
                k = Tok::Next;
            else if (w == "true")
                k = Tok::True;
            else if (w == "false")
                k = Tok::False;
            out.push_back({k, start, std::move(w)});
        } else {
            throw FormulaParseError(std::string("unexpected character '") + c + "'", start);
        }
    }
    out.push_back({Tok::End, s.size(), {}});
    return out;
}

class Parser {
public:
    Parser(const std::string& text, PropositionTable& props, bool allow_new)
        : toks_(lex(text)), props_(props), allow_new_(allow_new)
    {
    }

    Formula parse()
    {
        Formula f = implies();
        if (peek().kind != Tok::End)
            throw FormulaParseError("unexpected token", peek().pos);
        return f;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    const Token& take() { return toks_[i_++]; }
    bool accept(Tok k)
    {
        if (peek().kind != k)
            return false;
        ++i_;
        return true;
    }

    Formula implies()
    {
        Formula lhs = disj();
        if (accept(Tok::Implies))
            return make_implies(lhs, implies());
        return lhs;
    }

    Formula disj()
    {
        Formula f = conj();
        while (accept(Tok::Or))
            f = make_or(f, conj());
        return f;
    }

    Formula conj()
    {
        Formula f = binary_temporal();
        while (accept(Tok::And))
            f = make_and(f, binary_temporal());
        return f;
    }

    Formula binary_temporal()
    {
        Formula lhs = unary();
        if (accept(Tok::Until))
            return make_until(lhs, binary_temporal());
        if (accept(Tok::Release))
            return make_release(lhs, binary_temporal());
        return lhs;
    }

    Formula unary()
    {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::Not:
            take();
            return make_not(unary());
        case Tok::Eventually:
            take();
            return make_eventually(unary());
        case Tok::Always:
            take();
            return make_always(unary());
        case Tok::Next:
            throw FormulaParseError("next operator not permitted", t.pos);
        default:
            return primary();
        }
    }

    Formula primary()
    {
        const Token& t = take();
        switch (t.kind) {
        case Tok::True:
            return make_true();
        case Tok::False:
            return make_false();
        case Tok::Ident: {
            int idx = props_.find(t.text);
            if (idx < 0) {
                if (!allow_new_)
                    throw FormulaParseError("undeclared atom '" + t.text + "'", t.pos);
                idx = props_.add(t.text);
            }
            return make_atom(idx);
        }
        case Tok::LParen: {
            Formula f = implies();
            if (!accept(Tok::RParen))
                throw FormulaParseError("expected ')'", peek().pos);
            return f;
        }
        case Tok::End:
            throw FormulaParseError("unexpected end of formula", t.pos);
        default:
            throw FormulaParseError("expected a proposition, constant or '('", t.pos);
        }
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    PropositionTable& props_;
    bool allow_new_;
};

bool is_binary(Op op)
{
    return op == Op::And || op == Op::Or || op == Op::Implies || op == Op::Until || op == Op::Release;
}

std::string str(const Formula& f, const PropositionTable& props)
{
    auto wrapped = [&](const Formula& g) {
        const std::string s = str(g, props);
        return is_binary(g->op) ? "(" + s + ")" : s;
    };
    switch (f->op) {
    case Op::True:
        return "true";
    case Op::False:
        return "false";
    case Op::Atom:
        return f->atom < props.size() ? props.name(f->atom) : "p" + std::to_string(f->atom);
    case Op::Not:
        return "!" + wrapped(f->lhs);
    case Op::Eventually:
        return "F " + wrapped(f->lhs);
    case Op::Always:
        return "G " + wrapped(f->lhs);
    case Op::And:
        return wrapped(f->lhs) + " & " + wrapped(f->rhs);
    case Op::Or:
        return wrapped(f->lhs) + " | " + wrapped(f->rhs);
    case Op::Implies:
        return wrapped(f->lhs) + " -> " + wrapped(f->rhs);
    case Op::Until:
        return wrapped(f->lhs) + " U " + wrapped(f->rhs);
    case Op::Release:
        return wrapped(f->lhs) + " R " + wrapped(f->rhs);
    }
    return {};
}

Formula nnf_impl(const Formula& f, bool neg)
{
    switch (f->op) {
    case Op::True:
        return neg ? make_false() : f;
    case Op::False:
        return neg ? make_true() : f;
    case Op::Atom:
        return neg ? make_not(f) : f;
    case Op::Not:
        return nnf_impl(f->lhs, !neg);
    case Op::And:
        return neg ? make_or(nnf_impl(f->lhs, true), nnf_impl(f->rhs, true))
                   : make_and(nnf_impl(f->lhs, false), nnf_impl(f->rhs, false));
    case Op::Or:
        return neg ? make_and(nnf_impl(f->lhs, true), nnf_impl(f->rhs, true))
                   : make_or(nnf_impl(f->lhs, false), nnf_impl(f->rhs, false));
    case Op::Implies:
        return neg ? make_and(nnf_impl(f->lhs, false), nnf_impl(f->rhs, true))
                   : make_or(nnf_impl(f->lhs, true), nnf_impl(f->rhs, false));
    case Op::Until:
        return neg ? make_release(nnf_impl(f->lhs, true), nnf_impl(f->rhs, true))
                   : make_until(nnf_impl(f->lhs, false), nnf_impl(f->rhs, false));
    case Op::Release:
        return neg ? make_until(nnf_impl(f->lhs, true), nnf_impl(f->rhs, true))
                   : make_release(nnf_impl(f->lhs, false), nnf_impl(f->rhs, false));
    case Op::Eventually:
        return neg ? make_always(nnf_impl(f->lhs, true)) : make_eventually(nnf_impl(f->lhs, false));
    case Op::Always:
        return neg ? make_eventually(nnf_impl(f->lhs, true)) : make_always(nnf_impl(f->lhs, false));
    }
    return f;
}

} // namespace

Formula parse(const std::string& text, PropositionTable& props, bool allow_new_atoms)
{
    return Parser(text, props, allow_new_atoms).parse();
}

std::string to_string(const Formula& f, const PropositionTable& props)
{
    return str(f, props);
}

Formula negate(const Formula& f)
{
    return nnf_impl(f, true);
}

Formula nnf(const Formula& f)
{
    return nnf_impl(f, false);
}

Formula to_core(const Formula& f)
{
    switch (f->op) {
    case Op::True:
    case Op::Atom:
        return f;
    case Op::False:
        return make_not(make_true());
    case Op::Not:
        return make_not(to_core(f->lhs));
    case Op::Or:
        return make_or(to_core(f->lhs), to_core(f->rhs));
    case Op::And:
        return make_not(make_or(make_not(to_core(f->lhs)), make_not(to_core(f->rhs))));
    case Op::Implies:
        return make_or(make_not(to_core(f->lhs)), to_core(f->rhs));
    case Op::Until:
        return make_until(to_core(f->lhs), to_core(f->rhs));
    case Op::Release:
        return make_not(make_until(make_not(to_core(f->lhs)), make_not(to_core(f->rhs))));
    case Op::Eventually:
        return make_until(make_true(), to_core(f->lhs));
    case Op::Always:
        return make_not(make_until(make_true(), make_not(to_core(f->lhs))));
    }
    return f;
}

Letter atoms_of(const Formula& f)
{
    if (!f)
        return 0;
    if (f->op == Op::Atom)
        return Letter{1} << f->atom;
    return atoms_of(f->lhs) | atoms_of(f->rhs);
}

int operator_count(const Formula& f)
{
    if (!f || f->op == Op::True || f->op == Op::False || f->op == Op::Atom)
        return 0;
    return 1 + operator_count(f->lhs) + operator_count(f->rhs);
}

bool structurally_equal(const Formula& a, const Formula& b)
{
    if (!a || !b)
        return !a && !b;
    return a->op == b->op && a->atom == b->atom && structurally_equal(a->lhs, b->lhs)
           && structurally_equal(a->rhs, b->rhs);
}

// Semantics ------------------------------------------------------------------

LassoWord::LassoWord(std::vector<Letter> p, std::vector<Letter> c) : prefix(std::move(p)), cycle(std::move(c))
{
    if (cycle.empty())
        throw std::invalid_argument("lasso cycle must be nonempty");
}

std::size_t LassoWord::successor(std::size_t i) const
{
    return i + 1 < positions() ? i + 1 : prefix.size();
}

Letter LassoWord::at(std::size_t i) const
{
    return i < prefix.size() ? prefix[i] : cycle[(i - prefix.size()) % cycle.size()];
}

namespace {

using Truth = std::vector<char>;

Truth eval_positions(const Formula& f, const LassoWord& w)
{
    const std::size_t n = w.positions();
    Truth v(n, 0);
    switch (f->op) {
    case Op::True:
        v.assign(n, 1);
        break;
    case Op::False:
        break;
    case Op::Atom:
        for (std::size_t i = 0; i < n; ++i)
            v[i] = (w.at(i) >> f->atom) & 1u;
        break;
    case Op::Not: {
        const Truth a = eval_positions(f->lhs, w);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = !a[i];
        break;
    }
    case Op::And:
    case Op::Or:
    case Op::Implies: {
        const Truth a = eval_positions(f->lhs, w);
        const Truth b = eval_positions(f->rhs, w);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = f->op == Op::And ? (a[i] && b[i]) : f->op == Op::Or ? (a[i] || b[i]) : (!a[i] || b[i]);
        break;
    }
    case Op::Until:
    case Op::Release:
    case Op::Eventually:
    case Op::Always: {
        const bool until_like = f->op == Op::Until || f->op == Op::Eventually;
        const bool unary = f->op == Op::Eventually || f->op == Op::Always;
        const Truth a = unary ? Truth(n, until_like ? 1 : 0) : eval_positions(f->lhs, w);
        const Truth b = eval_positions(unary ? f->lhs : f->rhs, w);
        // Least fixpoint for U, greatest for R, swept backwards until stable.
        v.assign(n, until_like ? 0 : 1);
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t k = n; k-- > 0;) {
                const char next = v[w.successor(k)];
                const char val = until_like ? (b[k] || (a[k] && next)) : (b[k] && (a[k] || next));
                if (val != v[k]) {
                    v[k] = val;
                    changed = true;
                }
            }
        }
        break;
    }
    }
    return v;
}

struct Unroller {
    const LassoWord& w;
    std::map<std::pair<const Node*, std::size_t>, bool> memo;

    std::size_t norm(std::size_t i) const
    {
        const std::size_t p = w.prefix.size(), c = w.cycle.size();
        return i < p ? i : p + (i - p) % c;
    }

    bool eval(const Formula& f, std::size_t i)
    {
        i = norm(i);
        const auto key = std::make_pair(f.get(), i);
        if (auto it = memo.find(key); it != memo.end())
            return it->second;
        bool r = false;
        // Subformula truth is periodic from the loop start on, so one full
        // cycle past max(i, |prefix|) covers every distinct suffix.
        const std::size_t horizon = std::max(i, w.prefix.size()) + w.cycle.size();
        switch (f->op) {
        case Op::True:
            r = true;
            break;
        case Op::False:
            r = false;
            break;
        case Op::Atom:
            r = (w.at(i) >> f->atom) & 1u;
            break;
        case Op::Not:
            r = !eval(f->lhs, i);
            break;
        case Op::And:
            r = eval(f->lhs, i) && eval(f->rhs, i);
            break;
        case Op::Or:
            r = eval(f->lhs, i) || eval(f->rhs, i);
            break;
        case Op::Implies:
            r = !eval(f->lhs, i) || eval(f->rhs, i);
            break;
        case Op::Until:
            for (std::size_t j = i; j < horizon && !r; ++j) {
                if (eval(f->rhs, j))
                    r = true;
                else if (!eval(f->lhs, j))
                    break;
            }
            break;
        case Op::Eventually:
            for (std::size_t j = i; j < horizon && !r; ++j)
                r = eval(f->lhs, j);
            break;
        case Op::Release: {
            // a R b == !(!a U !b)
            bool until = false;
            for (std::size_t j = i; j < horizon && !until; ++j) {
                if (!eval(f->rhs, j))
                    until = true;
                else if (eval(f->lhs, j))
                    break;
            }
            r = !until;
            break;
        }
        case Op::Always:
            r = true;
            for (std::size_t j = i; j < horizon && r; ++j)
                r = eval(f->lhs, j);
            break;
        }
        memo[key] = r;
        return r;
    }
};

} // namespace

bool eval_lasso(const Formula& f, const LassoWord& w)
{
    if (w.cycle.empty())
        throw std::invalid_argument("lasso cycle must be nonempty");
    return eval_positions(f, w)[0] != 0;
}

bool eval_unrolled(const Formula& f, const LassoWord& w)
{
    if (w.cycle.empty())
        throw std::invalid_argument("lasso cycle must be nonempty");
    Unroller u{w, {}};
    return u.eval(f, 0);
}

} // namespace sosltl::ltl
