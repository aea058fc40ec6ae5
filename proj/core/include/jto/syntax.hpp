// Terms and formulas of JTO.
//
// Nodes are hash-consed: two structurally equal terms (or formulas) are the
// same pointer, so equality, hashing and map keys are pointer operations.
// Nodes live for the whole process and are never mutated.
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace jto {

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

class SyntaxError : public Error {
public:
    SyntaxError(int line, int column, std::vector<std::string> expected, const std::string& found);
    int line, column;
    std::vector<std::string> expected;
    std::string found;
};

class SortError : public Error {
public:
    explicit SortError(const std::string& msg) : Error("SortError", msg) {}
};

class BadInterval : public Error {
public:
    explicit BadInterval(const std::string& msg) : Error("BadInterval", msg) {}
};

// ---------------------------------------------------------------------------
// Agents

using Agent = std::uint32_t;

class AgentTable {
public:
    AgentTable() = default;
    explicit AgentTable(std::vector<std::string> names) : names_(std::move(names)) {}

    // Index of `name`; a purely numeric name that is not declared is read as an index.
    Agent resolve(const std::string& name) const;
    // Like resolve but declares unknown non-numeric names.
    Agent resolve_or_declare(const std::string& name);
    std::string name(Agent a) const;
    std::size_t size() const { return names_.size(); }
    bool empty() const { return names_.empty(); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// Terms

enum class TermKind : std::uint8_t { Const, Var, Bang, Sum, Prod, Dagger, Wild };

struct TermNode {
    TermKind kind;
    std::string name;
    const TermNode* l = nullptr;
    const TermNode* r = nullptr;
    std::size_t hash = 0;
    std::uint32_t id = 0;        // creation order
};
using Term = const TermNode*;

Term t_const(const std::string& name);
Term t_var(const std::string& name);
Term t_bang(Term t);
Term t_sum(Term a, Term b);
Term t_prod(Term a, Term b);
Term t_dagger(Term t);
Term t_wild();

enum class Sort : std::uint8_t { Either, Epistemic, Deontic, Invalid };
// Either: built only from Const/Var/Prod; Invalid: mixes ! or + with #.
Sort term_sort(Term t);
bool is_atomic_term(Term t);

// ---------------------------------------------------------------------------
// Formulas

enum class Op : std::uint8_t {
    // core
    Atom, Bot, Imp, Next, WPrev, Until, Since, JBox, OBox,
    // sugar
    Not, Top, And, Or, Iff, SPrev, Ev, Alw, Once, Sofar, Boxdot, WUntil, JDia, OPerm, Time
};

struct FNode {
    Op op;
    Agent agent = 0;
    std::uint32_t num = 0;       // Time: m
    std::string name;            // Atom
    Term term = nullptr;         // JBox/OBox/JDia/OPerm
    const FNode* a = nullptr;    // first child
    const FNode* b = nullptr;    // second child
    std::size_t hash = 0;
    std::uint32_t size = 1;      // node count
    std::uint32_t id = 0;        // creation order
};
using Formula = const FNode*;

// Orders by creation id, which is stable for a given sequence of constructions.
struct FormulaOrder {
    bool operator()(Formula a, Formula b) const { return a->id < b->id; }
};
using FormulaSet = std::set<Formula, FormulaOrder>;

Formula atom(const std::string& name);
Formula bot();
Formula top();
Formula imp(Formula a, Formula b);
Formula neg(Formula a);
Formula conj(Formula a, Formula b);
Formula disj(Formula a, Formula b);
Formula iff(Formula a, Formula b);
Formula next(Formula a);
Formula wprev(Formula a);
Formula sprev(Formula a);
Formula until(Formula a, Formula b);
Formula since(Formula a, Formula b);
Formula wuntil(Formula a, Formula b);
Formula eventually(Formula a);
Formula always(Formula a);
Formula once(Formula a);
Formula sofar(Formula a);
Formula boxdot(Formula a);
Formula jbox(Agent i, Term t, Formula a);
Formula obox(Agent i, Term t, Formula a);
Formula jdia(Agent i, Term t, Formula a);
Formula operm(Agent i, Term t, Formula a);
Formula time_literal(std::uint32_t m);
Formula true_at(std::uint32_t m, Formula f);

// Big conjunction / disjunction, left-nested; empty gives top / bot.
Formula conj_all(const std::vector<Formula>& fs);
Formula disj_all(const std::vector<Formula>& fs);

bool is_core_op(Op op);
bool is_core(Formula f);
bool is_binary(Op op);
bool is_modal(Op op);  // JBox, OBox, JDia, OPerm

Formula desugar(Formula f);

// Subformulas of a core formula, by the inductive clauses.
FormulaSet subf(Formula f);

struct FormulaClosure {
    Formula base = nullptr;
    FormulaSet members;
    FormulaSet positive_part;
    FormulaSet negations;
};
FormulaClosure subf_plus(Formula chi);

enum class IntervalKind {
    BoxNowOpen, BoxNowClosed, BoxSinceOpen, BoxSinceClosed,
    BoxClosedClosed, BoxClosedOpen, BoxOpenClosed, BoxOpenOpen, DiamondClosedClosed
};
// `n` is ignored for the four one-endpoint kinds.
Formula interval_operator(IntervalKind kind, std::uint32_t m, std::uint32_t n, Formula f);

Formula forgetful_projection(Formula f);

// Nesting depth of temporal operators (after desugaring).
int temporal_depth(Formula f);
int past_depth(Formula f);

// Replace atoms by formulas (used by schema instantiation).
Formula substitute(Formula f, const std::map<std::string, Formula>& sub);

// ---------------------------------------------------------------------------
// Text

Formula parse_formula(const std::string& text, AgentTable* agents = nullptr);
Term parse_term(const std::string& text);
std::string pretty(Formula f, const AgentTable* agents = nullptr);
std::string pretty(Term t);
std::string op_name(Op op);
// One-line rendering of the AST as nested constructor calls.
std::string ast_string(Formula f, const AgentTable* agents = nullptr);

}  // namespace jto
