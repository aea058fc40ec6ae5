// Hilbert-style proof checking for JTO_CS.
//
// A proof script is a numbered list of lines.  Every line carries the set of
// hypotheses it depends on, a formula and a justification.  The checker
// recomputes the hypothesis set each justification licenses and requires it
// to be contained in the declared set.  All formula comparisons are made on
// desugared (core) forms.
#pragma once

#include "jto/syntax.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace jto {

class TooManyAtoms : public Error {
public:
    explicit TooManyAtoms(const std::string& msg) : Error("TooManyAtoms", msg) {}
};

class OutOfRange : public Error {
public:
    explicit OutOfRange(const std::string& msg) : Error("OutOfRange", msg) {}
};

// ---------------------------------------------------------------------------
// Axioms

const std::vector<std::string>& axiom_names();
bool is_axiom_name(const std::string& name);

// Every schema f instantiates; "Taut" is decided by taut_check.
std::vector<std::string> match_axiom(Formula f);
bool is_instance_of(const std::string& name, Formula f);

// The instance of schema `name` at phi, psi, terms t, s and agent i (desugared).
// "Taut" yields ((phi -> psi) -> phi) -> phi.
Formula axiom_instance(const std::string& name, Formula phi, Formula psi, Term t, Term s, Agent i);

// Propositional tautology test on the boolean abstraction of f.
bool taut_check(Formula f);
// Number of distinct abstracted atoms of f.
int taut_atom_count(Formula f);
constexpr int kTautAtomCap = 20;

// ---------------------------------------------------------------------------
// Constant specifications

struct ConstantSpecification {
    std::string name;
    std::vector<Formula> entries;

    bool contains(Formula f) const;
    std::vector<Formula> epistemic_part() const;
    std::vector<Formula> deontic_part() const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport check_cs(const ConstantSpecification& cs, const AgentTable* agents = nullptr);

// ---------------------------------------------------------------------------
// Proof scripts

enum class JKind {
    Hyp, Axiom, IaxNec, Taut, MP, NecX, NecYw, NecG, NecH, BoxdotLift, WPrevRM, OnceRM, Weaken, Lemma, Deduction
};

struct Justification {
    JKind kind = JKind::Hyp;
    std::vector<int> refs;             // cited line numbers (Deduction: line, then pool index)
    std::string name;                  // Axiom: schema name; Lemma: script name
    std::vector<std::string> lemmas;   // Taut: cited script names
};

struct ProofLine {
    int index = 0;
    std::vector<int> hyps;   // 1-based indices into ProofScript::pool
    Formula formula = nullptr;
    Justification just;
    std::string note;
};

struct ProofScript {
    std::string name;
    std::string cs_ref;
    std::vector<Formula> pool;   // hypothesis pool, referenced 1-based
    std::vector<int> goal_hyps;
    Formula goal = nullptr;
    std::vector<ProofLine> lines;

    FormulaSet goal_hypotheses() const;
};

// A script together with the scripts it cites, in dependency order; the
// cited scripts come first and the last entry is the main script.
struct ProofBundle {
    std::vector<ProofScript> parts;
    const ProofScript& main() const { return parts.back(); }
    ProofScript& main() { return parts.back(); }
};

struct Goal {
    FormulaSet hyps;   // desugared
    Formula formula;   // desugared
};

class Registry {
public:
    void add(const std::string& name, Goal g) { goals_[name] = std::move(g); }
    const Goal* find(const std::string& name) const;
    bool contains(const std::string& name) const { return goals_.count(name) != 0; }
    std::size_t size() const { return goals_.size(); }

private:
    std::map<std::string, Goal> goals_;
};

struct LineDiagnostic {
    int line = 0;
    std::string kind;   // UnknownJustification, SideConditionFailed, HypothesisLeak, GoalMismatch, Malformed
    std::string detail;
};

struct CheckReport {
    std::string script;
    bool accepted = false;
    std::vector<LineDiagnostic> diagnostics;
    std::string summary() const;
};

// Checks one script against the registry of previously accepted scripts; on
// acceptance the script's goal is added to the registry.
CheckReport check_proof(const ProofScript& s, const ConstantSpecification& cs, Registry& registry);
CheckReport check_proof(const ProofScript& s, const ConstantSpecification& cs);

// Checks every part in order with a shared registry.  The report of the first
// rejected part is returned, or the main script's report.
CheckReport check_bundle(const ProofBundle& b, const ConstantSpecification& cs, Registry& registry);
CheckReport check_bundle(const ProofBundle& b, const ConstantSpecification& cs);

// From a script proving {h} ∪ T ⊢ φ, where h is pool entry `pool_index`,
// builds a script proving T ⊢ h → φ.
ProofScript deduction_transform(const ProofScript& s, int pool_index, const Registry& registry);

// ---------------------------------------------------------------------------
// Building scripts

class ScriptBuilder {
public:
    explicit ScriptBuilder(std::string name);

    int hyp(Formula f);
    int axiom(const std::string& schema, Formula f);
    int iax(Formula f);
    int taut(Formula f, std::vector<int> from = {}, std::vector<std::string> lemmas = {});
    // Line j must read (line i) → f; the result formula is read off line j.
    int mp(int i, int j);
    int nec(Op op, int i);   // op ∈ {Next, WPrev, Alw, Sofar}
    int boxdot_lift(int i);
    int wprev_rm(int i);
    int once_rm(int i);
    int weaken(int i, const std::vector<Formula>& extra);
    int lemma(const std::string& name);
    int deduction(int i, Formula h);

    // Makes `dep` (and everything it cites) available; returns the main name.
    std::string cite(const ProofBundle& dep);

    void note(int line, std::string text);
    Formula formula(int line) const;
    int last() const { return int(script_.lines.size()); }

    // Goal defaults to the last line with its hypotheses.
    ProofBundle finish();
    ProofBundle finish(const std::vector<Formula>& goal_hyps, Formula goal);

private:
    ProofScript script_;
    std::vector<ProofScript> deps_;
    std::map<std::string, Goal> dep_goals_;
    std::vector<FormulaSet> line_hyps_;

    int pool_index(Formula f);
    int push(Formula f, Justification j, const FormulaSet& hyps);
    const FormulaSet& hyps_of(int line) const;
};

// ---------------------------------------------------------------------------
// Derived rules used by the bundled scripts.  Each takes a line number that
// holds a theorem (empty hypotheses) and returns the line of the conclusion.

// ⊢ a → c   gives   ⊢ op a → op c, for op ∈ {Next, WPrev, Alw, Sofar}
int k_lift(ScriptBuilder& b, Op op, int line);
// ⊢ a → (c → d)   gives   ⊢ op a → (op c → op d)
int k_lift2(ScriptBuilder& b, Op op, int line);
// ⊢ a → c   gives   ⊢ ⊡a → ⊡c
int boxdot_rm(ScriptBuilder& b, int line);
// ⊢ a → (c → d)   gives   ⊢ ⊡a → (⊡c → ⊡d)
int boxdot_rm2(ScriptBuilder& b, int line);

// The seven basic LTL facts; psi is used by item 7 only.
ProofBundle derive_lemma2(int item, Formula phi, Formula psi = nullptr);
Formula lemma2_statement(int item, Formula phi, Formula psi = nullptr);

// Temporal truth predicate facts.  Item 9 needs `premise`, a bundle proving
// ⊢ phi → psi; item 8 is a derivation from the hypothesis true_m(phi).
ProofBundle check_ttp_lemma(int item, std::uint32_t m, Formula phi, const ProofBundle* premise = nullptr);
Formula ttp_statement(int item, std::uint32_t m, Formula phi, Formula psi = nullptr);

// O[t]φ → P[t]φ and ¬(O[t]φ ∧ O[t]¬φ) derived from each other.
ProofBundle no_conflicts_forward(Agent i, Term t, Formula phi);
ProofBundle no_conflicts_backward(Agent i, Term t, Formula phi);

// Deterministic short tag for naming generated helper scripts.
std::string formula_tag(Formula f);

// ---------------------------------------------------------------------------
// .jtopf files

struct ProofFile {
    AgentTable agents;
    std::vector<ProofScript> scripts;   // in file order
};

ProofFile read_proof_file(const std::string& text);
ProofFile read_proof_path(const std::string& path);
std::string write_proof_file(const std::vector<ProofScript>& scripts, const AgentTable* agents);
std::string justification_text(const Justification& j);

ConstantSpecification read_cs_file(const std::string& text, AgentTable* agents);

}  // namespace jto
