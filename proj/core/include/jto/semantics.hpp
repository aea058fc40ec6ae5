// Finitely presented interpreted systems over lasso runs.
//
// Two model kinds share states, agents, runs and an atom valuation:
// Fitting models (accessibility relations plus evidence tables) and
// neighborhood models (neighborhood tables plus formula valuations on the
// non-normal states outside the image of the runs).
#pragma once

#include "jto/kernel.hpp"
#include "jto/syntax.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace jto {

class PositionDependence : public Error {
public:
    PositionDependence(std::string state, Formula f, const std::string& text)
        : Error("PositionDependence", "truth of " + text + " differs across occurrences of state " + state),
          state(std::move(state)), formula(f) {}
    std::string state;
    Formula formula;
};

class HorizonExceeded : public Error {
public:
    explicit HorizonExceeded(const std::string& msg) : Error("HorizonExceeded", msg) {}
};

class UniverseTooSmall : public Error {
public:
    explicit UniverseTooSmall(const std::string& msg) : Error("UniverseTooSmall", msg) {}
};

using StateId = std::uint32_t;
// Bit k stands for state k; models hold at most 64 states.
using StateSet = std::uint64_t;
constexpr std::size_t kMaxStates = 64;

inline StateSet state_bit(StateId s) { return StateSet{1} << s; }
inline bool has_state(StateSet set, StateId s) { return (set >> s) & 1U; }

struct LassoRun {
    std::string name;
    std::vector<StateId> stem;
    std::vector<StateId> loop;

    StateId state_at(std::uint64_t n) const;
    std::uint64_t p() const { return stem.size(); }
    std::uint64_t q() const { return loop.size(); }
    // Positions p + q*(depth+1) cover every distinct truth value of a formula of that depth.
    std::uint64_t horizon(int depth) const { return p() + q() * std::uint64_t(depth + 1); }
    std::uint64_t horizon_cap(int depth) const { return p() + q() * std::uint64_t(depth + 2); }
};

// ---------------------------------------------------------------------------
// Pattern tables

enum class TermPatternKind { Exact, AnyVar, AnyConst, AnyTerm, AnyTermExcept };

struct TermPattern {
    TermPatternKind kind = TermPatternKind::AnyTerm;
    Term term = nullptr;
    std::vector<Term> except;

    bool matches(Term t) const;
    std::string text() const;
    static TermPattern parse(const std::string& text);
};

enum class FormulaPatternKind { Exact, Any, ObligatedFactivity };

struct FormulaPattern {
    FormulaPatternKind kind = FormulaPatternKind::Any;
    Formula formula = nullptr;   // desugared

    bool matches(Formula f) const;   // f desugared
    std::string text(const AgentTable* agents) const;
    static FormulaPattern parse(const std::string& text, AgentTable* agents);
};

struct EvidenceRule {
    std::optional<Agent> agent;   // none: every agent
    StateSet states = ~StateSet{0};
    TermPattern term;
    FormulaPattern formula;
    bool member = true;
};

struct EvidenceTable {
    std::vector<EvidenceRule> rules;
    bool contains(Agent i, StateId s, Term t, Formula f) const;
};

struct NeighborhoodRule {
    std::optional<Agent> agent;
    StateSet states = ~StateSet{0};
    TermPattern term;
    std::vector<StateSet> family;
};

struct NeighborhoodTable {
    std::vector<NeighborhoodRule> rules;
    // Family of the first matching rule; empty when none matches.
    const std::vector<StateSet>& family(Agent i, StateId s, Term t) const;
    bool contains(Agent i, StateId s, Term t, StateSet x) const;
};

// ---------------------------------------------------------------------------
// Models

enum class ModelKind { Fitting, Neighborhood };

struct ModelBase {
    std::string name;
    std::vector<std::string> states;
    AgentTable agents;
    std::vector<LassoRun> runs;
    std::vector<std::set<std::string>> atoms;   // per state; used on the image

    StateId state(const std::string& name) const;
    std::optional<StateId> find_state(const std::string& name) const;
    StateSet all_states() const;
    StateSet image() const;
    std::size_t run_index(const std::string& name) const;
};

struct FittingModel : ModelBase {
    std::vector<std::vector<StateSet>> R, RO;   // [agent][state] successors
    EvidenceTable evidence, nevidence;
};

struct NeighborhoodModel : ModelBase {
    NeighborhoodTable N, NO;
    std::vector<std::vector<FormulaPattern>> formulas;   // per state; used off the image
};

struct AnyModel {
    ModelKind kind = ModelKind::Neighborhood;
    FittingModel fitting;
    NeighborhoodModel neighborhood;

    const ModelBase& base() const;
};

// ---------------------------------------------------------------------------
// Model checking

// Per-formula summary over all occurrences of each state on the runs.
struct StateTruth {
    StateSet seen = 0, all_true = 0, any_true = 0;
};

class ModelChecker {
public:
    explicit ModelChecker(const ModelBase& m);
    virtual ~ModelChecker();

    // Truth at point (run, n); f is desugared on entry.
    bool holds(std::size_t run, std::uint64_t n, Formula f);
    // Truth at every point of every run.
    bool valid(Formula f);
    StateTruth occurrences(Formula f);

protected:
    virtual bool modal(Formula f, StateId s) = 0;
    const ModelBase& base_;

private:
    struct Trace;
    const Trace& trace(Formula f);
    bool value(const Trace& t, std::size_t run, std::uint64_t n) const;

    std::unordered_map<Formula, std::unique_ptr<Trace>> traces_;
    std::unordered_map<Formula, StateTruth> occ_;
    std::unordered_map<Formula, std::vector<signed char>> modal_cache_;
};

class FittingChecker : public ModelChecker {
public:
    explicit FittingChecker(const FittingModel& m) : ModelChecker(m), m_(m) {}
    // States of the image where f holds at every occurrence; PositionDependence on disagreement.
    StateSet state_truth(Formula f);

protected:
    bool modal(Formula f, StateId s) override;

private:
    const FittingModel& m_;
};

class NeighborhoodChecker : public ModelChecker {
public:
    explicit NeighborhoodChecker(const NeighborhoodModel& m) : ModelChecker(m), m_(m) {}
    StateSet truth_set(Formula f);

protected:
    bool modal(Formula f, StateId s) override;

private:
    const NeighborhoodModel& m_;
    std::unordered_map<Formula, StateSet> sets_;
};

bool mc_fitting(const FittingModel& m, std::size_t run, std::uint64_t n, Formula f);
bool mc_neighborhood(const NeighborhoodModel& m, std::size_t run, std::uint64_t n, Formula f);
bool mc(const AnyModel& m, std::size_t run, std::uint64_t n, Formula f);
StateSet truth_set(const NeighborhoodModel& m, Formula f);

// ---------------------------------------------------------------------------
// Validation

struct Universe {
    std::vector<Term> terms;
    FormulaSet formulas;     // desugared, closed under subformulas
    const ConstantSpecification* cs = nullptr;

    std::string describe() const;
};

// Subformula closure of the desugared inputs, and every subterm of their terms.
Universe make_universe(const std::vector<Formula>& fs, const std::vector<Term>& extra_terms = {});

ValidationReport validate_fitting(const FittingModel& m, const Universe& u);
ValidationReport validate_neighborhood(const NeighborhoodModel& m, const Universe& u);
ValidationReport validate(const AnyModel& m, const Universe& u);

// ---------------------------------------------------------------------------
// Fitting to neighborhood

enum class TransformMode {
    // Adds one non-normal witness state per universe formula so that distinct
    // formulas have distinct truth sets.
    Witnessed,
    // Only the image states; truth sets of equivalent formulas coincide.
    ImageOnly
};

NeighborhoodModel fitting_to_neighborhood(const FittingModel& m, const FormulaSet& universe,
                                          TransformMode mode = TransformMode::Witnessed);

// ---------------------------------------------------------------------------
// Text formats

// `.jtom` models.
AnyModel read_model(const std::string& text);
AnyModel read_model_path(const std::string& path);
std::string write_model(const AnyModel& m);

// `.jto` formula files: `agents`, `terms`, `at` lines and one formula per
// line, optionally named as `name: formula`.
struct FormulaFile {
    AgentTable agents;
    std::vector<std::pair<std::string, Formula>> formulas;
    std::vector<Term> terms;
    std::optional<std::uint32_t> at;

    std::vector<Formula> list() const;
};
FormulaFile read_formula_file(const std::string& text, const AgentTable* agents = nullptr);
FormulaFile read_formula_path(const std::string& path, const AgentTable* agents = nullptr);
std::string write_formula_file(const FormulaFile& f);

std::string state_set_text(const ModelBase& m, StateSet x);
std::string read_text_file(const std::string& path);

}  // namespace jto
