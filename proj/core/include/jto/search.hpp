// Bounded satisfiability over lasso words with modal-atom abstraction.
//
// Every maximal justification assertion becomes an opaque atom, constrained
// by axiom instances built from the assertions that occur. The abstracted
// set is searched over lassos whose Hintikka labels are periodic, which
// makes UNSAT answers sound for the stated bounds.
#pragma once

#include "jto/syntax.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace jto {

class BoundsTooLarge : public Error {
public:
    explicit BoundsTooLarge(const std::string& msg) : Error("BoundsTooLarge", msg) {}
};

class NotUnsat : public Error {
public:
    explicit NotUnsat(const std::string& msg) : Error("NotUnsat", msg) {}
};

struct Abstraction {
    std::vector<std::pair<Formula, Formula>> atom_map;   // assertion, atom
    std::vector<Formula> inputs;                         // desugared originals
    std::vector<Formula> abstracted;                     // same order as inputs
    std::vector<Formula> side_constraints;
    std::vector<std::string> constraint_kinds;           // parallel to side_constraints

    std::optional<Formula> atom_of(Formula assertion) const;
    std::optional<Formula> assertion_of(Formula atom) const;
    // Replaces abstraction atoms by their assertions.
    Formula concretize(Formula f) const;
};

Abstraction abstract(const std::vector<Formula>& fs);

struct SearchBounds {
    std::uint32_t max_stem = 12;
    std::uint32_t max_loop = 2;
    // Upper limit on generated labels before giving up.
    std::uint64_t budget = 50'000'000;
};

struct Verdict {
    bool sat = false;
    SearchBounds bounds;
    std::uint32_t position = 0;                        // where the set holds
    std::vector<std::vector<std::string>> stem, loop;  // true atoms per position
    std::vector<std::pair<std::string, std::string>> labels;   // atom, assertion
    std::uint64_t explored = 0;

    std::string text() const;
};

// Searches for a lasso where all of `fs` hold together at position
// `at` (when given, together with time=at) or at some position.
Verdict bounded_sat(const std::vector<Formula>& fs, std::optional<std::uint32_t> at, const SearchBounds& b,
                    const AgentTable* agents = nullptr);

struct UnsatReport {
    std::uint32_t position = 0;
    std::string atom;
    std::vector<std::string> forcing_true, forcing_false;   // requirement subsets
    std::string text() const;
};

UnsatReport explain_unsat(const std::vector<Formula>& fs, std::optional<std::uint32_t> at, const SearchBounds& b,
                          const AgentTable* agents = nullptr);

}  // namespace jto
