// The Protagoras case study as runnable cases: assumptions, proof scripts,
// models with their validation universes, and expected verdicts.
#pragma once

#include "jto/corpus_proofs.hpp"
#include "jto/search.hpp"
#include "jto/semantics.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace jto {

class UnknownCase : public Error {
public:
    explicit UnknownCase(const std::string& name) : Error("UnknownCase", "no corpus case named " + name) {}
};

// Embedded `.jtom` and `.jto` assets, by file name.
const std::vector<std::pair<std::string, std::string>>& corpus_assets();
const std::string& corpus_asset(const std::string& file);

enum class CheckKind { Proof, Validate, ModelCheck, Search };
std::string check_kind_name(CheckKind k);

struct CaseModel {
    std::string name;     // e.g. I1
    std::string file;     // asset name of the model; the universe is <stem>.jto
    AnyModel model;
    FormulaFile universe;
};

struct Expectation {
    CheckKind kind = CheckKind::Proof;
    std::string target;
    std::string expected;          // ACCEPT, VALID, TRUE, FALSE, SAT, UNSAT

    std::string script;            // Proof
    std::string model;             // Validate, ModelCheck
    std::size_t run = 0;           // ModelCheck
    std::uint64_t position = 0;
    Formula formula = nullptr;
    std::vector<Formula> set;      // Search
    std::optional<std::uint32_t> at;
    SearchBounds bounds;
};

struct CorpusCase {
    std::string name;
    std::string summary;
    std::vector<std::pair<std::string, Formula>> assumptions;
    std::vector<NamedBundle> scripts;
    std::vector<CaseModel> models;
    std::vector<Expectation> expectations;
    std::vector<std::string> notes;   // informative, not checked

    const CaseModel& model(const std::string& name) const;
};

// Built once and cached.
const std::vector<CorpusCase>& load_corpus();
const CorpusCase& find_case(const std::string& name);

struct CheckResult {
    CheckKind kind;
    std::string target;
    std::string engine;
    std::string verdict;
    std::string expected;
    std::string detail;
    bool pass = false;
};

struct CaseReport {
    std::string name;
    std::vector<CheckResult> results;

    std::size_t passed() const;
    bool ok() const { return passed() == results.size(); }
    std::string text() const;
    // One `KIND\tTARGET\tVERDICT` line per result.
    std::string machine() const;
};

CaseReport run_case(const std::string& name);
CaseReport run_case(const CorpusCase& c);

// Writes every model, universe, proof script and case listing into `dir`;
// returns the written file names.
std::vector<std::string> export_corpus(const std::string& dir);

}  // namespace jto
