// Assumptions and derivations of the Protagoras case study.
#pragma once

#include "jto/kernel.hpp"

#include <string>
#include <vector>

namespace jto {

// Agents p (Protagoras), e (Euathlus), j (judge).
AgentTable& corpus_agents();
Formula corpus_formula(const std::string& text);

// contract, court, contract', court', contract0, court0, PsueE, No-win-first,
// No-win-first', Past-looking, Second-case.
Formula assumption(const std::string& name);
const std::vector<std::string>& assumption_names();

// Main scripts, each with the helper scripts it cites.
ProofBundle protagoras_script();
ProofBundle euathlus_script();
ProofBundle protagoras_refined_script();
ProofBundle euathlus_refined_script();
ProofBundle no_win_first_script();
ProofBundle no_obligation_sofar_script();
ProofBundle permitted_to_sue_script();
ProofBundle second_verdict_script();
ProofBundle judge_first_script();
ProofBundle sdl_contradiction_script();

struct NamedBundle {
    std::string name;
    ProofBundle bundle;
};
std::vector<NamedBundle> corpus_scripts();

// Helper scripts used by the corpus, exposed for reuse.
// hyp true_m(C) ⊢ time=m → C
ProofBundle at_time_helper(std::uint32_t m, Formula body);
// hyp ⊡φ ⊢ φ
ProofBundle boxdot_body_helper(Formula body);

}  // namespace jto
