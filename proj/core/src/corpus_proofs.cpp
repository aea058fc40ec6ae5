#include "jto/corpus_proofs.hpp"

#include <map>
#include <mutex>

namespace jto {

AgentTable& corpus_agents() {
    static AgentTable table(std::vector<std::string>{"p", "e", "j"});
    return table;
}

Formula corpus_formula(const std::string& text) { return parse_formula(text, &corpus_agents()); }

namespace {

Formula F(const std::string& text) { return corpus_formula(text); }

Formula T(std::uint32_t m) { return time_literal(m); }

const std::map<std::string, Formula>& assumptions() {
    static const std::map<std::string, Formula> all = [] {
        std::map<std::string, Formula> a;
        a["contract"] = F("A(winfirst_e <-> O[a]_e pay)");
        a["court"] = true_at(10, F("(~win_p <-> winfirst_e) /\\ (win_p -> O[verdict_p]_e pay) /\\ "
                                   "(~win_p -> ~O[verdict_e]_e pay)"));
        a["contract'"] = F("A((X ~O[a]_e pay W winfirst_e) /\\ (winfirst_e -> (X O[a]_e pay W pay)))");
        a["court'"] = true_at(10, F("(~win_p <-> winfirst_e) /\\ (win_p -> (X O[verdict_p]_e pay W pay)) /\\ "
                                    "(~win_p -> G ~O[verdict_e]_e pay)"));
        a["contract0"] = forgetful_projection(a["contract"]);
        a["court0"] = forgetful_projection(a["court"]);
        a["PsueE"] = F("A(P[a]_p sue_p <-> (Ys (~pay S winfirst_e) /\\ ~pay))");
        a["No-win-first"] = true_at(5, F("H ~winfirst_e"));
        a["No-win-first'"] = true_at(10, F("H Yw ~winfirst_e"));
        a["Past-looking"] = true_at(10, F("H Yw ~winfirst_e -> ~win_p"));
        a["Second-case"] = true_at(15, F("Ys (~pay S Yw winfirst_e) /\\ ~pay -> winsecond_p"));
        return a;
    }();
    return all;
}

// Body of a ⊡-formula as written (⊡ is the outermost constructor).
Formula body_of(Formula boxed) { return boxed->a; }
// C of true_m(C) = ⊡(time=m → C).
Formula truth_body(Formula t) { return t->a->b; }

std::mutex cache_mutex;
std::map<std::string, ProofBundle>& cache() {
    static std::map<std::string, ProofBundle> c;
    return c;
}

template <class Fn>
ProofBundle cached(const std::string& key, Fn build) {
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache().find(key);
        if (it != cache().end()) return it->second;
    }
    ProofBundle b = build();
    std::lock_guard<std::mutex> lock(cache_mutex);
    cache().emplace(key, b);
    return b;
}

ProofBundle lemma2(int item, Formula phi, Formula psi = nullptr) {
    Formula s = lemma2_statement(item, phi, psi);
    return cached("L2." + std::to_string(item) + formula_tag(s), [&] { return derive_lemma2(item, phi, psi); });
}

ProofBundle ttp(int item, std::uint32_t m, Formula phi, const ProofBundle* premise = nullptr) {
    std::string key = "TTP" + std::to_string(item) + "-" + std::to_string(m) + "-" + formula_tag(phi) +
                      (premise ? "-" + premise->main().name : "");
    return cached(key, [&] { return check_ttp_lemma(item, m, phi, premise); });
}

// ⊢ true_m(a) → (true_m(b) → true_m(a ∧ b))
ProofBundle true_conj(std::uint32_t m, Formula a, Formula b) {
    Formula goal = imp(true_at(m, a), imp(true_at(m, b), true_at(m, conj(a, b))));
    return cached("true-conj-" + formula_tag(goal), [&] {
        ScriptBuilder s("true-conj-" + formula_tag(goal));
        int t = s.taut(imp(imp(T(m), a), imp(imp(T(m), b), imp(T(m), conj(a, b)))));
        boxdot_rm2(s, t);
        return s.finish({}, goal);
    });
}

// ⊢ true_m(a → b) → (true_m(a) → true_m(b))
ProofBundle true_mp(std::uint32_t m, Formula a, Formula b) {
    Formula goal = imp(true_at(m, imp(a, b)), imp(true_at(m, a), true_at(m, b)));
    return cached("true-mp-" + formula_tag(goal), [&] {
        ScriptBuilder s("true-mp-" + formula_tag(goal));
        int t = s.taut(imp(imp(T(m), imp(a, b)), imp(imp(T(m), a), imp(T(m), b))));
        boxdot_rm2(s, t);
        return s.finish({}, goal);
    });
}

// ⊢ a → b by a single propositional step from the cited schema instances.
ProofBundle simple_theorem(const std::string& prefix, Formula goal, const std::vector<std::pair<std::string, Formula>>& axioms) {
    return cached(prefix + formula_tag(goal), [&] {
        ScriptBuilder s(prefix + formula_tag(goal));
        std::vector<int> lines;
        for (auto& [name, f] : axioms) lines.push_back(s.axiom(name, f));
        s.taut(goal, lines);
        return s.finish({}, goal);
    });
}

// ⊢ ⊟φ → ◯w⊟φ  and  ⊢ ⊟φ → φ
ProofBundle sofar_step(Formula phi) {
    Formula goal = imp(sofar(phi), wprev(sofar(phi)));
    return cached("sofar-step-" + formula_tag(goal), [&] {
        ScriptBuilder s("sofar-step-" + formula_tag(goal));
        s.taut(goal, {}, {s.cite(lemma2(3, phi))});
        return s.finish({}, goal);
    });
}

ProofBundle sofar_now(Formula phi) {
    Formula goal = imp(sofar(phi), phi);
    return cached("sofar-now-" + formula_tag(goal), [&] {
        ScriptBuilder s("sofar-now-" + formula_tag(goal));
        s.taut(goal, {}, {s.cite(lemma2(3, phi))});
        return s.finish({}, goal);
    });
}

// hyp true_from(⊟φ) ⊢ true_k(φ)
ProofBundle sofar_down(std::uint32_t from, std::uint32_t k, Formula phi) {
    Formula h = true_at(from, sofar(phi));
    Formula goal = true_at(k, phi);
    std::string name = "sofar-down-" + formula_tag(imp(h, goal));
    return cached(name, [&] {
        ScriptBuilder s(name);
        int cur = s.hyp(h);
        ProofBundle step = sofar_step(phi);
        for (std::uint32_t j = from; j > k; --j) {
            std::string a = s.cite(ttp(9, j, sofar(phi), &step));
            std::string b = s.cite(ttp(4, j - 1, sofar(phi)));
            cur = s.taut(true_at(j - 1, sofar(phi)), {cur}, {a, b});
        }
        ProofBundle now = sofar_now(phi);
        std::string c = s.cite(ttp(9, k, sofar(phi), &now));
        s.taut(goal, {cur}, {c});
        return s.finish({h}, goal);
    });
}

}  // namespace

Formula assumption(const std::string& name) {
    auto it = assumptions().find(name);
    if (it == assumptions().end()) throw Error("UnknownAssumption", name);
    return it->second;
}

const std::vector<std::string>& assumption_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (auto& [k, v] : assumptions()) n.push_back(k);
        return n;
    }();
    return names;
}

ProofBundle at_time_helper(std::uint32_t m, Formula body) {
    Formula h = true_at(m, body);
    std::string name = "at" + std::to_string(m) + "-" + formula_tag(h);
    return cached(name, [&] {
        ScriptBuilder s(name);
        std::string l = s.cite(ttp(1, m, body));
        int a = s.hyp(h);
        s.taut(imp(T(m), body), {a}, {l});
        return s.finish({h}, imp(T(m), body));
    });
}

ProofBundle boxdot_body_helper(Formula body) {
    Formula h = boxdot(body);
    std::string name = "body-" + formula_tag(h);
    return cached(name, [&] {
        ScriptBuilder s(name);
        std::string l = s.cite(lemma2(5, body));
        int a = s.hyp(h);
        s.taut(body, {a}, {l});
        return s.finish({h}, body);
    });
}

ProofBundle protagoras_script() {
    Formula contract = assumption("contract"), court = assumption("court");
    ScriptBuilder s("protagoras");
    std::string ct = s.cite(at_time_helper(10, truth_body(court)));
    std::string cb = s.cite(boxdot_body_helper(body_of(contract)));
    int l1 = s.hyp(T(10));
    int l2 = s.taut(F("win_p -> O[verdict_p]_e pay"), {l1}, {ct});
    int l3 = s.taut(F("~win_p -> winfirst_e"), {l1}, {ct});
    int l4 = s.taut(F("winfirst_e -> O[a]_e pay"), {}, {cb});
    int l5 = s.taut(F("~win_p -> O[a]_e pay"), {l3, l4});
    int l6 = s.axiom("Taut", F("win_p \\/ ~win_p"));
    s.taut(F("O[verdict_p]_e pay \\/ O[a]_e pay"), {l2, l5, l6});
    return s.finish({contract, court, T(10)}, F("O[verdict_p]_e pay \\/ O[a]_e pay"));
}

ProofBundle euathlus_script() {
    Formula contract = assumption("contract"), court = assumption("court");
    ScriptBuilder s("euathlus");
    std::string ct = s.cite(at_time_helper(10, truth_body(court)));
    std::string cb = s.cite(boxdot_body_helper(body_of(contract)));
    int l1 = s.hyp(T(10));
    int l2 = s.taut(F("win_p -> ~winfirst_e"), {l1}, {ct});
    int l3 = s.taut(F("~winfirst_e -> ~O[a]_e pay"), {}, {cb});
    int l4 = s.taut(F("win_p -> ~O[a]_e pay"), {l2, l3});
    int l5 = s.taut(F("~win_p -> ~O[verdict_e]_e pay"), {l1}, {ct});
    int l6 = s.axiom("Taut", F("win_p \\/ ~win_p"));
    Formula goal = F("~O[a]_e pay \\/ ~O[verdict_e]_e pay");
    s.taut(goal, {l4, l5, l6});
    return s.finish({contract, court, T(10)}, goal);
}

ProofBundle protagoras_refined_script() {
    Formula contract = assumption("contract'"), court = assumption("court'");
    ScriptBuilder s("protagoras-refined");
    std::string ct = s.cite(at_time_helper(10, truth_body(court)));
    std::string cb = s.cite(boxdot_body_helper(body_of(contract)));
    int l1 = s.hyp(T(10));
    int l2 = s.taut(F("win_p -> (X O[verdict_p]_e pay W pay)"), {l1}, {ct});
    int l3 = s.taut(F("~win_p -> winfirst_e"), {l1}, {ct});
    int l4 = s.taut(F("winfirst_e -> (X O[a]_e pay W pay)"), {}, {cb});
    int l5 = s.taut(F("~win_p -> (X O[a]_e pay W pay)"), {l3, l4});
    int l6 = s.axiom("Taut", F("win_p \\/ ~win_p"));
    Formula goal = F("(X O[verdict_p]_e pay W pay) \\/ (X O[a]_e pay W pay)");
    s.taut(goal, {l2, l5, l6});
    return s.finish({contract, court, T(10)}, goal);
}

ProofBundle euathlus_refined_script() {
    Formula contract = assumption("contract'"), court = assumption("court'");
    ScriptBuilder s("euathlus-refined");
    std::string ct = s.cite(at_time_helper(10, truth_body(court)));
    std::string cb = s.cite(boxdot_body_helper(body_of(contract)));
    std::string w = s.cite(lemma2(7, F("X ~O[a]_e pay"), F("winfirst_e")));
    std::string g = s.cite(lemma2(2, F("~O[verdict_e]_e pay")));
    int l1 = s.hyp(T(10));
    int l2 = s.taut(F("win_p -> ~winfirst_e"), {l1}, {ct});
    int l3 = s.taut(F("X ~O[a]_e pay W winfirst_e"), {}, {cb});
    int l4 = s.taut(F("win_p -> (X ~O[a]_e pay W winfirst_e)"), {l3});
    int l5 = s.taut(F("win_p -> ~winfirst_e /\\ (X ~O[a]_e pay W winfirst_e)"), {l2, l4});
    int l6 = s.taut(F("win_p -> X ~O[a]_e pay /\\ X (X ~O[a]_e pay W winfirst_e)"), {l5}, {w});
    int l7 = s.taut(F("win_p -> X ~O[a]_e pay"), {l6});
    int l8 = s.taut(F("~win_p -> G ~O[verdict_e]_e pay"), {l1}, {ct});
    int l9 = s.taut(F("~win_p -> X ~O[verdict_e]_e pay"), {l8}, {g});
    int l10 = s.axiom("Taut", F("win_p \\/ ~win_p"));
    Formula goal = F("X ~O[a]_e pay \\/ X ~O[verdict_e]_e pay");
    s.taut(goal, {l7, l9, l10});
    return s.finish({contract, court, T(10)}, goal);
}

ProofBundle no_win_first_script() {
    Formula psue = assumption("PsueE"), nwf = assumption("No-win-first");
    Formula wf = F("winfirst_e");
    Formula sigma = F("~pay S winfirst_e");

    ScriptBuilder ha("once-dn-" + formula_tag(wf));
    {
        int a1 = ha.taut(imp(wf, neg(neg(wf))));
        int a2 = ha.once_rm(a1);
        int a3 = ha.taut(imp(neg(once(neg(neg(wf)))), neg(once(wf))), {a2});
        ha.wprev_rm(a3);
    }
    ProofBundle helper_a = ha.finish();
    ScriptBuilder hb("sprev-since-" + formula_tag(sigma));
    {
        int b1 = hb.axiom("Since1", imp(sigma, once(wf)));
        int b2 = hb.taut(imp(neg(once(wf)), neg(sigma)), {b1});
        int b3 = hb.wprev_rm(b2);
        hb.taut(imp(neg(sprev(once(wf))), neg(sprev(sigma))), {b3});
    }
    ProofBundle helper_b = hb.finish();

    ScriptBuilder s("no-win-first");
    std::string l23 = s.cite(lemma2(3, neg(wf)));
    std::string a = s.cite(helper_a);
    std::string b = s.cite(helper_b);
    int l1 = s.hyp(body_of(psue));
    int l2 = s.hyp(F("H ~winfirst_e"));
    int l3 = s.taut(F("Yw H ~winfirst_e"), {l2}, {l23});
    int l4 = s.taut(wprev(neg(once(neg(neg(wf))))), {l3});
    int l5 = s.taut(wprev(neg(once(wf))), {l4}, {a});
    int l6 = s.taut(neg(sprev(once(wf))), {l5});
    int l7 = s.taut(neg(sprev(sigma)), {l6}, {b});
    int l8 = s.taut(disj(neg(sprev(sigma)), F("pay")), {l7});
    int l9 = s.taut(F("~P[a]_p sue_p"), {l1, l8});
    int l10 = s.deduction(l9, F("H ~winfirst_e"));
    int l11 = s.hyp(body_of(nwf));
    int l12 = s.taut(F("time=5 -> ~P[a]_p sue_p"), {l10, l11});
    s.boxdot_lift(l12);
    return s.finish({psue, nwf}, true_at(5, F("~P[a]_p sue_p")));
}

ProofBundle no_obligation_sofar_script() {
    Formula contract = assumption("contract"), nwf = assumption("No-win-first");
    Formula body = body_of(contract);
    ScriptBuilder r("sofar-rm2-" + formula_tag(body));
    {
        int t = r.taut(imp(body, F("~winfirst_e -> ~O[a]_e pay")));
        k_lift2(r, Op::Sofar, t);
    }
    ProofBundle rm2 = r.finish();

    ScriptBuilder s("no-obligation-sofar");
    std::string k = s.cite(rm2);
    std::string l26 = s.cite(lemma2(6, body));
    int l1 = s.hyp(contract);
    int l2 = s.hyp(F("H ~winfirst_e"));
    int l3 = s.taut(F("H ~O[a]_e pay"), {l1, l2}, {k});
    int l4 = s.deduction(l3, F("H ~winfirst_e"));
    int l5 = s.hyp(body_of(nwf));
    int l6 = s.taut(F("time=5 -> H ~O[a]_e pay"), {l4, l5});
    int l7 = s.boxdot_lift(l6);
    int l8 = s.deduction(l7, boxdot(contract));
    int l9 = s.hyp(contract);
    Formula goal = true_at(5, F("H ~O[a]_e pay"));
    s.taut(goal, {l8, l9}, {l26});
    return s.finish({contract, nwf}, goal);
}

namespace {

// Appends the four-line step true_{k-1}(σ) ⇒ true_k(σ) of the since-chain
// (three lines when `close` is false, ending at true_k(◯sσ ∧ ¬pay)).
int since_chain_step(ScriptBuilder& s, std::uint32_t k, Formula sigma, int prev, bool close) {
    Formula notpay = F("~pay");
    Formula ys = sprev(sigma);
    std::string a = s.cite(ttp(3, k - 1, sigma));
    int la = s.taut(true_at(k, ys), {prev}, {a});
    s.note(la, "truth predicate: shift strong previous");
    int lb = s.taut(true_at(k, notpay), {}, {s.cite(sofar_down(15, k, notpay))});
    s.note(lb, "truth predicate: sofar gives every earlier instant");
    int lc = s.taut(true_at(k, conj(ys, notpay)), {la, lb}, {s.cite(true_conj(k, ys, notpay))});
    if (!close) return lc;
    Formula since_in = imp(conj(ys, notpay), sigma);
    ProofBundle prem = simple_theorem("since-in-", since_in,
                                      {{"Since2", iff(sigma, disj(sigma->b, conj(sigma->a, sprev(sigma))))}});
    int ld = s.taut(true_at(k, sigma), {lc}, {s.cite(ttp(9, k, conj(ys, notpay), &prem))});
    s.note(ld, "since unfolding inside the truth predicate");
    return ld;
}

}  // namespace

ProofBundle permitted_to_sue_script() {
    Formula h1 = true_at(10, F("winfirst_e")), h2 = true_at(15, F("H ~pay")), psue = assumption("PsueE");
    Formula sigma = F("~pay S winfirst_e");
    Formula wf = F("winfirst_e");
    ScriptBuilder s("permitted-to-sue");
    int l1 = s.hyp(h1);
    s.hyp(h2);
    int l3 = s.hyp(psue);
    ProofBundle start = simple_theorem("since-start-", imp(wf, sigma),
                                       {{"Since2", iff(sigma, disj(wf, conj(sigma->a, sprev(sigma))))}});
    int cur = s.taut(true_at(10, sigma), {l1}, {s.cite(ttp(9, 10, wf, &start))});
    for (std::uint32_t k = 11; k <= 14; ++k) cur = since_chain_step(s, k, sigma, cur, true);
    int l23 = since_chain_step(s, 15, sigma, cur, false);
    Formula X = conj(sprev(sigma), F("~pay"));
    Formula P = F("P[a]_p sue_p");
    ScriptBuilder u("psue-use-" + formula_tag(X));
    {
        int t = u.taut(imp(body_of(psue), imp(imp(T(15), X), imp(T(15), P))));
        boxdot_rm2(u, t);
    }
    std::string use = s.cite(u.finish());
    Formula goal = true_at(15, P);
    s.taut(goal, {l3, l23}, {use});
    return s.finish({h1, h2, psue}, goal);
}

ProofBundle second_verdict_script() {
    Formula h1 = true_at(10, F("winfirst_e")), h2 = true_at(15, F("H ~pay")), psue = assumption("PsueE");
    Formula h4 = assumption("Second-case");
    Formula wf = F("winfirst_e");
    Formula sigma = F("~pay S Yw winfirst_e");
    ScriptBuilder s("second-verdict");
    int l1 = s.hyp(h1);
    s.hyp(h2);
    s.hyp(psue);
    int l4 = s.hyp(h4);
    int l5 = s.taut(true_at(11, wprev(wf)), {l1}, {s.cite(ttp(4, 10, wf))});
    ProofBundle start = simple_theorem("since-start-", imp(wprev(wf), sigma),
                                       {{"Since2", iff(sigma, disj(wprev(wf), conj(sigma->a, sprev(sigma))))}});
    int cur = s.taut(true_at(11, sigma), {l5}, {s.cite(ttp(9, 11, wprev(wf), &start))});
    for (std::uint32_t k = 12; k <= 14; ++k) cur = since_chain_step(s, k, sigma, cur, true);
    int l21 = since_chain_step(s, 15, sigma, cur, false);
    Formula X = conj(sprev(sigma), F("~pay"));
    Formula win2 = F("winsecond_p");
    Formula goal = true_at(15, win2);
    s.taut(goal, {l4, l21}, {s.cite(true_mp(15, X, win2))});
    return s.finish({h1, h2, psue, h4}, goal);
}

ProofBundle judge_first_script() {
    Formula contract = assumption("contract"), court = assumption("court");
    Formula nwf = assumption("No-win-first'"), pl = assumption("Past-looking");
    Formula C = F("~win_p /\\ winfirst_e /\\ O[a]_e pay");
    ScriptBuilder s("judge-first");
    std::string at_n = s.cite(at_time_helper(10, truth_body(nwf)));
    std::string at_p = s.cite(at_time_helper(10, truth_body(pl)));
    std::string at_c = s.cite(at_time_helper(10, truth_body(court)));
    std::string cb = s.cite(boxdot_body_helper(body_of(contract)));
    std::vector<std::string> idem;
    for (Formula h : {contract, court, nwf, pl}) idem.push_back(s.cite(lemma2(6, body_of(h))));

    int l1 = s.hyp(T(10));
    int l2 = s.taut(F("H Yw ~winfirst_e"), {l1}, {at_n});
    int l3 = s.taut(F("~win_p"), {l1, l2}, {at_p});
    int l4 = s.taut(F("winfirst_e"), {l1, l3}, {at_c});
    int l5 = s.taut(F("O[a]_e pay"), {l4}, {cb});
    int l6 = s.taut(C, {l3, l4, l5});
    int l7 = s.deduction(l6, T(10));
    int cur = s.boxdot_lift(l7);
    for (Formula h : {pl, nwf, court, contract}) cur = s.deduction(cur, boxdot(h));
    std::vector<int> from = {cur};
    for (Formula h : {contract, court, nwf, pl}) from.push_back(s.hyp(h));
    Formula goal = true_at(10, C);
    s.taut(goal, from, idem);
    return s.finish({contract, court, nwf, pl}, goal);
}

ProofBundle sdl_contradiction_script() {
    Formula contract = assumption("contract0"), court = assumption("court0");
    ScriptBuilder s("sdl-contradiction");
    std::string ct = s.cite(at_time_helper(10, truth_body(court)));
    std::string cb = s.cite(boxdot_body_helper(body_of(contract)));
    int l1 = s.hyp(T(10));
    int l2 = s.taut(truth_body(court), {l1}, {ct});
    int l3 = s.taut(body_of(contract), {}, {cb});
    int l4 = s.taut(F("O_e pay"), {l2, l3});
    int l5 = s.taut(F("~O_e pay"), {l2, l3});
    s.taut(bot(), {l4, l5});
    return s.finish({contract, court, T(10)}, bot());
}

std::vector<NamedBundle> corpus_scripts() {
    return {
        {"protagoras", protagoras_script()},
        {"euathlus", euathlus_script()},
        {"protagoras-refined", protagoras_refined_script()},
        {"euathlus-refined", euathlus_refined_script()},
        {"no-win-first", no_win_first_script()},
        {"no-obligation-sofar", no_obligation_sofar_script()},
        {"permitted-to-sue", permitted_to_sue_script()},
        {"second-verdict", second_verdict_script()},
        {"judge-first", judge_first_script()},
        {"sdl-contradiction", sdl_contradiction_script()},
    };
}

}  // namespace jto
