#include "jto/kernel.hpp"

namespace jto {

namespace {

using B = ScriptBuilder;

int until2(B& b, Formula a, Formula c) {
    Formula u = until(a, c);
    return b.axiom("Until2", iff(u, disj(c, conj(a, next(u)))));
}

int since2(B& b, Formula a, Formula c) {
    Formula s = since(a, c);
    return b.axiom("Since2", iff(s, disj(c, conj(a, sprev(s)))));
}

int fun(B& b, Formula f) { return b.axiom("Fun", iff(next(neg(f)), neg(next(f)))); }

// □φ → (φ ∧ ◯□φ)
int l2_1(B& b, Formula phi) {
    Formula A = until(top(), neg(phi));
    int u = until2(b, top(), neg(phi));
    int f = fun(b, A);
    return b.taut(imp(always(phi), conj(phi, next(always(phi)))), {u, f});
}

// □φ → ◯φ
int l2_2(B& b, Formula phi) {
    int l1 = l2_1(b, phi);
    int t = b.taut(imp(always(phi), phi), {l1});
    int k = k_lift(b, Op::Next, t);
    return b.taut(imp(always(phi), next(phi)), {l1, k});
}

// ⊟φ → (φ ∧ ◯w⊟φ)
int l2_3(B& b, Formula phi) {
    int s = since2(b, top(), neg(phi));
    return b.taut(imp(sofar(phi), conj(phi, wprev(sofar(phi)))), {s});
}

// ⊟φ → ◯wφ
int l2_4(B& b, Formula phi) {
    int l3 = l2_3(b, phi);
    int t = b.taut(imp(sofar(phi), phi), {l3});
    int w = b.wprev_rm(t);
    return b.taut(imp(sofar(phi), wprev(phi)), {l3, w});
}

// ⊡φ → φ
int l2_5(B& b, Formula phi) {
    int l1 = l2_1(b, phi);
    return b.taut(imp(boxdot(phi), phi), {l1});
}

// ⊡φ ↔ ⊡⊡φ
int l2_6(B& b, Formula phi) {
    Formula D = boxdot(phi);
    int i1 = l2_1(b, phi);
    int i2 = l2_2(b, phi);
    int i3 = l2_3(b, phi);
    int i4 = l2_4(b, phi);

    int s2 = since2(b, top(), neg(phi));
    int sw = b.axiom("SW", imp(sprev(sofar(phi)), wprev(sofar(phi))));
    int a = b.taut(imp(phi, imp(sprev(sofar(phi)), sofar(phi))), {s2, sw});
    int ka = k_lift2(b, Op::Next, a);
    int fp = b.axiom("FP", imp(sofar(phi), next(sprev(sofar(phi)))));
    int c = b.taut(imp(sofar(phi), imp(always(phi), D)));
    int kc = k_lift2(b, Op::Next, c);
    int dn = b.taut(imp(D, next(D)), {i1, i2, ka, fp, kc});
    int g = b.nec(Op::Alw, dn);
    int ind = b.axiom("Ind", imp(always(imp(D, next(D))), imp(D, always(D))));
    int up = b.mp(g, ind);

    int pf = b.axiom("PF", imp(always(phi), wprev(next(always(phi)))));
    int u = until2(b, top(), neg(phi));
    int f = fun(b, until(top(), neg(phi)));
    int e = b.taut(imp(phi, imp(next(always(phi)), always(phi))), {u, f});
    int ke = k_lift2(b, Op::WPrev, e);
    int kc2 = k_lift2(b, Op::WPrev, c);
    int dw = b.taut(imp(D, wprev(D)), {i3, i4, pf, ke, kc2});
    int h = b.nec(Op::Sofar, dw);
    int si = b.axiom("SofarInd", imp(sofar(imp(D, wprev(D))), imp(D, sofar(D))));
    int down = b.mp(h, si);

    int i5 = l2_5(b, D);
    return b.taut(iff(D, boxdot(D)), {up, down, i5});
}

// φ W ψ ↔ ψ ∨ (φ ∧ ◯(φ W ψ))
int l2_7(B& b, Formula phi, Formula psi) {
    Formula U = until(phi, psi);
    Formula A = until(top(), neg(phi));
    Formula W = wuntil(phi, psi);
    int u2 = until2(b, phi, psi);
    int ua = until2(b, top(), neg(phi));
    int fa = fun(b, A);
    int fu = fun(b, U);
    int nk = b.axiom("NextK", imp(next(imp(neg(U), neg(A))), imp(next(neg(U)), next(neg(A)))));
    int k1 = k_lift(b, Op::Next, b.taut(imp(U, W)));
    int k2 = k_lift(b, Op::Next, b.taut(imp(neg(A), W)));
    return b.taut(iff(W, disj(psi, conj(phi, next(W)))), {u2, ua, fa, fu, nk, k1, k2});
}

int emit_lemma2(B& b, int item, Formula phi, Formula psi) {
    switch (item) {
        case 1: return l2_1(b, phi);
        case 2: return l2_2(b, phi);
        case 3: return l2_3(b, phi);
        case 4: return l2_4(b, phi);
        case 5: return l2_5(b, phi);
        case 6: return l2_6(b, phi);
        case 7: return l2_7(b, phi, psi);
    }
    throw OutOfRange("the temporal lemma has items 1 to 7");
}

// ◯◯wφ → φ
int x_yw_elim(B& b, Formula phi) {
    int l1 = b.taut(imp(phi, neg(neg(phi))));
    int l2 = b.wprev_rm(l1);
    int l3 = b.taut(imp(sprev(neg(phi)), neg(wprev(phi))), {l2});
    int l4 = k_lift(b, Op::Next, l3);
    int l5 = b.axiom("FP", imp(neg(phi), next(sprev(neg(phi)))));
    int l6 = fun(b, wprev(phi));
    return b.taut(imp(next(wprev(phi)), phi), {l4, l5, l6});
}

// ◯◯sφ → φ
int x_ys_elim(B& b, Formula phi) {
    int sw = b.axiom("SW", imp(sprev(neg(phi)), wprev(neg(phi))));
    int l = b.taut(imp(sprev(neg(phi)), neg(sprev(phi))), {sw});
    int k = k_lift(b, Op::Next, l);
    int f = fun(b, sprev(phi));
    int fp = b.axiom("FP", imp(neg(phi), next(sprev(neg(phi)))));
    return b.taut(imp(next(sprev(phi)), phi), {k, f, fp});
}

// ◯s◯φ → φ
int ys_x_elim(B& b, Formula phi) {
    int pf = b.axiom("PF", imp(neg(phi), wprev(next(neg(phi)))));
    int f = fun(b, phi);
    int t = b.taut(imp(next(neg(phi)), neg(next(phi))), {f});
    int w = b.wprev_rm(t);
    return b.taut(imp(sprev(next(phi)), phi), {pf, w});
}

// From a line ⊢ ⊡X → Z, gives ⊢ ⊡X → ⊡Z.
int lift_boxdot(B& b, int line, Formula X) {
    Formula Z = desugar(b.formula(line))->b;
    Formula shown = b.formula(line)->op == Op::Imp ? b.formula(line)->b : Z;
    int r = boxdot_rm(b, line);
    int l6 = l2_6(b, X);
    return b.taut(imp(boxdot(X), boxdot(shown)), {r, l6});
}

Formula T(std::uint32_t m) { return time_literal(m); }

int ttp1(B& b, std::uint32_t m, Formula phi) {
    int l5 = l2_5(b, imp(T(m), phi));
    return b.taut(imp(conj(true_at(m, phi), T(m)), phi), {l5});
}

int ttp2(B& b, std::uint32_t m, Formula phi) {
    Formula X = imp(T(m), next(phi));
    Formula Y = imp(T(m + 1), phi);
    int i4 = l2_4(b, X);
    int kw = k_lift2(b, Op::WPrev, b.taut(imp(X, imp(neg(next(phi)), neg(T(m))))));
    int e = ys_x_elim(b, phi);
    int z = b.taut(imp(boxdot(X), Y), {i4, kw, e});
    int f = lift_boxdot(b, z, X);

    int i2 = l2_2(b, Y);
    int fp = b.axiom("FP", imp(T(m), next(sprev(T(m)))));
    int ky = k_lift2(b, Op::Next, b.taut(imp(Y, Y)));
    int z2 = b.taut(imp(boxdot(Y), X), {i2, fp, ky});
    int g = lift_boxdot(b, z2, Y);
    return b.taut(iff(true_at(m, next(phi)), true_at(m + 1, phi)), {f, g});
}

// ⊡(time=m → φ) → (time=m+1 → ◯sφ)
int ttp3_step(B& b, std::uint32_t m, Formula phi) {
    Formula Y = imp(T(m), phi);
    int i4 = l2_4(b, Y);
    int kw = k_lift2(b, Op::WPrev, b.taut(imp(Y, imp(neg(phi), neg(T(m))))));
    return b.taut(imp(boxdot(Y), imp(T(m + 1), sprev(phi))), {i4, kw});
}

int ttp3(B& b, std::uint32_t m, Formula phi) {
    Formula X = imp(T(m + 1), sprev(phi));
    Formula Y = imp(T(m), phi);
    int i2 = l2_2(b, X);
    int fp = b.axiom("FP", imp(T(m), next(sprev(T(m)))));
    int kx = k_lift2(b, Op::Next, b.taut(imp(X, X)));
    int e = x_ys_elim(b, phi);
    int z = b.taut(imp(boxdot(X), Y), {i2, fp, kx, e});
    int f = lift_boxdot(b, z, X);

    int z2 = ttp3_step(b, m, phi);
    int g = lift_boxdot(b, z2, Y);
    return b.taut(iff(true_at(m + 1, sprev(phi)), true_at(m, phi)), {f, g});
}

int ttp4(B& b, std::uint32_t m, Formula phi) {
    Formula X = imp(T(m + 1), wprev(phi));
    Formula Y = imp(T(m), phi);
    int i2 = l2_2(b, X);
    int fp = b.axiom("FP", imp(T(m), next(sprev(T(m)))));
    int kx = k_lift2(b, Op::Next, b.taut(imp(X, X)));
    int e = x_yw_elim(b, phi);
    int z = b.taut(imp(boxdot(X), Y), {i2, fp, kx, e});
    int f = lift_boxdot(b, z, X);

    int i4 = l2_4(b, Y);
    int wk = b.axiom("WPrevK", imp(wprev(Y), imp(wprev(T(m)), wprev(phi))));
    int sw = b.axiom("SW", imp(sprev(T(m)), wprev(T(m))));
    int z2 = b.taut(imp(boxdot(Y), X), {i4, wk, sw});
    int g = lift_boxdot(b, z2, Y);
    return b.taut(iff(true_at(m + 1, wprev(phi)), true_at(m, phi)), {f, g});
}

int ttp5(B& b, std::uint32_t m, Formula phi) {
    int l4 = l2_4(b, phi);
    int t = b.taut(imp(imp(T(m + 1), sofar(phi)), imp(T(m + 1), wprev(phi))), {l4});
    int r = boxdot_rm(b, t);
    int i4 = ttp4(b, m, phi);
    return b.taut(imp(true_at(m + 1, sofar(phi)), true_at(m, phi)), {r, i4});
}

int ttp6(B& b, std::uint32_t m, Formula phi) {
    int t = b.taut(imp(phi, imp(T(m), phi)));
    return boxdot_rm(b, t);
}

int ttp7(B& b, std::uint32_t m, Formula phi) {
    int l6 = l2_6(b, imp(T(m), phi));
    return b.taut(iff(boxdot(true_at(m, phi)), true_at(m, phi)), {l6});
}

int ttp8(B& b, std::uint32_t m, Formula phi) {
    int h = b.hyp(true_at(m, phi));
    int s = ttp3_step(b, m, phi);
    return b.taut(imp(T(m + 1), sprev(phi)), {h, s});
}

int ttp9(B& b, std::uint32_t m, Formula phi, const ProofBundle* premise) {
    if (!premise) throw Error("MissingPremise", "item 9 needs a script proving phi -> psi");
    std::string name = b.cite(*premise);
    int l = b.lemma(name);
    Formula g = premise->main().goal;
    Formula psi = g->op == Op::Imp ? g->b : desugar(g)->b;
    int t = b.taut(imp(imp(T(m), phi), imp(T(m), psi)), {l});
    return boxdot_rm(b, t);
}

}  // namespace

Formula lemma2_statement(int item, Formula phi, Formula psi) {
    switch (item) {
        case 1: return imp(always(phi), conj(phi, next(always(phi))));
        case 2: return imp(always(phi), next(phi));
        case 3: return imp(sofar(phi), conj(phi, wprev(sofar(phi))));
        case 4: return imp(sofar(phi), wprev(phi));
        case 5: return imp(boxdot(phi), phi);
        case 6: return iff(boxdot(phi), boxdot(boxdot(phi)));
        case 7:
            if (!psi) throw OutOfRange("item 7 needs a second formula");
            return iff(wuntil(phi, psi), disj(psi, conj(phi, next(wuntil(phi, psi)))));
    }
    throw OutOfRange("the temporal lemma has items 1 to 7");
}

ProofBundle derive_lemma2(int item, Formula phi, Formula psi) {
    Formula goal = lemma2_statement(item, phi, psi);
    B b("L2." + std::to_string(item) + "-" + formula_tag(goal));
    emit_lemma2(b, item, phi, psi);
    return b.finish({}, goal);
}

Formula ttp_statement(int item, std::uint32_t m, Formula phi, Formula psi) {
    switch (item) {
        case 1: return imp(conj(true_at(m, phi), T(m)), phi);
        case 2: return iff(true_at(m, next(phi)), true_at(m + 1, phi));
        case 3: return iff(true_at(m + 1, sprev(phi)), true_at(m, phi));
        case 4: return iff(true_at(m + 1, wprev(phi)), true_at(m, phi));
        case 5: return imp(true_at(m + 1, sofar(phi)), true_at(m, phi));
        case 6: return imp(boxdot(phi), true_at(m, phi));
        case 7: return iff(boxdot(true_at(m, phi)), true_at(m, phi));
        case 8: return imp(T(m + 1), sprev(phi));
        case 9:
            if (!psi) throw OutOfRange("item 9 needs a second formula");
            return imp(true_at(m, phi), true_at(m, psi));
    }
    throw OutOfRange("the truth predicate lemma has items 1 to 9");
}

ProofBundle check_ttp_lemma(int item, std::uint32_t m, Formula phi, const ProofBundle* premise) {
    if (item < 1 || item > 9) throw OutOfRange("the truth predicate lemma has items 1 to 9");
    if (m > 32) throw OutOfRange("m must be at most 32");
    Formula psi = nullptr;
    if (item == 9 && premise) {
        Formula g = premise->main().goal;
        psi = g->op == Op::Imp ? g->b : desugar(g)->b;
    }
    Formula goal = ttp_statement(item, m, phi, psi);
    B b("TTP" + std::to_string(item) + "-m" + std::to_string(m) + "-" + formula_tag(goal));
    switch (item) {
        case 1: ttp1(b, m, phi); break;
        case 2: ttp2(b, m, phi); break;
        case 3: ttp3(b, m, phi); break;
        case 4: ttp4(b, m, phi); break;
        case 5: ttp5(b, m, phi); break;
        case 6: ttp6(b, m, phi); break;
        case 7: ttp7(b, m, phi); break;
        case 8: ttp8(b, m, phi); return b.finish({true_at(m, phi)}, goal);
        case 9: ttp9(b, m, phi, premise); break;
    }
    return b.finish({}, goal);
}

ProofBundle no_conflicts_forward(Agent i, Term t, Formula phi) {
    Formula nc = imp(obox(i, t, phi), operm(i, t, phi));
    Formula goal = neg(conj(obox(i, t, phi), obox(i, t, neg(phi))));
    B b("noc-forward-" + formula_tag(imp(nc, goal)));
    int h = b.hyp(nc);
    b.taut(goal, {h});
    return b.finish({nc}, goal);
}

ProofBundle no_conflicts_backward(Agent i, Term t, Formula phi) {
    Formula nc = neg(conj(obox(i, t, phi), obox(i, t, neg(phi))));
    Formula goal = imp(obox(i, t, phi), operm(i, t, phi));
    B b("noc-backward-" + formula_tag(imp(nc, goal)));
    int h = b.hyp(nc);
    b.taut(goal, {h});
    return b.finish({nc}, goal);
}

}  // namespace jto
