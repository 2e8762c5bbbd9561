#!/usr/bin/env python3
"""Writes demo.jsonl (the bundled mini corpus) and prime_scenario.json.

Expected totals of the drill-down scenario are computed here by a plain
regex scan over the records, independently of the C++ engine.
"""
import json
import re
from pathlib import Path

HERE = Path(__file__).resolve().parent

blocks = []


def block(bid, theory, line, command, src, *entities):
    blocks.append({"id": bid, "theory": theory, "start_line": line, "command": command,
                   "src": src, "entities": list(entities)})


def const(cid, name, ctype, uses=()):
    return {"child_id": cid, "kind": "Constant", "name": name, "const_type": ctype, "uses": list(uses)}


def fact(cid, name, uses=()):
    return {"child_id": cid, "kind": "Fact", "name": name, "uses": list(uses)}


def typ(cid, name, uses=()):
    return {"child_id": cid, "kind": "Type", "name": name, "uses": list(uses)}


PRIMES = "HOL-Computational_Algebra.Primes"

# --- the seeded HOL prime definition and its consumers ----------------------
block("primes:5", PRIMES, 5, "definition",
      'definition prime :: "nat \\<Rightarrow> bool"\n'
      '  where "prime p \\<longleftrightarrow> 1 < p \\<and> (\\<forall>m. m dvd p \\<longrightarrow> m = 1 \\<or> m = p)"\n',
      const("Primes.prime", "prime", "nat ⇒ bool", ["Nat.nat", "HOL.bool", "Rings.dvd"]),
      fact("Primes.prime_def", "prime_def", ["Primes.prime"]))
block("primes:9", PRIMES, 9, "lemma",
      'lemma prime_ge_2: "prime p ==> 2 \\<le> p"\n  by (auto simp: prime_def)\n',
      fact("Primes.prime_ge_2", "prime_ge_2", ["Primes.prime", "Primes.prime_def"]))
block("primes:12", PRIMES, 12, "theorem",
      'theorem two_is_prime: "prime (2::nat)"\n  by (simp add: prime_def)\n',
      fact("Primes.two_is_prime", "two_is_prime", ["Primes.prime"]))
block("primes:15", PRIMES, 15, "lemma",
      'lemma prime_odd: "prime p \\<Longrightarrow> 2 < p \\<Longrightarrow> odd p"\n  by (metis prime_ge_2 two_is_prime)\n',
      fact("Primes.prime_odd", "prime_odd", ["Primes.prime", "Primes.prime_ge_2"]))
block("primes:18", PRIMES, 18, "lemma",
      'lemma prime_nat_iff: "prime n ⟷ 1 < n ∧ (∀m. m dvd n ⟶ m = 1 ∨ m = n)"\n  unfolding prime_def by blast\n',
      fact("Primes.prime_nat_iff", "prime_nat_iff", ["Primes.prime", "Primes.prime_def"]))
block("primes:21", PRIMES, 21, "fun",
      'fun next_prime :: "nat ⇒ nat" where\n  "next_prime n = (LEAST p. prime p ∧ n < p)"\n',
      const("Primes.next_prime", "next_prime", "nat ⇒ nat", ["Primes.prime"]))
block("primes:24", PRIMES, 24, "definition",
      'definition prime_factors :: "nat ⇒ nat multiset" where\n  "prime_factors n = filter_mset prime (divisors n)"\n',
      const("Primes.prime_factors", "prime_factors", "nat ⇒ nat multiset", ["Primes.prime"]))

# --- other prime constants ---------------------------------------------------
block("zf:primes:3", "ZF-ex.Primes", 3, "definition",
      'definition prime :: i where\n  "prime == {p \\<in> nat. 1<p & (\\<forall>m \\<in> nat. m dvd p --> m=1 | m=p)}"\n',
      const("ZF.prime", "prime", "i", ["ZF.nat", "ZF.dvd"]))
block("zf:primes:7", "ZF-ex.Primes", 7, "lemma",
      'lemma prime_2: "2 \\<in> prime"\n  by (unfold prime_def) auto\n',
      fact("ZF.prime_2", "prime_2", ["ZF.prime"]))
block("ntalt:4", "HOL-Number_Theory.Prime_Alt", 4, "definition",
      'definition prime :: "int ⇒ bool" where\n  "prime z ⟷ 1 < z ∧ (∀d. d dvd z ⟶ d = 1 ∨ d = z)"\n',
      const("Prime_Alt.prime", "prime", "int ⇒ bool", ["HOL.bool"]),
      fact("Prime_Alt.prime_def", "prime_def", ["Prime_Alt.prime"]))
block("divis:10", "HOL-Algebra.Divisibility", 10, "locale",
      'locale prime_loc =\n  fixes prime :: "nat ⇒ bool"\n  assumes "prime p ⟹ p > 1"\n',
      const("Divisibility.prime", "prime", "nat ⇒ bool", ["Nat.nat", "HOL.bool"]))
block("primefun:2", "HOL-Library.Prime_Fun", 2, "fun",
      'fun prime :: "nat ⇒ bool" where\n  "prime n = (1 < n ∧ (∀m<n. 1 < m ⟶ ¬ m dvd n))"\n',
      const("Prime_Fun.prime", "prime", "nat ⇒ bool", ["Nat.nat", "HOL.bool"]),
      fact("Prime_Fun.prime.simps", "prime.simps", ["Prime_Fun.prime"]))
block("factring:30", "HOL-Computational_Algebra.Factorial_Ring", 30, "definition",
      'definition prime :: "\'a ⇒ bool" where\n  "prime p ⟷ prime_elem p ∧ normalize p = p"\n',
      const("Factorial_Ring.prime", "prime", "'a ⇒ bool", ["Factorial_Ring.prime_elem"]),
      const("Factorial_Ring.prime_elem", "prime_elem", "'a ⇒ bool"))
block("factring:34", "HOL-Computational_Algebra.Factorial_Ring", 34, "lemma",
      'lemma prime_imp_prime_elem: "prime p ⟹ prime_elem p"\n  by (simp add: prime_def)\n',
      fact("Factorial_Ring.prime_imp_prime_elem", "prime_imp_prime_elem",
           ["Factorial_Ring.prime", "Factorial_Ring.prime_elem"]))
block("residues:8", "HOL-Number_Theory.Residues", 8, "abbreviation",
      'abbreviation prime_nat :: "nat ⇒ bool" where\n  "prime_nat ≡ prime"\n',
      const("Residues.prime_nat", "prime_nat", "nat ⇒ bool", ["Primes.prime"]))
block("ntinduct:6", "HOL-Number_Theory.Induct_Primes", 6, "inductive",
      'inductive prime :: "nat ⇒ bool" where\n  "1 < p ⟹ (⋀m. m dvd p ⟹ m = 1 ∨ m = p) ⟹ prime p"\n',
      const("Induct_Primes.prime", "prime", "nat ⇒ bool", ["Nat.nat"]),
      fact("Induct_Primes.prime.intros", "prime.intros", ["Induct_Primes.prime"]))

# --- HOL.Nat ----------------------------------------------------------------------
block("nat:1", "HOL.Nat", 1, "theory", "theory Nat\n  imports Inductive Typedef_Fun Fun Rings\nbegin\n")
block("nat:20", "HOL.Nat", 20, "datatype",
      'datatype nat = Zero_nat ("0") | Suc nat\n',
      typ("Nat.nat", "nat"),
      const("Nat.Suc", "Suc", "nat ⇒ nat", ["Nat.nat"]),
      const("Nat.Zero_nat", "Zero_nat", "nat", ["Nat.nat"]),
      fact("Nat.nat.induct", "nat.induct", ["Nat.nat", "Nat.Suc"]),
      fact("Nat.nat.distinct", "nat.distinct", ["Nat.Suc", "Nat.Zero_nat"]),
      fact("Nat.nat.inject", "nat.inject", ["Nat.Suc"]))
block("nat:40", "HOL.Nat", 40, "lemma",
      'lemma Suc_not_Zero: "Suc m \\<noteq> 0"\n  by simp\n',
      fact("Nat.Suc_not_Zero", "Suc_not_Zero", ["Nat.Suc", "Nat.Zero_nat"]))
block("nat:44", "HOL.Nat", 44, "lemma",
      'lemma add_Suc_right: "m + Suc n = Suc (m + n)"\n  by (induct m) simp_all\n',
      fact("Nat.add_Suc_right", "add_Suc_right", ["Nat.Suc", "Nat.nat.induct"]))
block("nat:50", "HOL.Nat", 50, "theorem",
      'theorem nat_induct2: "P 0 ==> P 1 ==> (!!n. P n ==> P (Suc (Suc n))) ==> P n"\n  by (induct n rule: less_induct) auto\n',
      fact("Nat.nat_induct2", "nat_induct2", ["Nat.nat.induct", "Nat.Suc"]))
block("nat:60", "HOL.Nat", 60, "fun",
      'fun fact :: "nat ⇒ nat" where\n  "fact 0 = 1"\n| "fact (Suc n) = Suc n * fact n"\n',
      const("Nat.fact", "fact", "nat ⇒ nat", ["Nat.Suc"]),
      fact("Nat.fact.simps", "fact.simps", ["Nat.fact"]),
      fact("Nat.fact.induct", "fact.induct", ["Nat.fact"]))
block("nat:70", "HOL.Nat", 70, "lemma",
      '<span class="keyword">lemma</span> le_SucI: "m \\<le> n \\<Longrightarrow> m \\<le> Suc n"\n  by (simp add: le_Suc_eq)\n',
      fact("Nat.le_SucI", "le_SucI", ["Nat.Suc"]))
block("nat:80", "HOL.Nat", 80, "definition",
      'definition pred :: "nat ⇒ nat" where\n  "pred n = n - 1"\n',
      const("Nat.pred", "pred", "nat ⇒ nat", ["Nat.nat"]),
      fact("Nat.pred_def", "pred_def", ["Nat.pred"]))

# --- HOL.List ----------------------------------------------------------------------
block("list:30", "HOL.List", 30, "datatype",
      'datatype (set: \'a) list = Nil ("[]") | Cons (hd: \'a) (tl: "\'a list") (infixr "#" 65)\n',
      typ("List.list", "list"),
      const("List.Nil", "Nil", "'a list", ["List.list"]),
      const("List.Cons", "Cons", "'a ⇒ 'a list ⇒ 'a list", ["List.list"]),
      fact("List.list.induct", "list.induct", ["List.Nil", "List.Cons"]),
      fact("List.list.distinct", "list.distinct", ["List.Nil", "List.Cons"]),
      fact("List.list.inject", "list.inject", ["List.Cons"]))
block("list:90", "HOL.List", 90, "fun",
      'fun rev :: "\'a list ⇒ \'a list" where\n  "rev [] = []"\n| "rev (x # xs) = rev xs @ [x]"\n',
      const("List.rev", "rev", "'a list ⇒ 'a list", ["List.list", "List.Cons"]),
      fact("List.rev.simps", "rev.simps", ["List.rev"]))
block("list:120", "HOL.List", 120, "lemma",
      'lemma rev_rev_ident [simp]: "rev (rev xs) = xs"\n  by (induct xs) auto\n',
      fact("List.rev_rev_ident", "rev_rev_ident", ["List.rev"]))
block("list:130", "HOL.List", 130, "theorem",
      'theorem length_append [simp]: "length (xs @ ys) = length xs + length ys"\n  by (induct xs) auto\n',
      fact("List.length_append", "length_append", ["List.list"]))
block("list:140", "HOL.List", 140, "lemma",
      'lemma list_induct2: "length xs = length ys \\<Longrightarrow> P [] [] \\<Longrightarrow> P xs ys"\n  sorry\n',
      fact("List.list_induct2", "list_induct2", ["List.length_append"]))
block("list:150", "HOL.List", 150, "definition",
      'definition distinct_adj :: "\'a list ⇒ bool" where\n  "distinct_adj xs ⟷ (∀i. Suc i < length xs ⟶ xs ! i ≠ xs ! Suc i)"\n',
      const("List.distinct_adj", "distinct_adj", "'a list ⇒ bool", ["List.list", "Nat.Suc"]),
      fact("List.distinct_adj_def", "distinct_adj_def", ["List.distinct_adj"]))

# --- HOL.Set / Fun / Rings -----------------------------------------------------------
block("set:10", "HOL.Set", 10, "definition",
      'definition subset_eq :: "\'a set ⇒ \'a set ⇒ bool" where\n  "subset_eq A B ⟷ (∀x∈A. x ∈ B)"\n',
      const("Set.subset_eq", "subset_eq", "'a set ⇒ 'a set ⇒ bool", ["HOL.bool"]),
      fact("Set.subset_eq_def", "subset_eq_def", ["Set.subset_eq"]))
block("set:25", "HOL.Set", 25, "lemma",
      'lemma subsetI: "(\\<And>x. x \\<in> A \\<Longrightarrow> x \\<in> B) \\<Longrightarrow> A \\<subseteq> B"\n  by (auto simp: subset_eq_def)\n',
      fact("Set.subsetI", "subsetI", ["Set.subset_eq"]))
block("set:33", "HOL.Set", 33, "lemma",
      'lemma subset_trans: "A ⊆ B --> B ⊆ C --> A ⊆ C"\n  by blast\n',
      fact("Set.subset_trans", "subset_trans", ["Set.subset_eq"]))
block("fun:12", "HOL.Fun", 12, "definition",
      'definition inj_on :: "(\'a ⇒ \'b) ⇒ \'a set ⇒ bool" where\n  "inj_on f A ⟷ (∀x∈A. ∀y∈A. f x = f y ⟶ x = y)"\n',
      const("Fun.inj_on", "inj_on", "('a ⇒ 'b) ⇒ 'a set ⇒ bool", ["HOL.bool"]),
      fact("Fun.inj_on_def", "inj_on_def", ["Fun.inj_on"]))
block("fun:20", "HOL.Fun", 20, "lemma",
      'lemma inj_on_id: "inj_on id A"\n  by (simp add: inj_on_def)\n',
      fact("Fun.inj_on_id", "inj_on_id", ["Fun.inj_on", "Fun.inj_on_def"]))
block("rings:100", "HOL.Rings", 100, "definition",
      'definition dvd :: "\'a ⇒ \'a ⇒ bool" (infix "dvd" 50) where\n  "b dvd a ⟷ (∃k. a = b * k)"\n',
      const("Rings.dvd", "dvd", "'a ⇒ 'a ⇒ bool", ["HOL.bool"]),
      fact("Rings.dvd_def", "dvd_def", ["Rings.dvd"]))
block("rings:110", "HOL.Rings", 110, "lemma",
      'lemma dvd_refl [simp]: "a dvd a"\n  by (auto simp: dvd_def intro: exI[of _ 1])\n',
      fact("Rings.dvd_refl", "dvd_refl", ["Rings.dvd", "Rings.dvd_def"]))
block("hol:200", "HOL.HOL", 200, "typedecl",
      'typedecl bool\n',
      typ("HOL.bool", "bool"))
block("zfnat:5", "ZF.Nat_ZF", 5, "definition",
      'definition nat :: i where\n  "nat == lfp(Inf, %X. {0} Un {succ(i). i:X})"\n',
      const("ZF.nat", "nat", "i"),
      fact("ZF.nat_def", "nat_def", ["ZF.nat"]),
      typ("ZF.i", "i"))
block("zfarith:9", "ZF.Arith", 9, "definition",
      'definition dvd :: "[i,i]=>o" (infixl "dvd" 50) where\n  "m dvd n == m \\<in> nat & n \\<in> nat & (\\<exists>k \\<in> nat. n = m#*k)"\n',
      const("ZF.dvd", "dvd", "[i,i] ⇒ o", ["ZF.nat"]),
      fact("ZF.dvd_def", "dvd_def", ["ZF.dvd"]))

(HERE / "demo.jsonl").write_text(
    "".join(json.dumps(b, ensure_ascii=False, separators=(",", ":")) + "\n" for b in blocks),
    encoding="utf-8")

# --- independent scenario oracle ------------------------------------------------------

WORD = re.compile(r"[A-Za-z0-9_.']+")
TAG = re.compile(r"(?<!\\)</?[A-Za-z][^<>\n]*>")


def words(text, markup=False):
    if markup:
        text = TAG.sub("", text)
    out = []
    for w in WORD.findall(text):
        w = w.strip(".").lower()
        if w:
            out.append(w)
    return out


def entity_ok(e, pred):
    return pred(e)


def run(clauses):
    """clauses: list of (kind, predicate) with kind 'block' or 'entity'.
    Returns [(block_id, [matched entity ids])]."""
    res = []
    for b in blocks:
        ok = True
        for kind, pred in clauses:
            if kind == "block" and not pred(b):
                ok = False
            if kind == "entity" and not any(pred(e) for e in b["entities"]):
                ok = False
        if ok:
            ents = [e["child_id"] for e in b["entities"]
                    if all(pred(e) for kind, pred in clauses if kind == "entity")]
            res.append((b["id"], ents))
    return res


src_prime = ("block", lambda b: "prime" in words(b["src"], markup=True))
kind_const = ("entity", lambda e: e["kind"] == "Constant")
name_prime = ("entity", lambda e: "prime" in words(e["name"]))
type_nat_bool = ("entity", lambda e: "const_type" in e and
                 bool({"nat", "bool"} & set(words(e["const_type"]))))
cmd_defs = ("block", lambda b: b["command"] in ("definition", "inductive", "abbreviation"))

steps = [
    ("Term 'prime' in source", [src_prime]),
    ("select Kind=Constant", [src_prime, kind_const]),
    ("entity name contains 'prime'", [src_prime, kind_const, name_prime]),
    ("constant type 'nat bool'", [src_prime, kind_const, name_prime, type_nat_bool]),
    ("select definition-like commands", [src_prime, kind_const, name_prime, type_nat_bool, cmd_defs]),
]

term = lambda v: {"type": "Term", "value": v}
requests = [
    [{"field": "SourceCode", "filter": term("prime")}],
    [{"field": "Kind", "filter": term("Constant")}],
    [{"field": "Name", "filter": term("prime")}],
    [{"field": "ConstantType", "filter": term("nat bool")}],
    [{"field": "Command", "filter": {"type": "Or", "filters": [term("definition"), term("inductive"),
                                                                 term("abbreviation")]}}],
]
facets = [["Kind"], ["Command", "NameFacet"], ["ConstantTypeFacet"], ["Command"], ["SourceTheoryFacet"]]

SEED = "primes:5"
SEED_ENTITY = "Primes.prime"

scenario = {"seededBlock": SEED, "seededEntity": SEED_ENTITY, "steps": [], "pivot": {"steps": []}}
clauses = []
for (name, preds), extra, fac in zip(steps, requests, facets):
    clauses = clauses + extra
    result = run(preds)
    scenario["steps"].append({
        "name": name,
        "request": {"clauses": clauses, "facetFields": fac, "offset": 0, "limit": 50},
        "expectedTotal": len(result),
        "expectedBlockIds": [bid for bid, _ in result],
    })
assert SEED in scenario["steps"][-1]["expectedBlockIds"]

uses_seed = ("entity", lambda e: SEED_ENTITY in e["uses"])
kind_fact = ("entity", lambda e: e["kind"] == "Fact")
cmd_lemma = ("block", lambda b: b["command"] in ("lemma", "theorem"))
pivot_filter = {"type": "InResult", "extractField": "ChildId",
                "subQuery": [{"field": "ChildId", "filter": term(SEED_ENTITY)}]}
pivot_steps = [
    ("used by the seeded definition", [{"field": "Uses", "filter": pivot_filter}], [uses_seed]),
    ("restrict to facts", [{"field": "Kind", "filter": term("Fact")}], [uses_seed, kind_fact]),
    ("theorem and lemma commands",
     [{"field": "Command", "filter": {"type": "Or", "filters": [term("lemma"), term("theorem")]}}],
     [uses_seed, kind_fact, cmd_lemma]),
]
clauses = []
for name, extra, preds in pivot_steps:
    clauses = clauses + extra
    result = run(preds)
    scenario["pivot"]["steps"].append({
        "name": name,
        "request": {"clauses": clauses, "facetFields": ["Kind", "Command"], "offset": 0, "limit": 50},
        "expectedTotal": len(result),
        "expectedBlockIds": [bid for bid, _ in result],
        "expectedMatchedEntityIds": sorted(e for _, es in result for e in es),
    })

(HERE / "prime_scenario.json").write_text(json.dumps(scenario, indent=2, ensure_ascii=False) + "\n",
                                          encoding="utf-8")

n_entities = sum(len(b["entities"]) for b in blocks)
assert len(blocks) == 40 and n_entities == 65, (len(blocks), n_entities)
print(f"{len(blocks)} blocks, {n_entities} entities")
for s in scenario["steps"] + scenario["pivot"]["steps"]:
    print(f"  {s['name']}: {s['expectedTotal']}")
