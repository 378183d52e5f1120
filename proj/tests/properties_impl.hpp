// Randomized invariant checks shared by the Catch2 property binary and the
// acceptance runner.  Each function runs at least a thousand cases against a
// fixed seed and reports how many were tried and how many broke.

#pragma once

#include <tgk/workspace.hpp>

#include <random>
#include <sstream>
#include <string>

namespace props {

struct Result {
    std::string name;
    long cases = 0;
    long failures = 0;
    std::string note;  // first failure, for the report

    bool ok(long min_cases = 1000) const { return failures == 0 && cases >= min_cases; }
    std::string summary() const {
        std::ostringstream s;
        s << name << ": " << cases << " cases, " << failures << " failures";
        if (!note.empty()) s << " (" << note << ")";
        return s.str();
    }
};

namespace detail {

// G-sorted terms over the fixed scaffold {op f : G -> G, op c : G}.
inline tgk::Term scaffold_term(std::mt19937& rng, int depth, const std::string& var) {
    switch (rng() % (depth > 0 ? 3 : 2)) {
        case 0: return tgk::Term::var(var);
        case 1: return tgk::Term::app("c");
        default: return tgk::Term::app("f", {scaffold_term(rng, depth - 1, var)});
    }
}

// A random well-formed declaration over the scaffold; names stay unique via
// the caller's counter.
inline tgk::Declaration scaffold_decl(std::mt19937& rng, int& counter) {
    int k = counter++;
    if (rng() % 10 < 6) {
        int arity = static_cast<int>(rng() % 3);
        return tgk::Declaration::op(
            "op" + std::to_string(k),
            tgk::SymbolSignature::op(std::vector<tgk::SortName>(static_cast<size_t>(arity), "G"),
                                     "G"));
    }
    tgk::Formula body = tgk::Formula::forall(
        "x", "G",
        tgk::Formula::eq(scaffold_term(rng, 2, "x"), scaffold_term(rng, 2, "x")));
    return tgk::Declaration::axiom("ax" + std::to_string(k), body);
}

inline tgk::Theory scaffold_base() {
    tgk::Theory t;
    t.name = "t0";
    t.decls.push_back(tgk::Declaration::sort("G"));
    t.decls.push_back(tgk::Declaration::op("f", tgk::SymbolSignature::op({"G"}, "G")));
    t.decls.push_back(tgk::Declaration::op("c", tgk::SymbolSignature::constant("G")));
    return t;
}

// Independent acyclicity oracle: Kahn's algorithm over the extension edges.
inline bool kahn_sorts(const tgk::TheoryGraph& g) {
    std::map<tgk::TheoryName, int> indeg;
    for (const auto& [n, t] : g.theories) {
        (void)t;
        indeg[n] = 0;
    }
    for (const auto& e : g.edges) ++indeg[e.ext];
    std::vector<tgk::TheoryName> ready;
    for (const auto& [n, d] : indeg)
        if (d == 0) ready.push_back(n);
    size_t seen = 0;
    while (!ready.empty()) {
        tgk::TheoryName n = ready.back();
        ready.pop_back();
        ++seen;
        for (const auto* e : g.edges_from(n))
            if (--indeg[e->ext] == 0) ready.push_back(e->ext);
    }
    return seen == g.theories.size();
}

// Random group1 term with a cap on the number of applications, so that the
// universally closed translations stay inside the binder-permutation limit.
inline tgk::Term group1_term(std::mt19937& rng, int& app_budget,
                             const std::vector<std::string>& vars) {
    if (app_budget <= 0 || rng() % 3 == 0) return tgk::Term::var(vars[rng() % vars.size()]);
    --app_budget;
    switch (rng() % 3) {
        case 0: return tgk::Term::app("e");
        case 1: return tgk::Term::app("i", {group1_term(rng, app_budget, vars)});
        default: {
            tgk::Term l = group1_term(rng, app_budget, vars);
            tgk::Term r = group1_term(rng, app_budget, vars);
            return tgk::Term::app("circ", {std::move(l), std::move(r)});
        }
    }
}

inline tgk::Workspace load_corpus(const std::string& source_dir, bool with_extras) {
    tgk::Workspace ws;
    if (!ws.load_file(source_dir + "/corpus/groups.thy"))
        throw tgk::Error("CorpusBroken", "groups.thy did not load cleanly");
    if (with_extras && !ws.load_file(source_dir + "/corpus/groups_x.thy"))
        throw tgk::Error("CorpusBroken", "groups_x.thy did not load cleanly");
    return ws;
}

}  // namespace detail

// Random extension DAGs stay acyclic: every legitimate prefix edge inserts
// cleanly, a deliberate back edge is refused, and an independent topological
// sort succeeds after every insertion.
inline Result acyclicity(unsigned seed = 101) {
    Result res{"acyclicity under random edge insertions"};
    for (int round = 0; round < 1000; ++round) {
        std::mt19937 rng(seed + static_cast<unsigned>(round));
        tgk::TheoryGraph g;
        tgk::add_theory(g, detail::scaffold_base());
        std::vector<tgk::TheoryName> names{"t0"};
        int counter = 0;
        ++res.cases;
        try {
            int steps = 2 + static_cast<int>(rng() % 6);
            for (int s = 0; s < steps; ++s) {
                const tgk::TheoryName& parent = names[rng() % names.size()];
                tgk::TheoryName child = "t" + std::to_string(names.size());
                tgk::add_theory(g, tgk::theory_cons(g.theory(parent),
                                                    {detail::scaffold_decl(rng, counter)}, child));
                tgk::add_extension_edge(g, parent, child);
                names.push_back(child);
                if (!detail::kahn_sorts(g)) throw tgk::Error("CycleOracle", "Kahn found a cycle");
            }
            // extra transitive edges between prefix-related pairs are fine
            for (int k = 0; k < 4; ++k) {
                const tgk::TheoryName& a = names[rng() % names.size()];
                const tgk::TheoryName& b = names[rng() % names.size()];
                if (a == b || !tgk::is_prefix(g.theory(a), g.theory(b))) continue;
                tgk::add_extension_edge(g, a, b);
                if (!detail::kahn_sorts(g)) throw tgk::Error("CycleOracle", "Kahn found a cycle");
            }
            // a theory with the same declaration list is prefix both ways;
            // the second edge direction must be refused
            const tgk::TheoryName& twin_of = names[rng() % names.size()];
            tgk::Theory dup = g.theory(twin_of);
            dup.name = "twin";
            tgk::add_theory(g, dup);
            tgk::add_extension_edge(g, twin_of, "twin");
            bool refused = false;
            try {
                tgk::add_extension_edge(g, "twin", twin_of);
            } catch (const tgk::Error& e) {
                refused = e.code == "WouldCreateCycle";
            }
            if (!refused) throw tgk::Error("CycleAccepted", "back edge onto '" + twin_of + "'");
            if (!detail::kahn_sorts(g)) throw tgk::Error("CycleOracle", "Kahn found a cycle");
        } catch (const tgk::Error& e) {
            ++res.failures;
            if (res.note.empty())
                res.note = "round " + std::to_string(round) + ": " + e.what();
        }
    }
    return res;
}

// Appending declarations never disturbs the base: the base stays a literal
// prefix and the suffix reads back exactly what was appended.
inline Result prefix_stability(unsigned seed = 202) {
    Result res{"extension keeps the base as a literal prefix"};
    for (int round = 0; round < 1000; ++round) {
        std::mt19937 rng(seed + static_cast<unsigned>(round));
        ++res.cases;
        int counter = 0;
        auto fail = [&](const std::string& why) {
            ++res.failures;
            if (res.note.empty()) res.note = "round " + std::to_string(round) + ": " + why;
        };
        try {
            std::vector<tgk::Declaration> pre;
            for (unsigned k = rng() % 4; k > 0; --k)
                pre.push_back(detail::scaffold_decl(rng, counter));
            tgk::Theory base = tgk::theory_cons(detail::scaffold_base(), pre, "base");
            std::vector<tgk::Declaration> extra;
            for (unsigned k = 1 + rng() % 4; k > 0; --k)
                extra.push_back(detail::scaffold_decl(rng, counter));
            tgk::Theory ext = tgk::theory_cons(base, extra, "ext");
            if (!tgk::is_prefix(base, ext)) fail("base lost prefix status");
            else if (tgk::is_prefix(ext, base)) fail("proper extension counted as prefix");
            else if (!tgk::is_prefix(ext, ext)) fail("prefix not reflexive");
            else if (tgk::suffix(base, ext) != extra) fail("suffix does not read back the appends");
        } catch (const tgk::Error& e) {
            fail(e.what());
        }
    }
    return res;
}

// Translation along a symbol-to-symbol view is a homomorphism: it maps
// application nodes head-wise and commutes with substitution.
inline Result translate_homomorphism(const std::string& source_dir, unsigned seed = 303) {
    Result res{"translation commutes with substitution"};
    tgk::Workspace ws = detail::load_corpus(source_dir, false);
    tgk::TheoryGraph& g = ws.g;
    const tgk::View& v1 = g.view("v1");
    const std::vector<std::string> vars{"a", "b", "c"};
    for (int round = 0; round < 1000; ++round) {
        std::mt19937 rng(seed + static_cast<unsigned>(round));
        ++res.cases;
        auto fail = [&](const std::string& why) {
            ++res.failures;
            if (res.note.empty()) res.note = "round " + std::to_string(round) + ": " + why;
        };
        int budget = 6;
        tgk::Term t = detail::group1_term(rng, budget, vars);
        std::map<std::string, tgk::Term> sub;
        for (const auto& x : vars) {
            int b2 = 2;
            sub[x] = detail::group1_term(rng, b2, vars);
        }
        tgk::Term lhs = tgk::translate_term(g, v1, tgk::subst(t, sub));
        std::map<std::string, tgk::Term> tsub;
        for (const auto& [x, tm] : sub) tsub[x] = tgk::translate_term(g, v1, tm);
        tgk::Term rhs = tgk::subst(tgk::translate_term(g, v1, t), tsub);
        if (!(lhs == rhs)) fail("substitute-then-translate differs from translate-then-substitute");

        // head-wise action on one application layer
        tgk::Term app = tgk::Term::app("circ", {t, tgk::Term::var("a")});
        tgk::Term tr = tgk::translate_term(g, v1, app);
        if (tr.is_var() || tr.head != "circ_slash" || tr.args.size() != 2 ||
            !(tr.args[0] == tgk::translate_term(g, v1, t)))
            fail("application node did not translate head-wise");
    }
    return res;
}

// Composing views is associative and has inclusion identities, observed
// through whole-formula translation.
inline Result composition_laws(const std::string& source_dir, unsigned seed = 404) {
    Result res{"view composition is associative with identities"};
    tgk::Workspace ws = detail::load_corpus(source_dir, true);
    tgk::TheoryGraph& g = ws.g;
    const tgk::View& f = g.view("v1");        // group1 -> circ_i2_top
    const tgk::View& m = g.view("unslash");   // circ_i2_top -> slash1_top
    const tgk::View& h = g.view("vt");        // slash1_top -> circ_i2_top
    tgk::View fm = tgk::compose_views(g, f, m, "assoc_fm");
    tgk::View left = tgk::compose_views(g, fm, h, "assoc_left");
    tgk::View mh = tgk::compose_views(g, m, h, "assoc_mh");
    tgk::View right = tgk::compose_views(g, f, mh, "assoc_right");
    tgk::View& id_src = tgk::inclusion_view(g, "group1", "group1");
    tgk::View& id_tgt = tgk::inclusion_view(g, "circ_i2_top", "circ_i2_top");
    tgk::View lunit = tgk::compose_views(g, id_src, f, "assoc_lunit");
    tgk::View runit = tgk::compose_views(g, f, id_tgt, "assoc_runit");

    const std::vector<std::string> vars{"a", "b"};
    for (int round = 0; round < 1000; ++round) {
        std::mt19937 rng(seed + static_cast<unsigned>(round));
        ++res.cases;
        auto fail = [&](const std::string& why) {
            ++res.failures;
            if (res.note.empty()) res.note = "round " + std::to_string(round) + ": " + why;
        };
        // both sides capped so translated closures stay within the
        // binder-permutation limit of alpha_eq_mod_prefix
        int bl = 2, br = 2;
        tgk::Formula body = tgk::Formula::eq(detail::group1_term(rng, bl, vars),
                                             detail::group1_term(rng, br, vars));
        tgk::Formula phi = tgk::Formula::forall(
            "a", "G", tgk::Formula::forall("b", "G", std::move(body)));
        tgk::Formula via_left = tgk::translate_formula(g, left, phi);
        tgk::Formula via_right = tgk::translate_formula(g, right, phi);
        if (!tgk::alpha_eq_mod_prefix(via_left, via_right))
            fail("the two association orders translate differently");
        tgk::Formula plain = tgk::translate_formula(g, f, phi);
        if (!tgk::alpha_eq_mod_prefix(tgk::translate_formula(g, lunit, phi), plain))
            fail("left identity changed the translation");
        if (!tgk::alpha_eq_mod_prefix(tgk::translate_formula(g, runit, phi), plain))
            fail("right identity changed the translation");
    }
    return res;
}

// Every non-empty subset of a valid realm's pillars is again a valid realm:
// the face, interfaces and equivalence views restrict without repair work.
inline Result pillar_subsets(const std::string& source_dir) {
    Result res{"pillar subsets of a valid realm stay valid"};
    tgk::Workspace ws = detail::load_corpus(source_dir, false);
    tgk::TheoryGraph& g = ws.g;
    tgk::inclusion_view(g, "group1", "group1");
    tgk::inclusion_view(g, "group2", "group2");

    tgk::Realm big;
    big.name = "Big";
    big.face = "group";
    for (int i = 0; i < 10; ++i) {
        bool division = i % 2 != 0;
        big.pillars.push_back({"p" + std::to_string(i), division ? "group2" : "group1",
                               division ? "circ_i2_top" : "slash1_top",
                               division ? "I2" : "I1"});
    }
    big.equivs = {"v1", "v2", "incl__group1__group1", "incl__group2__group2"};
    if (!tgk::validate_realm(g, big).ok()) {
        res.cases = 1;
        res.failures = 1;
        res.note = "the ten-pillar realm itself failed validation";
        return res;
    }

    for (unsigned mask = 1; mask < (1u << 10); ++mask) {
        ++res.cases;
        tgk::Realm sub;
        sub.name = "Sub" + std::to_string(mask);
        sub.face = big.face;
        sub.equivs = big.equivs;
        for (int i = 0; i < 10; ++i)
            if (mask & (1u << i)) sub.pillars.push_back(big.pillars[static_cast<size_t>(i)]);
        tgk::RealmReport rep = tgk::validate_realm(g, sub);
        if (!rep.ok()) {
            ++res.failures;
            if (res.note.empty())
                res.note = "subset mask " + std::to_string(mask) + ": " +
                           rep.failures().front().code;
        }
    }
    return res;
}

inline std::vector<Result> run_all(const std::string& source_dir) {
    return {acyclicity(), prefix_stability(), translate_homomorphism(source_dir),
            composition_laws(source_dir), pillar_subsets(source_dir)};
}

}  // namespace props
