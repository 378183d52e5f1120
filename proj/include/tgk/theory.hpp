#pragma once

// Theories are finite sequences of declarations, well-formed when every
// declaration only uses symbols introduced before it.  This header carries
// the symbol context, sort checking and inference, the implicit universal
// closure, well-formedness checking, composition and join, and unfolding of
// defined symbols.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tgk/ast.hpp"
#include "tgk/diagnostics.hpp"

namespace tgk {

struct Theory {
    TheoryName name;
    std::vector<Declaration> decls;

    const Declaration* find(const std::string& decl_name) const {
        for (const auto& d : decls)
            if (d.name == decl_name) return &d;
        return nullptr;
    }
    bool declares(const std::string& n) const { return find(n) != nullptr; }

    std::vector<const Declaration*> symbols() const {
        std::vector<const Declaration*> out;
        for (const auto& d : decls)
            if (d.introduces_symbol()) out.push_back(&d);
        return out;
    }

    // glyph text -> symbol name, for the lexer and the printer
    std::map<std::string, SymbolName> glyphs() const {
        std::map<std::string, SymbolName> g;
        for (const auto& d : decls)
            if (d.introduces_symbol() && !d.glyph.empty()) g[d.glyph] = d.name;
        return g;
    }

    bool operator==(const Theory&) const = default;
};

// A theory is primitive when it only declares symbols and asserts axioms.
inline bool primitive(const Theory& t) {
    for (const auto& d : t.decls)
        if (d.kind == DeclKind::Definition || d.kind == DeclKind::Theorem) return false;
    return true;
}

inline bool is_prefix(const Theory& base, const Theory& ext) {
    if (base.decls.size() > ext.decls.size()) return false;
    for (size_t i = 0; i < base.decls.size(); ++i)
        if (!(base.decls[i] == ext.decls[i])) return false;
    return true;
}

inline std::vector<Declaration> suffix(const Theory& base, const Theory& ext) {
    return {ext.decls.begin() + static_cast<long>(base.decls.size()), ext.decls.end()};
}

// ---------------------------------------------------------------------------
// Symbol context: what is in scope at a point of a declaration sequence.

struct Context {
    std::map<SymbolName, SymbolSignature> table;
    std::vector<SortName> sorts;  // declaration order

    bool has(const std::string& n) const { return table.count(n) != 0; }
    const SymbolSignature* find(const std::string& n) const {
        auto it = table.find(n);
        return it == table.end() ? nullptr : &it->second;
    }
    bool has_sort(const SortName& s) const {
        auto* sig = find(s);
        return sig && sig->is_sort;
    }
    void add(const std::string& n, SymbolSignature sig) {
        if (sig.is_sort) sorts.push_back(n);
        table.emplace(n, std::move(sig));
    }

    static Context of(const Theory& t, size_t first_n = SIZE_MAX) {
        Context c;
        size_t n = std::min(first_n, t.decls.size());
        for (size_t i = 0; i < n; ++i)
            if (t.decls[i].introduces_symbol()) c.add(t.decls[i].name, t.decls[i].sig);
        return c;
    }
};

// ---------------------------------------------------------------------------
// Sort checking.  term_sort throws; check_formula records and keeps going so
// one pass reports everything wrong with a declaration.

inline SortName term_sort(const Context& c, const Term& t,
                          const std::map<std::string, SortName>& env) {
    if (t.is_var()) {
        auto it = env.find(t.head);
        if (it == env.end())
            throw Error("FreeVariable", "unbound variable '" + t.head + "'");
        return it->second;
    }
    const SymbolSignature* sig = c.find(t.head);
    if (!sig) throw Error("UnknownSymbol", "unknown symbol '" + t.head + "'");
    if (sig->is_sort)
        throw Error("SortMismatch", "sort '" + t.head + "' used as an operation");
    if (static_cast<int>(t.args.size()) != sig->arity())
        throw Error("ArityMismatch", "'" + t.head + "' expects " +
                                         std::to_string(sig->arity()) + " arguments, got " +
                                         std::to_string(t.args.size()));
    for (size_t i = 0; i < t.args.size(); ++i) {
        SortName got = term_sort(c, t.args[i], env);
        if (got != sig->args[i])
            throw Error("SortMismatch", "argument " + std::to_string(i + 1) + " of '" +
                                            t.head + "' has sort " + got + ", expected " +
                                            sig->args[i]);
    }
    return sig->result;
}

inline void check_formula(const Context& c, const Formula& f,
                          std::map<std::string, SortName> env, std::vector<Diag>& out,
                          const std::string& where) {
    switch (f.kind) {
        case Formula::Kind::Eq:
            try {
                SortName l = term_sort(c, f.lhs, env);
                SortName r = term_sort(c, f.rhs, env);
                if (l != r)
                    out.push_back({"SortMismatch",
                                   where + ": equation relates " + l + " and " + r});
            } catch (const Error& e) {
                out.push_back({e.code, where + ": " + e.what()});
            }
            break;
        case Formula::Kind::Forall:
        case Formula::Kind::Exists:
            if (!c.has_sort(f.var_sort))
                out.push_back({"UnknownSort",
                               where + ": binder '" + f.var + "' has unknown sort '" +
                                   f.var_sort + "'"});
            env[f.var] = f.var_sort;
            check_formula(c, f.kids.front(), env, out, where);
            break;
        default:
            for (const auto& k : f.kids) check_formula(c, k, env, out, where);
    }
}

// ---------------------------------------------------------------------------
// Sort inference and implicit universal closure.  Free variables are swept
// into a forall prefix in order of first occurrence; their sorts come from
// how they are used (argument positions, equations against known terms),
// with a single-sorted theory defaulting leftovers to its sort.

namespace detail {

inline std::optional<SortName> infer_term(const Context& c, const Term& t,
                                          std::map<std::string, SortName>& env,
                                          bool& changed) {
    if (t.is_var()) {
        auto it = env.find(t.head);
        if (it == env.end()) return std::nullopt;
        return it->second;
    }
    const SymbolSignature* sig = c.find(t.head);
    if (!sig || sig->is_sort) return std::nullopt;
    size_t n = std::min(t.args.size(), sig->args.size());
    for (size_t i = 0; i < n; ++i) {
        const Term& a = t.args[i];
        if (a.is_var() && !env.count(a.head)) {
            env[a.head] = sig->args[i];
            changed = true;
        } else {
            infer_term(c, a, env, changed);
        }
    }
    return sig->result;
}

inline void infer_formula(const Context& c, const Formula& f,
                          std::map<std::string, SortName>& env, bool& changed) {
    switch (f.kind) {
        case Formula::Kind::Eq: {
            auto l = infer_term(c, f.lhs, env, changed);
            auto r = infer_term(c, f.rhs, env, changed);
            if (l && !r && f.rhs.is_var() && !env.count(f.rhs.head)) {
                env[f.rhs.head] = *l;
                changed = true;
            }
            if (r && !l && f.lhs.is_var() && !env.count(f.lhs.head)) {
                env[f.lhs.head] = *r;
                changed = true;
            }
            break;
        }
        case Formula::Kind::Forall:
        case Formula::Kind::Exists:
            if (!f.var_sort.empty() && !env.count(f.var)) {
                env[f.var] = f.var_sort;
                changed = true;
            }
            infer_formula(c, f.kids.front(), env, changed);
            break;
        default:
            for (const auto& k : f.kids) infer_formula(c, k, env, changed);
    }
}

inline void annotate_binders(Formula& f, const std::map<std::string, SortName>& env) {
    if (f.is_quant() && f.var_sort.empty()) {
        auto it = env.find(f.var);
        if (it != env.end()) f.var_sort = it->second;
    }
    if (f.kind != Formula::Kind::Eq)
        for (auto& k : f.kids) annotate_binders(k, env);
}

}  // namespace detail

inline Formula close_formula(const Context& c, Formula f, std::vector<Diag>& diags,
                             const std::string& where) {
    std::map<std::string, SortName> env;
    for (bool changed = true; changed;) {
        changed = false;
        detail::infer_formula(c, f, env, changed);
    }
    std::vector<std::string> free = free_vars(f);
    auto sort_of = [&](const std::string& v) -> SortName {
        auto it = env.find(v);
        if (it != env.end()) return it->second;
        if (c.sorts.size() == 1) return c.sorts.front();
        diags.push_back({"CannotInferSort",
                         where + ": cannot infer a sort for variable '" + v + "'"});
        return c.sorts.empty() ? SortName("?") : c.sorts.front();
    };
    for (const auto& v : free)
        if (!env.count(v)) env[v] = sort_of(v);
    detail::annotate_binders(f, env);
    for (auto it = free.rbegin(); it != free.rend(); ++it)
        f = Formula::forall(*it, env[*it], std::move(f));
    check_formula(c, f, {}, diags, where);
    return f;
}

// ---------------------------------------------------------------------------
// Defining equations.  A definition's body, with its forall prefix stripped,
// must be an equation whose left side applies the new symbol to distinct
// variables; the right side may mention additional universally quantified
// variables (e.g. a constant defined as b/b for any b).

struct DefParts {
    std::vector<std::string> params;  // lhs argument variables, in order
    std::vector<std::string> extras;  // rhs-only universals
    Term rhs;
};

inline const Formula& strip_foralls(const Formula& f) {
    const Formula* p = &f;
    while (p->kind == Formula::Kind::Forall) p = &p->kids.front();
    return *p;
}

inline std::optional<DefParts> def_parts(const Declaration& d) {
    if (d.kind != DeclKind::Definition) return std::nullopt;
    const Formula& m = strip_foralls(d.body);
    if (m.kind != Formula::Kind::Eq) return std::nullopt;
    if (!(m.lhs.kind == Term::Kind::App && m.lhs.head == d.name)) return std::nullopt;
    DefParts p;
    std::set<std::string> seen;
    for (const auto& a : m.lhs.args) {
        if (!a.is_var() || seen.count(a.head)) return std::nullopt;
        seen.insert(a.head);
        p.params.push_back(a.head);
    }
    for (const auto& v : free_vars(m.rhs))
        if (!seen.count(v)) p.extras.push_back(v);
    p.rhs = m.rhs;
    return p;
}

// ---------------------------------------------------------------------------
// Unfolding defined symbols.  One pass replaces every application of a
// defined symbol by its definiens; definiens variables that are not lhs
// parameters come in as fresh universals, so the result is re-closed.
// Sound for equivalence because the defining axiom makes the definiendum
// equal to the definiens at every instance.

namespace detail {

struct Unfolder {
    const Theory& t;
    std::set<std::string> used;  // every name in the formula, to keep fresh vars fresh
    bool changed = false;

    Term term(const Term& x) {
        if (x.is_var()) return x;
        Term r = x;
        for (auto& a : r.args) a = term(a);
        const Declaration* d = t.find(r.head);
        if (!d || d->kind != DeclKind::Definition) return r;
        auto parts = def_parts(*d);
        if (!parts) return r;
        std::map<std::string, Term> sub;
        for (size_t i = 0; i < parts->params.size(); ++i) sub[parts->params[i]] = r.args[i];
        for (const auto& e : parts->extras) {
            std::string fresh = fresh_name(e, used);
            used.insert(fresh);
            sub[e] = Term::var(fresh);
        }
        changed = true;
        return subst(parts->rhs, sub);
    }

    Formula formula(const Formula& f) {
        if (f.kind == Formula::Kind::Eq) return Formula::eq(term(f.lhs), term(f.rhs));
        Formula r = f;
        for (auto& k : r.kids) k = formula(k);
        return r;
    }
};

}  // namespace detail

// Unfolds up to `depth` passes; the result is closed again after each pass.
inline Formula unfold(const Theory& t, Formula f, int depth) {
    Context c = Context::of(t);
    for (int i = 0; i < depth; ++i) {
        detail::Unfolder u{t, {}, false};
        all_var_names(f, u.used);
        Formula next = u.formula(f);
        if (!u.changed) break;
        // fresh definiens variables arrive free; re-close over them
        std::vector<Diag> scratch;
        f = close_formula(c, std::move(next), scratch, "unfold");
    }
    return f;
}

// ---------------------------------------------------------------------------
// Matching statements against recorded facts.  Strict alpha equivalence is
// too rigid across translations that visit variables in a different order,
// so discharge lookups also accept a permutation of the outer forall prefix.

inline bool alpha_eq_mod_prefix(const Formula& a, const Formula& b) {
    if (alpha_eq(a, b)) return true;
    std::vector<std::pair<std::string, SortName>> pa, pb;
    const Formula* ma = &a;
    while (ma->kind == Formula::Kind::Forall) {
        pa.emplace_back(ma->var, ma->var_sort);
        ma = &ma->kids.front();
    }
    const Formula* mb = &b;
    while (mb->kind == Formula::Kind::Forall) {
        pb.emplace_back(mb->var, mb->var_sort);
        mb = &mb->kids.front();
    }
    if (pa.size() != pb.size() || pa.size() > 6) return false;
    std::vector<size_t> perm(pb.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end());
    do {
        bool sorts_ok = true;
        std::map<std::string, int> la, lb;
        for (size_t i = 0; i < pa.size(); ++i) {
            if (pa[i].second != pb[perm[i]].second) {
                sorts_ok = false;
                break;
            }
            la[pa[i].first] = static_cast<int>(i);
            lb[pb[perm[i]].first] = static_cast<int>(i);
        }
        if (sorts_ok && detail::alpha_eq_rec(*ma, *mb, la, lb, static_cast<int>(pa.size())))
            return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

// True when the statement, with its forall prefix stripped, is t = t.
inline bool is_reflexive(const Formula& f) {
    const Formula& m = strip_foralls(f);
    return m.kind == Formula::Kind::Eq && m.lhs == m.rhs;
}

// ---------------------------------------------------------------------------
// Well-formedness: replay the declaration sequence, checking each entry
// against the context of what came before it.

struct WfReport {
    std::vector<Diag> problems;
    bool ok() const { return !has_errors(problems); }
};

inline WfReport check_wf(const Theory& t) {
    WfReport rep;
    Context c;
    std::set<std::string> names;
    for (const auto& d : t.decls) {
        std::string where = t.name.empty() ? d.name : t.name + "." + d.name;
        if (names.count(d.name)) {
            rep.problems.push_back({"DuplicateName", where + ": name already declared"});
            continue;
        }
        names.insert(d.name);
        if (d.introduces_symbol() && !d.sig.is_sort) {
            for (const auto& s : d.sig.args)
                if (!c.has_sort(s))
                    rep.problems.push_back({"UnknownSort", where + ": unknown sort '" + s + "'"});
            if (!c.has_sort(d.sig.result))
                rep.problems.push_back(
                    {"UnknownSort", where + ": unknown result sort '" + d.sig.result + "'"});
        }
        if (d.introduces_symbol()) c.add(d.name, d.sig);
        if (d.has_formula()) {
            if (!is_closed(d.body)) {
                rep.problems.push_back({"FreeVariable", where + ": statement has free variables"});
            } else {
                check_formula(c, d.body, {}, rep.problems, where);
            }
        }
        if (d.kind == DeclKind::Definition) {
            auto parts = def_parts(d);
            if (!parts) {
                rep.problems.push_back(
                    {"BadDefinition",
                     where + ": body must equate '" + d.name +
                         "' applied to distinct variables with a prior-symbol term"});
            } else {
                if (static_cast<int>(parts->params.size()) != d.sig.arity())
                    rep.problems.push_back(
                        {"ArityMismatch", where + ": definition arity differs from signature"});
                // the definiens must not mention the symbol being defined
                struct {
                    void operator()(const Term& x, const std::string& n, bool& hit) const {
                        if (!x.is_var() && x.head == n) hit = true;
                        for (const auto& a : x.args) (*this)(a, n, hit);
                    }
                } self_ref;
                bool hit = false;
                self_ref(parts->rhs, d.name, hit);
                if (hit)
                    rep.problems.push_back(
                        {"BadDefinition", where + ": definiens mentions the defined symbol"});
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Composition and join.

inline Theory theory_cons(const Theory& base, std::vector<Declaration> extra,
                          TheoryName new_name) {
    Theory t;
    t.name = std::move(new_name);
    t.decls = base.decls;
    for (auto& d : extra) t.decls.push_back(std::move(d));
    WfReport rep = check_wf(t);
    for (const auto& p : rep.problems)
        if (p.severity == Severity::Error) throw Error(p.code, p.message);
    return t;
}

struct JoinResult {
    Theory theory;
    std::vector<Diag> problems;
    bool ok() const { return !has_errors(problems); }
};

// Join over an explicit shared root.  Both theories must extend the root;
// name clashes between the two suffixes are reported per name (the first
// copy is kept so callers still get a usable best-effort theory).
inline JoinResult theory_join(const Theory& root, const Theory& t1, const Theory& t2,
                              TheoryName new_name) {
    JoinResult r;
    if (!is_prefix(root, t1) || !is_prefix(root, t2)) {
        r.problems.push_back({"NotAnExtension",
                              "join root '" + root.name + "' is not a prefix of both theories"});
        return r;
    }
    if (root.decls.empty() && !t1.decls.empty() && !t2.decls.empty()) {
        r.problems.push_back({"NoCommonPrefix", "theories '" + t1.name + "' and '" + t2.name +
                                                    "' share no common prefix"});
        return r;
    }
    std::vector<Declaration> a1 = suffix(root, t1);
    std::vector<Declaration> a2 = suffix(root, t2);
    std::set<std::string> names1;
    for (const auto& d : a1) names1.insert(d.name);
    r.theory.name = std::move(new_name);
    r.theory.decls = root.decls;
    for (auto& d : a1) r.theory.decls.push_back(std::move(d));
    for (auto& d : a2) {
        if (names1.count(d.name)) {
            r.problems.push_back({"NonDisjoint", "both suffixes declare '" + d.name + "'"});
            continue;
        }
        r.theory.decls.push_back(std::move(d));
    }
    if (r.ok()) {
        WfReport wf = check_wf(r.theory);
        for (auto& p : wf.problems) r.problems.push_back(std::move(p));
    }
    return r;
}

}  // namespace tgk
