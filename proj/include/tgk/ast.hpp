#pragma once

// Terms, formulas and declarations of many-sorted first-order logic with
// equality.  Everything is a plain value; structural equality is operator==,
// equality up to bound-variable renaming is alpha_eq.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tgk/diagnostics.hpp"

namespace tgk {

using SortName = std::string;
using SymbolName = std::string;
using TheoryName = std::string;
using ViewName = std::string;
using RealmName = std::string;

// Signature of a declared symbol.  A sort declaration is a symbol too (it
// must be mapped by views), flagged by is_sort; ops carry argument sorts
// (empty for constants) and a result sort.
struct SymbolSignature {
    bool is_sort = false;
    std::vector<SortName> args;
    SortName result;

    static SymbolSignature sort() { return {true, {}, {}}; }
    static SymbolSignature op(std::vector<SortName> args, SortName result) {
        return {false, std::move(args), std::move(result)};
    }
    static SymbolSignature constant(SortName s) { return op({}, std::move(s)); }

    int arity() const { return static_cast<int>(args.size()); }
    bool operator==(const SymbolSignature&) const = default;
};

struct Term {
    enum class Kind { Var, App };
    Kind kind = Kind::Var;
    std::string head;        // variable name, or applied symbol name
    std::vector<Term> args;  // App only; empty for constants

    static Term var(std::string n) { return {Kind::Var, std::move(n), {}}; }
    static Term app(std::string f, std::vector<Term> as = {}) {
        return {Kind::App, std::move(f), std::move(as)};
    }
    bool is_var() const { return kind == Kind::Var; }
    bool operator==(const Term&) const = default;
};

struct Formula {
    enum class Kind { Eq, Not, And, Or, Implies, Forall, Exists };
    Kind kind = Kind::Eq;
    Term lhs, rhs;              // Eq
    std::vector<Formula> kids;  // Not: 1; And/Or/Implies: 2; quantifiers: body
    std::string var;            // quantifiers
    SortName var_sort;

    static Formula eq(Term l, Term r) {
        Formula f;
        f.kind = Kind::Eq;
        f.lhs = std::move(l);
        f.rhs = std::move(r);
        return f;
    }
    static Formula neg(Formula a) {
        Formula f;
        f.kind = Kind::Not;
        f.kids.push_back(std::move(a));
        return f;
    }
    static Formula binary(Kind k, Formula a, Formula b) {
        Formula f;
        f.kind = k;
        f.kids.push_back(std::move(a));
        f.kids.push_back(std::move(b));
        return f;
    }
    static Formula conj(Formula a, Formula b) { return binary(Kind::And, std::move(a), std::move(b)); }
    static Formula disj(Formula a, Formula b) { return binary(Kind::Or, std::move(a), std::move(b)); }
    static Formula implies(Formula a, Formula b) { return binary(Kind::Implies, std::move(a), std::move(b)); }
    static Formula quant(Kind k, std::string v, SortName s, Formula body) {
        Formula f;
        f.kind = k;
        f.var = std::move(v);
        f.var_sort = std::move(s);
        f.kids.push_back(std::move(body));
        return f;
    }
    static Formula forall(std::string v, SortName s, Formula body) {
        return quant(Kind::Forall, std::move(v), std::move(s), std::move(body));
    }
    static Formula exists(std::string v, SortName s, Formula body) {
        return quant(Kind::Exists, std::move(v), std::move(s), std::move(body));
    }

    bool is_quant() const { return kind == Kind::Forall || kind == Kind::Exists; }
    const Formula& body() const { return kids.front(); }
    bool operator==(const Formula&) const = default;
};

// ---------------------------------------------------------------------------
// Free variables (insertion order = first occurrence, which fixes the binder
// order of the implicit universal closure).

inline void free_vars(const Term& t, const std::set<std::string>& bound,
                      std::vector<std::string>& out) {
    if (t.is_var()) {
        if (!bound.count(t.head) &&
            std::find(out.begin(), out.end(), t.head) == out.end())
            out.push_back(t.head);
        return;
    }
    for (const auto& a : t.args) free_vars(a, bound, out);
}

inline void free_vars(const Formula& f, std::set<std::string> bound,
                      std::vector<std::string>& out) {
    switch (f.kind) {
        case Formula::Kind::Eq:
            free_vars(f.lhs, bound, out);
            free_vars(f.rhs, bound, out);
            break;
        case Formula::Kind::Forall:
        case Formula::Kind::Exists:
            bound.insert(f.var);
            free_vars(f.kids.front(), bound, out);
            break;
        default:
            for (const auto& k : f.kids) free_vars(k, bound, out);
    }
}

inline std::vector<std::string> free_vars(const Formula& f) {
    std::vector<std::string> out;
    free_vars(f, {}, out);
    return out;
}

inline std::vector<std::string> free_vars(const Term& t) {
    std::vector<std::string> out;
    free_vars(t, {}, out);
    return out;
}

inline bool is_closed(const Formula& f) { return free_vars(f).empty(); }

// All variable names occurring anywhere (free or bound); used to pick fresh
// names that cannot capture.
inline void all_var_names(const Term& t, std::set<std::string>& out) {
    if (t.is_var()) {
        out.insert(t.head);
        return;
    }
    for (const auto& a : t.args) all_var_names(a, out);
}

inline void all_var_names(const Formula& f, std::set<std::string>& out) {
    if (f.kind == Formula::Kind::Eq) {
        all_var_names(f.lhs, out);
        all_var_names(f.rhs, out);
        return;
    }
    if (f.is_quant()) out.insert(f.var);
    for (const auto& k : f.kids) all_var_names(k, out);
}

inline std::string fresh_name(const std::string& base, const std::set<std::string>& used) {
    if (!used.count(base)) return base;
    for (int i = 1;; ++i) {
        std::string cand = base + "_" + std::to_string(i);
        if (!used.count(cand)) return cand;
    }
}

// ---------------------------------------------------------------------------
// Substitution of terms for free variables, capture-avoiding.

inline Term subst(const Term& t, const std::map<std::string, Term>& sub) {
    if (t.is_var()) {
        auto it = sub.find(t.head);
        return it == sub.end() ? t : it->second;
    }
    Term r = t;
    for (auto& a : r.args) a = subst(a, sub);
    return r;
}

inline Formula subst(const Formula& f, std::map<std::string, Term> sub) {
    switch (f.kind) {
        case Formula::Kind::Eq:
            return Formula::eq(subst(f.lhs, sub), subst(f.rhs, sub));
        case Formula::Kind::Forall:
        case Formula::Kind::Exists: {
            sub.erase(f.var);  // binder shadows
            // Rename the binder if any replacement would capture it.
            std::set<std::string> incoming;
            for (const auto& [v, t] : sub) {
                (void)v;
                all_var_names(t, incoming);
            }
            Formula body = f.kids.front();
            std::string var = f.var;
            if (incoming.count(var)) {
                std::set<std::string> used = incoming;
                all_var_names(body, used);
                std::string nv = fresh_name(var, used);
                std::map<std::string, Term> rn{{var, Term::var(nv)}};
                body = subst(body, rn);
                var = nv;
            }
            return Formula::quant(f.kind, var, f.var_sort, subst(body, sub));
        }
        default: {
            Formula r = f;
            for (auto& k : r.kids) k = subst(k, sub);
            return r;
        }
    }
}

// ---------------------------------------------------------------------------
// Alpha equivalence: identical up to consistent renaming of bound variables.
// Free variables must match by name.

namespace detail {

inline bool alpha_eq_term(const Term& a, const Term& b,
                          const std::map<std::string, int>& la,
                          const std::map<std::string, int>& lb) {
    if (a.kind != b.kind) return false;
    if (a.is_var()) {
        auto ia = la.find(a.head);
        auto ib = lb.find(b.head);
        if ((ia == la.end()) != (ib == lb.end())) return false;
        if (ia == la.end()) return a.head == b.head;  // both free
        return ia->second == ib->second;
    }
    if (a.head != b.head || a.args.size() != b.args.size()) return false;
    for (size_t i = 0; i < a.args.size(); ++i)
        if (!alpha_eq_term(a.args[i], b.args[i], la, lb)) return false;
    return true;
}

inline bool alpha_eq_rec(const Formula& a, const Formula& b,
                         std::map<std::string, int> la,
                         std::map<std::string, int> lb, int depth) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Formula::Kind::Eq:
            return alpha_eq_term(a.lhs, b.lhs, la, lb) &&
                   alpha_eq_term(a.rhs, b.rhs, la, lb);
        case Formula::Kind::Forall:
        case Formula::Kind::Exists:
            if (a.var_sort != b.var_sort) return false;
            la[a.var] = depth;
            lb[b.var] = depth;
            return alpha_eq_rec(a.kids.front(), b.kids.front(), std::move(la),
                                std::move(lb), depth + 1);
        default:
            if (a.kids.size() != b.kids.size()) return false;
            for (size_t i = 0; i < a.kids.size(); ++i)
                if (!alpha_eq_rec(a.kids[i], b.kids[i], la, lb, depth)) return false;
            return true;
    }
}

}  // namespace detail

inline bool alpha_eq(const Formula& a, const Formula& b) {
    return detail::alpha_eq_rec(a, b, {}, {}, 0);
}

// ---------------------------------------------------------------------------
// Declarations.

enum class DeclKind { Symbol, Axiom, Definition, Theorem };

struct Justification {
    enum class Kind { None, Citation, Assumption, FiniteCheck };
    Kind kind = Kind::None;
    std::string text;  // citation text
    int max_size = 0;  // FiniteCheck bound

    static Justification citation(std::string t) { return {Kind::Citation, std::move(t), 0}; }
    static Justification assumption() { return {Kind::Assumption, {}, 0}; }
    static Justification finite_check(int n) { return {Kind::FiniteCheck, {}, n}; }
    bool operator==(const Justification&) const = default;
};

struct Declaration {
    DeclKind kind = DeclKind::Symbol;
    std::string name;      // decl name; for Symbol/Definition it names the symbol
    SymbolSignature sig;   // Symbol, Definition
    std::string glyph;     // optional infix notation for binary ops
    Formula body;          // Axiom/Theorem statement; Definition's defining equation (closed)
    Justification just;    // Theorem only

    static Declaration sort(std::string name) {
        Declaration d;
        d.kind = DeclKind::Symbol;
        d.name = std::move(name);
        d.sig = SymbolSignature::sort();
        return d;
    }
    static Declaration op(std::string name, SymbolSignature sig, std::string glyph = {}) {
        Declaration d;
        d.kind = DeclKind::Symbol;
        d.name = std::move(name);
        d.sig = std::move(sig);
        d.glyph = std::move(glyph);
        return d;
    }
    static Declaration axiom(std::string name, Formula f) {
        Declaration d;
        d.kind = DeclKind::Axiom;
        d.name = std::move(name);
        d.body = std::move(f);
        return d;
    }
    static Declaration definition(std::string name, SymbolSignature sig, Formula eq,
                                  std::string glyph = {}) {
        Declaration d;
        d.kind = DeclKind::Definition;
        d.name = std::move(name);
        d.sig = std::move(sig);
        d.body = std::move(eq);
        d.glyph = std::move(glyph);
        return d;
    }
    static Declaration theorem(std::string name, Formula f, Justification j) {
        Declaration d;
        d.kind = DeclKind::Theorem;
        d.name = std::move(name);
        d.body = std::move(f);
        d.just = std::move(j);
        return d;
    }

    bool introduces_symbol() const {
        return kind == DeclKind::Symbol || kind == DeclKind::Definition;
    }
    bool has_formula() const { return kind != DeclKind::Symbol; }
    bool operator==(const Declaration&) const = default;
};

inline const char* decl_kind_name(DeclKind k) {
    switch (k) {
        case DeclKind::Symbol: return "symbol";
        case DeclKind::Axiom: return "axiom";
        case DeclKind::Definition: return "definition";
        case DeclKind::Theorem: return "theorem";
    }
    return "?";
}

}  // namespace tgk
