#pragma once

// Rendering terms, formulas and theories back to source.  Printed theories
// re-parse to structurally equal values: quantifier prefixes are printed
// explicitly so the implicit-closure pass has nothing left to do.

#include <map>
#include <string>

#include "tgk/theory.hpp"

namespace tgk {

// symbol name -> glyph (inverse of Theory::glyphs)
inline std::map<SymbolName, std::string> infix_table(const Theory& t) {
    std::map<SymbolName, std::string> out;
    for (const auto& d : t.decls)
        if (d.introduces_symbol() && !d.glyph.empty()) out[d.name] = d.glyph;
    return out;
}

namespace detail {

inline bool renders_infix(const Term& t, const std::map<SymbolName, std::string>& infix) {
    return t.kind == Term::Kind::App && t.args.size() == 2 && infix.count(t.head);
}

inline std::string show_term_rec(const Term& t, const std::map<SymbolName, std::string>& infix) {
    if (t.is_var()) return t.head;
    if (renders_infix(t, infix)) {
        auto wrap = [&](const Term& a) {
            std::string s = show_term_rec(a, infix);
            return renders_infix(a, infix) ? "(" + s + ")" : s;
        };
        return wrap(t.args[0]) + " " + infix.at(t.head) + " " + wrap(t.args[1]);
    }
    if (t.args.empty()) return t.head;
    std::string s = t.head + "(";
    for (size_t i = 0; i < t.args.size(); ++i) {
        if (i) s += ", ";
        s += show_term_rec(t.args[i], infix);
    }
    return s + ")";
}

// precedence: implies 1 < or 2 < and 3 < not 4; atoms bind tightest
inline std::string show_formula_rec(const Formula& f,
                                    const std::map<SymbolName, std::string>& infix,
                                    int parent) {
    auto paren = [&](int mine, std::string s) { return mine < parent ? "(" + s + ")" : s; };
    switch (f.kind) {
        case Formula::Kind::Eq:
            return show_term_rec(f.lhs, infix) + " = " + show_term_rec(f.rhs, infix);
        case Formula::Kind::Not:
            return "not " + show_formula_rec(f.kids[0], infix, 4);
        case Formula::Kind::And:
            return paren(3, show_formula_rec(f.kids[0], infix, 3) + " and " +
                                show_formula_rec(f.kids[1], infix, 4));
        case Formula::Kind::Or:
            return paren(2, show_formula_rec(f.kids[0], infix, 2) + " or " +
                                show_formula_rec(f.kids[1], infix, 3));
        case Formula::Kind::Implies:
            return paren(1, show_formula_rec(f.kids[0], infix, 2) + " implies " +
                                show_formula_rec(f.kids[1], infix, 1));
        case Formula::Kind::Forall:
        case Formula::Kind::Exists:
            return paren(1, std::string(f.kind == Formula::Kind::Forall ? "forall " : "exists ") +
                                f.var + " : " + f.var_sort + " . " +
                                show_formula_rec(f.kids[0], infix, 1));
    }
    return "?";
}

}  // namespace detail

inline std::string show_term(const Term& t, const std::map<SymbolName, std::string>& infix = {}) {
    return detail::show_term_rec(t, infix);
}

inline std::string show_formula(const Formula& f,
                                const std::map<SymbolName, std::string>& infix = {}) {
    return detail::show_formula_rec(f, infix, 0);
}

inline std::string show_term(const Theory& t, const Term& x) {
    return show_term(x, infix_table(t));
}
inline std::string show_formula(const Theory& t, const Formula& f) {
    return show_formula(f, infix_table(t));
}

inline std::string show_signature(const SymbolSignature& sig) {
    if (sig.is_sort) return "sort";
    std::string s;
    for (const auto& a : sig.args) s += a + " ";
    if (!sig.args.empty()) s += "-> ";
    return s + sig.result;
}

inline std::string show_declaration(const Declaration& d,
                                    const std::map<SymbolName, std::string>& infix) {
    auto infix_clause = [&] { return d.glyph.empty() ? "" : " infix \"" + d.glyph + "\""; };
    switch (d.kind) {
        case DeclKind::Symbol:
            if (d.sig.is_sort) return "sort " + d.name + ";";
            return "op " + d.name + " : " + show_signature(d.sig) + infix_clause() + ";";
        case DeclKind::Axiom:
            return "axiom " + d.name + ": " + detail::show_formula_rec(d.body, infix, 0) + ";";
        case DeclKind::Definition:
            return "def " + d.name + " : " + show_signature(d.sig) + infix_clause() + " where " +
                   detail::show_formula_rec(d.body, infix, 0) + ";";
        case DeclKind::Theorem: {
            std::string just;
            switch (d.just.kind) {
                case Justification::Kind::Citation: just = "citation \"" + d.just.text + "\""; break;
                case Justification::Kind::FiniteCheck:
                    just = "finite-check " + std::to_string(d.just.max_size);
                    break;
                default: just = "assumption";
            }
            return "theorem " + d.name + ": " + detail::show_formula_rec(d.body, infix, 0) +
                   " by " + just + ";";
        }
    }
    return ";";
}

// Whole presentation; `skip` many leading declarations can be suppressed to
// print an extension block (the workspace's exporter uses that).
inline std::string to_source(const Theory& t, size_t skip = 0, const std::string& header = {}) {
    std::map<SymbolName, std::string> infix = infix_table(t);
    std::string s = header.empty() ? "theory " + t.name + " {\n" : header;
    for (size_t i = skip; i < t.decls.size(); ++i)
        s += "  " + show_declaration(t.decls[i], infix) + "\n";
    return s + "}\n";
}

}  // namespace tgk
