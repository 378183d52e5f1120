#pragma once

// Lexer and recursive-descent parser for the theory source format:
//
//   theory group1 {
//     sort G;
//     op circ : G G -> G infix "∘";
//     axiom assoc: (a ∘ b) ∘ c = a ∘ (b ∘ c);   // free vars close universally
//   }
//
// Identifiers are ASCII ([A-Za-z_][A-Za-z0-9_'-]*, hyphen only when followed
// by an alphanumeric so "->" still lexes as an arrow).  Anything else
// printable that is not reserved punctuation lexes as an operator run and is
// resolved against the current theory's registered infix glyphs; glyphs may
// therefore not contain = | - > " or reserved punctuation, and "//" always
// starts a comment.  Infix application is left-associative; parenthesize
// anything you want grouped differently.

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tgk/theory.hpp"

namespace tgk {

struct Token {
    enum class Kind { Ident, Number, String, SymRun, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    SourcePos pos;
};

namespace detail {

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}
inline bool reserved_punct(char c) {
    switch (c) {
        case '{': case '}': case '(': case ')': case ';': case ':':
        case ',': case '.': case '*': case '=': case '"': case '|':
        case '-': case '>':
            return true;
        default:
            return false;
    }
}
inline bool op_char(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u >= 0x80) return true;  // UTF-8 continuation/lead bytes
    return std::isprint(u) && !std::isspace(u) && !ident_char(c) && !reserved_punct(c);
}

}  // namespace detail

inline std::vector<Token> lex_source(std::string_view src, const std::string& file) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto pos_here = [&] { return SourcePos{file, line, col}; };
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (src[i + k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        i += n;
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        SourcePos p = pos_here();
        if (detail::ident_start(c)) {
            size_t j = i;
            while (j < src.size() &&
                   (detail::ident_char(src[j]) ||
                    (src[j] == '-' && j + 1 < src.size() &&
                     std::isalnum(static_cast<unsigned char>(src[j + 1])))))
                ++j;
            out.push_back({Token::Kind::Ident, std::string(src.substr(i, j - i)), p});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            out.push_back({Token::Kind::Number, std::string(src.substr(i, j - i)), p});
            advance(j - i);
            continue;
        }
        if (c == '"') {
            size_t j = i + 1;
            while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
            if (j >= src.size() || src[j] != '"')
                throw Error("LexError", "unterminated string literal", p);
            out.push_back({Token::Kind::String, std::string(src.substr(i + 1, j - i - 1)), p});
            advance(j - i + 1);
            continue;
        }
        if (src.compare(i, 3, "|->") == 0) {
            out.push_back({Token::Kind::Punct, "|->", p});
            advance(3);
            continue;
        }
        if (src.compare(i, 2, "->") == 0) {
            out.push_back({Token::Kind::Punct, "->", p});
            advance(2);
            continue;
        }
        if (detail::reserved_punct(c)) {
            out.push_back({Token::Kind::Punct, std::string(1, c), p});
            advance(1);
            continue;
        }
        if (detail::op_char(c)) {
            size_t j = i;
            while (j < src.size() && detail::op_char(src[j]) &&
                   !(src[j] == '/' && j + 1 < src.size() && src[j + 1] == '/'))
                ++j;
            out.push_back({Token::Kind::SymRun, std::string(src.substr(i, j - i)), p});
            advance(j - i);
            continue;
        }
        throw Error("LexError", "stray character '" + std::string(1, c) + "'", p);
    }
    out.push_back({Token::Kind::End, "", pos_here()});
    return out;
}

class Cursor {
public:
    Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}
    Cursor(std::string_view src, const std::string& file) : toks_(lex_source(src, file)) {}

    const Token& peek(size_t ahead = 0) const {
        size_t k = i_ + ahead;
        return k < toks_.size() ? toks_[k] : toks_.back();
    }
    Token next() {
        const Token& t = peek();
        if (t.kind != Token::Kind::End) ++i_;
        return t;
    }
    bool at_end() const { return peek().kind == Token::Kind::End; }
    SourcePos pos() const { return peek().pos; }
    size_t mark() const { return i_; }
    void rewind(size_t m) { i_ = m; }

    bool at_punct(const std::string& p) const {
        return peek().kind == Token::Kind::Punct && peek().text == p;
    }
    bool at_kw(const std::string& w) const {
        return peek().kind == Token::Kind::Ident && peek().text == w;
    }
    bool eat_punct(const std::string& p) {
        if (!at_punct(p)) return false;
        next();
        return true;
    }
    bool eat_kw(const std::string& w) {
        if (!at_kw(w)) return false;
        next();
        return true;
    }
    void expect_punct(const std::string& p, const std::string& what) {
        if (!eat_punct(p))
            throw Error("ParseError",
                        "expected '" + p + "' " + what + ", got '" + peek().text + "'", pos());
    }
    void expect_kw(const std::string& w) {
        if (!eat_kw(w))
            throw Error("ParseError", "expected '" + w + "', got '" + peek().text + "'", pos());
    }
    std::string expect_ident(const std::string& what) {
        if (peek().kind != Token::Kind::Ident)
            throw Error("ParseError", "expected " + what + ", got '" + peek().text + "'", pos());
        return next().text;
    }
    int expect_number(const std::string& what) {
        if (peek().kind != Token::Kind::Number)
            throw Error("ParseError", "expected " + what + ", got '" + peek().text + "'", pos());
        return std::stoi(next().text);
    }
    std::string expect_string(const std::string& what) {
        if (peek().kind != Token::Kind::String)
            throw Error("ParseError", "expected " + what + ", got '" + peek().text + "'", pos());
        return next().text;
    }

private:
    std::vector<Token> toks_;
    size_t i_ = 0;
};

// ---------------------------------------------------------------------------
// Terms and formulas, parsed against a symbol context and a glyph table.

class TermParser {
public:
    TermParser(const Context& ctx, const std::map<std::string, SymbolName>& glyphs, Cursor& cur)
        : ctx_(ctx), glyphs_(glyphs), cur_(cur) {}

    Term term() {
        Term acc = primary();
        while (cur_.peek().kind == Token::Kind::SymRun) {
            SourcePos p = cur_.pos();
            std::string run = cur_.next().text;
            auto it = glyphs_.find(run);
            if (it == glyphs_.end())
                throw Error("UnknownSymbol", "no infix operator '" + run + "' in scope", p);
            acc = Term::app(it->second, {std::move(acc), primary()});
        }
        return acc;
    }

    Formula formula() {
        if (cur_.at_kw("forall") || cur_.at_kw("exists")) return quantified();
        Formula lhs = disjunction();
        if (cur_.eat_kw("implies")) return Formula::implies(std::move(lhs), formula());
        return lhs;
    }

private:
    Formula quantified() {
        bool uni = cur_.eat_kw("forall");
        if (!uni) cur_.expect_kw("exists");
        std::string v = cur_.expect_ident("binder variable");
        SortName s;
        if (cur_.eat_punct(":")) s = cur_.expect_ident("sort name");
        cur_.expect_punct(".", "after binder");
        Formula body = formula();
        return Formula::quant(uni ? Formula::Kind::Forall : Formula::Kind::Exists, v, s,
                              std::move(body));
    }
    Formula disjunction() {
        Formula acc = conjunction();
        while (cur_.eat_kw("or")) acc = Formula::disj(std::move(acc), conjunction());
        return acc;
    }
    Formula conjunction() {
        Formula acc = negation();
        while (cur_.eat_kw("and")) acc = Formula::conj(std::move(acc), negation());
        return acc;
    }
    Formula negation() {
        if (cur_.eat_kw("not")) return Formula::neg(negation());
        if (cur_.at_kw("forall") || cur_.at_kw("exists")) return quantified();
        return atom();
    }
    Formula atom() {
        size_t m = cur_.mark();
        try {
            Term l = term();
            cur_.expect_punct("=", "in equation");
            Term r = term();
            return Formula::eq(std::move(l), std::move(r));
        } catch (const Error&) {
            cur_.rewind(m);
        }
        cur_.expect_punct("(", "to open a formula");
        Formula f = formula();
        cur_.expect_punct(")", "to close the formula");
        return f;
    }
    Term primary() {
        if (cur_.eat_punct("(")) {
            Term t = term();
            cur_.expect_punct(")", "to close the term");
            return t;
        }
        if (cur_.peek().kind != Token::Kind::Ident)
            throw Error("ParseError", "expected a term, got '" + cur_.peek().text + "'",
                        cur_.pos());
        std::string name = cur_.next().text;
        if (cur_.eat_punct("(")) {
            std::vector<Term> args;
            if (!cur_.at_punct(")")) {
                args.push_back(term());
                while (cur_.eat_punct(",")) args.push_back(term());
            }
            cur_.expect_punct(")", "to close the argument list");
            return Term::app(std::move(name), std::move(args));
        }
        const SymbolSignature* sig = ctx_.find(name);
        if (sig && !sig->is_sort) return Term::app(std::move(name));
        return Term::var(std::move(name));
    }

    const Context& ctx_;
    const std::map<std::string, SymbolName>& glyphs_;
    Cursor& cur_;
};

// ---------------------------------------------------------------------------
// Declarations.

inline SymbolSignature parse_signature(Cursor& cur) {
    std::vector<SortName> parts;
    parts.push_back(cur.expect_ident("sort name"));
    while (cur.peek().kind == Token::Kind::Ident && !cur.at_kw("infix") && !cur.at_kw("where"))
        parts.push_back(cur.next().text);
    if (cur.eat_punct("->")) {
        SortName result = cur.expect_ident("result sort");
        return SymbolSignature::op(std::move(parts), std::move(result));
    }
    if (parts.size() != 1)
        throw Error("ParseError", "constant signature names exactly one sort", cur.pos());
    return SymbolSignature::constant(parts.front());
}

inline std::string parse_infix_clause(Cursor& cur) {
    if (!cur.eat_kw("infix")) return {};
    SourcePos p = cur.pos();
    std::string glyph = cur.expect_string("glyph string");
    std::vector<Token> toks = lex_source(glyph, p.file);
    if (toks.size() != 2 || toks.front().kind != Token::Kind::SymRun)
        throw Error("ParseError", "infix glyph must be a single operator run", p);
    return glyph;
}

inline Justification parse_justification(Cursor& cur) {
    cur.expect_kw("by");
    if (cur.eat_kw("citation")) return Justification::citation(cur.expect_string("citation text"));
    if (cur.eat_kw("assumption")) return Justification::assumption();
    if (cur.eat_kw("finite-check"))
        return Justification::finite_check(cur.expect_number("size bound"));
    throw Error("ParseError", "expected citation, assumption or finite-check", cur.pos());
}

// Parses one declaration and threads it into the running context and glyph
// table; statement formulas are closed over their free variables here.
inline Declaration parse_declaration(Cursor& cur, Context& ctx,
                                     std::map<std::string, SymbolName>& glyphs,
                                     std::vector<Diag>& diags, const std::string& qual) {
    SourcePos p = cur.pos();
    auto close = [&](Formula f, const std::string& name) {
        size_t before = diags.size();
        Formula closed = close_formula(ctx, std::move(f), diags, qual + name);
        for (size_t k = before; k < diags.size(); ++k)
            if (!diags[k].pos.valid()) diags[k].pos = p;
        return closed;
    };
    if (cur.eat_kw("sort")) {
        std::string name = cur.expect_ident("sort name");
        cur.expect_punct(";", "after sort declaration");
        ctx.add(name, SymbolSignature::sort());
        return Declaration::sort(name);
    }
    if (cur.eat_kw("op")) {
        std::string name = cur.expect_ident("operation name");
        cur.expect_punct(":", "after operation name");
        SymbolSignature sig = parse_signature(cur);
        std::string glyph = parse_infix_clause(cur);
        cur.expect_punct(";", "after operation declaration");
        ctx.add(name, sig);
        if (!glyph.empty()) glyphs[glyph] = name;
        return Declaration::op(name, std::move(sig), std::move(glyph));
    }
    if (cur.eat_kw("axiom")) {
        std::string name = cur.expect_ident("axiom name");
        cur.expect_punct(":", "after axiom name");
        Formula f = TermParser(ctx, glyphs, cur).formula();
        cur.expect_punct(";", "after axiom");
        return Declaration::axiom(name, close(std::move(f), name));
    }
    if (cur.eat_kw("def")) {
        std::string name = cur.expect_ident("defined symbol name");
        cur.expect_punct(":", "after defined symbol name");
        SymbolSignature sig = parse_signature(cur);
        std::string glyph = parse_infix_clause(cur);
        cur.expect_kw("where");
        // the defining equation mentions the new symbol on its left side
        ctx.add(name, sig);
        if (!glyph.empty()) glyphs[glyph] = name;
        Formula f = TermParser(ctx, glyphs, cur).formula();
        cur.expect_punct(";", "after definition");
        return Declaration::definition(name, std::move(sig), close(std::move(f), name),
                                       std::move(glyph));
    }
    if (cur.eat_kw("theorem")) {
        std::string name = cur.expect_ident("theorem name");
        cur.expect_punct(":", "after theorem name");
        Formula f = TermParser(ctx, glyphs, cur).formula();
        Justification j = parse_justification(cur);
        cur.expect_punct(";", "after theorem");
        return Declaration::theorem(name, close(std::move(f), name), std::move(j));
    }
    throw Error("ParseError", "expected a declaration, got '" + cur.peek().text + "'", p);
}

// Body of a theory block, starting after '{'.  `base` seeds the context for
// extension blocks; base declarations are already part of the result.
inline Theory parse_theory_block(Cursor& cur, TheoryName name, const Theory* base,
                                 std::vector<Diag>& diags) {
    Theory t;
    t.name = std::move(name);
    Context ctx;
    std::map<std::string, SymbolName> glyphs;
    if (base) {
        t.decls = base->decls;
        ctx = Context::of(*base);
        glyphs = base->glyphs();
    }
    while (!cur.eat_punct("}")) {
        if (cur.at_end())
            throw Error("ParseError", "unterminated theory block for '" + t.name + "'",
                        cur.pos());
        t.decls.push_back(parse_declaration(cur, ctx, glyphs, diags, t.name + "."));
    }
    return t;
}

// Standalone theory presentation: `theory N { ... }`.  Extension blocks need
// a graph to resolve their base against and are handled by the workspace.
inline Theory parse_theory(std::string_view src, std::vector<Diag>& diags,
                           const std::string& file = "<string>") {
    Cursor cur(src, file);
    cur.expect_kw("theory");
    TheoryName name = cur.expect_ident("theory name");
    if (cur.at_kw("extends"))
        throw Error("ParseError", "standalone parse_theory cannot resolve 'extends'", cur.pos());
    cur.expect_punct("{", "to open the theory body");
    Theory t = parse_theory_block(cur, std::move(name), nullptr, diags);
    if (!cur.at_end())
        throw Error("ParseError", "trailing input after theory block", cur.pos());
    WfReport wf = check_wf(t);
    for (auto& d : wf.problems) diags.push_back(std::move(d));
    return t;
}

// A formula in the language of an existing theory (CLI property input).
inline Formula parse_formula_in(const Theory& t, std::string_view src, std::vector<Diag>& diags,
                                const std::string& file = "<formula>") {
    Cursor cur(src, file);
    Context ctx = Context::of(t);
    auto glyphs = t.glyphs();
    Formula f = TermParser(ctx, glyphs, cur).formula();
    if (!cur.at_end()) throw Error("ParseError", "trailing input after formula", cur.pos());
    return close_formula(ctx, std::move(f), diags, "formula");
}

// One declaration in the context of an existing theory, e.g. the payload of
// a realm extension.
inline Declaration parse_declaration_in(const Theory& t, std::string_view src,
                                        std::vector<Diag>& diags,
                                        const std::string& file = "<declaration>") {
    Cursor cur(src, file);
    Context ctx = Context::of(t);
    auto glyphs = t.glyphs();
    Declaration d = parse_declaration(cur, ctx, glyphs, diags, t.name + ".");
    if (!cur.at_end()) throw Error("ParseError", "trailing input after declaration", cur.pos());
    return d;
}

// ---------------------------------------------------------------------------
// Source-level shapes for the cross-theory statements; the workspace gives
// them meaning once the referenced theories are in the graph.

struct ViewEntrySrc {
    std::string source;  // identifier or glyph, resolved against the source theory
    std::string target;  // identifier or glyph, resolved against the target theory
    bool expand = false; // target is the translated source definiens
    SourcePos pos;
};

struct ViewSrc {
    ViewName name;
    TheoryName source, target;
    bool identity = false;
    std::vector<ViewEntrySrc> entries;
    SourcePos pos;
};

// after the 'view' keyword
inline ViewSrc parse_view_src(Cursor& cur) {
    ViewSrc v;
    v.pos = cur.pos();
    v.name = cur.expect_ident("view name");
    cur.expect_punct(":", "after view name");
    v.source = cur.expect_ident("source theory");
    cur.expect_punct("->", "between source and target theory");
    v.target = cur.expect_ident("target theory");
    if (cur.eat_kw("identity")) v.identity = true;
    cur.expect_punct("{", "to open the view body");
    while (!cur.eat_punct("}")) {
        if (cur.at_end()) throw Error("ParseError", "unterminated view block", cur.pos());
        ViewEntrySrc e;
        e.pos = cur.pos();
        const Token& s = cur.peek();
        if (s.kind != Token::Kind::Ident && s.kind != Token::Kind::SymRun)
            throw Error("ParseError", "expected a source symbol, got '" + s.text + "'", cur.pos());
        e.source = cur.next().text;
        cur.expect_punct("|->", "in view entry");
        if (cur.eat_kw("expand")) {
            e.expand = true;
        } else {
            const Token& t = cur.peek();
            if (t.kind != Token::Kind::Ident && t.kind != Token::Kind::SymRun)
                throw Error("ParseError", "expected a target symbol, got '" + t.text + "'",
                            cur.pos());
            e.target = cur.next().text;
        }
        cur.expect_punct(";", "after view entry");
        v.entries.push_back(std::move(e));
    }
    return v;
}

struct RealmPillarSrc {
    std::string name;
    TheoryName bottom, top;
    ViewName interface;
};

struct RealmSrc {
    RealmName name;
    TheoryName face;
    std::vector<RealmPillarSrc> pillars;
    std::vector<ViewName> equivs;
    SourcePos pos;
};

// after the 'realm' keyword
inline RealmSrc parse_realm_src(Cursor& cur) {
    RealmSrc r;
    r.pos = cur.pos();
    r.name = cur.expect_ident("realm name");
    cur.expect_punct("{", "to open the realm body");
    while (!cur.eat_punct("}")) {
        if (cur.at_end()) throw Error("ParseError", "unterminated realm block", cur.pos());
        if (cur.eat_kw("face")) {
            r.face = cur.expect_ident("face theory");
            cur.expect_punct(";", "after face");
        } else if (cur.eat_kw("pillar")) {
            RealmPillarSrc p;
            p.name = cur.expect_ident("pillar name");
            cur.expect_punct("{", "to open the pillar");
            while (!cur.eat_punct("}")) {
                if (cur.eat_kw("bottom")) {
                    p.bottom = cur.expect_ident("bottom theory");
                } else if (cur.eat_kw("top")) {
                    p.top = cur.expect_ident("top theory");
                } else if (cur.eat_kw("interface")) {
                    p.interface = cur.expect_ident("interface view");
                } else {
                    throw Error("ParseError",
                                "expected bottom, top or interface, got '" + cur.peek().text + "'",
                                cur.pos());
                }
                cur.expect_punct(";", "in pillar block");
            }
            r.pillars.push_back(std::move(p));
        } else if (cur.eat_kw("equiv")) {
            r.equivs.push_back(cur.expect_ident("view name"));
            while (cur.eat_punct(",")) r.equivs.push_back(cur.expect_ident("view name"));
            cur.expect_punct(";", "after equiv list");
        } else {
            throw Error("ParseError",
                        "expected face, pillar or equiv, got '" + cur.peek().text + "'",
                        cur.pos());
        }
    }
    return r;
}

}  // namespace tgk
