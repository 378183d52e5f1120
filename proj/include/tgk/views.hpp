#pragma once

// View algorithms: translating syntax across a view, generating and
// discharging proof obligations, composing views, inclusions, interfaces
// (injective views), conservativity of an extension via a back-view, and
// expansivity via an endo-witness.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tgk/graph.hpp"
#include "tgk/parse.hpp"
#include "tgk/print.hpp"

namespace tgk {

// ---------------------------------------------------------------------------
// Translation.

inline SortName translate_sort(const View& v, const SortName& s) {
    const ViewTarget* e = v.entry(s);
    if (!e || e->kind != ViewTarget::Kind::Symbol)
        throw Error("UnmappedSymbol", "view '" + v.name + "' does not map sort '" + s + "'");
    return e->symbol;
}

inline SymbolSignature translate_sig(const View& v, const SymbolSignature& sig) {
    if (sig.is_sort) return sig;
    SymbolSignature out;
    for (const auto& a : sig.args) out.args.push_back(translate_sort(v, a));
    out.result = translate_sort(v, sig.result);
    return out;
}

namespace detail {

struct Translator {
    const View& v;
    std::set<std::string> used;  // every var name in play, to keep extras fresh

    Term term(const Term& t) {
        if (t.is_var()) return t;
        std::vector<Term> args;
        args.reserve(t.args.size());
        for (const auto& a : t.args) args.push_back(term(a));
        const ViewTarget* e = v.entry(t.head);
        if (!e)
            throw Error("UnmappedSymbol",
                        "view '" + v.name + "' does not map symbol '" + t.head + "'");
        if (e->kind == ViewTarget::Kind::Symbol) return Term::app(e->symbol, std::move(args));
        std::map<std::string, Term> sub;
        for (size_t i = 0; i < e->params.size() && i < args.size(); ++i)
            sub[e->params[i]] = args[i];
        for (const auto& x : e->extras) {
            std::string fresh = fresh_name(x, used);
            used.insert(fresh);
            sub[x] = Term::var(fresh);
        }
        return subst(e->body, sub);
    }

    Formula formula(const Formula& f) {
        switch (f.kind) {
            case Formula::Kind::Eq:
                return Formula::eq(term(f.lhs), term(f.rhs));
            case Formula::Kind::Forall:
            case Formula::Kind::Exists:
                return Formula::quant(f.kind, f.var, translate_sort(v, f.var_sort),
                                      formula(f.kids.front()));
            default: {
                Formula r = f;
                for (auto& k : r.kids) k = formula(k);
                return r;
            }
        }
    }
};

// Fills in sorts for variables a term applies operations to; parameters
// already present in env keep their sorts.
inline void infer_arg_sorts(const Context& c, const Term& t,
                            std::map<std::string, SortName>& env) {
    if (t.is_var()) return;
    const SymbolSignature* sig = c.find(t.head);
    for (size_t i = 0; i < t.args.size(); ++i) {
        if (sig && t.args[i].is_var() && static_cast<int>(i) < sig->arity())
            env.emplace(t.args[i].head, sig->args[i]);
        infer_arg_sorts(c, t.args[i], env);
    }
}

}  // namespace detail

inline Term translate_term(const TheoryGraph& g, const View& v, const Term& t) {
    detail::Translator tr{v, {}};
    all_var_names(t, tr.used);
    return tr.term(t);
}

// Translated statements are re-closed: template extras arrive as fresh free
// variables and pick up an outer forall.
inline Formula translate_formula(const TheoryGraph& g, const View& v, const Formula& f) {
    detail::Translator tr{v, {}};
    all_var_names(f, tr.used);
    Formula out = tr.formula(f);
    const Theory& tgt = g.theory(v.target);
    Context c = Context::of(tgt);
    std::vector<Diag> scratch;
    return close_formula(c, std::move(out), scratch, "translate");
}

// Symbols a view's targets are built from: direct symbol targets plus every
// symbol inside a template body.  This is the range the expansivity witness
// must stay inside.
inline std::set<SymbolName> view_image_symbols(const View& v) {
    std::set<SymbolName> out;
    struct {
        void operator()(const Term& t, std::set<SymbolName>& out) const {
            if (!t.is_var()) {
                out.insert(t.head);
                for (const auto& a : t.args) (*this)(a, out);
            }
        }
    } heads;
    for (const auto& [s, e] : v.entries) {
        (void)s;
        if (e.kind == ViewTarget::Kind::Symbol)
            out.insert(e.symbol);
        else
            heads(e.body, out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Building a view from its source form.  Expansion entries are materialized
// in source declaration order, so a definiens only meets entries that are
// already resolved.

inline CheckReport build_view(TheoryGraph& g, const ViewSrc& src) {
    CheckReport rep;
    if (g.views.count(src.name)) {
        rep.problems.push_back(
            {"DuplicateName", "view '" + src.name + "' already exists", src.pos});
        return rep;
    }
    const Theory& s = g.theory(src.source);
    const Theory& t = g.theory(src.target);
    View v;
    v.name = src.name;
    v.source = src.source;
    v.target = src.target;
    v.identity = src.identity;

    auto s_glyphs = s.glyphs();
    auto t_glyphs = t.glyphs();
    auto resolve = [&](const std::string& ref, const Theory& th,
                       const std::map<std::string, SymbolName>& glyphs,
                       const SourcePos& pos) -> std::string {
        std::string name = ref;
        if (auto it = glyphs.find(ref); it != glyphs.end()) name = it->second;
        const Declaration* d = th.find(name);
        if (!d || !d->introduces_symbol()) {
            rep.problems.push_back({"UnknownSymbolInMap",
                                    "'" + ref + "' does not name a symbol of theory '" +
                                        th.name + "'",
                                    pos});
            return {};
        }
        return name;
    };

    if (src.identity)
        for (const auto* d : s.symbols()) v.entries[d->name] = ViewTarget::to(d->name);

    // symbol-to-symbol entries first, then expansions in declaration order
    std::map<SymbolName, SourcePos> expansions;
    for (const auto& e : src.entries) {
        std::string sn = resolve(e.source, s, s_glyphs, e.pos);
        if (sn.empty()) continue;
        if (e.expand) {
            expansions[sn] = e.pos;
            continue;
        }
        std::string tn = resolve(e.target, t, t_glyphs, e.pos);
        if (tn.empty()) continue;
        v.entries[sn] = ViewTarget::to(tn);
    }
    for (const auto& d : s.decls) {
        auto it = expansions.find(d.name);
        if (it == expansions.end()) continue;
        auto parts = def_parts(d);
        if (d.kind != DeclKind::Definition || !parts) {
            rep.problems.push_back(
                {"BadDefinition",
                 "'" + d.name + "' is not a definition, so it cannot be expanded", it->second});
            continue;
        }
        try {
            detail::Translator tr{v, {}};
            all_var_names(parts->rhs, tr.used);
            Term body = tr.term(parts->rhs);
            // an earlier expansion spliced into this one brings fresh
            // variables along; they become extras of this template too
            std::vector<std::string> extras;
            std::set<std::string> params(parts->params.begin(), parts->params.end());
            for (const auto& x : free_vars(body))
                if (!params.count(x)) extras.push_back(x);
            v.entries[d.name] = ViewTarget::tmpl(parts->params, std::move(extras), std::move(body));
        } catch (const Error& err) {
            rep.problems.push_back({err.code, err.what(), it->second});
        }
    }
    g.views.emplace(v.name, std::move(v));
    return rep;
}

// ---------------------------------------------------------------------------
// Checking: totality, signature preservation, obligation generation.

inline CheckReport check_view(TheoryGraph& g, View& v) {
    CheckReport rep;
    const Theory& s = g.theory(v.source);
    const Theory& t = g.theory(v.target);
    Context tc = Context::of(t);

    for (const auto& [name, e] : v.entries) {
        (void)e;
        const Declaration* d = s.find(name);
        if (!d || !d->introduces_symbol())
            rep.problems.push_back({"UnknownSymbolInMap", "view '" + v.name + "' maps '" + name +
                                                              "', which is not a symbol of '" +
                                                              s.name + "'"});
    }

    bool total = true;
    for (const auto* d : s.symbols())
        if (!v.entry(d->name)) {
            total = false;
            rep.problems.push_back({"ViewNotTotal", "view '" + v.name + "' does not map '" +
                                                        d->name + "' of '" + s.name + "'"});
        }
    if (!total) return rep;  // signatures and obligations need every symbol

    for (const auto* d : s.symbols()) {
        const ViewTarget& e = *v.entry(d->name);
        if (d->sig.is_sort) {
            if (e.kind != ViewTarget::Kind::Symbol) {
                rep.problems.push_back(
                    {"SignatureMismatch", "sort '" + d->name + "' must map to a sort"});
                continue;
            }
            const Declaration* td = t.find(e.symbol);
            if (!td || !td->sig.is_sort)
                rep.problems.push_back({"SignatureMismatch", "view '" + v.name + "' sends sort '" +
                                                                 d->name + "' to non-sort '" +
                                                                 e.symbol + "'"});
            continue;
        }
        SymbolSignature want;
        try {
            want = translate_sig(v, d->sig);
        } catch (const Error& err) {
            rep.problems.push_back({err.code, err.what()});
            continue;
        }
        if (e.kind == ViewTarget::Kind::Symbol) {
            const Declaration* td = t.find(e.symbol);
            if (!td || td->sig.is_sort) {
                rep.problems.push_back(
                    {"SignatureMismatch",
                     "'" + d->name + "' maps to '" + e.symbol + "', which is not an operation"});
                continue;
            }
            if (!(td->sig == want))
                rep.problems.push_back(
                    {"SignatureMismatch", "'" + d->name + "' : " + show_signature(d->sig) +
                                              " maps to '" + e.symbol + "' : " +
                                              show_signature(td->sig) + ", expected " +
                                              show_signature(want)});
        } else {
            // template: body must have the translated result sort under the
            // translated parameter sorts; extras read their sorts off the
            // argument positions where the body uses them
            std::map<std::string, SortName> env;
            for (size_t i = 0; i < e.params.size(); ++i)
                env[e.params[i]] = i < want.args.size() ? want.args[i] : SortName("?");
            detail::infer_arg_sorts(tc, e.body, env);
            if (e.body.is_var()) env.emplace(e.body.head, want.result);
            try {
                SortName got = term_sort(tc, e.body, env);
                if (got != want.result)
                    rep.problems.push_back(
                        {"SignatureMismatch", "template for '" + d->name + "' has sort " + got +
                                                  ", expected " + want.result});
            } catch (const Error& err) {
                rep.problems.push_back({err.code, err.what()});
            }
        }
    }
    if (!rep.ok()) return rep;

    if (v.identity)
        for (const auto& [name, e] : v.entries)
            if (e.kind != ViewTarget::Kind::Symbol || e.symbol != name)
                rep.problems.push_back(
                    {"SignatureMismatch", "identity view '" + v.name + "' remaps '" + name + "'"});

    // one obligation per statement-bearing source declaration, kept in
    // declaration order; existing statuses (from directives) are preserved
    std::map<std::string, Obligation> old;
    for (auto& o : v.obligations) old.emplace(o.origin, std::move(o));
    v.obligations.clear();
    for (const auto& d : s.decls) {
        if (!d.has_formula()) continue;
        Obligation o;
        o.origin = d.name;
        o.statement = translate_formula(g, v, d.body);
        auto it = old.find(d.name);
        if (it != old.end() && it->second.status != ObStatus::Open &&
            alpha_eq(it->second.statement, o.statement))
            o = std::move(it->second);
        v.obligations.push_back(std::move(o));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Auto-discharge: match each open obligation against the target's recorded
// facts, retrying after each unfolding pass of the target's definitions.
// First match in declaration order wins; a statement that unfolds to t = t
// is discharged as definitional.

inline void auto_discharge(const TheoryGraph& g, View& v, int unfold_depth = 2) {
    const Theory& t = g.theory(v.target);
    auto try_match = [&](Obligation& o, const Formula& stmt) {
        if (is_reflexive(stmt)) {
            o.status = ObStatus::ByDefinition;
            o.via = "reflexivity";
            return true;
        }
        for (const auto& d : t.decls) {
            if (!d.has_formula()) continue;
            if (!alpha_eq_mod_prefix(stmt, d.body)) continue;
            switch (d.kind) {
                case DeclKind::Axiom: o.status = ObStatus::ByAxiom; break;
                case DeclKind::Definition: o.status = ObStatus::ByDefinition; break;
                default: o.status = ObStatus::ByTheorem; break;
            }
            o.via = d.name;
            return true;
        }
        return false;
    };
    for (auto& o : v.obligations) {
        if (o.status != ObStatus::Open) continue;
        Formula stmt = o.statement;
        if (try_match(o, stmt)) continue;
        for (int d = 0; d < unfold_depth; ++d) {
            Formula next = unfold(t, stmt, 1);
            if (next == stmt) break;
            stmt = std::move(next);
            if (try_match(o, stmt)) break;
        }
    }
}

// ---------------------------------------------------------------------------
// Composition: w after v.  Symbol entries chase through w; template entries
// are w-translated.  Obligations are regenerated for the composite.

inline View compose_views(TheoryGraph& g, const View& v, const View& w, ViewName name) {
    if (v.target != w.source)
        throw Error("ComposeMismatch", "cannot compose " + v.name + " : " + v.source + " -> " +
                                           v.target + " with " + w.name + " : " + w.source +
                                           " -> " + w.target);
    View out;
    out.name = std::move(name);
    out.source = v.source;
    out.target = w.target;
    out.identity = v.identity && w.identity;
    for (const auto& [s, e] : v.entries) {
        if (e.kind == ViewTarget::Kind::Symbol) {
            const ViewTarget* we = w.entry(e.symbol);
            if (!we)
                throw Error("UnmappedSymbol", "composition stuck: '" + e.symbol +
                                                  "' has no entry in '" + w.name + "'");
            out.entries[s] = *we;
        } else {
            detail::Translator tr{w, {}};
            all_var_names(e.body, tr.used);
            for (const auto& p : e.params) tr.used.insert(p);
            Term body = tr.term(e.body);
            // w may splice in templates of its own; their fresh variables
            // become extras of the composite
            std::vector<std::string> extras = e.extras;
            std::set<std::string> known(e.params.begin(), e.params.end());
            known.insert(e.extras.begin(), e.extras.end());
            for (const auto& x : free_vars(body))
                if (!known.count(x)) extras.push_back(x);
            out.entries[s] = ViewTarget::tmpl(e.params, std::move(extras), std::move(body));
        }
    }
    CheckReport rep = check_view(g, out);
    for (const auto& p : rep.problems)
        if (p.severity == Severity::Error) throw Error(p.code, p.message);
    auto_discharge(g, out);
    return out;
}

// ---------------------------------------------------------------------------
// Inclusions: the identity translation along an extension edge.  Everything
// it asks for is literally present in the extension, so checking one always
// discharges every obligation.

inline View& inclusion_view(TheoryGraph& g, const TheoryName& base, const TheoryName& ext,
                            ViewName name = {}) {
    const Theory& b = g.theory(base);
    const Theory& e = g.theory(ext);
    if (!is_prefix(b, e))
        throw Error("NotAnExtension",
                    "'" + base + "' is not a declaration prefix of '" + ext + "'");
    if (name.empty()) name = "incl__" + base + "__" + ext;
    if (auto it = g.views.find(name); it != g.views.end()) return it->second;
    View v;
    v.name = name;
    v.source = base;
    v.target = ext;
    v.identity = base == ext;
    v.inclusion = true;
    for (const auto* d : b.symbols()) v.entries[d->name] = ViewTarget::to(d->name);
    CheckReport rep = check_view(g, v);
    for (const auto& p : rep.problems)
        if (p.severity == Severity::Error) throw Error(p.code, p.message);
    auto_discharge(g, v);
    auto [it, ok] = g.views.emplace(v.name, std::move(v));
    (void)ok;
    return it->second;
}

// ---------------------------------------------------------------------------
// Interfaces: total views that are injective on symbols (and map symbols to
// symbols, not templates), so the face names can be read back off the top.

inline CheckReport is_interface(const TheoryGraph& g, const View& v) {
    CheckReport rep;
    const Theory& s = g.theory(v.source);
    for (const auto* d : s.symbols())
        if (!v.entry(d->name))
            rep.problems.push_back({"InterfaceNotTotal", "interface '" + v.name +
                                                             "' does not map '" + d->name + "'"});
    std::map<SymbolName, SymbolName> hit;  // target -> first source mapped onto it
    for (const auto& d : s.decls) {
        if (!d.introduces_symbol()) continue;
        const ViewTarget* e = v.entry(d.name);
        if (!e) continue;
        if (e->kind != ViewTarget::Kind::Symbol) {
            rep.problems.push_back(
                {"InterfaceNotInjective",
                 "interface '" + v.name + "' sends '" + d.name + "' to a term template"});
            continue;
        }
        auto [it, fresh] = hit.emplace(e->symbol, d.name);
        if (!fresh)
            rep.problems.push_back({"InterfaceNotInjective",
                                    "interface '" + v.name + "' sends both '" + it->second +
                                        "' and '" + d.name + "' to '" + e->symbol + "'"});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Conservativity of an axiom-bearing extension via a back-view: a checked
// view ext -> base that is the identity on base symbols.  Success upgrades
// the edge's evidence.

inline CheckReport check_conservative_extension(TheoryGraph& g, const TheoryName& base,
                                                const TheoryName& ext,
                                                const ViewName& back_name) {
    CheckReport rep;
    const Theory& b = g.theory(base);
    const Theory& e = g.theory(ext);
    const View& back = g.view(back_name);
    if (!is_prefix(b, e)) {
        rep.problems.push_back(
            {"NotAnExtension", "'" + base + "' is not a declaration prefix of '" + ext + "'"});
        return rep;
    }
    if (back.source != ext || back.target != base) {
        rep.problems.push_back({"BackViewMismatch", "back-view '" + back_name + "' must run " +
                                                        ext + " -> " + base});
        return rep;
    }
    for (const auto* d : b.symbols()) {
        const ViewTarget* t = back.entry(d->name);
        if (!t || t->kind != ViewTarget::Kind::Symbol || t->symbol != d->name)
            rep.problems.push_back({"BackViewNotRetraction",
                                    "back-view '" + back_name + "' moves base symbol '" +
                                        d->name + "'; composing with the inclusion must be the "
                                        "identity"});
    }
    for (const auto& o : back.obligations)
        if (o.status == ObStatus::Open)
            rep.problems.push_back({"ObligationOpen", "back-view '" + back_name +
                                                          "' has an open obligation for '" +
                                                          o.origin + "'"});
    if (!rep.ok()) return rep;
    for (auto& edge : g.edges)
        if (edge.base == base && edge.ext == ext) {
            edge.cons = ConsEvidence::ByBackView;
            edge.back_view = back_name;
            return rep;
        }
    rep.problems.push_back({"NotAnExtension", "no extension edge " + base + " -> " + ext +
                                                  " is registered in the graph"});
    return rep;
}

// ---------------------------------------------------------------------------
// Expansivity: an endo-view of the target that is the identity on the
// view's image and lands inside the image everywhere else.  Together with
// faithfulness probing this is the evidence that a target conservatively
// extends the image of the view.

inline CheckReport is_expansive(TheoryGraph& g, View& v, const ViewName& witness_name) {
    CheckReport rep;
    const View& w = g.view(witness_name);
    if (w.source != v.target || w.target != v.target) {
        rep.problems.push_back({"BackViewMismatch", "witness '" + witness_name +
                                                        "' must be an endo-view of '" +
                                                        v.target + "'"});
        return rep;
    }
    std::set<SymbolName> image;
    for (const auto& [s, e] : v.entries) {
        (void)s;
        if (e.kind == ViewTarget::Kind::Symbol) image.insert(e.symbol);
    }
    std::set<SymbolName> full_image = view_image_symbols(v);
    const Theory& t = g.theory(v.target);
    for (const auto* d : t.symbols()) {
        const ViewTarget* e = w.entry(d->name);
        if (!e) {
            rep.problems.push_back(
                {"ViewNotTotal", "witness '" + witness_name + "' does not map '" + d->name + "'"});
            continue;
        }
        if (image.count(d->name)) {
            if (e->kind != ViewTarget::Kind::Symbol || e->symbol != d->name)
                rep.problems.push_back({"NotExpansive", "witness moves image symbol '" +
                                                            d->name + "'"});
            continue;
        }
        if (e->kind == ViewTarget::Kind::Symbol) {
            if (!full_image.count(e->symbol))
                rep.problems.push_back({"NotExpansive", "witness sends '" + d->name +
                                                            "' outside the image, to '" +
                                                            e->symbol + "'"});
        } else {
            std::set<SymbolName> heads;
            struct {
                void operator()(const Term& x, std::set<SymbolName>& out) const {
                    if (!x.is_var()) {
                        out.insert(x.head);
                        for (const auto& a : x.args) (*this)(a, out);
                    }
                }
            } collect;
            collect(e->body, heads);
            for (const auto& h : heads)
                if (!full_image.count(h))
                    rep.problems.push_back({"NotExpansive",
                                            "witness template for '" + d->name +
                                                "' uses '" + h + "' outside the image"});
        }
    }
    for (const auto& o : w.obligations)
        if (o.status == ObStatus::Open)
            rep.problems.push_back({"ObligationOpen", "witness '" + witness_name +
                                                          "' has an open obligation for '" +
                                                          o.origin + "'"});
    if (rep.ok()) v.expansive_witness = witness_name;
    return rep;
}

}  // namespace tgk
