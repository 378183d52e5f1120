#pragma once

// Realms: a primitive face theory, pillars (bottom theory, conservative
// development up to a top, and an injective interface face -> top), plus
// views establishing that all pillar bottoms are equivalent.  This header
// validates realms and implements their lifecycle: trivial and initial
// realms, conservative extension, copying developments along views, merging
// two realms, lifting a view between tops to the faces, and projecting the
// face back out.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tgk/oracle.hpp"
#include "tgk/views.hpp"

namespace tgk {

// ---------------------------------------------------------------------------
// Symbol renaming (used by face copies and development copies).

namespace detail {

inline Term rename_symbols(const Term& t, const std::map<SymbolName, SymbolName>& m) {
    if (t.is_var()) return t;
    Term r = t;
    if (auto it = m.find(r.head); it != m.end()) r.head = it->second;
    for (auto& a : r.args) a = rename_symbols(a, m);
    return r;
}

inline Formula rename_symbols(const Formula& f, const std::map<SymbolName, SymbolName>& m) {
    Formula r = f;
    switch (f.kind) {
        case Formula::Kind::Eq:
            r.lhs = rename_symbols(f.lhs, m);
            r.rhs = rename_symbols(f.rhs, m);
            return r;
        case Formula::Kind::Forall:
        case Formula::Kind::Exists:
            if (auto it = m.find(r.var_sort); it != m.end()) r.var_sort = it->second;
            [[fallthrough]];
        default:
            for (auto& k : r.kids) k = rename_symbols(k, m);
            return r;
    }
}

inline SymbolSignature rename_sig(const SymbolSignature& s,
                                  const std::map<SymbolName, SymbolName>& m) {
    SymbolSignature out = s;
    for (auto& a : out.args)
        if (auto it = m.find(a); it != m.end()) a = it->second;
    if (auto it = m.find(out.result); it != m.end()) out.result = it->second;
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Validation.

struct RealmCheck {
    std::string check;   // e.g. "interface-total"
    std::string pillar;  // empty for realm-wide checks
    bool pass = true;
    std::string code;  // failure code, e.g. "InterfaceNotTotal"
    std::string detail;
};

struct RealmReport {
    RealmName realm;
    std::vector<RealmCheck> rows;

    bool ok() const {
        return std::all_of(rows.begin(), rows.end(), [](const RealmCheck& r) { return r.pass; });
    }
    std::vector<RealmCheck> failures() const {
        std::vector<RealmCheck> out;
        for (const auto& r : rows)
            if (!r.pass) out.push_back(r);
        return out;
    }
    std::string str() const {
        std::string s = "realm " + realm + ": " + (ok() ? "valid" : "INVALID") + "\n";
        for (const auto& r : rows) {
            s += "  [" + std::string(r.pass ? "pass" : "FAIL") + "] " + r.check;
            if (!r.pillar.empty()) s += " (" + r.pillar + ")";
            if (!r.pass) s += ": [" + r.code + "] " + r.detail;
            s += "\n";
        }
        return s;
    }
};

namespace detail {

// A view only counts as established when every formula-bearing source
// declaration has a recorded, non-open obligation; a view that was never
// checked has no obligations at all and must not pass.
inline std::string undischarged_origins(const TheoryGraph& g, const View& v) {
    std::string missing;
    for (const auto& d : g.theory(v.source).decls) {
        if (!d.has_formula()) continue;
        const Obligation* o = v.obligation(d.name);
        if (!o || o->status == ObStatus::Open)
            missing += (missing.empty() ? "" : ", ") + d.name;
    }
    return missing;
}

// The constraints a top theory places beyond the translated face: axioms,
// and defining equations of symbols the face maps onto.  An empty residue
// means the interface is conservative on sight; non-image symbols and
// their definitions never threaten conservativity, nor do theorems.
inline std::vector<const Declaration*> interface_residue(const TheoryGraph& g,
                                                         const View& iface) {
    const Theory& face = g.theory(iface.source);
    const Theory& top = g.theory(iface.target);
    std::vector<Formula> face_facts;
    for (const auto& d : face.decls)
        if (d.has_formula()) face_facts.push_back(translate_formula(g, iface, d.body));
    std::set<SymbolName> image;
    for (const auto& [s, e] : iface.entries) {
        (void)s;
        if (e.kind == ViewTarget::Kind::Symbol) image.insert(e.symbol);
    }
    auto matched = [&](const Formula& f) {
        return std::any_of(face_facts.begin(), face_facts.end(),
                           [&](const Formula& ff) { return alpha_eq_mod_prefix(f, ff); });
    };
    std::vector<const Declaration*> residue;
    for (const auto& d : top.decls) {
        bool constrains = d.kind == DeclKind::Axiom ||
                          (d.kind == DeclKind::Definition && image.count(d.name));
        if (constrains && !matched(d.body)) residue.push_back(&d);
    }
    return residue;
}

inline bool interface_conservative(const TheoryGraph& g, const View& iface, std::string& why) {
    std::vector<const Declaration*> residue = interface_residue(g, iface);
    if (residue.empty()) return true;
    why = "'" + residue.front()->name + "' of '" + iface.target +
          "' is not the translation of any face statement";
    if (iface.cons_checked_size > 0) {
        why += " (finite evidence up to size " + std::to_string(iface.cons_checked_size) + ")";
        return true;
    }
    return false;
}

}  // namespace detail

// Finite conservativity evidence for an interface whose top pins down image
// symbols in ways the face only entails: search for structures that satisfy
// every translated face statement yet violate a residual equation.  Finding
// none up to the bound is recorded on the view; finding one is a genuine
// conservativity failure.
inline CheckReport check_interface_conservativity(TheoryGraph& g, View& iface, int max_size,
                                                  SearchBudget& budget) {
    CheckReport rep;
    const Theory& face = g.theory(iface.source);
    const Theory& top = g.theory(iface.target);
    std::vector<const Declaration*> residue = detail::interface_residue(g, iface);

    // the image presentation: the top's symbols constrained only by the
    // translated face (non-image definitions stay definitional)
    std::set<SymbolName> image;
    for (const auto& [s, e] : iface.entries) {
        (void)s;
        if (e.kind == ViewTarget::Kind::Symbol) image.insert(e.symbol);
    }
    std::set<const Declaration*> residual(residue.begin(), residue.end());
    Theory probe;
    probe.name = top.name + "__image";
    for (const auto& d : top.decls) {
        if (d.introduces_symbol()) {
            probe.decls.push_back(d.sig.is_sort ? Declaration::sort(d.name)
                                                : Declaration::op(d.name, d.sig, d.glyph));
            if (d.kind == DeclKind::Definition && !image.count(d.name) && !residual.count(&d))
                probe.decls.push_back(Declaration::axiom(d.name + "_def", d.body));
        }
    }
    for (const auto& d : face.decls)
        if (d.has_formula())
            probe.decls.push_back(
                Declaration::axiom("face_" + d.name, translate_formula(g, iface, d.body)));

    for (const Declaration* d : residue) {
        auto m = find_countermodel(probe, d->body, max_size, budget);
        if (m)
            rep.problems.push_back(
                {"InterfaceNotConservative",
                 "'" + d->name + "' of '" + top.name +
                     "' does not follow from the face: refuted in a structure of size " +
                     std::to_string(m->carriers.begin()->second)});
    }
    if (rep.ok() && iface.cons_checked_size < max_size) iface.cons_checked_size = max_size;
    return rep;
}

inline RealmReport validate_realm(const TheoryGraph& g, const Realm& r) {
    RealmReport rep;
    rep.realm = r.name;
    auto row = [&](std::string check, std::string pillar, bool pass, std::string code = {},
                   std::string detail = {}) {
        rep.rows.push_back({std::move(check), std::move(pillar), pass, std::move(code),
                            std::move(detail)});
        return rep.rows.back().pass;
    };

    try {
        const Theory& face = g.theory(r.face);
        row("face-primitive", "", primitive(face), "FaceNotPrimitive",
            "face '" + r.face + "' contains definitions or theorems");
    } catch (const Error& e) {
        row("face-primitive", "", false, e.code, e.what());
    }

    std::vector<std::optional<Development>> devs(r.pillars.size());
    for (size_t i = 0; i < r.pillars.size(); ++i) {
        const Pillar& p = r.pillars[i];
        // one failing check per pillar: later ones assume the earlier hold
        try {
            devs[i] = development(g, p.bottom, p.top);
        } catch (const Error& e) {
            row("development", p.name, false, e.code, e.what());
            continue;
        }
        row("development", p.name, true);
        ConservativityReport cons = is_conservative_development(g, *devs[i]);
        if (!row("development-conservative", p.name, cons.ok(), "DevelopmentNotConservative",
                 cons.problems.empty() ? "" : cons.problems.front().message))
            continue;
        if (!g.has_view(p.interface)) {
            row("interface-total", p.name, false, "UnknownView",
                "interface view '" + p.interface + "' is not in the graph");
            continue;
        }
        const View& iface = g.view(p.interface);
        if (iface.source != r.face || iface.target != p.top) {
            row("interface-total", p.name, false, "InterfaceMismatch",
                "interface '" + p.interface + "' runs " + iface.source + " -> " + iface.target +
                    ", expected " + r.face + " -> " + p.top);
            continue;
        }
        CheckReport shape = is_interface(g, iface);
        std::string missing, doubled;
        for (const auto& d : shape.problems) {
            if (d.code == "InterfaceNotTotal") missing += (missing.empty() ? "" : ", ") + d.message;
            if (d.code == "InterfaceNotInjective")
                doubled += (doubled.empty() ? "" : ", ") + d.message;
        }
        if (!row("interface-total", p.name, missing.empty(), "InterfaceNotTotal", missing))
            continue;
        if (!row("interface-injective", p.name, doubled.empty(), "InterfaceNotInjective", doubled))
            continue;
        std::string open = detail::undischarged_origins(g, iface);
        if (!row("interface-obligations", p.name, open.empty(), "ObligationOpen",
                 open.empty() ? "" : "open obligations: " + open))
            continue;
        std::string why;
        row("interface-conservative", p.name, detail::interface_conservative(g, iface, why),
            "InterfaceNotConservative", why);
    }

    // pairwise equivalence of bottoms: for every ordered pair of pillars,
    // some equivalence view (obligations all discharged) runs from the first
    // bottom into the second development; the relation is closed under
    // composition since developments are conservative
    if (r.pillars.size() >= 2) {
        size_t n = r.pillars.size();
        std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
        for (size_t i = 0; i < n; ++i) reach[i][i] = true;
        for (const auto& vn : r.equivs) {
            if (!g.has_view(vn)) continue;
            const View& v = g.view(vn);
            if (!detail::undischarged_origins(g, v).empty()) continue;
            for (size_t i = 0; i < n; ++i) {
                if (v.source != r.pillars[i].bottom && !(devs[i] && devs[i]->contains(v.source)))
                    continue;
                for (size_t j = 0; j < n; ++j)
                    if (devs[j] && devs[j]->contains(v.target)) reach[i][j] = true;
            }
        }
        for (size_t k = 0; k < n; ++k)
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j < n; ++j)
                    if (reach[i][k] && reach[k][j]) reach[i][j] = true;
        std::string missing;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                if (!reach[i][j])
                    missing += (missing.empty() ? "" : ", ") + r.pillars[i].name + " -> " +
                               r.pillars[j].name;
        row("bottoms-equivalent", "", missing.empty(), "BottomsNotEquivalent",
            missing.empty() ? "" : "no discharged view chain for: " + missing);
    } else {
        row("bottoms-equivalent", "", true);
    }
    return rep;
}

inline const Theory& project_face(const TheoryGraph& g, const Realm& r) {
    return g.theory(r.face);
}

// ---------------------------------------------------------------------------
// Trivial realm: one pillar collapsing onto the theory itself, interface and
// equivalence both the identity.  (Validation will reject it later if the
// theory is not primitive; building it is always allowed.)

inline Realm& trivial_realm(TheoryGraph& g, const TheoryName& t, RealmName name = {}) {
    g.theory(t);
    if (name.empty()) name = "R__" + t;
    if (g.realms.count(name))
        throw Error("DuplicateName", "realm '" + name + "' already exists");
    View& id = inclusion_view(g, t, t, "id__" + t);
    Realm r;
    r.name = name;
    r.face = t;
    r.pillars.push_back({"p1", t, t, id.name});
    r.equivs.push_back(id.name);
    auto [it, ok] = g.realms.emplace(name, std::move(r));
    (void)ok;
    return it->second;
}

// ---------------------------------------------------------------------------
// Initial realm: manufacture a fresh face as a renamed copy of the theory's
// primitive skeleton (defined symbols become plain ops; defining equations
// and theorem statements are restated as axioms), with the obvious
// interface sending each copy to its original.

struct InitialOptions {
    RealmName realm_name;    // default R__<t>
    TheoryName face_name;    // default <t>_face
    ViewName iface_name;     // default I__<t>
    std::string sym_prefix = "u_";
};

inline Realm& initial_realm(TheoryGraph& g, const TheoryName& t, InitialOptions opts = {}) {
    const Theory& base = g.theory(t);
    if (opts.realm_name.empty()) opts.realm_name = "R__" + t;
    if (opts.face_name.empty()) opts.face_name = t + "_face";
    if (opts.iface_name.empty()) opts.iface_name = "I__" + t;
    if (g.realms.count(opts.realm_name))
        throw Error("DuplicateName", "realm '" + opts.realm_name + "' already exists");

    std::map<SymbolName, SymbolName> rename;
    std::set<std::string> used;
    for (const auto& d : base.decls) used.insert(opts.sym_prefix + d.name);
    for (const auto& d : base.decls)
        if (d.introduces_symbol())
            rename[d.name] = opts.sym_prefix + d.name;

    Theory face;
    face.name = opts.face_name;
    for (const auto& d : base.decls) {
        switch (d.kind) {
            case DeclKind::Symbol: {
                Declaration c = d;
                c.name = rename[d.name];
                c.sig = detail::rename_sig(d.sig, rename);
                face.decls.push_back(std::move(c));
                break;
            }
            case DeclKind::Definition: {
                // the symbol, shorn of its definition...
                Declaration c = Declaration::op(rename[d.name],
                                                detail::rename_sig(d.sig, rename), d.glyph);
                face.decls.push_back(std::move(c));
                // ...and its defining equation as a face axiom
                face.decls.push_back(Declaration::axiom(
                    fresh_name(rename[d.name] + "_def", used),
                    detail::rename_symbols(d.body, rename)));
                break;
            }
            case DeclKind::Axiom:
                face.decls.push_back(Declaration::axiom(fresh_name(d.name, used),
                                                        detail::rename_symbols(d.body, rename)));
                break;
            case DeclKind::Theorem:
                face.decls.push_back(Declaration::axiom(fresh_name(d.name, used),
                                                        detail::rename_symbols(d.body, rename)));
                break;
        }
        used.insert(face.decls.back().name);
    }
    add_theory(g, std::move(face));

    View iface;
    iface.name = opts.iface_name;
    iface.source = opts.face_name;
    iface.target = t;
    for (const auto& [orig, copy] : rename) iface.entries[copy] = ViewTarget::to(orig);
    CheckReport rep = check_view(g, iface);
    for (const auto& p : rep.problems)
        if (p.severity == Severity::Error) throw Error(p.code, p.message);
    auto_discharge(g, iface);
    g.views.emplace(iface.name, std::move(iface));

    View& id = inclusion_view(g, t, t, "id__" + t);
    Realm r;
    r.name = opts.realm_name;
    r.face = opts.face_name;
    r.pillars.push_back({"p1", t, t, opts.iface_name});
    r.equivs.push_back(id.name);
    auto [it, ok] = g.realms.emplace(r.name, std::move(r));
    (void)ok;
    return it->second;
}

// ---------------------------------------------------------------------------
// Lifting a view between pillar tops to a (possibly partial) view between
// faces: chase each face symbol through the first interface, across the
// view, and back through the second interface.  Undefined exactly where the
// image lands outside the second interface's range.

struct PartialView {
    View base;
    std::set<SymbolName> undefined;  // face symbols with no lifted entry
    bool total() const { return undefined.empty(); }
};

inline PartialView lift_view(TheoryGraph& g, const Realm& r1, const Realm& r2,
                             const ViewName& vname, bool register_if_total = true) {
    const View& v = g.view(vname);
    const Pillar* p1 = nullptr;
    const Pillar* p2 = nullptr;
    for (const auto& p : r1.pillars)
        if (p.top == v.source) p1 = &p;
    for (const auto& p : r2.pillars)
        if (p.top == v.target) p2 = &p;
    if (!p1)
        throw Error("PillarNotFound", "realm '" + r1.name + "' has no pillar with top '" +
                                          v.source + "'");
    if (!p2)
        throw Error("PillarNotFound", "realm '" + r2.name + "' has no pillar with top '" +
                                          v.target + "'");
    const View& i1 = g.view(p1->interface);
    const View& i2 = g.view(p2->interface);

    // invert the second interface on its (injective) symbol range
    std::map<SymbolName, SymbolName> inv2;
    for (const auto& [s, e] : i2.entries)
        if (e.kind == ViewTarget::Kind::Symbol) inv2.emplace(e.symbol, s);

    PartialView out;
    out.base.name = "lift__" + vname;
    out.base.source = r1.face;
    out.base.target = r2.face;
    for (const auto* d : g.theory(r1.face).symbols()) {
        const ViewTarget* e1 = i1.entry(d->name);
        if (!e1 || e1->kind != ViewTarget::Kind::Symbol) {
            out.undefined.insert(d->name);
            continue;
        }
        const ViewTarget* ev = v.entry(e1->symbol);
        if (!ev || ev->kind != ViewTarget::Kind::Symbol) {
            out.undefined.insert(d->name);
            continue;
        }
        auto back = inv2.find(ev->symbol);
        if (back == inv2.end()) {
            out.undefined.insert(d->name);
            continue;
        }
        out.base.entries[d->name] = ViewTarget::to(back->second);
    }
    if (out.total() && register_if_total && !g.views.count(out.base.name)) {
        CheckReport rep = check_view(g, out.base);
        if (rep.ok()) {
            auto_discharge(g, out.base);
            g.views.emplace(out.base.name, out.base);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Conservative extension of one pillar: append a symbol, definition or
// theorem to its top (new axioms are exactly what conservativity forbids).
// Optionally the face grows a mirror declaration; every other pillar then
// needs a counterpart symbol in its own top to keep its interface total.

struct ExtendOptions {
    std::vector<Declaration> face_decls;  // mirror declarations for the face
    std::map<std::string, SymbolName> counterparts;  // pillar name -> top symbol
    TheoryName new_top_name;   // default <top>__<decl>
    TheoryName new_face_name;  // default <face>__<decl>
};

inline Realm& extend_realm(TheoryGraph& g, const RealmName& realm_name,
                           const std::string& pillar_name, const Declaration& decl,
                           ExtendOptions opts = {}) {
    Realm& r = g.realms.at(realm_name);
    Pillar* pp = nullptr;
    for (auto& p : r.pillars)
        if (p.name == pillar_name) pp = &p;
    if (!pp)
        throw Error("PillarNotFound",
                    "realm '" + realm_name + "' has no pillar '" + pillar_name + "'");
    if (decl.kind == DeclKind::Axiom)
        throw Error("NotConservativeDecl", "extending pillar '" + pillar_name +
                                               "' with axiom '" + decl.name +
                                               "' would not be conservative");
    for (const auto& fd : opts.face_decls)
        if (fd.kind == DeclKind::Definition || fd.kind == DeclKind::Theorem)
            throw Error("FaceWouldBeNonPrimitive",
                        "face declarations must be symbols or axioms; '" + fd.name + "' is a " +
                            decl_kind_name(fd.kind));

    TheoryName new_top =
        opts.new_top_name.empty() ? pp->top + "__" + decl.name : opts.new_top_name;
    add_theory(g, theory_cons(g.theory(pp->top), {decl}, new_top));
    add_extension_edge(g, pp->top, new_top);
    TheoryName old_top = pp->top;
    pp->top = new_top;

    bool face_grows = !opts.face_decls.empty();
    TheoryName new_face = r.face;
    if (face_grows) {
        new_face = opts.new_face_name.empty() ? r.face + "__" + opts.face_decls.front().name
                                              : opts.new_face_name;
        add_theory(g, theory_cons(g.theory(r.face), opts.face_decls, new_face));
        add_extension_edge(g, r.face, new_face);
    }

    // rebuild interfaces against the new face and/or new top
    for (auto& p : r.pillars) {
        bool retarget = p.name == pillar_name;
        if (!face_grows && !retarget) continue;
        const View& old_iface = g.view(p.interface);
        View ni;
        ni.name = p.interface + "__" + decl.name;
        ni.source = new_face;
        ni.target = p.top;
        ni.entries = old_iface.entries;
        for (const auto& fd : opts.face_decls) {
            if (!fd.introduces_symbol()) continue;
            if (retarget) {
                ni.entries[fd.name] = ViewTarget::to(decl.name);
            } else {
                auto it = opts.counterparts.find(p.name);
                if (it == opts.counterparts.end())
                    throw Error("MissingCounterpart",
                                "face symbol '" + fd.name + "' needs a counterpart in pillar '" +
                                    p.name + "'");
                ni.entries[fd.name] = ViewTarget::to(it->second);
            }
        }
        for (const auto& o : old_iface.obligations)  // keep earlier discharge work
            ni.obligations.push_back(o);
        CheckReport rep = check_view(g, ni);
        for (const auto& pr : rep.problems)
            if (pr.severity == Severity::Error) throw Error(pr.code, pr.message);
        auto_discharge(g, ni);
        g.views.emplace(ni.name, std::move(ni));
        p.interface = p.interface + "__" + decl.name;
    }
    r.face = new_face;
    return r;
}

// ---------------------------------------------------------------------------
// Copying a development along a view.  The copy is grafted at the view's
// target: each node's suffix beyond the development's bottom is translated
// along the view, with freshly prefixed symbol names.  A translated
// declaration that already exists at the graft point (same defining
// equation, or a duplicate statement) is dropped and the rename map points
// at the existing symbol; a node whose whole suffix dissolves that way is
// identified with the graft point rather than copied.

struct CopyResult {
    Development dev;                               // the copied development
    std::map<TheoryName, TheoryName> theories;     // original -> copy
    std::map<SymbolName, SymbolName> symbols;      // suffix symbol -> copied name
    std::map<TheoryName, ViewName> views;          // original -> view onto its copy
    std::vector<Diag> notes;                       // renames, dedups
};

inline CopyResult copy_development_along_view(TheoryGraph& g, const Development& d,
                                              const ViewName& via, std::string prefix = {},
                                              const std::set<SymbolName>* keep_only = nullptr) {
    const View& w = g.view(via);
    if (w.source != d.bottom)
        throw Error("ComposeMismatch", "view '" + via + "' must start at the development bottom '" +
                                           d.bottom + "'");
    const Theory& graft = g.theory(w.target);
    const Theory& bottom = g.theory(d.bottom);
    if (prefix.empty()) prefix = via + "__";

    CopyResult out;
    out.theories[d.bottom] = w.target;

    // translate one suffix declaration, given entries for everything prior
    View carry = w;  // w plus entries for already-copied suffix symbols
    std::set<std::string> used;
    for (const auto& dd : graft.decls) used.insert(dd.name);

    std::vector<Declaration> copied_suffix;  // accumulated full suffix of the copy
    std::map<size_t, size_t> copied_upto;    // original suffix length -> copied suffix length

    const std::vector<Declaration> full_suffix = suffix(bottom, g.theory(d.top));
    // nodes in ascending suffix length = topological order along the chain;
    // a DAG's nodes all sit on the bottom-to-top prefix chain of decl lists
    std::vector<const Theory*> nodes;
    for (const auto& n : d.nodes) nodes.push_back(&g.theory(n));
    std::sort(nodes.begin(), nodes.end(), [](const Theory* a, const Theory* b) {
        return a->decls.size() < b->decls.size();
    });

    size_t done = 0;  // how many suffix decls processed so far
    for (const Theory* node : nodes) {
        size_t len = node->decls.size() - bottom.decls.size();
        for (size_t k = done; k < len; ++k) {
            const Declaration& sd = full_suffix[k];
            if (keep_only && sd.introduces_symbol() && !keep_only->count(sd.name)) {
                out.notes.push_back({"Minimal", "skipped '" + sd.name + "' (not needed)",
                                     {}, Severity::Note});
                continue;
            }
            if (keep_only && !sd.introduces_symbol()) continue;
            std::string copy_name = fresh_name(prefix + sd.name, used);
            Declaration cd = sd;
            cd.name = copy_name;
            if (sd.introduces_symbol()) {
                cd.sig = sd.sig.is_sort ? sd.sig : translate_sig(carry, sd.sig);
                cd.glyph.clear();  // glyphs stay with the originals
            }
            if (sd.has_formula()) {
                // translate via everything mapped so far, with the defined
                // symbol itself temporarily mapped to its copy
                if (sd.introduces_symbol()) carry.entries[sd.name] = ViewTarget::to(copy_name);
                cd.body = translate_formula(g, carry, sd.body);
                if (sd.introduces_symbol()) carry.entries.erase(sd.name);
            }
            // dedup: an identical concept already at the graft point?
            bool dropped = false;
            for (const auto& gd : graft.decls) {
                if (sd.kind == DeclKind::Definition && gd.kind == DeclKind::Definition &&
                    gd.sig == cd.sig) {
                    Formula renamed =
                        detail::rename_symbols(cd.body, {{copy_name, gd.name}});
                    if (alpha_eq_mod_prefix(renamed, gd.body)) {
                        out.symbols[sd.name] = gd.name;
                        out.notes.push_back({"Dedup",
                                             "'" + sd.name + "' already present as '" + gd.name +
                                                 "'",
                                             {},
                                             Severity::Note});
                        dropped = true;
                        break;
                    }
                }
                if (!sd.introduces_symbol() && gd.has_formula() &&
                    alpha_eq_mod_prefix(cd.body, gd.body)) {
                    out.notes.push_back({"Dedup",
                                         "statement '" + sd.name + "' already present as '" +
                                             gd.name + "'",
                                         {},
                                         Severity::Note});
                    dropped = true;
                    break;
                }
            }
            if (dropped) {
                if (sd.introduces_symbol())
                    carry.entries[sd.name] = ViewTarget::to(out.symbols[sd.name]);
                continue;
            }
            used.insert(copy_name);
            if (sd.introduces_symbol()) {
                out.symbols[sd.name] = copy_name;
                carry.entries[sd.name] = ViewTarget::to(copy_name);
            }
            copied_suffix.push_back(std::move(cd));
        }
        done = std::max(done, len);
        copied_upto[len] = copied_suffix.size();
    }

    // materialize copied nodes (skipping ones that dissolved into the graft)
    std::map<size_t, TheoryName> node_name_at;
    node_name_at[copied_upto[0]] = w.target;
    for (const Theory* node : nodes) {
        size_t len = node->decls.size() - bottom.decls.size();
        size_t clen = copied_upto[len];
        if (node_name_at.count(clen)) {
            out.theories[node->name] = node_name_at[clen];
            continue;
        }
        Theory copy;
        copy.name = prefix + node->name;
        while (g.has_theory(copy.name)) copy.name += "_2";
        copy.decls = graft.decls;
        copy.decls.insert(copy.decls.end(), copied_suffix.begin(),
                          copied_suffix.begin() + static_cast<long>(clen));
        add_theory(g, copy);
        node_name_at[clen] = copy.name;
        out.theories[node->name] = copy.name;
    }
    // mirror the development's edges between the copies
    std::vector<std::pair<TheoryName, TheoryName>> mirrored;
    for (const auto& e : g.edges)
        if (d.contains(e.base) && d.contains(e.ext))
            mirrored.emplace_back(out.theories[e.base], out.theories[e.ext]);
    for (const auto& [cb, ce] : mirrored)
        if (cb != ce) add_extension_edge(g, cb, ce);
    if (out.theories[d.bottom] != out.theories[d.top])
        add_extension_edge(g, out.theories[d.bottom], out.theories[d.top]);

    // per-node views original -> copy, inheriting the parent view's
    // discharge work for statements that predate the copy
    for (const Theory* node : nodes) {
        if (node->name == d.bottom) {
            out.views[d.bottom] = via;  // the copy view of the bottom is w itself
            continue;
        }
        View nv;
        nv.name = fresh_view_name(g, prefix + "into__" + node->name);
        nv.source = node->name;
        nv.target = out.theories[node->name];
        nv.entries = w.entries;
        bool covered = true;
        for (const auto& nd : node->decls) {
            if (!nd.introduces_symbol() || bottom.declares(nd.name)) continue;
            auto it = out.symbols.find(nd.name);
            if (it == out.symbols.end()) {
                covered = false;  // dropped by a minimal copy; no total view exists
                break;
            }
            nv.entries[nd.name] = ViewTarget::to(it->second);
        }
        if (!covered) continue;
        CheckReport rep = check_view(g, nv);
        for (const auto& pr : rep.problems)
            if (pr.severity == Severity::Error) throw Error(pr.code, pr.message);
        auto_discharge(g, nv);
        for (auto& o : nv.obligations) {
            if (o.status != ObStatus::Open) continue;
            for (const auto& po : w.obligations)
                if (po.origin == o.origin && po.status != ObStatus::Open) {
                    o.status = po.status;
                    o.checked_size = po.checked_size;
                    o.via = "inherited from " + w.name +
                            (po.via.empty() ? "" : " (" + po.via + ")");
                    break;
                }
        }
        out.views[node->name] = nv.name;
        g.views.emplace(nv.name, std::move(nv));
    }
    out.dev = development(g, w.target, out.theories[d.top]);
    return out;
}

// ---------------------------------------------------------------------------
// Merging two realms along a pair of views between their pillars: each
// realm's development is copied along the incoming view onto the other
// realm's top, the faces are united (symbols are identified when the
// composed interfaces agree on them), and every interface is extended over
// the united face.  The two views join the equivalence pool.

struct MergeOptions {
    RealmName name;            // default <r1>__<r2>
    TheoryName face_name;      // default <face1>__<face2>
    bool minimal = false;      // copy only what the interfaces need
    int oblig_check_size = 4;  // close leftover interface obligations up to here (0 = leave open)
    int witness_check_size = 2;  // evidence bound for synthesized witnesses (0 = skip)
};

namespace detail {

// symbols of the development suffix that an interface image needs, closed
// under definiens and signature dependencies
inline std::set<SymbolName> needed_suffix_symbols(const TheoryGraph& g, const View& iface,
                                                  const Theory& bottom, const Theory& top) {
    std::set<SymbolName> in_suffix;
    for (const auto& d : suffix(bottom, top))
        if (d.introduces_symbol()) in_suffix.insert(d.name);
    std::set<SymbolName> needed;
    for (const auto& [s, e] : iface.entries) {
        (void)s;
        if (e.kind == ViewTarget::Kind::Symbol && in_suffix.count(e.symbol))
            needed.insert(e.symbol);
    }
    const auto& decls = top.decls;
    for (auto it = decls.rbegin(); it != decls.rend(); ++it) {
        if (!needed.count(it->name)) continue;
        for (const auto& a : it->sig.args)
            if (in_suffix.count(a)) needed.insert(a);
        if (in_suffix.count(it->sig.result)) needed.insert(it->sig.result);
        if (!it->has_formula()) continue;
        std::vector<const Term*> work;
        std::vector<const Formula*> fs{&it->body};
        while (!fs.empty()) {
            const Formula* f = fs.back();
            fs.pop_back();
            if (f->kind == Formula::Kind::Eq) {
                work.push_back(&f->lhs);
                work.push_back(&f->rhs);
            }
            for (const auto& k : f->kids) fs.push_back(&k);
        }
        while (!work.empty()) {
            const Term* t = work.back();
            work.pop_back();
            if (!t->is_var() && in_suffix.count(t->head)) needed.insert(t->head);
            for (const auto& a : t->args) work.push_back(&a);
        }
    }
    return needed;
}

// identity-on-image endomorphism that expands copied definitions back into
// image terms; usable as an expansivity witness when it checks out
inline void synthesize_witness(TheoryGraph& g, const ViewName& iface_name, int check_size) {
    View& iface = g.view_mut(iface_name);
    const Theory& top = g.theory(iface.target);
    std::set<SymbolName> image;
    for (const auto& [s, e] : iface.entries) {
        (void)s;
        if (e.kind == ViewTarget::Kind::Symbol) image.insert(e.symbol);
    }
    View wit;
    wit.name = fresh_view_name(g, iface_name + "__witness");
    wit.source = top.name;
    wit.target = top.name;
    for (const auto& d : top.decls) {
        if (!d.introduces_symbol()) continue;
        if (image.count(d.name) || d.kind == DeclKind::Symbol) {
            wit.entries[d.name] = ViewTarget::to(d.name);
            continue;
        }
        // non-image definition: expand to its (witnessed) definiens
        auto dp = def_parts(d);
        if (!dp) return;  // malformed definition; no witness to be had
        detail::Translator tr{wit, {}};
        all_var_names(dp->rhs, tr.used);
        Term body = tr.term(dp->rhs);
        // splicing an earlier template into this body adds fresh variables;
        // they are extras of this template, same as in build_view
        std::vector<std::string> extras;
        std::set<std::string> params(dp->params.begin(), dp->params.end());
        for (const auto& x : free_vars(body))
            if (!params.count(x)) extras.push_back(x);
        wit.entries[d.name] = ViewTarget::tmpl(dp->params, std::move(extras), std::move(body));
    }
    CheckReport rep = check_view(g, wit);
    if (!rep.ok()) return;  // witness is optional evidence, never fatal
    auto_discharge(g, wit);
    std::vector<std::string> open;
    for (const auto& o : wit.obligations)
        if (o.status == ObStatus::Open) open.push_back(o.origin);
    ViewName wname = wit.name;
    g.views.emplace(wname, std::move(wit));
    try {
        for (const auto& origin : open) {
            SearchBudget b;
            FiniteCheckResult fr =
                finite_check_obligation(g, g.view_mut(wname), origin, check_size, b);
            if (!fr.closed) return;
        }
        CheckReport exp = is_expansive(g, g.view_mut(iface_name), wname);
        if (!exp.ok()) return;
        SearchBudget fb;
        faithful_evidence(g, g.view_mut(iface_name), check_size, fb);
    } catch (const Error&) {
        // budget ran out probing; leave the interface without witness evidence
    }
}

}  // namespace detail

inline Realm& merge_realms(TheoryGraph& g, const RealmName& r1n, const RealmName& r2n,
                           const ViewName& vn, const ViewName& wn, MergeOptions opts = {}) {
    Realm r1 = g.realm(r1n);  // copies: the merge builds a new realm
    Realm r2 = g.realm(r2n);
    const View& v = g.view(vn);
    const View& w = g.view(wn);
    if (opts.name.empty()) opts.name = r1n + "__" + r2n;
    if (opts.face_name.empty()) opts.face_name = r1.face + "__" + r2.face;
    if (g.realms.count(opts.name))
        throw Error("DuplicateName", "realm '" + opts.name + "' already exists");

    auto find_pillar = [](const Realm& r, auto pred, const std::string& what) -> const Pillar& {
        for (const auto& p : r.pillars)
            if (pred(p)) return p;
        throw Error("PillarNotFound", "realm '" + r.name + "' has no pillar " + what);
    };
    const Pillar& pv = find_pillar(
        r1, [&](const Pillar& p) { return p.bottom == v.source; },
        "with bottom '" + v.source + "' (source of '" + vn + "')");
    const Pillar& qv = find_pillar(
        r2, [&](const Pillar& p) { return p.top == v.target; },
        "with top '" + v.target + "' (target of '" + vn + "')");
    const Pillar& qw = find_pillar(
        r2, [&](const Pillar& p) { return p.bottom == w.source; },
        "with bottom '" + w.source + "' (source of '" + wn + "')");
    const Pillar& pw = find_pillar(
        r1, [&](const Pillar& p) { return p.top == w.target; },
        "with top '" + w.target + "' (target of '" + wn + "')");

    const View& i1 = g.view(pw.interface);
    const View& i2 = g.view(qv.interface);
    const View& i2w = g.view(qw.interface);
    const View& i1v = g.view(pv.interface);

    Development dev1 = development(g, pv.bottom, pv.top);
    Development dev2 = development(g, qw.bottom, qw.top);

    std::set<SymbolName> need1, need2;
    if (opts.minimal) {
        need1 = detail::needed_suffix_symbols(g, i2w, g.theory(qw.bottom), g.theory(qw.top));
        need2 = detail::needed_suffix_symbols(g, i1v, g.theory(pv.bottom), g.theory(pv.top));
    }
    CopyResult c2into1 = copy_development_along_view(g, dev2, wn, wn + "__",
                                                     opts.minimal ? &need1 : nullptr);
    CopyResult c1into2 = copy_development_along_view(g, dev1, vn, vn + "__",
                                                     opts.minimal ? &need2 : nullptr);
    TheoryName new_top1 = c2into1.theories.at(qw.top);
    TheoryName new_top2 = c1into2.theories.at(pv.top);

    // composed entry maps into the grafted tops, for face identification
    auto chase = [](const View& iface, const std::map<SymbolName, SymbolName>& copy_syms,
                    const View& base_view, const SymbolName& s) -> std::optional<SymbolName> {
        const ViewTarget* e = iface.entry(s);
        if (!e || e->kind != ViewTarget::Kind::Symbol) return std::nullopt;
        if (auto it = copy_syms.find(e->symbol); it != copy_syms.end()) return it->second;
        const ViewTarget* be = base_view.entry(e->symbol);
        if (be && be->kind == ViewTarget::Kind::Symbol) return be->symbol;
        return std::nullopt;
    };
    const Theory& face1 = g.theory(r1.face);
    const Theory& face2 = g.theory(r2.face);
    // face1 symbols land in new_top1 via their own interface, face2 symbols
    // by composing through w's copy; and dually for new_top2
    auto into1 = [&](const SymbolName& s, bool from_f1) -> std::optional<SymbolName> {
        if (from_f1) {
            const ViewTarget* e = i1.entry(s);
            if (e && e->kind == ViewTarget::Kind::Symbol) return e->symbol;
            return std::nullopt;
        }
        return chase(i2w, c2into1.symbols, w, s);
    };
    auto into2 = [&](const SymbolName& s, bool from_f1) -> std::optional<SymbolName> {
        if (!from_f1) {
            const ViewTarget* e = i2.entry(s);
            if (e && e->kind == ViewTarget::Kind::Symbol) return e->symbol;
            return std::nullopt;
        }
        return chase(i1v, c1into2.symbols, v, s);
    };

    // identify face symbols on which the composed interfaces agree
    std::map<SymbolName, SymbolName> f2rename;  // face2 symbol -> merged name
    const auto f1_syms = face1.symbols();
    for (const auto* d2 : face2.symbols()) {
        auto a1 = into1(d2->name, false);
        auto a2 = into2(d2->name, false);
        for (const auto* d1 : f1_syms) {
            bool same1 = a1 && into1(d1->name, true) == a1;
            bool same2 = a2 && into2(d1->name, true) == a2;
            if (!same1 && !same2) continue;
            if (d1->sig.is_sort != d2->sig.is_sort)
                throw Error("FaceMergeConflict", "face symbols '" + d1->name + "' and '" +
                                                     d2->name + "' are identified but disagree "
                                                     "on being a sort");
            f2rename[d2->name] = d1->name;
            break;
        }
    }

    // build the united face: all of face1, then whatever face2 adds
    Theory face;
    face.name = opts.face_name;
    face.decls = face1.decls;
    std::set<std::string> used;
    for (const auto& d : face.decls) used.insert(d.name);
    std::vector<Formula> have_facts;
    for (const auto& d : face.decls)
        if (d.has_formula()) have_facts.push_back(d.body);
    for (const auto& d : face2.decls) {
        if (d.introduces_symbol()) {
            auto it = f2rename.find(d.name);
            if (it != f2rename.end()) {
                // identified with a face1 symbol: signatures must agree
                const Declaration* d1 = face1.find(it->second);
                if (detail::rename_sig(d.sig, f2rename) != d1->sig)
                    throw Error("FaceMergeConflict",
                                "face symbols '" + d1->name + "' and '" + d.name +
                                    "' are identified but their signatures differ");
                continue;
            }
            Declaration c = d;
            c.name = fresh_name(d.name, used);
            if (c.name != d.name)
                f2rename[d.name] = c.name;  // carried into later face2 formulas
            c.sig = detail::rename_sig(d.sig, f2rename);
            used.insert(c.name);
            face.decls.push_back(std::move(c));
        } else {
            Formula body = detail::rename_symbols(d.body, f2rename);
            bool dup = std::any_of(have_facts.begin(), have_facts.end(), [&](const Formula& f) {
                return alpha_eq_mod_prefix(f, body);
            });
            if (dup) continue;
            Declaration c = Declaration::axiom(fresh_name(d.name, used), std::move(body));
            used.insert(c.name);
            have_facts.push_back(c.body);
            face.decls.push_back(std::move(c));
        }
    }
    add_theory(g, face);

    // assemble the merged realm: every pillar keeps its bottom, grafted
    // pillars get the copied top, and all interfaces run from the new face
    Realm merged;
    merged.name = opts.name;
    merged.face = opts.face_name;
    struct Side {
        const Realm* r;
        const TheoryName graft_at;  // old top that was grafted
        const TheoryName new_top;
        bool is_first;
    };
    const Side sides[2] = {{&r1, pw.top, new_top1, true}, {&r2, qv.top, new_top2, false}};
    for (const Side& side : sides) {
        for (const auto& p : side.r->pillars) {
            Pillar np;
            np.name = side.r->name + "__" + p.name;
            np.bottom = p.bottom;
            np.top = p.top == side.graft_at ? side.new_top : p.top;
            View ni;
            ni.name = fresh_view_name(g, p.interface + "__" + (side.is_first ? wn : vn));
            ni.source = opts.face_name;
            ni.target = np.top;
            const View& old_iface = g.view(p.interface);
            for (const auto* fd : g.theory(opts.face_name).symbols()) {
                // a face1 name keeps its old entry; face2 contributions come
                // through the composed map
                const ViewTarget* e = old_iface.entry(fd->name);
                if (side.is_first) {
                    if (e) {
                        ni.entries[fd->name] = *e;
                        continue;
                    }
                    SymbolName orig = fd->name;  // undo a clash rename if any
                    for (const auto& [o, m] : f2rename)
                        if (m == fd->name) orig = o;
                    auto tgt = into1(orig, false);
                    if (!tgt)
                        throw Error("MergeUnsupported",
                                    "pillar '" + np.name + "' has no image for face symbol '" +
                                        fd->name + "'");
                    ni.entries[fd->name] = ViewTarget::to(*tgt);
                } else {
                    SymbolName f2name = fd->name;
                    bool from_f2 = face2.declares(fd->name) && !f2rename.count(fd->name);
                    for (const auto& [o, m] : f2rename)
                        if (m == fd->name && face2.declares(o)) {
                            f2name = o;
                            from_f2 = true;
                        }
                    auto tgt = from_f2 ? into2(f2name, false) : into2(fd->name, true);
                    if (!tgt)
                        throw Error("MergeUnsupported",
                                    "pillar '" + np.name + "' has no image for face symbol '" +
                                        fd->name + "'");
                    ni.entries[fd->name] = ViewTarget::to(*tgt);
                }
            }
            CheckReport rep = check_view(g, ni);
            for (const auto& pr : rep.problems)
                if (pr.severity == Severity::Error) throw Error(pr.code, pr.message);
            auto_discharge(g, ni);
            // carry over discharge work from the old interface by origin
            for (auto& o : ni.obligations) {
                if (o.status != ObStatus::Open) continue;
                const Obligation* po = old_iface.obligation(o.origin);
                if (po && po->status != ObStatus::Open &&
                    alpha_eq_mod_prefix(po->statement, o.statement)) {
                    o.status = po->status;
                    o.checked_size = po->checked_size;
                    o.via = po->via;
                }
            }
            np.interface = ni.name;
            g.views.emplace(ni.name, std::move(ni));
            merged.pillars.push_back(std::move(np));
        }
    }

    for (const auto& e : r1.equivs) merged.equivs.push_back(e);
    for (const auto& e : r2.equivs)
        if (std::find(merged.equivs.begin(), merged.equivs.end(), e) == merged.equivs.end())
            merged.equivs.push_back(e);
    for (const auto& e : {vn, wn})
        if (std::find(merged.equivs.begin(), merged.equivs.end(), e) == merged.equivs.end())
            merged.equivs.push_back(e);

    // close what discharge could not, with recorded finite evidence
    if (opts.oblig_check_size > 0) {
        for (const auto& p : merged.pillars) {
            View& iv = g.view_mut(p.interface);
            std::vector<std::string> open;
            for (const auto& o : iv.obligations)
                if (o.status == ObStatus::Open) open.push_back(o.origin);
            for (const auto& origin : open) {
                SearchBudget b;
                finite_check_obligation(g, iv, origin, opts.oblig_check_size, b);
            }
        }
    }
    if (opts.witness_check_size > 0)
        for (const auto& p : merged.pillars)
            detail::synthesize_witness(g, p.interface, opts.witness_check_size);

    auto [it, ok] = g.realms.emplace(merged.name, std::move(merged));
    (void)ok;
    return it->second;
}

}  // namespace tgk
