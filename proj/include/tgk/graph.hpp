#pragma once

// The theory graph: named theories, extension edges (base must be a literal
// declaration-sequence prefix of the extension), named views between
// theories, and realm descriptions layered on top.  The graph of extension
// edges stays acyclic by construction.
//
// Everything a view or realm refers to lives here by name, so the value
// types for views (translations with proof obligations) and realms (face +
// pillars + equivalences) are defined here too; the algorithms on them live
// in views.hpp and realms.hpp.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tgk/structure.hpp"
#include "tgk/theory.hpp"

namespace tgk {

// ---------------------------------------------------------------------------
// Views.

enum class ObStatus { Open, ByAxiom, ByDefinition, ByTheorem, Assumed, FiniteChecked };

inline const char* ob_status_name(ObStatus s) {
    switch (s) {
        case ObStatus::Open: return "Open";
        case ObStatus::ByAxiom: return "DischargedByAxiom";
        case ObStatus::ByDefinition: return "DischargedByDefinition";
        case ObStatus::ByTheorem: return "DischargedByTheorem";
        case ObStatus::Assumed: return "Assumed";
        case ObStatus::FiniteChecked: return "FiniteChecked";
    }
    return "?";
}

struct Obligation {
    std::string origin;  // name of the source declaration that induced it
    Formula statement;   // translated statement, in the target language
    ObStatus status = ObStatus::Open;
    std::string via;      // discharging theorem / axiom / note
    int checked_size = 0; // FiniteChecked bound
    std::optional<FiniteStructure> countermodel;  // left by a failed finite check
};

// Where a view sends one source symbol: another symbol, or a target-language
// term template (how definitions are translated out of existence, written
// `expand` in source files).  Template extras are universally quantified
// variables of the definiens beyond the parameters; each occurrence
// instantiates them fresh.
struct ViewTarget {
    enum class Kind { Symbol, Term };
    Kind kind = Kind::Symbol;
    SymbolName symbol;
    std::vector<std::string> params;
    std::vector<std::string> extras;
    Term body;

    static ViewTarget to(SymbolName s) {
        ViewTarget t;
        t.symbol = std::move(s);
        return t;
    }
    static ViewTarget tmpl(std::vector<std::string> params, std::vector<std::string> extras,
                           Term body) {
        ViewTarget t;
        t.kind = Kind::Term;
        t.params = std::move(params);
        t.extras = std::move(extras);
        t.body = std::move(body);
        return t;
    }
};

struct View {
    ViewName name;
    TheoryName source, target;
    std::map<SymbolName, ViewTarget> entries;
    std::vector<Obligation> obligations;  // one per source axiom/definition/theorem
    bool identity = false;
    bool inclusion = false;
    std::optional<ViewName> expansive_witness;  // endo-view of the target, if recorded
    int faithful_checked_size = 0;              // largest size faithfulness probing covered
    int cons_checked_size = 0;  // finite conservativity evidence, when used as an interface

    const ViewTarget* entry(const SymbolName& s) const {
        auto it = entries.find(s);
        return it == entries.end() ? nullptr : &it->second;
    }
    Obligation* obligation(const std::string& origin) {
        for (auto& o : obligations)
            if (o.origin == origin) return &o;
        return nullptr;
    }
    const Obligation* obligation(const std::string& origin) const {
        for (const auto& o : obligations)
            if (o.origin == origin) return &o;
        return nullptr;
    }
    bool all_discharged() const {
        return std::none_of(obligations.begin(), obligations.end(),
                            [](const Obligation& o) { return o.status == ObStatus::Open; });
    }
};

// ---------------------------------------------------------------------------
// Extension edges and conservativity evidence.  A suffix free of new axioms
// is conservative on sight; an axiom-bearing suffix needs a registered
// back-view that undoes the inclusion.

enum class ConsEvidence { None, Syntactic, ByBackView };

struct ExtensionEdge {
    TheoryName base, ext;
    ConsEvidence cons = ConsEvidence::None;
    ViewName back_view;  // ByBackView only

    bool conservative() const { return cons != ConsEvidence::None; }
};

// ---------------------------------------------------------------------------
// Realms.

struct Pillar {
    std::string name;
    TheoryName bottom, top;
    ViewName interface;  // face -> top
};

struct Realm {
    RealmName name;
    TheoryName face;
    std::vector<Pillar> pillars;
    std::vector<ViewName> equivs;  // establish pairwise equivalence of bottoms

    const Pillar* pillar(const std::string& n) const {
        for (const auto& p : pillars)
            if (p.name == n) return &p;
        return nullptr;
    }
    bool proper() const { return pillars.size() >= 2; }
};

// ---------------------------------------------------------------------------
// The graph itself.

struct TheoryGraph {
    std::map<TheoryName, Theory> theories;
    std::vector<ExtensionEdge> edges;
    std::map<ViewName, View> views;
    std::map<RealmName, Realm> realms;

    bool has_theory(const TheoryName& n) const { return theories.count(n) != 0; }
    const Theory& theory(const TheoryName& n) const {
        auto it = theories.find(n);
        if (it == theories.end()) throw Error("UnknownTheory", "no theory named '" + n + "'");
        return it->second;
    }
    bool has_view(const ViewName& n) const { return views.count(n) != 0; }
    const View& view(const ViewName& n) const {
        auto it = views.find(n);
        if (it == views.end()) throw Error("UnknownView", "no view named '" + n + "'");
        return it->second;
    }
    View& view_mut(const ViewName& n) {
        auto it = views.find(n);
        if (it == views.end()) throw Error("UnknownView", "no view named '" + n + "'");
        return it->second;
    }
    const Realm& realm(const RealmName& n) const {
        auto it = realms.find(n);
        if (it == realms.end()) throw Error("UnknownRealm", "no realm named '" + n + "'");
        return it->second;
    }
    const ExtensionEdge* edge(const TheoryName& base, const TheoryName& ext) const {
        for (const auto& e : edges)
            if (e.base == base && e.ext == ext) return &e;
        return nullptr;
    }
    std::vector<const ExtensionEdge*> edges_from(const TheoryName& t) const {
        std::vector<const ExtensionEdge*> out;
        for (const auto& e : edges)
            if (e.base == t) out.push_back(&e);
        return out;
    }
    std::vector<const ExtensionEdge*> edges_into(const TheoryName& t) const {
        std::vector<const ExtensionEdge*> out;
        for (const auto& e : edges)
            if (e.ext == t) out.push_back(&e);
        return out;
    }
};

inline ViewName fresh_view_name(const TheoryGraph& g, ViewName base) {
    if (!g.views.count(base)) return base;
    int i = 2;
    while (g.views.count(base + "_" + std::to_string(i))) ++i;
    return base + "_" + std::to_string(i);
}

inline bool edge_reachable(const TheoryGraph& g, const TheoryName& from, const TheoryName& to) {
    if (from == to) return true;
    std::set<TheoryName> seen{from};
    std::vector<TheoryName> work{from};
    while (!work.empty()) {
        TheoryName cur = work.back();
        work.pop_back();
        for (const auto* e : g.edges_from(cur)) {
            if (e->ext == to) return true;
            if (seen.insert(e->ext).second) work.push_back(e->ext);
        }
    }
    return false;
}

inline void add_theory(TheoryGraph& g, Theory t) {
    if (g.has_theory(t.name))
        throw Error("DuplicateTheoryName", "theory '" + t.name + "' already in the graph");
    WfReport wf = check_wf(t);
    for (const auto& p : wf.problems)
        if (p.severity == Severity::Error) throw Error(p.code, p.message);
    g.theories.emplace(t.name, std::move(t));
}

inline void add_extension_edge(TheoryGraph& g, const TheoryName& base, const TheoryName& ext) {
    const Theory& b = g.theory(base);
    const Theory& e = g.theory(ext);
    if (g.edge(base, ext)) return;  // idempotent
    if (!is_prefix(b, e))
        throw Error("NotAnExtension",
                    "'" + base + "' is not a declaration prefix of '" + ext + "'");
    // prefix both ways means identical sequences; an edge would close a cycle
    if (base == ext || edge_reachable(g, ext, base))
        throw Error("WouldCreateCycle",
                    "edge " + base + " -> " + ext + " would close an extension cycle");
    ExtensionEdge edge{base, ext, ConsEvidence::Syntactic, {}};
    for (const auto& d : suffix(b, e))
        if (d.kind == DeclKind::Axiom) {
            edge.cons = ConsEvidence::None;
            break;
        }
    g.edges.push_back(std::move(edge));
}

// ---------------------------------------------------------------------------
// Developments: the sub-DAG of everything lying on an extension path from
// `bottom` up to `top`.

struct Development {
    TheoryName bottom, top;
    std::set<TheoryName> nodes;  // includes bottom and top

    bool contains(const TheoryName& t) const { return nodes.count(t) != 0; }
};

namespace detail {

inline std::set<TheoryName> forward_cone(const TheoryGraph& g, const TheoryName& start) {
    std::set<TheoryName> seen{start};
    std::vector<TheoryName> work{start};
    while (!work.empty()) {
        TheoryName cur = work.back();
        work.pop_back();
        for (const auto* e : g.edges_from(cur))
            if (seen.insert(e->ext).second) work.push_back(e->ext);
    }
    return seen;
}

inline std::set<TheoryName> backward_cone(const TheoryGraph& g, const TheoryName& start) {
    std::set<TheoryName> seen{start};
    std::vector<TheoryName> work{start};
    while (!work.empty()) {
        TheoryName cur = work.back();
        work.pop_back();
        for (const auto* e : g.edges_into(cur))
            if (seen.insert(e->base).second) work.push_back(e->base);
    }
    return seen;
}

}  // namespace detail

inline Development development(const TheoryGraph& g, const TheoryName& bottom,
                               const TheoryName& top) {
    g.theory(bottom);
    g.theory(top);
    if (!edge_reachable(g, bottom, top))
        throw Error("NoPath", "no extension path from '" + bottom + "' to '" + top + "'");
    std::set<TheoryName> fwd = detail::forward_cone(g, bottom);
    std::set<TheoryName> bwd = detail::backward_cone(g, top);
    Development d{bottom, top, {}};
    for (const auto& n : fwd)
        if (bwd.count(n)) d.nodes.insert(n);
    return d;
}

// Development from an explicit node set: must have a unique source, a unique
// sink, and every node on a path between them.
struct DevelopmentShape {
    std::vector<Diag> problems;
    std::optional<Development> dev;
    bool ok() const { return dev.has_value() && !has_errors(problems); }
};

inline DevelopmentShape development_from_nodes(const TheoryGraph& g,
                                               const std::set<TheoryName>& nodes) {
    DevelopmentShape shape;
    if (nodes.empty()) {
        shape.problems.push_back({"NoPath", "empty development"});
        return shape;
    }
    std::vector<TheoryName> sources, sinks;
    for (const auto& n : nodes) {
        g.theory(n);
        bool has_in = false, has_out = false;
        for (const auto& e : g.edges) {
            if (e.ext == n && nodes.count(e.base)) has_in = true;
            if (e.base == n && nodes.count(e.ext)) has_out = true;
        }
        if (!has_in) sources.push_back(n);
        if (!has_out) sinks.push_back(n);
    }
    if (sources.size() != 1)
        shape.problems.push_back(
            {"MultipleSources", "development has " + std::to_string(sources.size()) +
                                    " sources; exactly one bottom is required"});
    if (sinks.size() != 1)
        shape.problems.push_back({"MultipleSinks", "development has " +
                                                       std::to_string(sinks.size()) +
                                                       " sinks; exactly one top is required"});
    if (!shape.problems.empty()) return shape;
    Development d{sources.front(), sinks.front(), nodes};
    for (const auto& n : nodes)
        if (!edge_reachable(g, d.bottom, n) || !edge_reachable(g, n, d.top)) {
            shape.problems.push_back(
                {"NoPath", "node '" + n + "' is not on a path from bottom to top"});
            return shape;
        }
    shape.dev = std::move(d);
    return shape;
}

// Every edge inside the development must carry conservativity evidence.
struct ConservativityReport {
    std::vector<Diag> problems;
    bool ok() const { return !has_errors(problems); }
};

inline ConservativityReport is_conservative_development(const TheoryGraph& g,
                                                        const Development& d) {
    ConservativityReport rep;
    for (const auto& e : g.edges) {
        if (!d.contains(e.base) || !d.contains(e.ext)) continue;
        if (!e.conservative())
            rep.problems.push_back(
                {"DevelopmentNotConservative",
                 "edge " + e.base + " -> " + e.ext +
                     " adds axioms and has no registered back-view"});
    }
    return rep;
}

}  // namespace tgk
