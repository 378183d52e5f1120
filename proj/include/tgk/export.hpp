#pragma once

// Serialization of a theory graph: GraphViz DOT for the picture, JSON for
// tooling, and the workspace's own source format so a graph can be saved
// and reloaded.  Discharge work is exported as directives that re-derive
// the same statuses on load.

#include <json.hpp>
#include <set>
#include <string>
#include <vector>

#include "tgk/graph.hpp"
#include "tgk/print.hpp"

namespace tgk {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Finite structures <-> JSON.

inline ordered_json structure_to_json(const FiniteStructure& m) {
    ordered_json j;
    j["carriers"] = ordered_json::object();
    for (const auto& [s, n] : m.carriers) j["carriers"][s] = n;
    j["tables"] = ordered_json::object();
    for (const auto& [op, t] : m.tables) j["tables"][op] = t;
    return j;
}

inline FiniteStructure structure_from_json(const ordered_json& j) {
    FiniteStructure m;
    for (const auto& [s, n] : j.at("carriers").items()) m.carriers[s] = n.get<int>();
    if (j.contains("tables"))
        for (const auto& [op, t] : j.at("tables").items())
            m.tables[op] = t.get<std::vector<int>>();
    return m;
}

// ---------------------------------------------------------------------------
// Graph -> JSON.

namespace detail {

inline const char* cons_name(ConsEvidence c) {
    switch (c) {
        case ConsEvidence::None: return "none";
        case ConsEvidence::Syntactic: return "syntactic";
        case ConsEvidence::ByBackView: return "back-view";
    }
    return "none";
}

inline ordered_json decl_to_json(const Theory& t, const Declaration& d) {
    ordered_json j;
    j["kind"] = decl_kind_name(d.kind);
    j["name"] = d.name;
    if (d.introduces_symbol()) {
        if (d.sig.is_sort) {
            j["sort"] = true;
        } else {
            j["args"] = d.sig.args;
            j["result"] = d.sig.result;
        }
        if (!d.glyph.empty()) j["glyph"] = d.glyph;
    }
    if (d.has_formula()) j["statement"] = show_formula(t, d.body);
    switch (d.just.kind) {
        case Justification::Kind::None: break;
        case Justification::Kind::Citation: j["by"] = "citation: " + d.just.text; break;
        case Justification::Kind::Assumption: j["by"] = "assumption"; break;
        case Justification::Kind::FiniteCheck:
            j["by"] = "finite-check " + std::to_string(d.just.max_size);
            break;
    }
    return j;
}

inline ordered_json view_to_json(const TheoryGraph& g, const View& v) {
    ordered_json j;
    j["source"] = v.source;
    j["target"] = v.target;
    if (v.identity) j["identity"] = true;
    if (v.inclusion) j["inclusion"] = true;
    j["entries"] = ordered_json::object();
    const Theory& t = g.theory(v.target);
    for (const auto& [s, e] : v.entries) {
        if (e.kind == ViewTarget::Kind::Symbol) {
            j["entries"][s] = e.symbol;
        } else {
            ordered_json te;
            te["params"] = e.params;
            if (!e.extras.empty()) te["extras"] = e.extras;
            te["body"] = show_term(t, e.body);
            j["entries"][s] = te;
        }
    }
    j["obligations"] = ordered_json::array();
    for (const auto& o : v.obligations) {
        ordered_json jo;
        jo["origin"] = o.origin;
        jo["statement"] = show_formula(t, o.statement);
        jo["status"] = ob_status_name(o.status);
        if (!o.via.empty()) jo["via"] = o.via;
        if (o.status == ObStatus::FiniteChecked) jo["checked_size"] = o.checked_size;
        if (o.countermodel) jo["countermodel"] = structure_to_json(*o.countermodel);
        j["obligations"].push_back(std::move(jo));
    }
    if (v.expansive_witness) j["expansive_witness"] = *v.expansive_witness;
    if (v.faithful_checked_size > 0) j["faithful_checked_size"] = v.faithful_checked_size;
    if (v.cons_checked_size > 0) j["cons_checked_size"] = v.cons_checked_size;
    return j;
}

}  // namespace detail

inline ordered_json graph_to_json(const TheoryGraph& g) {
    ordered_json j;
    j["theories"] = ordered_json::object();
    for (const auto& [name, t] : g.theories) {
        ordered_json jt;
        jt["decls"] = ordered_json::array();
        for (const auto& d : t.decls) jt["decls"].push_back(detail::decl_to_json(t, d));
        j["theories"][name] = std::move(jt);
    }
    j["edges"] = ordered_json::array();
    for (const auto& e : g.edges) {
        ordered_json je;
        je["base"] = e.base;
        je["ext"] = e.ext;
        je["conservative"] = detail::cons_name(e.cons);
        if (!e.back_view.empty()) je["back_view"] = e.back_view;
        j["edges"].push_back(std::move(je));
    }
    j["views"] = ordered_json::object();
    for (const auto& [name, v] : g.views) j["views"][name] = detail::view_to_json(g, v);
    j["realms"] = ordered_json::object();
    for (const auto& [name, r] : g.realms) {
        ordered_json jr;
        jr["face"] = r.face;
        jr["pillars"] = ordered_json::array();
        for (const auto& p : r.pillars) {
            ordered_json jp;
            jp["name"] = p.name;
            jp["bottom"] = p.bottom;
            jp["top"] = p.top;
            jp["interface"] = p.interface;
            jr["pillars"].push_back(std::move(jp));
        }
        jr["equivs"] = r.equivs;
        j["realms"][name] = std::move(jr);
    }
    return j;
}

// ---------------------------------------------------------------------------
// Graph -> DOT.  Extensions point upward; conservative ones are drawn with
// a doubled line, views dashed.  Face theories get a double border.

inline std::string graph_to_dot(const TheoryGraph& g) {
    auto q = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') out += '\\';
            out += c;
        }
        return out + "\"";
    };
    std::set<TheoryName> faces;
    for (const auto& [n, r] : g.realms) {
        (void)n;
        faces.insert(r.face);
    }
    std::string s = "digraph theories {\n  rankdir=BT;\n  node [shape=box];\n";
    for (const auto& [name, t] : g.theories) {
        (void)t;
        s += "  " + q(name);
        if (faces.count(name)) s += " [peripheries=2]";
        s += ";\n";
    }
    for (const auto& e : g.edges) {
        s += "  " + q(e.base) + " -> " + q(e.ext);
        if (e.conservative()) s += " [color=\"black:white:black\"]";
        s += ";\n";
    }
    for (const auto& [name, v] : g.views) {
        if (v.inclusion) continue;  // already drawn as an extension edge
        s += "  " + q(v.source) + " -> " + q(v.target) + " [style=dashed, label=" + q(name) +
             "];\n";
    }
    for (const auto& [name, r] : g.realms) {
        s += "  // realm " + name + ": face " + r.face + ", pillars";
        for (const auto& p : r.pillars) s += " " + p.bottom + ".." + p.top;
        s += "\n";
    }
    return s + "}\n";
}

// ---------------------------------------------------------------------------
// Graph -> source.  Theories come out in dependency order with `extends`
// headers where an extension edge provides one; discharge work that cannot
// be re-derived by auto-discharge is appended as directives.

inline std::string graph_to_source(const TheoryGraph& g) {
    // choose, for each theory, the longest registered base to extend from
    std::map<TheoryName, TheoryName> base_of;
    for (const auto& e : g.edges) {
        if (!g.has_theory(e.base) || !g.has_theory(e.ext) || e.base == e.ext) continue;
        auto it = base_of.find(e.ext);
        if (it == base_of.end() ||
            g.theory(it->second).decls.size() < g.theory(e.base).decls.size())
            base_of[e.ext] = e.base;
    }
    // dependency order: base before extension
    std::vector<TheoryName> order;
    std::set<TheoryName> done;
    auto emit_order = [&](const TheoryName& n, auto&& self) -> void {
        if (done.count(n)) return;
        done.insert(n);
        if (auto it = base_of.find(n); it != base_of.end()) self(it->second, self);
        order.push_back(n);
    };
    for (const auto& [name, t] : g.theories) {
        (void)t;
        emit_order(name, emit_order);
    }

    std::string s;
    for (const auto& name : order) {
        const Theory& t = g.theory(name);
        auto it = base_of.find(name);
        if (it != base_of.end()) {
            s += to_source(t, g.theory(it->second).decls.size(),
                           "theory " + name + " extends " + it->second + " {\n");
        } else {
            s += to_source(t);
        }
        s += "\n";
    }
    // extension edges not implied by an extends header
    for (const auto& e : g.edges) {
        if (auto it = base_of.find(e.ext); it != base_of.end() && it->second == e.base) continue;
        if (e.base == e.ext) continue;
        s += "edge " + e.base + " -> " + e.ext + ";\n";
    }

    // discharge directives for every view go before evidence directives:
    // `expansive`/`faithful`/`interface-conservative` re-check their view
    // when they run and must see the fully discharged state
    std::string discharges, evidence;
    for (const auto& [name, v] : g.views) {
        if (v.inclusion && v.source == v.target) {
            s += "view " + name + " : " + v.source + " -> " + v.target + " identity { }\n";
        } else {
            const Theory& src = g.theory(v.source);
            s += "view " + name + " : " + v.source + " -> " + v.target;
            if (v.identity) s += " identity";
            s += " {\n";
            for (const auto& [sym, e] : v.entries) {
                if (e.kind == ViewTarget::Kind::Symbol) {
                    s += "  " + sym + " |-> " + e.symbol + ";\n";
                } else if (const Declaration* d = src.find(sym);
                           d && d->kind == DeclKind::Definition) {
                    s += "  " + sym + " |-> expand;\n";
                } else {
                    s += "  // " + sym + ": term-valued entry, not expressible here\n";
                }
            }
            s += "}\n";
        }
        for (const auto& o : v.obligations) {
            switch (o.status) {
                case ObStatus::Assumed:
                    discharges += "discharge " + name + "." + o.origin + " by assumption;\n";
                    break;
                case ObStatus::FiniteChecked:
                    discharges += "discharge " + name + "." + o.origin + " by finite-check " +
                                  std::to_string(o.checked_size) + ";\n";
                    break;
                case ObStatus::ByTheorem:
                    discharges +=
                        "discharge " + name + "." + o.origin + " by theorem " + o.via + ";\n";
                    break;
                default: break;  // auto-discharge re-derives these
            }
        }
        if (v.expansive_witness)
            evidence += "expansive " + name + " witness " + *v.expansive_witness + ";\n";
        if (v.faithful_checked_size > 0)
            evidence +=
                "faithful " + name + " up-to " + std::to_string(v.faithful_checked_size) + ";\n";
        if (v.cons_checked_size > 0)
            evidence += "interface-conservative " + name + " up-to " +
                        std::to_string(v.cons_checked_size) + ";\n";
    }
    s += discharges;
    s += evidence;
    for (const auto& e : g.edges)
        if (e.cons == ConsEvidence::ByBackView)
            s += "conservative " + e.base + " -> " + e.ext + " by " + e.back_view + ";\n";
    for (const auto& [name, r] : g.realms) {
        s += "realm " + name + " {\n  face " + r.face + ";\n";
        for (const auto& p : r.pillars) {
            s += "  pillar " + p.name + " {\n    bottom " + p.bottom + ";\n    top " + p.top +
                 ";\n    interface " + p.interface + ";\n  }\n";
        }
        if (!r.equivs.empty()) {
            s += "  equiv ";
            for (size_t i = 0; i < r.equivs.size(); ++i)
                s += (i ? ", " : "") + r.equivs[i];
            s += ";\n";
        }
        s += "}\n";
    }
    return s;
}

}  // namespace tgk
