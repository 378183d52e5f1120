// tgk: batch front-end over the header library.  Loads .thy sources into a
// workspace, runs one command against the resulting graph, and prints text
// or json.  Commands that build new theories or realms write the whole
// updated graph back out as source; inputs are never modified.
//
// Exit codes: 0 ok, 1 check failure, 2 usage error, 3 search budget blown.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tgk/export.hpp"
#include "tgk/workspace.hpp"

namespace {

struct Options {
    std::vector<std::string> files;
    std::string format = "text";
    int max_size = 4;
    int unfold_depth = 2;
    long long budget = tgk::kDefaultBudget;
    std::string out;  // empty or "-" means stdout

    bool json() const { return format == "json"; }
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("-i,--input", o.files, "additional source files to load");
    sub->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--max-size", o.max_size, "bound for model searches");
    sub->add_option("--unfold-depth", o.unfold_depth,
                    "definition unfolding passes when matching statements");
    sub->add_option("--budget", o.budget, "work budget for model searches");
}

// trailing positional: source files after the command's own arguments
void add_files(CLI::App* sub, Options& o) {
    sub->add_option("files", o.files, "source files to load");
}

tgk::Workspace load(const Options& o) {
    tgk::Workspace ws;
    ws.unfold_depth = o.unfold_depth;
    ws.budget_limit = o.budget;
    for (const auto& f : o.files) ws.load_file(f);
    return ws;
}

nlohmann::ordered_json diag_json(const tgk::Diag& d) {
    nlohmann::ordered_json j;
    j["severity"] = d.severity == tgk::Severity::Error ? "error" : "warning";
    j["code"] = d.code;
    j["message"] = d.message;
    if (d.pos.valid()) {
        j["file"] = d.pos.file;
        j["line"] = d.pos.line;
        j["col"] = d.pos.col;
    }
    return j;
}

void print_diags(const tgk::Workspace& ws) {
    for (const auto& d : ws.diags) std::cerr << d.str() << "\n";
}

nlohmann::ordered_json report_json(const tgk::RealmReport& rep) {
    nlohmann::ordered_json j;
    j["realm"] = rep.realm;
    j["valid"] = rep.ok();
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rep.rows) {
        nlohmann::ordered_json row;
        row["check"] = r.check;
        if (!r.pillar.empty()) row["pillar"] = r.pillar;
        row["pass"] = r.pass;
        if (!r.pass) {
            row["code"] = r.code;
            row["detail"] = r.detail;
        }
        j["rows"].push_back(std::move(row));
    }
    return j;
}

void write_out(const Options& o, const std::string& text) {
    if (o.out.empty() || o.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out);
    if (!f) throw tgk::Error("IoError", "cannot write '" + o.out + "'");
    f << text;
}

// check: everything the loader found plus a verdict per declared realm
int cmd_check(Options& o) {
    tgk::Workspace ws = load(o);
    std::vector<tgk::RealmReport> reps;
    for (auto& [name, r] : ws.g.realms) reps.push_back(tgk::validate_realm(ws.g, r));
    bool realms_ok = true;
    for (const auto& rep : reps) realms_ok = realms_ok && rep.ok();

    if (o.json()) {
        nlohmann::ordered_json j;
        j["ok"] = ws.ok() && realms_ok;
        j["diagnostics"] = nlohmann::ordered_json::array();
        for (const auto& d : ws.diags) j["diagnostics"].push_back(diag_json(d));
        j["realms"] = nlohmann::ordered_json::array();
        for (const auto& rep : reps) j["realms"].push_back(report_json(rep));
        std::cout << j.dump(2) << "\n";
    } else {
        print_diags(ws);
        for (const auto& rep : reps) {
            std::cout << "realm " << rep.realm << ": " << (rep.ok() ? "valid" : "invalid")
                      << "\n";
            for (const auto& r : rep.failures())
                std::cout << "  [" << r.code << "] " << r.check
                          << (r.pillar.empty() ? "" : " (" + r.pillar + ")") << ": " << r.detail
                          << "\n";
        }
        std::cout << (ws.ok() && realms_ok ? "ok" : "check failed") << ": "
                  << ws.g.theories.size() << " theories, " << ws.g.views.size() << " views, "
                  << ws.g.realms.size() << " realms\n";
    }
    return ws.ok() && realms_ok ? 0 : 1;
}

int cmd_realm_validate(Options& o, const std::string& realm) {
    tgk::Workspace ws = load(o);
    print_diags(ws);
    tgk::RealmReport rep = tgk::validate_realm(ws.g, ws.g.realm(realm));
    if (o.json())
        std::cout << report_json(rep).dump(2) << "\n";
    else
        std::cout << rep.str();
    return ws.ok() && rep.ok() ? 0 : 1;
}

// shared tail of the graph-building commands: validate what was made, then
// emit the updated graph as source
int emit_updated(Options& o, tgk::Workspace& ws, const tgk::RealmName& made) {
    tgk::RealmReport rep = tgk::validate_realm(ws.g, ws.g.realm(made));
    std::string src = tgk::graph_to_source(ws.g);
    if (o.json()) {
        nlohmann::ordered_json j = report_json(rep);
        if (o.out.empty() || o.out == "-")
            j["source"] = src;
        else {
            write_out(o, src);
            j["wrote"] = o.out;
        }
        std::cout << j.dump(2) << "\n";
    } else {
        write_out(o, src);
        std::cerr << "realm " << made << ": " << (rep.ok() ? "valid" : "invalid") << "\n";
        for (const auto& r : rep.failures())
            std::cerr << "  [" << r.code << "] " << r.check
                      << (r.pillar.empty() ? "" : " (" + r.pillar + ")") << ": " << r.detail
                      << "\n";
        if (!o.out.empty() && o.out != "-") std::cerr << "wrote " << o.out << "\n";
    }
    return rep.ok() ? 0 : 1;
}

int cmd_realm_init(Options& o, const std::string& theory, const std::string& name) {
    tgk::Workspace ws = load(o);
    print_diags(ws);
    if (!ws.ok()) return 1;
    tgk::InitialOptions io;
    io.realm_name = name;
    tgk::Realm& r = tgk::initial_realm(ws.g, theory, io);
    return emit_updated(o, ws, r.name);
}

int cmd_realm_extend(Options& o, const std::string& realm, const std::string& pillar,
                     const std::string& decl_src, const std::vector<std::string>& face_srcs,
                     const std::vector<std::string>& counterparts, const std::string& top_name,
                     const std::string& face_name) {
    tgk::Workspace ws = load(o);
    print_diags(ws);
    if (!ws.ok()) return 1;
    const tgk::Realm& r = ws.g.realm(realm);
    const tgk::Pillar* pp = r.pillar(pillar);
    if (!pp) throw tgk::Error("PillarNotFound", "realm '" + realm + "' has no pillar '" + pillar + "'");

    std::vector<tgk::Diag> pd;
    tgk::Declaration d = tgk::parse_declaration_in(ws.g.theory(pp->top), decl_src, pd, "<decl>");
    tgk::ExtendOptions eo;
    eo.new_top_name = top_name;
    eo.new_face_name = face_name;
    tgk::Theory scratch = ws.g.theory(r.face);  // later mirrors may use earlier ones
    for (const auto& fs : face_srcs) {
        tgk::Declaration fd = tgk::parse_declaration_in(scratch, fs, pd, "<face-decl>");
        scratch.decls.push_back(fd);
        eo.face_decls.push_back(std::move(fd));
    }
    for (const auto& d2 : pd) std::cerr << d2.str() << "\n";
    if (tgk::has_errors(pd)) return 1;
    for (const auto& c : counterparts) {
        auto eq = c.find('=');
        if (eq == std::string::npos)
            throw tgk::Error("UsageError", "--counterpart wants PILLAR=SYMBOL, got '" + c + "'");
        eo.counterparts[c.substr(0, eq)] = c.substr(eq + 1);
    }
    tgk::Realm& out = tgk::extend_realm(ws.g, realm, pillar, d, eo);
    return emit_updated(o, ws, out.name);
}

int cmd_realm_merge(Options& o, const std::string& r1, const std::string& r2,
                    const std::string& v, const std::string& w, const std::string& name,
                    bool minimal) {
    tgk::Workspace ws = load(o);
    print_diags(ws);
    if (!ws.ok()) return 1;
    tgk::MergeOptions mo;
    mo.name = name;
    mo.minimal = minimal;
    mo.oblig_check_size = o.max_size;
    tgk::Realm& merged = tgk::merge_realms(ws.g, r1, r2, v, w, mo);
    return emit_updated(o, ws, merged.name);
}

int cmd_lift(Options& o, const std::string& r1, const std::string& r2, const std::string& view) {
    tgk::Workspace ws = load(o);
    print_diags(ws);
    if (!ws.ok()) return 1;
    tgk::PartialView pv =
        tgk::lift_view(ws.g, ws.g.realm(r1), ws.g.realm(r2), view, /*register_if_total=*/false);

    bool ident = pv.base.source == pv.base.target;
    for (const auto& [s, e] : pv.base.entries)
        ident = ident && e.kind == tgk::ViewTarget::Kind::Symbol && e.symbol == s;

    if (o.json()) {
        nlohmann::ordered_json j;
        j["view"] = view;
        j["source"] = pv.base.source;
        j["target"] = pv.base.target;
        j["total"] = pv.total();
        j["identity"] = ident;
        j["entries"] = nlohmann::ordered_json::object();
        for (const auto& [s, e] : pv.base.entries) j["entries"][s] = e.symbol;
        j["undefined"] = pv.undefined;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "lift of " << view << " : " << pv.base.source << " -> " << pv.base.target
                  << (pv.total() ? " (total" : " (partial") << (ident ? ", identity)" : ")")
                  << "\n";
        for (const auto& [s, e] : pv.base.entries)
            std::cout << "  " << s << " |-> " << e.symbol << "\n";
        for (const auto& s : pv.undefined) std::cout << "  " << s << " undefined\n";
    }
    return 0;
}

int cmd_countermodel(Options& o, const std::string& theory, const std::string& formula) {
    tgk::Workspace ws = load(o);
    print_diags(ws);
    if (!ws.ok()) return 1;
    const tgk::Theory& t = ws.g.theory(theory);
    std::vector<tgk::Diag> pd;
    tgk::Formula f = tgk::parse_formula_in(t, formula, pd, "<formula>");
    for (const auto& d : pd) std::cerr << d.str() << "\n";
    if (tgk::has_errors(pd)) return 1;

    tgk::SearchBudget budget{o.budget};
    auto m = tgk::find_countermodel(t, f, o.max_size, budget);
    if (o.json()) {
        nlohmann::ordered_json j;
        j["theory"] = theory;
        j["statement"] = tgk::show_formula(t, f);
        j["max_size"] = o.max_size;
        j["found"] = m.has_value();
        if (m) j["structure"] = tgk::structure_to_json(*m);
        std::cout << j.dump(2) << "\n";
    } else if (m) {
        std::cout << "countermodel to " << tgk::show_formula(t, f) << ":\n"
                  << tgk::show_structure(t, *m);
    } else {
        std::cout << "no countermodel to " << tgk::show_formula(t, f) << " up to size "
                  << o.max_size << "\n";
    }
    return 0;
}

int cmd_export(Options& o, bool dot, bool json_fmt) {
    tgk::Workspace ws = load(o);
    print_diags(ws);
    if (!ws.ok()) return 1;
    if (dot)
        write_out(o, tgk::graph_to_dot(ws.g));
    else if (json_fmt)
        write_out(o, tgk::graph_to_json(ws.g).dump(2) + "\n");
    else
        write_out(o, tgk::graph_to_source(ws.g));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"theory graphs with realms: check, validate, evolve, export"};
    app.require_subcommand(1);
    Options o;

    auto* check = app.add_subcommand("check", "load sources and report every problem");
    add_files(check, o);
    add_common(check, o);

    std::string realm;
    auto* rv = app.add_subcommand("realm-validate", "full validation table for one realm");
    rv->add_option("realm", realm, "realm name")->required();
    add_files(rv, o);
    add_common(rv, o);

    std::string theory, name;
    auto* ri = app.add_subcommand("realm-init", "wrap a theory into a one-pillar realm");
    ri->add_option("theory", theory, "theory to wrap")->required();
    ri->add_option("--name", name, "realm name (default R__<theory>)");
    ri->add_option("-o,--out", o.out, "write updated sources here");
    add_files(ri, o);
    add_common(ri, o);

    std::string pillar, decl;
    std::vector<std::string> face_decls, counterparts;
    auto* re = app.add_subcommand("realm-extend", "add a definition or theorem to a pillar");
    re->add_option("realm", realm, "realm name")->required();
    re->add_option("pillar", pillar, "pillar to extend")->required();
    re->add_option("decl", decl, "declaration source, e.g. \"def sq : G -> G where ...;\"")
        ->required();
    // one value per occurrence, so a trailing positional file is not swallowed
    re->add_option("--face-decl", face_decls, "mirror declaration for the face (repeatable)")
        ->expected(1)
        ->take_all()
        ->allow_extra_args(false);
    re->add_option("--counterpart", counterparts,
                   "PILLAR=SYMBOL image of the new face symbol in another pillar (repeatable)")
        ->expected(1)
        ->take_all()
        ->allow_extra_args(false);
    std::string top_name, face_name;
    re->add_option("--top-name", top_name, "name for the extended pillar top");
    re->add_option("--face-name", face_name, "name for the extended face");
    re->add_option("-o,--out", o.out, "write updated sources here");
    add_files(re, o);
    add_common(re, o);

    std::string r2, vname, wname;
    bool minimal = false;
    auto* rm = app.add_subcommand("realm-merge", "merge two realms along a pair of views");
    rm->add_option("realm1", realm, "first realm")->required();
    rm->add_option("realm2", r2, "second realm")->required();
    rm->add_option("view", vname, "view from a pillar bottom of realm1 into realm2")->required();
    rm->add_option("back", wname, "view from a pillar bottom of realm2 into realm1")->required();
    rm->add_option("--name", name, "merged realm name");
    rm->add_flag("--minimal", minimal, "copy only what the interfaces mention");
    rm->add_option("-o,--out", o.out, "write updated sources here");
    add_files(rm, o);
    add_common(rm, o);

    auto* lf = app.add_subcommand("lift", "pull a view between pillar tops back to the faces");
    lf->add_option("realm1", realm, "realm owning the view's source pillar")->required();
    lf->add_option("realm2", r2, "realm owning the view's target pillar")->required();
    lf->add_option("view", vname, "view between the pillar tops")->required();
    add_files(lf, o);
    add_common(lf, o);

    std::string formula;
    auto* cm = app.add_subcommand("countermodel", "search finite structures refuting a formula");
    cm->add_option("theory", theory, "theory the structures must satisfy")->required();
    cm->add_option("formula", formula, "statement to refute")->required();
    add_files(cm, o);
    add_common(cm, o);

    bool dot = false, json_fmt = false, src = false;
    auto* ex = app.add_subcommand("export", "emit the loaded graph in another format");
    auto* fdot = ex->add_flag("--dot", dot, "graphviz digraph");
    auto* fjson = ex->add_flag("--json", json_fmt, "json object");
    auto* fsrc = ex->add_flag("--src", src, "round-trippable source (default)");
    fdot->excludes(fjson)->excludes(fsrc);
    fjson->excludes(fsrc);
    ex->add_option("-o,--out", o.out, "write here instead of stdout");
    add_files(ex, o);
    add_common(ex, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(check)) return cmd_check(o);
        if (app.got_subcommand(rv)) return cmd_realm_validate(o, realm);
        if (app.got_subcommand(ri)) return cmd_realm_init(o, theory, name);
        if (app.got_subcommand(re))
            return cmd_realm_extend(o, realm, pillar, decl, face_decls, counterparts, top_name,
                                    face_name);
        if (app.got_subcommand(rm)) return cmd_realm_merge(o, realm, r2, vname, wname, name, minimal);
        if (app.got_subcommand(lf)) return cmd_lift(o, realm, r2, vname);
        if (app.got_subcommand(cm)) return cmd_countermodel(o, theory, formula);
        if (app.got_subcommand(ex)) return cmd_export(o, dot, json_fmt);
    } catch (const tgk::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code == "BudgetExceeded" ? 3 : 1;
    }
    return 2;
}
