#pragma once

// The workspace ties the file format to the graph: it reads a sequence of
// top-level statements (theories, extension edges, views, realms, and the
// directives that discharge or certify obligations) and applies them in
// order.  Everything the CLI does goes through here.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tgk/oracle.hpp"
#include "tgk/parse.hpp"
#include "tgk/realms.hpp"
#include "tgk/views.hpp"

namespace tgk {

struct Workspace {
    TheoryGraph g;
    std::vector<Diag> diags;
    int unfold_depth = 2;
    long budget_limit = kDefaultBudget;

    bool ok() const { return !has_errors(diags); }

    bool load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) {
            diags.push_back({"FileNotFound", "cannot open '" + path + "'"});
            return false;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        return load_text(buf.str(), path);
    }

    bool load_text(std::string_view src, const std::string& file = "<input>") {
        size_t before = diags.size();
        try {
            Cursor cur(src, file);
            while (!cur.at_end()) statement(cur);
        } catch (const Error& e) {
            if (e.code == "BudgetExceeded") throw;  // callers decide; see the CLI
            diags.push_back({e.code, e.what(), e.pos});
        }
        return !has_errors(diags, before);
    }

  private:
    void statement(Cursor& cur) {
        SourcePos p = cur.pos();
        if (cur.eat_kw("theory")) {
            theory_stmt(cur, p);
        } else if (cur.eat_kw("edge")) {
            TheoryName a = cur.expect_ident("base theory");
            cur.expect_punct("->", "between theories");
            TheoryName b = cur.expect_ident("extending theory");
            cur.expect_punct(";", "after edge statement");
            add_extension_edge(g, a, b);
        } else if (cur.eat_kw("view")) {
            ViewSrc vs = parse_view_src(cur);
            apply(build_view(g, vs), p);
            View& v = g.view_mut(vs.name);
            apply(check_view(g, v), p);
            auto_discharge(g, v, unfold_depth);
        } else if (cur.eat_kw("conservative")) {
            TheoryName a = cur.expect_ident("base theory");
            cur.expect_punct("->", "between theories");
            TheoryName b = cur.expect_ident("extending theory");
            cur.expect_kw("by");
            ViewName back = cur.expect_ident("back view");
            cur.expect_punct(";", "after conservative statement");
            apply(check_conservative_extension(g, a, b, back), p);
        } else if (cur.eat_kw("discharge")) {
            discharge_stmt(cur, p);
        } else if (cur.eat_kw("faithful")) {
            ViewName vn = cur.expect_ident("view name");
            cur.expect_kw("up-to");
            int n = cur.expect_number("size bound");
            cur.expect_punct(";", "after faithful statement");
            SearchBudget b{budget_limit};
            FaithfulReport rep = faithful_evidence(g, g.view_mut(vn), n, b);
            for (const auto& pr : rep.probes)
                if (pr.suspicious())
                    diags.push_back({"NotFaithful",
                                     "view '" + vn + "' loses '" + pr.label +
                                         "': refuted at the source, unrefuted up to size " +
                                         std::to_string(n) + " at the target",
                                     p});
        } else if (cur.eat_kw("expansive")) {
            ViewName vn = cur.expect_ident("view name");
            cur.expect_kw("witness");
            ViewName wn = cur.expect_ident("witness view");
            cur.expect_punct(";", "after expansive statement");
            apply(is_expansive(g, g.view_mut(vn), wn), p);
        } else if (cur.eat_kw("interface-conservative")) {
            ViewName vn = cur.expect_ident("view name");
            cur.expect_kw("up-to");
            int n = cur.expect_number("size bound");
            cur.expect_punct(";", "after interface-conservative statement");
            SearchBudget b{budget_limit};
            apply(check_interface_conservativity(g, g.view_mut(vn), n, b), p);
        } else if (cur.eat_kw("realm")) {
            RealmSrc rs = parse_realm_src(cur);
            realm_stmt(rs, p);
        } else {
            throw Error("ParseError", "expected a top-level statement, got '" +
                                          cur.peek().text + "'",
                        p);
        }
    }

    void theory_stmt(Cursor& cur, const SourcePos& p) {
        TheoryName name = cur.expect_ident("theory name");
        const Theory* base = nullptr;
        TheoryName base_name;
        if (cur.eat_kw("extends")) {
            base_name = cur.expect_ident("base theory");
            base = &g.theory(base_name);
        }
        cur.expect_punct("{", "to open the theory body");
        Theory t = parse_theory_block(cur, name, base, diags);
        stamp(p);
        add_theory(g, t);
        if (base) add_extension_edge(g, base_name, name);
        verify_finite_theorems(g.theory(name), p);
    }

    // `theorem ... by finite-check N` is a checkable claim: search for a
    // countermodel among models of the declarations before it
    void verify_finite_theorems(const Theory& t, const SourcePos& p) {
        for (size_t i = 0; i < t.decls.size(); ++i) {
            const Declaration& d = t.decls[i];
            if (d.kind != DeclKind::Theorem || d.just.kind != Justification::Kind::FiniteCheck)
                continue;
            Theory prefix;
            prefix.name = t.name;
            prefix.decls.assign(t.decls.begin(), t.decls.begin() + static_cast<long>(i));
            SearchBudget b{budget_limit};
            auto m = find_countermodel(prefix, d.body, d.just.max_size, b);
            if (m)
                diags.push_back({"TheoremFalsified",
                                 "theorem '" + d.name + "' fails in a structure of size " +
                                     std::to_string(m->carriers.begin()->second),
                                 p});
        }
    }

    void discharge_stmt(Cursor& cur, const SourcePos& p) {
        ViewName vn = cur.expect_ident("view name");
        cur.expect_punct(".", "after view name");
        std::string origin;
        if (!cur.eat_punct("*")) origin = cur.expect_ident("obligation origin");
        cur.expect_kw("by");
        View& v = g.view_mut(vn);

        std::vector<std::string> targets;
        if (origin.empty()) {
            for (const auto& o : v.obligations)
                if (o.status == ObStatus::Open) targets.push_back(o.origin);
        } else {
            if (!v.obligation(origin))
                throw Error("UnknownObligation",
                            "view '" + vn + "' has no obligation for '" + origin + "'", p);
            targets.push_back(origin);
        }

        if (cur.eat_kw("assumption")) {
            cur.expect_punct(";", "after discharge statement");
            for (const auto& o : targets) {
                Obligation* ob = v.obligation(o);
                ob->status = ObStatus::Assumed;
                ob->via = "assumption";
            }
        } else if (cur.eat_kw("theorem")) {
            std::string thm = cur.expect_ident("theorem name");
            cur.expect_punct(";", "after discharge statement");
            const Theory& t = g.theory(v.target);
            const Declaration* td = t.find(thm);
            if (!td || !td->has_formula())
                throw Error("UnknownSymbol",
                            "'" + thm + "' does not name a statement of theory '" + t.name + "'",
                            p);
            for (const auto& o : targets) {
                Obligation* ob = v.obligation(o);
                if (!statement_matches(t, ob->statement, td->body)) {
                    diags.push_back({"DischargeFailed",
                                     "statement of '" + thm +
                                         "' does not match the obligation for '" + o +
                                         "' in view '" + vn + "'",
                                     p});
                    continue;
                }
                ob->status = td->kind == DeclKind::Theorem ? ObStatus::ByTheorem
                             : td->kind == DeclKind::Axiom ? ObStatus::ByAxiom
                                                           : ObStatus::ByDefinition;
                ob->via = thm;
            }
        } else if (cur.eat_kw("finite-check")) {
            int n = cur.expect_number("size bound");
            cur.expect_punct(";", "after discharge statement");
            for (const auto& o : targets) {
                SearchBudget b{budget_limit};
                FiniteCheckResult fr = finite_check_obligation(g, v, o, n, b);
                if (!fr.closed)
                    diags.push_back({"CountermodelFound",
                                     "obligation '" + o + "' of view '" + vn +
                                         "' fails in a structure of size " +
                                         std::to_string(fr.countermodel->carriers.begin()->second),
                                     p});
            }
        } else {
            throw Error("ParseError",
                        "expected 'assumption', 'theorem' or 'finite-check' after 'by'", p);
        }
    }

    bool statement_matches(const Theory& t, const Formula& a, const Formula& b) const {
        Formula ua = a, ub = b;
        for (int d = 0; d <= unfold_depth; ++d) {
            if (alpha_eq_mod_prefix(ua, ub)) return true;
            ua = unfold(t, ua, 1);
            ub = unfold(t, ub, 1);
        }
        return alpha_eq_mod_prefix(ua, ub);
    }

    void realm_stmt(const RealmSrc& rs, const SourcePos& p) {
        if (g.realms.count(rs.name)) {
            diags.push_back({"DuplicateName", "realm '" + rs.name + "' already exists", p});
            return;
        }
        Realm r;
        r.name = rs.name;
        r.face = rs.face;
        g.theory(rs.face);  // must exist
        for (const auto& ps : rs.pillars) {
            g.theory(ps.bottom);
            g.theory(ps.top);
            g.view(ps.interface);
            r.pillars.push_back({ps.name, ps.bottom, ps.top, ps.interface});
        }
        for (const auto& e : rs.equivs) {
            g.view(e);
            r.equivs.push_back(e);
        }
        g.realms.emplace(r.name, std::move(r));
    }

    void apply(const CheckReport& rep, const SourcePos& p) {
        for (const auto& d : rep.problems) {
            Diag copy = d;
            if (!copy.pos.valid()) copy.pos = p;
            diags.push_back(std::move(copy));
        }
    }
    void stamp(const SourcePos& p) {
        for (auto& d : diags)
            if (!d.pos.valid()) d.pos = p;
    }
};

}  // namespace tgk
