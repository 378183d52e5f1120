#include <catch2/catch_amalgamated.hpp>
#include <tgk/workspace.hpp>

using namespace tgk;

static Workspace load_corpus() {
    Workspace ws;
    REQUIRE(ws.load_file(std::string(TGK_SOURCE_DIR) + "/corpus/groups.thy"));
    REQUIRE(ws.ok());
    return ws;
}

static Formula formula_in(const Theory& t, const std::string& src) {
    std::vector<Diag> diags;
    Formula f = parse_formula_in(t, src, diags);
    REQUIRE(!has_errors(diags));
    return f;
}

TEST_CASE("extension edges demand a literal declaration prefix") {
    Workspace ws = load_corpus();
    TheoryGraph& g = ws.g;
    const ExtensionEdge* e = g.edge("group1", "slash1_top");
    REQUIRE(e);
    CHECK(e->cons == ConsEvidence::Syntactic);  // definition-only suffix

    try {
        add_extension_edge(g, "group1", "group2");
        FAIL("group2 is no extension of group1");
    } catch (const Error& err) {
        CHECK(err.code == "NotAnExtension");
    }

    size_t before = g.edges.size();
    add_extension_edge(g, "group1", "slash1_top");  // re-adding is idempotent
    CHECK(g.edges.size() == before);
}

TEST_CASE("identical declaration lists may not close a cycle") {
    Workspace ws = load_corpus();
    TheoryGraph& g = ws.g;
    Theory twin = g.theory("group1");
    twin.name = "group1_twin";
    add_theory(g, twin);
    add_extension_edge(g, "group1", "group1_twin");
    try {
        add_extension_edge(g, "group1_twin", "group1");
        FAIL("cycle-closing edge was accepted");
    } catch (const Error& err) {
        CHECK(err.code == "WouldCreateCycle");
    }
}

TEST_CASE("an axiom-bearing suffix loses conservativity on sight") {
    Workspace ws = load_corpus();
    TheoryGraph& g = ws.g;
    Declaration comm =
        Declaration::axiom("comm", formula_in(g.theory("group1"), "a ∘ b = b ∘ a"));
    add_theory(g, theory_cons(g.theory("group1"), {comm}, "group1_comm"));
    add_extension_edge(g, "group1", "group1_comm");
    CHECK(g.edge("group1", "group1_comm")->cons == ConsEvidence::None);

    Development d = development(g, "group1", "group1_comm");
    ConservativityReport rep = is_conservative_development(g, d);
    REQUIRE(!rep.ok());
    CHECK(rep.problems.front().code == "DevelopmentNotConservative");
}

TEST_CASE("a discharged back-view upgrades the edge to conservative") {
    Workspace ws = load_corpus();
    TheoryGraph& g = ws.g;
    Formula left_unit = formula_in(g.theory("group1"), "e ∘ a = a");
    Declaration thm =
        Declaration::theorem("left_unit", left_unit, Justification::citation("folklore"));
    add_theory(g, theory_cons(g.theory("group1"), {thm}, "g1_thm"));
    add_extension_edge(g, "group1", "g1_thm");
    Declaration ax = Declaration::axiom("left_unit_ax", left_unit);
    add_theory(g, theory_cons(g.theory("g1_thm"), {ax}, "g1_restated"));
    add_extension_edge(g, "g1_thm", "g1_restated");
    CHECK(g.edge("g1_thm", "g1_restated")->cons == ConsEvidence::None);

    View back;
    back.name = "back";
    back.source = "g1_restated";
    back.target = "g1_thm";
    for (const auto* d : g.theory("g1_restated").symbols())
        back.entries[d->name] = ViewTarget::to(d->name);
    REQUIRE(check_view(g, back).ok());
    auto_discharge(g, back);
    const Obligation* o = back.obligation("left_unit_ax");
    REQUIRE(o);
    CHECK(o->status == ObStatus::ByTheorem);
    CHECK(o->via == "left_unit");
    g.views.emplace(back.name, std::move(back));

    CHECK(check_conservative_extension(g, "g1_thm", "g1_restated", "back").ok());
    const ExtensionEdge* e = g.edge("g1_thm", "g1_restated");
    CHECK(e->cons == ConsEvidence::ByBackView);
    CHECK(e->back_view == "back");
    CHECK(is_conservative_development(g, development(g, "group1", "g1_restated")).ok());
}

TEST_CASE("a back-view with open obligations does not count") {
    Workspace ws = load_corpus();
    TheoryGraph& g = ws.g;
    Declaration comm =
        Declaration::axiom("comm", formula_in(g.theory("group1"), "a ∘ b = b ∘ a"));
    add_theory(g, theory_cons(g.theory("group1"), {comm}, "group1_comm"));
    add_extension_edge(g, "group1", "group1_comm");

    View back;
    back.name = "back_open";
    back.source = "group1_comm";
    back.target = "group1";
    for (const auto* d : g.theory("group1_comm").symbols())
        back.entries[d->name] = ViewTarget::to(d->name);
    REQUIRE(check_view(g, back).ok());
    auto_discharge(g, back);  // commutativity matches nothing in group1
    g.views.emplace(back.name, std::move(back));

    CheckReport rep = check_conservative_extension(g, "group1", "group1_comm", "back_open");
    REQUIRE(!rep.ok());
    CHECK(rep.problems.front().code == "ObligationOpen");
    CHECK(g.edge("group1", "group1_comm")->cons == ConsEvidence::None);
}

TEST_CASE("developments collect exactly the nodes between bottom and top") {
    Workspace ws = load_corpus();
    TheoryGraph& g = ws.g;
    Development d = development(g, "group1", "slash1_top");
    CHECK(d.nodes == std::set<TheoryName>{"group1", "slash1_top"});

    // chain with a shortcut edge: all three lie on a bottom-to-top path
    add_theory(g, theory_cons(g.theory("slash1_top"),
                              {Declaration::op("k", SymbolSignature::op({"G"}, "G"))}, "mid"));
    add_extension_edge(g, "slash1_top", "mid");
    add_theory(g, theory_cons(g.theory("mid"),
                              {Declaration::op("k2", SymbolSignature::op({"G"}, "G"))}, "top"));
    add_extension_edge(g, "mid", "top");
    add_extension_edge(g, "slash1_top", "top");
    CHECK(development(g, "group1", "top").nodes ==
          std::set<TheoryName>{"group1", "slash1_top", "mid", "top"});

    try {
        development(g, "slash1_top", "group1");
        FAIL("reversed development should have no path");
    } catch (const Error& err) {
        CHECK(err.code == "NoPath");
    }
}

TEST_CASE("an explicit node set must have one source and one sink") {
    Workspace ws = load_corpus();
    TheoryGraph& g = ws.g;
    DevelopmentShape ok = development_from_nodes(g, {"group1", "slash1_top"});
    REQUIRE(ok.ok());
    CHECK(ok.dev->bottom == "group1");
    CHECK(ok.dev->top == "slash1_top");

    DevelopmentShape two_sinks =
        development_from_nodes(g, {"group1", "slash1_top", "group2", "circ_i2_top"});
    CHECK(!two_sinks.ok());
    bool sink_problem = false, source_problem = false;
    for (const auto& p : two_sinks.problems) {
        if (p.code == "MultipleSinks") sink_problem = true;
        if (p.code == "MultipleSources") source_problem = true;
    }
    CHECK(sink_problem);
    CHECK(source_problem);
}

TEST_CASE("joins unite disjoint suffixes over a shared root") {
    Workspace ws = load_corpus();
    TheoryGraph& g = ws.g;
    const Theory& root = g.theory("group1");
    Theory t1 = theory_cons(root, {Declaration::op("p", SymbolSignature::constant("G"))}, "j1");
    Theory t2 = theory_cons(root, {Declaration::op("q", SymbolSignature::constant("G"))}, "j2");
    JoinResult j = theory_join(root, t1, t2, "joined");
    REQUIRE(j.ok());
    CHECK(j.theory.decls.size() == root.decls.size() + 2);
    CHECK(is_prefix(t1, j.theory));

    // a name clash is reported and the first copy kept
    Theory t3 = theory_cons(root, {Declaration::op("p", SymbolSignature::op({"G"}, "G"))}, "j3");
    JoinResult clash = theory_join(root, t1, t3, "clashed");
    REQUIRE(!clash.ok());
    CHECK(clash.problems.front().code == "NonDisjoint");
    CHECK(clash.theory.find("p")->sig == SymbolSignature::constant("G"));

    JoinResult wrong_root = theory_join(g.theory("group2"), t1, t2, "nope");
    CHECK(!wrong_root.ok());
    CHECK(wrong_root.problems.front().code == "NotAnExtension");
}

TEST_CASE("appending ill-formed declarations is refused") {
    Workspace ws = load_corpus();
    TheoryGraph& g = ws.g;
    try {
        theory_cons(g.theory("group1"), {Declaration::sort("G")}, "dup");
        FAIL("duplicate name accepted");
    } catch (const Error& err) {
        CHECK(err.code == "DuplicateName");
    }
    try {
        theory_cons(g.theory("group1"),
                    {Declaration::op("w", SymbolSignature::op({"H"}, "G"))}, "bad_sort");
        FAIL("unknown sort accepted");
    } catch (const Error& err) {
        CHECK(err.code == "UnknownSort");
    }
}

TEST_CASE("edge queries see the corpus shape") {
    Workspace ws = load_corpus();
    TheoryGraph& g = ws.g;
    auto from_g1 = g.edges_from("group1");
    REQUIRE(from_g1.size() == 1);
    CHECK(from_g1.front()->ext == "slash1_top");
    auto into_c2 = g.edges_into("circ_i2_top");
    REQUIRE(into_c2.size() == 1);
    CHECK(into_c2.front()->base == "group2");
    CHECK(g.edges_into("group1").empty());
}
