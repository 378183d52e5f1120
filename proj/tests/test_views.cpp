#include <catch2/catch_amalgamated.hpp>
#include <tgk/workspace.hpp>

using namespace tgk;

namespace {

Workspace load_corpus(bool with_tops = false) {
    Workspace ws;
    std::string dir = std::string(TGK_SOURCE_DIR) + "/corpus/";
    REQUIRE(ws.load_file(dir + "groups.thy"));
    if (with_tops) REQUIRE(ws.load_file(dir + "groups_x.thy"));
    REQUIRE(ws.ok());
    return ws;
}

std::vector<std::string> origins(const View& v) {
    std::vector<std::string> out;
    for (const auto& o : v.obligations) out.push_back(o.origin);
    return out;
}

}  // namespace

TEST_CASE("the division bottom interprets into the composition development") {
    Workspace ws = load_corpus();
    const View& v2 = ws.g.view("v2");
    CHECK(origins(v2) ==
          std::vector<std::string>{"cancel", "unit_cancel", "swap_args", "shift"});
    for (const auto& o : v2.obligations) {
        CHECK(o.status == ObStatus::FiniteChecked);
        CHECK(o.checked_size == 4);
    }
    CHECK(v2.all_discharged());
}

TEST_CASE("the face interface mixes axiom, definition, and finite evidence") {
    Workspace ws = load_corpus();
    const View& i1 = ws.g.view("I1");
    REQUIRE(i1.obligations.size() == 8);

    std::map<std::string, ObStatus> want{
        {"assoc", ObStatus::ByAxiom},          {"right_unit", ObStatus::ByAxiom},
        {"right_inverse", ObStatus::ByAxiom},  {"slash_def", ObStatus::ByDefinition},
        {"cancel", ObStatus::FiniteChecked},   {"unit_cancel", ObStatus::FiniteChecked},
        {"swap_args", ObStatus::FiniteChecked}, {"shift", ObStatus::FiniteChecked},
    };
    for (const auto& o : i1.obligations) {
        INFO(o.origin << " -> " << ob_status_name(o.status) << " via " << o.via);
        CHECK(o.status == want.at(o.origin));
        if (o.status == ObStatus::ByAxiom) CHECK(o.via == o.origin);
        if (o.status == ObStatus::FiniteChecked) CHECK(o.checked_size == 4);
    }
    CHECK(i1.obligation("slash_def")->via == "slash_circ");

    const View& i2 = ws.g.view("I2");
    REQUIRE(i2.obligations.size() == 8);
    CHECK(i2.all_discharged());
}

TEST_CASE("a partial view fails totality before signatures or obligations") {
    Workspace ws = load_corpus();
    View v;
    v.name = "partial";
    v.source = "group2";
    v.target = "slash1_top";
    v.entries["G"] = ViewTarget::to("G");
    CheckReport rep = check_view(ws.g, v);
    REQUIRE(!rep.ok());
    for (const auto& p : rep.problems) CHECK(p.code == "ViewNotTotal");
    CHECK(v.obligations.empty());
}

TEST_CASE("entries must preserve signatures") {
    Workspace ws = load_corpus();
    View v;
    v.name = "squash";
    v.source = "group2";
    v.target = "slash1_top";
    v.entries["G"] = ViewTarget::to("G");
    v.entries["slash"] = ViewTarget::to("i");  // binary onto unary
    CheckReport rep = check_view(ws.g, v);
    REQUIRE(!rep.ok());
    CHECK(rep.problems.front().code == "SignatureMismatch");
}

TEST_CASE("inclusion views discharge their own obligations") {
    Workspace ws = load_corpus();
    View& incl = inclusion_view(ws.g, "group1", "slash1_top");
    CHECK(incl.inclusion);
    CHECK(ws.g.has_view("incl__group1__slash1_top"));
    REQUIRE(incl.obligations.size() == 3);
    for (const auto& o : incl.obligations) {
        CHECK(o.status == ObStatus::ByAxiom);
        CHECK(o.via == o.origin);
    }
}

TEST_CASE("composition splices templates and regenerates obligations") {
    Workspace ws = load_corpus(true);
    TheoryGraph& g = ws.g;
    View c = compose_views(g, g.view("v1"), g.view("unslash"), "v1_then_unslash");
    CHECK(c.source == "group1");
    CHECK(c.target == "slash1_top");
    CHECK(!g.has_view("v1_then_unslash"));  // composition is a value, not a registration

    // circ, e, i all pass through expanded entries of unslash
    CHECK(c.entry("G")->kind == ViewTarget::Kind::Symbol);
    for (const char* op : {"circ", "e", "i"})
        CHECK(c.entry(op)->kind == ViewTarget::Kind::Term);

    REQUIRE(origins(c) == std::vector<std::string>{"assoc", "right_unit", "right_inverse"});
    SearchBudget budget;
    for (const auto& o : origins(c))
        CHECK(finite_check_obligation(g, c, o, 4, budget).closed);
    CHECK(c.all_discharged());
}

TEST_CASE("composition requires the middle theories to agree") {
    Workspace ws = load_corpus();
    try {
        compose_views(ws.g, ws.g.view("v2"), ws.g.view("v2"), "nope");
        FAIL("source/target mismatch accepted");
    } catch (const Error& err) {
        CHECK(err.code == "ComposeMismatch");
    }
}

TEST_CASE("interfaces reject template entries") {
    Workspace ws = load_corpus();
    CHECK(is_interface(ws.g, ws.g.view("I1")).ok());

    View broken = ws.g.view("I1");
    broken.entries["slash"] = ViewTarget::tmpl(
        {"a", "b"}, {}, Term::app("circ", {Term::var("a"), Term::var("b")}));
    CheckReport rep = is_interface(ws.g, broken);
    REQUIRE(!rep.ok());
    CHECK(rep.problems.front().code == "InterfaceNotInjective");
    CHECK(rep.problems.front().message.find("term template") != std::string::npos);
}

TEST_CASE("expansivity wants an identity-on-image endo-witness") {
    Workspace ws = load_corpus();
    TheoryGraph& g = ws.g;
    View& witness = inclusion_view(g, "slash1_top", "slash1_top");
    CHECK(witness.identity);

    View& i1 = g.view_mut("I1");
    CHECK(is_expansive(g, i1, witness.name).ok());
    CHECK(i1.expansive_witness == witness.name);

    // the plain inclusion misses slash_circ, so the identity witness leaks
    View& incl = inclusion_view(g, "group1", "slash1_top");
    CheckReport rep = is_expansive(g, incl, witness.name);
    REQUIRE(!rep.ok());
    CHECK(rep.problems.front().code == "NotExpansive");
    CHECK(!incl.expansive_witness.has_value());

    CheckReport wrong = is_expansive(g, i1, "v2");  // not an endo-view of slash1_top
    REQUIRE(!wrong.ok());
    CHECK(wrong.problems.front().code == "BackViewMismatch");
}

TEST_CASE("translation recloses over fresh template extras") {
    Workspace ws = load_corpus(true);
    TheoryGraph& g = ws.g;
    const Declaration* e_slash = g.theory("circ_i2_top").find("e_slash");
    REQUIRE(e_slash);
    Formula tr = translate_formula(g, g.view("unslash"), e_slash->body);
    CHECK(is_closed(tr));

    std::vector<Diag> diags;
    Formula want = parse_formula_in(g.theory("slash1_top"), "a / a = b / b", diags);
    REQUIRE(!has_errors(diags));
    CHECK(alpha_eq_mod_prefix(tr, want));
}

TEST_CASE("the image of an expanding view is the set of used heads") {
    Workspace ws = load_corpus(true);
    CHECK(view_image_symbols(ws.g.view("unslash")) == std::set<SymbolName>{"G", "slash_circ"});
}
