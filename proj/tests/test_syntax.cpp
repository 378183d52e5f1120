#include <catch2/catch_amalgamated.hpp>
#include <tgk/workspace.hpp>

using namespace tgk;

static const Workspace& corpus() {
    static Workspace ws = [] {
        Workspace w;
        REQUIRE(w.load_file(std::string(TGK_SOURCE_DIR) + "/corpus/groups.thy"));
        REQUIRE(w.ok());
        return w;
    }();
    return ws;
}

TEST_CASE("hyphens join identifiers only when followed by alphanumerics") {
    auto toks = lex_source("finite-check up-to x-1 a- b", "lex");
    REQUIRE(toks.size() >= 6);
    CHECK(toks[0].kind == Token::Kind::Ident);
    CHECK(toks[0].text == "finite-check");
    CHECK(toks[1].text == "up-to");
    CHECK(toks[2].text == "x-1");
    CHECK(toks[3].text == "a");
    CHECK(toks[4].kind == Token::Kind::Punct);
    CHECK(toks[4].text == "-");
    CHECK(toks[5].text == "b");
}

TEST_CASE("strings, numbers and UTF-8 glyph runs lex as single tokens") {
    auto toks = lex_source("\"∘\" 42 ∘ |-> ->", "lex");
    REQUIRE(toks.size() == 6);  // five tokens plus the end marker
    CHECK(toks[5].kind == Token::Kind::End);
    CHECK(toks[0].kind == Token::Kind::String);
    CHECK(toks[0].text == "∘");
    CHECK(toks[1].kind == Token::Kind::Number);
    CHECK(toks[2].kind == Token::Kind::SymRun);
    CHECK(toks[2].text == "∘");
    CHECK(toks[3].text == "|->");
    CHECK(toks[4].text == "->");
}

TEST_CASE("printed theories parse back to the same declarations") {
    for (const auto& name : {"group1", "group2", "slash1_top", "circ_i2_top", "group"}) {
        const Theory& t = corpus().g.theory(name);
        std::vector<Diag> diags;
        Theory back = parse_theory(to_source(t), diags);
        INFO(name << ":\n" << to_source(t));
        CHECK(!has_errors(diags));
        CHECK(back.name == t.name);
        CHECK(back.decls == t.decls);
    }
}

TEST_CASE("free variables close in first-occurrence order") {
    std::vector<Diag> diags;
    Formula f = parse_formula_in(corpus().g.theory("group2"), "b / a = a / b", diags);
    REQUIRE(!has_errors(diags));
    REQUIRE(f.kind == Formula::Kind::Forall);
    CHECK(f.var == "b");
    REQUIRE(f.body().kind == Formula::Kind::Forall);
    CHECK(f.body().var == "a");
    CHECK(is_closed(f));
}

TEST_CASE("alpha equivalence sees binder structure, not binder names") {
    Formula a = Formula::forall("x", "G", Formula::eq(Term::var("x"), Term::var("x")));
    Formula b = Formula::forall("y", "G", Formula::eq(Term::var("y"), Term::var("y")));
    CHECK(alpha_eq(a, b));
    Formula c = Formula::forall("y", "G", Formula::eq(Term::var("y"), Term::app("e")));
    CHECK(!alpha_eq(a, c));
    // swapped prefix: not strictly alpha-equal, but equal modulo prefix
    Formula ab = Formula::forall(
        "x", "G",
        Formula::forall("y", "G", Formula::eq(Term::app("f", {Term::var("x")}), Term::var("y"))));
    Formula ba = Formula::forall(
        "y", "G",
        Formula::forall("x", "G", Formula::eq(Term::app("f", {Term::var("x")}), Term::var("y"))));
    CHECK(!alpha_eq(ab, ba));
    CHECK(alpha_eq_mod_prefix(ab, ba));
    // sorts must line up under the permutation
    Formula bh = Formula::forall(
        "y", "H",
        Formula::forall("x", "G", Formula::eq(Term::app("f", {Term::var("x")}), Term::var("y"))));
    CHECK(!alpha_eq_mod_prefix(ab, bh));
}

TEST_CASE("definitions split into parameters and rhs-only universals") {
    const Theory& t = corpus().g.theory("circ_i2_top");
    auto e_parts = def_parts(*t.find("e_slash"));
    REQUIRE(e_parts);
    CHECK(e_parts->params.empty());
    CHECK(e_parts->extras == std::vector<std::string>{"b"});
    auto c_parts = def_parts(*t.find("circ_slash"));
    REQUIRE(c_parts);
    CHECK(c_parts->params == std::vector<std::string>{"a", "b"});
    CHECK(c_parts->extras.empty());
    CHECK(!def_parts(*t.find("cancel")));  // axioms have no definition shape
    // a definition whose lhs is not the symbol applied to distinct variables
    Declaration broken = Declaration::definition(
        "bad", SymbolSignature::op({"G"}, "G"),
        Formula::forall("x", "G", Formula::eq(Term::var("x"), Term::var("x"))));
    CHECK(!def_parts(broken));
}

TEST_CASE("unfolding replaces defined symbols and re-closes the result") {
    const Theory& s1 = corpus().g.theory("slash1_top");
    std::vector<Diag> diags;
    Formula f = parse_formula_in(s1, "a / b = e", diags);
    Formula want = parse_formula_in(s1, "a ∘ i(b) = e", diags);
    REQUIRE(!has_errors(diags));
    CHECK(alpha_eq(unfold(s1, f, 1), want));

    // rhs-only universals of the definiens come back as fresh binders
    const Theory& c2 = corpus().g.theory("circ_i2_top");
    Formula g1 = parse_formula_in(c2, "i_slash(a) = a", diags);
    Formula step1 = parse_formula_in(c2, "e_slash / a = a", diags);
    Formula step2 = parse_formula_in(c2, "(b / b) / a = a", diags);
    REQUIRE(!has_errors(diags));
    CHECK(alpha_eq_mod_prefix(unfold(c2, g1, 1), step1));
    CHECK(alpha_eq_mod_prefix(unfold(c2, g1, 2), step2));
    CHECK(is_closed(unfold(c2, g1, 2)));
}

TEST_CASE("parse errors carry their source position") {
    Workspace ws;
    CHECK(!ws.load_text("theory t {\n  sort G;\n  op : G;\n}", "bad.thy"));
    REQUIRE(!ws.diags.empty());
    CHECK(ws.diags.front().code == "ParseError");
    CHECK(ws.diags.front().pos.line == 3);
    CHECK(ws.diags.front().pos.file == "bad.thy");
}

TEST_CASE("well-formedness rejects duplicate names and unknown sorts") {
    Workspace ws;
    CHECK(!ws.load_text("theory t { sort G; sort G; }"));
    REQUIRE(!ws.diags.empty());
    CHECK(ws.diags.front().code == "DuplicateName");

    Workspace ws2;
    CHECK(!ws2.load_text("theory t { sort G; op f : H -> G; }"));
    REQUIRE(!ws2.diags.empty());
    CHECK(ws2.diags.front().code == "UnknownSort");
}

TEST_CASE("infix glyphs print and re-parse through formulas") {
    const Theory& t = corpus().g.theory("group");
    std::vector<Diag> diags;
    Formula f = parse_formula_in(t, "(a / b) ∘ c = a / (b ∘ c)", diags);
    REQUIRE(!has_errors(diags));
    Formula back = parse_formula_in(t, show_formula(t, strip_foralls(f)), diags);
    REQUIRE(!has_errors(diags));
    CHECK(alpha_eq(f, back));
}
