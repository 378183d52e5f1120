#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <tgk/workspace.hpp>

using namespace tgk;

namespace {

Workspace load_corpus() {
    Workspace ws;
    REQUIRE(ws.load_file(std::string(TGK_SOURCE_DIR) + "/corpus/groups.thy"));
    REQUIRE(ws.ok());
    return ws;
}

// The cyclic group of order three, tables laid out row-major.
FiniteStructure z3() {
    FiniteStructure m;
    m.carriers["G"] = 3;
    m.tables["circ"] = {0, 1, 2, 1, 2, 0, 2, 0, 1};
    m.tables["e"] = {0};
    m.tables["i"] = {0, 2, 1};
    return m;
}

FiniteStructure z4() {
    FiniteStructure m;
    m.carriers["G"] = 4;
    m.tables["circ"].resize(16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m.tables["circ"][static_cast<size_t>(i * 4 + j)] = (i + j) % 4;
    m.tables["e"] = {0};
    m.tables["i"] = {0, 3, 2, 1};
    return m;
}

// flattened table tuple, used to compare model sets from different searches
std::vector<int> key_of(const FiniteStructure& m, const std::vector<std::string>& ops) {
    std::vector<int> key;
    for (const auto& op : ops) {
        const auto& t = m.tables.at(op);
        key.insert(key.end(), t.begin(), t.end());
    }
    return key;
}

}  // namespace

TEST_CASE("hand-built cyclic tables satisfy the composition axioms") {
    Workspace ws = load_corpus();
    const Theory& group1 = ws.g.theory("group1");
    CHECK(satisfies(group1, z3()));

    FiniteStructure broken = z3();
    broken.tables["i"] = {1, 2, 1};  // no longer an inverse for 0
    CHECK(!satisfies(group1, broken));
}

TEST_CASE("model enumeration finds every labeled model exactly once") {
    Workspace ws = load_corpus();
    SearchBudget budget;

    // composition signature, two elements: walk all 16*2*4 table fillings
    // and keep the ones where the three axioms hold pointwise
    std::set<std::vector<int>> by_hand;
    for (int c = 0; c < 16; ++c)
        for (int e = 0; e < 2; ++e)
            for (int inv = 0; inv < 4; ++inv) {
                auto circ = [&](int x, int y) { return (c >> (3 - (x * 2 + y))) & 1; };
                auto i = [&](int x) { return (inv >> (1 - x)) & 1; };
                bool ok = true;
                for (int a = 0; a < 2 && ok; ++a) {
                    if (circ(a, e) != a || circ(a, i(a)) != e) ok = false;
                    for (int b = 0; b < 2 && ok; ++b)
                        for (int d = 0; d < 2; ++d)
                            if (circ(circ(a, b), d) != circ(a, circ(b, d))) {
                                ok = false;
                                break;
                            }
                }
                if (!ok) continue;
                std::vector<int> key;
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y) key.push_back(circ(x, y));
                key.push_back(e);
                key.push_back(i(0));
                key.push_back(i(1));
                by_hand.insert(std::move(key));
            }
    REQUIRE(by_hand.size() == 2);  // one neutral element per labeling

    std::set<std::vector<int>> searched;
    enumerate_models(ws.g.theory("group1"), {{"G", 2}}, budget, [&](const FiniteStructure& m) {
        searched.insert(key_of(m, {"circ", "e", "i"}));
        return true;
    });
    CHECK(searched == by_hand);

    // division signature: the counts must track the composition side, since
    // the two presentations are equivalent (two on two elements, three on three)
    for (int n : {2, 3}) {
        std::set<std::vector<int>> hand;
        int cells = n * n;
        long total = 1;
        for (int k = 0; k < cells; ++k) total *= n;
        for (long t = 0; t < total; ++t) {
            std::vector<int> tab(static_cast<size_t>(cells));
            long rem = t;
            for (int k = cells - 1; k >= 0; --k) {
                tab[static_cast<size_t>(k)] = static_cast<int>(rem % n);
                rem /= n;
            }
            auto s = [&](int x, int y) { return tab[static_cast<size_t>(x * n + y)]; };
            bool ok = true;
            for (int a = 0; a < n && ok; ++a)
                for (int b = 0; b < n && ok; ++b) {
                    if (s(a, a) != s(b, b) || s(a, s(b, b)) != a) ok = false;
                    for (int c = 0; c < n; ++c)
                        if (s(s(a, a), s(b, c)) != s(c, b) || s(s(a, c), s(b, c)) != s(a, b)) {
                            ok = false;
                            break;
                        }
                }
            if (ok) hand.insert(std::move(tab));
        }
        REQUIRE(hand.size() == (n == 2 ? 2 : 3));

        std::set<std::vector<int>> found;
        enumerate_models(ws.g.theory("group2"), {{"G", n}}, budget, [&](const FiniteStructure& m) {
            found.insert(key_of(m, {"slash"}));
            return true;
        });
        CHECK(found == hand);
    }
}

TEST_CASE("countermodel search stops at the smallest refuting size") {
    Workspace ws = load_corpus();
    const Theory& group2 = ws.g.theory("group2");
    std::vector<Diag> diags;
    Formula comm = parse_formula_in(group2, "a / b = b / a", diags);
    REQUIRE(!has_errors(diags));

    SearchBudget budget;
    CHECK(!find_countermodel(group2, comm, 2, budget).has_value());
    auto m = find_countermodel(group2, comm, 3, budget);
    REQUIRE(m.has_value());
    CHECK(m->carrier("G") == 3);
    CHECK(!eval_closed(EvalCtx(group2, *m), comm));
}

TEST_CASE("a wrong symbol mapping survives small sizes and breaks at three") {
    Workspace ws = load_corpus();
    TheoryGraph& g = ws.g;

    View bad;
    bad.name = "v2_mut";
    bad.source = "group2";
    bad.target = "slash1_top";
    bad.entries["G"] = ViewTarget::to("G");
    bad.entries["slash"] = ViewTarget::to("circ");  // composition is not division
    REQUIRE(check_view(g, bad).ok());

    SearchBudget budget;
    for (const auto& o : {"cancel", "unit_cancel", "swap_args", "shift"})
        CHECK(finite_check_obligation(g, bad, o, 2, budget).closed);
    CHECK(bad.all_discharged());

    FiniteCheckResult res = finite_check_obligation(g, bad, "cancel", 3, budget);
    CHECK(!res.closed);
    REQUIRE(res.countermodel.has_value());
    CHECK(res.countermodel->carrier("G") == 3);
    const Obligation* o = bad.obligation("cancel");
    CHECK(o->status == ObStatus::Open);
    CHECK(o->via.empty());
    REQUIRE(o->countermodel.has_value());
    CHECK(!eval_closed(EvalCtx(g.theory("slash1_top"), *o->countermodel), o->statement));
}

TEST_CASE("transport pulls division models out of composition models") {
    Workspace ws = load_corpus();
    TheoryGraph& g = ws.g;
    const View& v2 = g.view("v2");
    const Theory& top = g.theory("slash1_top");
    const Theory& group2 = g.theory("group2");

    SearchBudget budget;
    int seen = 0;
    for (const auto& sizes : size_tuples(top, 3))
        enumerate_models(top, sizes, budget, [&](const FiniteStructure& m) {
            ++seen;
            FiniteStructure pulled = transport_model(g, v2, m);
            CHECK(pulled.carrier("G") == m.carrier("G"));
            CHECK(satisfies(group2, pulled));
            return true;
        });
    CHECK(seen == 6);  // 1 + 2 + 3 labeled groups, each with its forced division table
}

TEST_CASE("definition tables are computed and verified") {
    Workspace ws = load_corpus();
    const Theory& top = ws.g.theory("slash1_top");

    FiniteStructure full = complete_definitions(top, z3());
    CHECK(full.tables.at("slash_circ") ==
          std::vector<int>{0, 2, 1, 1, 0, 2, 2, 1, 0});  // (a - b) mod 3
    CHECK(satisfies(top, full));

    FiniteStructure wrong = z3();
    wrong.tables["slash_circ"] = std::vector<int>(9, 0);  // prefilled and false
    try {
        complete_definitions(top, wrong);
        FAIL("constant-zero table passed as a division");
    } catch (const Error& err) {
        CHECK(err.code == "DefinitionUnsatisfied");
    }
}

TEST_CASE("transport demands a table for every mapped symbol") {
    Workspace ws = load_corpus();
    try {
        transport_model(ws.g, ws.g.view("v2"), z3());  // no slash_circ table in sight
        FAIL("transport invented a table");
    } catch (const Error& err) {
        CHECK(err.code == "MissingTable");
    }
}

TEST_CASE("transport along an unproved view can break the source axioms") {
    Workspace ws = load_corpus();
    TheoryGraph& g = ws.g;

    View vbad;
    vbad.name = "vbad";
    vbad.source = "group1";
    vbad.target = "group1";
    vbad.entries["G"] = ViewTarget::to("G");
    vbad.entries["circ"] = ViewTarget::to("circ");
    vbad.entries["e"] = ViewTarget::to("e");
    vbad.entries["i"] =
        ViewTarget::tmpl({"a"}, {}, Term::app("circ", {Term::var("a"), Term::var("a")}));
    REQUIRE(check_view(g, vbad).ok());
    for (auto& o : vbad.obligations) o.status = ObStatus::Assumed;  // unearned

    FiniteStructure pulled = transport_model(g, vbad, z4());
    CHECK(pulled.tables.at("i") == std::vector<int>{0, 2, 0, 2});  // doubling, not inverting
    CHECK(!satisfies(g.theory("group1"), pulled));
}

TEST_CASE("a tiny budget trips before the search finishes") {
    Workspace ws = load_corpus();
    std::vector<Diag> diags;
    Formula comm = parse_formula_in(ws.g.theory("group1"), "a ∘ b = b ∘ a", diags);
    REQUIRE(!has_errors(diags));
    SearchBudget tiny{10};
    try {
        find_countermodel(ws.g.theory("group1"), comm, 3, tiny);
        FAIL("search of thousands of tables fit in ten steps");
    } catch (const Error& err) {
        CHECK(err.code == "BudgetExceeded");
    }
}

namespace {

// A second evaluator, written straight off the truth tables, to keep the
// production one honest on arbitrary closed formulas.
struct RefEval {
    const Theory& t;
    const FiniteStructure& m;
    int n;

    int term(const Term& x, std::map<std::string, int>& env) const {
        if (x.is_var()) return env.at(x.head);
        long idx = 0;
        for (const auto& a : x.args) idx = idx * n + term(a, env);
        return m.tables.at(x.head).at(static_cast<size_t>(idx));
    }
    bool formula(const Formula& f, std::map<std::string, int>& env) const {
        switch (f.kind) {
            case Formula::Kind::Eq: return term(f.lhs, env) == term(f.rhs, env);
            case Formula::Kind::Not: return !formula(f.kids[0], env);
            case Formula::Kind::And: return formula(f.kids[0], env) && formula(f.kids[1], env);
            case Formula::Kind::Or: return formula(f.kids[0], env) || formula(f.kids[1], env);
            case Formula::Kind::Implies:
                return !formula(f.kids[0], env) || formula(f.kids[1], env);
            case Formula::Kind::Forall:
            case Formula::Kind::Exists: {
                bool uni = f.kind == Formula::Kind::Forall;
                int saved = env.count(f.var) ? env[f.var] : -1;
                for (int x = 0; x < n; ++x) {
                    env[f.var] = x;
                    bool r = formula(f.kids[0], env);
                    if (uni != r) {
                        if (saved >= 0) env[f.var] = saved; else env.erase(f.var);
                        return !uni;
                    }
                }
                if (saved >= 0) env[f.var] = saved; else env.erase(f.var);
                return uni;
            }
        }
        return false;
    }
};

Term rand_term(std::mt19937& rng, const std::vector<std::string>& vars, int depth) {
    if (depth >= 2 || rng() % 2 == 0)
        return Term::var(vars[rng() % vars.size()]);
    return Term::app("slash",
                     {rand_term(rng, vars, depth + 1), rand_term(rng, vars, depth + 1)});
}

Formula rand_body(std::mt19937& rng, const std::vector<std::string>& vars, int depth) {
    if (depth >= 2 || rng() % 3 == 0)
        return Formula::eq(rand_term(rng, vars, 0), rand_term(rng, vars, 0));
    switch (rng() % 4) {
        case 0: return Formula::neg(rand_body(rng, vars, depth + 1));
        case 1:
            return Formula::conj(rand_body(rng, vars, depth + 1),
                                 rand_body(rng, vars, depth + 1));
        case 2:
            return Formula::disj(rand_body(rng, vars, depth + 1),
                                 rand_body(rng, vars, depth + 1));
        default:
            return Formula::implies(rand_body(rng, vars, depth + 1),
                                    rand_body(rng, vars, depth + 1));
    }
}

}  // namespace

TEST_CASE("the evaluator agrees with an independent one on random input") {
    Workspace ws = load_corpus();
    const Theory& group2 = ws.g.theory("group2");
    std::mt19937 rng(505);

    int cases = 0;
    for (int round = 0; round < 300; ++round) {
        int n = 1 + static_cast<int>(rng() % 3);
        FiniteStructure m;
        m.carriers["G"] = n;
        auto& tab = m.tables["slash"];
        tab.resize(static_cast<size_t>(n * n));
        for (auto& cell : tab) cell = static_cast<int>(rng() % n);

        size_t nv = 1 + rng() % 3;
        std::vector<std::string> vars;
        for (size_t i = 0; i < nv; ++i) vars.push_back("x" + std::to_string(i));
        Formula f = rand_body(rng, vars, 0);
        for (size_t i = nv; i-- > 0;)
            f = Formula::quant(rng() % 2 ? Formula::Kind::Forall : Formula::Kind::Exists,
                               vars[i], "G", std::move(f));
        REQUIRE(is_closed(f));

        std::map<std::string, int> env;
        bool ref = RefEval{group2, m, n}.formula(f, env);
        bool got = eval_closed(EvalCtx(group2, m), f);
        if (ref != got) {
            INFO("round " << round << ", size " << n);
            REQUIRE(ref == got);
        }
        ++cases;
    }
    CHECK(cases == 300);
}
