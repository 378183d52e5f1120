#pragma once

// Finite model oracle.  Structures assign each sort a carrier {0..n-1} and
// each op a flat table; the search walks table cells depth-first in a fixed
// order (tables by arity, then declaration order; row-major inside a table;
// candidate values ascending), pruning with a three-valued evaluation of
// ground axiom instances over the partial tables and propagating cells that
// a single-unknown-cell instance pins down.  Models are therefore visited
// in lexicographic order of their cell vector, so the first hit for a given
// carrier size is reproducible, and sizes are tried smallest first.
//
// The work budget counts dead ends plus completed candidate structures and
// throws BudgetExceeded when spent.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tgk/print.hpp"
#include "tgk/structure.hpp"
#include "tgk/views.hpp"

namespace tgk {

inline constexpr long long kDefaultBudget = 10'000'000;

struct SearchBudget {
    long long limit = kDefaultBudget;
    long long used = 0;

    void spend() {
        if (++used > limit)
            throw Error("BudgetExceeded",
                        "model search exceeded its work budget of " + std::to_string(limit));
    }
};

// ---------------------------------------------------------------------------
// Table shapes: how an op's flat table is laid out for given carrier sizes.

struct TableShape {
    SymbolName op;
    std::vector<SortName> args;
    SortName result;
    std::vector<int> dims;     // carrier size per argument
    std::vector<int> strides;  // row-major, rightmost fastest
    int rows = 1;
    int domain = 0;  // result carrier size
    int offset = 0;  // first cell in the global cell order
    int decl_index = 0;
};

// Shapes in search order: arity ascending, declaration order breaking ties.
inline std::vector<TableShape> table_shapes(const Theory& t,
                                            const std::map<SortName, int>& carriers) {
    std::vector<TableShape> shapes;
    int idx = 0;
    for (const auto& d : t.decls) {
        ++idx;
        if (!d.introduces_symbol() || d.sig.is_sort) continue;
        TableShape s;
        s.op = d.name;
        s.args = d.sig.args;
        s.result = d.sig.result;
        s.decl_index = idx;
        for (const auto& a : s.args) {
            auto it = carriers.find(a);
            s.dims.push_back(it == carriers.end() ? 0 : it->second);
        }
        s.strides.assign(s.dims.size(), 1);
        for (int i = static_cast<int>(s.dims.size()) - 2; i >= 0; --i)
            s.strides[i] = s.strides[i + 1] * s.dims[i + 1];
        for (int d2 : s.dims) s.rows *= d2;
        auto rt = carriers.find(s.result);
        s.domain = rt == carriers.end() ? 0 : rt->second;
        shapes.push_back(std::move(s));
    }
    std::stable_sort(shapes.begin(), shapes.end(), [](const TableShape& a, const TableShape& b) {
        if (a.args.size() != b.args.size()) return a.args.size() < b.args.size();
        return a.decl_index < b.decl_index;
    });
    int off = 0;
    for (auto& s : shapes) {
        s.offset = off;
        off += s.rows;
    }
    return shapes;
}

// ---------------------------------------------------------------------------
// Full evaluation on complete structures.

struct EvalCtx {
    const Theory& t;
    const FiniteStructure& m;
    std::map<SymbolName, TableShape> shapes;

    EvalCtx(const Theory& t_, const FiniteStructure& m_) : t(t_), m(m_) {
        for (auto& s : table_shapes(t_, m_.carriers)) shapes.emplace(s.op, std::move(s));
    }
};

using Env = std::vector<std::pair<std::string, int>>;

inline int env_get(const Env& env, const std::string& v) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
        if (it->first == v) return it->second;
    throw Error("FreeVariable", "variable '" + v + "' unbound during evaluation");
}

inline int eval_term(const EvalCtx& c, const Term& t, const Env& env) {
    if (t.is_var()) return env_get(env, t.head);
    auto it = c.shapes.find(t.head);
    if (it == c.shapes.end())
        throw Error("MissingTable", "structure has no table for '" + t.head + "'");
    const TableShape& s = it->second;
    int idx = 0;
    for (size_t i = 0; i < t.args.size(); ++i) idx += eval_term(c, t.args[i], env) * s.strides[i];
    const auto& table = c.m.tables.at(t.head);
    return table[static_cast<size_t>(idx)];
}

inline bool eval_formula(const EvalCtx& c, const Formula& f, Env& env) {
    switch (f.kind) {
        case Formula::Kind::Eq:
            return eval_term(c, f.lhs, env) == eval_term(c, f.rhs, env);
        case Formula::Kind::Not:
            return !eval_formula(c, f.kids[0], env);
        case Formula::Kind::And:
            return eval_formula(c, f.kids[0], env) && eval_formula(c, f.kids[1], env);
        case Formula::Kind::Or:
            return eval_formula(c, f.kids[0], env) || eval_formula(c, f.kids[1], env);
        case Formula::Kind::Implies:
            return !eval_formula(c, f.kids[0], env) || eval_formula(c, f.kids[1], env);
        case Formula::Kind::Forall:
        case Formula::Kind::Exists: {
            int n = c.m.carrier(f.var_sort);
            bool uni = f.kind == Formula::Kind::Forall;
            for (int x = 0; x < n; ++x) {
                env.emplace_back(f.var, x);
                bool r = eval_formula(c, f.kids[0], env);
                env.pop_back();
                if (uni && !r) return false;
                if (!uni && r) return true;
            }
            return uni;
        }
    }
    return false;
}

inline bool eval_closed(const EvalCtx& c, const Formula& f) {
    Env env;
    return eval_formula(c, f, env);
}

// M satisfies T: every recorded statement (axioms, defining equations,
// theorems) holds.
inline bool satisfies(const Theory& t, const FiniteStructure& m) {
    EvalCtx c(t, m);
    for (const auto& d : t.decls)
        if (d.has_formula() && !eval_closed(c, d.body)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// The search.

namespace detail {

struct Tri {
    int truth = -1;           // 1 true, 0 false, -1 unknown
    int cell = -1;            // an unknown cell the verdict hinges on
    bool multi_cell = false;  // more than one distinct unknown cell involved

    static Tri yes() { return {1, -1, false}; }
    static Tri no() { return {0, -1, false}; }
    void absorb_unknown(const Tri& o) {
        if (o.cell < 0) return;
        if (cell < 0) {
            cell = o.cell;
            multi_cell = o.multi_cell;
        } else if (cell != o.cell || o.multi_cell) {
            multi_cell = true;
        }
    }
};

struct TermVal {
    bool known = false;
    int value = 0;
    int cell = -1;
    bool multi_cell = false;
};

class ModelSearchImpl {
public:
    ModelSearchImpl(const Theory& t, std::map<SortName, int> carriers, SearchBudget& budget)
        : t_(t), carriers_(std::move(carriers)), budget_(budget) {
        shapes_ = table_shapes(t_, carriers_);
        total_cells_ = 0;
        for (size_t si = 0; si < shapes_.size(); ++si) {
            const auto& s = shapes_[si];
            for (int r = 0; r < s.rows; ++r) {
                cell_domain_.push_back(s.domain);
                cell_table_.push_back(static_cast<int>(si));
            }
            by_op_.emplace(s.op, &s);
            total_cells_ += s.rows;
        }
        cells_.assign(static_cast<size_t>(total_cells_), -1);
        table_index_.assign(shapes_.size(), {});
        for (const auto& d : t_.decls) {
            if (!d.has_formula()) continue;
            ground(d.body);
        }
        sat_depth_.assign(instances_.size(), -1);
    }

    // visit returns false to stop the whole search
    bool run(const std::function<bool(const FiniteStructure&)>& visit) {
        for (const auto& [s, n] : carriers_)
            if (n <= 0) return true;  // empty carrier: no structures at this size
        for (const auto& s : shapes_)
            if (s.rows > 0 && s.domain <= 0) return true;
        // seed pass: ground facts may already prune or force cells
        size_t mark = trail_.size();
        for (size_t i = 0; i < instances_.size(); ++i)
            if (!propagate(static_cast<int>(i))) {
                budget_.spend();
                unwind(mark);
                return true;
            }
        return dfs(0, visit);
    }

private:
    struct Instance {
        const Formula* matrix;
        Env env;
    };

    // expand the outer universal prefix into ground instances; each instance
    // is indexed under every table its matrix can read, so an assignment
    // re-examines exactly the instances it could affect
    void ground(const Formula& f) {
        std::set<SymbolName> ops;
        collect_ops(f, ops);
        std::vector<int> tables;
        for (size_t si = 0; si < shapes_.size(); ++si)
            if (ops.count(shapes_[si].op)) tables.push_back(static_cast<int>(si));
        Env env;
        ground_rec(f, env, tables);
    }
    void ground_rec(const Formula& f, Env& env, const std::vector<int>& tables) {
        if (f.kind == Formula::Kind::Forall) {
            int n = carrier(f.var_sort);
            for (int x = 0; x < n; ++x) {
                env.emplace_back(f.var, x);
                ground_rec(f.kids[0], env, tables);
                env.pop_back();
            }
            return;
        }
        int id = static_cast<int>(instances_.size());
        instances_.push_back({&f, env});
        for (int tbl : tables) table_index_[static_cast<size_t>(tbl)].push_back(id);
    }

    static void collect_ops(const Formula& f, std::set<SymbolName>& out) {
        struct {
            void operator()(const Term& t, std::set<SymbolName>& out) const {
                if (!t.is_var()) {
                    out.insert(t.head);
                    for (const auto& a : t.args) (*this)(a, out);
                }
            }
        } term_ops;
        if (f.kind == Formula::Kind::Eq) {
            term_ops(f.lhs, out);
            term_ops(f.rhs, out);
            return;
        }
        for (const auto& k : f.kids) collect_ops(k, out);
    }

    int carrier(const SortName& s) const {
        auto it = carriers_.find(s);
        return it == carriers_.end() ? 0 : it->second;
    }

    TermVal eval_term(const Term& t, Env& env) {
        TermVal out;
        if (t.is_var()) {
            out.known = true;
            out.value = env_get(env, t.head);
            return out;
        }
        const TableShape* s = by_op_.at(t.head);
        int idx = 0;
        bool args_known = true;
        for (size_t i = 0; i < t.args.size(); ++i) {
            TermVal a = eval_term(t.args[i], env);
            if (!a.known) {
                args_known = false;
                merge_cell(out, a.cell, a.multi_cell);
            } else if (args_known) {
                idx += a.value * s->strides[i];
            }
        }
        if (!args_known) return out;
        int cell = s->offset + idx;
        int v = cells_[static_cast<size_t>(cell)];
        if (v >= 0) {
            out.known = true;
            out.value = v;
            return out;
        }
        out.cell = cell;
        return out;
    }

    static void merge_cell(TermVal& out, int cell, bool multi) {
        if (cell < 0) return;
        if (out.cell < 0) {
            out.cell = cell;
            out.multi_cell = multi;
        } else if (out.cell != cell || multi) {
            out.multi_cell = true;
        }
    }

    Tri eval(const Formula& f, Env& env) {
        switch (f.kind) {
            case Formula::Kind::Eq: {
                TermVal l = eval_term(f.lhs, env);
                TermVal r = eval_term(f.rhs, env);
                if (l.known && r.known) return l.value == r.value ? Tri::yes() : Tri::no();
                Tri u;
                merge_unknown(u, l);
                merge_unknown(u, r);
                return u;
            }
            case Formula::Kind::Not: {
                Tri a = eval(f.kids[0], env);
                if (a.truth == 1) return Tri::no();
                if (a.truth == 0) return Tri::yes();
                return a;
            }
            case Formula::Kind::And:
            case Formula::Kind::Or: {
                bool conj = f.kind == Formula::Kind::And;
                Tri acc = conj ? Tri::yes() : Tri::no();
                Tri unknown;
                bool any_unknown = false;
                for (const auto& k : f.kids) {
                    Tri a = eval(k, env);
                    if (a.truth == (conj ? 0 : 1)) return conj ? Tri::no() : Tri::yes();
                    if (a.truth == -1) {
                        any_unknown = true;
                        unknown.absorb_unknown(a);
                    }
                }
                return any_unknown ? unknown : acc;
            }
            case Formula::Kind::Implies: {
                Tri a = eval(f.kids[0], env);
                if (a.truth == 0) return Tri::yes();
                Tri b = eval(f.kids[1], env);
                if (b.truth == 1) return Tri::yes();
                if (a.truth == 1 && b.truth == 0) return Tri::no();
                Tri u;
                if (a.truth == -1) u.absorb_unknown(a);
                if (b.truth == -1) u.absorb_unknown(b);
                return u;
            }
            case Formula::Kind::Forall:
            case Formula::Kind::Exists: {
                bool uni = f.kind == Formula::Kind::Forall;
                int n = carrier(f.var_sort);
                Tri unknown;
                bool any_unknown = false;
                for (int x = 0; x < n; ++x) {
                    env.emplace_back(f.var, x);
                    Tri a = eval(f.kids[0], env);
                    env.pop_back();
                    if (a.truth == (uni ? 0 : 1)) return uni ? Tri::no() : Tri::yes();
                    if (a.truth == -1) {
                        any_unknown = true;
                        unknown.absorb_unknown(a);
                    }
                }
                if (any_unknown) return unknown;
                return uni ? Tri::yes() : Tri::no();
            }
        }
        return {};
    }

    static void merge_unknown(Tri& u, const TermVal& v) {
        if (v.known || v.cell < 0) return;
        Tri t;
        t.cell = v.cell;
        t.multi_cell = v.multi_cell;
        u.absorb_unknown(t);
    }

    // false = contradiction under current partial assignment
    bool propagate(int inst) {
        if (sat_depth_[static_cast<size_t>(inst)] >= 0) return true;  // stays true: cells only get filled
        Instance& I = instances_[static_cast<size_t>(inst)];
        Tri r = eval(*I.matrix, I.env);
        if (r.truth == 0) return false;
        if (r.truth == 1) {
            sat_depth_[static_cast<size_t>(inst)] = static_cast<int>(trail_.size());
            sat_trail_.push_back(inst);
            return true;
        }
        int c = r.cell;
        if (c < 0 || r.multi_cell) return true;
        // exactly one cell in play: try every value for it
        int dom = cell_domain_[static_cast<size_t>(c)];
        int feasible = -1, count = 0;
        for (int val = 0; val < dom && count < 2; ++val) {
            cells_[static_cast<size_t>(c)] = val;
            Tri rv = eval(*I.matrix, I.env);
            cells_[static_cast<size_t>(c)] = -1;
            if (rv.truth != 0) {
                feasible = val;
                ++count;
            }
        }
        if (count == 0) return false;
        if (count == 1) return assign(c, feasible);
        return true;
    }

    bool assign(int cell, int val) {
        int cur = cells_[static_cast<size_t>(cell)];
        if (cur >= 0) return cur == val;
        cells_[static_cast<size_t>(cell)] = val;
        trail_.push_back(cell);
        for (int inst : table_index_[static_cast<size_t>(cell_table_[static_cast<size_t>(cell)])])
            if (!propagate(inst)) return false;
        return true;
    }

    void unwind(size_t mark) {
        while (trail_.size() > mark) {
            cells_[static_cast<size_t>(trail_.back())] = -1;
            trail_.pop_back();
        }
        while (!sat_trail_.empty() &&
               sat_depth_[static_cast<size_t>(sat_trail_.back())] > static_cast<int>(mark)) {
            sat_depth_[static_cast<size_t>(sat_trail_.back())] = -1;
            sat_trail_.pop_back();
        }
    }

    bool dfs(int from, const std::function<bool(const FiniteStructure&)>& visit) {
        int cell = -1;
        for (int c = from; c < total_cells_; ++c)
            if (cells_[static_cast<size_t>(c)] < 0) {
                cell = c;
                break;
            }
        if (cell < 0) {
            budget_.spend();
            FiniteStructure m = snapshot();
            if (!satisfies(t_, m)) return true;  // watch gaps: reject, keep searching
            return visit(m);
        }
        int dom = cell_domain_[static_cast<size_t>(cell)];
        for (int val = 0; val < dom; ++val) {
            size_t mark = trail_.size();
            if (assign(cell, val)) {
                if (!dfs(cell + 1, visit)) return false;
            } else {
                budget_.spend();
            }
            unwind(mark);
        }
        return true;
    }

    FiniteStructure snapshot() const {
        FiniteStructure m;
        m.carriers = carriers_;
        for (const auto& s : shapes_) {
            auto& table = m.tables[s.op];
            table.resize(static_cast<size_t>(s.rows));
            for (int r = 0; r < s.rows; ++r)
                table[static_cast<size_t>(r)] = cells_[static_cast<size_t>(s.offset + r)];
        }
        return m;
    }

    const Theory& t_;
    std::map<SortName, int> carriers_;
    SearchBudget& budget_;
    std::vector<TableShape> shapes_;
    std::map<SymbolName, const TableShape*> by_op_;
    std::vector<int> cells_;
    std::vector<int> cell_domain_;
    std::vector<int> cell_table_;                // cell -> owning shape index
    std::vector<std::vector<int>> table_index_;  // shape index -> instances reading it
    std::vector<int> trail_;
    std::vector<Instance> instances_;
    std::vector<int> sat_depth_;  // per instance: trail depth where it became true, -1 if not
    std::vector<int> sat_trail_;
    int total_cells_ = 0;
};

}  // namespace detail

// Enumerate models of t with the given carrier sizes, in lexicographic cell
// order; `visit` returns false to stop early.
inline void enumerate_models(const Theory& t, const std::map<SortName, int>& carriers,
                             SearchBudget& budget,
                             const std::function<bool(const FiniteStructure&)>& visit) {
    detail::ModelSearchImpl search(t, carriers, budget);
    search.run(visit);
}

// Carrier size maps with every sort in 1..max, ascending by largest size
// first and lexicographically (in sort declaration order) within that, so
// smaller structures are always tried before bigger ones.
inline std::vector<std::map<SortName, int>> size_tuples(const Theory& t, int max_size) {
    std::vector<SortName> sorts = Context::of(t).sorts;
    std::vector<std::map<SortName, int>> out;
    if (sorts.empty()) {
        out.push_back({});
        return out;
    }
    std::vector<int> tuple(sorts.size(), 1);
    for (int cap = 1; cap <= max_size; ++cap) {
        std::function<void(size_t, bool)> rec = [&](size_t i, bool has_cap) {
            if (i == sorts.size()) {
                if (!has_cap) return;  // already produced under a smaller cap
                std::map<SortName, int> m;
                for (size_t k = 0; k < sorts.size(); ++k) m[sorts[k]] = tuple[k];
                out.push_back(std::move(m));
                return;
            }
            for (int n = 1; n <= cap; ++n) {
                tuple[i] = n;
                rec(i + 1, has_cap || n == cap);
            }
        };
        rec(0, false);
    }
    return out;
}

// Smallest countermodel of `statement` among models of `t`, carriers up to
// max_size; nullopt when every model up to the bound satisfies it.
inline std::optional<FiniteStructure> find_countermodel(const Theory& t,
                                                        const Formula& statement,
                                                        int max_size, SearchBudget& budget) {
    std::optional<FiniteStructure> found;
    for (const auto& sizes : size_tuples(t, max_size)) {
        enumerate_models(t, sizes, budget, [&](const FiniteStructure& m) {
            EvalCtx c(t, m);
            if (!eval_closed(c, statement)) {
                found = m;
                return false;
            }
            return true;
        });
        if (found) break;
    }
    return found;
}

// ---------------------------------------------------------------------------
// Transport: pull a model of the view's target back to its source.  Symbol
// entries copy tables (translated sorts share carriers, so the layouts
// agree); template entries are evaluated pointwise, with template extras
// pinned to element 0 (legitimate once the view's obligations hold, which
// force the definiens to be independent of them).

inline FiniteStructure transport_model(const TheoryGraph& g, const View& v,
                                       const FiniteStructure& target_model) {
    const Theory& s = g.theory(v.source);
    const Theory& t = g.theory(v.target);
    EvalCtx tc(t, target_model);
    FiniteStructure m;
    for (const auto* d : s.symbols()) {
        if (!d->sig.is_sort) continue;
        m.carriers[d->name] = target_model.carrier(translate_sort(v, d->name));
    }
    for (const auto& shape : table_shapes(s, m.carriers)) {
        const ViewTarget* e = v.entry(shape.op);
        if (!e) throw Error("UnmappedSymbol", "view '" + v.name + "' does not map '" + shape.op +
                                                  "'; cannot transport");
        auto& table = m.tables[shape.op];
        table.resize(static_cast<size_t>(shape.rows));
        if (e->kind == ViewTarget::Kind::Symbol) {
            auto it = target_model.tables.find(e->symbol);
            if (it == target_model.tables.end())
                throw Error("MissingTable", "target model has no table for '" + e->symbol + "'");
            table = it->second;
            continue;
        }
        std::vector<int> tuple(shape.dims.size(), 0);
        for (int row = 0; row < shape.rows; ++row) {
            int rem = row;
            for (size_t i = 0; i < shape.dims.size(); ++i) {
                tuple[i] = rem / shape.strides[i];
                rem %= shape.strides[i];
            }
            Env env;
            for (size_t i = 0; i < e->params.size(); ++i) env.emplace_back(e->params[i], tuple[i]);
            for (const auto& x : e->extras) env.emplace_back(x, 0);
            table[static_cast<size_t>(row)] = eval_term(tc, e->body, env);
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Finite check of one obligation: search the target theory for a model
// violating the translated statement.  No countermodel up to the bound
// closes the obligation as FiniteChecked(bound); a countermodel leaves it
// open and is recorded on the obligation.

struct FiniteCheckResult {
    bool closed = false;
    std::optional<FiniteStructure> countermodel;
};

inline FiniteCheckResult finite_check_obligation(const TheoryGraph& g, View& v,
                                                 const std::string& origin, int max_size,
                                                 SearchBudget& budget) {
    Obligation* o = v.obligation(origin);
    if (!o) throw Error("UnknownObligation",
                        "view '" + v.name + "' has no obligation for '" + origin + "'");
    const Theory& t = g.theory(v.target);
    FiniteCheckResult res;
    res.countermodel = find_countermodel(t, o->statement, max_size, budget);
    if (res.countermodel) {
        o->status = ObStatus::Open;
        o->countermodel = res.countermodel;
        o->via.clear();
        return res;
    }
    res.closed = true;
    if (o->status == ObStatus::Open ||
        (o->status == ObStatus::FiniteChecked && o->checked_size < max_size)) {
        o->status = ObStatus::FiniteChecked;
        o->checked_size = max_size;
        o->via = "no countermodel up to size " + std::to_string(max_size);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Faithfulness probing.  A faithful view only lets the target prove
// translated statements the source already proves.  The finite shadow of
// a violation is a probe the source refutes in some small model while the
// target refutes its translation nowhere up to the same bound; every such
// probe is reported.  Clean probes are evidence, not proof.

struct ProbeResult {
    std::string label;
    Formula probe;                 // source language
    bool source_refutes = false;   // countermodel found in source
    bool target_refutes = false;   // countermodel of translation found in target
    bool suspicious() const { return source_refutes && !target_refutes; }
};

struct FaithfulReport {
    int max_size = 0;
    std::vector<ProbeResult> probes;
    bool ok() const {
        for (const auto& p : probes)
            if (p.suspicious()) return false;
        return true;
    }
};

inline FaithfulReport faithful_evidence(const TheoryGraph& g, View& v, int max_size,
                                        SearchBudget& budget,
                                        const std::vector<std::pair<std::string, Formula>>&
                                            extra_probes = {}) {
    const Theory& s = g.theory(v.source);
    FaithfulReport rep;
    rep.max_size = max_size;
    std::vector<std::pair<std::string, Formula>> probes;
    for (const auto* d : s.symbols())
        if (d->sig.is_sort)
            probes.emplace_back("collapse(" + d->name + ")",
                                Formula::forall("x", d->name,
                                                Formula::forall("y", d->name,
                                                                Formula::eq(Term::var("x"),
                                                                            Term::var("y")))));
    for (const auto& d : s.decls)
        if (d.kind == DeclKind::Axiom) probes.emplace_back(d.name, d.body);
    for (const auto& p : extra_probes) probes.push_back(p);

    for (auto& [label, f] : probes) {
        ProbeResult r;
        r.label = label;
        r.probe = f;
        r.source_refutes = find_countermodel(s, f, max_size, budget).has_value();
        Formula translated = translate_formula(g, v, f);
        r.target_refutes =
            find_countermodel(g.theory(v.target), translated, max_size, budget).has_value();
        rep.probes.push_back(std::move(r));
    }
    if (rep.ok() && v.faithful_checked_size < max_size) v.faithful_checked_size = max_size;
    return rep;
}

// ---------------------------------------------------------------------------
// Completing a partial structure: fill tables of defined symbols from their
// definientia (extras pinned to 0), in declaration order, then verify every
// defining equation.  Handy for building models of definitional extensions
// out of models of the base.

inline FiniteStructure complete_definitions(const Theory& t, FiniteStructure m) {
    for (const auto& d : t.decls) {
        if (d.kind != DeclKind::Definition || m.has_table(d.name)) continue;
        auto parts = def_parts(d);
        if (!parts) throw Error("BadDefinition", "cannot complete '" + d.name + "'");
        for (const auto& shape : table_shapes(t, m.carriers)) {
            if (shape.op != d.name) continue;
            EvalCtx c(t, m);
            auto& table = m.tables[d.name];
            table.resize(static_cast<size_t>(shape.rows));
            std::vector<int> tuple(shape.dims.size(), 0);
            for (int row = 0; row < shape.rows; ++row) {
                int rem = row;
                for (size_t i = 0; i < shape.dims.size(); ++i) {
                    tuple[i] = rem / shape.strides[i];
                    rem %= shape.strides[i];
                }
                Env env;
                for (size_t i = 0; i < parts->params.size(); ++i)
                    env.emplace_back(parts->params[i], tuple[i]);
                for (const auto& x : parts->extras) env.emplace_back(x, 0);
                table[static_cast<size_t>(row)] = eval_term(c, parts->rhs, env);
            }
        }
    }
    EvalCtx c(t, m);
    for (const auto& d : t.decls)
        if (d.kind == DeclKind::Definition && !eval_closed(c, d.body))
            throw Error("DefinitionUnsatisfied",
                        "completed table for '" + d.name + "' violates its defining equation");
    return m;
}

// ---------------------------------------------------------------------------
// Cayley-style rendering of a structure, deterministic layout.

inline std::string show_structure(const Theory& t, const FiniteStructure& m) {
    std::string out;
    for (const auto& [s, n] : m.carriers) out += "sort " + s + ": size " + std::to_string(n) + "\n";
    for (const auto& shape : table_shapes(t, m.carriers)) {
        auto it = m.tables.find(shape.op);
        if (it == m.tables.end()) continue;
        const auto& table = it->second;
        if (shape.args.empty()) {
            out += shape.op + " = " + std::to_string(table[0]) + "\n";
        } else if (shape.args.size() == 1) {
            out += shape.op + " : [";
            for (int i = 0; i < shape.rows; ++i)
                out += (i ? " " : "") + std::to_string(table[static_cast<size_t>(i)]);
            out += "]\n";
        } else if (shape.args.size() == 2) {
            out += shape.op + " :\n    |";
            for (int j = 0; j < shape.dims[1]; ++j) out += " " + std::to_string(j);
            out += "\n----+" + std::string(static_cast<size_t>(shape.dims[1]) * 2, '-') + "\n";
            for (int i = 0; i < shape.dims[0]; ++i) {
                out += "  " + std::to_string(i) + " |";
                for (int j = 0; j < shape.dims[1]; ++j)
                    out += " " + std::to_string(table[static_cast<size_t>(i * shape.dims[1] + j)]);
                out += "\n";
            }
        } else {
            out += shape.op + " : [";
            for (int i = 0; i < shape.rows; ++i)
                out += (i ? " " : "") + std::to_string(table[static_cast<size_t>(i)]);
            out += "]\n";
        }
    }
    return out;
}

}  // namespace tgk
