#include "pkg/store.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <mutex>
#include <set>
#include <unordered_map>

#include "pkg/error.hpp"

namespace pkg {

namespace {

using TermId = std::uint32_t;
using Key = std::array<TermId, 3>;
constexpr TermId kMaxId = std::numeric_limits<TermId>::max();

bool valid_variable_name(const std::string& name) {
    if (name.empty()) {
        return false;
    }
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

std::string describe_quad_problem(const Quad& q) {
    if (!q.graph.valid()) {
        return "invalid graph IRI '" + q.graph.str() + "'";
    }
    if (q.subject.is_literal()) {
        return "literal in subject position";
    }
    if (!q.subject.node_iri().valid()) {
        return "invalid subject IRI '" + q.subject.node_iri().str() + "'";
    }
    if (!q.predicate.valid()) {
        return "invalid predicate IRI '" + q.predicate.str() + "'";
    }
    if (q.object.is_node()) {
        if (!q.object.node_iri().valid()) {
            return "invalid object IRI '" + q.object.node_iri().str() + "'";
        }
    } else {
        const auto& lit = q.object.as_literal();
        if (!lit.datatype.valid()) {
            return "invalid literal datatype '" + lit.datatype.str() + "'";
        }
        if (lit.language.has_value() != (lit.datatype == vocab::rdf_langString)) {
            return "language tag requires rdf:langString and vice versa";
        }
    }
    return {};
}

void validate_pattern(const TriplePattern& tp) {
    auto check = [](const PatternTerm& pt, const char* position) {
        if (const auto* v = std::get_if<Variable>(&pt); v && !valid_variable_name(v->name)) {
            throw StoreError(std::string("invalid variable name in ") + position + ": '" + v->name + "'");
        }
    };
    check(tp.subject, "subject");
    check(tp.predicate, "predicate");
    check(tp.object, "object");
    if (const auto* t = std::get_if<Term>(&tp.subject); t && t->is_literal()) {
        throw StoreError("literal in subject position of a triple pattern");
    }
    if (const auto* t = std::get_if<Term>(&tp.predicate); t && !t->is_node()) {
        throw StoreError("predicate of a triple pattern must be an IRI or a variable");
    }
}

} // namespace

std::vector<std::string> pattern_variables(std::span<const TriplePattern> where) {
    std::vector<std::string> out;
    auto note = [&](const PatternTerm& pt) {
        if (const auto* v = std::get_if<Variable>(&pt)) {
            if (std::find(out.begin(), out.end(), v->name) == out.end()) {
                out.push_back(v->name);
            }
        }
    };
    for (const auto& tp : where) {
        note(tp.subject);
        note(tp.predicate);
        note(tp.object);
    }
    return out;
}

void validate_select(const SelectQuery& query) {
    if (!query.graph.valid()) {
        throw StoreError("query graph is not a valid IRI: '" + query.graph.str() + "'");
    }
    for (const auto& tp : query.where) {
        validate_pattern(tp);
    }
    auto vars = pattern_variables(query.where);
    auto occurs = [&](const std::string& name) { return std::find(vars.begin(), vars.end(), name) != vars.end(); };
    std::set<std::string> projected;
    for (const auto& name : query.projection) {
        if (!occurs(name)) {
            throw StoreError("projected variable ?" + name + " does not occur in the pattern");
        }
        if (!projected.insert(name).second) {
            throw StoreError("variable ?" + name + " projected twice");
        }
    }
    for (const auto& f : query.filters) {
        if (!occurs(f.variable)) {
            throw StoreError("filter variable ?" + f.variable + " does not occur in the pattern");
        }
        if (f.case_insensitive && !f.value.is_literal()) {
            throw StoreError("case-insensitive filter needs a literal operand");
        }
    }
}

struct QuadStore::Graph {
    mutable std::shared_mutex mutex;
    std::vector<Term> terms;
    std::unordered_map<Term, TermId> ids;
    std::set<Key> spo;  // (s, p, o)
    std::set<Key> pos;  // (p, o, s)
    std::set<Key> osp;  // (o, s, p)

    std::optional<TermId> lookup(const Term& t) const {
        auto it = ids.find(t);
        if (it == ids.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    TermId intern(const Term& t) {
        auto [it, fresh] = ids.emplace(t, static_cast<TermId>(terms.size()));
        if (fresh) {
            terms.push_back(t);
        }
        return it->second;
    }

    bool add(TermId s, TermId p, TermId o) {
        if (!spo.insert({s, p, o}).second) {
            return false;
        }
        pos.insert({p, o, s});
        osp.insert({o, s, p});
        return true;
    }

    bool remove(TermId s, TermId p, TermId o) {
        if (spo.erase({s, p, o}) == 0) {
            return false;
        }
        pos.erase({p, o, s});
        osp.erase({o, s, p});
        return true;
    }

    // Visits (s, p, o) for every stored triple agreeing with the bound positions.
    template <typename F>
    void scan(std::optional<TermId> s, std::optional<TermId> p, std::optional<TermId> o, F&& visit) const {
        auto range = [](const std::set<Key>& index, std::initializer_list<TermId> prefix, auto&& emit) {
            Key lo{0, 0, 0};
            Key hi{kMaxId, kMaxId, kMaxId};
            std::size_t i = 0;
            for (TermId v : prefix) {
                lo[i] = v;
                hi[i] = v;
                ++i;
            }
            for (auto it = index.lower_bound(lo); it != index.end() && !(hi < *it); ++it) {
                emit(*it);
            }
        };
        if (s && p && o) {
            if (spo.contains({*s, *p, *o})) {
                visit(*s, *p, *o);
            }
        } else if (s && p) {
            range(spo, {*s, *p}, [&](const Key& k) { visit(k[0], k[1], k[2]); });
        } else if (s && o) {
            range(osp, {*o, *s}, [&](const Key& k) { visit(k[1], k[2], k[0]); });
        } else if (s) {
            range(spo, {*s}, [&](const Key& k) { visit(k[0], k[1], k[2]); });
        } else if (p && o) {
            range(pos, {*p, *o}, [&](const Key& k) { visit(k[2], k[0], k[1]); });
        } else if (p) {
            range(pos, {*p}, [&](const Key& k) { visit(k[2], k[0], k[1]); });
        } else if (o) {
            range(osp, {*o}, [&](const Key& k) { visit(k[1], k[2], k[0]); });
        } else {
            for (const auto& k : spo) {
                visit(k[0], k[1], k[2]);
            }
        }
    }
};

namespace {

// A pattern position after interning: a ground term id or a variable slot.
struct Slot {
    bool is_var = false;
    std::size_t var = 0;
    TermId id = 0;
};

struct CompiledFilter {
    std::size_t var;
    std::optional<TermId> equals;
    std::optional<std::string> lowered;
};

class Solver {
public:
    using Assignment = std::vector<std::optional<TermId>>;

    // Returns false when a ground term or filter constant is absent from the
    // graph, in which case there are no solutions at all.
    bool compile(const QuadStore::Graph& g, std::span<const TriplePattern> where, std::span<const Filter> filters) {
        graph_ = &g;
        variables_ = pattern_variables(where);
        bool satisfiable = true;
        auto slot_of = [&](const PatternTerm& pt) {
            Slot slot;
            if (const auto* v = std::get_if<Variable>(&pt)) {
                slot.is_var = true;
                slot.var = index_of(v->name);
            } else if (auto id = g.lookup(std::get<Term>(pt))) {
                slot.id = *id;
            } else {
                satisfiable = false;
            }
            return slot;
        };
        for (const auto& tp : where) {
            patterns_.push_back({slot_of(tp.subject), slot_of(tp.predicate), slot_of(tp.object)});
        }
        for (const auto& f : filters) {
            CompiledFilter cf{index_of(f.variable), std::nullopt, std::nullopt};
            if (f.case_insensitive) {
                cf.lowered = f.value.str();
            } else if (auto id = g.lookup(f.value)) {
                cf.equals = *id;
            } else {
                satisfiable = false;
            }
            filters_.push_back(std::move(cf));
        }
        order_patterns();
        return satisfiable;
    }

    const std::vector<std::string>& variables() const { return variables_; }

    std::size_t index_of(const std::string& name) const {
        return static_cast<std::size_t>(std::find(variables_.begin(), variables_.end(), name) - variables_.begin());
    }

    template <typename F>
    void solve(F&& on_solution) {
        Assignment a(variables_.size());
        step(0, a, on_solution);
    }

private:
    // Greedy order: next is the pattern with the most positions already fixed
    // (ground or bound by earlier patterns); ties keep the written order.
    void order_patterns() {
        std::vector<bool> bound(variables_.size(), false);
        std::vector<std::array<Slot, 3>> ordered;
        std::vector<bool> used(patterns_.size(), false);
        for (std::size_t n = 0; n < patterns_.size(); ++n) {
            int best_score = -1;
            std::size_t best = 0;
            for (std::size_t i = 0; i < patterns_.size(); ++i) {
                if (used[i]) {
                    continue;
                }
                int score = 0;
                for (const auto& slot : patterns_[i]) {
                    score += (!slot.is_var || bound[slot.var]) ? 1 : 0;
                }
                if (score > best_score) {
                    best_score = score;
                    best = i;
                }
            }
            used[best] = true;
            for (const auto& slot : patterns_[best]) {
                if (slot.is_var) {
                    bound[slot.var] = true;
                }
            }
            ordered.push_back(patterns_[best]);
        }
        patterns_ = std::move(ordered);
    }

    bool filters_hold(std::size_t var, TermId value) const {
        for (const auto& f : filters_) {
            if (f.var != var) {
                continue;
            }
            if (f.equals && *f.equals != value) {
                return false;
            }
            if (f.lowered && ascii_lower(graph_->terms[value].str()) != *f.lowered) {
                return false;
            }
        }
        return true;
    }

    template <typename F>
    void step(std::size_t index, Assignment& a, F& on_solution) {
        if (index == patterns_.size()) {
            on_solution(a);
            return;
        }
        const auto& pattern = patterns_[index];
        auto fixed = [&](const Slot& slot) -> std::optional<TermId> {
            if (!slot.is_var) {
                return slot.id;
            }
            return a[slot.var];
        };
        graph_->scan(fixed(pattern[0]), fixed(pattern[1]), fixed(pattern[2]), [&](TermId s, TermId p, TermId o) {
            std::array<TermId, 3> values{s, p, o};
            std::vector<std::size_t> newly;
            bool ok = true;
            for (std::size_t i = 0; i < 3 && ok; ++i) {
                const auto& slot = pattern[i];
                if (!slot.is_var) {
                    continue;
                }
                if (a[slot.var]) {
                    ok = *a[slot.var] == values[i];
                } else {
                    a[slot.var] = values[i];
                    newly.push_back(slot.var);
                    ok = filters_hold(slot.var, values[i]);
                }
            }
            if (ok) {
                step(index + 1, a, on_solution);
            }
            for (auto v : newly) {
                a[v].reset();
            }
        });
    }

    const QuadStore::Graph* graph_ = nullptr;
    std::vector<std::string> variables_;
    std::vector<std::array<Slot, 3>> patterns_;
    std::vector<CompiledFilter> filters_;
};

} // namespace

QuadStore::QuadStore() = default;
QuadStore::~QuadStore() = default;

void QuadStore::register_graph(const Iri& graph) {
    if (!graph.valid()) {
        throw StoreError("graph name is not a valid IRI: '" + graph.str() + "'");
    }
    std::unique_lock lock(registry_mutex_);
    graphs_.try_emplace(graph, std::make_shared<Graph>());
}

bool QuadStore::has_graph(const Iri& graph) const { return find(graph) != nullptr; }

std::vector<Iri> QuadStore::graphs() const {
    std::shared_lock lock(registry_mutex_);
    std::vector<Iri> out;
    for (const auto& [iri, g] : graphs_) {
        out.push_back(iri);
    }
    return out;
}

std::shared_ptr<QuadStore::Graph> QuadStore::find(const Iri& graph) const {
    std::shared_lock lock(registry_mutex_);
    auto it = graphs_.find(graph);
    return it == graphs_.end() ? nullptr : it->second;
}

std::shared_ptr<QuadStore::Graph> QuadStore::require(const Iri& graph) const {
    auto g = find(graph);
    if (!g) {
        throw StoreError("graph <" + graph.str() + "> belongs to no registered owner");
    }
    return g;
}

std::uint64_t QuadStore::insert(std::span<const Quad> quads) {
    std::map<Iri, std::pair<std::shared_ptr<Graph>, std::vector<const Quad*>>> by_graph;
    for (const auto& q : quads) {
        if (auto problem = describe_quad_problem(q); !problem.empty()) {
            throw StoreError("cannot insert quad: " + problem);
        }
        auto& entry = by_graph[q.graph];
        if (!entry.first) {
            entry.first = require(q.graph);
        }
        entry.second.push_back(&q);
    }
    bool changed = false;
    for (auto& [iri, entry] : by_graph) {
        auto& g = *entry.first;
        std::unique_lock lock(g.mutex);
        for (const Quad* q : entry.second) {
            changed |= g.add(g.intern(q->subject), g.intern(Term::iri(q->predicate)), g.intern(q->object));
        }
    }
    return changed ? ++revision_ : revision_.load();
}

std::uint64_t QuadStore::erase(std::span<const Quad> quads) {
    bool changed = false;
    for (const auto& q : quads) {
        auto g = find(q.graph);
        if (!g) {
            continue;
        }
        std::unique_lock lock(g->mutex);
        auto s = g->lookup(q.subject);
        auto p = g->lookup(Term::iri(q.predicate));
        auto o = g->lookup(q.object);
        if (s && p && o) {
            changed |= g->remove(*s, *p, *o);
        }
    }
    return changed ? ++revision_ : revision_.load();
}

std::vector<Binding> QuadStore::match(const Iri& graph, const TriplePattern& pattern) const {
    validate_pattern(pattern);
    std::vector<Binding> out;
    auto g = find(graph);
    if (!g) {
        return out;
    }
    std::shared_lock lock(g->mutex);
    Solver solver;
    std::array<TriplePattern, 1> where{pattern};
    if (!solver.compile(*g, where, {})) {
        return out;
    }
    const auto& vars = solver.variables();
    solver.solve([&](const Solver::Assignment& a) {
        Binding b;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            b.emplace(vars[i], g->terms[*a[i]]);
        }
        out.push_back(std::move(b));
    });
    return out;
}

std::vector<Quad> QuadStore::quads(const Iri& graph) const {
    std::vector<Quad> out;
    auto g = find(graph);
    if (!g) {
        return out;
    }
    std::shared_lock lock(g->mutex);
    out.reserve(g->spo.size());
    for (const auto& k : g->spo) {
        out.push_back({graph, g->terms[k[0]], g->terms[k[1]].node_iri(), g->terms[k[2]]});
    }
    return out;
}

std::size_t QuadStore::size(const Iri& graph) const {
    auto g = find(graph);
    if (!g) {
        return 0;
    }
    std::shared_lock lock(g->mutex);
    return g->spo.size();
}

ResultTable QuadStore::execute_select(const SelectQuery& query) const {
    validate_select(query);
    ResultTable table;
    table.variables = query.projection.empty() ? pattern_variables(query.where) : query.projection;
    auto g = find(query.graph);
    if (!g) {
        return table;
    }
    std::shared_lock lock(g->mutex);
    Solver solver;
    if (!solver.compile(*g, query.where, query.filters)) {
        return table;
    }
    std::vector<std::size_t> columns;
    for (const auto& name : table.variables) {
        columns.push_back(solver.index_of(name));
    }
    std::set<std::vector<TermId>> distinct;
    solver.solve([&](const Solver::Assignment& a) {
        std::vector<TermId> row;
        row.reserve(columns.size());
        for (auto c : columns) {
            row.push_back(*a[c]);
        }
        distinct.insert(std::move(row));
    });
    std::vector<std::pair<std::vector<std::string>, std::vector<Term>>> keyed;
    keyed.reserve(distinct.size());
    for (const auto& ids : distinct) {
        std::vector<std::string> key;
        std::vector<Term> row;
        for (auto id : ids) {
            key.push_back(to_ntriples(g->terms[id]));
            row.push_back(g->terms[id]);
        }
        keyed.emplace_back(std::move(key), std::move(row));
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [key, row] : keyed) {
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::uint64_t QuadStore::execute_update(const UpdateQuery& query) {
    if (const auto* ins = std::get_if<InsertData>(&query.op)) {
        return insert(ins->quads);
    }
    const auto& del = std::get<DeleteWhere>(query.op);
    for (const auto& tp : del.where) {
        validate_pattern(tp);
    }
    auto g = require(del.graph);
    std::unique_lock lock(g->mutex);
    Solver solver;
    if (!solver.compile(*g, del.where, {})) {
        return revision_.load();
    }
    std::set<Key> doomed;
    std::vector<std::array<Slot, 3>> slots;
    for (const auto& tp : del.where) {
        std::array<Slot, 3> row{};
        std::size_t i = 0;
        for (const auto* pt : {&tp.subject, &tp.predicate, &tp.object}) {
            if (const auto* v = std::get_if<Variable>(pt)) {
                row[i] = Slot{true, solver.index_of(v->name), 0};
            } else {
                row[i] = Slot{false, 0, *g->lookup(std::get<Term>(*pt))};
            }
            ++i;
        }
        slots.push_back(row);
    }
    solver.solve([&](const Solver::Assignment& a) {
        for (const auto& row : slots) {
            Key k{};
            for (std::size_t i = 0; i < 3; ++i) {
                k[i] = row[i].is_var ? *a[row[i].var] : row[i].id;
            }
            doomed.insert(k);
        }
    });
    bool changed = false;
    for (const auto& k : doomed) {
        changed |= g->remove(k[0], k[1], k[2]);
    }
    return changed ? ++revision_ : revision_.load();
}

} // namespace pkg
