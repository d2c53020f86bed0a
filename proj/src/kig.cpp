#include "skm/kig.hpp"

#include <deque>
#include <sstream>

#include "skm/error.hpp"

namespace skm {

DirectedGraph::DirectedGraph(std::vector<std::string> names)
    : names_(std::move(names)), parents_(names_.size()) {}

void DirectedGraph::add_edge(int from, int to) {
    if (from == to) return;
    parents_.at(static_cast<std::size_t>(to)).insert(from);
}

std::vector<std::pair<int, int>> DirectedGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int k = 0; k < vertex_count(); ++k)
        for (int i : parents(k)) out.emplace_back(i, k);
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t DirectedGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& p : parents_) n += p.size();
    return n;
}

UndirectedGraph::UndirectedGraph(int n) : adj_(static_cast<std::size_t>(n)) {
    for (int v = 0; v < n; ++v) names_.push_back(std::to_string(v));
}

UndirectedGraph::UndirectedGraph(std::vector<std::string> names)
    : names_(std::move(names)), adj_(names_.size()) {}

void UndirectedGraph::add_edge(int a, int b) {
    if (a == b) return;
    adj_.at(static_cast<std::size_t>(a)).insert(b);
    adj_.at(static_cast<std::size_t>(b)).insert(a);
}

void UndirectedGraph::remove_edge(int a, int b) {
    adj_.at(static_cast<std::size_t>(a)).erase(b);
    adj_.at(static_cast<std::size_t>(b)).erase(a);
}

std::vector<std::pair<int, int>> UndirectedGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < vertex_count(); ++a)
        for (int b : neighbors(a))
            if (a < b) out.emplace_back(a, b);
    return out;
}

std::size_t UndirectedGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& a : adj_) n += a.size();
    return n / 2;
}

bool UndirectedGraph::is_complete(const SpeciesSet& s) const {
    for (int a : s)
        for (int b : s)
            if (a < b && !has_edge(a, b)) return false;
    return true;
}

UndirectedGraph UndirectedGraph::induced(const SpeciesSet& s) const {
    UndirectedGraph out(names_);
    for (int a : s)
        for (int b : neighbors(a))
            if (a < b && s.contains(b)) out.add_edge(a, b);
    return out;
}

SpeciesSet reactants_of_changes(const ReactionNetwork& net, const SpeciesSet& s) {
    SpeciesSet out;
    for (int m : changed_reactions(net, s)) out |= net.reactants(m);
    return out;
}

DirectedGraph build_kig(const ReactionNetwork& net) {
    std::vector<std::string> names;
    for (const auto& s : net.species()) names.push_back(s.id);
    DirectedGraph g(std::move(names));
    for (int k = 0; k < net.species_count(); ++k)
        for (int i : reactants_of_changes(net, SpeciesSet{k})) g.add_edge(i, k);
    return g;
}

UndirectedGraph undirected(const DirectedGraph& g) {
    UndirectedGraph out(g.names());
    for (auto [i, k] : g.edges()) out.add_edge(i, k);
    return out;
}

UndirectedGraph moralize(const DirectedGraph& g) {
    UndirectedGraph out = undirected(g);
    for (int k = 0; k < g.vertex_count(); ++k)
        for (int a : g.parents(k))
            for (int b : g.parents(k))
                if (a < b) out.add_edge(a, b);
    return out;
}

UndirectedGraph fraternize(const ReactionNetwork& net, const DirectedGraph& g) {
    UndirectedGraph out = undirected(g);
    for (int m = 0; m < net.reaction_count(); ++m) {
        auto col = net.column(m);
        for (int j = 0; j < net.species_count(); ++j)
            for (int k = j + 1; k < net.species_count(); ++k)
                if (col[static_cast<std::size_t>(j)] > 0 && col[static_cast<std::size_t>(k)] > 0) out.add_edge(j, k);
    }
    return out;
}

namespace {

void check_query_sets(const UndirectedGraph& g, const SpeciesSet& a, const SpeciesSet& b, const SpeciesSet& d) {
    for (const auto* s : {&a, &b, &d})
        for (int v : *s)
            if (v < 0 || v >= g.vertex_count()) throw Error("unknown-species", "vertex index out of range");
    if (a.intersects(b) || a.intersects(d) || b.intersects(d))
        throw Error("overlapping-sets", "separation query sets must be pairwise disjoint");
}

}  // namespace

std::optional<std::vector<int>> separation_witness(const UndirectedGraph& g, const SpeciesSet& a,
                                                   const SpeciesSet& b, const SpeciesSet& d) {
    check_query_sets(g, a, b, d);
    std::vector<int> prev(static_cast<std::size_t>(g.vertex_count()), -2);
    std::deque<int> queue;
    for (int v : a) {
        prev[static_cast<std::size_t>(v)] = -1;
        queue.push_back(v);
    }
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        if (b.contains(v)) {
            std::vector<int> path;
            for (int u = v; u != -1; u = prev[static_cast<std::size_t>(u)]) path.insert(path.begin(), u);
            return path;
        }
        for (int u : g.neighbors(v)) {
            if (d.contains(u) || prev[static_cast<std::size_t>(u)] != -2) continue;
            prev[static_cast<std::size_t>(u)] = v;
            queue.push_back(u);
        }
    }
    return std::nullopt;
}

bool is_separated(const UndirectedGraph& g, const SpeciesSet& a, const SpeciesSet& b, const SpeciesSet& d) {
    if (a.empty() || b.empty()) throw Error("empty-set", "separation query needs nonempty A and B");
    return !separation_witness(g, a, b, d).has_value();
}

bool separated_or_vacuous(const UndirectedGraph& g, const SpeciesSet& a, const SpeciesSet& b, const SpeciesSet& d) {
    if (a.empty() || b.empty()) {
        check_query_sets(g, a, b, d);
        return true;
    }
    return is_separated(g, a, b, d);
}

SpeciesSet closure(const DirectedGraph& g, const SpeciesSet& b) {
    if (b.empty()) throw Error("empty-set", "closure needs a nonempty species set");
    SpeciesSet out = b;
    for (int k : b) {
        if (k < 0 || k >= g.vertex_count()) throw Error("unknown-species", "vertex index out of range");
        out |= g.parents(k);
    }
    return out;
}

SpeciesPartition complete_partition(const UndirectedGraph& g, const SpeciesSet& a, const SpeciesSet& b,
                                    const SpeciesSet& d) {
    check_query_sets(g, a, b, d);
    SpeciesPartition out{a, b, d};
    std::vector<bool> seen(static_cast<std::size_t>(g.vertex_count()), false);
    std::deque<int> queue(a.begin(), a.end());
    for (int v : a) seen[static_cast<std::size_t>(v)] = true;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int u : g.neighbors(v)) {
            if (seen[static_cast<std::size_t>(u)] || d.contains(u) || b.contains(u)) continue;
            seen[static_cast<std::size_t>(u)] = true;
            out.a.insert(u);
            queue.push_back(u);
        }
    }
    for (int v = 0; v < g.vertex_count(); ++v)
        if (!out.a.contains(v) && !d.contains(v)) out.b.insert(v);
    return out;
}

PartitionVerdict partition_verdict(const ReactionNetwork& net, const DirectedGraph& g, const SpeciesPartition& p) {
    const auto all = SpeciesSet::range(g.vertex_count());
    if (p.a.intersects(p.b) || p.a.intersects(p.d) || p.b.intersects(p.d) || (p.a | p.b | p.d) != all)
        throw Error("not-a-partition", "A, B and D must partition the species");
    PartitionVerdict v;
    v.graphical = separated_or_vacuous(undirected(g), p.a, p.b, p.d);
    v.chemical = !p.a.intersects(reactants_of_changes(net, p.b)) && !p.b.intersects(reactants_of_changes(net, p.a));
    return v;
}

LocalIndependenceReport local_independence_report(const ReactionNetwork& net, const DirectedGraph& g,
                                                  const SpeciesSet& b,
                                                  const std::optional<SpeciesPartition>& partition) {
    LocalIndependenceReport report;
    report.closure = closure(g, b);
    report.independent_of = SpeciesSet::range(g.vertex_count()) - report.closure;
    if (partition) report.partition = partition_verdict(net, g, *partition);
    return report;
}

namespace {

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string to_dot(const DirectedGraph& g) {
    std::ostringstream out;
    out << "digraph kig {\n";
    for (const auto& name : g.names()) out << "  " << quoted(name) << ";\n";
    for (auto [i, k] : g.edges()) out << "  " << quoted(g.names()[static_cast<std::size_t>(i)]) << " -> "
                                      << quoted(g.names()[static_cast<std::size_t>(k)]) << ";\n";
    out << "}\n";
    return out.str();
}

std::string to_dot(const UndirectedGraph& g) {
    std::ostringstream out;
    out << "graph kig {\n";
    for (const auto& name : g.names()) out << "  " << quoted(name) << ";\n";
    for (auto [a, b] : g.edges()) out << "  " << quoted(g.names()[static_cast<std::size_t>(a)]) << " -- "
                                      << quoted(g.names()[static_cast<std::size_t>(b)]) << ";\n";
    out << "}\n";
    return out.str();
}

Json to_json(const DirectedGraph& g) {
    Json edges = Json::array();
    for (auto [i, k] : g.edges()) edges.push_back({g.names()[static_cast<std::size_t>(i)], g.names()[static_cast<std::size_t>(k)]});
    return {{"directed", true}, {"vertices", g.names()}, {"edges", edges}};
}

Json to_json(const UndirectedGraph& g) {
    Json edges = Json::array();
    for (auto [a, b] : g.edges()) edges.push_back({g.names()[static_cast<std::size_t>(a)], g.names()[static_cast<std::size_t>(b)]});
    return {{"directed", false}, {"vertices", g.names()}, {"edges", edges}};
}

}  // namespace skm
