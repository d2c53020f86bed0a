#include "skm/chordal.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

#include "skm/error.hpp"

namespace skm {

namespace {

// Unnumbered vertex of maximum weight, lowest index on ties.
int pick_max(const std::vector<int>& weight, const std::vector<bool>& numbered) {
    int best = -1;
    for (std::size_t v = 0; v < weight.size(); ++v) {
        if (numbered[v]) continue;
        if (best < 0 || weight[v] > weight[static_cast<std::size_t>(best)]) best = static_cast<int>(v);
    }
    return best;
}

}  // namespace

std::vector<int> mcs_order(const UndirectedGraph& g) {
    const auto n = static_cast<std::size_t>(g.vertex_count());
    std::vector<int> weight(n, 0);
    std::vector<bool> numbered(n, false);
    std::vector<int> order;
    order.reserve(n);
    for (std::size_t step = 0; step < n; ++step) {
        int v = pick_max(weight, numbered);
        numbered[static_cast<std::size_t>(v)] = true;
        order.push_back(v);
        for (int u : g.neighbors(v))
            if (!numbered[static_cast<std::size_t>(u)]) ++weight[static_cast<std::size_t>(u)];
    }
    return order;
}

namespace {

bool is_perfect_elimination_order(const UndirectedGraph& g, const std::vector<int>& peo) {
    std::vector<int> pos(peo.size());
    for (std::size_t i = 0; i < peo.size(); ++i) pos[static_cast<std::size_t>(peo[i])] = static_cast<int>(i);
    for (int v : peo) {
        int first = -1;
        for (int u : g.neighbors(v))
            if (pos[static_cast<std::size_t>(u)] > pos[static_cast<std::size_t>(v)] &&
                (first < 0 || pos[static_cast<std::size_t>(u)] < pos[static_cast<std::size_t>(first)]))
                first = u;
        if (first < 0) continue;
        for (int u : g.neighbors(v))
            if (u != first && pos[static_cast<std::size_t>(u)] > pos[static_cast<std::size_t>(v)] && !g.has_edge(first, u))
                return false;
    }
    return true;
}

}  // namespace

ChordalityResult is_chordal(const UndirectedGraph& g) {
    auto order = mcs_order(g);
    std::reverse(order.begin(), order.end());
    if (is_perfect_elimination_order(g, order)) return {true, order};
    return {false, {}};
}

Triangulation minimal_triangulation(const UndirectedGraph& g) {
    const int n = g.vertex_count();
    const auto un = static_cast<std::size_t>(n);
    Triangulation t{g, {}, g, {}};
    std::vector<int> weight(un, 0);
    std::vector<bool> numbered(un, false);
    std::vector<int> picked;

    for (int step = 0; step < n; ++step) {
        int v = pick_max(weight, numbered);
        // Minimax search: cost[u] is the smallest achievable maximum weight of
        // the interior vertices on an unnumbered path v .. u (-1 for neighbours).
        constexpr int unreached = std::numeric_limits<int>::max();
        std::vector<int> cost(un, unreached);
        using Item = std::pair<int, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
        for (int u : g.neighbors(v)) {
            if (numbered[static_cast<std::size_t>(u)]) continue;
            cost[static_cast<std::size_t>(u)] = -1;
            queue.emplace(-1, u);
        }
        while (!queue.empty()) {
            auto [c, x] = queue.top();
            queue.pop();
            if (c != cost[static_cast<std::size_t>(x)]) continue;
            int through = std::max(c, weight[static_cast<std::size_t>(x)]);
            for (int y : g.neighbors(x)) {
                if (y == v || numbered[static_cast<std::size_t>(y)]) continue;
                if (through < cost[static_cast<std::size_t>(y)]) {
                    cost[static_cast<std::size_t>(y)] = through;
                    queue.emplace(through, y);
                }
            }
        }
        std::vector<int> reached;
        for (int u = 0; u < n; ++u) {
            const auto uu = static_cast<std::size_t>(u);
            if (u == v || numbered[uu] || cost[uu] == unreached) continue;
            if (cost[uu] < weight[uu]) reached.push_back(u);
        }
        for (int u : reached) {
            ++weight[static_cast<std::size_t>(u)];
            if (!t.result.has_edge(v, u)) {
                t.result.add_edge(v, u);
                t.fill_edges.emplace_back(std::min(u, v), std::max(u, v));
            }
        }
        numbered[static_cast<std::size_t>(v)] = true;
        picked.push_back(v);
    }
    std::sort(t.fill_edges.begin(), t.fill_edges.end());
    t.elimination_order.assign(picked.rbegin(), picked.rend());
    return t;
}

std::vector<SpeciesSet> cliques_rip(const UndirectedGraph& chordal) {
    if (!is_chordal(chordal).chordal) throw Error("not-chordal", "clique extraction needs a chordal graph");
    auto order = mcs_order(chordal);
    std::vector<SpeciesSet> candidates;
    SpeciesSet visited;
    for (int v : order) {
        SpeciesSet c = chordal.neighbors(v) & visited;
        c.insert(v);
        candidates.push_back(std::move(c));
        visited.insert(v);
    }
    std::vector<SpeciesSet> cliques;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        bool maximal = true;
        for (std::size_t j = 0; j < candidates.size() && maximal; ++j)
            if (j != i && candidates[i].is_subset_of(candidates[j]) &&
                (candidates[i] != candidates[j] || j < i))
                maximal = false;
        if (maximal) cliques.push_back(candidates[i]);
    }
    for (std::size_t e = 1; e < cliques.size(); ++e)
        if (rip_parent(cliques, e) < 0) throw Error("rip-violated", "clique order violates the running intersection property");
    return cliques;
}

int rip_parent(const std::vector<SpeciesSet>& cliques, std::size_t e) {
    SpeciesSet before;
    for (std::size_t i = 0; i < e; ++i) before |= cliques[i];
    SpeciesSet overlap = cliques[e] & before;
    for (std::size_t d = 0; d < e; ++d)
        if (overlap.is_subset_of(cliques[d])) return static_cast<int>(d);
    return -1;
}

// ---- junction trees ---------------------------------------------------------

const Cluster& JunctionTree::cluster(int id) const {
    auto it = std::lower_bound(clusters.begin(), clusters.end(), id,
                               [](const Cluster& c, int v) { return c.id < v; });
    if (it == clusters.end() || it->id != id)
        throw Error("unknown-cluster", "no cluster with id " + std::to_string(id));
    return *it;
}

bool JunctionTree::has_cluster(int id) const {
    return std::any_of(clusters.begin(), clusters.end(), [id](const Cluster& c) { return c.id == id; });
}

bool JunctionTree::adjacent(int a, int b) const {
    return cluster(a).parent == b || cluster(b).parent == a;
}

std::vector<TreeEdge> JunctionTree::edges() const {
    std::vector<TreeEdge> out;
    for (const auto& c : clusters)
        if (c.parent >= 0) out.push_back({c.parent, c.id, c.separator});
    return out;
}

std::vector<int> JunctionTree::ids() const {
    std::vector<int> out;
    for (const auto& c : clusters) out.push_back(c.id);
    return out;
}

namespace {

Cluster& mutable_cluster(JunctionTree& t, int id) {
    return const_cast<Cluster&>(t.cluster(id));
}

void relabel(JunctionTree& t) {
    for (auto& c : t.clusters) {
        std::sort(c.children.begin(), c.children.end());
        c.separator = c.parent >= 0 ? c.members & t.cluster(c.parent).members : SpeciesSet{};
    }
}

}  // namespace

JunctionTree build_clique_tree(const std::vector<SpeciesSet>& cliques, std::vector<std::string> names) {
    JunctionTree t;
    t.names = std::move(names);
    for (std::size_t e = 0; e < cliques.size(); ++e) {
        Cluster c;
        c.id = static_cast<int>(e) + 1;
        c.members = cliques[e];
        if (e > 0) {
            int d = rip_parent(cliques, e);
            if (d < 0) throw Error("rip-violated", "clique " + std::to_string(e + 1) + " has no running-intersection parent");
            c.parent = d + 1;
            t.clusters[static_cast<std::size_t>(d)].children.push_back(c.id);
        }
        t.clusters.push_back(std::move(c));
    }
    t.root = t.clusters.empty() ? -1 : 1;
    relabel(t);
    return t;
}

JunctionTree aggregate(const JunctionTree& tree, int i, int j) {
    const int lo = std::min(i, j);
    const int hi = std::max(i, j);
    if (lo == hi || !tree.adjacent(lo, hi))
        throw Error("not-adjacent", "clusters " + std::to_string(i) + " and " + std::to_string(j) + " are not adjacent");

    JunctionTree t = tree;
    Cluster keep = t.cluster(lo);
    Cluster gone = t.cluster(hi);
    keep.members |= gone.members;

    std::vector<int> kids = keep.children;
    kids.insert(kids.end(), gone.children.begin(), gone.children.end());
    if (gone.parent == lo) {
        // P = pa(C_i), C = (ch(C_i) u ch(C_j)) \ C_j
        kids.erase(std::remove(kids.begin(), kids.end(), hi), kids.end());
    } else {
        kids.erase(std::remove(kids.begin(), kids.end(), lo), kids.end());
        keep.parent = gone.parent;
        if (gone.parent >= 0) {
            auto& siblings = mutable_cluster(t, gone.parent).children;
            std::replace(siblings.begin(), siblings.end(), hi, lo);
        } else {
            t.root = lo;
        }
    }
    keep.children = kids;
    for (int child : gone.children)
        if (child != lo) mutable_cluster(t, child).parent = lo;
    mutable_cluster(t, lo) = keep;
    t.clusters.erase(std::find_if(t.clusters.begin(), t.clusters.end(), [hi](const Cluster& c) { return c.id == hi; }));
    relabel(t);
    return t;
}

JunctionTree mpd(const JunctionTree& tree, const UndirectedGraph& g) {
    SpeciesSet covered;
    for (const auto& c : tree.clusters) {
        for (int v : c.members)
            if (v < 0 || v >= g.vertex_count()) throw Error("inconsistent-inputs", "cluster member outside the graph");
        covered |= c.members;
    }
    if (covered != SpeciesSet::range(g.vertex_count()))
        throw Error("inconsistent-inputs", "tree clusters do not cover every vertex of the graph");

    JunctionTree t = tree;
    while (true) {
        bool merged = false;
        for (const auto& e : t.edges()) {
            if (!g.is_complete(e.separator)) {
                t = aggregate(t, e.parent, e.child);
                merged = true;
                break;
            }
        }
        if (!merged) return t;
    }
}

namespace {

std::string cluster_label(int id) { return "C" + std::to_string(id); }

std::string set_text(const std::vector<std::string>& names, const SpeciesSet& s) {
    std::string out = "{";
    bool first = true;
    for (int v : s) {
        out += (first ? "" : ",") + (v >= 0 && static_cast<std::size_t>(v) < names.size() ? names[static_cast<std::size_t>(v)] : std::to_string(v));
        first = false;
    }
    return out + "}";
}

// Path of cluster ids between a and b through the parent links.
std::vector<int> tree_path(const JunctionTree& t, int a, int b) {
    std::vector<int> up_a{a};
    for (int p = t.cluster(a).parent; p >= 0; p = t.cluster(p).parent) up_a.push_back(p);
    std::vector<int> up_b{b};
    for (int p = t.cluster(b).parent; p >= 0; p = t.cluster(p).parent) up_b.push_back(p);
    while (up_a.size() > 1 && up_b.size() > 1 && up_a[up_a.size() - 2] == up_b[up_b.size() - 2]) {
        up_a.pop_back();
        up_b.pop_back();
    }
    std::vector<int> path = up_a;
    for (auto it = up_b.rbegin() + 1; it != up_b.rend(); ++it) path.push_back(*it);
    return path;
}

SpeciesSet subtree_union(const JunctionTree& t, int id) {
    SpeciesSet out = t.cluster(id).members;
    for (int child : t.cluster(id).children) out |= subtree_union(t, child);
    return out;
}

}  // namespace

ValidationReport verify_junction_tree(const JunctionTree& tree, const UndirectedGraph& g,
                                      const UndirectedGraph& triangulated) {
    ValidationReport report;
    if (tree.clusters.empty()) {
        report.add("structure", Severity::error, "tree has no clusters");
        return report;
    }

    // Structure: one root, consistent parent/child links, every cluster reachable.
    int roots = 0;
    for (const auto& c : tree.clusters) {
        if (c.parent < 0) {
            ++roots;
            if (c.id != tree.root)
                report.add("structure", Severity::error, cluster_label(c.id) + " has no parent but is not the root",
                           {cluster_label(c.id)});
            continue;
        }
        if (!tree.has_cluster(c.parent)) {
            report.add("structure", Severity::error, cluster_label(c.id) + " points to a missing parent",
                       {cluster_label(c.id)});
            continue;
        }
        const auto& siblings = tree.cluster(c.parent).children;
        if (std::find(siblings.begin(), siblings.end(), c.id) == siblings.end())
            report.add("structure", Severity::error, "parent of " + cluster_label(c.id) + " does not list it as a child",
                       {cluster_label(c.id)});
    }
    for (const auto& c : tree.clusters)
        for (int child : c.children)
            if (!tree.has_cluster(child) || tree.cluster(child).parent != c.id)
                report.add("structure", Severity::error, cluster_label(c.id) + " lists a child that does not point back",
                           {cluster_label(c.id)});
    if (roots != 1) report.add("structure", Severity::error, "tree must have exactly one root");
    if (!report.passed()) return report;

    std::vector<int> stack{tree.root};
    std::vector<int> seen;
    while (!stack.empty() && seen.size() <= tree.clusters.size()) {
        int id = stack.back();
        stack.pop_back();
        seen.push_back(id);
        for (int child : tree.cluster(id).children) stack.push_back(child);
    }
    std::sort(seen.begin(), seen.end());
    if (seen != tree.ids()) {
        report.add("structure", Severity::error, "tree is not connected and acyclic");
        return report;
    }

    for (const auto& e : tree.edges()) {
        SpeciesSet expected = tree.cluster(e.parent).members & tree.cluster(e.child).members;
        if (e.separator != expected)
            report.add("edge-label", Severity::error,
                       "edge " + cluster_label(e.parent) + "-" + cluster_label(e.child) + " is labelled " +
                           set_text(tree.names, e.separator) + " but the clusters intersect in " +
                           set_text(tree.names, expected),
                       {cluster_label(e.parent), cluster_label(e.child)});
    }

    SpeciesSet covered;
    for (const auto& c : tree.clusters) covered |= c.members;
    if (covered != SpeciesSet::range(g.vertex_count()))
        report.add("coverage", Severity::error, "clusters do not cover every vertex");

    for (std::size_t x = 0; x < tree.clusters.size(); ++x) {
        for (std::size_t y = x + 1; y < tree.clusters.size(); ++y) {
            const auto& a = tree.clusters[x];
            const auto& b = tree.clusters[y];
            SpeciesSet common = a.members & b.members;
            if (common.empty()) continue;
            for (int id : tree_path(tree, a.id, b.id)) {
                if (!common.is_subset_of(tree.cluster(id).members)) {
                    report.add("junction-property", Severity::error,
                               "intersection of " + cluster_label(a.id) + " and " + cluster_label(b.id) +
                                   " is not contained in " + cluster_label(id) + " on the path between them",
                               {cluster_label(a.id), cluster_label(b.id), cluster_label(id)});
                    break;
                }
            }
        }
    }

    SpeciesSet all;
    for (const auto& c : tree.clusters) all |= c.members;
    for (const auto& e : tree.edges()) {
        SpeciesSet below = subtree_union(tree, e.child);
        SpeciesSet above;
        for (const auto& c : tree.clusters) {
            auto path = tree_path(tree, c.id, e.child);
            bool in_child_subtree = std::find(path.begin(), path.end(), e.parent) == path.end();
            if (!in_child_subtree) above |= c.members;
        }
        std::vector<std::string> subjects{cluster_label(e.parent), cluster_label(e.child)};
        if ((below & above) != e.separator) {
            report.add("edge-separator", Severity::error,
                       "label of edge " + cluster_label(e.parent) + "-" + cluster_label(e.child) +
                           " differs from the intersection of the two subtree unions",
                       subjects);
            continue;
        }
        SpeciesSet lhs = below - e.separator;
        SpeciesSet rhs = above - e.separator;
        if (!separated_or_vacuous(triangulated, lhs, rhs, e.separator))
            report.add("separation-triangulated", Severity::error,
                       "subtrees across " + cluster_label(e.parent) + "-" + cluster_label(e.child) +
                           " are not separated by the label in the triangulated graph",
                       subjects);
        if (!separated_or_vacuous(g, lhs, rhs, e.separator))
            report.add("separation", Severity::error,
                       "subtrees across " + cluster_label(e.parent) + "-" + cluster_label(e.child) +
                           " are not separated by the label",
                       subjects);
    }
    return report;
}

CliqueDecomposition clique_decomposition(const UndirectedGraph& g) {
    auto t = minimal_triangulation(g);
    auto cliques = cliques_rip(t.result);
    auto tree = build_clique_tree(cliques, g.names());
    return {std::move(t), std::move(tree)};
}

Json to_json(const JunctionTree& tree) {
    auto names = [&](const SpeciesSet& s) {
        Json arr = Json::array();
        for (int v : s) arr.push_back(tree.names.at(static_cast<std::size_t>(v)));
        return arr;
    };
    Json clusters = Json::array();
    Json ids = Json::array();
    for (const auto& c : tree.clusters) {
        clusters.push_back(names(c.members));
        ids.push_back(c.id);
    }
    Json edges = Json::array();
    for (const auto& e : tree.edges()) edges.push_back({{"a", e.parent}, {"b", e.child}, {"separator", names(e.separator)}});
    return {{"clusters", clusters}, {"cluster_ids", ids}, {"edges", edges}, {"root", tree.root}};
}

std::string to_dot(const JunctionTree& tree) {
    auto text = [&](const SpeciesSet& s) {
        std::string out;
        for (int v : s) out += (out.empty() ? "" : ", ") + tree.names.at(static_cast<std::size_t>(v));
        return out;
    };
    std::ostringstream out;
    out << "graph junction_tree {\n  node [shape=box];\n";
    for (const auto& c : tree.clusters)
        out << "  " << cluster_label(c.id) << " [label=\"" << text(c.members) << "\"];\n";
    for (const auto& e : tree.edges())
        out << "  " << cluster_label(e.parent) << " -- " << cluster_label(e.child) << " [label=\"" << text(e.separator)
            << "\"];\n";
    out << "}\n";
    return out.str();
}

Json to_json(const Triangulation& t) {
    Json fill = Json::array();
    for (auto [a, b] : t.fill_edges)
        fill.push_back({t.base.names().at(static_cast<std::size_t>(a)), t.base.names().at(static_cast<std::size_t>(b))});
    Json order = Json::array();
    for (int v : t.elimination_order) order.push_back(t.base.names().at(static_cast<std::size_t>(v)));
    return {{"fill_edges", fill}, {"elimination_order", order}};
}

}  // namespace skm
