#pragma once

// Brute-force reference implementations used by the tests. They are written
// for clarity, not speed, and share no code with the library algorithms.

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "skm/kig.hpp"
#include "skm/netmodel.hpp"

#ifndef SKM_DATA_DIR
#define SKM_DATA_DIR "data"
#endif

namespace oracle {

using Adj = std::vector<std::set<int>>;
using Set = std::set<int>;

inline std::string data_path(const std::string& name) { return std::string(SKM_DATA_DIR) + "/" + name; }

inline Adj adjacency(const skm::UndirectedGraph& g) {
    Adj adj(static_cast<std::size_t>(g.vertex_count()));
    for (auto [a, b] : g.edges()) {
        adj[static_cast<std::size_t>(a)].insert(b);
        adj[static_cast<std::size_t>(b)].insert(a);
    }
    return adj;
}

inline Set to_set(const skm::IndexSet& s) { return Set(s.begin(), s.end()); }

inline skm::UndirectedGraph random_graph(std::mt19937& rng, int n, double p, bool connected) {
    std::bernoulli_distribution edge(p);
    while (true) {
        skm::UndirectedGraph g(n);
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (edge(rng)) g.add_edge(a, b);
        if (!connected) return g;
        std::vector<int> seen{0};
        std::set<int> visited{0};
        while (!seen.empty()) {
            int v = seen.back();
            seen.pop_back();
            for (int u : g.neighbors(v))
                if (visited.insert(u).second) seen.push_back(u);
        }
        if (static_cast<int>(visited.size()) == n) return g;
    }
}

// Does some simple path from A to B avoid D? Depth-first over every simple path.
inline bool path_exists_avoiding(const Adj& adj, const Set& a, const Set& b, const Set& d) {
    std::vector<bool> on_path(adj.size(), false);
    std::function<bool(int)> walk = [&](int v) {
        if (b.count(v)) return true;
        on_path[static_cast<std::size_t>(v)] = true;
        for (int u : adj[static_cast<std::size_t>(v)]) {
            if (on_path[static_cast<std::size_t>(u)] || d.count(u)) continue;
            if (walk(u)) return true;
        }
        on_path[static_cast<std::size_t>(v)] = false;
        return false;
    };
    for (int v : a) {
        std::fill(on_path.begin(), on_path.end(), false);
        if (walk(v)) return true;
    }
    return false;
}

inline bool is_clique(const Adj& adj, const Set& s) {
    for (int a : s)
        for (int b : s)
            if (a < b && !adj[static_cast<std::size_t>(a)].count(b)) return false;
    return true;
}

// Chordal iff vertices can be removed one at a time, each simplicial when removed.
inline bool chordal_by_elimination(Adj adj) {
    std::set<int> alive;
    for (std::size_t v = 0; v < adj.size(); ++v) alive.insert(static_cast<int>(v));
    while (!alive.empty()) {
        int simplicial = -1;
        for (int v : alive) {
            if (is_clique(adj, adj[static_cast<std::size_t>(v)])) {
                simplicial = v;
                break;
            }
        }
        if (simplicial < 0) return false;
        for (int u : adj[static_cast<std::size_t>(simplicial)]) adj[static_cast<std::size_t>(u)].erase(simplicial);
        adj[static_cast<std::size_t>(simplicial)].clear();
        alive.erase(simplicial);
    }
    return true;
}

inline std::vector<Set> subsets(int n) {
    std::vector<Set> out;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        Set s;
        for (int v = 0; v < n; ++v)
            if (mask & (1u << v)) s.insert(v);
        out.push_back(s);
    }
    return out;
}

inline std::set<Set> maximal_cliques(const Adj& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<Set> cliques;
    for (const auto& s : subsets(n))
        if (!s.empty() && is_clique(adj, s)) cliques.push_back(s);
    std::set<Set> out;
    for (const auto& c : cliques) {
        bool maximal = true;
        for (const auto& other : cliques)
            if (other.size() > c.size() && std::includes(other.begin(), other.end(), c.begin(), c.end()))
                maximal = false;
        if (maximal) out.insert(c);
    }
    return out;
}

inline int components(const Adj& adj, const Set& within) {
    std::set<int> left = within;
    int count = 0;
    while (!left.empty()) {
        ++count;
        std::vector<int> stack{*left.begin()};
        left.erase(left.begin());
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int u : adj[static_cast<std::size_t>(v)])
                if (left.erase(u)) stack.push_back(u);
        }
    }
    return count;
}

// G[W] is prime when no complete subset S of W (empty included) leaves G[W \ S] disconnected.
inline bool is_prime(const Adj& adj, const Set& w) {
    std::vector<int> items(w.begin(), w.end());
    const int k = static_cast<int>(items.size());
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
        Set s;
        Set rest;
        for (int i = 0; i < k; ++i) (mask & (1u << i) ? s : rest).insert(items[static_cast<std::size_t>(i)]);
        if (!is_clique(adj, s) || rest.empty()) continue;
        if (components(adj, rest) > 1) return false;
    }
    return true;
}

// Vertex sets of the maximal prime induced subgraphs.
inline std::set<Set> maximal_prime_sets(const Adj& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<Set> primes;
    for (const auto& s : subsets(n))
        if (!s.empty() && is_prime(adj, s)) primes.push_back(s);
    std::set<Set> out;
    for (const auto& p : primes) {
        bool maximal = true;
        for (const auto& other : primes)
            if (other.size() > p.size() && std::includes(other.begin(), other.end(), p.begin(), p.end()))
                maximal = false;
        if (maximal) out.insert(p);
    }
    return out;
}

// A network on n species (s0..) with m reactions (r0..), distinct nonzero columns.
inline skm::ReactionNetwork random_network(std::mt19937& rng, int n, int m) {
    std::vector<std::string> ids;
    for (int k = 0; k < n; ++k) ids.push_back("s" + std::to_string(k));
    std::uniform_int_distribution<int> species(0, n - 1);
    std::uniform_int_distribution<int> side_size(0, 2);
    std::uniform_int_distribution<int> stoich(1, 2);
    std::uniform_real_distribution<double> rate(0.2, 2.0);
    while (true) {
        std::vector<skm::Reaction> reactions;
        std::set<std::vector<int>> columns;
        int attempts = 0;
        while (static_cast<int>(reactions.size()) < m && attempts++ < 1000) {
            skm::Reaction r;
            r.name = "r" + std::to_string(reactions.size());
            r.rate = rate(rng);
            for (auto* side : {&r.reactants, &r.products}) {
                std::set<int> used;
                int count = side_size(rng);
                for (int i = 0; i < count; ++i) {
                    int s = species(rng);
                    if (used.insert(s).second) side->push_back({s, stoich(rng)});
                }
            }
            std::vector<int> col(static_cast<std::size_t>(n), 0);
            for (const auto& t : r.reactants) col[static_cast<std::size_t>(t.species)] -= t.stoich;
            for (const auto& t : r.products) col[static_cast<std::size_t>(t.species)] += t.stoich;
            if (std::all_of(col.begin(), col.end(), [](int v) { return v == 0; })) continue;
            if (!columns.insert(col).second) continue;
            reactions.push_back(std::move(r));
        }
        if (static_cast<int>(reactions.size()) == m) return skm::ReactionNetwork(ids, reactions);
    }
}

// pa(k) recomputed straight from the reaction lists.
inline std::set<std::pair<int, int>> kig_edges(const skm::ReactionNetwork& net) {
    std::set<std::pair<int, int>> out;
    for (int m = 0; m < net.reaction_count(); ++m) {
        const auto& r = net.reaction(m);
        std::map<int, int> change;
        for (const auto& t : r.reactants) change[t.species] -= t.stoich;
        for (const auto& t : r.products) change[t.species] += t.stoich;
        for (auto [k, v] : change) {
            if (v == 0) continue;
            for (const auto& t : r.reactants)
                if (t.species != k) out.emplace(t.species, k);
        }
    }
    return out;
}

// Reactions grouped by their change restricted to `rows`, as sets of names.
inline std::set<std::set<std::string>> classes_by_change(const skm::ReactionNetwork& net,
                                                         const std::vector<int>& reactions, const Set& rows) {
    std::map<std::vector<int>, std::set<std::string>> groups;
    for (int m : reactions) {
        std::vector<int> key;
        for (int k : rows) key.push_back(net.stoich(k, m));
        groups[key].insert(net.reaction(m).name);
    }
    std::set<std::set<std::string>> out;
    for (auto& [k, v] : groups) out.insert(v);
    return out;
}

}  // namespace oracle
