#pragma once

// Minimal triangulation, clique junction trees, pairwise cluster aggregation
// and the maximal prime subgraph decomposition.

#include <string>
#include <utility>
#include <vector>

#include "skm/index_set.hpp"
#include "skm/json.hpp"
#include "skm/kig.hpp"
#include "skm/report.hpp"

namespace skm {

struct ChordalityResult {
    bool chordal = false;
    std::vector<int> elimination_order;  // perfect elimination ordering when chordal
};

// Maximum cardinality search visit order; start and ties at the lowest index.
std::vector<int> mcs_order(const UndirectedGraph& g);

ChordalityResult is_chordal(const UndirectedGraph& g);

struct Triangulation {
    UndirectedGraph base;
    std::vector<std::pair<int, int>> fill_edges;  // (a, b), a < b, sorted
    UndirectedGraph result;
    std::vector<int> elimination_order;           // perfect for `result`
};

// MCS-M: a minimal triangulation in O(ne). Vertex weight ties go to the lowest index.
Triangulation minimal_triangulation(const UndirectedGraph& g);

// Maximal cliques of a chordal graph, ordered to satisfy the running
// intersection property. Throws not-chordal.
std::vector<SpeciesSet> cliques_rip(const UndirectedGraph& chordal);

// Smallest d* < e with C_e n (C_1 u ... u C_{e-1}) contained in C_d*, or -1.
int rip_parent(const std::vector<SpeciesSet>& cliques, std::size_t e);

struct Cluster {
    int id = 0;            // stable label, 1-based in clique order
    SpeciesSet members;
    int parent = -1;       // parent id, -1 at the root
    std::vector<int> children;
    SpeciesSet separator;  // label of the edge to the parent

    friend bool operator==(const Cluster&, const Cluster&) = default;
};

struct TreeEdge {
    int parent;
    int child;
    SpeciesSet separator;
};

struct JunctionTree {
    std::vector<std::string> names;  // species ids, for export
    std::vector<Cluster> clusters;   // sorted by id
    int root = -1;

    const Cluster& cluster(int id) const;  // throws unknown-cluster
    bool has_cluster(int id) const;
    bool adjacent(int a, int b) const;
    std::vector<TreeEdge> edges() const;   // sorted by child id
    std::vector<int> ids() const;

    friend bool operator==(const JunctionTree&, const JunctionTree&) = default;
};

// Rooted clique tree: the parent of C_e is C_d* for the smallest valid d*.
// Throws rip-violated.
JunctionTree build_clique_tree(const std::vector<SpeciesSet>& cliques, std::vector<std::string> names);

// Replaces the lower-numbered cluster of an adjacent pair by the union of
// both and removes the other; its children move to the retained cluster.
// Throws unknown-cluster and not-adjacent.
JunctionTree aggregate(const JunctionTree& tree, int i, int j);

// Aggregates across every separator that is incomplete in `g` until none is
// left. Throws inconsistent-inputs when the clusters do not cover g.
JunctionTree mpd(const JunctionTree& tree, const UndirectedGraph& g);

// Structure, edge labels, junction property, coverage, and per-edge
// separation of the two subtree unions in both graphs.
ValidationReport verify_junction_tree(const JunctionTree& tree, const UndirectedGraph& g,
                                      const UndirectedGraph& triangulated);

// Steps 1-4 on an undirected graph: minimal triangulation, RIP cliques, clique tree.
struct CliqueDecomposition {
    Triangulation triangulation;
    JunctionTree tree;
};
CliqueDecomposition clique_decomposition(const UndirectedGraph& g);

Json to_json(const JunctionTree& tree);
std::string to_dot(const JunctionTree& tree);
Json to_json(const Triangulation& t);

}  // namespace skm
