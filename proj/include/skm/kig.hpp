#pragma once

// Kinetic independence graphs and their undirected variants.

#include <optional>
#include <string>
#include <vector>

#include "skm/index_set.hpp"
#include "skm/json.hpp"
#include "skm/netmodel.hpp"

namespace skm {

class DirectedGraph {
public:
    DirectedGraph() = default;
    explicit DirectedGraph(std::vector<std::string> names);

    int vertex_count() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }

    // Loops are ignored.
    void add_edge(int from, int to);
    bool has_edge(int from, int to) const { return parents_[static_cast<std::size_t>(to)].contains(from); }
    const SpeciesSet& parents(int k) const { return parents_[static_cast<std::size_t>(k)]; }
    // Edges (i, k) sorted by (i, k).
    std::vector<std::pair<int, int>> edges() const;
    std::size_t edge_count() const;

    friend bool operator==(const DirectedGraph&, const DirectedGraph&) = default;

private:
    std::vector<std::string> names_;
    std::vector<SpeciesSet> parents_;
};

class UndirectedGraph {
public:
    UndirectedGraph() = default;
    explicit UndirectedGraph(int n);
    explicit UndirectedGraph(std::vector<std::string> names);

    int vertex_count() const { return static_cast<int>(adj_.size()); }
    const std::vector<std::string>& names() const { return names_; }

    void add_edge(int a, int b);
    void remove_edge(int a, int b);
    bool has_edge(int a, int b) const { return adj_[static_cast<std::size_t>(a)].contains(b); }
    const SpeciesSet& neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }
    // Edges (a, b) with a < b, sorted.
    std::vector<std::pair<int, int>> edges() const;
    std::size_t edge_count() const;

    bool is_complete(const SpeciesSet& s) const;
    UndirectedGraph induced(const SpeciesSet& s) const;  // keeps vertex numbering

    friend bool operator==(const UndirectedGraph&, const UndirectedGraph&) = default;

private:
    std::vector<std::string> names_;
    std::vector<SpeciesSet> adj_;
};

// pa(k) = R[Delta(k)] \ {k}.
DirectedGraph build_kig(const ReactionNetwork& net);
UndirectedGraph undirected(const DirectedGraph& g);
UndirectedGraph moralize(const DirectedGraph& g);
// Undirected KIG plus an edge between every pair of co-products (S_jm > 0, S_km > 0).
UndirectedGraph fraternize(const ReactionNetwork& net, const DirectedGraph& g);

// True iff every path from A to B meets D. Throws overlapping-sets when the
// sets intersect and empty-set when A or B is empty.
bool is_separated(const UndirectedGraph& g, const SpeciesSet& a, const SpeciesSet& b, const SpeciesSet& d);

// Separation that treats an empty A or B as vacuously separated.
bool separated_or_vacuous(const UndirectedGraph& g, const SpeciesSet& a, const SpeciesSet& b, const SpeciesSet& d);

// A shortest path from A to B avoiding D, if one exists.
std::optional<std::vector<int>> separation_witness(const UndirectedGraph& g, const SpeciesSet& a,
                                                   const SpeciesSet& b, const SpeciesSet& d);

// cl(B) = pa(B) u B.
SpeciesSet closure(const DirectedGraph& g, const SpeciesSet& b);

struct PartitionVerdict {
    bool graphical = false;  // A separated from B by D in the undirected KIG
    bool chemical = false;   // A n R[Delta(B)] = B n R[Delta(A)] = empty
};

struct LocalIndependenceReport {
    SpeciesSet closure;             // cl(B)
    SpeciesSet independent_of;      // V \ cl(B)
    std::optional<PartitionVerdict> partition;
};

// Reactant set of Delta(S).
SpeciesSet reactants_of_changes(const ReactionNetwork& net, const SpeciesSet& s);

// Extends disjoint query sets to a full partition: species outside A, B and D
// join A when reachable from A avoiding D, otherwise B. Separation is unchanged,
// so the chemical verdict on the result matches the graphical one.
SpeciesPartition complete_partition(const UndirectedGraph& g, const SpeciesSet& a, const SpeciesSet& b,
                                    const SpeciesSet& d);

// The cells must partition the species (throws not-a-partition); the two
// verdicts agree only for a full partition.
PartitionVerdict partition_verdict(const ReactionNetwork& net, const DirectedGraph& g, const SpeciesPartition& p);

LocalIndependenceReport local_independence_report(const ReactionNetwork& net, const DirectedGraph& g,
                                                  const SpeciesSet& b,
                                                  const std::optional<SpeciesPartition>& partition = std::nullopt);

std::string to_dot(const DirectedGraph& g);
std::string to_dot(const UndirectedGraph& g);
Json to_json(const DirectedGraph& g);
Json to_json(const UndirectedGraph& g);

}  // namespace skm
