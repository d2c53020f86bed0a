#pragma once

// Modularizations derived from junction trees, and the checks that certify
// them: per-module separation, consumption identifiability on the boundary
// reactions, and the separator-history flag.

#include <optional>
#include <string>
#include <vector>

#include "skm/chordal.hpp"
#include "skm/index_set.hpp"
#include "skm/json.hpp"
#include "skm/kig.hpp"
#include "skm/netmodel.hpp"
#include "skm/report.hpp"

namespace skm {

struct Module {
    int id = 0;              // cluster id it came from
    SpeciesSet members;      // M_d
    SpeciesSet separator;    // S_d
    SpeciesSet residual;     // M_d \ S_d

    friend bool operator==(const Module&, const Module&) = default;
};

struct Modularization {
    std::vector<std::string> names;  // species ids
    std::vector<Module> modules;     // sorted by id
    std::string provenance;          // e.g. "tree:3" or "tree:3+copy"

    const Module& module(int id) const;  // throws unknown-module

    friend bool operator==(const Modularization&, const Modularization&) = default;
};

// Residual first, then the separator: "P,R | g,P2".
std::string module_label(const Modularization& mod, const Module& m);

// Modules are the clusters; S_d is the union of the labels on edges at d.
Modularization derive_modularization(const JunctionTree& tree, std::string provenance = "tree");

// S_d = M_d n (union of the other modules), for any module family.
SpeciesSet separator_by_intersection(const Modularization& mod, int id);

struct CopyMove {
    int species = 0;
    int from = 0;  // module id e, must contain the species
    int to = 0;    // module id d, must not contain it

    friend bool operator==(const CopyMove&, const CopyMove&) = default;
};

// Copies species between modules in order, then recomputes every separator
// and residual by intersection. Throws unknown-module, unknown-species and
// bad-copy when a move breaks its membership precondition.
Modularization copy_species(const Modularization& mod, const std::vector<CopyMove>& moves);

// Checks for one [A, B, D] partition.
struct PartitionCheck {
    SpeciesPartition cells;
    bool separation_ok = false;
    std::optional<std::vector<int>> witness;  // an A-B path avoiding D
    ReactionSet gamma;                        // Delta(A) n Delta(B)
    bool condition_required = true;           // false when separation is read off the fraternized graph
    bool condition_ok = false;
    ValidationReport condition;
    bool history_equal = false;
    ValidationReport history;

    bool certified() const { return separation_ok && (condition_ok || !condition_required); }
};

// `graph` is the undirected KIG, or the fraternized graph with
// condition_required = false. Empty cells are allowed.
PartitionCheck check_partition(const ReactionNetwork& net, const UndirectedGraph& graph, const SpeciesPartition& p,
                               bool condition_required = true);

struct ModuleCheck {
    int id = 0;
    std::string label;
    PartitionCheck check;         // on [residual, V \ M_d, S_d]
    SpeciesSet residual_closure;  // cl(residual), empty when the residual is
    bool locally_independent = false;  // cl(residual) inside M_d
};

struct ModuleReport {
    std::vector<ModuleCheck> modules;
    bool certified = false;

    const char* verdict() const { return certified ? "certified" : "not certified"; }
};

// Throws coverage when the modules do not cover every species.
ModuleReport validate_modularization(const ReactionNetwork& net, const DirectedGraph& kig,
                                     const Modularization& mod);

Json to_json(const Modularization& mod);
Json to_json(const ReactionNetwork& net, const PartitionCheck& check);
Json to_json(const ReactionNetwork& net, const ModuleReport& report);
std::string to_markdown(const ReactionNetwork& net, const ModuleReport& report);

}  // namespace skm
