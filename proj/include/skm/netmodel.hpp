#pragma once

// Reaction networks as stochastic kinetic models: representation, the
// reaction-file grammar, and the reaction-set machinery built on the
// stoichiometric matrix (changed-reaction sets, subprocess partitions,
// D* partitions and the regularity checks used by the independence results).

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skm/index_set.hpp"
#include "skm/json.hpp"
#include "skm/report.hpp"

namespace skm {

struct Species {
    std::string id;
    int index = 0;

    friend bool operator==(const Species&, const Species&) = default;
};

enum class Kinetics {
    mass_action,  // c * prod binomial(x_i, alpha_i)
    table,        // c * g[x_r], g tabulated over the level of the single reactant r
};

struct Term {
    int species = 0;
    int stoich = 1;

    friend bool operator==(const Term&, const Term&) = default;
};

struct Reaction {
    std::string name;
    std::vector<Term> reactants;
    std::vector<Term> products;
    double rate = 1.0;
    Kinetics kinetics = Kinetics::mass_action;
    std::vector<double> table;  // only for Kinetics::table; the last entry extends to infinity

    int alpha(int species) const;  // reactant stoichiometry, 0 when absent
    int beta(int species) const;   // product stoichiometry, 0 when absent

    friend bool operator==(const Reaction&, const Reaction&) = default;
};

class ReactionNetwork {
public:
    ReactionNetwork() = default;

    // Validates the reaction lists and derives S. Throws skm::Error with codes
    // duplicate-species-id, duplicate-reaction, duplicate-species,
    // bad-stoichiometry, bad-rate, bad-kinetics, duplicate-column.
    ReactionNetwork(std::vector<std::string> species_ids, std::vector<Reaction> reactions);

    int species_count() const { return static_cast<int>(species_.size()); }
    int reaction_count() const { return static_cast<int>(reactions_.size()); }

    const std::vector<Species>& species() const { return species_; }
    const std::string& species_id(int k) const { return species_.at(static_cast<std::size_t>(k)).id; }
    const std::vector<Reaction>& reactions() const { return reactions_; }
    const Reaction& reaction(int m) const { return reactions_.at(static_cast<std::size_t>(m)); }

    // S_km = beta_k - alpha_k.
    int stoich(int k, int m) const {
        return s_[static_cast<std::size_t>(m) * species_.size() + static_cast<std::size_t>(k)];
    }
    std::span<const int> column(int m) const {
        return {s_.data() + static_cast<std::size_t>(m) * species_.size(), species_.size()};
    }

    std::optional<int> find_species(std::string_view id) const;
    std::optional<int> find_reaction(std::string_view name) const;
    int species_index(std::string_view id) const;   // throws unknown-species
    int reaction_index(std::string_view name) const;  // throws unknown-reaction

    SpeciesSet species_set(const std::vector<std::string>& ids) const;
    ReactionSet reaction_set(const std::vector<std::string>& names) const;
    SpeciesSet all_species() const { return SpeciesSet::range(species_count()); }
    ReactionSet all_reactions() const { return ReactionSet::range(reaction_count()); }

    SpeciesSet reactants(int m) const;  // R[m]
    SpeciesSet products(int m) const;   // P[m]
    SpeciesSet changed_species(int m) const;
    std::vector<std::string> species_names(const SpeciesSet& s) const;
    std::vector<std::string> reaction_names(const ReactionSet& r) const;

    friend bool operator==(const ReactionNetwork&, const ReactionNetwork&) = default;

private:
    std::vector<Species> species_;
    std::vector<Reaction> reactions_;
    std::vector<int> s_;  // column-major, one column of length n per reaction
};

// ---- reaction files -------------------------------------------------------

// Grammar (line oriented):
//   # comment
//   species: id1 id2 ...
//   name: [k] SP {+ [k] SP} -> [k] SP {+ [k] SP} [; c=<float>] [; g=[v0, v1, ...]]
// An empty side is written `0`. Several `species:` lines accumulate. Species
// are ordered as declared, otherwise by first appearance. Errors are ParseError (syntax, undeclared-species, ...) or
// the ReactionNetwork constructor's codes annotated with the offending line.
ReactionNetwork parse_network(std::string_view text);
ReactionNetwork load_network(const std::string& path);

std::string to_text(const ReactionNetwork& net);
// Shortest text that reads back to the same double.
std::string format_double(double v);
Json to_json(const ReactionNetwork& net);
ReactionNetwork network_from_json(const Json& j);

// ---- reaction-set machinery -----------------------------------------------

// Delta(A): reactions whose S column is nonzero on some row of A.
ReactionSet changed_reactions(const ReactionNetwork& net, const SpeciesSet& a);

// One equivalence class of reactions sharing the same change on a species set.
struct ReactionClass {
    std::vector<int> change;  // S restricted to the rows, in row order
    ReactionSet reactions;

    friend bool operator==(const ReactionClass&, const ReactionClass&) = default;
};

// Groups `reactions` by their S column restricted to `rows`; classes sorted
// lexicographically by the restricted vector.
std::vector<ReactionClass> group_by_change(const ReactionNetwork& net, const ReactionSet& reactions,
                                           const SpeciesSet& rows);

// M(Delta(A)). Requires nonempty A (throws empty-set).
std::vector<ReactionClass> subprocess_partition(const ReactionNetwork& net, const SpeciesSet& a);

struct SpeciesPartition {
    SpeciesSet a;
    SpeciesSet b;
    SpeciesSet d;

    friend bool operator==(const SpeciesPartition&, const SpeciesPartition&) = default;
};

enum class DStarBlock { A = 0, AB = 1, B = 2, D = 3 };
const char* to_string(DStarBlock b);

struct PartitionABD {
    SpeciesPartition cells;
    ReactionSet delta_a;  // Delta(A)
    ReactionSet delta_b;  // Delta(B)
    ReactionSet delta_d;  // Delta(D)
    std::array<ReactionSet, 4> blocks;                      // indexed by DStarBlock
    std::array<std::vector<ReactionClass>, 4> classes;      // S^D classes per block

    const ReactionSet& block(DStarBlock b) const { return blocks[static_cast<std::size_t>(b)]; }
    const std::vector<ReactionClass>& block_classes(DStarBlock b) const {
        return classes[static_cast<std::size_t>(b)];
    }
    // M*(Delta(D)): all block classes, in block order.
    std::vector<ReactionClass> star_classes() const;
};

enum class CellPolicy {
    require_nonempty,  // A, B and D must all be nonempty (throws empty-cell)
    allow_empty,
};

// Throws not-a-partition when the cells overlap, leave species uncovered or
// name unknown indices.
PartitionABD dstar_partition(const ReactionNetwork& net, const SpeciesPartition& p,
                             CellPolicy policy = CellPolicy::require_nonempty);

// Parses "A1,A2;B1;D1,D2" into a partition over species ids.
SpeciesPartition parse_partition(const ReactionNetwork& net, std::string_view spec);

ValidationReport check_standard(const ReactionNetwork& net);

// Condition "identified by consumption of reactants" on a reaction subset.
ValidationReport check_ident_consumption(const ReactionNetwork& net, const ReactionSet& gamma);

// Equal-S^D reactions in Delta(D) must agree on membership of Delta(A) and Delta(B).
ValidationReport check_history_equality(const ReactionNetwork& net, const PartitionABD& p);

// Every class of M(Delta(D)) is a union of classes of M*(Delta(D)).
bool refinement_check(const ReactionNetwork& net, const PartitionABD& p);

// Rewrites each reaction violating regularity condition (iv) as a binding step
// into a fresh complex species followed by its release into the products.
// Structural rewrite only: the new steps use the original rate and 1.0.
ReactionNetwork normalize_catalysts(const ReactionNetwork& net);

Json to_json(const ReactionNetwork& net, const PartitionABD& p);

}  // namespace skm
