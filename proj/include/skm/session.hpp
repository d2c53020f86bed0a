#pragma once

// Interactive modularization state and the JSON API served to the explorer.

#include <cstdint>
#include <map>
#include <shared_mutex>
#include <string>
#include <vector>

#include "skm/chordal.hpp"
#include "skm/json.hpp"
#include "skm/kig.hpp"
#include "skm/modcheck.hpp"
#include "skm/netmodel.hpp"
#include "skm/ssa.hpp"

namespace skm {

enum class TreeMode { cliques, mpd };
TreeMode parse_tree_mode(const std::string& s);  // throws bad-mode
const char* to_string(TreeMode m);

// One network, its clique tree, and the aggregations and copies applied to it.
// Every mutation bumps the revision; undo and redo restore whole snapshots.
class Session {
public:
    explicit Session(ReactionNetwork net, TreeMode mode = TreeMode::cliques);

    const ReactionNetwork& network() const { return net_; }
    const DirectedGraph& kig() const { return kig_; }
    const UndirectedGraph& graph() const { return graph_; }
    const Triangulation& triangulation() const { return triangulation_; }
    const JunctionTree& tree() const { return current_.tree; }
    const std::vector<CopyMove>& copies() const { return current_.copies; }
    std::uint64_t revision() const { return revision_; }
    bool can_undo() const { return !undo_.empty(); }
    bool can_redo() const { return !redo_.empty(); }

    // Throws not-adjacent / unknown-cluster. Copies into or out of the merged
    // cluster are kept when they still make sense and dropped otherwise.
    void aggregate(int i, int j);
    // Throws bad-copy / unknown-module / unknown-species.
    void copy(const std::vector<CopyMove>& moves);
    void undo();  // throws nothing-to-undo
    void redo();  // throws nothing-to-redo
    void reset(TreeMode mode);

    Modularization modularization() const;
    ModuleReport report() const;
    ValidationReport verification() const;

private:
    struct Snapshot {
        JunctionTree tree;
        std::vector<CopyMove> copies;
    };
    void commit(Snapshot next);

    ReactionNetwork net_;
    DirectedGraph kig_;
    UndirectedGraph graph_;
    Triangulation triangulation_;
    JunctionTree cliques_;
    Snapshot current_;
    std::vector<Snapshot> undo_;
    std::vector<Snapshot> redo_;
    std::uint64_t revision_ = 0;
};

// Applies "1:2,3:4" as successive aggregations. Throws bad-script.
std::vector<std::pair<int, int>> parse_aggregation_script(const std::string& script);
// "species:from:to,..." with species ids and module ids. Throws bad-copy.
std::vector<CopyMove> parse_copy_moves(const ReactionNetwork& net, const std::string& text);

// "P=10,R=2"; unnamed species start at `fill`. Throws bad-state.
State parse_state(const ReactionNetwork& net, const std::string& text, std::int64_t fill = 0);
State state_from_json(const ReactionNetwork& net, const Json& j, std::int64_t fill = 0);

// Per-species mean and standard error at t_end over independent replicas,
// plus the mean event count.
Json simulation_summary(const ReactionNetwork& net, const State& x0, double t_end, std::size_t replicas,
                        std::uint64_t seed, const SimulationOptions& options = {}, unsigned threads = 0);

// Graph variants by name: directed, undirected, moral, fraternized.
Json kig_json(const ReactionNetwork& net, const DirectedGraph& kig, const std::string& variant);

struct ApiResponse {
    int status = 200;
    Json body;
};

// Maps requests onto a session. Mutations are serialized; every response
// carries the session revision. Errors are {"error": {"code", "message"}}.
class Api {
public:
    explicit Api(Session& session) : session_(session) {}

    ApiResponse handle(const std::string& method, const std::string& path,
                       const std::map<std::string, std::string>& query, const std::string& body);

private:
    ApiResponse dispatch(const std::string& method, const std::string& path,
                         const std::map<std::string, std::string>& query, const Json& body);
    Json tree_payload() const;

    Session& session_;
    std::shared_mutex mutex_;
};

}  // namespace skm
