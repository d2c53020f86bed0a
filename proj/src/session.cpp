#include "skm/session.hpp"

#include <charconv>
#include <mutex>

#include "skm/error.hpp"

namespace skm {

TreeMode parse_tree_mode(const std::string& s) {
    if (s == "cliques") return TreeMode::cliques;
    if (s == "mpd") return TreeMode::mpd;
    throw Error("bad-mode", "tree mode must be 'cliques' or 'mpd', got '" + s + "'");
}

const char* to_string(TreeMode m) { return m == TreeMode::mpd ? "mpd" : "cliques"; }

Session::Session(ReactionNetwork net, TreeMode mode)
    : net_(std::move(net)), kig_(build_kig(net_)), graph_(undirected(kig_)) {
    auto decomposition = clique_decomposition(graph_);
    triangulation_ = std::move(decomposition.triangulation);
    cliques_ = std::move(decomposition.tree);
    current_.tree = mode == TreeMode::mpd ? mpd(cliques_, graph_) : cliques_;
}

void Session::commit(Snapshot next) {
    undo_.push_back(std::move(current_));
    redo_.clear();
    current_ = std::move(next);
    ++revision_;
}

void Session::aggregate(int i, int j) {
    Snapshot next{skm::aggregate(current_.tree, i, j), {}};
    const int lo = std::min(i, j);
    const int hi = std::max(i, j);
    auto mod = derive_modularization(next.tree);
    for (auto move : current_.copies) {
        if (move.from == hi) move.from = lo;
        if (move.to == hi) move.to = lo;
        try {
            mod = copy_species(mod, {move});
            next.copies.push_back(move);
        } catch (const Error&) {
            // The merge already placed the species in the target, or the move
            // now runs inside one cluster.
        }
    }
    commit(std::move(next));
}

void Session::copy(const std::vector<CopyMove>& moves) {
    copy_species(modularization(), moves);  // validates
    Snapshot next = current_;
    next.copies.insert(next.copies.end(), moves.begin(), moves.end());
    commit(std::move(next));
}

void Session::undo() {
    if (undo_.empty()) throw Error("nothing-to-undo", "no earlier state");
    redo_.push_back(std::move(current_));
    current_ = std::move(undo_.back());
    undo_.pop_back();
    ++revision_;
}

void Session::redo() {
    if (redo_.empty()) throw Error("nothing-to-redo", "no undone state");
    undo_.push_back(std::move(current_));
    current_ = std::move(redo_.back());
    redo_.pop_back();
    ++revision_;
}

void Session::reset(TreeMode mode) {
    commit({mode == TreeMode::mpd ? mpd(cliques_, graph_) : cliques_, {}});
}

Modularization Session::modularization() const {
    return copy_species(derive_modularization(current_.tree, "tree@" + std::to_string(revision_)), current_.copies);
}

ModuleReport Session::report() const { return validate_modularization(net_, kig_, modularization()); }

ValidationReport Session::verification() const {
    return verify_junction_tree(current_.tree, graph_, triangulation_.result);
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto end = text.find(sep, start);
        std::string piece = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
        piece.erase(0, piece.find_first_not_of(" \t"));
        piece.erase(piece.find_last_not_of(" \t") + 1);
        if (!piece.empty()) out.push_back(piece);
        if (end == std::string::npos) return out;
        start = end + 1;
    }
}

template <class T>
bool parse_number(const std::string& s, T& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::vector<std::pair<int, int>> parse_aggregation_script(const std::string& script) {
    std::vector<std::pair<int, int>> out;
    for (const auto& step : split(script, ',')) {
        auto parts = split(step, ':');
        int i = 0;
        int j = 0;
        if (parts.size() != 2 || !parse_number(parts[0], i) || !parse_number(parts[1], j))
            throw Error("bad-script", "aggregation step '" + step + "' is not of the form i:j");
        out.emplace_back(i, j);
    }
    return out;
}

std::vector<CopyMove> parse_copy_moves(const ReactionNetwork& net, const std::string& text) {
    std::vector<CopyMove> out;
    for (const auto& item : split(text, ',')) {
        auto parts = split(item, ':');
        CopyMove move;
        if (parts.size() != 3 || !parse_number(parts[1], move.from) || !parse_number(parts[2], move.to))
            throw Error("bad-copy", "copy '" + item + "' is not of the form species:from:to");
        move.species = net.species_index(parts[0]);
        out.push_back(move);
    }
    return out;
}

State parse_state(const ReactionNetwork& net, const std::string& text, std::int64_t fill) {
    State x(static_cast<std::size_t>(net.species_count()), fill);
    for (const auto& item : split(text, ',')) {
        auto eq = item.find('=');
        std::int64_t v = 0;
        std::string id = item.substr(0, eq);
        std::string value = eq == std::string::npos ? "" : item.substr(eq + 1);
        id.erase(id.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        if (eq == std::string::npos || !parse_number(value, v) || v < 0)
            throw Error("bad-state", "initial level '" + item + "' is not of the form species=count");
        x[static_cast<std::size_t>(net.species_index(id))] = v;
    }
    return x;
}

State state_from_json(const ReactionNetwork& net, const Json& j, std::int64_t fill) {
    State x(static_cast<std::size_t>(net.species_count()), fill);
    if (j.is_null()) return x;
    if (!j.is_object()) throw Error("bad-state", "x0 must be an object of species counts");
    for (const auto& [id, value] : j.items()) {
        if (!value.is_number_integer() || value.get<std::int64_t>() < 0)
            throw Error("bad-state", "initial level of '" + id + "' must be a nonnegative integer");
        x[static_cast<std::size_t>(net.species_index(id))] = value.get<std::int64_t>();
    }
    return x;
}

Json simulation_summary(const ReactionNetwork& net, const State& x0, double t_end, std::size_t replicas,
                        std::uint64_t seed, const SimulationOptions& options, unsigned threads) {
    if (replicas == 0) throw Error("bad-replicas", "need at least one replica");
    struct Final {
        State x;
        double events;
    };
    auto finals = parallel_map(
        replicas,
        [&](std::size_t r) {
            auto traj = simulate(net, x0, t_end, seed, r, options);
            return Final{state_at(net, traj, t_end), static_cast<double>(traj.events.size())};
        },
        threads);
    Json species = Json::object();
    for (int k = 0; k < net.species_count(); ++k) {
        std::vector<double> v;
        for (const auto& f : finals) v.push_back(static_cast<double>(f.x[static_cast<std::size_t>(k)]));
        auto e = estimate(v);
        species[net.species_id(k)] = {{"mean", e.mean}, {"se", e.se}};
    }
    std::vector<double> counts;
    for (const auto& f : finals) counts.push_back(f.events);
    auto e = estimate(counts);
    return {{"replicas", replicas},
            {"t_end", t_end},
            {"seed", seed},
            {"final_state", species},
            {"events", {{"mean", e.mean}, {"se", e.se}}}};
}

Json kig_json(const ReactionNetwork& net, const DirectedGraph& kig, const std::string& variant) {
    if (variant == "directed") return to_json(kig);
    if (variant == "undirected") return to_json(undirected(kig));
    if (variant == "moral") return to_json(moralize(kig));
    if (variant == "fraternized") return to_json(fraternize(net, kig));
    throw Error("bad-variant", "graph variant must be directed, undirected, moral or fraternized");
}

// ---- API --------------------------------------------------------------------

namespace {

ApiResponse error_response(int status, const std::string& code, const std::string& message, std::uint64_t revision) {
    return {status, {{"error", {{"code", code}, {"message", message}}}, {"revision", revision}}};
}

SpeciesSet query_set(const ReactionNetwork& net, const std::map<std::string, std::string>& query,
                     const std::string& key) {
    auto it = query.find(key);
    if (it == query.end()) return {};
    return net.species_set(split(it->second, ','));
}

int required_int(const Json& body, const char* key) {
    if (!body.contains(key) || !body[key].is_number_integer())
        throw Error("bad-request", std::string("field '") + key + "' must be an integer");
    return body[key].get<int>();
}

}  // namespace

Json Api::tree_payload() const {
    return {{"tree", to_json(session_.tree())},
            {"modularization", to_json(session_.modularization())},
            {"report", to_json(session_.network(), session_.report())},
            {"verification", to_json(session_.verification())},
            {"can_undo", session_.can_undo()},
            {"can_redo", session_.can_redo()}};
}

ApiResponse Api::handle(const std::string& method, const std::string& path,
                        const std::map<std::string, std::string>& query, const std::string& body) {
    Json parsed = Json::object();
    if (method == "POST" && !body.empty()) {
        parsed = Json::parse(body, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object()) {
            std::shared_lock lock(mutex_);
            return error_response(400, "bad-json", "request body must be a JSON object", session_.revision());
        }
    }
    try {
        if (method == "GET" || path == "/simulate") {
            std::shared_lock lock(mutex_);
            return dispatch(method, path, query, parsed);
        }
        std::unique_lock lock(mutex_);
        return dispatch(method, path, query, parsed);
    } catch (const Error& e) {
        std::shared_lock lock(mutex_);
        return error_response(422, e.code(), e.what(), session_.revision());
    } catch (const Json::exception& e) {
        // a field of the wrong JSON type
        std::shared_lock lock(mutex_);
        return error_response(400, "bad-request", e.what(), session_.revision());
    } catch (const std::exception& e) {
        std::shared_lock lock(mutex_);
        return error_response(500, "internal", e.what(), session_.revision());
    }
}

ApiResponse Api::dispatch(const std::string& method, const std::string& path,
                          const std::map<std::string, std::string>& query, const Json& body) {
    const auto& net = session_.network();
    auto with_revision = [&](Json j) {
        j["revision"] = session_.revision();
        return ApiResponse{200, std::move(j)};
    };

    if (method == "GET") {
        if (path == "/network") return with_revision({{"network", to_json(net)}});
        if (path == "/kig") {
            auto it = query.find("variant");
            std::string variant = it == query.end() ? "directed" : it->second;
            return with_revision({{"variant", variant}, {"kig", kig_json(net, session_.kig(), variant)}});
        }
        if (path == "/tree")
            return with_revision({{"tree", to_json(session_.tree())},
                                  {"triangulation", to_json(session_.triangulation())},
                                  {"verification", to_json(session_.verification())},
                                  {"can_undo", session_.can_undo()},
                                  {"can_redo", session_.can_redo()}});
        if (path == "/modularization") return with_revision({{"modularization", to_json(session_.modularization())}});
        if (path == "/report") {
            auto mod = session_.modularization();
            auto report = validate_modularization(net, session_.kig(), mod);
            return with_revision({{"report", to_json(net, report)}, {"markdown", to_markdown(net, report)}});
        }
        if (path == "/separation") {
            auto a = query_set(net, query, "a");
            auto b = query_set(net, query, "b");
            auto d = query_set(net, query, "d");
            if (a.empty() || b.empty()) throw Error("empty-set", "query needs nonempty a and b");
            auto witness = separation_witness(session_.graph(), a, b, d);
            auto cells = complete_partition(session_.graph(), a, b, d);
            bool chemical = partition_verdict(net, session_.kig(), cells).chemical;
            Json path_json = nullptr;
            if (witness) {
                path_json = Json::array();
                for (int v : *witness) path_json.push_back(net.species_id(v));
            }
            return with_revision({{"a", net.species_names(a)},
                                  {"b", net.species_names(b)},
                                  {"d", net.species_names(d)},
                                  {"graphical", !witness.has_value()},
                                  {"chemical", chemical},
                                  {"chemical_cells", {{"a", net.species_names(cells.a)}, {"b", net.species_names(cells.b)}}},
                                  {"witness", path_json}});
        }
        return error_response(404, "not-found", "no endpoint GET " + path, session_.revision());
    }

    if (method == "POST") {
        if (path == "/aggregate") {
            session_.aggregate(required_int(body, "i"), required_int(body, "j"));
            return with_revision(tree_payload());
        }
        if (path == "/undo") {
            session_.undo();
            return with_revision(tree_payload());
        }
        if (path == "/redo") {
            session_.redo();
            return with_revision(tree_payload());
        }
        if (path == "/copy") {
            if (!body.contains("moves") || !body["moves"].is_array())
                throw Error("bad-request", "field 'moves' must be an array");
            std::vector<CopyMove> moves;
            for (const auto& m : body["moves"]) {
                if (!m.is_object() || !m.contains("species") || !m["species"].is_string())
                    throw Error("bad-request", "each move needs a species id, from and to");
                moves.push_back({net.species_index(m["species"].get<std::string>()), required_int(m, "from"),
                                 required_int(m, "to")});
            }
            session_.copy(moves);
            return with_revision(tree_payload());
        }
        if (path == "/reset") {
            session_.reset(parse_tree_mode(body.value("mode", std::string("cliques"))));
            return with_revision(tree_payload());
        }
        if (path == "/simulate") {
            auto x0 = state_from_json(net, body.value("x0", Json()));
            double t_end = body.value("t_end", 10.0);
            auto replicas = body.value("replicas", std::size_t{1});
            auto seed = body.value("seed", std::uint64_t{1});
            if (replicas > 100000) throw Error("bad-replicas", "at most 100000 replicas per request");
            Json out = {{"summary", simulation_summary(net, x0, t_end, replicas, seed)}};
            if (replicas == 1) out["trajectory"] = to_json(net, simulate(net, x0, t_end, seed, 0));
            return with_revision(std::move(out));
        }
        return error_response(404, "not-found", "no endpoint POST " + path, session_.revision());
    }
    return error_response(405, "bad-method", "method " + method + " is not supported", session_.revision());
}

}  // namespace skm
