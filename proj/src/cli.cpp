#include "skm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <sstream>

#include "skm/error.hpp"

namespace skm {

namespace {

void emit_json(std::ostream& out, const Json& j) { out << j.dump(2) << "\n"; }

std::string set_text(const std::vector<std::string>& names) {
    std::string out = "{";
    for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
    return out + "}";
}

std::string tree_text(const ReactionNetwork& net, const JunctionTree& tree) {
    std::ostringstream out;
    for (const auto& c : tree.clusters) {
        out << "C" << c.id << " " << set_text(net.species_names(c.members));
        if (c.parent >= 0) out << "  parent C" << c.parent << " via " << set_text(net.species_names(c.separator));
        out << "\n";
    }
    return out.str();
}

std::string graph_text(const Json& g) {
    std::ostringstream out;
    const char* arrow = g["directed"].get<bool>() ? " -> " : " -- ";
    out << "vertices:";
    for (const auto& v : g["vertices"]) out << " " << v.get<std::string>();
    out << "\n";
    for (const auto& e : g["edges"]) out << e[0].get<std::string>() << arrow << e[1].get<std::string>() << "\n";
    return out.str();
}

Json modularize_payload(const Session& s) {
    auto mod = s.modularization();
    return {{"tree", to_json(s.tree())},
            {"modularization", to_json(mod)},
            {"report", to_json(s.network(), validate_modularization(s.network(), s.kig(), mod))},
            {"verification", to_json(s.verification())}};
}

void repl(Session& session, std::istream& in, std::ostream& out) {
    const auto& net = session.network();
    out << "clusters are named by id; type 'help' for commands\n";
    std::string line;
    while (out << "> " << std::flush, std::getline(in, line)) {
        std::istringstream words(line);
        std::string cmd;
        if (!(words >> cmd)) continue;
        try {
            if (cmd == "quit" || cmd == "exit") {
                break;
            } else if (cmd == "help") {
                out << "list | aggregate I J | undo | redo | copy SPECIES FROM TO | report | tree | verify | quit\n";
            } else if (cmd == "list") {
                auto mod = session.modularization();
                for (const auto& m : mod.modules)
                    out << "C" << m.id << " " << set_text(net.species_names(m.members)) << "  label \""
                        << module_label(mod, m) << "\"\n";
                for (const auto& e : session.tree().edges())
                    out << "C" << e.parent << " -- C" << e.child << "  " << set_text(net.species_names(e.separator))
                        << "\n";
            } else if (cmd == "aggregate") {
                int i = 0;
                int j = 0;
                if (!(words >> i >> j)) throw Error("bad-command", "usage: aggregate I J");
                session.aggregate(i, j);
                out << tree_text(net, session.tree());
            } else if (cmd == "undo") {
                session.undo();
                out << tree_text(net, session.tree());
            } else if (cmd == "redo") {
                session.redo();
                out << tree_text(net, session.tree());
            } else if (cmd == "copy") {
                std::string species;
                int from = 0;
                int to = 0;
                if (!(words >> species >> from >> to)) throw Error("bad-command", "usage: copy SPECIES FROM TO");
                session.copy({{net.species_index(species), from, to}});
                out << to_json(session.modularization()).dump(2) << "\n";
            } else if (cmd == "report") {
                out << to_markdown(net, session.report());
            } else if (cmd == "tree") {
                out << to_dot(session.tree());
            } else if (cmd == "verify") {
                out << to_text(session.verification());
            } else {
                out << "unknown command '" << cmd << "'\n";
            }
        } catch (const Error& e) {
            out << "error[" << e.code() << "]: " << e.what() << "\n";
        }
    }
}

struct Formats {
    static CLI::IsMember of(std::vector<std::string> names) { return CLI::IsMember(std::move(names)); }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stochastic kinetic model modularization toolkit", "skmtool"};
    app.require_subcommand(1);

    std::string file;
    std::string format;

    auto* validate = app.add_subcommand("validate", "Check the standard regularity conditions");
    bool normalize = false;
    validate->add_option("file", file, "Reaction file")->required();
    validate->add_option("--format", format, "json or text")->check(Formats::of({"json", "text"}));
    validate->add_flag("--normalize", normalize, "Rewrite catalytic reactions into binding and release steps first");

    auto* kig = app.add_subcommand("kig", "Export the kinetic independence graph");
    std::string variant = "directed";
    kig->add_option("file", file, "Reaction file")->required();
    kig->add_option("--variant", variant, "directed, undirected, moral or fraternized")
        ->check(Formats::of({"directed", "undirected", "moral", "fraternized"}));
    auto* undirected_flag = kig->add_flag("--undirected", "Same as --variant undirected");
    auto* moral_flag = kig->add_flag("--moral", "Same as --variant moral");
    auto* fraternized_flag = kig->add_flag("--fraternized", "Same as --variant fraternized");
    kig->add_option("--format", format, "dot, json or text")->check(Formats::of({"dot", "json", "text"}));

    auto* modularize = app.add_subcommand("modularize", "Build a junction tree and report its modules");
    bool use_mpd = false;
    bool interactive = false;
    bool markdown = false;
    std::string script;
    std::string copies;
    modularize->add_option("file", file, "Reaction file")->required();
    modularize->add_flag("--mpd", use_mpd, "Aggregate to the maximal prime subgraph decomposition");
    modularize->add_option("--script", script, "Aggregations to apply, e.g. 1:2,3:4");
    modularize->add_option("--copy", copies, "Species copies, e.g. Pyr:2:1,NADH:2:3");
    modularize->add_flag("--interactive", interactive, "Aggregate interactively");
    modularize->add_flag("--markdown", markdown, "Print the report as Markdown");
    modularize->add_option("--format", format, "json, text or dot")->check(Formats::of({"json", "text", "dot"}));

    auto* simulate_cmd = app.add_subcommand("simulate", "Run the exact stochastic simulation");
    std::string x0_text;
    double t_end = 10.0;
    std::size_t replicas = 1;
    std::uint64_t seed = 1;
    std::uint64_t max_events = SimulationOptions{}.max_events;
    unsigned threads = 0;
    std::string projection;
    bool oracle = false;
    simulate_cmd->add_option("file", file, "Reaction file");
    simulate_cmd->add_option("--x0", x0_text, "Initial levels, e.g. g=1,P=10 (others start at 0)");
    simulate_cmd->add_option("--t-end", t_end, "Horizon")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--replicas", replicas, "Independent replicas")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--seed", seed, "Random seed");
    simulate_cmd->add_option("--max-events", max_events, "Event cap per replica")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
    simulate_cmd->add_option("--project", projection, "Project replica 0 onto species A1,A2 or Dstar:A;B;D");
    simulate_cmd->add_flag("--projection-oracle", oracle, "Run the conditional projection Monte-Carlo check");
    simulate_cmd->add_option("--format", format, "json, csv or text")->check(Formats::of({"json", "csv", "text"}));

    auto* verify = app.add_subcommand("verify", "Check the independence conditions for a partition A;B;D");
    std::string partition;
    bool fraternized = false;
    std::size_t reconstruct = 0;
    verify->add_option("file", file, "Reaction file")->required();
    verify->add_option("--partition", partition, "Species partition A;B;D, comma separated within cells")
        ->required();
    verify->add_flag("--fraternized", fraternized, "Separate in the fraternized graph and skip the consumption condition");
    verify->add_option("--reconstruct", reconstruct, "Replicas for the path reconstruction check");
    verify->add_option("--x0", x0_text, "Initial levels for --reconstruct (others start at 10)");
    verify->add_option("--t-end", t_end, "Horizon for --reconstruct")->check(CLI::PositiveNumber);
    verify->add_option("--seed", seed, "Random seed for --reconstruct");
    verify->add_option("--threads", threads, "Worker threads (0 = all cores)");
    verify->add_option("--format", format, "json or text")->check(Formats::of({"json", "text"}));

    auto* serve = app.add_subcommand("serve", "Serve the JSON API for one network");
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string mode = "cliques";
    serve->add_option("file", file, "Reaction file")->required();
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port (0 picks a free one)");
    serve->add_option("--mode", mode, "Initial tree: cliques or mpd")->check(Formats::of({"cliques", "mpd"}));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        if (validate->parsed()) {
            auto net = load_network(file);
            if (normalize) net = normalize_catalysts(net);
            auto report = check_standard(net);
            if (format == "json")
                emit_json(out, to_json(report));
            else
                out << to_text(report);
            return report.passed() ? exit_ok : exit_failed;
        }

        if (kig->parsed()) {
            auto net = load_network(file);
            if (undirected_flag->count()) variant = "undirected";
            if (moral_flag->count()) variant = "moral";
            if (fraternized_flag->count()) variant = "fraternized";
            auto g = build_kig(net);
            if (format == "json") {
                emit_json(out, kig_json(net, g, variant));
            } else if (format == "text") {
                out << graph_text(kig_json(net, g, variant));
            } else if (variant == "directed") {
                out << to_dot(g);
            } else {
                out << to_dot(variant == "undirected" ? undirected(g)
                              : variant == "moral"    ? moralize(g)
                                                      : fraternize(net, g));
            }
            return exit_ok;
        }

        if (modularize->parsed()) {
            Session session(load_network(file), use_mpd ? TreeMode::mpd : TreeMode::cliques);
            for (auto [i, j] : parse_aggregation_script(script)) session.aggregate(i, j);
            if (!copies.empty()) session.copy(parse_copy_moves(session.network(), copies));
            if (interactive) repl(session, in, out);
            if (markdown) {
                out << to_markdown(session.network(), session.report());
            } else if (format == "dot") {
                out << to_dot(session.tree());
            } else if (format == "text") {
                out << tree_text(session.network(), session.tree()) << "\n"
                    << to_markdown(session.network(), session.report());
            } else {
                emit_json(out, modularize_payload(session));
            }
            return session.verification().passed() ? exit_ok : exit_failed;
        }

        if (simulate_cmd->parsed()) {
            if (oracle) {
                auto report = conditional_projection_test(t_end, replicas < 2 ? 10000 : replicas, seed, threads);
                auto j = to_json(report);
                emit_json(out, j);
                bool ok = j["within_3se"].get<bool>() && j["negative_control_separated"].get<bool>() &&
                          report.reconstruction_residual == 0.0;
                return ok ? exit_ok : exit_failed;
            }
            if (file.empty()) throw CLI::RequiredError("file");
            auto net = load_network(file);
            auto x0 = parse_state(net, x0_text);
            SimulationOptions options;
            options.max_events = max_events;
            if (!projection.empty()) {
                auto traj = simulate(net, x0, t_end, seed, 0, options);
                SubprocessPath path;
                if (projection.rfind("Dstar:", 0) == 0) {
                    auto p = dstar_partition(net, parse_partition(net, projection.substr(6)), CellPolicy::allow_empty);
                    path = project_dstar(traj, net, p);
                } else {
                    std::vector<std::string> ids;
                    std::stringstream ss(projection);
                    for (std::string id; std::getline(ss, id, ',');) ids.push_back(id);
                    path = project_subprocess(traj, net, net.species_set(ids));
                }
                emit_json(out, to_json(net, path));
                return exit_ok;
            }
            if (replicas == 1) {
                auto traj = simulate(net, x0, t_end, seed, 0, options);
                if (format == "csv")
                    out << to_csv(net, traj);
                else
                    emit_json(out, to_json(net, traj));
                return exit_ok;
            }
            emit_json(out, simulation_summary(net, x0, t_end, replicas, seed, options, threads));
            return exit_ok;
        }

        if (verify->parsed()) {
            auto net = load_network(file);
            auto g = build_kig(net);
            auto cells = parse_partition(net, partition);
            auto p = dstar_partition(net, cells, CellPolicy::allow_empty);
            auto graph = fraternized ? fraternize(net, g) : undirected(g);
            auto check = check_partition(net, graph, cells, !fraternized);
            Json j = {{"graph", fraternized ? "fraternized" : "undirected"}, {"partition", to_json(net, check)}};
            j["refinement"] = refinement_check(net, p);
            bool ok = check.certified();
            if (reconstruct > 0) {
                auto x0 = parse_state(net, x0_text, 10);
                auto results = parallel_map(
                    reconstruct,
                    [&](std::size_t r) { return check_reconstruction(net, p, simulate(net, x0, t_end, seed, r)); },
                    threads);
                std::size_t checked = 0;
                std::size_t mismatched = 0;
                std::size_t failed = 0;
                std::string first_error;
                ReactionSet covered;
                for (const auto& r : results) {
                    checked += r.events_checked;
                    mismatched += r.mismatched_events;
                    covered |= r.covered;
                    if (!r.error.empty()) {
                        ++failed;
                        if (first_error.empty()) first_error = r.error;
                    }
                }
                j["reconstruction"] = {{"replicas", reconstruct},
                                       {"reactions", net.reaction_names(covered)},
                                       {"events_checked", checked},
                                       {"mismatched_events", mismatched},
                                       {"failed_replicas", failed},
                                       {"first_error", first_error},
                                       {"exact", mismatched == 0 && failed == 0}};
                ok = ok && mismatched == 0 && failed == 0;
            }
            j["certified"] = check.certified();
            if (format == "text") {
                out << "separation: " << (check.separation_ok ? "yes" : "no") << "\n";
                out << "consumption identified on boundary reactions: " << (check.condition_ok ? "yes" : "no")
                    << (check.condition_required ? "" : " (not required)") << "\n";
                out << "separator history equal: " << (check.history_equal ? "yes" : "no") << "\n";
                if (j.contains("reconstruction"))
                    out << "reconstruction exact: " << (j["reconstruction"]["exact"].get<bool>() ? "yes" : "no")
                        << "\n";
                out << (check.certified() ? "certified" : "not certified") << "\n";
            } else {
                emit_json(out, j);
            }
            return ok ? exit_ok : exit_failed;
        }

        if (serve->parsed()) {
            Session session(load_network(file), parse_tree_mode(mode));
            Api api(session);
            HttpServer server(api);
            int bound = server.bind(host, port);
            out << "listening on http://" << host << ":" << bound << std::endl;
            server.listen();
            return exit_ok;
        }
    } catch (const CLI::Error& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const ParseError& e) {
        err << "error[" << e.code() << "]: " << e.what() << "\n";
        return exit_failed;
    } catch (const Error& e) {
        err << "error[" << e.code() << "]: " << e.what() << "\n";
        return exit_failed;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
    err << "usage error: no subcommand\n";
    return exit_usage;
}

}  // namespace skm
