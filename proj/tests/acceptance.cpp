// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "oracles.hpp"
#include "skm/chordal.hpp"
#include "skm/cli.hpp"
#include "skm/modcheck.hpp"
#include "skm/session.hpp"
#include "skm/ssa.hpp"

using namespace skm;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail = what;
            pass = false;
        }
    }
};

int failures = 0;

template <class F>
void criterion(const std::string& id, const std::string& title, double budget_s, F body) {
    auto start = Clock::now();
    Outcome out;
    try {
        body(out);
    } catch (const std::exception& e) {
        out.pass = false;
        out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (secs > budget_s) out.require(false, "took " + std::to_string(secs) + " s, budget " + std::to_string(budget_s) + " s");
    if (!out.pass) ++failures;
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << (out.pass ? "PASS " : "FAIL ") << id << " " << title << " [" << secs << " s]";
    if (!out.detail.empty()) line << " " << out.detail;
    std::cout << line.str() << std::endl;
}

ReactionNetwork autoregulation() { return load_network(oracle::data_path("autoregulation.rxn")); }
ReactionNetwork chain() { return load_network(oracle::data_path("chain.rxn")); }

// The shared random corpus for A4 and A5: connected graphs with 2..7 vertices.
std::vector<UndirectedGraph> graph_corpus() {
    std::mt19937 rng(20240601);
    std::uniform_int_distribution<int> size(2, 7);
    std::uniform_real_distribution<double> density(0.2, 0.7);
    std::vector<UndirectedGraph> out;
    for (int i = 0; i < 200; ++i) out.push_back(oracle::random_graph(rng, size(rng), density(rng), true));
    return out;
}

}  // namespace

int main() {
    criterion("A1", "autoregulation KIG edges", 1.0, [](Outcome& out) {
        auto net = autoregulation();
        auto g = build_kig(net);
        std::set<std::pair<std::string, std::string>> got;
        for (auto [a, b] : g.edges()) got.emplace(net.species_id(a), net.species_id(b));
        const std::set<std::pair<std::string, std::string>> listed{
            {"g", "R"},   {"R", "P"},    {"P2", "P"},   {"P", "P2"},  {"g", "P2"},
            {"gP2", "P2"}, {"P2", "g"}, {"gP2", "g"}, {"g", "gP2"}, {"P2", "gP2"}};
        auto edges = g.edges();
        out.require(got == listed, "edge set differs from the listed ten");
        out.require(std::set<std::pair<int, int>>(edges.begin(), edges.end()) == oracle::kig_edges(net),
                    "edge set differs from the reaction-list recomputation");
        out.detail = out.pass ? std::to_string(got.size()) + " edges" : out.detail;
    });

    criterion("A2", "separation {P,R} | {g,P2} | {gP2}", 1.0, [](Outcome& out) {
        auto net = autoregulation();
        auto g = build_kig(net);
        auto cells = parse_partition(net, "P,R;gP2;g,P2");
        out.require(is_separated(undirected(g), cells.a, cells.b, cells.d), "not separated");
        auto v = partition_verdict(net, g, cells);
        out.require(v.chemical, "chemical verdict false");
        out.require(v.graphical == v.chemical, "verdicts disagree");
    });

    criterion("A3", "modularize --mpd on autoregulation", 1.0, [](Outcome& out) {
        std::istringstream in;
        std::ostringstream stdout_text, stderr_text;
        int code = run_cli({"modularize", oracle::data_path("autoregulation.rxn"), "--mpd"}, in, stdout_text, stderr_text);
        out.require(code == exit_ok, "exit code " + std::to_string(code));
        auto j = Json::parse(stdout_text.str());
        std::set<std::pair<std::set<std::string>, std::pair<std::set<std::string>, std::set<std::string>>>> modules;
        for (const auto& m : j["modularization"]["modules"]) {
            auto set = [](const Json& a) {
                std::set<std::string> s;
                for (const auto& v : a) s.insert(v.get<std::string>());
                return s;
            };
            modules.insert({set(m["members"]), {set(m["separator"]), set(m["residual"])}});
        }
        const decltype(modules) expected{{{"P", "R", "g", "P2"}, {{"g", "P2"}, {"P", "R"}}},
                                         {{"g", "P2", "gP2"}, {{"g", "P2"}, {"gP2"}}}};
        out.require(modules == expected, "modules differ: " + j["modularization"].dump());
        out.require(j["report"]["verdict"] == "certified", "report not certified");
    });

    const auto corpus = graph_corpus();

    criterion("A4", "junction trees under random aggregation, prime MPD clusters", 120.0, [&](Outcome& out) {
        std::mt19937 rng(7);
        std::size_t steps = 0;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            const auto& g = corpus[i];
            auto dec = clique_decomposition(g);
            auto tree = dec.tree;
            while (true) {
                auto rep = verify_junction_tree(tree, g, dec.triangulation.result);
                ++steps;
                out.require(rep.passed(), "graph " + std::to_string(i) + ": " + to_text(rep));
                if (tree.clusters.size() == 1) break;
                auto edges = tree.edges();
                const auto& e = edges[std::uniform_int_distribution<std::size_t>(0, edges.size() - 1)(rng)];
                tree = aggregate(tree, e.parent, e.child);
            }
            auto adj = oracle::adjacency(g);
            auto m = mpd(dec.tree, g);
            out.require(verify_junction_tree(m, g, dec.triangulation.result).passed(),
                        "graph " + std::to_string(i) + ": MPD tree fails verification");
            std::set<oracle::Set> clusters;
            for (const auto& c : m.clusters) {
                clusters.insert(oracle::to_set(c.members));
                out.require(oracle::is_prime(adj, oracle::to_set(c.members)),
                            "graph " + std::to_string(i) + ": MPD cluster not prime");
            }
            out.require(clusters == oracle::maximal_prime_sets(adj),
                        "graph " + std::to_string(i) + ": MPD clusters are not the maximal prime subgraphs");
        }
        if (out.pass) out.detail = std::to_string(corpus.size()) + " graphs, " + std::to_string(steps) + " trees";
    });

    criterion("A5", "triangulations chordal and minimal", 60.0, [&](Outcome& out) {
        std::size_t fills = 0;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            auto t = minimal_triangulation(corpus[i]);
            out.require(oracle::chordal_by_elimination(oracle::adjacency(t.result)),
                        "graph " + std::to_string(i) + ": not chordal");
            for (auto [a, b] : t.fill_edges) {
                ++fills;
                auto less = t.result;
                less.remove_edge(a, b);
                out.require(!oracle::chordal_by_elimination(oracle::adjacency(less)),
                            "graph " + std::to_string(i) + ": fill edge removable");
            }
        }
        if (out.pass) out.detail = std::to_string(fills) + " fill edges checked";
    });

    criterion("A6", "separator history discriminates the two networks", 1.0, [](Outcome& out) {
        auto net = autoregulation();
        out.require(check_history_equality(net, dstar_partition(net, parse_partition(net, "P,R;gP2;g,P2"))).passed(),
                    "autoregulation should pass");
        auto t = chain();
        auto rep = check_history_equality(t, dstar_partition(t, parse_partition(t, "A;B;D")));
        out.require(!rep.passed(), "three-species chain should fail");
        if (!rep.findings.empty()) {
            std::set<std::string> s(rep.findings.front().subjects.begin(), rep.findings.front().subjects.end());
            out.require(s == std::set<std::string>{"r", "irr"}, "flagged reactions are not r and irr");
        }
    });

    criterion("A7", "exact path reconstruction, 1000 replicas each", 300.0, [](Outcome& out) {
        struct Case {
            ReactionNetwork net;
            std::string cells;
            State x0;
            double t_end;
        };
        std::vector<Case> cases{{autoregulation(), "P,R;gP2;g,P2", {10, 2, 1, 3, 0}, 3.0},
                                {chain(), "A;B;D", {10, 10, 0}, 3.0}};
        std::size_t total = 0;
        for (const auto& c : cases) {
            auto p = dstar_partition(c.net, parse_partition(c.net, c.cells));
            auto results = parallel_map(1000, [&](std::size_t r) {
                return check_reconstruction(c.net, p, simulate(c.net, c.x0, c.t_end, 2024, r));
            });
            for (const auto& r : results) {
                out.require(r.error.empty(), "reconstruction failed: " + r.error);
                out.require(r.mismatched_events == 0, "mismatched events");
                out.require(r.covered == c.net.all_reactions(), "not every reaction covered");
                total += r.events_checked;
            }
        }
        if (out.pass) out.detail = std::to_string(total) + " events matched";
    });

    criterion("A8", "conditional projection oracle, 20000 replicas", 300.0, [](Outcome& out) {
        auto rep = conditional_projection_test(2.0, 20000, 47, 0);
        double worst = 0.0;
        for (const auto& f : rep.functionals) {
            worst = std::max(worst, std::abs(f.z));
            out.require(std::abs(f.difference.mean) <= 3 * f.difference.se, "functional " + f.name + " off by " +
                                                                                   std::to_string(f.z) + " SE");
        }
        out.require(std::abs(rep.negative_control.difference.mean) >= 5 * rep.negative_control.difference.se,
                    "negative control only " + std::to_string(rep.negative_control.z) + " SE");
        out.require(rep.reconstruction_residual == 0.0, "reconstruction residual nonzero");
        if (out.pass) {
            std::ostringstream d;
            d.precision(3);
            d << rep.functionals.size() << " functionals, max |z| " << worst << ", control |z| "
              << std::abs(rep.negative_control.z);
            out.detail = d.str();
        }
    });

    criterion("A9", "likelihood identities", 60.0, [](Outcome& out) {
        auto unit = parse_network("a: 0 -> X\nb: 0 -> Y\nc: 0 -> Z\n");
        for (std::uint64_t r = 0; r < 1000; ++r) {
            auto traj = simulate(unit, {0, 0, 0}, 5.0, 9, r);
            out.require(log_likelihood(unit, traj, 5.0).total == 0.0, "unit-rate log-likelihood not zero");
        }
        auto ref = parse_network("a: 0 -> X\nb: 0 -> Y\nc: 0 -> Z\n");
        for (std::uint64_t r = 0; r < 200; ++r) {
            auto traj = poisson_reference_simulate(3, 5.0, 10, r);
            traj.x0 = {0, 0, 0};
            out.require(log_likelihood(ref, traj, 5.0).total == 0.0, "reference path log-likelihood not zero");
        }
        auto src = parse_network("s: 0 -> X ; c=2\n");
        Trajectory one{{0}, {{0.3, 0}}, 1.0};
        const double got = log_likelihood(src, one, 1.0).total;
        out.require(std::abs(got - (1.0 - 2.0 + std::log(2.0))) <= 1e-12, "hand example off");

        auto net = autoregulation();
        auto g = likelihood_groups(net, dstar_partition(net, parse_partition(net, "P,R;gP2;g,P2")));
        out.require(g.unassigned.empty() && !g.a.intersects(g.b) && (g.a | g.b) == net.all_reactions() &&
                        g.reactants_contained,
                    "autoregulation groups are not a clean split");
        auto t = chain();
        auto tg = likelihood_groups(t, dstar_partition(t, parse_partition(t, "A;B;D")));
        out.require(tg.unassigned.empty() && !tg.a.intersects(tg.b) && (tg.a | tg.b) == t.all_reactions() &&
                        tg.reactants_contained,
                    "chain groups are not a clean split");
        // the grouped terms add back to the total
        auto traj = simulate(net, {10, 2, 1, 3, 0}, 2.0, 11);
        auto ll = log_likelihood(net, traj, 2.0);
        double a = 0, b = 0;
        for (int m : g.a) a += ll.terms[static_cast<std::size_t>(m)];
        for (int m : g.b) b += ll.terms[static_cast<std::size_t>(m)];
        out.require(std::abs(a + b - ll.total) <= 1e-9 * (1 + std::abs(ll.total)), "groups do not sum to the total");
    });

    criterion("A10", "simulator means and seed determinism", 120.0, [](Outcome& out) {
        auto birth = parse_network("b: 0 -> X\n");
        auto counts = parallel_map(10000, [&](std::size_t r) {
            return static_cast<double>(simulate(birth, {0}, 100.0, 5, r).events.size());
        });
        auto b = estimate(counts);
        out.require(std::abs(b.mean - 100.0) <= 3 * b.se, "birth mean " + std::to_string(b.mean));

        const double c = 0.4, t = 1.5;
        const int n = 50;
        auto death = parse_network("x: X -> 0 ; c=0.4\n");
        auto left = parallel_map(10000, [&](std::size_t r) {
            auto traj = simulate(death, {n}, t, 6, r);
            return static_cast<double>(state_at(death, traj, t)[0]);
        });
        auto d = estimate(left);
        const double expected = n * std::exp(-c * t);
        out.require(std::abs(d.mean - expected) <= 3 * d.se, "death mean " + std::to_string(d.mean));

        auto net = autoregulation();
        auto x = to_json(net, simulate(net, {10, 2, 1, 3, 0}, 5.0, 99)).dump();
        auto y = to_json(net, simulate(net, {10, 2, 1, 3, 0}, 5.0, 99)).dump();
        out.require(x == y, "same seed gave different trajectories");
        auto serial = parallel_map(16, [&](std::size_t r) { return simulate(net, {10, 2, 1, 3, 0}, 2.0, 3, r); }, 1);
        auto threaded = parallel_map(16, [&](std::size_t r) { return simulate(net, {10, 2, 1, 3, 0}, 2.0, 3, r); }, 4);
        out.require(serial == threaded, "threaded replicas differ from serial ones");
        if (out.pass) {
            std::ostringstream s;
            s.precision(4);
            s << "birth " << b.mean << " +- " << b.se << ", death " << d.mean << " +- " << d.se << " vs " << expected;
            out.detail = s.str();
        }
    });

    criterion("A11", "45-species pipeline", 10.0, [](Outcome& out) {
        auto net = load_network(oracle::data_path("rbc_illustrative.rxn"));
        out.require(net.species_count() == 45 && net.reaction_count() == 38, "expected 45 species and 38 reactions");
        std::ifstream listed(oracle::data_path("rbc_species.txt"));
        std::size_t names = 0;
        for (std::string id; listed >> id;) {
            if (id.front() == '#') {
                std::getline(listed, id);
                continue;
            }
            ++names;
            out.require(net.find_species(id).has_value(), "species " + id + " missing from the network");
        }
        out.require(names == 44, "species fixture should list 44 ids");

        auto standard = check_standard(net);
        auto g = build_kig(net);
        Session session(net, TreeMode::cliques);
        out.require(session.verification().passed(), "clique tree fails verification");
        // scripted aggregation down the first edge, then the MPD
        auto edges = session.tree().edges();
        if (!edges.empty()) session.aggregate(edges.front().parent, edges.front().child);
        out.require(session.verification().passed(), "aggregated tree fails verification");
        session.reset(TreeMode::mpd);
        auto mod = session.modularization();
        auto report = validate_modularization(net, g, mod);
        out.require(report.modules.size() == mod.modules.size(), "report misses modules");
        // the consumption condition ran on each boundary set Gamma_d
        for (const auto& m : report.modules) {
            const auto& module = mod.module(m.id);
            auto gamma = changed_reactions(net, module.residual) &
                         changed_reactions(net, net.all_species() - module.members);
            out.require(m.check.gamma == gamma, "module " + std::to_string(m.id) + ": wrong boundary reactions");
            out.require(m.check.condition_ok == check_ident_consumption(net, gamma).passed(),
                        "module " + std::to_string(m.id) + ": consumption condition mismatch");
        }
        if (out.pass) {
            std::size_t largest = 0;
            for (const auto& m : mod.modules) largest = std::max(largest, m.members.size());
            out.detail = std::string(standard.passed() ? "standard" : "non-standard") + ", " +
                         std::to_string(mod.modules.size()) + " modules (largest " + std::to_string(largest) +
                         "), " + report.verdict();
        }
    });

    std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
