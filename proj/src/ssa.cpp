#include "skm/ssa.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "skm/error.hpp"

namespace skm {

Rng::Rng(std::uint64_t seed, std::uint64_t replica) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replica), static_cast<std::uint32_t>(replica >> 32)};
    engine_.seed(seq);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::exponential() { return -std::log1p(-uniform()); }

namespace {

double binomial(std::int64_t x, int k) {
    if (x < k) return 0.0;
    double out = 1.0;
    for (int i = 0; i < k; ++i) out *= static_cast<double>(x - i) / static_cast<double>(i + 1);
    return out;
}

void check_state(const ReactionNetwork& net, const State& x) {
    if (x.size() != static_cast<std::size_t>(net.species_count()))
        throw Error("bad-state", "state has " + std::to_string(x.size()) + " entries, network has " +
                                     std::to_string(net.species_count()) + " species");
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] < 0) throw Error("negative-state", "species '" + net.species_id(static_cast<int>(k)) + "' is negative");
}

void apply(const ReactionNetwork& net, State& x, int m) {
    auto col = net.column(m);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += col[k];
}

std::string join_names(const std::vector<std::string>& names, const char* sep) {
    std::string out;
    for (const auto& n : names) out += (out.empty() ? "" : sep) + n;
    return out;
}

void check_time(double t, double t_end) {
    if (!(t >= 0.0 && t <= t_end))
        throw Error("out-of-range", "time " + format_double(t) + " outside [0, " + format_double(t_end) + "]");
}

}  // namespace

double propensity(const ReactionNetwork& net, int m, const State& x) {
    const auto& r = net.reaction(m);
    if (r.kinetics == Kinetics::table) {
        const auto& term = r.reactants.front();
        auto level = x[static_cast<std::size_t>(term.species)];
        if (level < term.stoich) return 0.0;
        auto i = std::min<std::size_t>(static_cast<std::size_t>(level), r.table.size() - 1);
        return r.rate * r.table[i];
    }
    double out = r.rate;
    for (const auto& term : r.reactants) out *= binomial(x[static_cast<std::size_t>(term.species)], term.stoich);
    return out;
}

std::vector<double> propensities(const ReactionNetwork& net, const State& x) {
    check_state(net, x);
    std::vector<double> out(static_cast<std::size_t>(net.reaction_count()));
    for (int m = 0; m < net.reaction_count(); ++m) out[static_cast<std::size_t>(m)] = propensity(net, m, x);
    return out;
}

Trajectory simulate(const ReactionNetwork& net, const State& x0, double t_end, std::uint64_t seed,
                    std::uint64_t replica, const SimulationOptions& options) {
    check_state(net, x0);
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error("bad-horizon", "t_end must be positive and finite");
    Trajectory traj{x0, {}, t_end};
    Rng rng(seed, replica);
    State x = x0;
    std::vector<double> lambda(static_cast<std::size_t>(net.reaction_count()));
    double t = 0.0;
    while (true) {
        double total = 0.0;
        for (int m = 0; m < net.reaction_count(); ++m) {
            lambda[static_cast<std::size_t>(m)] = propensity(net, m, x);
            total += lambda[static_cast<std::size_t>(m)];
        }
        if (total <= 0.0) break;
        double next = t + rng.exponential() / total;
        if (next > t_end) break;
        if (next <= t) next = std::nextafter(t, std::numeric_limits<double>::infinity());
        double target = rng.uniform() * total;
        int chosen = -1;
        double acc = 0.0;
        for (int m = 0; m < net.reaction_count(); ++m) {
            if (lambda[static_cast<std::size_t>(m)] <= 0.0) continue;
            chosen = m;
            acc += lambda[static_cast<std::size_t>(m)];
            if (target < acc) break;
        }
        if (traj.events.size() >= options.max_events)
            throw Error("event-cap", "more than " + std::to_string(options.max_events) +
                                         " events before t_end; the process may be explosive");
        traj.events.push_back({next, chosen});
        apply(net, x, chosen);
        t = next;
    }
    return traj;
}

Trajectory poisson_reference_simulate(int reactions, double t_end, std::uint64_t seed, std::uint64_t replica) {
    if (reactions < 1) throw Error("bad-count", "need at least one stream");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error("bad-horizon", "t_end must be positive and finite");
    Trajectory traj{{}, {}, t_end};
    Rng rng(seed, replica);
    double t = 0.0;
    while (true) {
        double next = t + rng.exponential() / reactions;
        if (next > t_end) break;
        if (next <= t) next = std::nextafter(t, std::numeric_limits<double>::infinity());
        int m = std::min(reactions - 1, static_cast<int>(rng.uniform() * reactions));
        traj.events.push_back({next, m});
        t = next;
    }
    return traj;
}

State state_at(const ReactionNetwork& net, const Trajectory& traj, double t) {
    check_time(t, traj.t_end);
    State x = traj.x0;
    for (const auto& e : traj.events) {
        if (e.time > t) break;
        apply(net, x, e.reaction);
    }
    return x;
}

std::vector<std::int64_t> counts_at(const Trajectory& traj, int reactions, double t) {
    std::vector<std::int64_t> n(static_cast<std::size_t>(reactions), 0);
    for (const auto& e : traj.events) {
        if (e.time > t) break;
        ++n[static_cast<std::size_t>(e.reaction)];
    }
    return n;
}

Trajectory truncate(const Trajectory& traj, double t) {
    check_time(t, traj.t_end);
    Trajectory out{traj.x0, {}, t};
    for (const auto& e : traj.events)
        if (e.time <= t) out.events.push_back(e);
    return out;
}

std::vector<std::int64_t> SubprocessPath::counts_at(double t) const {
    std::vector<std::int64_t> n(components.size(), 0);
    for (const auto& e : events) {
        if (e.time > t) break;
        ++n[static_cast<std::size_t>(e.component)];
    }
    return n;
}

int SubprocessPath::component_of(int reaction) const {
    for (std::size_t i = 0; i < components.size(); ++i)
        if (components[i].reactions.contains(reaction)) return static_cast<int>(i);
    return -1;
}

namespace {

SubprocessPath project(const Trajectory& traj, SpeciesSet rows, std::vector<Component> components) {
    SubprocessPath path{std::move(rows), std::move(components), {}, traj.t_end};
    std::map<int, int> owner;
    for (std::size_t i = 0; i < path.components.size(); ++i)
        for (int m : path.components[i].reactions) owner[m] = static_cast<int>(i);
    for (const auto& e : traj.events) {
        auto it = owner.find(e.reaction);
        if (it != owner.end()) path.events.push_back({e.time, it->second});
    }
    return path;
}

}  // namespace

SubprocessPath project_subprocess(const Trajectory& traj, const ReactionNetwork& net, const SpeciesSet& a) {
    std::vector<Component> components;
    for (auto& cls : subprocess_partition(net, a))
        components.push_back({join_names(net.reaction_names(cls.reactions), "+"), cls.change, cls.reactions, {}});
    return project(traj, a, std::move(components));
}

SubprocessPath project_dstar(const Trajectory& traj, const ReactionNetwork& net, const PartitionABD& p) {
    std::vector<Component> components;
    for (auto block : {DStarBlock::A, DStarBlock::AB, DStarBlock::B, DStarBlock::D})
        for (const auto& cls : p.block_classes(block))
            components.push_back({std::string(to_string(block)) + ":" +
                                      join_names(net.reaction_names(cls.reactions), "+"),
                                  cls.change, cls.reactions, block});
    return project(traj, p.cells.d, std::move(components));
}

SubprocessPath truncate(const SubprocessPath& path, double t) {
    check_time(t, path.t_end);
    SubprocessPath out = path;
    out.t_end = t;
    out.events.clear();
    for (const auto& e : path.events)
        if (e.time <= t) out.events.push_back(e);
    return out;
}

State path_state_at(const SubprocessPath& path, const State& x0_rows, double t) {
    if (x0_rows.size() != path.rows.size()) throw Error("bad-state", "initial levels do not match the path rows");
    check_time(t, path.t_end);
    State x = x0_rows;
    for (const auto& e : path.events) {
        if (e.time > t) break;
        const auto& change = path.components[static_cast<std::size_t>(e.component)].change;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += change[i];
    }
    return x;
}

LogLikelihood log_likelihood(const ReactionNetwork& net, const Trajectory& traj, double t) {
    check_time(t, traj.t_end);
    check_state(net, traj.x0);
    const auto mcount = static_cast<std::size_t>(net.reaction_count());
    LogLikelihood out;
    out.terms.assign(mcount, 0.0);
    std::vector<double> integral(mcount, 0.0);
    std::vector<double> jumps(mcount, 0.0);
    std::vector<bool> impossible(mcount, false);
    State x = traj.x0;
    double last = 0.0;
    auto accumulate = [&](double until) {
        double dt = until - last;
        for (std::size_t m = 0; m < mcount; ++m) integral[m] += (1.0 - propensity(net, static_cast<int>(m), x)) * dt;
        last = until;
    };
    for (const auto& e : traj.events) {
        if (e.time > t) break;
        accumulate(e.time);
        double lambda = propensity(net, e.reaction, x);
        if (lambda > 0.0)
            jumps[static_cast<std::size_t>(e.reaction)] += std::log(lambda);
        else
            impossible[static_cast<std::size_t>(e.reaction)] = true;
        apply(net, x, e.reaction);
        for (std::size_t k = 0; k < x.size(); ++k)
            if (x[k] < 0)
                throw Error("inconsistent-trajectory", "species '" + net.species_id(static_cast<int>(k)) +
                                                           "' goes negative at t=" + format_double(e.time));
    }
    accumulate(t);
    for (std::size_t m = 0; m < mcount; ++m) {
        if (impossible[m]) {
            out.terms[m] = -std::numeric_limits<double>::infinity();
            out.impossible.push_back(static_cast<int>(m));
        } else {
            out.terms[m] = integral[m] + jumps[m];
        }
        out.total += out.terms[m];
    }
    return out;
}

const char* to_string(Side s) { return s == Side::A ? "A" : "B"; }

LikelihoodGroups likelihood_groups(const ReactionNetwork& net, const PartitionABD& p) {
    LikelihoodGroups g;
    const auto ad = p.cells.a | p.cells.d;
    const auto bd = p.cells.b | p.cells.d;
    for (int m = 0; m < net.reaction_count(); ++m) {
        auto r = net.reactants(m);
        std::optional<Side> side;
        if (p.delta_a.contains(m))
            side = Side::A;
        else if (p.delta_b.contains(m))
            side = Side::B;
        else if (p.delta_d.contains(m))
            side = r.is_subset_of(ad) ? Side::A : Side::B;
        if (!side) {
            g.unassigned.insert(m);
            continue;
        }
        (*side == Side::A ? g.a : g.b).insert(m);
        if (!r.is_subset_of(*side == Side::A ? ad : bd)) g.reactants_contained = false;
    }
    return g;
}

namespace {

struct SideView {
    SpeciesSet own;
    ReactionSet delta_own;
    DStarBlock own_block;
    DStarBlock other_block;
};

SideView side_view(const PartitionABD& p, Side side) {
    if (side == Side::A) return {p.cells.a, p.delta_a, DStarBlock::A, DStarBlock::B};
    return {p.cells.b, p.delta_b, DStarBlock::B, DStarBlock::A};
}

}  // namespace

ReactionSet reconstruction_scope(const ReactionNetwork& net, const PartitionABD& p, Side side) {
    auto v = side_view(p, side);
    ReactionSet candidates = v.delta_own | p.block(DStarBlock::D) | p.block(DStarBlock::AB);
    for (const auto& cls : p.block_classes(v.other_block))
        if (cls.reactions.size() == 1) candidates |= cls.reactions;
    ReactionSet out;
    const auto reach = v.own | p.cells.d;
    for (int m : candidates)
        if (net.reactants(m).is_subset_of(reach)) out.insert(m);
    return out;
}

std::map<int, std::vector<double>> reconstruct_reaction_paths(const ReactionNetwork& net, const PartitionABD& p,
                                                              Side side, const SubprocessPath& side_path,
                                                              const SubprocessPath& dstar_path) {
    auto v = side_view(p, side);
    auto scope = reconstruction_scope(net, p, side);
    std::map<int, std::vector<double>> out;
    for (int m : scope) out[m];

    auto fail = [](const std::string& msg) { throw Error("inconsistent-paths", msg); };
    if (side_path.rows != v.own) fail("side path is not over the side's species");
    if (dstar_path.rows != p.cells.d) fail("D* path is not over the separator");

    // Side events keyed by time, to look up the side's jump at a D* event.
    std::map<double, int> side_at;
    for (const auto& e : side_path.events) side_at.emplace(e.time, e.component);
    std::set<double> explained;  // side events accounted for by the D* blocks

    for (const auto& e : dstar_path.events) {
        const auto& comp = dstar_path.components.at(static_cast<std::size_t>(e.component));
        if (!comp.block) fail("D* component without a block");
        const auto block = *comp.block;
        const bool touches_side = block == v.own_block || block == DStarBlock::AB;
        if (touches_side) {
            auto it = side_at.find(e.time);
            if (it == side_at.end()) fail("D* event at t=" + format_double(e.time) + " has no matching side jump");
            explained.insert(e.time);
            if (block == v.own_block) {
                // Same S^D within the class; the side's jump picks the reaction.
                const auto& jump = side_path.components.at(static_cast<std::size_t>(it->second)).change;
                int found = -1;
                for (int m : comp.reactions) {
                    bool match = true;
                    std::size_t i = 0;
                    for (int k : v.own) match = match && net.stoich(k, m) == jump[i++];
                    if (!match) continue;
                    if (found >= 0) fail("two reactions of class " + comp.label + " share the side jump");
                    found = m;
                }
                if (found < 0) fail("no reaction of class " + comp.label + " matches the side jump");
                if (scope.contains(found)) out[found].push_back(e.time);
                continue;
            }
        }
        bool needed = false;
        for (int m : comp.reactions) needed = needed || scope.contains(m);
        if (!needed) continue;
        if (comp.reactions.size() != 1) fail("class " + comp.label + " holds more than one reaction");
        out[comp.reactions.front()].push_back(e.time);
    }

    // The rest of the side's events come from reactions that leave D alone.
    const ReactionSet own_star = v.delta_own - p.delta_d;
    for (const auto& e : side_path.events) {
        if (explained.count(e.time)) continue;
        const auto& comp = side_path.components.at(static_cast<std::size_t>(e.component));
        auto candidates = comp.reactions & own_star;
        if (candidates.size() != 1)
            fail("side event at t=" + format_double(e.time) + " in class " + comp.label +
                 (candidates.empty() ? " matches no reaction outside D" : " is ambiguous"));
        int m = candidates.front();
        if (scope.contains(m)) out[m].push_back(e.time);
    }
    for (auto& [m, times] : out) std::sort(times.begin(), times.end());
    return out;
}

std::vector<std::vector<double>> reaction_times(const Trajectory& traj, int reactions) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(reactions));
    for (const auto& e : traj.events) out.at(static_cast<std::size_t>(e.reaction)).push_back(e.time);
    return out;
}

ReconstructionCheck check_reconstruction(const ReactionNetwork& net, const PartitionABD& p, const Trajectory& traj) {
    ReconstructionCheck out;
    auto truth = reaction_times(traj, net.reaction_count());
    try {
        auto dstar = project_dstar(traj, net, p);
        for (auto side : {Side::A, Side::B}) {
            const auto& cells = side == Side::A ? p.cells.a : p.cells.b;
            if (cells.empty()) continue;
            auto rebuilt = reconstruct_reaction_paths(net, p, side, project_subprocess(traj, net, cells), dstar);
            for (const auto& [m, times] : rebuilt) {
                out.covered.insert(m);
                const auto& expected = truth[static_cast<std::size_t>(m)];
                out.events_checked += expected.size();
                std::vector<double> diff;
                std::set_symmetric_difference(times.begin(), times.end(), expected.begin(), expected.end(),
                                              std::back_inserter(diff));
                out.mismatched_events += diff.size();
            }
        }
    } catch (const Error& e) {
        out.error = e.what();
    }
    return out;
}

MeanEstimate estimate(const std::vector<double>& samples) {
    MeanEstimate est;
    est.n = samples.size();
    if (samples.empty()) return est;
    double sum = 0.0;
    for (double s : samples) sum += s;
    est.mean = sum / static_cast<double>(est.n);
    if (est.n < 2) return est;
    double ss = 0.0;
    for (double s : samples) ss += (s - est.mean) * (s - est.mean);
    est.se = std::sqrt(ss / static_cast<double>(est.n - 1) / static_cast<double>(est.n));
    return est;
}

ProjectionReport conditional_projection_test(double t_end, std::size_t replicas, std::uint64_t seed,
                                             unsigned threads) {
    auto net = parse_network(
        "species: A D B\n"
        "f: A -> D\n"
        "r: D -> A\n"
        "irr: D -> B\n");
    const int f = 0, r = 1, irr = 2;
    auto p = dstar_partition(net, {net.species_set({"A"}), net.species_set({"B"}), net.species_set({"D"})});
    const std::vector<double> grid{t_end / 2, t_end};

    struct Sample {
        std::vector<double> nf, nd;  // N_f and N_r + N_irr at the grid times
        double n_irr = 0.0;
        double residual = 0.0;
    };
    auto samples = parallel_map(
        replicas,
        [&](std::size_t i) {
            auto traj = poisson_reference_simulate(3, t_end, seed, i);
            Sample s;
            for (double t : grid) {
                auto n = counts_at(traj, 3, t);
                s.nf.push_back(static_cast<double>(n[f]));
                s.nd.push_back(static_cast<double>(n[r] + n[irr]));
            }
            s.n_irr = static_cast<double>(counts_at(traj, 3, t_end)[irr]);
            auto dstar = project_dstar(traj, net, p);
            auto counts = dstar.counts_at(t_end);
            double from_dstar = static_cast<double>(counts.at(static_cast<std::size_t>(dstar.component_of(irr))));
            s.residual = std::abs(s.n_irr - from_dstar);
            return s;
        },
        threads);

    using G = std::pair<std::string, std::function<double(const Sample&)>>;
    std::vector<G> functionals{{"1", [](const Sample&) { return 1.0; }}};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::string at = "(" + format_double(grid[k]) + ")";
        functionals.push_back({"N_f" + at, [k](const Sample& s) { return s.nf[k]; }});
        functionals.push_back({"N_r+N_irr" + at, [k](const Sample& s) { return s.nd[k]; }});
    }
    functionals.push_back({"N_f(t)*(N_r+N_irr)(t)", [](const Sample& s) { return s.nf.back() * s.nd.back(); }});
    functionals.push_back({"(N_r+N_irr)(t/2)*(N_r+N_irr)(t)", [](const Sample& s) { return s.nd[0] * s.nd[1]; }});
    functionals.push_back({"N_f(t/2)*N_f(t)", [](const Sample& s) { return s.nf[0] * s.nf[1]; }});

    auto evaluate = [&](const std::string& name, const std::function<double(const Sample&)>& g, double c) {
        std::vector<double> z;
        z.reserve(samples.size());
        for (const auto& s : samples) z.push_back((s.n_irr - c * s.nd.back()) * g(s));
        ProjectionFunctional out{name, estimate(z), 0.0};
        out.z = out.difference.se > 0.0 ? out.difference.mean / out.difference.se
                                        : (out.difference.mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        return out;
    };

    ProjectionReport report;
    report.t_end = t_end;
    report.replicas = replicas;
    for (const auto& [name, g] : functionals) report.functionals.push_back(evaluate(name, g, 0.5));
    report.negative_control = evaluate("N_r+N_irr(t), c=0.25", [](const Sample& s) { return s.nd.back(); }, 0.25);
    for (const auto& s : samples) report.reconstruction_residual = std::max(report.reconstruction_residual, s.residual);
    return report;
}

Json to_json(const ReactionNetwork& net, const Trajectory& traj) {
    Json x0 = Json::object();
    for (std::size_t k = 0; k < traj.x0.size(); ++k) x0[net.species_id(static_cast<int>(k))] = traj.x0[k];
    Json events = Json::array();
    for (const auto& e : traj.events) events.push_back({{"t", e.time}, {"reaction", net.reaction(e.reaction).name}});
    return {{"x0", x0}, {"t_end", traj.t_end}, {"events", events}};
}

std::string to_csv(const ReactionNetwork& net, const Trajectory& traj) {
    std::string out = "time,reaction\n";
    for (const auto& e : traj.events) out += format_double(e.time) + "," + net.reaction(e.reaction).name + "\n";
    return out;
}

Json to_json(const ReactionNetwork& net, const SubprocessPath& path) {
    Json comps = Json::array();
    for (const auto& c : path.components) {
        Json jc = {{"label", c.label}, {"change", c.change}, {"reactions", net.reaction_names(c.reactions)}};
        if (c.block) jc["block"] = to_string(*c.block);
        comps.push_back(std::move(jc));
    }
    Json events = Json::array();
    for (const auto& e : path.events) events.push_back({{"t", e.time}, {"component", e.component}});
    return {{"rows", net.species_names(path.rows)}, {"components", comps}, {"events", events}, {"t_end", path.t_end}};
}

Json to_json(const LogLikelihood& ll, const ReactionNetwork& net) {
    Json terms = Json::object();
    for (std::size_t m = 0; m < ll.terms.size(); ++m) {
        const auto& name = net.reaction(static_cast<int>(m)).name;
        if (std::isfinite(ll.terms[m]))
            terms[name] = ll.terms[m];
        else
            terms[name] = "-inf";
    }
    Json total = std::isfinite(ll.total) ? Json(ll.total) : Json("-inf");
    return {{"terms", terms}, {"total", total}, {"impossible", net.reaction_names(ReactionSet(ll.impossible))}};
}

Json to_json(const ProjectionReport& report) {
    auto one = [](const ProjectionFunctional& f) {
        return Json{{"g", f.name}, {"difference", f.difference.mean}, {"se", f.difference.se}, {"z", f.z}};
    };
    Json fs = Json::array();
    bool ok = true;
    for (const auto& f : report.functionals) {
        fs.push_back(one(f));
        ok = ok && std::abs(f.z) <= 3.0;
    }
    bool control = std::abs(report.negative_control.z) >= 5.0;
    return {{"t_end", report.t_end},
            {"replicas", report.replicas},
            {"functionals", fs},
            {"within_3se", ok},
            {"negative_control", one(report.negative_control)},
            {"negative_control_separated", control},
            {"reconstruction_residual", report.reconstruction_residual}};
}

}  // namespace skm
