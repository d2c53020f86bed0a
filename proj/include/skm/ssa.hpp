#pragma once

// Exact stochastic simulation, projections onto subprocesses, likelihoods
// against the unit-rate reference, and reconstruction of per-reaction paths
// from the two sides of a separation.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "skm/index_set.hpp"
#include "skm/json.hpp"
#include "skm/netmodel.hpp"

namespace skm {

using State = std::vector<std::int64_t>;

// Replica r of seed s gets its own stream; serial and threaded runs agree.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t replica);

    double uniform();      // [0, 1), 53 random bits
    double exponential();  // rate 1
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

double propensity(const ReactionNetwork& net, int m, const State& x);
// Throws negative-state.
std::vector<double> propensities(const ReactionNetwork& net, const State& x);

struct Event {
    double time = 0.0;
    int reaction = 0;

    friend bool operator==(const Event&, const Event&) = default;
};

struct Trajectory {
    State x0;                  // empty for reference-measure draws
    std::vector<Event> events; // strictly increasing times
    double t_end = 0.0;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct SimulationOptions {
    std::uint64_t max_events = 10'000'000;
};

// Gillespie direct method. Stops early when the total propensity is zero.
// Throws bad-state, bad-horizon, and event-cap when the event count exceeds
// the cap (a sign the process explodes).
Trajectory simulate(const ReactionNetwork& net, const State& x0, double t_end, std::uint64_t seed,
                    std::uint64_t replica = 0, const SimulationOptions& options = {});

// M independent unit-rate streams merged, reactions labelled 0..M-1.
Trajectory poisson_reference_simulate(int reactions, double t_end, std::uint64_t seed, std::uint64_t replica = 0);

// Right-continuous state at t. Throws out-of-range.
State state_at(const ReactionNetwork& net, const Trajectory& traj, double t);
// Per-reaction event counts N_m(t).
std::vector<std::int64_t> counts_at(const Trajectory& traj, int reactions, double t);
Trajectory truncate(const Trajectory& traj, double t);

struct Component {
    std::string label;
    std::vector<int> change;  // restricted change shared by the class
    ReactionSet reactions;
    std::optional<DStarBlock> block;

    friend bool operator==(const Component&, const Component&) = default;
};

struct PathEvent {
    double time = 0.0;
    int component = 0;

    friend bool operator==(const PathEvent&, const PathEvent&) = default;
};

struct SubprocessPath {
    SpeciesSet rows;
    std::vector<Component> components;
    std::vector<PathEvent> events;
    double t_end = 0.0;

    std::vector<std::int64_t> counts_at(double t) const;
    // Index of the component holding `reaction`, or -1.
    int component_of(int reaction) const;

    friend bool operator==(const SubprocessPath&, const SubprocessPath&) = default;
};

// One component per class of M(Delta(A)).
SubprocessPath project_subprocess(const Trajectory& traj, const ReactionNetwork& net, const SpeciesSet& a);
// Components are the S^D classes of each D* block, in block order.
SubprocessPath project_dstar(const Trajectory& traj, const ReactionNetwork& net, const PartitionABD& p);
SubprocessPath truncate(const SubprocessPath& path, double t);

// X^A(t) rebuilt from the path and the initial levels of the rows.
State path_state_at(const SubprocessPath& path, const State& x0_rows, double t);

struct LogLikelihood {
    std::vector<double> terms;     // l_m(t)
    double total = 0.0;
    std::vector<int> impossible;   // reactions observed while their propensity was zero

    bool finite() const { return impossible.empty(); }
};

// l_m(t) = sum over inter-event intervals of (1 - lambda_m) dt + sum of
// log lambda_m(T-) over the events of m up to t. Throws out-of-range and
// inconsistent-trajectory when a count would go negative.
LogLikelihood log_likelihood(const ReactionNetwork& net, const Trajectory& traj, double t);

enum class Side { A, B };
const char* to_string(Side s);

// Split of the reactions into the two measurability groups of a separation
// [A, B, D]: Delta(A) goes to A, Delta(B) \ Delta(A) to B, and reactions
// changing only D go to the side holding their reactants.
struct LikelihoodGroups {
    ReactionSet a;
    ReactionSet b;
    ReactionSet unassigned;
    bool reactants_contained = true;  // R[m] inside side u D for every grouped m
};
LikelihoodGroups likelihood_groups(const ReactionNetwork& net, const PartitionABD& p);

// Reactions whose event times reconstruct_reaction_paths returns for `side`.
ReactionSet reconstruction_scope(const ReactionNetwork& net, const PartitionABD& p, Side side);

// Event times of every reaction in reconstruction_scope, computed only from the
// side's subprocess path and the D* path. Throws inconsistent-paths.
std::map<int, std::vector<double>> reconstruct_reaction_paths(const ReactionNetwork& net, const PartitionABD& p,
                                                              Side side, const SubprocessPath& side_path,
                                                              const SubprocessPath& dstar_path);

// True per-reaction event times.
std::vector<std::vector<double>> reaction_times(const Trajectory& traj, int reactions);

// Reconstructs both sides from one trajectory and compares with the truth.
struct ReconstructionCheck {
    ReactionSet covered;              // union of both scopes
    std::size_t events_checked = 0;
    std::size_t mismatched_events = 0;
    std::string error;                // set when reconstruction threw

    bool exact() const { return error.empty() && mismatched_events == 0; }
};
ReconstructionCheck check_reconstruction(const ReactionNetwork& net, const PartitionABD& p, const Trajectory& traj);

// Statistics over replicas.
struct MeanEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};
MeanEstimate estimate(const std::vector<double>& samples);

struct ProjectionFunctional {
    std::string name;
    MeanEstimate difference;  // E[N_irr g] - E[c (N_r + N_irr) g]
    double z = 0.0;           // difference / se
};

struct ProjectionReport {
    double t_end = 0.0;
    std::size_t replicas = 0;
    std::vector<ProjectionFunctional> functionals;   // c = 1/2, each should be within 3 SE of zero
    ProjectionFunctional negative_control;           // c = 1/4, should be far from zero
    double reconstruction_residual = 0.0;            // max |N_irr - N_irr read from D*| over replicas
};

// Monte-Carlo check of E[N_irr(t) | D history] = (N_r(t) + N_irr(t)) / 2 under
// unit rates for f: A -> D, r: D -> A, irr: D -> B.
ProjectionReport conditional_projection_test(double t_end, std::size_t replicas, std::uint64_t seed,
                                             unsigned threads = 0);

// Runs f(i) for i in [0, n) over worker threads; results come back in index order.
template <class F>
auto parallel_map(std::size_t n, F f, unsigned threads = 0) {
    using R = decltype(f(std::size_t{0}));
    std::vector<std::optional<R>> slots(n);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

Json to_json(const ReactionNetwork& net, const Trajectory& traj);
std::string to_csv(const ReactionNetwork& net, const Trajectory& traj);
Json to_json(const ReactionNetwork& net, const SubprocessPath& path);
Json to_json(const LogLikelihood& ll, const ReactionNetwork& net);
Json to_json(const ProjectionReport& report);

}  // namespace skm
