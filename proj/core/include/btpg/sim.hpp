#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "btpg/btpg.hpp"

namespace btpg {

/// Stochastic delay model: the first ceil(delayed_fraction * n) agents of a
/// seed-derived permutation are eligible; an eligible, non-delayed agent
/// starts a delay_length freeze with delay_probability at each timestep.
/// The eligible subset is drawn per seed.
struct DelayModel {
    double delayed_fraction = 0.1;
    double delay_probability = 0.3;
    int delay_length = 5;
    uint64_t seed = 0;
};

/// Realized delay field. Derived from (seed, agent count, model) only, via a
/// counter-based hash per (agent, timestep), so paired runs over different
/// graphs see identical delays.
class DelaySchedule {
public:
    static DelaySchedule from_model(const DelayModel& m, int n_agents);
    static DelaySchedule none(int n_agents);
    /// Explicit per-agent [start, end) freeze intervals (test hook).
    static DelaySchedule from_intervals(int n_agents,
                                        std::vector<std::vector<std::pair<int, int>>> intervals);

    bool delayed(int agent, int t) const;
    bool eligible(int agent) const { return eligible_[size_t(agent)]; }
    int agent_count() const { return int(eligible_.size()); }

    /// Timesteps the agent needs to make `moves` moves when frozen whenever
    /// the field says so: moves plus the interleaved delay steps.
    int ideal_duration(int agent, int moves) const;

private:
    struct AgentLane {
        std::vector<std::pair<int, int>> intervals;  // disjoint, ascending
        int next_sample = 0;                         // model-based lanes only
    };
    void extend(int agent, int t) const;

    bool model_based_ = false;
    DelayModel model_{};
    std::vector<uint8_t> eligible_;
    mutable std::vector<AgentLane> lanes_;
};

struct OccupancyRow {
    int t;
    int agent;
    int x, y;
    std::string waiting_on;
};

struct SimResult {
    std::vector<int> finish;  // arrival timestep at the agent's last vertex
    double mean_finish = 0.0;
    int used_bipairs = 0;  // edges of units resolved in the reverse direction
    bool deadlock = false;
    bool timed_out = false;
    int collision_count = 0;  // tripwire; stays 0 for well-formed graphs
    int swap_count = 0;       // tripwire
    std::vector<OccupancyRow> trace;
};

struct SimOptions {
    bool record_trace = false;
    int64_t max_steps = -1;  // default: generous bound from path lengths
};

/// Synchronous executor. Each timestep: delayed agents freeze; every agent
/// whose next vertex has all its binding dependencies satisfied advances,
/// with same-step train moves allowed; bi-pairs resolve first-come
/// first-served at the conflict cell (group earliest-out vertex), ties to the
/// original direction; the non-original direction may claim only strictly
/// after the original agent's zero-delay schedule for the cell has passed.
SimResult simulate(const Btpg& g, const DelaySchedule& delays, const SimOptions& opts = {});

/// TPG execution policy (no pairs).
SimResult simulate_tpg(const Tpg& tpg, const DelaySchedule& delays, const SimOptions& opts = {});

/// (t_tpg - t_btpg) / (t_tpg - t_ideal). Exactly 0 when the executions tie;
/// nullopt when they differ but the denominator is degenerate.
std::optional<double> improvement(double t_tpg, double t_btpg, double t_ideal);

/// Mean ideal finish time: per agent, its original (wait-inclusive) path
/// duration plus the delays the field interleaves into that window.
double ideal_time(const MapfSolution& sol, const DelaySchedule& delays);

}  // namespace btpg
