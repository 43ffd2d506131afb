#pragma once

#include <compare>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "btpg/solution.hpp"

namespace btpg {

/// A state of one agent: `index` is the position on its wait-collapsed path.
/// `index == path length` names the agent's departure (it has vacated the
/// grid); departure pseudo-vertices only ever appear as type-2 edge sources.
struct VertexId {
    int agent = -1;
    int index = -1;
    auto operator<=>(const VertexId&) const = default;
};

/// Inter-agent passing-order dependency: agent `to.agent` may enter the
/// conflict location only at-or-after agent `from.agent` reaches `from`.
/// When `from` is a departure pseudo-vertex the edge is a vacate edge: the
/// head agent may enter only strictly after the source agent finished.
struct Type2Edge {
    VertexId from;
    VertexId to;
    Cell conflict{};    // loc(to) == loc(from.index - 1 on from.agent)
    int depart_t = -1;  // original timestep the source agent leaves the conflict
    int arrive_t = -1;  // original timestep the head agent arrives there
};

struct TpgVertex {
    Cell loc{};
    int orig_arrival = -1;  // first original timestep at this location
};

class TpgCycleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Temporal plan graph: per-agent vertex chains (type-1 edges implied between
/// consecutive indices) plus type-2 edges. Immutable after construction.
struct Tpg {
    std::vector<std::vector<TpgVertex>> agents;
    std::vector<Type2Edge> type2;

    int agent_count() const { return int(agents.size()); }
    int path_len(int agent) const { return int(agents[size_t(agent)].size()); }
    int last_index(int agent) const { return path_len(agent) - 1; }
    Cell loc(VertexId v) const { return agents[size_t(v.agent)][size_t(v.index)].loc; }
    bool is_departure(VertexId v) const { return v.index == path_len(v.agent); }
    bool is_vacate(const Type2Edge& e) const { return is_departure(e.from); }
    size_t vertex_count() const;
};

/// Builds the TPG: waits collapsed, one type-2 edge for every ordered pair of
/// visits to a shared location (earlier visitor first). Throws TpgCycleError
/// if the result is cyclic (simultaneous cyclic handoffs in the solution) and
/// std::invalid_argument when two agents share an arrival timestep.
Tpg build_tpg(const MapfSolution& sol);

/// True iff the directed edge set has no cycle. Vertices are taken from the
/// edges themselves plus the implied type-1 chains are NOT assumed; pass every
/// edge explicitly.
bool check_acyclic(std::span<const std::pair<VertexId, VertexId>> edges);

/// True iff the TPG's full edge set (type-1 chains + type-2) is acyclic.
bool check_acyclic(const Tpg& tpg);

/// Earliest timestep each vertex can be entered when every move costs one
/// timestep and all dependencies hold (longest path over the DAG). Vacate
/// sources add one extra step (the finisher vacates after its arrival step).
/// Indexed [agent][index], with one extra slot for the departure vertex.
std::vector<std::vector<int>> earliest_arrival_times(const Tpg& tpg);

/// Earliest finish timestep per agent (arrival at its last vertex).
std::vector<int> earliest_finish_times(const Tpg& tpg);

/// Text form: `m.i@(x,y)` vertex lines, then `T1 m.i->m.j` and `T2 m.i->n.j`
/// edge lines, stably ordered.
std::string serialize_tpg(const Tpg& tpg);

}  // namespace btpg
