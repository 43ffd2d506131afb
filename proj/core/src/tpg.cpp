#include "btpg/tpg.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace btpg {

size_t Tpg::vertex_count() const {
    size_t n = 0;
    for (const auto& a : agents) n += a.size();
    return n;
}

namespace {

struct Visit {
    int arrival;
    int agent;
    int index;
};

}  // namespace

Tpg build_tpg(const MapfSolution& sol) {
    Tpg tpg;
    tpg.agents.resize(size_t(sol.agent_count()));

    // Collapse waits; remember the first original timestep of each stay.
    for (int a = 0; a < sol.agent_count(); ++a) {
        const Path& p = sol.paths[size_t(a)];
        auto& verts = tpg.agents[size_t(a)];
        for (size_t t = 0; t < p.size(); ++t) {
            if (t == 0 || p[t] != p[t - 1]) verts.push_back({p[t], int(t)});
        }
    }

    // Visits per location, ordered by original arrival.
    std::map<Cell, std::vector<Visit>> visits;
    for (int a = 0; a < tpg.agent_count(); ++a)
        for (int i = 0; i < tpg.path_len(a); ++i)
            visits[tpg.agents[size_t(a)][size_t(i)].loc].push_back(
                {tpg.agents[size_t(a)][size_t(i)].orig_arrival, a, i});

    for (auto& [cell, vs] : visits) {
        std::sort(vs.begin(), vs.end(), [](const Visit& l, const Visit& r) {
            return std::tie(l.arrival, l.agent, l.index) < std::tie(r.arrival, r.agent, r.index);
        });
        for (size_t i = 0; i + 1 < vs.size(); ++i) {
            if (vs[i].arrival == vs[i + 1].arrival && vs[i].agent != vs[i + 1].agent)
                throw std::invalid_argument("two agents arrive at one location at the same timestep; run validate_solution first");
        }
        // One edge per ordered pair of distinct-agent visits. The departure
        // timestep of a visit is the original arrival at the agent's next
        // vertex, or one past its final timestep when this is the last vertex.
        for (size_t i = 0; i < vs.size(); ++i) {
            const Visit& first = vs[i];
            int next_index = first.index + 1;
            int depart = next_index < tpg.path_len(first.agent)
                             ? tpg.agents[size_t(first.agent)][size_t(next_index)].orig_arrival
                             : sol.duration(first.agent) + 1;
            for (size_t j = i + 1; j < vs.size(); ++j) {
                const Visit& second = vs[j];
                if (second.agent == first.agent) continue;  // own order is type-1 implied
                tpg.type2.push_back({{first.agent, next_index},
                                     {second.agent, second.index},
                                     cell,
                                     depart,
                                     second.arrival});
            }
        }
    }

    std::sort(tpg.type2.begin(), tpg.type2.end(), [](const Type2Edge& l, const Type2Edge& r) {
        return std::tie(l.from.agent, l.from.index, l.to.agent, l.to.index) <
               std::tie(r.from.agent, r.from.index, r.to.agent, r.to.index);
    });

    if (!check_acyclic(tpg))
        throw TpgCycleError("solution induces a cyclic dependency (simultaneous cyclic handoff); pick another instance");
    return tpg;
}

namespace {

// Kahn's algorithm over a dense vertex numbering.
bool acyclic_impl(int n_vertices, const std::vector<std::vector<int>>& out) {
    std::vector<int> indeg(size_t(n_vertices), 0);
    for (const auto& succs : out)
        for (int v : succs) ++indeg[size_t(v)];
    std::vector<int> stack;
    for (int v = 0; v < n_vertices; ++v)
        if (indeg[size_t(v)] == 0) stack.push_back(v);
    int seen = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++seen;
        for (int w : out[size_t(v)])
            if (--indeg[size_t(w)] == 0) stack.push_back(w);
    }
    return seen == n_vertices;
}

}  // namespace

bool check_acyclic(std::span<const std::pair<VertexId, VertexId>> edges) {
    std::map<VertexId, int> ids;
    for (const auto& [u, v] : edges) {
        ids.emplace(u, 0);
        ids.emplace(v, 0);
    }
    int n = 0;
    for (auto& [v, id] : ids) id = n++;
    std::vector<std::vector<int>> out(size_t(n));
    for (const auto& [u, v] : edges) out[size_t(ids[u])].push_back(ids[v]);
    return acyclic_impl(n, out);
}

namespace {

// Dense numbering including one departure vertex per agent.
struct DenseIds {
    std::vector<int> offset;
    int total = 0;

    explicit DenseIds(const Tpg& tpg) {
        offset.resize(size_t(tpg.agent_count()) + 1, 0);
        for (int a = 0; a < tpg.agent_count(); ++a)
            offset[size_t(a) + 1] = offset[size_t(a)] + tpg.path_len(a) + 1;
        total = offset[size_t(tpg.agent_count())];
    }
    int id(VertexId v) const { return offset[size_t(v.agent)] + v.index; }
};

std::vector<std::vector<int>> full_adjacency(const Tpg& tpg, const DenseIds& ids) {
    std::vector<std::vector<int>> out(size_t(ids.total));
    for (int a = 0; a < tpg.agent_count(); ++a)
        for (int i = 0; i < tpg.path_len(a); ++i)  // includes last -> departure
            out[size_t(ids.id({a, i}))].push_back(ids.id({a, i + 1}));
    for (const auto& e : tpg.type2) out[size_t(ids.id(e.from))].push_back(ids.id(e.to));
    return out;
}

}  // namespace

bool check_acyclic(const Tpg& tpg) {
    DenseIds ids(tpg);
    return acyclic_impl(ids.total, full_adjacency(tpg, ids));
}

std::vector<std::vector<int>> earliest_arrival_times(const Tpg& tpg) {
    DenseIds ids(tpg);
    auto out = full_adjacency(tpg, ids);

    std::vector<int> indeg(size_t(ids.total), 0);
    for (const auto& succs : out)
        for (int v : succs) ++indeg[size_t(v)];

    std::vector<int> time(size_t(ids.total), 0);
    std::vector<int> stack;
    for (int v = 0; v < ids.total; ++v)
        if (indeg[size_t(v)] == 0) stack.push_back(v);

    // Weight 1 along type-1 chains (including last -> departure), weight 0 on
    // type-2 edges; a vacate edge inherits its +1 from the departure vertex.
    std::vector<std::vector<int>> t1succ(size_t(ids.total));
    for (int a = 0; a < tpg.agent_count(); ++a)
        for (int i = 0; i < tpg.path_len(a); ++i)
            t1succ[size_t(ids.id({a, i}))].push_back(ids.id({a, i + 1}));
    std::vector<std::vector<int>> t2succ(size_t(ids.total));
    for (const auto& e : tpg.type2) t2succ[size_t(ids.id(e.from))].push_back(ids.id(e.to));

    int processed = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++processed;
        for (int w : t1succ[size_t(v)]) {
            time[size_t(w)] = std::max(time[size_t(w)], time[size_t(v)] + 1);
            if (--indeg[size_t(w)] == 0) stack.push_back(w);
        }
        for (int w : t2succ[size_t(v)]) {
            time[size_t(w)] = std::max(time[size_t(w)], time[size_t(v)]);
            if (--indeg[size_t(w)] == 0) stack.push_back(w);
        }
    }
    if (processed != ids.total) throw TpgCycleError("cycle detected in earliest_arrival_times");

    std::vector<std::vector<int>> per_agent(size_t(tpg.agent_count()));
    for (int a = 0; a < tpg.agent_count(); ++a) {
        per_agent[size_t(a)].resize(size_t(tpg.path_len(a)) + 1);
        for (int i = 0; i <= tpg.path_len(a); ++i)
            per_agent[size_t(a)][size_t(i)] = time[size_t(ids.id({a, i}))];
    }
    return per_agent;
}

std::vector<int> earliest_finish_times(const Tpg& tpg) {
    auto times = earliest_arrival_times(tpg);
    std::vector<int> finish(size_t(tpg.agent_count()));
    for (int a = 0; a < tpg.agent_count(); ++a)
        finish[size_t(a)] = times[size_t(a)][size_t(tpg.last_index(a))];
    return finish;
}

std::string serialize_tpg(const Tpg& tpg) {
    std::string out;
    for (int a = 0; a < tpg.agent_count(); ++a)
        for (int i = 0; i < tpg.path_len(a); ++i) {
            Cell c = tpg.agents[size_t(a)][size_t(i)].loc;
            out += std::to_string(a) + "." + std::to_string(i) + "@(" + std::to_string(c.x) +
                   "," + std::to_string(c.y) + ")\n";
        }
    for (int a = 0; a < tpg.agent_count(); ++a)
        for (int i = 0; i + 1 < tpg.path_len(a); ++i)
            out += "T1 " + std::to_string(a) + "." + std::to_string(i) + "->" + std::to_string(a) +
                   "." + std::to_string(i + 1) + "\n";
    for (const auto& e : tpg.type2)
        out += "T2 " + std::to_string(e.from.agent) + "." + std::to_string(e.from.index) + "->" +
               std::to_string(e.to.agent) + "." + std::to_string(e.to.index) + "\n";
    return out;
}

}  // namespace btpg
