#include "btpg/planner.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <queue>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace btpg {

namespace {

struct SpaceTime {
    int x, y, t;
    bool operator==(const SpaceTime& o) const { return x == o.x && y == o.y && t == o.t; }
};

struct SpaceTimeHash {
    size_t operator()(const SpaceTime& s) const noexcept {
        uint64_t h = uint64_t(uint32_t(s.x));
        h = h * 0x9e3779b97f4a7c15ull + uint32_t(s.y);
        h = h * 0x9e3779b97f4a7c15ull + uint32_t(s.t);
        return size_t(h);
    }
};

struct Reservations {
    // (cell, t) occupied, and (from, to, t) move reservations for swap checks.
    std::unordered_set<SpaceTime, SpaceTimeHash> vertex;
    std::unordered_map<Cell, int, CellHash> active_until;  // last timestep the cell's owner occupies it

    bool vertex_free(Cell c, int t) const { return !vertex.count({c.x, c.y, t}); }
    // Swap between t-1 and t: someone moves b->a while we move a->b.
    std::unordered_set<uint64_t> moves;  // hash of (from, to, arrival t)
    static uint64_t move_key(Cell from, Cell to, int t) {
        uint64_t h = uint64_t(uint32_t(from.x));
        h = h * 1315423911u + uint32_t(from.y);
        h = h * 1315423911u + uint32_t(to.x);
        h = h * 1315423911u + uint32_t(to.y);
        h = h * 1315423911u + uint32_t(t);
        return h;
    }
    bool swap_free(Cell from, Cell to, int t) const { return !moves.count(move_key(to, from, t)); }

    void commit(const Path& p) {
        for (size_t t = 0; t < p.size(); ++t) {
            vertex.insert({p[t].x, p[t].y, int(t)});
            if (t > 0) moves.insert(move_key(p[t - 1], p[t], int(t)));
        }
    }
};

struct Node {
    int f, h, x, y, t;
    int parent;  // index into the closed list
    bool operator>(const Node& o) const {
        return std::tie(f, h, x, y, t) > std::tie(o.f, o.h, o.x, o.y, o.t);
    }
};

int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

std::optional<Path> plan_agent(const GridMap& map, Cell start, Cell goal,
                               const Reservations& res, int horizon, size_t max_expansions) {
    std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
    std::vector<Node> closed;
    std::unordered_set<SpaceTime, SpaceTimeHash> seen;

    open.push({manhattan(start, goal), manhattan(start, goal), start.x, start.y, 0, -1});
    size_t expansions = 0;

    while (!open.empty()) {
        Node cur = open.top();
        open.pop();
        if (seen.count({cur.x, cur.y, cur.t})) continue;
        seen.insert({cur.x, cur.y, cur.t});
        closed.push_back(cur);
        int cur_idx = int(closed.size()) - 1;

        if (Cell{cur.x, cur.y} == goal) {
            // Goal must stay collision-free only through this arrival timestep
            // (the agent disappears afterwards).
            Path p;
            for (int i = cur_idx; i >= 0; i = closed[size_t(i)].parent)
                p.push_back({closed[size_t(i)].x, closed[size_t(i)].y});
            std::reverse(p.begin(), p.end());
            return p;
        }
        if (++expansions > max_expansions || cur.t > horizon) continue;

        static const int dx[5] = {0, 1, -1, 0, 0};
        static const int dy[5] = {0, 0, 0, 1, -1};
        for (int d = 0; d < 5; ++d) {
            Cell next{cur.x + dx[d], cur.y + dy[d]};
            int nt = cur.t + 1;
            if (!map.passable(next)) continue;
            if (!res.vertex_free(next, nt)) continue;
            if (!res.swap_free({cur.x, cur.y}, next, nt)) continue;
            if (seen.count({next.x, next.y, nt})) continue;
            int h = manhattan(next, goal);
            open.push({nt + h, h, next.x, next.y, nt, cur_idx});
        }
    }
    return std::nullopt;
}

}  // namespace

PlanOutcome generate_fixture(const GridMap& map, const std::vector<Cell>& starts,
                             const std::vector<Cell>& goals, uint64_t seed,
                             size_t max_expansions_per_agent) {
    const int n = int(starts.size());
    if (goals.size() != starts.size()) return {std::nullopt, "starts/goals size mismatch"};
    for (int a = 0; a < n; ++a) {
        if (!map.passable(starts[size_t(a)])) return {std::nullopt, "start not passable"};
        if (!map.passable(goals[size_t(a)])) return {std::nullopt, "goal not passable"};
    }

    std::vector<int> order(size_t(n));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    // Generous horizon: solo distance plus room to yield to every other agent.
    int horizon = map.width * map.height + 4 * n * (map.width + map.height);

    MapfSolution sol;
    sol.paths.resize(size_t(n));
    Reservations res;
    for (int a : order) {
        auto p = plan_agent(map, starts[size_t(a)], goals[size_t(a)], res, horizon,
                            max_expansions_per_agent);
        if (!p) return {std::nullopt, "search exhausted for agent " + std::to_string(a)};
        res.commit(*p);
        sol.paths[size_t(a)] = std::move(*p);
    }
    return {std::move(sol), ""};
}

std::optional<RandomInstance> random_instance(const GridMap& map, int n_agents, uint64_t seed) {
    std::vector<Cell> free;
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x)
            if (map.passable(x, y)) free.push_back({x, y});
    if (int(free.size()) < n_agents) return std::nullopt;

    std::mt19937_64 rng(seed ^ 0xabcdef12345678ull);
    auto pick_distinct = [&](std::vector<Cell>& out) {
        std::vector<Cell> pool = free;
        std::shuffle(pool.begin(), pool.end(), rng);
        out.assign(pool.begin(), pool.begin() + n_agents);
    };
    RandomInstance inst;
    pick_distinct(inst.starts);
    pick_distinct(inst.goals);
    return inst;
}

GridMap random_map(int width, int height, double blocked_fraction, uint64_t seed) {
    GridMap m;
    m.width = width;
    m.height = height;
    m.cells.assign(size_t(width) * size_t(height), 1);
    std::mt19937_64 rng(seed ^ 0x5deece66dull);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& c : m.cells)
        if (u(rng) < blocked_fraction) c = 0;
    return m;
}

}  // namespace btpg
