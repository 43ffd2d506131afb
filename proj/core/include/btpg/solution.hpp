#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "btpg/grid.hpp"

namespace btpg {

/// One location per timestep; a repeated location is a wait.
using Path = std::vector<Cell>;

/// Timestep-indexed collision-free paths, one per agent, in agent-id order.
/// Agents vanish after their final timestep (finish-and-disappear), so
/// collision checks only apply while both agents are active.
struct MapfSolution {
    std::vector<Path> paths;

    int agent_count() const { return int(paths.size()); }
    /// Scheduled arrival timestep of the agent's last location.
    int duration(int agent) const { return int(paths[size_t(agent)].size()) - 1; }
    int makespan() const;
};

enum class ViolationKind {
    OffMap,           // location out of bounds or blocked
    NonAdjacentStep,  // consecutive locations neither equal nor 4-adjacent
    VertexCollision,  // two active agents share a location at one timestep
    SwapCollision,    // two active agents exchange adjacent locations
    EmptyPath,
};

struct Violation {
    ViolationKind kind;
    int agent_a = -1;
    int agent_b = -1;  // -1 when only one agent is involved
    int timestep = -1;
    Cell where{};
    std::string describe() const;
};

/// Line format: `<agent-id>:(x0,y0);(x1,y1);...`, agent ids 0..n-1 each once.
MapfSolution parse_solution(std::istream& in);
MapfSolution parse_solution(const std::string& text);
MapfSolution parse_solution_file(const std::string& path);

/// Inverse of parse_solution.
std::string serialize_solution(const MapfSolution& sol);

/// Empty result iff all MapfSolution invariants hold on this map.
std::vector<Violation> validate_solution(const GridMap& map, const MapfSolution& sol);

}  // namespace btpg
