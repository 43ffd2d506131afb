#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "btpg/solution.hpp"

namespace btpg {

struct PlanOutcome {
    std::optional<MapfSolution> solution;
    std::string failure;  // set when !solution

    explicit operator bool() const { return solution.has_value(); }
};

/// Prioritized space-time shortest-path search. The seed fixes the planning
/// priority order; the result is valid (passes validate_solution) but not
/// necessarily optimal. Agents disappear after their final timestep, so later
/// agents may reuse vacated cells.
PlanOutcome generate_fixture(const GridMap& map, const std::vector<Cell>& starts,
                             const std::vector<Cell>& goals, uint64_t seed,
                             size_t max_expansions_per_agent = 200000);

/// Draws distinct passable starts and goals for n agents.
struct RandomInstance {
    std::vector<Cell> starts;
    std::vector<Cell> goals;
};
std::optional<RandomInstance> random_instance(const GridMap& map, int n_agents, uint64_t seed);

/// Random map with roughly `blocked_fraction` blocked cells.
GridMap random_map(int width, int height, double blocked_fraction, uint64_t seed);

}  // namespace btpg
