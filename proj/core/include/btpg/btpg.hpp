#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "btpg/tpg.hpp"

namespace btpg {

/// Dense numbering of TPG vertices including one departure pseudo-vertex per
/// agent (index == path length).
struct VertexIndex {
    std::vector<int> offset;
    int total = 0;

    VertexIndex() = default;
    explicit VertexIndex(const Tpg& tpg) {
        offset.resize(size_t(tpg.agent_count()) + 1, 0);
        for (int a = 0; a < tpg.agent_count(); ++a)
            offset[size_t(a) + 1] = offset[size_t(a)] + tpg.path_len(a) + 1;
        total = offset.empty() ? 0 : offset.back();
    }
    int id(VertexId v) const { return offset[size_t(v.agent)] + v.index; }
};

enum class Algorithm { Naive, Optimized, Max };

enum class GroupKind { Single, Following, Opposing };

enum class GroupDirection { Forward, Reverse };

/// A maximal run of type-2 edges between one agent pair over consecutive
/// conflict locations, or a singleton. A group converts atomically.
struct EdgeGroup {
    std::vector<int> edges;  // ids into Tpg::type2, ascending source index
    GroupKind kind = GroupKind::Single;
};

/// Conversion state of a type-2 edge. CandidateReversed exists only while a
/// unit is being checked: the forward edge is absent and its mirror is in the
/// graph.
enum class EdgeState : uint8_t { Normal, Paired, CandidateReversed };

/// A TPG whose type-2 edges are partitioned into normal edges and bi-pairs,
/// with every edge belonging to exactly one group (singletons included).
/// Within a group all edges share one state.
struct Btpg {
    Tpg tpg;
    std::vector<EdgeGroup> groups;
    std::vector<int> group_of;            // edge id -> group id
    std::vector<EdgeState> state;         // per edge id
    std::vector<Type2Edge> reverse;       // mirror per edge id; valid iff reversible
    std::vector<uint8_t> reversible;      // per edge id
    std::vector<uint8_t> checked_once;    // per edge id; set by the builder

    VertexIndex index;
    std::vector<std::vector<int>> out_forward;  // dense vertex -> edge ids sourced there
    std::vector<std::vector<int>> out_reverse;  // dense vertex -> reversible edge ids whose mirror starts there

    /// Working graph over a TPG with all edges normal.
    static Btpg from_tpg(Tpg tpg, bool grouping);

    int edge_count() const { return int(tpg.type2.size()); }
    bool is_paired(int edge) const { return state[size_t(edge)] == EdgeState::Paired; }
    int pair_count() const;
    bool unit_is_paired(int group_id) const;
    /// Every edge in exactly one group; group states uniform; pair mirrors exact.
    bool partition_valid() const;
};

/// Mirror of a type-2 edge per the bi-pair index arithmetic;
/// nullopt when the edge is a vacate edge or the mirror's source would fall
/// beyond the head agent's last vertex.
std::optional<Type2Edge> reverse_of(const Tpg& tpg, const Type2Edge& e);

/// Partition of all type-2 edges into following/opposing runs and singletons.
std::vector<EdgeGroup> group_type2_edges(const Tpg& tpg);

/// Vertex at which an agent commits to traversing the group in a direction:
/// the predecessor of the group's first edge source in that direction.
VertexId get_earliest_out_node(const Btpg& g, int group_id, GroupDirection dir);

/// 1 = reachable, 0 = unreachable; indexed by dense vertex id (g.index).
using StateStatus = std::vector<uint8_t>;

StateStatus make_all_reachable(const Btpg& g);

/// Marks v unreachable together with its same-agent suffix, then cascades
/// through type-1 edges and those normal type-2 edges already confirmed
/// non-convertible. Returns the newly marked dense ids (for undo).
std::vector<int> update_state_status(StateStatus& status, const Btpg& g, VertexId v);

struct DirectedEdgeRef {
    int edge = -1;
    bool reversed = false;
};

/// Depth-first search for a reachable deadlock cycle closing at `origin`.
/// `visited` seeds the branch (the candidate reversed edge). Cycles made
/// entirely of more than two type-2 edges (and no vacate edge) are rotations
/// and do not count; Optimized additionally exempts cycles that contain a
/// vertex v_i^n and a pair edge sourced at v_j^n with j > i. Max applies the
/// StateStatus skip rules. Status marks made while exploring are undone.
bool deadlock_cycle_detection(const Btpg& g, VertexId current, VertexId origin,
                              const std::vector<DirectedEdgeRef>& visited, StateStatus& status,
                              Algorithm algorithm);

/// Injectable time source so cutoffs can be driven deterministically in tests.
class BuildClock {
public:
    virtual ~BuildClock() = default;
    virtual int64_t elapsed_ms() = 0;
    virtual void tick() {}  // called after each unit check
};

class SteadyBuildClock : public BuildClock {
public:
    SteadyBuildClock() : start_(std::chrono::steady_clock::now()) {}
    int64_t elapsed_ms() override {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

/// Advances a fixed amount per unit check.
class ManualBuildClock : public BuildClock {
public:
    explicit ManualBuildClock(int64_t ms_per_tick) : step_(ms_per_tick) {}
    int64_t elapsed_ms() override { return now_; }
    void tick() override { now_ += step_; }

private:
    int64_t step_;
    int64_t now_ = 0;
};

struct TraceRow {
    int64_t elapsed_ms = 0;
    std::string unit;      // "m.i->n.j" for singletons, "g<id>" for groups, "pass<k>" markers
    std::string decision;  // converted | rejected | non_reversible | pass_end | cutoff
    int cumulative_pairs = 0;
};

struct BuildOptions {
    Algorithm algorithm = Algorithm::Max;
    bool grouping = true;
    bool fixpoint = false;
    std::chrono::milliseconds cutoff{600000};  // paper-style 10 minute budget
    BuildClock* clock = nullptr;               // optional external clock
    std::function<void(const Btpg&, const TraceRow&)> observer;
};

struct BuildResult {
    Btpg graph;
    std::vector<TraceRow> trace;
    bool cutoff_hit = false;
    int passes = 0;
    int pairs_after_first_pass = 0;
};

/// Checks candidate units in original-execution order and converts those whose
/// reversal admits no reachable deadlock cycle. Anytime: stopping at the
/// cutoff returns the current valid graph.
BuildResult build_btpg(const Tpg& tpg, const BuildOptions& opts = {});

/// Normal units that would convert now without invalidating existing pairs.
/// Empty output certifies local maximality. Returns edge ids.
std::vector<int> audit_local_maximality(const Btpg& g, Algorithm algorithm = Algorithm::Max);

/// Tpg text plus `PAIR m.i->n.j | n.j+1->m.i-1` and `GROUP k ...` lines.
std::string serialize_btpg(const Btpg& g);

std::string trace_to_csv(const std::vector<TraceRow>& trace);

}  // namespace btpg
