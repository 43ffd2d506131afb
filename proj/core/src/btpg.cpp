#include "btpg/btpg.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <stdexcept>

namespace btpg {

std::optional<Type2Edge> reverse_of(const Tpg& tpg, const Type2Edge& e) {
    if (tpg.is_vacate(e)) return std::nullopt;
    if (e.to.index + 1 > tpg.last_index(e.to.agent)) return std::nullopt;
    Type2Edge rev;
    rev.from = {e.to.agent, e.to.index + 1};
    rev.to = {e.from.agent, e.from.index - 1};
    rev.conflict = e.conflict;
    rev.depart_t = tpg.agents[size_t(rev.from.agent)][size_t(rev.from.index)].orig_arrival;
    rev.arrive_t = tpg.agents[size_t(rev.to.agent)][size_t(rev.to.index)].orig_arrival;
    return rev;
}

std::vector<EdgeGroup> group_type2_edges(const Tpg& tpg) {
    const int n_edges = int(tpg.type2.size());
    std::vector<char> consumed(size_t(n_edges), 0);
    std::vector<EdgeGroup> groups;

    // Bucket by ordered agent pair; vacate edges stay singletons.
    std::map<std::pair<int, int>, std::vector<int>> buckets;
    for (int id = 0; id < n_edges; ++id) {
        const Type2Edge& e = tpg.type2[size_t(id)];
        if (!tpg.is_vacate(e)) buckets[{e.from.agent, e.to.agent}].push_back(id);
    }

    for (auto& [agents, ids] : buckets) {
        std::sort(ids.begin(), ids.end(), [&](int l, int r) {
            const auto& a = tpg.type2[size_t(l)];
            const auto& b = tpg.type2[size_t(r)];
            return std::tie(a.from.index, a.to.index) < std::tie(b.from.index, b.to.index);
        });
        std::map<std::pair<int, int>, int> by_pos;  // (from.index, to.index) -> id
        for (int id : ids) {
            const auto& e = tpg.type2[size_t(id)];
            by_pos[{e.from.index, e.to.index}] = id;
        }
        for (int id : ids) {
            if (consumed[size_t(id)]) continue;
            const auto& e = tpg.type2[size_t(id)];
            // Try to grow a run of consecutive conflict locations; the head
            // agent traverses them in the same (+1) or opposite (-1) order.
            EdgeGroup best;
            best.edges = {id};
            for (int dir : {+1, -1}) {
                EdgeGroup run;
                run.edges = {id};
                int f = e.from.index, t = e.to.index;
                while (true) {
                    auto it = by_pos.find({f + 1, t + dir});
                    if (it == by_pos.end() || consumed[size_t(it->second)]) break;
                    run.edges.push_back(it->second);
                    ++f;
                    t += dir;
                }
                run.kind = dir > 0 ? GroupKind::Following : GroupKind::Opposing;
                if (run.edges.size() > best.edges.size()) best = run;
            }
            if (best.edges.size() < 2) {
                best.kind = GroupKind::Single;
                best.edges = {id};
            }
            for (int member : best.edges) consumed[size_t(member)] = 1;
            groups.push_back(std::move(best));
        }
    }

    for (int id = 0; id < n_edges; ++id)
        if (tpg.is_vacate(tpg.type2[size_t(id)])) groups.push_back({{id}, GroupKind::Single});

    std::sort(groups.begin(), groups.end(), [](const EdgeGroup& a, const EdgeGroup& b) {
        return a.edges.front() < b.edges.front();
    });
    return groups;
}

Btpg Btpg::from_tpg(Tpg tpg, bool grouping) {
    Btpg g;
    g.tpg = std::move(tpg);
    const int n_edges = g.edge_count();

    if (grouping) {
        g.groups = group_type2_edges(g.tpg);
    } else {
        g.groups.reserve(size_t(n_edges));
        for (int id = 0; id < n_edges; ++id) g.groups.push_back({{id}, GroupKind::Single});
    }
    g.group_of.assign(size_t(n_edges), -1);
    for (int gid = 0; gid < int(g.groups.size()); ++gid)
        for (int e : g.groups[size_t(gid)].edges) g.group_of[size_t(e)] = gid;

    g.state.assign(size_t(n_edges), EdgeState::Normal);
    g.checked_once.assign(size_t(n_edges), 0);
    g.reverse.resize(size_t(n_edges));
    g.reversible.assign(size_t(n_edges), 0);
    for (int id = 0; id < n_edges; ++id) {
        if (auto rev = reverse_of(g.tpg, g.tpg.type2[size_t(id)])) {
            g.reverse[size_t(id)] = *rev;
            g.reversible[size_t(id)] = 1;
        }
    }

    g.index = VertexIndex(g.tpg);
    g.out_forward.assign(size_t(g.index.total), {});
    g.out_reverse.assign(size_t(g.index.total), {});
    for (int id = 0; id < n_edges; ++id) {
        g.out_forward[size_t(g.index.id(g.tpg.type2[size_t(id)].from))].push_back(id);
        if (g.reversible[size_t(id)])
            g.out_reverse[size_t(g.index.id(g.reverse[size_t(id)].from))].push_back(id);
    }
    return g;
}

int Btpg::pair_count() const {
    return int(std::count(state.begin(), state.end(), EdgeState::Paired));
}

bool Btpg::unit_is_paired(int group_id) const {
    return state[size_t(groups[size_t(group_id)].edges.front())] == EdgeState::Paired;
}

bool Btpg::partition_valid() const {
    std::vector<int> seen(size_t(edge_count()), 0);
    for (int gid = 0; gid < int(groups.size()); ++gid) {
        const auto& members = groups[size_t(gid)].edges;
        if (members.empty()) return false;
        EdgeState s = state[size_t(members.front())];
        if (s == EdgeState::CandidateReversed) return false;
        for (int e : members) {
            if (e < 0 || e >= edge_count()) return false;
            if (group_of[size_t(e)] != gid) return false;
            if (state[size_t(e)] != s) return false;
            if (s == EdgeState::Paired) {
                if (!reversible[size_t(e)]) return false;
                auto rev = reverse_of(tpg, tpg.type2[size_t(e)]);
                if (!rev || rev->from != reverse[size_t(e)].from || rev->to != reverse[size_t(e)].to)
                    return false;
            }
            ++seen[size_t(e)];
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

VertexId get_earliest_out_node(const Btpg& g, int group_id, GroupDirection dir) {
    const auto& members = g.groups[size_t(group_id)].edges;
    if (dir == GroupDirection::Forward) {
        int min_from = g.tpg.type2[size_t(members.front())].from.index;
        int agent = g.tpg.type2[size_t(members.front())].from.agent;
        for (int e : members) min_from = std::min(min_from, g.tpg.type2[size_t(e)].from.index);
        return {agent, min_from - 1};
    }
    int min_to = g.tpg.type2[size_t(members.front())].to.index;
    int agent = g.tpg.type2[size_t(members.front())].to.agent;
    for (int e : members) min_to = std::min(min_to, g.tpg.type2[size_t(e)].to.index);
    return {agent, min_to};
}

StateStatus make_all_reachable(const Btpg& g) {
    return StateStatus(size_t(g.index.total), 1);
}

namespace {

bool closure_eligible(const Btpg& g, int edge) {
    // "Checked not to be a bi-pair": kept normal after a check, or statically
    // non-convertible (vacate / boundary-non-reversible).
    return g.state[size_t(edge)] == EdgeState::Normal &&
           (g.checked_once[size_t(edge)] || !g.reversible[size_t(edge)]);
}

}  // namespace

std::vector<int> update_state_status(StateStatus& status, const Btpg& g, VertexId v) {
    std::vector<int> marked;
    std::vector<VertexId> stack{v};
    while (!stack.empty()) {
        VertexId u = stack.back();
        stack.pop_back();
        int du = g.index.id(u);
        if (!status[size_t(du)]) continue;
        status[size_t(du)] = 0;
        marked.push_back(du);
        if (u.index < g.tpg.path_len(u.agent)) stack.push_back({u.agent, u.index + 1});
        for (int e : g.out_forward[size_t(du)])
            if (closure_eligible(g, e)) stack.push_back(g.tpg.type2[size_t(e)].to);
    }
    return marked;
}

namespace {

struct DfsCtx {
    const Btpg& g;
    Algorithm algo;
    int origin_id;
    StateStatus& status;
    std::vector<uint8_t> on_path;
    std::vector<DirectedEdgeRef> edges;
    std::vector<VertexId> path_vertices;
    int type1_count = 0;
    int vacate_count = 0;

    DfsCtx(const Btpg& g_, Algorithm a, int origin, StateStatus& st)
        : g(g_), algo(a), origin_id(origin), status(st), on_path(size_t(g_.index.total), 0) {}

    VertexId source_of(const DirectedEdgeRef& r) const {
        return r.reversed ? g.reverse[size_t(r.edge)].from : g.tpg.type2[size_t(r.edge)].from;
    }

    bool directed_is_pair(const DirectedEdgeRef& r) const {
        EdgeState s = g.state[size_t(r.edge)];
        return r.reversed ? (s == EdgeState::Paired || s == EdgeState::CandidateReversed)
                          : s == EdgeState::Paired;
    }

    // Cycle classification at origin. Returns true when the cycle rejects the
    // candidate (a reachable deadlock suspect).
    bool classify_cycle() const {
        bool all_type2 = type1_count == 0;
        if (all_type2 && int(edges.size()) > 2 && vacate_count == 0) return false;  // rotation
        if (algo == Algorithm::Optimized) {
            // Exempt if some pair edge on the cycle starts at v_j^n while the
            // cycle also contains v_i^n with i < j.
            for (const auto& r : edges) {
                if (!directed_is_pair(r)) continue;
                VertexId s = source_of(r);
                for (const auto& w : path_vertices)
                    if (w.agent == s.agent && w.index < s.index) return false;
            }
        }
        return true;
    }

    bool dfs(VertexId current) {
        int cid = g.index.id(current);
        if (cid == origin_id) return classify_cycle();
        if (on_path[size_t(cid)]) return false;
        on_path[size_t(cid)] = 1;
        path_vertices.push_back(current);

        bool found = false;
        // Type-1 successor (last vertex chains to the departure pseudo-vertex).
        if (current.index < g.tpg.path_len(current.agent)) {
            ++type1_count;
            found = dfs({current.agent, current.index + 1});
            --type1_count;
        }
        if (!found)
            for (int e : g.out_forward[size_t(cid)]) {
                if (g.state[size_t(e)] == EdgeState::CandidateReversed) continue;
                if (traverse(e, false)) {
                    found = true;
                    break;
                }
            }
        if (!found)
            for (int e : g.out_reverse[size_t(cid)]) {
                EdgeState s = g.state[size_t(e)];
                if (s != EdgeState::Paired && s != EdgeState::CandidateReversed) continue;
                if (traverse(e, true)) {
                    found = true;
                    break;
                }
            }

        path_vertices.pop_back();
        on_path[size_t(cid)] = 0;
        return found;
    }

    bool traverse(int e, bool reversed) {
        const Type2Edge& inst = reversed ? g.reverse[size_t(e)] : g.tpg.type2[size_t(e)];
        bool is_pair = directed_is_pair({e, reversed});
        bool is_vac = !reversed && g.tpg.is_vacate(g.tpg.type2[size_t(e)]);

        std::vector<int> undo;
        if (algo == Algorithm::Max) {
            if (is_pair) {
                VertexId eo = get_earliest_out_node(
                    g, g.group_of[size_t(e)],
                    reversed ? GroupDirection::Reverse : GroupDirection::Forward);
                if (!status[size_t(g.index.id(eo))]) return false;
            }
            // Stuck-position requirement: the head agent must be able to sit
            // just before the head. A head at index 0 has no such position.
            if (inst.to.index == 0) return false;
            if (!status[size_t(g.index.id({inst.to.agent, inst.to.index - 1}))]) return false;
            if (is_pair) undo = update_state_status(status, g, inst.to);
        }

        edges.push_back({e, reversed});
        if (is_vac) ++vacate_count;
        bool found = dfs(inst.to);
        if (is_vac) --vacate_count;
        edges.pop_back();
        for (int d : undo) status[size_t(d)] = 1;
        return found;
    }
};

}  // namespace

bool deadlock_cycle_detection(const Btpg& g, VertexId current, VertexId origin,
                              const std::vector<DirectedEdgeRef>& visited, StateStatus& status,
                              Algorithm algorithm) {
    DfsCtx ctx(g, algorithm, g.index.id(origin), status);
    ctx.edges = visited;
    ctx.path_vertices.push_back(origin);
    return ctx.dfs(current);
}

namespace {

std::string vertex_name(VertexId v) {
    return std::to_string(v.agent) + "." + std::to_string(v.index);
}

std::string edge_name(const Type2Edge& e) {
    return vertex_name(e.from) + "->" + vertex_name(e.to);
}

std::string unit_name(const Btpg& g, int gid) {
    const auto& members = g.groups[size_t(gid)].edges;
    if (members.size() == 1) return edge_name(g.tpg.type2[size_t(members.front())]);
    return "g" + std::to_string(gid);
}

void set_unit_state(Btpg& g, int gid, EdgeState s) {
    for (int e : g.groups[size_t(gid)].edges) g.state[size_t(e)] = s;
}

// Checks every reversed edge of the (CandidateReversed) unit.
bool unit_reversal_safe(const Btpg& g, int gid, Algorithm algo) {
    for (int e : g.groups[size_t(gid)].edges) {
        StateStatus status = make_all_reachable(g);
        update_state_status(status, g, g.reverse[size_t(e)].to);
        if (deadlock_cycle_detection(g, g.reverse[size_t(e)].to, g.reverse[size_t(e)].from,
                                     {{e, true}}, status, algo))
            return false;
    }
    return true;
}

// Re-verifies every previously accepted unit against the current graph; each
// is re-checked under its original conditions (its own forward edges removed).
bool pairs_still_safe(Btpg& g, int except_gid, Algorithm algo) {
    for (int gid = 0; gid < int(g.groups.size()); ++gid) {
        if (gid == except_gid || !g.unit_is_paired(gid)) continue;
        set_unit_state(g, gid, EdgeState::CandidateReversed);
        bool ok = unit_reversal_safe(g, gid, algo);
        set_unit_state(g, gid, EdgeState::Paired);
        if (!ok) return false;
    }
    return true;
}

std::vector<int> unit_order_by_execution(const Btpg& g) {
    auto key = [&](int gid) {
        const auto& members = g.groups[size_t(gid)].edges;
        auto k = std::tuple{INT32_MAX, INT32_MAX, INT32_MAX};
        for (int e : members) {
            const auto& t2 = g.tpg.type2[size_t(e)];
            k = std::min(k, std::tuple{t2.arrive_t, t2.to.agent, t2.to.index});
        }
        return k;
    };
    std::vector<int> order(g.groups.size());
    for (int i = 0; i < int(order.size()); ++i) order[size_t(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
    return order;
}

}  // namespace

BuildResult build_btpg(const Tpg& tpg, const BuildOptions& opts) {
    if (opts.cutoff.count() <= 0) throw std::invalid_argument("cutoff must be positive");
    if (!check_acyclic(tpg)) throw TpgCycleError("build_btpg requires an acyclic TPG");

    BuildResult res;
    res.graph = Btpg::from_tpg(tpg, opts.grouping);
    Btpg& g = res.graph;

    SteadyBuildClock fallback;
    BuildClock* clock = opts.clock ? opts.clock : &fallback;

    auto emit = [&](const std::string& unit, const std::string& decision) {
        TraceRow row{clock->elapsed_ms(), unit, decision, g.pair_count()};
        res.trace.push_back(row);
        if (opts.observer) opts.observer(g, row);
    };

    const auto order = unit_order_by_execution(g);
    int pass = 1;
    bool out_of_time = false;
    while (true) {
        bool changed = false;
        for (int gid : order) {
            if (clock->elapsed_ms() >= opts.cutoff.count()) {
                emit("-", "cutoff");
                res.cutoff_hit = true;
                out_of_time = true;
                break;
            }
            if (g.unit_is_paired(gid)) continue;

            bool rev_ok = true;
            for (int e : g.groups[size_t(gid)].edges)
                if (!g.reversible[size_t(e)]) rev_ok = false;
            if (!rev_ok) {
                if (pass == 1) {
                    for (int e : g.groups[size_t(gid)].edges) g.checked_once[size_t(e)] = 1;
                    emit(unit_name(g, gid), "non_reversible");
                    clock->tick();
                }
                continue;
            }

            set_unit_state(g, gid, EdgeState::CandidateReversed);
            bool ok = unit_reversal_safe(g, gid, opts.algorithm);
            if (ok && pass >= 2) {
                // A later-pass conversion must not invalidate earlier pairs.
                set_unit_state(g, gid, EdgeState::Paired);
                ok = pairs_still_safe(g, gid, opts.algorithm);
                if (!ok) set_unit_state(g, gid, EdgeState::Normal);
            } else {
                set_unit_state(g, gid, ok ? EdgeState::Paired : EdgeState::Normal);
            }
            for (int e : g.groups[size_t(gid)].edges) g.checked_once[size_t(e)] = 1;
            if (ok) changed = true;
            emit(unit_name(g, gid), ok ? "converted" : "rejected");
            clock->tick();
        }
        if (out_of_time) break;
        emit("pass" + std::to_string(pass), "pass_end");
        if (pass == 1) res.pairs_after_first_pass = g.pair_count();
        if (!opts.fixpoint || !changed) break;
        ++pass;
    }
    if (res.pairs_after_first_pass == 0 && (out_of_time || pass == 1))
        res.pairs_after_first_pass = g.pair_count();
    res.passes = pass;
    assert(g.partition_valid());
    return res;
}

std::vector<int> audit_local_maximality(const Btpg& g0, Algorithm algorithm) {
    Btpg g = g0;
    std::vector<int> convertible;
    for (int gid : unit_order_by_execution(g)) {
        if (g.unit_is_paired(gid)) continue;
        bool rev_ok = true;
        for (int e : g.groups[size_t(gid)].edges)
            if (!g.reversible[size_t(e)]) rev_ok = false;
        if (!rev_ok) continue;

        set_unit_state(g, gid, EdgeState::CandidateReversed);
        bool ok = unit_reversal_safe(g, gid, algorithm);
        if (ok) {
            set_unit_state(g, gid, EdgeState::Paired);
            ok = pairs_still_safe(g, gid, algorithm);
        }
        set_unit_state(g, gid, EdgeState::Normal);
        if (ok)
            for (int e : g.groups[size_t(gid)].edges) convertible.push_back(e);
    }
    std::sort(convertible.begin(), convertible.end());
    return convertible;
}

std::string serialize_btpg(const Btpg& g) {
    std::string out = serialize_tpg(g.tpg);
    for (int e = 0; e < g.edge_count(); ++e) {
        if (!g.is_paired(e)) continue;
        out += "PAIR " + edge_name(g.tpg.type2[size_t(e)]) + " | " +
               edge_name(g.reverse[size_t(e)]) + "\n";
    }
    for (int gid = 0; gid < int(g.groups.size()); ++gid) {
        const auto& grp = g.groups[size_t(gid)];
        if (grp.edges.size() < 2) continue;
        out += "GROUP " + std::to_string(gid);
        out += grp.kind == GroupKind::Following ? " following" : " opposing";
        out += g.unit_is_paired(gid) ? " paired" : " normal";
        for (int e : grp.edges) out += " " + edge_name(g.tpg.type2[size_t(e)]);
        out += "\n";
    }
    return out;
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
    std::string out = "elapsed_ms,unit_id,decision,cumulative_pairs\n";
    for (const auto& row : trace)
        out += std::to_string(row.elapsed_ms) + "," + row.unit + "," + row.decision + "," +
               std::to_string(row.cumulative_pairs) + "\n";
    return out;
}

}  // namespace btpg
