#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include "mesched/core.hpp"
#include "mesched/decision.hpp"
#include "mesched/errors.hpp"
#include "mesched/objectives.hpp"

namespace mesched {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Gossip state
// ---------------------------------------------------------------------------

struct RevisionedSelection {
    std::shared_ptr<const AgentSelection> selection;
    std::uint64_t revision = 0;
};

// A complete assignment of one schedule per agent per carrier, with its
// coalition utility.
struct CandidateSolution {
    std::map<AgentId, std::shared_ptr<const AgentSelection>> selections;
    double utility = kNegInf;

    bool empty() const { return selections.empty(); }

    // Sorted agent-id list; the deterministic tie-break key for equal-utility
    // candidates.
    std::vector<AgentId> fingerprint() const {
        std::vector<AgentId> ids;
        ids.reserve(selections.size());
        for (const auto& [id, _] : selections) ids.push_back(id);
        return ids;  // std::map keys are already sorted
    }

    ClusterSchedule cluster() const {
        ClusterSchedule c;
        for (const auto& [_, sel] : selections)
            for (Carrier carrier : kCarriers)
                for (std::size_t i = 0; i < kSlotCount; ++i)
                    c.sums[carrier][i] += sel->schedules[carrier][i];
        return c;
    }
};

struct WorkingMemory {
    AgentId own_id = -1;
    TargetSchedules targets;
    std::map<AgentId, RevisionedSelection> known;
    CandidateSolution best;

    const AgentSelection* own_selection() const {
        auto it = known.find(own_id);
        return it == known.end() ? nullptr : it->second.selection.get();
    }
};

struct NegotiationMessage {
    AgentId sender_id = -1;
    std::map<AgentId, RevisionedSelection> known_selections;
    CandidateSolution best_candidate;
};

struct Topology {
    std::map<AgentId, std::vector<AgentId>> adjacency;

    static Topology complete(const std::vector<AgentId>& ids) {
        Topology t;
        for (AgentId a : ids) {
            auto& n = t.adjacency[a];
            for (AgentId b : ids)
                if (b != a) n.push_back(b);
        }
        return t;
    }

    static Topology ring(const std::vector<AgentId>& ids) {
        Topology t;
        const std::size_t n = ids.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (n == 1) {
                t.adjacency[ids[i]];
            } else if (n == 2) {
                t.adjacency[ids[i]].push_back(ids[(i + 1) % n]);
            } else {
                t.adjacency[ids[i]].push_back(ids[(i + n - 1) % n]);
                t.adjacency[ids[i]].push_back(ids[(i + 1) % n]);
            }
        }
        return t;
    }

    const std::vector<AgentId>& neighbors(AgentId id) const { return adjacency.at(id); }
};

// ---------------------------------------------------------------------------
// Perceive: merge a message into working memory. Selections win on higher
// revision, the best candidate on strictly higher utility (equal utility:
// lexicographically smaller fingerprint).
// ---------------------------------------------------------------------------

inline bool merge_best(CandidateSolution& local, const CandidateSolution& incoming) {
    if (incoming.empty()) return false;
    if (incoming.utility > local.utility) {
        local = incoming;
        return true;
    }
    if (incoming.utility == local.utility && incoming.fingerprint() < local.fingerprint()) {
        local = incoming;
        return true;
    }
    return false;
}

inline std::pair<WorkingMemory, bool> perceive(WorkingMemory memory,
                                               const NegotiationMessage& msg,
                                               bool validate = false) {
    if (msg.sender_id < 0 || msg.known_selections.find(msg.sender_id) == msg.known_selections.end())
        throw MalformedMessage("message lacks the sender's own selection");
    if (validate && !msg.best_candidate.empty()) {
        const double recomputed = total_utility(memory.targets, msg.best_candidate.cluster());
        if (std::abs(recomputed - msg.best_candidate.utility) > 1e-9)
            throw MalformedMessage("best candidate utility inconsistent with its selections");
    }
    bool changed = false;
    for (const auto& [id, rev_sel] : msg.known_selections) {
        auto it = memory.known.find(id);
        if (it == memory.known.end() || rev_sel.revision > it->second.revision) {
            memory.known[id] = rev_sel;
            changed = true;
        }
    }
    changed |= merge_best(memory.best, msg.best_candidate);
    return {std::move(memory), changed};
}

// ---------------------------------------------------------------------------
// Decide: build a candidate against the residual the rest of the cluster
// leaves open, accept iff the coalition utility strictly improves (first-ever
// candidate compares against -inf). When the candidate does not improve on
// the best known solution, the agent falls back to the schedule the best
// solution assigns to it, keeping selections and best candidate consistent.
// ---------------------------------------------------------------------------

struct AgentRuntime {
    AgentId id = -1;
    UnitState unit;
    AgentEconParams econ;
    Rng rng;
    WorkingMemory memory;
    std::uint64_t revision = 0;
    std::deque<NegotiationMessage> mailbox;
};

// Substitute the candidate for the agent's own schedule inside the best known
// solution and accept iff the total utility strictly improves (the first-ever
// comparison is against -inf).
inline DecisionOutcome accept_if_improved(const AgentSelection& candidate,
                                          WorkingMemory& memory) {
    CandidateSolution proposal;
    proposal.selections = memory.best.selections;
    proposal.selections[memory.own_id] =
        std::make_shared<const AgentSelection>(candidate);
    proposal.utility = total_utility(memory.targets, proposal.cluster());

    DecisionOutcome outcome;
    outcome.new_global_utility = proposal.utility;
    if (proposal.utility > memory.best.utility) {
        outcome.accepted = true;
        outcome.new_selection = candidate;
        memory.best = std::move(proposal);
    }
    return outcome;
}

// Full decide step. The candidate is fitted to the residual the best known
// solution leaves open once the agent's own contribution is removed, so the
// solution grows agent by agent and never inherits the kickoff over-supply.
// Returns (outcome, selection_changed); selection_changed also covers the
// fallback adoption of the best candidate's own schedule.
inline std::pair<DecisionOutcome, bool> decide(AgentRuntime& agent, int n_iterations) {
    WorkingMemory& mem = agent.memory;
    ClusterSchedule cluster;
    for (const auto& [id, sel] : mem.best.selections) {
        if (id == mem.own_id) continue;
        for (Carrier c : kCarriers)
            for (std::size_t i = 0; i < kSlotCount; ++i)
                cluster.sums[c][i] += sel->schedules[c][i];
    }
    const PerCarrier<Schedule> delta = residual(mem.targets, cluster);

    DecisionInputs inputs{delta, n_iterations};
    const AgentSelection candidate = build_candidate(agent.id, agent.unit, agent.econ,
                                                     inputs, agent.rng);
    DecisionOutcome outcome = accept_if_improved(candidate, mem);
    bool selection_changed = false;
    if (outcome.accepted) {
        mem.known[agent.id] = {std::make_shared<const AgentSelection>(candidate),
                               ++agent.revision};
        selection_changed = true;
    } else {
        // Align with the best known solution so that all selections converge
        // to it at termination.
        auto it = mem.best.selections.find(agent.id);
        if (it != mem.best.selections.end()) {
            const AgentSelection* own = mem.own_selection();
            if (own == nullptr || !(*own == *it->second)) {
                mem.known[agent.id] = {it->second, ++agent.revision};
                selection_changed = true;
            }
        }
    }
    return {outcome, selection_changed};
}

// ---------------------------------------------------------------------------
// Act: broadcast the full memory snapshot to every neighbor.
// ---------------------------------------------------------------------------

inline std::vector<NegotiationMessage> act(const WorkingMemory& memory,
                                           const Topology& topology) {
    std::vector<NegotiationMessage> out;
    for (AgentId neighbor : topology.neighbors(memory.own_id)) {
        (void)neighbor;
        NegotiationMessage msg;
        msg.sender_id = memory.own_id;
        msg.known_selections = memory.known;
        msg.best_candidate = memory.best;
        out.push_back(std::move(msg));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Runtime
// ---------------------------------------------------------------------------

enum class ExecutionMode { SimulatedRounds, Concurrent };

struct NegotiationParams {
    ExecutionMode mode = ExecutionMode::SimulatedRounds;
    int max_cycles = 500;
    int n_iterations = 32;
    double r_ms = 10.0;               // mailbox poll interval, concurrent mode
    std::size_t message_budget = 1'000'000;
    bool validate_messages = false;
};

struct TraceRow {
    int cycle = 0;
    double best_utility_total = kNegInf;
    double best_utility_electric = kNegInf;
    double best_utility_heat = kNegInf;
    std::size_t messages_sent = 0;
    AgentId accepting_agent = -1;  // last accepting agent of the cycle, -1 if none
};

using NegotiationTrace = std::vector<TraceRow>;

struct RuntimeState {
    bool messages_pending = false;
    bool accepted_last_pass = false;
};

inline bool detect_termination(const RuntimeState& state) {
    return !state.messages_pending && !state.accepted_last_pass;
}

struct NegotiationResult {
    ClusterSchedule cluster;          // cluster of the globally best candidate
    CandidateSolution best;
    NegotiationTrace trace;
    bool converged = false;
    int cycles = 0;
    std::size_t messages_total = 0;
    std::vector<WorkingMemory> final_memories;
};

namespace detail {

inline TraceRow trace_row(int cycle, const std::vector<AgentRuntime>& agents,
                          std::size_t messages, AgentId accepting) {
    TraceRow row;
    row.cycle = cycle;
    row.messages_sent = messages;
    row.accepting_agent = accepting;
    const WorkingMemory* best_mem = nullptr;
    for (const AgentRuntime& a : agents)
        if (!best_mem || a.memory.best.utility > best_mem->best.utility) best_mem = &a.memory;
    if (best_mem && !best_mem->best.empty()) {
        const ClusterSchedule c = best_mem->best.cluster();
        row.best_utility_total = best_mem->best.utility;
        row.best_utility_electric = carrier_utility(best_mem->targets.electric, c.sums.electric);
        row.best_utility_heat = carrier_utility(best_mem->targets.heat, c.sums.heat);
    }
    return row;
}

}  // namespace detail

// Deterministic rounds: agents are processed in id order each cycle; messages
// are delivered immediately, so later agents in the pass already see earlier
// decisions of the same cycle.
inline NegotiationResult run_rounds(std::vector<AgentRuntime>& agents,
                                    const Topology& topology,
                                    const NegotiationParams& params) {
    NegotiationResult result;
    std::map<AgentId, std::size_t> index;
    for (std::size_t i = 0; i < agents.size(); ++i) index[agents[i].id] = i;

    auto broadcast = [&](const AgentRuntime& sender) -> std::size_t {
        std::vector<NegotiationMessage> msgs = act(sender.memory, topology);
        const std::vector<AgentId>& nbs = topology.neighbors(sender.id);
        for (std::size_t k = 0; k < msgs.size(); ++k)
            agents[index.at(nbs[k])].mailbox.push_back(std::move(msgs[k]));
        return nbs.size();
    };

    // Kickoff: every agent makes a first decision on its own knowledge.
    std::size_t cycle_msgs = 0;
    AgentId accepting = -1;
    for (AgentRuntime& agent : agents) {
        auto [outcome, changed] = decide(agent, params.n_iterations);
        if (changed) {
            cycle_msgs += broadcast(agent);
            if (outcome.accepted) accepting = agent.id;
        }
    }
    result.messages_total += cycle_msgs;
    result.trace.push_back(detail::trace_row(0, agents, cycle_msgs, accepting));

    for (int cycle = 1; cycle <= params.max_cycles; ++cycle) {
        cycle_msgs = 0;
        accepting = -1;
        bool any_accept = false;
        for (AgentRuntime& agent : agents) {
            if (agent.mailbox.empty()) continue;
            bool changed = false;
            while (!agent.mailbox.empty()) {
                NegotiationMessage msg = std::move(agent.mailbox.front());
                agent.mailbox.pop_front();
                try {
                    auto [mem, c] = perceive(std::move(agent.memory), msg,
                                             params.validate_messages);
                    agent.memory = std::move(mem);
                    changed |= c;
                } catch (const MalformedMessage&) {
                    // dropped
                }
            }
            if (!changed) continue;
            auto [outcome, selection_changed] = decide(agent, params.n_iterations);
            if (selection_changed) {
                cycle_msgs += broadcast(agent);
                if (outcome.accepted) {
                    any_accept = true;
                    accepting = agent.id;
                }
            }
        }
        result.messages_total += cycle_msgs;
        result.trace.push_back(detail::trace_row(cycle, agents, cycle_msgs, accepting));
        result.cycles = cycle;

        RuntimeState state;
        for (const AgentRuntime& a : agents)
            state.messages_pending |= !a.mailbox.empty();
        state.accepted_last_pass = any_accept;
        if (detect_termination(state)) {
            result.converged = true;
            break;
        }
        if (result.messages_total > params.message_budget) break;
    }

    for (const AgentRuntime& a : agents) {
        if (!a.memory.best.empty() && a.memory.best.utility > result.best.utility)
            result.best = a.memory.best;
        result.final_memories.push_back(a.memory);
    }
    result.cluster = result.best.cluster();
    return result;
}

// Concurrent mode: one thread per agent polling its mailbox every r ms;
// terminates after a quiescence window of 3*r ms with no messages in flight
// and no new acceptances.
inline NegotiationResult run_concurrent(std::vector<AgentRuntime>& agents,
                                        const Topology& topology,
                                        const NegotiationParams& params) {
    struct SharedMailbox {
        std::mutex mutex;
        std::deque<NegotiationMessage> queue;
    };
    std::map<AgentId, std::size_t> index;
    for (std::size_t i = 0; i < agents.size(); ++i) index[agents[i].id] = i;
    std::vector<SharedMailbox> mailboxes(agents.size());

    std::atomic<bool> stop{false};
    std::atomic<std::size_t> in_flight{0};
    std::atomic<std::size_t> messages_total{0};
    std::atomic<std::int64_t> last_activity_ms{0};
    const auto start = std::chrono::steady_clock::now();
    auto now_ms = [&] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
            .count();
    };
    last_activity_ms = now_ms();

    auto agent_loop = [&](std::size_t idx) {
        AgentRuntime& agent = agents[idx];
        auto send_all = [&] {
            std::vector<NegotiationMessage> msgs = act(agent.memory, topology);
            const std::vector<AgentId>& nbs = topology.neighbors(agent.id);
            for (std::size_t k = 0; k < msgs.size(); ++k) {
                SharedMailbox& box = mailboxes[index.at(nbs[k])];
                std::lock_guard<std::mutex> lock(box.mutex);
                box.queue.push_back(std::move(msgs[k]));
                ++in_flight;
            }
            messages_total += nbs.size();
            last_activity_ms = now_ms();
        };

        {
            auto [outcome, changed] = decide(agent, params.n_iterations);
            if (changed) send_all();
        }
        while (!stop.load(std::memory_order_relaxed)) {
            std::deque<NegotiationMessage> batch;
            {
                SharedMailbox& box = mailboxes[idx];
                std::lock_guard<std::mutex> lock(box.mutex);
                batch.swap(box.queue);
            }
            if (batch.empty()) {
                std::this_thread::sleep_for(
                    std::chrono::duration<double, std::milli>(params.r_ms));
                continue;
            }
            bool changed = false;
            for (NegotiationMessage& msg : batch) {
                --in_flight;
                try {
                    auto [mem, c] = perceive(std::move(agent.memory), msg,
                                             params.validate_messages);
                    agent.memory = std::move(mem);
                    changed |= c;
                } catch (const MalformedMessage&) {
                }
            }
            last_activity_ms = now_ms();
            if (!changed) continue;
            auto [outcome, selection_changed] = decide(agent, params.n_iterations);
            if (selection_changed) send_all();
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) threads.emplace_back(agent_loop, i);

    const double quiet_ms = 3.0 * params.r_ms;
    const double deadline_ms = params.max_cycles * std::max(params.r_ms, 1.0) * 10.0;
    NegotiationResult result;
    for (;;) {
        std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(params.r_ms));
        const auto t = now_ms();
        if (in_flight.load() == 0 && t - last_activity_ms.load() >= quiet_ms) {
            result.converged = true;
            break;
        }
        if (t > deadline_ms || messages_total.load() > params.message_budget) break;
    }
    stop = true;
    for (std::thread& t : threads) t.join();

    for (const AgentRuntime& a : agents) {
        if (!a.memory.best.empty() && a.memory.best.utility > result.best.utility)
            result.best = a.memory.best;
        result.final_memories.push_back(a.memory);
    }
    result.messages_total = messages_total.load();
    result.cluster = result.best.cluster();
    return result;
}

}  // namespace mesched
