#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nrlat/control_plane.hpp"
#include "nrlat/grid.hpp"
#include "nrlat/random.hpp"
#include "nrlat/scheme.hpp"

namespace nrlat {

/// Latency of one leg (UL, or one DL allocation). All terms in ticks;
/// total == sum of the components.
struct LatencyBreakdown {
    Direction direction = Direction::Uplink;
    Tick start = 0;   ///< When the leg began (packet generation for UL).
    Tick t_sch = 0;   ///< Dynamic scheduling signalling before the first transmission.
    Tick t_p_tx = 0;
    Tick t_fa = 0;
    Tick t_w = 0;
    Tick t_tt = 0;    ///< One copy: n_symbols × symbol duration.
    Tick t_p_rx = 0;
    Tick t_rep = 0;   ///< Extra (k-1) slots of k-repetitions.
    Tick t_retx_total = 0;
    int n_attempts = 0;
    Tick total = 0;

    Tick component_sum() const { return t_sch + t_p_tx + t_fa + t_w + t_tt + t_p_rx + t_rep + t_retx_total; }
    Tick end() const { return start + total; }
};

enum class Disposition { Pending, Delivered, Dropped, DeliveryFailed };
const char* to_string(Disposition d);

/// One data transmission: t_pkt = t_p_tx + t_fa + t_w + t_tt (+ t_rep) + t_p_rx.
struct PacketStep {
    Placement placement;
    Tick t_p_tx = 0;
    Tick t_fa = 0;
    Tick t_w = 0;
    Tick t_tt = 0;
    Tick t_rep = 0;
    Tick t_p_rx = 0;

    Tick total() const { return t_p_tx + t_fa + t_w + t_tt + t_rep + t_p_rx; }
};

/// Earliest transmission for a packet ready at `ready` (before t_p^tx).
/// nullopt if the last copy would end after `deadline`. Does not commit.
std::optional<PacketStep> find_packet_step(const SlotGrid& grid, Tick ready, int n_rb, int repetitions,
                                           const ProcessingTimes& proc, Tick deadline = kNever);

/// Decides whether receiver `receiver` fails attempt `attempt`.
using OutcomeFn = std::function<bool(int attempt, int receiver)>;

/// Shared-state handles for running a leg.
struct LegEnv {
    SlotGrid& grid;
    ControlPlane* control = nullptr;  ///< Required for dynamic scheduling and HARQ.
    const SchemeConfig& scheme;
    ProcessingTimes proc;
    double bler = 0.0;
    Rng& rng;
    const OutcomeFn* outcome = nullptr;  ///< Overrides BLER sampling when set.
};

struct LegSpec {
    std::uint64_t owner = 0;
    Direction direction = Direction::Uplink;
    Tick start = 0;
    int n_rb = 1;
    int receivers = 1;
    /// The last copy must end by this time or the packet is dropped.
    Tick deadline = kNever;
};

/// Step-wise evaluation of one leg. The leg suspends before each step that
/// touches shared state (DCI queue, grid), so a simulator can interleave legs
/// in time order.
class LegProcess {
  public:
    explicit LegProcess(const LegSpec& spec);

    /// Runs the leg up to its next shared-resource step at time `now`.
    /// Returns that step's time, or nullopt once the leg has finished.
    std::optional<Tick> advance(LegEnv& env, Tick now);

    bool finished() const { return stage_ == Stage::Done; }
    Disposition disposition() const { return disposition_; }
    const LatencyBreakdown& breakdown() const { return bd_; }
    const LegSpec& spec() const { return spec_; }
    const std::vector<Placement>& placements() const { return placements_; }
    Tick done_time() const { return done_; }
    /// True once a data transmission has started at or before `now`.
    bool transmitting(Tick now) const { return !placements_.empty() && placements_.front().start <= now; }
    std::int64_t rb_symbols() const;

    /// Cancels the leg as dropped unless its first copy started by `now`;
    /// reservations made for it are released. Also applies to a finished leg
    /// whose transmission still lies in the future.
    void abort(SlotGrid& grid, Tick now);

  private:
    enum class Stage { Start, Grant, Data, Done };

    std::optional<Tick> begin_sched(LegEnv& env);
    void finish(Disposition d);

    LegSpec spec_;
    Stage stage_ = Stage::Start;
    Disposition disposition_ = Disposition::Pending;
    LatencyBreakdown bd_;
    Tick cursor_ = 0;
    Tick data_ready_ = 0;
    Tick sched_acc_ = 0;
    Tick nack_acc_ = 0;
    int attempt_ = 0;
    std::vector<bool> pending_;
    std::vector<Placement> placements_;
    Tick done_ = 0;
};

/// Runs a leg to completion immediately (no interleaving).
LegProcess run_leg(const LegSpec& spec, LegEnv& env);

/// Configured Grant / SPS: t_sch = 0, t_pkt only.
LatencyBreakdown latency_semistatic(std::uint64_t owner, Direction direction, Tick ready, int n_rb, SlotGrid& grid,
                                    const ProcessingTimes& proc);

/// Dynamic scheduling: SR + grant (UL) or DCI (DL), then t_pkt.
LatencyBreakdown latency_dynamic(std::uint64_t owner, Direction direction, Tick ready, int n_rb, SlotGrid& grid,
                                 ControlPlane& control, const ProcessingTimes& proc, Rng& rng);

/// Adds the (k-1) extra slots of k-repetitions to a single-copy breakdown.
LatencyBreakdown apply_k_repetitions(LatencyBreakdown base, int k, Tick slot_ticks);

struct HarqResult {
    LatencyBreakdown breakdown;
    bool delivered = false;
    int n_retx = 0;
};

/// HARQ on top of an already transmitted first attempt `base`. Each failed
/// attempt (up to max_n) adds t_NACK + dynamic scheduling + t_pkt evaluated on
/// the live grid and DCI queue.
HarqResult apply_harq(const LatencyBreakdown& base, int n_rb, double bler, int max_n, Rng& rng, SlotGrid& grid,
                      ControlPlane& control, const ProcessingTimes& proc, const OutcomeFn* outcome = nullptr);

/// DL latency of a unicast packet: the largest of the M receiver legs.
Tick unicast_dl_latency(const std::vector<LatencyBreakdown>& per_receiver, int m);

/// Probability that at least one attempt succeeds.
double reliability_bound(double bler, const SchemeConfig& scheme);

/// Per-leg CSV log.
void write_breakdown_csv_header(std::ostream& os);
void write_breakdown_csv_row(std::ostream& os, std::uint64_t packet_id, const LatencyBreakdown& b, Disposition d);

}  // namespace nrlat
