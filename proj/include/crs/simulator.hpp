#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "crs/queueing.hpp"
#include "crs/scenario.hpp"
#include "crs/spatial.hpp"
#include "crs/stats.hpp"

namespace crs {

enum class SimMode { Link, Spatial };

std::string_view to_string(SimMode m);
SimMode parse_sim_mode(std::string_view name);

inline constexpr std::size_t kBatches = 8;

// Event bits of one slot.
enum SlotEvent : unsigned {
  kArrival = 1u,
  kDirectDelivery = 2u,  // BL: source -> destination
  kRelayTransfer = 4u,   // source -> relay
  kRelayDelivery = 8u,   // relay -> destination
};

struct SlotRecord {
  std::uint64_t slot = 0;
  std::size_t q_s = 0;  // end of slot
  std::size_t q_r = 0;
  unsigned events = 0;
  // Arrival slot of the packet delivered in this slot, or -1.
  std::int64_t delivered_tag = -1;
};

using SlotObserver = std::function<void(const SlotRecord&)>;

struct SimConfig {
  ProtocolSpec protocol = ProtocolSpec::bdf();
  LinkRates rates;  // lambda always; success probabilities in LINK mode
  SimMode mode = SimMode::Link;
  std::optional<Scenario> scenario;  // required in SPATIAL mode
  CountModel count_model = CountModel::Poisson;
  std::uint64_t horizon = 1'000'000;
  std::optional<std::uint64_t> warmup;  // default: 10 % of horizon
  std::uint64_t seed = 42;
  unsigned replications = 1;
  unsigned workers = 1;
  // Either queue exceeding this aborts the replication as unstable.
  std::size_t queue_cap = std::size_t{1} << 20;
  // Called for every slot of replication 0.
  SlotObserver observer;

  std::uint64_t effective_warmup() const { return warmup ? *warmup : horizon / 10; }
};

void validate(const SimConfig& c);

struct BatchStats {
  double sum_qs = 0.0;
  double sum_qr = 0.0;
  std::uint64_t slots = 0;
  std::uint64_t delivered = 0;
  double delay_sum = 0.0;
};

struct ReplicationResult {
  std::uint64_t seed = 0;
  std::uint64_t slots_simulated = 0;
  double mean_qs = 0.0;
  double mean_qr = 0.0;
  double delay_little = 0.0;   // (mean_qs + mean_qr) / lambda
  double delay_packets = 0.0;  // mean of per-packet delays delivered after warmup
  double throughput = 0.0;     // deliveries per post-warmup slot
  std::uint64_t arrivals = 0;
  std::uint64_t delivered = 0;
  // Fraction of all slots in which each hop would have succeeded.
  double success_sd = 0.0, success_sr = 0.0, success_rd = 0.0;
  std::array<BatchStats, kBatches> batches{};
  bool capped = false;
  StabilityVerdict verdict = StabilityVerdict::Inconclusive;
};

struct SimReport {
  ProtocolSpec protocol;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t slots_simulated = 0;
  double mean_qs = 0.0, mean_qr = 0.0;
  double delay_little = 0.0, delay_packets = 0.0;
  double throughput = 0.0;
  // 95 % half-widths: across replications, or across batches for one replication.
  double ci_qs = 0.0, ci_qr = 0.0;
  double ci_delay_little = 0.0, ci_delay_packets = 0.0;
  double ci_throughput = 0.0;
  double success_sd = 0.0, success_sr = 0.0, success_rd = 0.0;
  StabilityVerdict verdict = StabilityVerdict::Inconclusive;
  std::vector<ReplicationResult> replications;
};

// Runs every replication and aggregates them in replication-index order.
SimReport run(const SimConfig& config);

// One replication; exposed for tests.
ReplicationResult run_replication(const SimConfig& config, unsigned index);

struct StabilityScan {
  std::vector<double> lambdas;
  std::vector<StabilityVerdict> verdicts;
  std::optional<double> largest_stable;     // below smallest_unstable
  std::optional<double> smallest_unstable;
  bool one_sided() const { return !largest_stable || !smallest_unstable; }
  bool contains(double x) const {
    return largest_stable && smallest_unstable && *largest_stable <= x && x <= *smallest_unstable;
  }
};

StabilityScan estimate_stability(const SimConfig& base, const std::vector<double>& lambda_grid);

// Observer writing "slot,Q_S,Q_R,event" lines; the header is written here.
SlotObserver make_trace_writer(std::ostream& out);

}  // namespace crs
