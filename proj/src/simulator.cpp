#include "crs/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <ostream>
#include <string>

#include "crs/error.hpp"
#include "crs/link_model.hpp"
#include "crs/parallel.hpp"
#include "crs/rng.hpp"

namespace crs {

namespace {

// Per-slot success draw of one hop, either a Bernoulli coin or the spatial
// PU-field / fading model.
struct HopSampler {
  double p = 0.0;
  std::shared_ptr<const SpatialLinkSampler> spatial;

  bool draw(Rng& rng) const { return spatial ? spatial->success(rng) : rng.bernoulli(p); }
};

struct Hops {
  HopSampler sd, sr, rd;
};

Hops build_hops(const SimConfig& c) {
  Hops h;
  if (c.mode == SimMode::Link) {
    h.sd.p = c.rates.p_SD;
    h.sr.p = c.rates.p_SR;
    h.rd.p = c.rates.p_RD;
    return h;
  }
  const Scenario& s = *c.scenario;
  const DerivedConstants k = derive_constants(s);
  auto make = [&](LinkKind kind) {
    const Link link = make_link(s, kind);
    const double power = optimal_power(link, k, s.Pmax).watts;
    return std::make_shared<const SpatialLinkSampler>(s, link, power, c.count_model);
  };
  if (c.protocol.uses_relay()) {
    h.sr.spatial = make(LinkKind::SR);
    h.rd.spatial = make(LinkKind::RD);
  } else {
    h.sd.spatial = make(LinkKind::SD);
  }
  return h;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

ReplicationResult simulate(const SimConfig& c, const Hops& hops, unsigned index) {
  ReplicationResult r;
  r.seed = substream_seed(c.seed, index);
  Rng rng(r.seed);

  const bool relay = c.protocol.uses_relay();
  const std::size_t relay_cap = c.protocol.relay_capacity().value_or(std::numeric_limits<std::size_t>::max());
  const double lambda = c.rates.lambda;
  const std::uint64_t warmup = c.effective_warmup();
  const std::uint64_t post = c.horizon - warmup;
  const SlotObserver* observer = (index == 0 && c.observer) ? &c.observer : nullptr;

  std::deque<std::uint64_t> qs;  // arrival slots, FIFO
  std::deque<std::uint64_t> qr;
  std::uint64_t n_sd = 0, n_sr = 0, n_rd = 0;

  std::uint64_t t = 0;
  for (; t < c.horizon; ++t) {
    SlotRecord rec;
    rec.slot = t;
    std::int64_t delivered_tag = -1;

    if (!relay) {
      const bool sd = hops.sd.draw(rng);
      n_sd += sd;
      if (!qs.empty() && sd) {
        delivered_tag = static_cast<std::int64_t>(qs.front());
        qs.pop_front();
        rec.events |= kDirectDelivery;
      }
    } else {
      const bool sr = hops.sr.draw(rng);
      const bool rd = hops.rd.draw(rng);
      n_sr += sr;
      n_rd += rd;
      // The relay transmits only when its hop would succeed; otherwise the
      // slot is free for the source (half duplex: never both).
      if (!qr.empty() && rd) {
        delivered_tag = static_cast<std::int64_t>(qr.front());
        qr.pop_front();
        rec.events |= kRelayDelivery;
      } else if (qr.size() < relay_cap && !qs.empty() && sr) {
        qr.push_back(qs.front());
        qs.pop_front();
        rec.events |= kRelayTransfer;
      }
    }

    // Arrivals land at the end of the slot.
    if (rng.bernoulli(lambda)) {
      qs.push_back(t);
      rec.events |= kArrival;
      if (t >= warmup) ++r.arrivals;
    }

    if (t >= warmup) {
      const std::size_t b = std::min<std::size_t>(kBatches - 1, (t - warmup) * kBatches / post);
      BatchStats& batch = r.batches[b];
      batch.sum_qs += static_cast<double>(qs.size());
      batch.sum_qr += static_cast<double>(qr.size());
      ++batch.slots;
      if (delivered_tag >= 0) {
        ++batch.delivered;
        batch.delay_sum += static_cast<double>(t - static_cast<std::uint64_t>(delivered_tag));
      }
    }

    if (observer) {
      rec.q_s = qs.size();
      rec.q_r = qr.size();
      rec.delivered_tag = delivered_tag;
      (*observer)(rec);
    }

    if (qs.size() > c.queue_cap || qr.size() > c.queue_cap) {
      r.capped = true;
      ++t;
      break;
    }
  }
  r.slots_simulated = t;

  double sum_qs = 0.0, sum_qr = 0.0, delay_sum = 0.0;
  std::uint64_t slots = 0;
  for (const BatchStats& b : r.batches) {
    sum_qs += b.sum_qs;
    sum_qr += b.sum_qr;
    slots += b.slots;
    r.delivered += b.delivered;
    delay_sum += b.delay_sum;
  }
  const double sd = static_cast<double>(slots);
  r.mean_qs = slots ? sum_qs / sd : nan();
  r.mean_qr = slots ? sum_qr / sd : nan();
  r.delay_little = lambda > 0.0 ? (r.mean_qs + r.mean_qr) / lambda : nan();
  r.delay_packets = r.delivered ? delay_sum / static_cast<double>(r.delivered) : nan();
  r.throughput = slots ? static_cast<double>(r.delivered) / sd : nan();
  const double all = static_cast<double>(r.slots_simulated);
  r.success_sd = static_cast<double>(n_sd) / all;
  r.success_sr = static_cast<double>(n_sr) / all;
  r.success_rd = static_cast<double>(n_rd) / all;

  if (r.capped) {
    r.verdict = StabilityVerdict::Unstable;
  } else {
    std::array<double, kBatches> bqs{}, bqr{};
    for (std::size_t i = 0; i < kBatches; ++i) {
      bqs[i] = r.batches[i].sum_qs / static_cast<double>(r.batches[i].slots);
      bqr[i] = r.batches[i].sum_qr / static_cast<double>(r.batches[i].slots);
    }
    r.verdict = worst(drift_verdict(bqs), drift_verdict(bqr));
  }
  return r;
}

template <class Get>
MeanCi across(const std::vector<ReplicationResult>& reps, Get get) {
  std::vector<double> v;
  v.reserve(reps.size());
  for (const auto& r : reps) v.push_back(get(r));
  return mean_ci95(v);
}

template <class Get>
MeanCi across_batches(const ReplicationResult& r, Get get) {
  std::vector<double> v;
  for (const BatchStats& b : r.batches) v.push_back(get(b));
  return mean_ci95(v);
}

}  // namespace

std::string_view to_string(SimMode m) { return m == SimMode::Link ? "LINK" : "SPATIAL"; }

SimMode parse_sim_mode(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "LINK") return SimMode::Link;
  if (up == "SPATIAL") return SimMode::Spatial;
  throw ParameterError("mode", "unknown simulation mode '" + std::string(name) + "'");
}

void validate(const SimConfig& c) {
  validate(c.rates);
  if (c.replications < 1) throw ParameterError("replications", "must be >= 1");
  if (c.horizon == 0) throw ParameterError("horizon", "must be positive");
  if (c.effective_warmup() >= c.horizon) throw ParameterError("warmup", "must be smaller than horizon");
  if (c.horizon - c.effective_warmup() < kBatches)
    throw ParameterError("horizon", "needs at least " + std::to_string(kBatches) + " post-warmup slots");
  if (c.protocol.kind == ProtocolKind::GeneralL && (!c.protocol.buffer || *c.protocol.buffer < 1))
    throw ParameterError("L", "GENERAL_L needs a relay buffer of at least one packet");
  if (c.mode == SimMode::Spatial) {
    if (!c.scenario) throw ConfigError("SPATIAL mode requires a full scenario");
    validate(*c.scenario);
  }
}

ReplicationResult run_replication(const SimConfig& config, unsigned index) {
  validate(config);
  return simulate(config, build_hops(config), index);
}

SimReport run(const SimConfig& config) {
  validate(config);
  const Hops hops = build_hops(config);

  SimReport rep;
  rep.protocol = config.protocol;
  rep.lambda = config.rates.lambda;
  rep.seed = config.seed;
  rep.replications.resize(config.replications);
  parallel_for(config.replications, config.workers,
               [&](std::size_t i) { rep.replications[i] = simulate(config, hops, static_cast<unsigned>(i)); });

  const auto& reps = rep.replications;
  for (const auto& r : reps) rep.slots_simulated += r.slots_simulated;

  auto fill = [](double& mean, double& ci, const MeanCi& m) {
    mean = m.mean;
    ci = m.half_width;
  };
  const double lambda = config.rates.lambda;
  if (reps.size() >= 2) {
    fill(rep.mean_qs, rep.ci_qs, across(reps, [](const auto& r) { return r.mean_qs; }));
    fill(rep.mean_qr, rep.ci_qr, across(reps, [](const auto& r) { return r.mean_qr; }));
    fill(rep.delay_little, rep.ci_delay_little, across(reps, [](const auto& r) { return r.delay_little; }));
    fill(rep.delay_packets, rep.ci_delay_packets, across(reps, [](const auto& r) { return r.delay_packets; }));
    fill(rep.throughput, rep.ci_throughput, across(reps, [](const auto& r) { return r.throughput; }));
  } else {
    const ReplicationResult& r = reps.front();
    const auto per_slot = [](double sum, const BatchStats& b) { return sum / static_cast<double>(b.slots); };
    rep.mean_qs = r.mean_qs;
    rep.mean_qr = r.mean_qr;
    rep.delay_little = r.delay_little;
    rep.delay_packets = r.delay_packets;
    rep.throughput = r.throughput;
    rep.ci_qs = across_batches(r, [&](const BatchStats& b) { return per_slot(b.sum_qs, b); }).half_width;
    rep.ci_qr = across_batches(r, [&](const BatchStats& b) { return per_slot(b.sum_qr, b); }).half_width;
    rep.ci_delay_little =
        across_batches(r, [&](const BatchStats& b) { return per_slot(b.sum_qs + b.sum_qr, b) / lambda; }).half_width;
    rep.ci_delay_packets =
        across_batches(r, [](const BatchStats& b) { return b.delay_sum / static_cast<double>(b.delivered); })
            .half_width;
    rep.ci_throughput =
        across_batches(r, [](const BatchStats& b) { return static_cast<double>(b.delivered) / static_cast<double>(b.slots); })
            .half_width;
  }
  rep.success_sd = across(reps, [](const auto& r) { return r.success_sd; }).mean;
  rep.success_sr = across(reps, [](const auto& r) { return r.success_sr; }).mean;
  rep.success_rd = across(reps, [](const auto& r) { return r.success_rd; }).mean;

  bool capped = false;
  std::array<double, kBatches> bqs{}, bqr{};
  for (const auto& r : reps) {
    capped = capped || r.capped;
    for (std::size_t i = 0; i < kBatches; ++i) {
      const double n = static_cast<double>(r.batches[i].slots);
      bqs[i] += r.batches[i].sum_qs / n / static_cast<double>(reps.size());
      bqr[i] += r.batches[i].sum_qr / n / static_cast<double>(reps.size());
    }
  }
  rep.verdict = capped ? StabilityVerdict::Unstable : worst(drift_verdict(bqs), drift_verdict(bqr));
  return rep;
}

StabilityScan estimate_stability(const SimConfig& base, const std::vector<double>& lambda_grid) {
  StabilityScan scan;
  scan.lambdas = lambda_grid;
  std::sort(scan.lambdas.begin(), scan.lambdas.end());
  for (double lambda : scan.lambdas) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw ParameterError("lambda_grid", "grid must lie in (0, 1)");
    SimConfig c = base;
    c.observer = nullptr;
    c.rates.lambda = lambda;
    scan.verdicts.push_back(run(c).verdict);
  }
  for (std::size_t i = 0; i < scan.lambdas.size(); ++i) {
    if (scan.verdicts[i] == StabilityVerdict::Unstable) {
      scan.smallest_unstable = scan.lambdas[i];
      break;
    }
  }
  for (std::size_t i = 0; i < scan.lambdas.size(); ++i) {
    if (scan.smallest_unstable && scan.lambdas[i] >= *scan.smallest_unstable) break;
    if (scan.verdicts[i] == StabilityVerdict::Stable) scan.largest_stable = scan.lambdas[i];
  }
  return scan;
}

SlotObserver make_trace_writer(std::ostream& out) {
  out << "slot,Q_S,Q_R,event\n";
  return [&out](const SlotRecord& r) { out << r.slot << ',' << r.q_s << ',' << r.q_r << ',' << r.events << '\n'; };
}

}  // namespace crs
