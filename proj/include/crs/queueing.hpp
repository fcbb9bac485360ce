#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace crs {

enum class ProtocolKind { BL, SDF, BDF, GeneralL };

std::string_view to_string(ProtocolKind kind);
ProtocolKind parse_protocol_kind(std::string_view name);

// Which protocol runs and, for relay protocols, the relay buffer capacity.
struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::BL;
  std::optional<std::size_t> buffer;  // set only for GeneralL

  static ProtocolSpec bl() { return {ProtocolKind::BL, std::nullopt}; }
  static ProtocolSpec sdf() { return {ProtocolKind::SDF, std::nullopt}; }
  static ProtocolSpec bdf() { return {ProtocolKind::BDF, std::nullopt}; }
  static ProtocolSpec general(std::size_t L);

  bool uses_relay() const { return kind != ProtocolKind::BL; }
  // Relay capacity in packets; nullopt means unbounded.
  std::optional<std::size_t> relay_capacity() const;

  friend bool operator==(const ProtocolSpec&, const ProtocolSpec&) = default;
};

// Per-slot success probabilities and the Bernoulli arrival rate.
struct LinkRates {
  double p_SD = 0.0;
  double p_SR = 0.0;
  double p_RD = 0.0;
  double lambda = 0.0;

  friend bool operator==(const LinkRates&, const LinkRates&) = default;
};

void validate(const LinkRates& r);

// Stationary law of a discrete-time birth-death queue whose transition
// ratios are constant from state 1 upward:
//   q(0) = empty, q(n) = empty * head * ratio^{n-1} for 1 <= n <= cap.
class BirthDeathDistribution {
 public:
  BirthDeathDistribution() = default;
  BirthDeathDistribution(double empty, double head, double ratio, std::optional<std::size_t> cap)
      : empty_(empty), head_(head), ratio_(ratio), cap_(cap) {}

  static BirthDeathDistribution degenerate() { return {1.0, 0.0, 0.0, std::size_t{0}}; }

  double pmf(std::size_t n) const;
  double empty() const { return empty_; }
  double head() const { return head_; }
  double ratio() const { return ratio_; }
  std::optional<std::size_t> cap() const { return cap_; }
  // Probability of the top state; zero when unbounded.
  double full() const;
  // Sum of the pmf (analytic).
  double total_mass() const;
  // E[Q] from the geometric closed form.
  double mean() const;

 private:
  double empty_ = 1.0;
  double head_ = 0.0;
  double ratio_ = 0.0;
  std::optional<std::size_t> cap_ = std::size_t{0};
};

struct SteadyState {
  BirthDeathDistribution source;
  BirthDeathDistribution relay;

  double qS0() const { return source.empty(); }
  double qR0() const { return relay.empty(); }
  double qRL() const { return relay.full(); }
  double q_S(std::size_t n) const { return source.pmf(n); }
  double q_R(std::size_t k) const { return relay.pmf(k); }
  double mean_QS() const { return source.mean(); }
  double mean_QR() const { return relay.mean(); }
};

// Which side of the truth an analytical value sits on.
enum class Provenance {
  Exact,                 // BL: the source queue is an exact birth-death chain
  ApproxBound,           // SDF: upper bound on stability, lower bound on delay
  AsymptoticallyExact,   // BDF
  Approximate,           // general L: independence approximation
};

std::string_view to_string(Provenance p);

struct ProtocolAnalysis {
  ProtocolSpec protocol;
  double lambda = 0.0;
  double lambda_star = 0.0;  // packets / slot
  double delay = 0.0;        // slots
  SteadyState steady;
  Provenance provenance = Provenance::Exact;
};

struct SolverOptions {
  double tolerance = 1e-12;
  int max_iterations = 200;
};

// Stability region only; does not look at rates.lambda.
double bl_stability_region(const LinkRates& r);
double sdf_stability_region(const LinkRates& r);
double bdf_stability_region(const LinkRates& r);
double general_l_stability_region(const LinkRates& r, std::size_t L);
double stability_region(const ProtocolSpec& spec, const LinkRates& r);

// Each throws InstabilityError when rates.lambda is not inside the region.
ProtocolAnalysis bl_analysis(const LinkRates& r);
ProtocolAnalysis sdf_analysis(const LinkRates& r);
ProtocolAnalysis bdf_analysis(const LinkRates& r);
ProtocolAnalysis general_l_analysis(const LinkRates& r, std::size_t L, const SolverOptions& opts = {});
ProtocolAnalysis analyze(const ProtocolSpec& spec, const LinkRates& r);

// E[Q] = sum_n n q(n), summed term by term until the geometric remainder is
// below 1e-12 of the partial sum, then closed with that remainder.
// Throws InstabilityError for a divergent (unbounded, ratio >= 1) law.
double mean_from_distribution(const BirthDeathDistribution& d);

// (E[Q_S] + E[Q_R]) / lambda with both means summed from the distributions.
double little_delay(const ProtocolAnalysis& a);

}  // namespace crs
