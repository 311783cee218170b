#pragma once

// Sequential simulation of the certification protocol against device models
// that may depend on the whole public history. Standard mode follows the real
// protocol; modified mode additionally applies the Jordan-block projection and
// the Pauli twirl to every kept (non-test) round. Early-projection mode applies
// the projection to every round before the test flag is drawn.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "diec/chsh.hpp"
#include "diec/eat_rates.hpp"
#include "diec/quantum.hpp"
#include "diec/rng.hpp"

namespace diec::sim {

inline constexpr int kBot = -1;

enum class ProtocolMode { standard, modified, modified_early_projection };

const char* to_string(ProtocolMode mode) noexcept;
ProtocolMode parse_protocol_mode(const std::string& name);

/// What a device model may see of a past round (no block indices, no kept states).
struct PublicRound {
  int t = 0;
  int x = kBot;
  int y = kBot;
  int a = kBot;
  int b = kBot;
  int w = kBot;
};

class DeviceModel {
 public:
  virtual ~DeviceModel() = default;
  /// Source state and observables for round `index`, given every earlier public round.
  virtual std::shared_ptr<const chsh::Strategy> round(std::uint64_t index,
                                                      std::span<const PublicRound> history,
                                                      RandomStream& rng) const = 0;
  virtual std::string name() const = 0;
};

/// Same strategy every round.
std::shared_ptr<DeviceModel> honest_model(chsh::Strategy strategy);
/// Werner(xi) source with the optimal observables.
std::shared_ptr<DeviceModel> werner_model(double xi);
/// Werner source whose winning probability equals `omega` (in [1/2, (2+sqrt 2)/4]).
std::shared_ptr<DeviceModel> werner_model_for_omega(double omega);
/// Local deterministic answers a = answers_a[x], b = answers_b[y].
std::shared_ptr<DeviceModel> classical_model(std::array<int, 2> answers_a, std::array<int, 2> answers_b);
/// Plays `odd` in the round right after a test round and `even` otherwise.
std::shared_ptr<DeviceModel> memory_switcher_model(chsh::Strategy even, chsh::Strategy odd);
/// Werner source with xi(i) = min(1, xi0 + slope * i).
std::shared_ptr<DeviceModel> noisy_drift_model(double xi0, double slope);

struct ModelOptions {
  double xi = 0.0;
  double omega = 0.0;
  double slope = 0.0;
};

/// Built-in models by name; see model_names(). Unknown names throw a
/// ValidationError listing the available ones.
std::shared_ptr<DeviceModel> make_device_model(const std::string& name, const ModelOptions& options = {});
const std::vector<std::string>& model_names();

struct RoundRecord {
  int t = 0;
  int x = kBot;
  int y = kBot;
  int a = kBot;
  int b = kBot;
  int w = kBot;
  int c = kBot;
  int d = kBot;
  /// Twirled, block-projected state of a kept round (modified modes only).
  std::shared_ptr<const quantum::TwoQubitState> kept_state;
};

struct Transcript {
  std::vector<RoundRecord> rounds;
  eat::ProtocolParams params;
  ProtocolMode mode = ProtocolMode::standard;
  std::uint64_t seed = 0;
  std::string model;
  bool aborted = false;
  std::uint64_t win_count = 0;
  std::uint64_t test_count = 0;
};

struct RunOptions {
  /// When false only the counters are kept (rounds stays empty).
  bool keep_records = true;
};

Transcript run_protocol(const DeviceModel& model, const eat::ProtocolParams& params, ProtocolMode mode,
                        std::uint64_t seed, RunOptions options = {});

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval at 95% for `successes` out of `trials`.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials);

struct AbortEstimate {
  std::uint64_t trials = 0;
  std::uint64_t aborted = 0;
  double estimate = 0.0;
  Interval interval;
  /// Wins over test rounds, pooled across trials.
  double win_rate = 0.0;
};

/// Trial k runs with seed derive_seed(seed, k, trial).
AbortEstimate estimate_abort_probability(const DeviceModel& model, const eat::ProtocolParams& params,
                                         std::uint64_t trials, std::uint64_t seed,
                                         ProtocolMode mode = ProtocolMode::standard);

struct CellComparison {
  std::string label;
  std::uint64_t count_standard = 0;
  std::uint64_t count_modified = 0;
  double z = 0.0;
};

struct StatisticsEquivalenceReport {
  std::uint64_t trials = 0;
  std::uint64_t rounds_per_mode = 0;
  /// Standard vs modified under the same seeds: T, X, Y, A, B, W columns equal.
  bool classical_columns_identical = true;
  /// Standard vs early projection under independent seeds: the 17 cells
  /// (T=0 and T=1 x (x, y, a, b)) compared with a two-sample proportion test.
  std::vector<CellComparison> cells;
  double max_abs_z = 0.0;
  AbortEstimate abort_standard;
  AbortEstimate abort_modified;
  bool abort_intervals_overlap = true;
  bool passed = true;
};

StatisticsEquivalenceReport check_statistics_equivalence(const DeviceModel& model,
                                                         const eat::ProtocolParams& params,
                                                         std::uint64_t trials, std::uint64_t seed);

struct BlockPairSummary {
  int c = 0;
  int d = 0;
  std::uint64_t count = 0;
  quantum::BellDiagonalSpectrum first_spectrum;
  /// Largest entrywise distance of any spectrum in this cell from the first one.
  double spectrum_spread = 0.0;
};

struct KeptStateReport {
  std::uint64_t kept_rounds = 0;
  double max_off_diagonal = 0.0;
  std::vector<BlockPairSummary> block_pairs;
  /// Homogeneity of the (c, d) frequencies between the two halves of the run.
  double chi_square = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
  bool passed = true;
};

/// Requires a modified-mode transcript with records.
KeptStateReport check_kept_state_structure(const Transcript& transcript);

/// Comment header with params and seed, then "i,t,x,y,a,b,w,c,d" rows; ⊥ is an empty field.
void write_transcript(std::ostream& out, const Transcript& transcript);

}  // namespace diec::sim
