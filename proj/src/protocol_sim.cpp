#include "diec/protocol_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <unordered_map>

#include <boost/math/distributions/chi_squared.hpp>

#include "diec/errors.hpp"

namespace diec::sim {

namespace {

using chsh::Strategy;
using quantum::Matrix;
using quantum::Matrix4;
using quantum::TwoQubitState;

constexpr double kWilsonZ = 1.959963984540054;
constexpr double kNegligibleBlockProbability = 1e-14;

class FixedModel final : public DeviceModel {
 public:
  FixedModel(std::string name, Strategy strategy)
      : name_(std::move(name)), strategy_(std::make_shared<const Strategy>(std::move(strategy))) {}
  std::shared_ptr<const Strategy> round(std::uint64_t, std::span<const PublicRound>,
                                        RandomStream&) const override {
    return strategy_;
  }
  std::string name() const override { return name_; }

 private:
  std::string name_;
  std::shared_ptr<const Strategy> strategy_;
};

class MemorySwitcher final : public DeviceModel {
 public:
  MemorySwitcher(Strategy even, Strategy odd)
      : even_(std::make_shared<const Strategy>(std::move(even))),
        odd_(std::make_shared<const Strategy>(std::move(odd))) {}
  std::shared_ptr<const Strategy> round(std::uint64_t, std::span<const PublicRound> history,
                                        RandomStream&) const override {
    return !history.empty() && history.back().t == 1 ? odd_ : even_;
  }
  std::string name() const override { return "memory-switcher"; }

 private:
  std::shared_ptr<const Strategy> even_;
  std::shared_ptr<const Strategy> odd_;
};

class NoisyDrift final : public DeviceModel {
 public:
  NoisyDrift(double xi0, double slope) : xi0_(xi0), slope_(slope) {}
  std::shared_ptr<const Strategy> round(std::uint64_t index, std::span<const PublicRound>,
                                        RandomStream&) const override {
    const double xi = std::min(1.0, xi0_ + slope_ * static_cast<double>(index));
    return std::make_shared<const Strategy>(
        chsh::optimal_strategy().with_state(quantum::werner_state(xi).matrix()));
  }
  std::string name() const override { return "noisy-drift"; }

 private:
  double xi0_;
  double slope_;
};

// Everything the simulator needs about one strategy, computed once.
struct Prepared {
  std::shared_ptr<const Strategy> strategy;
  chsh::OutcomeTable table{};
  bool has_blocks = false;
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> pair_prob;
  std::vector<std::shared_ptr<const TwoQubitState>> kept;
  std::vector<chsh::OutcomeTable> projected_tables;
};

void prepare_blocks(Prepared& p) {
  const Strategy& s = *p.strategy;
  const auto blocks_a = quantum::jordan_blocks(s.alice(0), s.alice(1));
  const auto blocks_b = quantum::jordan_blocks(s.bob(0), s.bob(1));
  double total = 0.0;
  for (int c = 0; c < static_cast<int>(blocks_a.size()); ++c)
    for (int d = 0; d < static_cast<int>(blocks_b.size()); ++d) {
      const Matrix iso = quantum::kron(blocks_a[c].isometry(), blocks_b[d].isometry());
      Matrix4 projected = iso.adjoint() * s.state() * iso;
      const double prob = std::max(projected.trace().real(), 0.0);
      p.pairs.emplace_back(c, d);
      if (prob < kNegligibleBlockProbability) {
        p.pair_prob.push_back(0.0);
        p.kept.emplace_back();
        p.projected_tables.emplace_back();
        continue;
      }
      projected /= prob;
      projected = 0.5 * (projected + projected.adjoint()).eval();
      const TwoQubitState state(projected);
      p.pair_prob.push_back(prob);
      total += prob;
      p.kept.push_back(std::make_shared<const TwoQubitState>(quantum::twirl(state)));
      const Strategy local(Matrix(projected),
                           {quantum::Observable(Matrix(blocks_a[c].obs0)),
                            quantum::Observable(Matrix(blocks_a[c].obs1))},
                           {quantum::Observable(Matrix(blocks_b[d].obs0)),
                            quantum::Observable(Matrix(blocks_b[d].obs1))});
      p.projected_tables.push_back(chsh::outcome_table(local));
    }
  if (!(total > 0.0)) throw VerificationError("block projection produced no probability mass");
  for (auto& q : p.pair_prob) q /= total;
  p.has_blocks = true;
}

// Index drawn from `probs` with uniform `u`; zero-probability entries are never returned.
template <class Range>
int sample_index(const Range& probs, double u) {
  double acc = 0.0;
  int last = 0;
  int k = 0;
  for (double q : probs) {
    if (q > 0.0) {
      acc += q;
      last = k;
      if (u < acc) return last;
    }
    ++k;
  }
  return last;
}

class PreparedCache {
 public:
  const Prepared& get(const std::shared_ptr<const Strategy>& s, bool need_blocks) {
    auto it = entries_.find(s.get());
    if (it == entries_.end()) {
      if (entries_.size() >= kCapacity) entries_.clear();
      Prepared p;
      p.strategy = s;
      p.table = chsh::outcome_table(*s);
      it = entries_.emplace(s.get(), std::move(p)).first;
    }
    if (need_blocks && !it->second.has_blocks) prepare_blocks(it->second);
    return it->second;
  }

 private:
  static constexpr std::size_t kCapacity = 64;
  std::unordered_map<const Strategy*, Prepared> entries_;
};

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_field(std::ostream& out, int v) {
  if (v != kBot) out << v;
}

std::uint64_t independent_seed(std::uint64_t seed, std::uint64_t k) {
  return derive_seed(seed ^ 0xA5A5A5A5A5A5A5A5ULL, k, static_cast<std::uint64_t>(StreamTag::trial));
}

}  // namespace

const char* to_string(ProtocolMode mode) noexcept {
  switch (mode) {
    case ProtocolMode::standard:
      return "standard";
    case ProtocolMode::modified:
      return "modified";
    case ProtocolMode::modified_early_projection:
      return "modified-early-projection";
  }
  return "standard";
}

ProtocolMode parse_protocol_mode(const std::string& name) {
  if (name == "standard") return ProtocolMode::standard;
  if (name == "modified") return ProtocolMode::modified;
  if (name == "modified-early-projection") return ProtocolMode::modified_early_projection;
  throw ValidationError("unknown protocol mode '" + name +
                        "' (expected standard, modified or modified-early-projection)");
}

std::shared_ptr<DeviceModel> honest_model(Strategy strategy) {
  return std::make_shared<FixedModel>("honest", std::move(strategy));
}

std::shared_ptr<DeviceModel> werner_model(double xi) {
  return std::make_shared<FixedModel>(
      "werner", chsh::optimal_strategy().with_state(quantum::werner_state(xi).matrix()));
}

std::shared_ptr<DeviceModel> werner_model_for_omega(double omega) {
  if (!(omega >= 0.5 && omega <= chsh::kMaxQuantumWinProbability + 1e-12))
    throw ValidationError("Werner device needs a winning probability in [1/2, (2+sqrt 2)/4]");
  const double xi = std::clamp(1.0 - (omega - 0.5) * 2.0 * std::numbers::sqrt2, 0.0, 1.0);
  return werner_model(xi);
}

std::shared_ptr<DeviceModel> classical_model(std::array<int, 2> answers_a, std::array<int, 2> answers_b) {
  return std::make_shared<FixedModel>("classical", chsh::deterministic_strategy(answers_a, answers_b));
}

std::shared_ptr<DeviceModel> memory_switcher_model(Strategy even, Strategy odd) {
  return std::make_shared<MemorySwitcher>(std::move(even), std::move(odd));
}

std::shared_ptr<DeviceModel> noisy_drift_model(double xi0, double slope) {
  if (!(xi0 >= 0.0 && xi0 <= 1.0)) throw ValidationError("initial noise must lie in [0, 1]");
  if (!(slope >= 0.0 && std::isfinite(slope))) throw ValidationError("noise slope must be non-negative");
  return std::make_shared<NoisyDrift>(xi0, slope);
}

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"honest",          "werner",      "threshold", "classical",
                                              "memory-switcher", "noisy-drift", "product"};
  return names;
}

std::shared_ptr<DeviceModel> make_device_model(const std::string& name, const ModelOptions& options) {
  if (name == "honest") return honest_model(chsh::optimal_strategy());
  if (name == "werner") return werner_model(options.xi);
  if (name == "threshold") return werner_model_for_omega(options.omega);
  if (name == "classical") return classical_model({0, 0}, {0, 0});
  if (name == "memory-switcher")
    return memory_switcher_model(chsh::optimal_strategy(), chsh::deterministic_strategy({0, 0}, {0, 0}));
  if (name == "noisy-drift") return noisy_drift_model(options.xi, options.slope);
  if (name == "product") {
    Matrix zero = Matrix::Zero(4, 4);
    zero(0, 0) = 1.0;
    const Strategy optimal = chsh::optimal_strategy();
    return std::make_shared<FixedModel>(
        "product", Strategy(std::move(zero), {optimal.alice(0), optimal.alice(1)}, {optimal.alice(0), optimal.alice(1)}));
  }
  std::string list;
  for (const auto& n : model_names()) list += (list.empty() ? "" : ", ") + n;
  throw ValidationError("unknown device model '" + name + "'; available: " + list);
}

Transcript run_protocol(const DeviceModel& model, const eat::ProtocolParams& params, ProtocolMode mode,
                        std::uint64_t seed, RunOptions options) {
  params.validate_for_simulation();
  Transcript tr;
  tr.params = params;
  tr.mode = mode;
  tr.seed = seed;
  tr.model = model.name();
  if (options.keep_records) tr.rounds.reserve(params.n);

  const bool blocks = mode != ProtocolMode::standard;
  PreparedCache cache;
  std::vector<PublicRound> history;
  history.reserve(params.n);

  for (std::uint64_t i = 0; i < params.n; ++i) {
    RandomStream device_rng(seed, i, StreamTag::device);
    const auto strategy = model.round(i, history, device_rng);
    if (!strategy) throw ValidationError("device model returned no strategy");
    const Prepared& prep = cache.get(strategy, blocks);

    RoundRecord rec;
    int pair = -1;
    if (mode == ProtocolMode::modified_early_projection)
      pair = sample_index(prep.pair_prob, RandomStream(seed, i, StreamTag::blocks).uniform());

    rec.t = RandomStream(seed, i, StreamTag::test_flag).bernoulli(params.gamma) ? 1 : 0;
    if (rec.t == 1) {
      RandomStream inputs(seed, i, StreamTag::inputs);
      rec.x = inputs.bit();
      rec.y = inputs.bit();
      const auto& table = pair >= 0 ? prep.projected_tables[pair] : prep.table;
      const int ab = sample_index(table[2 * rec.x + rec.y], RandomStream(seed, i, StreamTag::outcomes).uniform());
      rec.a = ab >> 1;
      rec.b = ab & 1;
      rec.w = (rec.a ^ rec.b) == (rec.x & rec.y) ? 1 : 0;
      ++tr.test_count;
      tr.win_count += static_cast<std::uint64_t>(rec.w);
    } else if (mode == ProtocolMode::modified) {
      pair = sample_index(prep.pair_prob, RandomStream(seed, i, StreamTag::blocks).uniform());
    }
    if (pair >= 0) {
      rec.c = prep.pairs[pair].first;
      rec.d = prep.pairs[pair].second;
      if (rec.t == 0) rec.kept_state = prep.kept[pair];
    }

    history.push_back({rec.t, rec.x, rec.y, rec.a, rec.b, rec.w});
    if (options.keep_records) tr.rounds.push_back(std::move(rec));
  }
  tr.aborted = static_cast<double>(tr.win_count) < params.threshold() * static_cast<double>(params.n);
  return tr;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  if (successes > trials) throw ValidationError("more successes than trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kWilsonZ * kWilsonZ;
  const double center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {successes == 0 ? 0.0 : std::max(0.0, center - half),
          successes == trials ? 1.0 : std::min(1.0, center + half)};
}

AbortEstimate estimate_abort_probability(const DeviceModel& model, const eat::ProtocolParams& params,
                                         std::uint64_t trials, std::uint64_t seed, ProtocolMode mode) {
  if (trials < 1) throw ValidationError("trials must be at least 1");
  AbortEstimate est;
  est.trials = trials;
  std::uint64_t wins = 0;
  std::uint64_t tests = 0;
  for (std::uint64_t k = 0; k < trials; ++k) {
    const auto tr = run_protocol(model, params, mode, derive_seed(seed, k, static_cast<std::uint64_t>(StreamTag::trial)),
                                 RunOptions{false});
    est.aborted += tr.aborted ? 1 : 0;
    wins += tr.win_count;
    tests += tr.test_count;
  }
  est.estimate = static_cast<double>(est.aborted) / static_cast<double>(trials);
  est.interval = wilson_interval(est.aborted, trials);
  est.win_rate = tests > 0 ? static_cast<double>(wins) / static_cast<double>(tests) : 0.0;
  return est;
}

StatisticsEquivalenceReport check_statistics_equivalence(const DeviceModel& model,
                                                         const eat::ProtocolParams& params,
                                                         std::uint64_t trials, std::uint64_t seed) {
  StatisticsEquivalenceReport rep;
  rep.trials = trials;
  if (trials == 0) return rep;

  std::array<std::uint64_t, 17> std_cells{};
  std::array<std::uint64_t, 17> mod_cells{};
  auto tally = [](const Transcript& tr, std::array<std::uint64_t, 17>& cells) {
    for (const auto& r : tr.rounds) {
      if (r.t == 0)
        ++cells[0];
      else
        ++cells[1 + 8 * r.x + 4 * r.y + 2 * r.a + r.b];
    }
  };
  std::uint64_t std_aborts = 0;
  std::uint64_t mod_aborts = 0;
  std::uint64_t std_wins = 0, std_tests = 0, mod_wins = 0, mod_tests = 0;

  for (std::uint64_t k = 0; k < trials; ++k) {
    const std::uint64_t s = derive_seed(seed, k, static_cast<std::uint64_t>(StreamTag::trial));
    const auto standard = run_protocol(model, params, ProtocolMode::standard, s);
    const auto modified = run_protocol(model, params, ProtocolMode::modified, s);
    for (std::size_t i = 0; i < standard.rounds.size(); ++i) {
      const auto& l = standard.rounds[i];
      const auto& r = modified.rounds[i];
      if (l.t != r.t || l.x != r.x || l.y != r.y || l.a != r.a || l.b != r.b || l.w != r.w)
        rep.classical_columns_identical = false;
    }
    if (standard.aborted != modified.aborted) rep.classical_columns_identical = false;

    const auto early = run_protocol(model, params, ProtocolMode::modified_early_projection, independent_seed(seed, k));
    tally(standard, std_cells);
    tally(early, mod_cells);
    std_aborts += standard.aborted ? 1 : 0;
    mod_aborts += early.aborted ? 1 : 0;
    std_wins += standard.win_count;
    std_tests += standard.test_count;
    mod_wins += early.win_count;
    mod_tests += early.test_count;
  }

  rep.rounds_per_mode = trials * params.n;
  const double n = static_cast<double>(rep.rounds_per_mode);
  for (int k = 0; k < 17; ++k) {
    CellComparison cell;
    if (k == 0) {
      cell.label = "t=0";
    } else {
      const int j = k - 1;
      cell.label = "t=1,x=" + std::to_string(j >> 3) + ",y=" + std::to_string((j >> 2) & 1) +
                   ",a=" + std::to_string((j >> 1) & 1) + ",b=" + std::to_string(j & 1);
    }
    cell.count_standard = std_cells[k];
    cell.count_modified = mod_cells[k];
    const double p1 = static_cast<double>(std_cells[k]) / n;
    const double p2 = static_cast<double>(mod_cells[k]) / n;
    const double pooled = 0.5 * (p1 + p2);
    const double se = std::sqrt(pooled * (1.0 - pooled) * 2.0 / n);
    cell.z = se > 0.0 ? (p1 - p2) / se : 0.0;
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(cell.z));
    rep.cells.push_back(std::move(cell));
  }

  auto summarize = [&](std::uint64_t aborts, std::uint64_t wins, std::uint64_t tests) {
    AbortEstimate e;
    e.trials = trials;
    e.aborted = aborts;
    e.estimate = static_cast<double>(aborts) / static_cast<double>(trials);
    e.interval = wilson_interval(aborts, trials);
    e.win_rate = tests > 0 ? static_cast<double>(wins) / static_cast<double>(tests) : 0.0;
    return e;
  };
  rep.abort_standard = summarize(std_aborts, std_wins, std_tests);
  rep.abort_modified = summarize(mod_aborts, mod_wins, mod_tests);
  rep.abort_intervals_overlap = rep.abort_standard.interval.lo <= rep.abort_modified.interval.hi &&
                                rep.abort_modified.interval.lo <= rep.abort_standard.interval.hi;
  rep.passed = rep.classical_columns_identical && rep.max_abs_z <= 3.0 && rep.abort_intervals_overlap;
  return rep;
}

KeptStateReport check_kept_state_structure(const Transcript& transcript) {
  if (transcript.mode == ProtocolMode::standard)
    throw ValidationError("kept-state structure needs a modified-mode transcript");
  if (transcript.rounds.size() != transcript.params.n)
    throw ValidationError("kept-state structure needs a transcript with round records");

  KeptStateReport rep;
  std::map<std::pair<int, int>, std::size_t> index;
  std::vector<std::array<std::uint64_t, 2>> halves;
  std::vector<const RoundRecord*> kept;
  for (const auto& r : transcript.rounds)
    if (r.t == 0 && r.kept_state) kept.push_back(&r);
  rep.kept_rounds = kept.size();

  for (std::size_t k = 0; k < kept.size(); ++k) {
    const RoundRecord& r = *kept[k];
    const double off = quantum::bell_off_diagonal(*r.kept_state);
    rep.max_off_diagonal = std::max(rep.max_off_diagonal, off);
    const auto spectrum = quantum::bell_spectrum(*r.kept_state, std::max(off, quantum::kStateTolerance));
    const auto key = std::make_pair(r.c, r.d);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, rep.block_pairs.size()).first;
      BlockPairSummary s;
      s.c = r.c;
      s.d = r.d;
      s.first_spectrum = spectrum;
      rep.block_pairs.push_back(s);
      halves.push_back({0, 0});
    }
    auto& s = rep.block_pairs[it->second];
    ++s.count;
    const auto a = s.first_spectrum.values();
    const auto b = spectrum.values();
    for (int j = 0; j < 4; ++j) s.spectrum_spread = std::max(s.spectrum_spread, std::abs(a[j] - b[j]));
    ++halves[it->second][2 * k < kept.size() ? 0 : 1];
  }

  const std::size_t categories = rep.block_pairs.size();
  if (categories > 1) {
    const double total = static_cast<double>(kept.size());
    std::array<double, 2> rows{};
    for (const auto& h : halves) {
      rows[0] += static_cast<double>(h[0]);
      rows[1] += static_cast<double>(h[1]);
    }
    for (const auto& h : halves) {
      const double col = static_cast<double>(h[0] + h[1]);
      for (int row = 0; row < 2; ++row) {
        const double expected = rows[row] * col / total;
        if (expected > 0.0) {
          const double diff = static_cast<double>(h[row]) - expected;
          rep.chi_square += diff * diff / expected;
        }
      }
    }
    rep.degrees_of_freedom = static_cast<int>(categories) - 1;
    const boost::math::chi_squared dist(rep.degrees_of_freedom);
    rep.p_value = boost::math::cdf(boost::math::complement(dist, rep.chi_square));
  }
  rep.passed = rep.max_off_diagonal <= quantum::kStateTolerance && rep.p_value >= 1e-3;
  return rep;
}

void write_transcript(std::ostream& out, const Transcript& tr) {
  const auto& p = tr.params;
  out << "# model=" << tr.model << '\n'
      << "# mode=" << to_string(tr.mode) << '\n'
      << "# seed=" << tr.seed << '\n'
      << "# n=" << p.n << ",gamma=" << format_double(p.gamma) << ",omega_exp=" << format_double(p.omega_exp)
      << ",delta_est=" << format_double(p.delta_est) << '\n'
      << "# aborted=" << (tr.aborted ? 1 : 0) << ",win_count=" << tr.win_count << ",test_count=" << tr.test_count
      << '\n'
      << "i,t,x,y,a,b,w,c,d\n";
  for (std::size_t i = 0; i < tr.rounds.size(); ++i) {
    const auto& r = tr.rounds[i];
    out << i << ',' << r.t << ',';
    write_field(out, r.x);
    out << ',';
    write_field(out, r.y);
    out << ',';
    write_field(out, r.a);
    out << ',';
    write_field(out, r.b);
    out << ',';
    write_field(out, r.w);
    out << ',';
    write_field(out, r.c);
    out << ',';
    write_field(out, r.d);
    out << '\n';
  }
}

}  // namespace diec::sim
