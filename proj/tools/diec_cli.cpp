// diec-cli: rate certificates, rate and entropy-bound curves, protocol
// simulation and bound verification on top of the C interface.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "diec/diec.h"
#include "json.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitValidation = 1;
constexpr int kExitVerification = 2;
constexpr double kMaxWin = 0.85355339059327373;  // (2 + sqrt 2) / 4
constexpr double kMaxBeta = 2.8284271247461903;  // 2 sqrt 2

struct CliError : std::runtime_error {
  CliError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

void check(diec_status status) {
  if (status == DIEC_OK) return;
  throw CliError(status == DIEC_ERR_VERIFICATION ? kExitVerification : kExitValidation, diec_last_error());
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);
  return buf;
}

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  std::string config;
  std::string mode = "eat-strict";
  bool exact = false;
};

// Values from the JSON config fill every option not given on the command
// line. Keys are option names without dashes and with '-' replaced by '_';
// an object under the subcommand's name overrides top-level keys.
class Config {
 public:
  void load(const std::string& path, const std::string& command) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw CliError(kExitValidation, "cannot open config file " + path);
    ordered_json root;
    try {
      root = ordered_json::parse(in);
    } catch (const std::exception& e) {
      throw CliError(kExitValidation, "invalid config file " + path + ": " + e.what());
    }
    if (!root.is_object()) throw CliError(kExitValidation, "config file must hold a JSON object");
    for (auto it = root.begin(); it != root.end(); ++it)
      if (!it.value().is_object()) values_[it.key()] = it.value();
    if (root.contains(command) && root[command].is_object())
      for (auto it = root[command].begin(); it != root[command].end(); ++it) values_[it.key()] = it.value();
  }

  template <class T>
  void fill(const CLI::Option* opt, T& target) const {
    if (opt->count() > 0) return;
    std::string key = opt->get_lnames().front();
    std::replace(key.begin(), key.end(), '-', '_');
    const auto it = values_.find(key);
    if (it == values_.end()) return;
    try {
      target = it->second.get<T>();
    } catch (const std::exception& e) {
      throw CliError(kExitValidation, "config key '" + key + "': " + e.what());
    }
  }

 private:
  std::map<std::string, ordered_json> values_;
};

diec_gradient_mode parse_mode(const std::string& name) {
  if (name == "eat-strict") return DIEC_GRADIENT_EAT_STRICT;
  if (name == "as-printed") return DIEC_GRADIENT_AS_PRINTED;
  throw CliError(kExitValidation, "unknown --mode '" + name + "' (expected eat-strict or as-printed)");
}

const char* mode_name(diec_gradient_mode m) { return m == DIEC_GRADIENT_AS_PRINTED ? "as-printed" : "eat-strict"; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw CliError(kExitValidation, "cannot open output file " + path);
  file << text;
  if (!file) throw CliError(kExitValidation, "cannot write output file " + path);
}

// --exact: a JSON dump next to --out, or on stdout without --out.
void emit_exact(const Globals& g, const ordered_json& doc) {
  if (!g.exact) return;
  if (g.out.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  write_text(g.out + "_exact.json", doc.dump(2) + "\n");
}

ordered_json certificate_json(const diec_rate_certificate& c) {
  ordered_json j;
  j["n"] = c.params.n;
  j["omega_exp"] = c.params.omega_exp;
  j["gamma"] = c.params.gamma;
  j["delta_est"] = c.params.delta_est;
  j["eps_dist"] = c.budget.eps_dist;
  j["eps_snd"] = c.budget.eps_snd;
  j["eps_cmp"] = c.budget.eps_cmp;
  j["eps_smo"] = c.budget.eps_smo;
  j["eta_opt"] = c.eta_opt;
  j["pt_omega"] = c.pt_omega;
  j["second_order_v"] = c.second_order_v;
  j["log_l"] = c.log_l;
  j["rate_raw"] = c.rate_raw;
  j["rate"] = c.rate;
  j["mode"] = mode_name(c.mode);
  if (c.diagnostic[0] != '\0') j["diagnostic"] = c.diagnostic;
  return j;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v;
  for (int k = 0; k < count; ++k) v.push_back(count == 1 ? lo : lo + (hi - lo) * k / (count - 1));
  return v;
}

// ---------------------------------------------------------------- rate

struct RateArgs {
  std::uint64_t n = 0;
  double omega_exp = 0.0;
  double eps_dist = 1e-5;
  double eps_snd = 1e-5;
  double eps_cmp = 1e-2;
  std::optional<double> gamma, eps_smo, delta_est;
};

int run_rate(const Globals& g, const RateArgs& a) {
  if (a.n == 0) throw CliError(kExitValidation, "--n is required and must be at least 1");
  const diec_gradient_mode mode = parse_mode(g.mode);
  diec_rate_certificate cert{};
  if (a.gamma || a.eps_smo) {
    if (!a.gamma || !a.eps_smo)
      throw CliError(kExitValidation, "fixed parameters need both --gamma and --eps-smo");
    double delta = 0.0;
    if (a.delta_est)
      delta = *a.delta_est;
    else
      check(diec_delta_for_completeness(a.n, a.eps_cmp, &delta));
    const diec_protocol_params params{a.n, *a.gamma, a.omega_exp, delta};
    const diec_error_budget budget{a.eps_dist, a.eps_snd, a.eps_cmp, *a.eps_smo};
    check(diec_certify(&params, &budget, mode, &cert));
  } else {
    if (a.delta_est) throw CliError(kExitValidation, "--delta-est needs fixed --gamma and --eps-smo");
    check(diec_optimize(a.n, a.omega_exp, a.eps_dist, a.eps_snd, a.eps_cmp, mode, &cert));
  }

  std::ostringstream rec;
  rec << "n=" << cert.params.n << '\n'
      << "omega_exp=" << fmt6(cert.params.omega_exp) << '\n'
      << "gamma=" << fmt6(cert.params.gamma) << '\n'
      << "delta_est=" << fmt6(cert.params.delta_est) << '\n'
      << "eps_dist=" << fmt6(cert.budget.eps_dist) << '\n'
      << "eps_snd=" << fmt6(cert.budget.eps_snd) << '\n'
      << "eps_cmp=" << fmt6(cert.budget.eps_cmp) << '\n'
      << "eps_smo=" << fmt6(cert.budget.eps_smo) << '\n'
      << "eta_opt=" << fmt6(cert.eta_opt) << '\n'
      << "pt_omega=" << fmt6(cert.pt_omega) << '\n'
      << "second_order_v=" << fmt6(cert.second_order_v) << '\n'
      << "log_l=" << fmt6(cert.log_l) << '\n'
      << "rate_raw=" << fmt6(cert.rate_raw) << '\n'
      << "rate=" << fmt6(cert.rate) << '\n'
      << "mode=" << mode_name(cert.mode) << '\n';
  if (cert.diagnostic[0] != '\0') rec << "diagnostic=" << cert.diagnostic << '\n';
  std::cout << rec.str();
  if (!g.out.empty()) write_text(g.out, rec.str());
  emit_exact(g, certificate_json(cert));
  return 0;
}

// ---------------------------------------------------------------- curve

struct CurveArgs {
  std::vector<double> omegas;
  std::vector<std::uint64_t> ns;
  double eps_dist = 1e-5;
  double eps_snd = 1e-5;
  double eps_cmp = 1e-2;
  bool asymptotic = false;
  bool asymptotic_only = false;
  bool per_point = false;
};

// Default grid: omega = 0.77 + k * 0.002075, k <= 40, starting where each
// finite-n curve becomes positive and using every second k except at n = 1e10.
std::vector<double> default_curve_grid(std::uint64_t n) {
  struct Start {
    std::uint64_t n;
    int k0;
    int stride;
  };
  static const Start starts[] = {
      {1000000ULL, 20, 2}, {10000000ULL, 10, 2}, {100000000ULL, 6, 2}, {10000000000ULL, 4, 1}, {1000000000000ULL, 0, 2}};
  int k0 = 0;
  int stride = 1;
  for (const auto& s : starts)
    if (s.n == n) {
      k0 = s.k0;
      stride = s.stride;
    }
  std::vector<double> grid;
  for (int k = k0; k <= 40; k += stride) grid.push_back(0.77 + 0.002075 * k);
  return grid;
}

int run_curve(const Globals& g, CurveArgs a) {
  const diec_gradient_mode mode = parse_mode(g.mode);
  const bool custom_grid = !a.omegas.empty();
  if (a.ns.empty() && !a.asymptotic_only)
    a.ns = {1000000ULL, 10000000ULL, 100000000ULL, 10000000000ULL, 1000000000000ULL};
  if (a.asymptotic_only) a.ns.clear();

  struct Row {
    std::uint64_t n;
    diec_rate_certificate cert;
  };
  std::vector<std::future<std::vector<Row>>> jobs;
  for (const std::uint64_t n : a.ns) {
    if (n == 0) throw CliError(kExitValidation, "n values must be at least 1");
    std::vector<double> grid = custom_grid ? a.omegas : default_curve_grid(n);
    std::sort(grid.begin(), grid.end());
    jobs.push_back(std::async(std::launch::async, [=] {
      std::vector<Row> rows(grid.size());
      std::vector<diec_rate_certificate> certs(grid.size());
      if (a.per_point) {
        for (std::size_t i = 0; i < grid.size(); ++i)
          check(diec_optimize(n, grid[i], a.eps_dist, a.eps_snd, a.eps_cmp, mode, &certs[i]));
      } else {
        check(diec_optimize_curve(n, grid.data(), grid.size(), a.eps_dist, a.eps_snd, a.eps_cmp, mode, certs.data()));
      }
      for (std::size_t i = 0; i < grid.size(); ++i) rows[i] = {n, certs[i]};
      return rows;
    }));
  }
  std::vector<Row> rows;
  for (auto& j : jobs) {
    auto part = j.get();
    rows.insert(rows.end(), part.begin(), part.end());
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& l, const Row& r) {
    return l.n != r.n ? l.n < r.n : l.cert.params.omega_exp < r.cert.params.omega_exp;
  });

  std::vector<double> asym_grid;
  if (a.asymptotic || a.asymptotic_only) {
    if (custom_grid) {
      asym_grid = a.omegas;
    } else {
      for (int k = 0; k <= 40; ++k) asym_grid.push_back(0.77 + 0.002075 * k);
      asym_grid.push_back(kMaxWin);
    }
    std::sort(asym_grid.begin(), asym_grid.end());
  }
  if (rows.empty() && asym_grid.empty()) throw CliError(kExitValidation, "empty grid");

  std::ostringstream csv;
  ordered_json exact = ordered_json::array();
  csv << "n,omega_exp,rate_raw,rate,gamma,eps_smo,delta_est,eta_opt\n";
  for (const auto& r : rows) {
    const auto& c = r.cert;
    csv << r.n << ',' << fmt6(c.params.omega_exp) << ',' << fmt6(c.rate_raw) << ',' << fmt6(c.rate) << ','
        << fmt6(c.params.gamma) << ',' << fmt6(c.budget.eps_smo) << ',' << fmt6(c.params.delta_est) << ','
        << fmt6(c.eta_opt) << '\n';
    exact.push_back(certificate_json(c));
  }
  for (const double w : asym_grid) {
    double rate = 0.0;
    check(diec_asymptotic_rate(w, &rate));
    csv << "asymptotic," << fmt6(w) << ',' << fmt6(rate) << ',' << fmt6(std::max(rate, 0.0)) << ",,,,"
        << fmt6(-rate) << '\n';
    exact.push_back({{"n", "asymptotic"}, {"omega_exp", w}, {"rate_raw", rate}, {"rate", std::max(rate, 0.0)}});
  }
  if (g.out.empty())
    std::cout << csv.str();
  else
    write_text(g.out, csv.str());
  emit_exact(g, exact);
  return 0;
}

// ---------------------------------------------------------------- entropy-curve

int run_entropy_curve(const Globals& g, std::vector<double> omegas) {
  if (omegas.empty()) omegas = linspace(0.75, kMaxWin, 31);
  std::ostringstream csv;
  ordered_json exact = ordered_json::array();
  csv << "omega,beta,conditional_bound\n";
  for (const double w : omegas) {
    if (!(w >= 0.75 - 1e-12 && w <= kMaxWin + 1e-12)) {
      std::ostringstream os;
      os << "omega " << w << " outside [0.75, (2+sqrt 2)/4]";
      throw CliError(kExitValidation, os.str());
    }
    double bound = 0.0;
    check(diec_conditional_entropy_bound(std::min(w, kMaxWin), &bound));
    const double beta = 8.0 * w - 4.0;
    csv << fmt6(w) << ',' << fmt6(beta) << ',' << fmt6(bound) << '\n';
    exact.push_back({{"omega", w}, {"beta", beta}, {"conditional_bound", bound}});
  }
  if (g.out.empty())
    std::cout << csv.str();
  else
    write_text(g.out, csv.str());
  emit_exact(g, exact);
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string model = "honest";
  double xi = 0.0;
  double model_omega = 0.0;
  double slope = 0.0;
  std::uint64_t n = 1000;
  double gamma = 1.0;
  double omega_exp = 0.85;
  std::optional<double> delta_est;
  double eps_cmp = 1e-2;
  std::uint64_t trials = 100;
  std::string protocol = "standard";
  std::string summary;
};

diec_protocol_mode parse_protocol(const std::string& name) {
  if (name == "standard") return DIEC_PROTOCOL_STANDARD;
  if (name == "modified") return DIEC_PROTOCOL_MODIFIED;
  if (name == "modified-early-projection") return DIEC_PROTOCOL_MODIFIED_EARLY_PROJECTION;
  throw CliError(kExitValidation,
                 "unknown --protocol '" + name + "' (expected standard, modified or modified-early-projection)");
}

struct ModelHandle {
  diec_device_model* ptr = nullptr;
  ~ModelHandle() { diec_device_model_destroy(ptr); }
};

struct TranscriptHandle {
  diec_transcript* ptr = nullptr;
  ~TranscriptHandle() { diec_transcript_destroy(ptr); }
};

int run_simulate(const Globals& g, const SimulateArgs& a) {
  const diec_protocol_mode protocol = parse_protocol(a.protocol);
  const diec_model_options options{a.xi, a.model_omega, a.slope};
  ModelHandle model;
  check(diec_device_model_create(a.model.c_str(), &options, &model.ptr));

  double delta = 0.0;
  if (a.delta_est)
    delta = *a.delta_est;
  else
    check(diec_delta_for_completeness(a.n, a.eps_cmp, &delta));
  const diec_protocol_params params{a.n, a.gamma, a.omega_exp, delta};

  diec_abort_estimate est{};
  check(diec_estimate_abort(model.ptr, &params, a.trials, g.seed, protocol, &est));
  double hoeffding = 0.0;
  check(diec_completeness_bound(a.n, delta, &hoeffding));

  const std::string transcript_path = g.out.empty() ? "transcript.csv" : g.out;
  TranscriptHandle tr;
  check(diec_run_protocol(model.ptr, &params, protocol, diec_trial_seed(g.seed, 0), &tr.ptr));
  check(diec_transcript_write(tr.ptr, transcript_path.c_str()));

  ordered_json summary;
  summary["model"] = a.model;
  summary["protocol"] = a.protocol;
  summary["seed"] = g.seed;
  summary["n"] = a.n;
  summary["gamma"] = a.gamma;
  summary["omega_exp"] = a.omega_exp;
  summary["delta_est"] = delta;
  summary["trials"] = est.trials;
  summary["aborted"] = est.aborted;
  summary["abort_estimate"] = est.estimate;
  summary["interval"] = {est.interval_lo, est.interval_hi};
  summary["hoeffding_bound"] = hoeffding;
  summary["win_rate"] = est.win_rate;
  summary["transcript"] = transcript_path;

  ordered_json shown = summary;
  for (const char* key : {"abort_estimate", "hoeffding_bound", "win_rate"})
    shown[key] = std::stod(fmt6(summary[key].get<double>()));
  shown["interval"] = {std::stod(fmt6(est.interval_lo)), std::stod(fmt6(est.interval_hi))};
  std::cout << shown.dump(2) << '\n';
  if (!a.summary.empty()) write_text(a.summary, shown.dump(2) + "\n");
  if (g.exact) write_text(transcript_path + "_exact.json", summary.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------- verify-bound

int run_verify_bound(const Globals& g, std::vector<double> betas, double grid_step) {
  if (betas.empty()) betas = linspace(2.05, kMaxBeta, 20);
  std::ostringstream csv;
  ordered_json exact = ordered_json::array();
  csv << "beta,analytic_entropy,brute_force_entropy,deviation,argmax_deviation,other_branch_entropy\n";
  double worst = 0.0;
  double worst_argmax = 0.0;
  for (const double beta : betas) {
    diec_entropy_bound analytic{};
    diec_brute_force_result brute{};
    check(diec_bell_diagonal_entropy_bound(beta, &analytic));
    check(diec_brute_force_max_entropy(beta, grid_step, &brute));
    const double dev = std::abs(brute.entropy - analytic.max_total_entropy);
    double arg = 0.0;
    for (int i = 0; i < 4; ++i) arg = std::max(arg, std::abs(brute.spectrum[i] - analytic.spectrum[i]));
    worst = std::max(worst, dev);
    worst_argmax = std::max(worst_argmax, arg);
    csv << fmt6(beta) << ',' << fmt6(analytic.max_total_entropy) << ',' << fmt6(brute.entropy) << ',' << fmt6(dev)
        << ',' << fmt6(arg) << ',' << fmt6(brute.other_branch_entropy) << '\n';
    exact.push_back({{"beta", beta},
                     {"analytic_entropy", analytic.max_total_entropy},
                     {"brute_force_entropy", brute.entropy},
                     {"deviation", dev},
                     {"argmax_deviation", arg},
                     {"other_branch_entropy", brute.other_branch_entropy}});
  }
  if (g.out.empty())
    std::cout << csv.str();
  else
    write_text(g.out, csv.str());
  emit_exact(g, exact);
  std::cerr << "max deviation " << fmt6(worst) << ", max argmax deviation " << fmt6(worst_argmax) << '\n';
  return worst > 1e-3 ? kExitVerification : 0;
}

// ---------------------------------------------------------------- verify-twirl

int run_verify_twirl(const Globals& g, int states) {
  diec_twirl_report r{};
  check(diec_verify_twirl_suite(g.seed, states, &r));
  ordered_json j;
  j["states"] = r.states;
  j["max_off_diagonal"] = r.max_off_diagonal;
  j["max_diagonal_change"] = r.max_diagonal_change;
  j["max_idempotence_defect"] = r.max_idempotence_defect;
  j["max_fixed_point_defect"] = r.max_fixed_point_defect;
  j["max_decoupling_defect"] = r.max_decoupling_defect;
  j["max_block_off_diagonal"] = r.max_block_off_diagonal;
  j["passed"] = r.passed != 0;
  std::cout << j.dump(2) << '\n';
  if (!g.out.empty()) write_text(g.out, j.dump(2) + "\n");
  return r.passed ? 0 : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Device-independent entanglement certification: rates, bounds and protocol simulation"};
  app.require_subcommand(1);
  Globals g;
  auto* o_seed = app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  auto* o_out = app.add_option("--out", g.out, "Output file (stdout when omitted)");
  app.add_option("--config", g.config, "JSON config file; command-line flags take precedence");
  auto* o_mode = app.add_option("--mode", g.mode, "Gradient term: eat-strict or as-printed")->capture_default_str();
  auto* o_exact = app.add_flag("--exact", g.exact, "Also write a full-precision JSON dump");
  app.fallthrough();

  // rate
  RateArgs rate;
  double r_gamma = 0, r_eps_smo = 0, r_delta = 0;
  auto* rate_cmd = app.add_subcommand("rate", "Certified rate for one (n, omega_exp)");
  auto* r_n = rate_cmd->add_option("--n", rate.n, "Number of rounds");
  auto* r_w = rate_cmd->add_option("--omega-exp", rate.omega_exp, "Expected winning probability");
  auto* r_ed = rate_cmd->add_option("--eps-dist", rate.eps_dist)->capture_default_str();
  auto* r_es = rate_cmd->add_option("--eps-snd", rate.eps_snd)->capture_default_str();
  auto* r_ec = rate_cmd->add_option("--eps-cmp", rate.eps_cmp)->capture_default_str();
  auto* r_g = rate_cmd->add_option("--gamma", r_gamma, "Fixed test probability (skips optimization)");
  auto* r_sm = rate_cmd->add_option("--eps-smo", r_eps_smo, "Fixed smoothing parameter (skips optimization)");
  auto* r_de = rate_cmd->add_option("--delta-est", r_delta, "Fixed confidence width");

  // curve
  CurveArgs curve;
  auto* curve_cmd = app.add_subcommand("curve", "Rate curves over an (n, omega_exp) grid");
  auto* c_w = curve_cmd->add_option("--omegas", curve.omegas, "omega_exp values")->delimiter(',');
  auto* c_n = curve_cmd->add_option("--ns", curve.ns, "Round counts")->delimiter(',');
  auto* c_ed = curve_cmd->add_option("--eps-dist", curve.eps_dist)->capture_default_str();
  auto* c_es = curve_cmd->add_option("--eps-snd", curve.eps_snd)->capture_default_str();
  auto* c_ec = curve_cmd->add_option("--eps-cmp", curve.eps_cmp)->capture_default_str();
  auto* c_as = curve_cmd->add_flag("--asymptotic", curve.asymptotic, "Add the n -> infinity rows");
  auto* c_ao = curve_cmd->add_flag("--asymptotic-only", curve.asymptotic_only, "Only the n -> infinity rows");
  auto* c_pp = curve_cmd->add_flag("--per-point", curve.per_point, "Optimize parameters per point, not per curve");

  // entropy-curve
  std::vector<double> e_omegas;
  auto* ent_cmd = app.add_subcommand("entropy-curve", "Single-round conditional-entropy bound over omega");
  auto* e_w = ent_cmd->add_option("--omegas", e_omegas, "omega values in [0.75, (2+sqrt 2)/4]")->delimiter(',');

  // simulate
  SimulateArgs sim;
  double s_delta = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the protocol against a device model");
  auto* s_m = sim_cmd->add_option("--model", sim.model, "Device model")->capture_default_str();
  auto* s_xi = sim_cmd->add_option("--xi", sim.xi, "Werner noise (werner, noisy-drift)");
  auto* s_mw = sim_cmd->add_option("--model-omega", sim.model_omega, "Winning probability (threshold model)");
  auto* s_sl = sim_cmd->add_option("--slope", sim.slope, "Noise increase per round (noisy-drift)");
  auto* s_n = sim_cmd->add_option("--n", sim.n)->capture_default_str();
  auto* s_g = sim_cmd->add_option("--gamma", sim.gamma)->capture_default_str();
  auto* s_w = sim_cmd->add_option("--omega-exp", sim.omega_exp)->capture_default_str();
  auto* s_de = sim_cmd->add_option("--delta-est", s_delta, "Confidence width (default from --eps-cmp)");
  auto* s_ec = sim_cmd->add_option("--eps-cmp", sim.eps_cmp)->capture_default_str();
  auto* s_t = sim_cmd->add_option("--trials", sim.trials)->capture_default_str();
  auto* s_p = sim_cmd->add_option("--protocol", sim.protocol, "standard, modified or modified-early-projection")
                  ->capture_default_str();
  auto* s_su = sim_cmd->add_option("--summary", sim.summary, "Also write the JSON summary here");

  // verify-bound
  std::vector<double> v_betas;
  double v_step = 1e-3;
  auto* vb_cmd = app.add_subcommand("verify-bound", "Brute-force check of the Bell-diagonal entropy bound");
  auto* v_b = vb_cmd->add_option("--betas", v_betas, "CHSH values in (2, 2 sqrt 2]")->delimiter(',');
  auto* v_s = vb_cmd->add_option("--grid-step", v_step)->capture_default_str();

  // verify-twirl
  int t_states = 100;
  auto* vt_cmd = app.add_subcommand("verify-twirl", "Twirl property suite on seeded random states");
  auto* t_s = vt_cmd->add_option("--states", t_states)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    Config cfg;
    cfg.load(g.config, command);
    cfg.fill(o_seed, g.seed);
    cfg.fill(o_out, g.out);
    cfg.fill(o_mode, g.mode);
    cfg.fill(o_exact, g.exact);

    auto optional = [&](const CLI::Option* opt, double value, std::optional<double>& target) {
      double v = value;
      bool from_config = false;
      if (opt->count() == 0) {
        double probe = std::nan("");
        cfg.fill(opt, probe);
        if (!std::isnan(probe)) {
          v = probe;
          from_config = true;
        }
      }
      if (opt->count() > 0 || from_config) target = v;
    };

    if (command == "rate") {
      cfg.fill(r_n, rate.n);
      cfg.fill(r_w, rate.omega_exp);
      cfg.fill(r_ed, rate.eps_dist);
      cfg.fill(r_es, rate.eps_snd);
      cfg.fill(r_ec, rate.eps_cmp);
      optional(r_g, r_gamma, rate.gamma);
      optional(r_sm, r_eps_smo, rate.eps_smo);
      optional(r_de, r_delta, rate.delta_est);
      if (r_w->count() == 0 && rate.omega_exp == 0.0) throw CliError(kExitValidation, "--omega-exp is required");
      return run_rate(g, rate);
    }
    if (command == "curve") {
      cfg.fill(c_w, curve.omegas);
      cfg.fill(c_n, curve.ns);
      cfg.fill(c_ed, curve.eps_dist);
      cfg.fill(c_es, curve.eps_snd);
      cfg.fill(c_ec, curve.eps_cmp);
      cfg.fill(c_as, curve.asymptotic);
      cfg.fill(c_ao, curve.asymptotic_only);
      cfg.fill(c_pp, curve.per_point);
      return run_curve(g, curve);
    }
    if (command == "entropy-curve") {
      cfg.fill(e_w, e_omegas);
      return run_entropy_curve(g, e_omegas);
    }
    if (command == "simulate") {
      cfg.fill(s_m, sim.model);
      cfg.fill(s_xi, sim.xi);
      cfg.fill(s_mw, sim.model_omega);
      cfg.fill(s_sl, sim.slope);
      cfg.fill(s_n, sim.n);
      cfg.fill(s_g, sim.gamma);
      cfg.fill(s_w, sim.omega_exp);
      optional(s_de, s_delta, sim.delta_est);
      cfg.fill(s_ec, sim.eps_cmp);
      cfg.fill(s_t, sim.trials);
      cfg.fill(s_p, sim.protocol);
      cfg.fill(s_su, sim.summary);
      return run_simulate(g, sim);
    }
    if (command == "verify-bound") {
      cfg.fill(v_b, v_betas);
      cfg.fill(v_s, v_step);
      return run_verify_bound(g, v_betas, v_step);
    }
    if (command == "verify-twirl") {
      cfg.fill(t_s, t_states);
      return run_verify_twirl(g, t_states);
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
