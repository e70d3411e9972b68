// lprelay: command-line front end for the low-power relay toolkit.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 internal failure
// (including a counterexample run that does not reproduce).

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lprelay/capacity.hpp"
#include "lprelay/config_io.hpp"
#include "lprelay/format.hpp"
#include "lprelay/matrix.hpp"
#include "lprelay/region.hpp"
#include "lprelay/repro.hpp"
#include "lprelay/wideband.hpp"

namespace {

using namespace lprelay;
using nlohmann::json;

struct InternalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double round9(double x) { return std::stod(format_number(x, 9)); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ChannelConfig read_config(const std::string& path) { return load_config(read_file(path)); }

// Writes to the --out file when given, stdout otherwise.
void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ValidationError("out", "cannot open '" + out_path + "' for writing");
  out << text;
}

int run_capacity(const std::string& path, std::string mode, std::size_t grid) {
  const auto cfg = read_config(path);
  require(cfg, Topology::SingleRelay, "capacity");
  const std::string natural = cfg.csi() == CsiMode::Synchronous ? "thm1" : "phase";
  if (mode.empty()) mode = natural;
  if (mode != natural)
    throw ValidationError("mode", "'" + mode + "' does not match the config's csi '" + to_string(cfg.csi()) + "'");

  json out;
  out["mode"] = mode;
  if (mode == "phase") {
    out["rate"] = round9(thm1_phase_fading(cfg));
  } else {
    Thm1Grid g;
    if (grid) g.simplex_points = grid;
    const auto r = thm1_optimize(cfg, g);
    const auto& a = std::get<PowerAllocation>(r.allocation);
    out["rate"] = round9(r.rate);
    out["binding_bound"] = to_string(r.binding_bound);
    out["bounds"] = {{"relay_decode", round9(r.bounds.relay_decode)}, {"mac_combine", round9(r.bounds.mac_combine)}};
    out["allocation"] = {{"p21", round9(a.p21)},     {"p31", round9(a.p31)},    {"pb1", round9(a.pb1)},
                         {"theta", round9(a.theta)}, {"alpha", round9(a.alpha)}};
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

std::string row(double param, const RatePoint& p, bool feasible) {
  return csv_row({format_number(param), format_number(p.r2), format_number(p.r3), format_number(p.r_sum),
                  feasible ? "1" : "0"});
}

// Best achievable common/private point for the weighted objective mu R2 + (1 - mu) R3.
RatePoint broadcast_frontier_point(const BroadcastGains& g, double mu, std::size_t n) {
  std::vector<std::array<double, 3>> ant1, ant2;
  detail::antenna_grid(g.budget[0], n, false, [&](double c, double a, double b) { ant1.push_back({c, a, b}); });
  detail::antenna_grid(g.budget[1], n, false, [&](double c, double a, double b) { ant2.push_back({c, a, b}); });
  RatePoint best;
  double best_v = -1.0;
  for (const auto& x : ant1)
    for (const auto& y : ant2) {
      const auto p = bc_rates_raw(g, {x[0], y[0], x[1], y[1], x[2], y[2]}).point();
      const double v = mu * p.r2 + (1.0 - mu) * p.r3;
      if (v > best_v) {
        best_v = v;
        best = p;
      }
    }
  return best;
}

int run_region(const std::string& path, const std::string& cut, std::string sweep, std::size_t steps,
               const std::string& out_path) {
  const auto cfg = read_config(path);
  require(cfg, Topology::TwoRelayDiamond, "region");
  if (steps < 2) throw ValidationError("steps", "must be >= 2");
  auto param = [&](std::size_t i) { return static_cast<double>(i) / static_cast<double>(steps - 1); };

  std::string text;
  if (cut == "mac") {
    if (sweep.empty()) sweep = "rho";
    if (sweep != "rho") throw ValidationError("sweep", "the mac cut sweeps 'rho'");
    text = csv_row({"rho", "r2", "r3", "r_sum", "feasible"});
    bool warned = false;
    for (std::size_t i = 0; i < steps; ++i) {
      const auto m = mac_region_point(cfg, MacCorrelation(param(i)));
      if (m.rho_ignored && !warned) {
        std::cerr << "warning: rho has no effect under phase fading\n";
        warned = true;
      }
      text += row(param(i), {m.r23, m.r32, m.r_sum}, true);
    }
  } else if (cut == "broadcast") {
    if (cfg.csi() == CsiMode::PhaseFading) {
      if (sweep.empty()) sweep = "mu";
      if (sweep != "mu") throw ValidationError("sweep", "the phase-fading broadcast cut sweeps 'mu'");
      const auto g = broadcast_gains(cfg);
      text = csv_row({"mu", "r2", "r3", "r_sum", "feasible"});
      for (std::size_t i = 0; i < steps; ++i) text += row(param(i), broadcast_frontier_point(g, param(i), 16), true);
    } else {
      if (sweep.empty()) sweep = "alpha3";
      if (sweep != "alpha3") throw ValidationError("sweep", "the synchronous broadcast cut sweeps 'alpha3'");
      const auto& c21 = cfg.gain("c21");
      const auto& c31 = cfg.gain("c31");
      const bool ok = thm3_condition(c21, c31);
      const bool swapped = c21.norm_sq() < c31.norm_sq();
      const auto& strong = swapped ? c31 : c21;
      const auto& weak = swapped ? c21 : c31;
      const double p = cfg.power("P1");
      text = csv_row({"alpha3_fraction", "r2", "r3", "r_sum", "feasible"});
      for (std::size_t i = 0; i < steps; ++i) {
        const double f = param(i);
        auto r = beamforming_rates(strong, weak, {(1.0 - f) * p / strong.norm_sq(), f * p / weak.norm_sq()});
        if (swapped) std::swap(r.r2, r.r3);
        text += row(f, r, ok);
      }
    }
  } else {
    throw ValidationError("cut", "expected 'mac' or 'broadcast'");
  }
  emit(text, out_path);
  return 0;
}

int run_min_power(double r2, double r3, double r, double c2, double c3, double c0) {
  const auto m = min_power(r2, r3, r, c2, c3, c0);
  json out{{"p_total", round9(m.p_total)},
           {"r0", round9(m.r0)},
           {"r2_private", round9(m.r2p)},
           {"r3_private", round9(m.r3p)}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_counterexample(bool csv) {
  const auto r = lprelay::run_counterexample();
  std::cout << (csv ? counterexample_csv(r) : counterexample_table(r));
  if (!r.all_match) throw InternalFailure("counterexample does not reproduce the reference values");
  return 0;
}

std::vector<double> parse_bandwidths(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    is.imbue(std::locale::classic());
    double v = 0.0;
    if (!(is >> v) || !(is >> std::ws).eof()) throw ValidationError("bandwidths", "bad number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("bandwidths", "empty list");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0)) throw ValidationError("bandwidths", "must be > 0");
    if (i && !(out[i] > out[i - 1])) throw ValidationError("bandwidths", "must be strictly ascending");
  }
  return out;
}

int run_verify_limits(const std::string& path, const std::string& bw_list, std::uint64_t seed, const std::string& link,
                      std::size_t samples) {
  const auto cfg = read_config(path);
  const auto bws = bw_list.empty() ? default_bandwidths() : parse_bandwidths(bw_list);
  const auto& c = cfg.gain(link);
  std::string tx = "P1";
  if (link == "c32" || link == "c42") tx = "P2";
  if (link == "c43") tx = "P3";
  // Powers are already divided by N0, so the oracle runs at unit noise.
  const double p = cfg.power(tx);

  LimitCheckReport rep;
  if (cfg.csi() == CsiMode::Synchronous) {
    rep = check_limit_constant_phase(c, aligned_covariance(c, p), 1.0, bws);
  } else {
    std::vector<double> mags;
    for (auto z : c.entries()) mags.push_back(std::abs(z));
    std::vector<double> var(c.dim(), p / static_cast<double>(c.dim()));
    rep = check_limit_phase_fading(mags, var, 1.0, bws, samples, seed);
  }
  std::string text = csv_row({"bandwidth", "scaled_mi", "target", "abs_err"});
  for (std::size_t i = 0; i < rep.bandwidths.size(); ++i)
    text += csv_row({format_number(rep.bandwidths[i]), format_number(rep.scaled_mi[i]), format_number(rep.target),
                     format_number(rep.abs_err(i))});
  std::cout << text;
  return 0;
}

HermitianMatrix parse_matrix(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("matrix: ") + e.what());
  }
  if (doc.is_object()) {
    if (!doc.contains("matrix") || doc.size() != 1) throw ValidationError("matrix", "expected a single 'matrix' key");
    doc = doc["matrix"];
  }
  if (!doc.is_array() || doc.empty()) throw ParseError("matrix: expected a nonempty array of rows");
  const std::size_t n = doc.size();
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!doc[i].is_array() || doc[i].size() != n) throw ValidationError("matrix", "matrix must be square");
    for (std::size_t j = 0; j < n; ++j) {
      const auto& e = doc[i][j];
      Complex z;
      if (e.is_number()) {
        z = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        z = {e[0].get<double>(), e[1].get<double>()};
      } else {
        throw ParseError("matrix: entries must be numbers or [re, im]");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = z;
    }
  }
  return HermitianMatrix(std::move(m));
}

int run_matrix_check(const std::string& path) {
  const auto m = parse_matrix(read_file(path));
  const auto ev = eigenvalues(m);
  json out;
  out["eigenvalues"] = json::array();
  for (double e : ev) out["eigenvalues"].push_back(round9(e));
  const auto v = loewner_compare(m, HermitianMatrix::zero(m.dim()));
  out["relation_to_zero"] = to_string(v.relation);
  out["psd"] = v.relation != LoewnerRelation::Indefinite;
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-power relay capacity toolkit"};
  app.require_subcommand(1);

  std::string config, mode, cut, sweep, out_path, bandwidths, link = "c31", matrix_path;
  std::size_t grid = 0, steps = 11, samples = 4096;
  std::uint64_t seed = 0;
  double r2 = 0, r3 = 0, r = 0, c2 = 0, c3 = 0, c0 = 0;
  bool csv = false;

  auto* cap = app.add_subcommand("capacity", "single-relay capacity");
  cap->add_option("--config", config, "network config (JSON)")->required();
  cap->add_option("--mode", mode, "thm1 (synchronous) or phase (phase fading)")->check(CLI::IsMember({"thm1", "phase"}));
  cap->add_option("--grid", grid, "grid points per power coordinate")->check(CLI::Range(2, 512));

  auto* reg = app.add_subcommand("region", "diamond network cut regions as CSV");
  reg->add_option("--config", config, "network config (JSON)")->required();
  reg->add_option("--cut", cut, "mac or broadcast")->required()->check(CLI::IsMember({"mac", "broadcast"}));
  reg->add_option("--sweep", sweep, "rho (mac), mu (phase-fading broadcast), alpha3 (synchronous broadcast)");
  reg->add_option("--steps", steps, "sweep points (>= 2)");
  reg->add_option("--out", out_path, "CSV output file (stdout if absent)");

  auto* mp = app.add_subcommand("min-power", "minimum common/private power for a rate triple");
  mp->add_option("--r2", r2)->required();
  mp->add_option("--r3", r3)->required();
  mp->add_option("--r", r)->required();
  mp->add_option("--c2sq", c2)->required();
  mp->add_option("--c3sq", c3)->required();
  mp->add_option("--c0sq", c0)->required();

  auto* ce = app.add_subcommand("counterexample", "reproduce the angle-0.4 counterexample");
  ce->add_flag("--csv", csv, "CSV instead of an aligned table");

  auto* vl = app.add_subcommand("verify-limits", "wideband convergence of B I(X;Y)");
  vl->add_option("--config", config, "network config (JSON)")->required();
  vl->add_option("--bandwidths", bandwidths, "comma-separated ascending list");
  vl->add_option("--seed", seed, "RNG seed (phase fading)");
  vl->add_option("--link", link, "gain vector to test");
  vl->add_option("--samples", samples, "phase draws per bandwidth")->check(CLI::Range(1, 10000000));

  auto* mc = app.add_subcommand("matrix-check", "eigenvalues and PSD verdict of a Hermitian matrix");
  mc->add_option("--matrix", matrix_path, "JSON matrix file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*cap) return run_capacity(config, mode, grid);
    if (*reg) return run_region(config, cut, sweep, steps, out_path);
    if (*mp) return run_min_power(r2, r3, r, c2, c3, c0);
    if (*ce) return run_counterexample(csv);
    if (*vl) return run_verify_limits(config, bandwidths, seed, link, samples);
    if (*mc) return run_matrix_check(matrix_path);
  } catch (const InternalFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
