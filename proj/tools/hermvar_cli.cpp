// hermvar: sampling, exact discrepancy tables, Berry-type bounds and rate
// sweeps for Hermite variations of fractional Brownian motion.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hermvar/hermvar.hpp"
#include "hermvar/io.hpp"

namespace {

using namespace hermvar;
using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int q = 2;
  std::string hurst = "critical";
  std::string n_spec;
  std::size_t batch = 0;  // 0: per-command default
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string out;
  unsigned threads = default_threads();
  std::string sampler = "circulant";
  std::size_t big_n = 4096;
  long long r_max = 100;
  bool antithetic = false;
};

std::size_t parse_size(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("invalid " + what + " '" + s + "'");
  }
  if (pos != s.size() || s.empty() || s[0] == '-') throw UsageError("invalid " + what + " '" + s + "'");
  return static_cast<std::size_t>(v);
}

/// "8,16,32" or "2^8..12" (dyadic range, both ends inclusive).
std::vector<std::size_t> parse_n_list(const std::string& spec) {
  std::vector<std::size_t> ns;
  if (spec.empty()) throw UsageError("--n: empty n_list");
  const auto caret = spec.find('^');
  const auto dots = spec.find("..");
  if (caret != std::string::npos && dots != std::string::npos && caret < dots) {
    const std::size_t base = parse_size(spec.substr(0, caret), "--n base");
    const std::size_t lo = parse_size(spec.substr(caret + 1, dots - caret - 1), "--n exponent");
    const std::size_t hi = parse_size(spec.substr(dots + 2), "--n exponent");
    if (base < 2 || lo > hi || hi > 40) throw UsageError("--n: invalid range '" + spec + "'");
    for (std::size_t e = lo; e <= hi; ++e) {
      std::size_t v = 1;
      for (std::size_t i = 0; i < e; ++i) v *= base;
      ns.push_back(v);
    }
  } else {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) ns.push_back(parse_size(item, "--n entry"));
  }
  if (ns.empty()) throw UsageError("--n: empty n_list");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 1) throw UsageError("--n: entries must be >= 1");
    if (i > 0 && ns[i] <= ns[i - 1]) throw UsageError("--n: n_list must be strictly increasing");
  }
  return ns;
}

Hurst parse_hurst(const std::string& s, int q) {
  if (s == "critical") return Hurst(critical_hurst(q));
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("--hurst: expected a number or 'critical', got '" + s + "'");
  }
  if (pos != s.size()) throw UsageError("--hurst: expected a number or 'critical', got '" + s + "'");
  return Hurst(v);
}

std::string regime_diagnostic(const RegimeSpec& spec) {
  std::ostringstream os;
  os << "q=" << spec.q.value() << ", H=" << spec.h.value() << " is " << to_string(spec.regime)
     << " (threshold 1-1/(2q) = " << spec.threshold << ")";
  return os.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open output file '" + path + "'");
  f << text;
  if (!f) throw UsageError("failed writing '" + path + "'");
}

std::string csv_text(const io::CsvTable& t) {
  std::ostringstream os;
  t.write(os);
  return os.str();
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

json fit_json(const std::vector<std::pair<double, double>>& pts, const char* what) {
  if (pts.size() < 3) return nullptr;
  try {
    return io::to_json(rate_fit(pts));
  } catch (const std::invalid_argument& e) {
    std::cerr << "note: no rate fit for " << what << ": " << e.what() << "\n";
    return nullptr;
  }
}

/// CSV goes to --out or stdout; the fit JSON goes next to it as
/// <out>.fit.json, or to stderr when the table is on stdout.
void emit_csv_with_fit(const io::CsvTable& table, const json& fit, const std::string& out) {
  emit(csv_text(table), out);
  if (fit.is_null()) return;
  if (out.empty())
    std::cerr << "fit: " << fit.dump() << "\n";
  else
    emit(json_text(fit), out + ".fit.json");
}

void cmd_sample(const RunConfig& cfg) {
  const auto ns = parse_n_list(cfg.n_spec);
  const Hurst h = parse_hurst(cfg.hurst, cfg.q);
  const std::size_t paths = cfg.batch == 0 ? 1 : cfg.batch;
  const auto method = parse_sampler_method(cfg.sampler);
  const bool single = ns.size() == 1 && paths == 1;
  if (!single) {
    if (cfg.out.empty()) throw UsageError("sample: several paths requested; --out must name a directory");
    std::filesystem::create_directories(cfg.out);
  }
  for (std::size_t n : ns) {
    const FgnSampler sampler(h, n, method);
    for (std::size_t i = 0; i < paths; ++i) {
      const Seed seed{cfg.seed, i};
      const FgnPath p = sampler.sample(seed);
      std::string text;
      if (cfg.format == "json") {
        text = json_text(json{{"H", h.value()}, {"n", n}, {"seed", seed.value}, {"stream", seed.stream_id}, {"xi", p.xi}});
      } else {
        std::ostringstream os;
        write_csv(os, p);
        text = os.str();
      }
      if (single) {
        emit(text, cfg.out);
      } else {
        const std::string name = "fgn_n" + std::to_string(n) + "_seed" + std::to_string(cfg.seed) + "_s" +
                                 std::to_string(i) + (cfg.format == "json" ? ".json" : ".csv");
        emit(text, (std::filesystem::path(cfg.out) / name).string());
      }
    }
  }
}

RegimeSpec require_supercritical_cfg(const RunConfig& cfg, const char* who) {
  const auto spec = RegimeSpec::make(HermiteOrder(cfg.q), parse_hurst(cfg.hurst, cfg.q));
  if (spec.regime != Regime::Supercritical)
    throw UsageError(std::string(who) + " requires the supercritical regime H > 1-1/(2q); " + regime_diagnostic(spec));
  return spec;
}

void cmd_discrepancy(const RunConfig& cfg) {
  const auto spec = require_supercritical_cfg(cfg, "discrepancy");
  const auto ns = parse_n_list(cfg.n_spec);
  BracketTable table(spec.q, spec.h);
  io::CsvTable csv({"n", "delta", "l2_error", "normalized"});
  json rows = json::array();
  std::vector<std::pair<double, double>> pts;
  for (std::size_t n : ns) {
    const auto rep = discrepancy(table, n, false);
    csv.add_row({std::to_string(n), io::fmt(rep.delta), io::fmt(rep.l2_error), io::fmt(rep.normalized)});
    rows.push_back(io::to_json(rep));
    pts.emplace_back(static_cast<double>(n), rep.delta);
  }
  const json fit = fit_json(pts, "delta");
  if (cfg.format == "json")
    emit(json_text({{"q", cfg.q}, {"H", spec.h.value()}, {"rows", rows}, {"fit", fit}}), cfg.out);
  else
    emit_csv_with_fit(csv, fit, cfg.out);
}

CriticalSpec require_critical_cfg(const RunConfig& cfg, const char* who) {
  const auto spec = RegimeSpec::make(HermiteOrder(cfg.q), parse_hurst(cfg.hurst, cfg.q));
  if (spec.regime != Regime::Critical)
    throw UsageError(std::string(who) + " requires the critical regime H = 1-1/(2q); " + regime_diagnostic(spec));
  return CriticalSpec(HermiteOrder(cfg.q));
}

BerryOptions berry_options(const RunConfig& cfg) {
  BerryOptions o;
  o.threads = cfg.threads;
  o.antithetic = cfg.antithetic;
  o.method = parse_sampler_method(cfg.sampler);
  return o;
}

void cmd_berry(const RunConfig& cfg) {
  const auto spec = require_critical_cfg(cfg, "berry");
  const auto ns = parse_n_list(cfg.n_spec);
  const std::size_t batch = cfg.batch == 0 ? 2000 : cfg.batch;
  if (batch < 100) throw UsageError("berry: batch must be >= 100 (got " + std::to_string(batch) + ")");
  io::CsvTable csv({"n", "mean_sq", "se", "tv_bound", "batch", "seed"});
  json rows = json::array();
  for (std::size_t n : ns) {
    const auto b = berry_estimate(spec, n, batch, Seed{cfg.seed, 0}, berry_options(cfg));
    csv.add_row({std::to_string(n), io::fmt(b.mean_sq), io::fmt(b.se), io::fmt(b.tv_bound), std::to_string(batch),
                 std::to_string(cfg.seed)});
    rows.push_back(io::to_json(b, cfg.q));
  }
  if (cfg.format == "json")
    emit(json_text({{"rows", rows}}), cfg.out);
  else
    emit(csv_text(csv), cfg.out);
}

// Stream-family tags for the rate sweep; every batch gets its own family.
constexpr std::uint64_t kTagZn = 1ull << 40;
constexpr std::uint64_t kTagProxy = 2ull << 40;
constexpr std::uint64_t kTagCoupled = 3ull << 40;
constexpr std::uint64_t kTagBerry = 4ull << 40;

void cmd_rate(const RunConfig& cfg) {
  const auto spec = RegimeSpec::make(HermiteOrder(cfg.q), parse_hurst(cfg.hurst, cfg.q));
  const auto ns = parse_n_list(cfg.n_spec);
  const std::size_t batch = cfg.batch == 0 ? 2000 : cfg.batch;
  if (batch < 2) throw UsageError("rate: batch must be >= 2");
  const auto method = parse_sampler_method(cfg.sampler);
  const Seed base{cfg.seed, 0};
  json fits = json::object();
  io::CsvTable csv({});
  json rows = json::array();
  auto zn_batch = [&](std::size_t n) {
    return sample_zn(spec, n, batch, derive(base, kTagZn + n), cfg.threads, method);
  };

  if (spec.regime == Regime::Supercritical) {
    if (cfg.big_n < ns.back()) throw UsageError("rate: --big-n must be >= the largest n");
    for (std::size_t n : ns)
      if (cfg.big_n % n != 0) throw UsageError("rate: n=" + std::to_string(n) + " does not divide --big-n");
    const auto proxy = sample_zn(spec, cfg.big_n, batch, derive(base, kTagProxy + cfg.big_n), cfg.threads, method);
    csv = io::CsvTable({"n", "theory", "coupled_mean", "coupled_se", "ks", "w1"});
    const auto theory = tv_rate_curve(spec.q, spec.h, ns);
    std::vector<std::pair<double, double>> ks_pts, l2_pts;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const std::size_t n = ns[i];
      const auto c =
          coupled_l2(spec.q, spec.h, n, cfg.big_n, batch, derive(base, kTagCoupled + n), cfg.threads, method);
      const auto z = zn_batch(n);
      const double ks = ks_two_sample(z, proxy);
      const double w1 = wasserstein1(z, proxy);
      csv.add_row({std::to_string(n), io::fmt(theory[i]), io::fmt(c.mean), io::fmt(c.se), io::fmt(ks), io::fmt(w1)});
      rows.push_back({{"n", n}, {"theory", theory[i]}, {"coupled_mean", c.mean}, {"coupled_se", c.se}, {"ks", ks},
                      {"w1", w1}});
      ks_pts.emplace_back(static_cast<double>(n), ks);
      if (n < cfg.big_n) l2_pts.emplace_back(static_cast<double>(n), c.mean);
    }
    fits["ks"] = fit_json(ks_pts, "ks");
    fits["coupled_l2"] = fit_json(l2_pts, "coupled_l2");
  } else if (spec.regime == Regime::Critical) {
    if (batch < 100) throw UsageError("rate: critical regime needs batch >= 100");
    const CriticalSpec crit(spec.q);
    csv = io::CsvTable({"n", "theory", "tv_bound", "ks", "w1"});
    std::vector<std::pair<double, double>> ks_pts, tv_pts;
    for (std::size_t n : ns) {
      if (n < 2) throw UsageError("rate: critical regime needs n >= 2");
      BerryOptions o;
      o.threads = cfg.threads;
      o.method = method;
      const auto b = berry_estimate(crit, n, batch, derive(base, kTagBerry + n), o);
      const auto z = zn_batch(n);
      const double theory = 1.0 / std::sqrt(std::log(static_cast<double>(n)));
      const double ks = ks_distance(z, standard_normal_cdf);
      const double w1 = wasserstein1_normal(z);
      csv.add_row({std::to_string(n), io::fmt(theory), io::fmt(b.tv_bound), io::fmt(ks), io::fmt(w1)});
      rows.push_back({{"n", n}, {"theory", theory}, {"tv_bound", b.tv_bound}, {"ks", ks}, {"w1", w1}});
      ks_pts.emplace_back(static_cast<double>(n), ks);
      tv_pts.emplace_back(static_cast<double>(n), b.tv_bound);
    }
    fits["ks"] = fit_json(ks_pts, "ks");
    fits["tv_bound"] = fit_json(tv_pts, "tv_bound");
  } else {
    csv = io::CsvTable({"n", "ks", "w1"});
    std::vector<std::pair<double, double>> ks_pts;
    for (std::size_t n : ns) {
      const auto z = zn_batch(n);
      const double ks = ks_distance(z, standard_normal_cdf);
      const double w1 = wasserstein1_normal(z);
      csv.add_row({std::to_string(n), io::fmt(ks), io::fmt(w1)});
      rows.push_back({{"n", n}, {"ks", ks}, {"w1", w1}});
      ks_pts.emplace_back(static_cast<double>(n), ks);
    }
    fits["ks"] = fit_json(ks_pts, "ks");
  }

  if (cfg.format == "json")
    emit(json_text({{"q", cfg.q}, {"H", spec.h.value()}, {"regime", to_string(spec.regime)}, {"batch", batch},
                    {"seed", cfg.seed}, {"rows", rows}, {"fits", fits}}),
         cfg.out);
  else
    emit_csv_with_fit(csv, fits, cfg.out);
}

void cmd_bracket_table(const RunConfig& cfg) {
  const auto spec = require_supercritical_cfg(cfg, "bracket-table");
  if (cfg.r_max < 0) throw UsageError("bracket-table: --r-max must be >= 0");
  BracketTable table(spec.q, spec.h);
  table.ensure(static_cast<std::size_t>(cfg.r_max) + 1);
  io::CsvTable csv({"r", "t1", "t2", "t3", "bracket"});
  json rows = json::array();
  for (long long r = 0; r <= cfg.r_max; ++r) {
    const auto& t = table.at(r);
    csv.add_row({std::to_string(t.r), io::fmt(t.t1), io::fmt(t.t2), io::fmt(t.t3), io::fmt(t.bracket)});
    rows.push_back({{"r", t.r}, {"t1", t.t1}, {"t2", t.t2}, {"t3", t.t3}, {"bracket", t.bracket}});
  }
  if (cfg.format == "json")
    emit(json_text({{"q", cfg.q}, {"H", spec.h.value()}, {"rows", rows}}), cfg.out);
  else
    emit(csv_text(csv), cfg.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hermite variations of fractional Brownian motion"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key=value file; flags given on the command line take precedence");

  RunConfig cfg;
  app.add_option("--q", cfg.q, "Hermite order (2..16)");
  app.add_option("--hurst", cfg.hurst, "Hurst index in (0,1), or 'critical' for 1-1/(2q)");
  // Config files hand comma lists over as arrays; join them back.
  app.add_option("--n", cfg.n_spec, "n list: comma list or dyadic range like 2^8..16")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::Join);
  app.add_option("--batch", cfg.batch, "Monte Carlo batch (paths for 'sample')");
  app.add_option("--seed", cfg.seed, "base seed");
  app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", cfg.out, "output path (stdout if omitted)");
  app.add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--sampler", cfg.sampler, "exact fGn sampler")->check(CLI::IsMember({"circulant", "cholesky"}));
  app.add_option("--big-n", cfg.big_n, "fine resolution N of the Hermite proxy (rate)");
  app.add_option("--r-max", cfg.r_max, "largest lag (bracket-table)");
  app.add_flag("--antithetic", cfg.antithetic, "antithetic path pairs (berry)");

  auto* sample = app.add_subcommand("sample", "write exact fGn paths as CSV");
  auto* disc = app.add_subcommand("discrepancy", "exact L2 discrepancy sweep (supercritical)");
  auto* berry = app.add_subcommand("berry", "Monte Carlo Berry-type bound sweep (critical)");
  auto* rate = app.add_subcommand("rate", "empirical rate sweep for any regime");
  auto* brackets = app.add_subcommand("bracket-table", "per-lag kernel terms (supercritical)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (sample->parsed()) cmd_sample(cfg);
    else if (disc->parsed()) cmd_discrepancy(cfg);
    else if (berry->parsed()) cmd_berry(cfg);
    else if (rate->parsed()) cmd_rate(cfg);
    else if (brackets->parsed()) cmd_bracket_table(cfg);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
