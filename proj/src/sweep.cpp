#include "specshare/sweep.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "specshare/errors.hpp"
#include "specshare/slotted_sim.hpp"

namespace specshare {

namespace {

SweepRow evaluate_point(const ScenarioConfig& cfg, double p2_db, SweepMode mode) {
  const AnalyticResult a = analyze(cfg);
  SweepRow row;
  row.q1 = cfg.traffic.q1;
  row.q = cfg.traffic.q;
  row.p2_db = p2_db;
  row.packet_len = cfg.packet_len;
  row.pbar_max = cfg.pbar_max;
  row.s1 = a.s1;
  row.s2 = a.s2;
  row.q2 = a.q2;
  row.q3 = a.q3;
  row.p3 = a.jammer.p3_selected;
  if (mode != SweepMode::Simulate) {
    row.aoi1 = a.aoi1;
    row.aoi2 = a.aoi2;
  }
  if (mode != SweepMode::Analytic) {
    const SimReport r = run_slotted(cfg);
    row.aoi1_sim = r.aoi1.mean_age();
    row.aoi1_sim_stderr = r.aoi1.mean_std_error();
    row.aoi2_sim = r.aoi2.mean_age();
    row.aoi2_sim_stderr = r.aoi2.mean_std_error();
  }
  return row;
}

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{}", value);
}

std::vector<std::vector<std::pair<std::string, double>>> sweep_points(const SweepSpec& spec) {
  std::vector<std::vector<std::pair<std::string, double>>> points;
  for (double v : spec.grid) {
    if (!spec.param2) {
      points.push_back({{spec.param, v}});
      continue;
    }
    for (double w : spec.grid2) points.push_back({{spec.param, v}, {*spec.param2, w}});
  }
  return points;
}

ScenarioConfig scenario_at(const AppConfig& app, const std::vector<std::pair<std::string, double>>& point) {
  ScenarioConfig cfg = app.scenario;
  for (const auto& [name, value] : point) {
    if (name == "q1") {
      cfg.traffic.q1 = value;
    } else if (name == "q") {
      cfg.traffic.q = value;
    } else if (name == "p2_db") {
      cfg.links.tx_power[1] = app.p2_reference * std::pow(10.0, value / 10.0);
    } else if (name == "pbar_max") {
      cfg.pbar_max = value;
    } else if (name == "packet_len") {
      const auto n = static_cast<std::size_t>(value);
      if (!app.profiles.count(n)) {
        throw ConfigError(fmt::format(
            "sweeping packet_len needs a detector profile for N={} (profile.{}.* keys)", n, n));
      }
      if (cfg.mode == SensingMode::Signal) {
        throw ConfigError("packet_len cannot be swept in signal mode");
      }
      cfg.packet_len = n;
      cfg.errors = app.profile_for(n);
    } else {
      throw ConfigError(fmt::format("unknown sweep parameter '{}'", name));
    }
  }
  return cfg;
}

std::vector<SweepRow> run_sweep(const AppConfig& app, std::uint64_t seed, unsigned threads) {
  app.sweep.validate();
  const auto points = sweep_points(app.sweep);
  std::vector<ScenarioConfig> configs;
  std::vector<double> p2_db(points.size(), 0.0);
  configs.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    ScenarioConfig cfg = scenario_at(app, points[i]);
    cfg.seed = derive_seed(seed, i);
    cfg.validate();
    for (const auto& [name, value] : points[i]) {
      if (name == "p2_db") p2_db[i] = value;
    }
    configs.push_back(std::move(cfg));
  }

  std::vector<SweepRow> rows(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        rows[i] = evaluate_point(configs[i], p2_db[i], app.sweep.mode);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, points.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << fmt::format("{}\n", fmt::join(sweep_columns(), ","));
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", format_number(r.q1),
                       format_number(r.q), format_number(r.p2_db), r.packet_len,
                       format_number(r.pbar_max), format_number(r.s1), format_number(r.s2),
                       format_number(r.q2), format_number(r.q3), format_number(r.p3), cell(r.aoi1),
                       cell(r.aoi2), cell(r.aoi1_sim), cell(r.aoi1_sim_stderr), cell(r.aoi2_sim),
                       cell(r.aoi2_sim_stderr));
  }
}

}  // namespace specshare
