#include "specshare/commands.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <fstream>
#include <memory>
#include <sstream>

#include "specshare/errors.hpp"
#include "specshare/slotted_sim.hpp"
#include "specshare/sweep.hpp"

namespace specshare {

namespace {

enum TrainStream : std::uint64_t {
  kTrainData = 1,
  kTestData = 2,
  kFnnInit = 3,
  kCnnInit = 4,
  kFnnShuffle = 5,
  kCnnShuffle = 6,
  kProfileData = 7,
};

std::uint64_t stream_seed(std::uint64_t seed, std::size_t n, std::uint64_t stream, std::uint64_t extra = 0) {
  return derive_seed(derive_seed(derive_seed(seed, n), stream), extra);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

std::filesystem::path output_path(const CommandOptions& opts, const char* fallback) {
  return opts.out ? *opts.out : std::filesystem::path(fallback);
}

}  // namespace

AppConfig load_app_config(const std::vector<std::filesystem::path>& paths) {
  ConfigMap merged;
  for (const auto& p : paths) merged.merge(ConfigMap::load(p));
  return build_app_config(merged);
}

void attach_detectors(AppConfig& app) {
  ScenarioConfig& s = app.scenario;
  if (s.mode != SensingMode::Signal) return;
  if (!app.cnn_weights || !app.fnn_weights) {
    throw ConfigError("signal mode needs detect.cnn and detect.fnn weight files");
  }
  auto cnn = std::make_shared<NetworkModel>(load_model(*app.cnn_weights));
  auto fnn = std::make_shared<NetworkModel>(load_model(*app.fnn_weights));
  if (cnn->architecture() != "cnn" || fnn->architecture() != "fnn") {
    throw ConfigError("detect.cnn must hold a CNN and detect.fnn an FNN");
  }
  s.detectors = DetectorPair{std::move(cnn), std::move(fnn), app.detection_snrs};
}

TrainedDetectors train_detectors(const TrainSpec& spec, const DetectionSnrs& snrs, const ProgressFn& progress) {
  spec.validate();
  TrainedDetectors out;
  for (std::size_t n : spec.sizes) {
    for (std::uint64_t seed : spec.seeds) {
      for (const std::string arch : {"fnn", "cnn"}) {
        const bool is_fnn = arch == "fnn";
        const ArchitectureBudget& budget = is_fnn ? spec.fnn : spec.cnn;
        const auto data = generate_dataset(budget.n_per_class, n, spec.snr_grid, 0.5,
                                           stream_seed(seed, n, kTrainData, is_fnn ? 0 : 1));
        TrainConfig cfg;
        cfg.epochs = static_cast<int>(budget.epochs);
        cfg.batch_size = spec.batch_size;
        cfg.learning_rate = spec.learning_rate;
        cfg.dropout_rate = spec.dropout;
        cfg.seed = stream_seed(seed, n, is_fnn ? kFnnShuffle : kCnnShuffle);
        const std::uint64_t init = stream_seed(seed, n, is_fnn ? kFnnInit : kCnnInit);
        NetworkModel model = is_fnn ? build_fnn(n, init, spec.dropout) : build_cnn(n, init, spec.dropout);
        if (progress) progress(fmt::format("training {} N={} seed={} ({} params)", arch, n, seed, model.parameter_count()));
        model = train(std::move(model), data, cfg).model;

        for (std::size_t k = 0; k < spec.snr_grid.size(); ++k) {
          const auto test = generate_dataset(spec.n_test_per_class, n, spec.snr_grid[k], 0.5,
                                             stream_seed(seed, n, kTestData, k));
          out.rows.push_back({arch, n, model.parameter_count(), seed, spec.snr_grid[k], evaluate(model, test)});
        }
        out.models.emplace(std::make_tuple(arch, n, seed), std::move(model));
      }
    }
    const std::uint64_t first = spec.seeds.front();
    out.profiles[n] = extract_error_profile(out.models.at({"cnn", n, first}), out.models.at({"fnn", n, first}),
                                            snrs, spec.profile_n_per_class, stream_seed(first, n, kProfileData));
  }
  return out;
}

void write_accuracy_csv(std::ostream& out, const std::vector<AccuracyRow>& rows) {
  out << fmt::format("{}\n", fmt::join(accuracy_columns(), ","));
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", r.arch, r.packet_len, r.params, r.seed,
                       format_number(r.snr_db), format_number(r.report.accuracy),
                       format_number(r.report.pm), format_number(r.report.pf));
  }
}

void cmd_train_detector(const CommandOptions& opts, std::ostream& log) {
  AppConfig app = load_app_config(opts.configs);
  if (opts.seed) app.train.seeds = {*opts.seed};
  const auto csv = output_path(opts, "detector_accuracy.csv");
  const auto stem = csv.stem().string();
  const auto dir = csv.parent_path();

  const TrainedDetectors trained =
      train_detectors(app.train, app.detection_snrs, [&](const std::string& msg) { log << msg << '\n' << std::flush; });

  std::ostringstream table;
  write_accuracy_csv(table, trained.rows);
  write_text(csv, table.str());
  log << "wrote " << csv.string() << '\n';

  for (const auto& [key, model] : trained.models) {
    const auto& [arch, n, seed] = key;
    const auto path = dir / fmt::format("{}_weights", stem) / fmt::format("{}_n{}_seed{}.txt", arch, n, seed);
    std::filesystem::create_directories(path.parent_path());
    save_model(model, path);
    log << "wrote " << path.string() << '\n';
  }

  const auto profiles = dir / fmt::format("{}_profiles.cfg", stem);
  write_text(profiles, profiles_to_text(trained.profiles));
  log << "wrote " << profiles.string() << '\n';
}

void cmd_sweep(const CommandOptions& opts, std::ostream& log) {
  AppConfig app = load_app_config(opts.configs);
  if (opts.mode) app.sweep.mode = *opts.mode;
  const std::uint64_t seed = opts.seed.value_or(app.scenario.seed);
  attach_detectors(app);
  const auto rows = run_sweep(app, seed);

  const auto csv = output_path(opts, "sweep.csv");
  std::ostringstream table;
  write_sweep_csv(table, rows);
  write_text(csv, table.str());
  log << "wrote " << csv.string() << " (" << rows.size() << " rows)\n";
  if (opts.svg) {
    auto svg = csv;
    svg.replace_extension(".svg");
    write_text(svg, render_report(table.str(), opts.report));
    log << "wrote " << svg.string() << '\n';
  }
}

void cmd_simulate(const CommandOptions& opts, std::ostream& log) {
  AppConfig app = load_app_config(opts.configs);
  ScenarioConfig& cfg = app.scenario;
  if (opts.seed) cfg.seed = *opts.seed;
  attach_detectors(app);
  const AnalyticResult a = analyze(cfg);
  const SimReport r = run_slotted(cfg);
  const DetectorErrorProfile e = r.sensing.rates();

  std::vector<std::string> cells{
      cfg.mode == SensingMode::Signal ? "signal" : "probabilistic",
      std::to_string(cfg.n_slots),
      std::to_string(cfg.seed),
      format_number(cfg.traffic.q1),
      format_number(cfg.traffic.q),
      std::to_string(cfg.packet_len),
      format_number(cfg.pbar_max),
      format_number(a.jammer.p3_selected),
      format_number(a.q2),
      format_number(a.q3),
      format_number(r.empirical_q2()),
      format_number(r.empirical_q3()),
      format_number(r.average_jamming_power()),
      format_number(a.s1),
      format_number(a.s2),
      format_number(r.success_rate(Node::Incumbent)),
      format_number(r.success_rate(Node::Secondary)),
      format_number(a.aoi1),
      format_number(a.aoi2),
      format_number(r.aoi1.mean_age()),
      format_number(r.aoi1.mean_std_error()),
      format_number(r.aoi2.mean_age()),
      format_number(r.aoi2.mean_std_error()),
      format_number(e.pm),
      format_number(e.pf),
      format_number(e.pm1),
      format_number(e.pm2),
      format_number(e.pm12),
      format_number(e.pf_j),
  };
  const auto csv = output_path(opts, "simulate.csv");
  write_text(csv, fmt::format("{}\n{}\n", fmt::join(simulate_columns(), ","), fmt::join(cells, ",")));
  log << "wrote " << csv.string() << '\n';
  for (const auto& w : cfg.errors.warnings()) log << "warning: " << w << '\n';
  const BudgetCheck budget = empirical_jammer_budget_check(r, cfg.pbar_max);
  if (!budget.within_budget) {
    log << fmt::format("warning: measured average jamming power {} exceeds the budget {} by more than 1% "
                       "(short run, or detectors firing more often than the configured error profile)\n",
                       format_number(budget.measured), format_number(cfg.pbar_max));
  }
}

void cmd_report(const CommandOptions& opts, std::ostream& log) {
  if (!opts.input) throw ConfigError("report needs an input sweep CSV");
  std::filesystem::path svg = opts.out ? *opts.out : std::filesystem::path(*opts.input).replace_extension(".svg");
  write_report(*opts.input, svg, opts.report);
  log << "wrote " << svg.string() << '\n';
}

}  // namespace specshare
