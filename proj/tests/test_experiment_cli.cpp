#include <fmt/format.h>
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "specshare/commands.hpp"
#include "specshare/errors.hpp"
#include "specshare/report.hpp"
#include "specshare/sweep.hpp"

namespace specshare {
namespace {

namespace fs = std::filesystem;

std::string sweep_text(const std::string& config, std::uint64_t seed = 7, unsigned threads = 0) {
  const AppConfig app = build_app_config(ConfigMap::parse(config));
  std::ostringstream out;
  write_sweep_csv(out, run_sweep(app, seed, threads));
  return out.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(ConfigMap, ParsesCommentsAndMerges) {
  auto a = ConfigMap::parse("# header\ntraffic.q1 = 0.3\n\nsweep.grid=0:1:0.5 # trailing\n");
  EXPECT_EQ(a.get("traffic.q1"), "0.3");
  EXPECT_EQ(a.get("sweep.grid"), "0:1:0.5");
  a.merge(ConfigMap::parse("traffic.q1=0.7\ntraffic.q=0.1"));
  EXPECT_EQ(a.get_double("traffic.q1", 0.0), 0.7);
  EXPECT_EQ(a.get_double("traffic.q", 0.0), 0.1);
  EXPECT_THROW(ConfigMap::parse("novalue"), ConfigError);
  EXPECT_THROW(a.get_double("sweep.grid", 0.0), ConfigError);
}

TEST(ConfigMap, Grids) {
  EXPECT_EQ(parse_grid("0:1:0.25"), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(parse_grid("0:1:0.05").size(), 21u);
  EXPECT_EQ(parse_grid("0:1:0.05")[3], 0.15);
  EXPECT_EQ(parse_grid("16,64,128"), (std::vector<double>{16, 64, 128}));
  EXPECT_THROW(parse_grid("1:0:0.1"), ConfigError);
  EXPECT_THROW(parse_grid("0:1:0"), ConfigError);
  EXPECT_THROW(parse_grid("0:1"), ConfigError);
  EXPECT_THROW(parse_grid(""), ConfigError);
}

TEST(BuildAppConfig, DefaultsMirrorScenario) {
  const AppConfig app = build_app_config({});
  const ScenarioConfig d = ScenarioConfig::defaults();
  EXPECT_EQ(app.scenario.links.path_gain, d.links.path_gain);
  EXPECT_EQ(app.scenario.links.noise_power, d.links.noise_power);
  EXPECT_EQ(app.scenario.traffic.q1, 0.5);
  EXPECT_EQ(app.scenario.packet_len, 64u);
  EXPECT_EQ(app.train.fnn.epochs, 30u);
  EXPECT_EQ(app.train.n_test_per_class, 2000u);
}

TEST(BuildAppConfig, KeysApply) {
  const AppConfig app = build_app_config(ConfigMap::parse(
      "links.path_gain=0.5\nlinks.g.13=0.25\nlinks.h.21=2\nlinks.eq2_literal=true\n"
      "errors.pm=0.05\nprofile.16.pm=0.4\nprofile.16.pm1=0.45\nsim.packet_len=16\n"
      "jammer.p3_cap=3\nsweep.param=pbar_max\nsweep.grid=0,1,2\nsweep.mode=both\n"
      "train.sizes=16,32\ntrain.cnn.epochs=4\ndetect.snr_13=-3"));
  EXPECT_EQ(app.scenario.links.path_gain[0][0], 0.5);
  EXPECT_EQ(app.scenario.links.path_gain[0][2], 0.25);
  EXPECT_EQ(app.scenario.links.mean_fading[1][0], 2.0);
  EXPECT_EQ(app.scenario.form, SuccessForm::Literal);
  // Per-size profile for N=16, then the explicit errors.pm on top.
  EXPECT_EQ(app.scenario.errors.pm, 0.05);
  EXPECT_EQ(app.scenario.errors.pm1, 0.45);
  EXPECT_EQ(app.profile_for(64).pm1, ScenarioConfig::default_profile().pm1);
  EXPECT_EQ(app.scenario.p3_cap, 3.0);
  EXPECT_EQ(app.sweep.mode, SweepMode::Both);
  EXPECT_EQ(app.train.sizes, (std::vector<std::size_t>{16, 32}));
  EXPECT_EQ(app.train.cnn.epochs, 4u);
  EXPECT_EQ(app.detection_snrs.incumbent_at_jammer, -3.0);
}

TEST(BuildAppConfig, RejectsInvalid) {
  for (const char* text : {"traffic.qq=1", "traffic.q1=2", "sweep.param=bogus", "sweep.grid=0:2:1",
                           "sweep.param2=q", "sweep.param=q\nsweep.param2=q\nsweep.grid2=0,1",
                           "sim.mode=psychic", "links.g.14=1", "profile.16.pm=1.5", "train.sizes=2",
                           "train.dropout=1", "jammer.pbar_max=-1", "sim.n_slots=0", "sweep.mode=fast"}) {
    EXPECT_THROW(build_app_config(ConfigMap::parse(text)), ConfigError) << text;
  }
}

TEST(BuildAppConfig, ProfilesRoundTripThroughText) {
  std::map<std::size_t, DetectorErrorProfile> profiles{{16, {0.1, 0.2, 0.3, 0.4, 0.05, 0.01}},
                                                        {64, {0.01, 0.02, 0.03, 0.04, 0.005, 0.001}}};
  const AppConfig app = build_app_config(ConfigMap::parse(profiles_to_text(profiles)));
  ASSERT_EQ(app.profiles.size(), 2u);
  EXPECT_EQ(app.profiles.at(16).pm2, 0.4);
  EXPECT_EQ(app.profiles.at(64).pf_j, 0.001);
}

TEST(Sweep, RowsFollowGridOrder) {
  const AppConfig app = build_app_config(ConfigMap::parse("sweep.param=q1\nsweep.grid=0.1,0.2\nsweep.param2=q\nsweep.grid2=0.3,0.6,0.9"));
  const auto rows = run_sweep(app, 1);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].q1, 0.1);
  EXPECT_EQ(rows[0].q, 0.3);
  EXPECT_EQ(rows[2].q, 0.9);
  EXPECT_EQ(rows[3].q1, 0.2);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.aoi2.has_value());
    EXPECT_FALSE(r.aoi2_sim.has_value());
  }
}

TEST(Sweep, AnalyticMatchesAnalyze) {
  const auto app = build_app_config(ConfigMap::parse("sweep.param=p2_db\nsweep.grid=-10,0,10"));
  const auto rows = run_sweep(app, 1);
  for (const auto& r : rows) {
    ScenarioConfig cfg = ScenarioConfig::defaults();
    cfg.links.tx_power[1] = std::pow(10.0, r.p2_db / 10.0);
    const AnalyticResult a = analyze(cfg);
    EXPECT_DOUBLE_EQ(*r.aoi2, a.aoi2);
    EXPECT_DOUBLE_EQ(r.p3, a.jammer.p3_selected);
  }
  EXPECT_LT(*rows[2].aoi2, *rows[0].aoi2);
}

TEST(Sweep, OutputIndependentOfThreadCount) {
  const std::string cfg = "sweep.param=q1\nsweep.grid=0.2:0.8:0.2\nsweep.mode=both\nsim.n_slots=20000";
  EXPECT_EQ(sweep_text(cfg, 3, 1), sweep_text(cfg, 3, 4));
  EXPECT_NE(sweep_text(cfg, 3, 1), sweep_text(cfg, 4, 1));
}

TEST(Sweep, BothModeAgrees) {
  const auto app = build_app_config(ConfigMap::parse(
      "sweep.param=q1\nsweep.grid=0.2,0.5,0.8\nsweep.param2=q\nsweep.grid2=0.5,0.9\nsweep.mode=both\nsim.n_slots=200000"));
  for (const auto& r : run_sweep(app, 11)) {
    EXPECT_NEAR(*r.aoi2_sim, *r.aoi2, 0.01 * *r.aoi2 + 3 * *r.aoi2_sim_stderr) << r.q1 << " " << r.q;
  }
}

TEST(Sweep, PacketLengthNeedsProfiles) {
  EXPECT_THROW(run_sweep(build_app_config(ConfigMap::parse("sweep.param=packet_len\nsweep.grid=16,64")), 1),
               ConfigError);
  const auto app = build_app_config(ConfigMap::parse(
      "sweep.param=packet_len\nsweep.grid=16,64\nprofile.16.pm=0.3\nprofile.64.pm=0.1"));
  const auto rows = run_sweep(app, 1);
  EXPECT_EQ(rows[0].packet_len, 16u);
  EXPECT_GT(rows[0].q2, rows[1].q2);  // more missed incumbents, more secondary transmissions
}

TEST(Sweep, CsvHeaderAndEmptyCells) {
  const std::string text = sweep_text("sweep.param=q\nsweep.grid=0.5");
  const auto header = text.substr(0, text.find('\n'));
  EXPECT_EQ(header, "q1,q,p2_db,packet_len,pbar_max,S1,S2,q2,q3,P3,aoi1,aoi2,aoi1_sim,aoi1_sim_stderr,aoi2_sim,aoi2_sim_stderr");
  EXPECT_EQ(text.substr(text.size() - 5), ",,,,\n");
}

TEST(Report, LinePlotOneCurvePerSeries) {
  const std::string csv = sweep_text("sweep.param=q1\nsweep.grid=0:1:0.1\nsweep.param2=q\nsweep.grid2=0.2,0.5,0.9");
  const std::string svg = render_report(csv);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("aoi2 vs q1 by q"), std::string::npos);
  EXPECT_NE(svg.find("q = 0.9"), std::string::npos);
  std::size_t curves = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++curves;
  // q1 = 0 gives an infinite incumbent age but a finite secondary age: one unbroken line each.
  EXPECT_EQ(curves, 3u);
  EXPECT_EQ(render_report(csv), svg);
}

TEST(Report, MeshBecomesHeatmapOfP3) {
  const std::string csv = sweep_text("sweep.param=q1\nsweep.grid=0:1:0.1\nsweep.param2=q\nsweep.grid2=0:1:0.1");
  const std::string svg = render_report(csv);
  EXPECT_NE(svg.find("P3 over (q1, q)"), std::string::npos);
  std::size_t cells = 0;
  for (auto pos = svg.find("<rect"); pos != std::string::npos; pos = svg.find("<rect", pos + 1)) ++cells;
  EXPECT_GE(cells, 121u);
  ReportOptions line;
  line.kind = PlotKind::Line;
  line.metric = "q3";
  EXPECT_NE(render_report(csv, line).find("q3 vs q1 by q"), std::string::npos);
}

TEST(Report, SchemaErrors) {
  try {
    render_report("q1,q,p2_db,packet_len,S1\n0,0,0,64,1\n");
    FAIL() << "expected a schema error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("pbar_max"), std::string::npos);
  }
  const std::string csv = sweep_text("sweep.param=q\nsweep.grid=0.5,0.6");
  const std::string header = csv.substr(0, csv.find('\n') + 1);
  EXPECT_THROW(render_report(header + "0,0.5\n"), ConfigError);
  EXPECT_THROW(render_report(csv.substr(0, csv.find('\n')) + ",extra\n"), ConfigError);
  ReportOptions opts;
  opts.metric = "aoi2_sim";
  EXPECT_THROW(render_report(csv, opts), ConfigError);  // empty column
}

TEST(Report, EmptyBodyWritesNothing) {
  const fs::path dir = fs::temp_directory_path() / "specshare_report_test";
  fs::create_directories(dir);
  const std::string csv = sweep_text("sweep.param=q\nsweep.grid=0.5");
  std::ofstream(dir / "empty.csv") << csv.substr(0, csv.find('\n') + 1);
  EXPECT_THROW(write_report(dir / "empty.csv", dir / "empty.svg"), ConfigError);
  EXPECT_FALSE(fs::exists(dir / "empty.svg"));
  fs::remove_all(dir);
}

TEST(Commands, SweepAndSimulateAreDeterministic) {
  const fs::path dir = fs::temp_directory_path() / "specshare_cmd_test";
  fs::create_directories(dir);
  std::ofstream(dir / "s.cfg") << "sweep.param=q\nsweep.grid=0.2,0.6\nsweep.mode=both\nsim.n_slots=10000\n";
  std::ostringstream log;
  CommandOptions opts;
  opts.configs = {dir / "s.cfg"};
  opts.seed = 5;
  for (const char* name : {"a", "b"}) {
    opts.out = dir / fmt::format("sweep_{}.csv", name);
    cmd_sweep(opts, log);
    opts.out = dir / fmt::format("sim_{}.csv", name);
    cmd_simulate(opts, log);
  }
  EXPECT_EQ(slurp(dir / "sweep_a.csv"), slurp(dir / "sweep_b.csv"));
  EXPECT_EQ(slurp(dir / "sim_a.csv"), slurp(dir / "sim_b.csv"));
  EXPECT_EQ(slurp(dir / "sim_a.csv").substr(0, 12), "mode,n_slots");

  opts.out = dir / "plot.csv";
  opts.svg = true;
  cmd_sweep(opts, log);
  EXPECT_TRUE(fs::exists(dir / "plot.svg"));
  fs::remove_all(dir);
}

TEST(Commands, SignalModeNeedsWeights) {
  const fs::path dir = fs::temp_directory_path() / "specshare_cmd_signal";
  fs::create_directories(dir);
  std::ofstream(dir / "s.cfg") << "sim.mode=signal\n";
  CommandOptions opts;
  opts.configs = {dir / "s.cfg"};
  opts.out = dir / "x.csv";
  std::ostringstream log;
  EXPECT_THROW(cmd_simulate(opts, log), ConfigError);
  EXPECT_THROW(load_app_config({dir / "missing.cfg"}), ConfigError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace specshare
