#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "predsaddle/config.hpp"
#include "predsaddle/csv.hpp"
#include "predsaddle/experiments.hpp"
#include "predsaddle/svg.hpp"

using namespace predsaddle;
namespace fs = std::filesystem;

namespace {

fs::path test_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "predsaddle_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_orbit_config() {
  ExperimentConfig c;
  c.experiment = ExperimentKind::bilinear_orbit;
  c.method = "both";
  c.k_matrix = Mat::Ones(1, 1);
  c.alpha = 0.1;
  c.beta = 0.1;
  c.n_steps = 2000;
  c.record_every = 100;
  c.seeds = {1};
  c.u0 = Vec::Ones(1);
  c.v0 = Vec::Zero(1);
  return c;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 1e17, 0.0, 12345.678901234567}) {
    const std::string s = format_double(x);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == x);
  }
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("csv write/read round-trip") {
  const fs::path dir = test_dir("csv");
  CsvTable t;
  t.columns = {"a", "b"};
  t.add_row({1.5, -0.25});
  t.add_row({std::numeric_limits<double>::quiet_NaN(), 3.0});
  write_csv(dir / "t.csv", t);

  const CsvTable back = read_csv(dir / "t.csv");
  REQUIRE(back.columns == t.columns);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0][0] == 1.5);
  CHECK(std::isnan(back.rows[1][0]));
  CHECK(back.rows[1][1] == 3.0);

  const std::string bytes = read_file(dir / "t.csv");
  CHECK(bytes == "a,b\n1.5,-0.25\nnan,3\n");
}

TEST_CASE("csv errors name the offending row") {
  CHECK_THROWS_WITH_AS(parse_csv(""), doctest::Contains("header"), CsvError);
  CHECK_THROWS_WITH_AS(parse_csv("a,b\n1\n"), doctest::Contains("row 1"), CsvError);
  CHECK_THROWS_WITH_AS(parse_csv("a,b\n1,2\n3,zebra\n"), doctest::Contains("row 2"), CsvError);
}

TEST_CASE("config parse/serialize round-trips") {
  ExperimentConfig c = tiny_orbit_config();
  const std::string text = serialize_config(c);
  const ExperimentConfig back = parse_config(text);
  CHECK(back == c);
  CHECK(serialize_config(back) == text);

  ExperimentConfig gan;
  gan.experiment = ExperimentKind::toygan;
  gan.method = "predict";
  gan.seeds = {1, 2, 3, 4, 5};
  gan.n_modes = 8;
  gan.radius = 1.0;
  gan.sigma = 0.01;
  gan.batch_size = 512;
  gan.n_steps = 6000;
  gan.learning_rate = 0.001;
  gan.adam_beta1 = 0.9;
  gan.adam_beta2 = 0.999;
  gan.eval_every = 1000;
  gan.n_probe = 10000;
  gan.objective = "saturating";
  gan.dump_samples = true;
  const ExperimentConfig gan_back = parse_config(serialize_config(gan));
  CHECK(gan_back == gan);
}

TEST_CASE("config hash is stable and sensitive") {
  const ExperimentConfig a = tiny_orbit_config();
  ExperimentConfig b = a;
  CHECK(config_hash(a) == config_hash(b));
  b.alpha = 0.2;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("config parser rejects malformed input with line numbers") {
  CHECK_THROWS_WITH_AS(parse_config("experiment = spectral\nzebra = 1\n"),
                       doctest::Contains("line 2"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("experiment = spectral\nzebra = 1\n"),
                       doctest::Contains("zebra"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("experiment = nope\n"), doctest::Contains("nope"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("alpha = 0.1\n"), doctest::Contains("experiment"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config("experiment = spectral\nalpha = 0.1\nalpha = 0.2\n"),
      doctest::Contains("duplicate"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("experiment = spectral\nalpha = zebra\n"),
                       doctest::Contains("line 2"), ConfigError);
  // key that exists but does not apply to the experiment
  CHECK_THROWS_WITH_AS(
      parse_config("experiment = spectral\nk_matrix = 1\nalpha = 0.1\nbeta = 0.1\nmu = 1\n"),
      doctest::Contains("does not apply"), ConfigError);
  // missing required key
  CHECK_THROWS_WITH_AS(parse_config("experiment = spectral\nalpha = 0.1\nbeta = 0.1\n"),
                       doctest::Contains("k_matrix"), ConfigError);
}

TEST_CASE("seeded experiments demand a nonempty seed list") {
  ExperimentConfig c = tiny_orbit_config();
  c.seeds.clear();
  CHECK_THROWS_WITH_AS(parse_config(serialize_config(c)), doctest::Contains("seeds"),
                       ConfigError);
}

TEST_CASE("theorem_rate only runs the prediction method") {
  const std::string text =
      "experiment = theorem_rate\nmethod = plain\nk_matrix = 1\nmu = 1\nnoise_std = 0.1\n"
      "c_alpha = 0.5\nc_beta = 0.5\nn_steps = 100\nseeds = 1\n";
  CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("predict"), ConfigError);
}

TEST_CASE("run_experiment writes the expected fixed csv schemas") {
  const fs::path dir = test_dir("schemas");
  ExperimentConfig c = tiny_orbit_config();
  c.n_steps = 50;
  c.record_every = 10;
  RunOverrides ov;
  ov.output_dir = (dir / "orbit").string();
  run_experiment(c, ov);
  CHECK(read_file(dir / "orbit" / "bilinear_orbit_plain_seed1.csv")
            .starts_with("k,loss,err_u,err_v,gap_avg,alpha,beta\n"));
  CHECK(read_file(dir / "orbit" / "bilinear_orbit_predict_aggregate.csv")
            .starts_with("k,mean_loss,mean_err_u,mean_err_v,mean_gap_avg\n"));
  CHECK(fs::exists(dir / "orbit" / "manifest.json"));

  ExperimentConfig s;
  s.experiment = ExperimentKind::spectral;
  s.method = "both";
  s.k_matrix = Mat::Ones(1, 1);
  s.alpha = 0.1;
  s.beta = 0.1;
  ov.output_dir = (dir / "spectral").string();
  run_experiment(s, ov);
  CHECK(read_file(dir / "spectral" / "spectral_predict.csv")
            .starts_with("kappa,alpha,beta,trace,det,lambda_re,lambda_im,lambda_mod\n"));

  ExperimentConfig o;
  o.experiment = ExperimentKind::ode_tracking;
  o.method = "both";
  o.k_matrix = Mat::Ones(1, 1);
  o.alpha = 0.05;
  o.beta = 0.05;
  o.horizon = 2.0;
  o.u0 = Vec::Ones(1);
  o.v0 = Vec::Zero(1);
  ov.output_dir = (dir / "ode").string();
  run_experiment(o, ov);
  CHECK(read_file(dir / "ode" / "ode_tracking_plain.csv")
            .starts_with("alpha,beta,n_steps,max_error\n"));
  CHECK(read_file(dir / "ode" / "ode_tracking_summary.csv")
            .starts_with("plain_ratio,predict_ratio\n"));
}

TEST_CASE("bilinear orbit experiment: predict contracts while plain stays bounded") {
  const fs::path dir = test_dir("orbit_behavior");
  ExperimentConfig c = tiny_orbit_config();
  RunOverrides ov;
  ov.output_dir = dir.string();
  const RunManifest manifest = run_experiment(c, ov);
  CHECK_FALSE(manifest.any_collapse);
  CHECK(manifest.aggregate_files.size() == 2);

  const CsvTable plain = read_csv(dir / "bilinear_orbit_plain_aggregate.csv");
  const CsvTable pred = read_csv(dir / "bilinear_orbit_predict_aggregate.csv");
  auto norm_at = [](const CsvTable& t, size_t row) {
    return std::hypot(t.rows[row][2], t.rows[row][3]);
  };
  for (size_t i = 0; i < plain.rows.size(); ++i) {
    CHECK(norm_at(plain, i) >= 0.5);
    CHECK(norm_at(plain, i) <= 1.5);
  }
  // contraction envelope: norms at 500-step checkpoints decrease
  const size_t n = pred.rows.size();
  CHECK(norm_at(pred, n - 1) < norm_at(pred, n / 2));
  CHECK(norm_at(pred, n / 2) < norm_at(pred, n / 4));
  CHECK(norm_at(pred, n - 1) <= 1e-3);
}

TEST_CASE("rerunning a config reproduces identical bytes") {
  const fs::path dir = test_dir("rerun");
  ExperimentConfig c = tiny_orbit_config();
  c.n_steps = 500;
  RunOverrides ov;
  ov.output_dir = (dir / "a").string();
  run_experiment(c, ov);
  ov.output_dir = (dir / "b").string();
  run_experiment(c, ov);
  for (const auto& name :
       {"bilinear_orbit_plain_seed1.csv", "bilinear_orbit_predict_aggregate.csv"})
    CHECK(read_file(dir / "a" / name) == read_file(dir / "b" / name));
}

TEST_CASE("seed override narrows the run to one seed") {
  const fs::path dir = test_dir("seed_override");
  ExperimentConfig c = tiny_orbit_config();
  c.n_steps = 20;
  c.seeds = {1, 2, 3};
  RunOverrides ov;
  ov.output_dir = dir.string();
  ov.seed = 2;
  const RunManifest manifest = run_experiment(c, ov);
  CHECK(manifest.seed_runs.size() == 2);  // one per method
  for (const auto& r : manifest.seed_runs) CHECK(r.seed == 2);
}

TEST_CASE("acceptance subset selection runs exactly the named criteria") {
  std::ostringstream log;
  const auto results =
      run_acceptance({"spectral_contrast", "exclusions"}, test_dir("accept"), log);
  REQUIRE(results.size() == 2);
  CHECK(results[0].name == "spectral_contrast");
  CHECK(results[1].name == "exclusions");
  CHECK(results[0].pass);
  CHECK(log.str().find("PASS spectral_contrast") != std::string::npos);
  CHECK_THROWS_AS(run_acceptance({"zebra"}, test_dir("accept2"), log), std::invalid_argument);
}

TEST_CASE("svg rendering") {
  CsvTable t;
  t.columns = {"k", "value", "other"};
  for (int i = 1; i <= 20; ++i)
    t.add_row({static_cast<double>(i), std::exp(-0.1 * i), 0.5 * i});

  PlotOptions opts;
  const std::string svg = render_plot(t, opts);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("viewBox=\"0 0 800 600\"") != std::string::npos);
  CHECK(svg.find("value") != std::string::npos);  // legend entry
  CHECK(svg.find("other") != std::string::npos);

  PlotOptions log_opts;
  log_opts.log_x = true;
  log_opts.log_y = true;
  CHECK(render_plot(t, log_opts).find("polyline") != std::string::npos);

  // single-row scatter still yields a valid document with one marker
  CsvTable single;
  single.columns = {"step", "x", "y"};
  single.add_row({0, 0.3, -0.7});
  PlotOptions scatter;
  scatter.kind = PlotKind::scatter;
  const std::string dot = render_plot(single, scatter);
  CHECK(dot.find("<circle") != std::string::npos);
  CHECK(dot.find("</svg>") != std::string::npos);

  CsvTable empty;
  empty.columns = {"a", "b"};
  CHECK_THROWS_AS(render_plot(empty, opts), CsvError);
}

TEST_CASE("svg output is byte-stable") {
  CsvTable t;
  t.columns = {"x", "y"};
  t.add_row({1, 2});
  t.add_row({2, 1});
  PlotOptions opts;
  CHECK(render_plot(t, opts) == render_plot(t, opts));
}
