#include "predsaddle/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "predsaddle/csv.hpp"
#include "predsaddle/dynamics.hpp"
#include "predsaddle/gan.hpp"
#include "predsaddle/theorem.hpp"

namespace predsaddle {

namespace {

namespace fs = std::filesystem;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::vector<Method> methods_of(const std::string& method) {
  if (method == "plain") return {Method::plain};
  if (method == "predict") return {Method::predict};
  return {Method::plain, Method::predict};
}

std::string method_name(Method m) { return m == Method::plain ? "plain" : "predict"; }

Updater updater_from(const ExperimentConfig& cfg) {
  const std::string kind = cfg.updater.value_or("sgd");
  if (kind == "sgd") return Updater::sgd();
  if (kind == "momentum") return Updater::momentum_sgd(cfg.momentum.value_or(0.9));
  return Updater::adam(cfg.adam_beta1.value_or(0.9), cfg.adam_beta2.value_or(0.999),
                       cfg.adam_epsilon.value_or(1e-8));
}

CsvTable trajectory_table(const TrajectoryRecord& rec) {
  CsvTable t;
  t.columns = {"k", "loss", "err_u", "err_v", "gap_avg", "alpha", "beta"};
  for (const auto& r : rec.rows)
    t.add_row({static_cast<double>(r.k), r.loss, r.err_u, r.err_v, r.gap_avg, r.alpha, r.beta});
  return t;
}

struct ExperimentContext {
  const ExperimentConfig& cfg;
  fs::path out_dir;
  RunManifest& manifest;

  void add_aggregate(const std::string& name, const CsvTable& table) const {
    write_csv(out_dir / name, table);
    manifest.aggregate_files.push_back(name);
  }
};

void run_bilinear_orbit(const ExperimentContext& ctx) {
  const auto& cfg = ctx.cfg;
  ProblemPtr problem = make_bilinear(*cfg.k_matrix);
  const Vec u0 = cfg.u0.value_or(Vec::Ones(problem->dim_u()));
  const Vec v0 = cfg.v0.value_or(Vec::Ones(problem->dim_v()));

  for (Method m : methods_of(cfg.method)) {
    std::vector<TrajectoryRecord> records;
    std::vector<std::uint64_t> completed;
    for (std::uint64_t seed : cfg.seeds) {
      ProblemPtr p = problem;
      if (cfg.noise_std.value_or(0) > 0)
        p = with_noise(problem, NoisyGradientConfig{*cfg.noise_std, seed});
      RunOptions opts;
      opts.method = m;
      opts.sched_u = Schedule::constant(*cfg.alpha);
      opts.sched_v = Schedule::constant(*cfg.beta);
      opts.updater_u = updater_from(cfg);
      opts.updater_v = updater_from(cfg);
      opts.n_steps = *cfg.n_steps;
      opts.record_every = cfg.record_every.value_or(1);
      opts.seed = seed;

      const double t0 = now_seconds();
      TrajectoryRecord rec = run(*p, u0, v0, opts);
      const double wall = now_seconds() - t0;

      const std::string file =
          "bilinear_orbit_" + method_name(m) + "_seed" + std::to_string(seed) + ".csv";
      write_csv(ctx.out_dir / file, trajectory_table(rec));
      ctx.manifest.seed_runs.push_back(SeedRunInfo{seed, {file}, wall, rec.collapsed});
      if (!rec.collapsed) {
        completed.push_back(seed);
        records.push_back(std::move(rec));
      } else {
        ctx.manifest.any_collapse = true;
      }
    }
    if (records.empty()) continue;
    CsvTable agg;
    agg.columns = {"k", "mean_loss", "mean_err_u", "mean_err_v", "mean_gap_avg"};
    const size_t n_rows = records.front().rows.size();
    for (size_t i = 0; i < n_rows; ++i) {
      double loss = 0, eu = 0, ev = 0, gap = 0;
      for (const auto& rec : records) {
        loss += rec.rows[i].loss;
        eu += rec.rows[i].err_u;
        ev += rec.rows[i].err_v;
        gap += rec.rows[i].gap_avg;
      }
      const double n = static_cast<double>(records.size());
      agg.add_row({static_cast<double>(records.front().rows[i].k), loss / n, eu / n, ev / n,
                   gap / n});
    }
    ctx.add_aggregate("bilinear_orbit_" + method_name(m) + "_aggregate.csv", agg);
  }
}

void run_spectral(const ExperimentContext& ctx) {
  const auto& cfg = ctx.cfg;
  for (Method m : methods_of(cfg.method)) {
    const UpdateMapSpectrum spec = update_map_spectrum(m, *cfg.k_matrix, *cfg.alpha, *cfg.beta);
    CsvTable t;
    t.columns = {"kappa", "alpha", "beta", "trace", "det", "lambda_re", "lambda_im", "lambda_mod"};
    for (const auto& mode : spec.modes)
      t.add_row({mode.kappa, spec.alpha, spec.beta, mode.M.trace(), mode.det,
                 mode.lambda1.real(), mode.lambda1.imag(), std::abs(mode.lambda1)});
    ctx.add_aggregate("spectral_" + method_name(m) + ".csv", t);
  }
}

void run_ode_tracking(const ExperimentContext& ctx) {
  const auto& cfg = ctx.cfg;
  const Mat K = *cfg.k_matrix;
  const Vec u0 = cfg.u0.value_or(Vec::Ones(K.cols()));
  const Vec v0 = cfg.v0.value_or(Vec::Ones(K.rows()));

  double ratio_plain = kNaN, ratio_predict = kNaN;
  for (Method m : methods_of(cfg.method)) {
    CsvTable t;
    t.columns = {"alpha", "beta", "n_steps", "max_error"};
    double errs[2] = {0, 0};
    for (int level = 0; level < 2; ++level) {
      const double scale = level == 0 ? 1.0 : 0.5;
      const double a = *cfg.alpha * scale;
      const double b = *cfg.beta * scale;
      errs[level] = trajectory_vs_ode(m, K, a, b, u0, v0, *cfg.horizon);
      t.add_row({a, b, std::ceil(*cfg.horizon / a), errs[level]});
    }
    (m == Method::plain ? ratio_plain : ratio_predict) = errs[0] / errs[1];
    ctx.add_aggregate("ode_tracking_" + method_name(m) + ".csv", t);
  }
  CsvTable summary;
  summary.columns = {"plain_ratio", "predict_ratio"};
  summary.add_row({ratio_plain, ratio_predict});
  ctx.add_aggregate("ode_tracking_summary.csv", summary);
}

void run_theorem_rate(const ExperimentContext& ctx) {
  const auto& cfg = ctx.cfg;
  const RegularizedSaddle problem(*cfg.k_matrix, *cfg.mu);
  RateMeasureOptions opts;
  if (cfg.fit_l_min) opts.fit_l_min = *cfg.fit_l_min;
  if (cfg.u0) opts.u0 = *cfg.u0;
  if (cfg.v0) opts.v0 = *cfg.v0;

  const double t0 = now_seconds();
  const RateFit fit = measure_rate(problem, *cfg.noise_std, *cfg.c_alpha, *cfg.c_beta,
                                   *cfg.n_steps, cfg.seeds, opts);
  const double wall = (now_seconds() - t0) / static_cast<double>(cfg.seeds.size());

  for (size_t j = 0; j < cfg.seeds.size(); ++j) {
    CsvTable t;
    t.columns = {"l", "gap"};
    for (size_t i = 0; i < fit.ls.size(); ++i)
      t.add_row({static_cast<double>(fit.ls[i]), fit.seed_gap[j][i]});
    const std::string file = "theorem_rate_seed" + std::to_string(cfg.seeds[j]) + ".csv";
    write_csv(ctx.out_dir / file, t);
    ctx.manifest.seed_runs.push_back(
        SeedRunInfo{cfg.seeds[j], {file}, wall, fit.seed_collapsed[j]});
    if (fit.seed_collapsed[j]) ctx.manifest.any_collapse = true;
  }

  const BoundConstants inflated = fit.constants.inflated(1.1);
  const BoundCheck check = check_bound_holds(fit, inflated);
  CsvTable agg;
  agg.columns = {"l", "mean_gap", "mean_running_gap", "bound", "ok"};
  for (size_t i = 0; i < fit.ls.size(); ++i)
    agg.add_row({static_cast<double>(fit.ls[i]), fit.mean_gap[i], fit.mean_running_gap[i],
                 evaluate_bound(inflated, fit.ls[i]), check.ok[i] ? 1.0 : 0.0});
  ctx.add_aggregate("theorem_rate_aggregate.csv", agg);

  CsvTable fit_table;
  fit_table.columns = {"slope_of_mean", "intercept_of_mean", "running_slope_of_mean",
                       "slope_mean", "slope_std", "violations", "g_u", "g_v", "d_u", "d_v",
                       "l_v", "c_alpha", "c_beta"};
  fit_table.add_row({fit.slope_of_mean, fit.intercept_of_mean, fit.running_slope_of_mean,
                     fit.slope_mean, fit.slope_std, static_cast<double>(check.violations),
                     fit.constants.g_u, fit.constants.g_v, fit.constants.d_u, fit.constants.d_v,
                     fit.constants.l_v, fit.constants.c_alpha, fit.constants.c_beta});
  ctx.add_aggregate("theorem_rate_fit.csv", fit_table);
}

void run_toygan(const ExperimentContext& ctx) {
  const auto& cfg = ctx.cfg;
  GanConfig gan_cfg;
  gan_cfg.data.n_modes = static_cast<int>(*cfg.n_modes);
  gan_cfg.data.radius = *cfg.radius;
  gan_cfg.data.sigma = *cfg.sigma;
  gan_cfg.batch_size = static_cast<int>(*cfg.batch_size);
  if (cfg.objective)
    gan_cfg.objective = *cfg.objective == "saturating" ? GanObjective::saturating
                                                       : GanObjective::non_saturating;

  for (Method m : methods_of(cfg.method)) {
    std::vector<std::vector<CoveragePoint>> curves;
    for (std::uint64_t seed : cfg.seeds) {
      GanTrainOptions opts;
      opts.method = m;
      opts.learning_rate = cfg.learning_rate.value_or(1e-3);
      opts.adam_beta1 = cfg.adam_beta1.value_or(0.9);
      opts.adam_beta2 = cfg.adam_beta2.value_or(0.999);
      opts.adam_epsilon = cfg.adam_epsilon.value_or(1e-8);
      opts.n_steps = *cfg.n_steps;
      opts.seed = seed;
      opts.record_every = cfg.record_every.value_or(100);
      opts.eval_every = cfg.eval_every.value_or(500);
      opts.n_probe = cfg.n_probe.value_or(10000);
      opts.threshold_sigmas = cfg.threshold_sigmas.value_or(3.0);
      opts.min_fraction = cfg.min_fraction.value_or(0.2);

      const double t0 = now_seconds();
      const GanTrainResult result = train_gan(gan_cfg, opts);
      const double wall = now_seconds() - t0;

      const std::string stem = "toygan_" + method_name(m) + "_seed" + std::to_string(seed);
      SeedRunInfo info{seed, {}, wall, result.trajectory.collapsed};

      CsvTable loss_t;
      loss_t.columns = {"k", "loss"};
      for (const auto& r : result.trajectory.rows)
        loss_t.add_row({static_cast<double>(r.k), r.loss});
      write_csv(ctx.out_dir / (stem + ".csv"), loss_t);
      info.files.push_back(stem + ".csv");

      CsvTable cov_t;
      cov_t.columns = {"step", "covered"};
      for (const auto& p : result.coverage)
        cov_t.add_row({static_cast<double>(p.step), static_cast<double>(p.covered)});
      write_csv(ctx.out_dir / (stem + "_coverage.csv"), cov_t);
      info.files.push_back(stem + "_coverage.csv");

      if (cfg.dump_samples.value_or(true)) {
        CsvTable samples;
        samples.columns = {"step", "x", "y"};
        const std::int64_t final_step =
            result.coverage.empty() ? 0 : result.coverage.back().step;
        for (Eigen::Index i = 0; i < result.final_samples.cols(); ++i)
          samples.add_row({static_cast<double>(final_step), result.final_samples(0, i),
                           result.final_samples(1, i)});
        write_csv(ctx.out_dir / (stem + "_samples.csv"), samples);
        info.files.push_back(stem + "_samples.csv");
      }

      if (result.trajectory.collapsed) {
        ctx.manifest.any_collapse = true;
      } else {
        curves.push_back(result.coverage);
      }
      ctx.manifest.seed_runs.push_back(std::move(info));
    }
    if (curves.empty()) continue;
    size_t min_len = curves.front().size();
    for (const auto& c : curves) min_len = std::min(min_len, c.size());
    CsvTable agg;
    agg.columns = {"step", "mean_covered", "min_covered", "max_covered"};
    for (size_t i = 0; i < min_len; ++i) {
      double sum = 0, lo = 1e300, hi = -1e300;
      for (const auto& c : curves) {
        sum += c[i].covered;
        lo = std::min(lo, static_cast<double>(c[i].covered));
        hi = std::max(hi, static_cast<double>(c[i].covered));
      }
      agg.add_row({static_cast<double>(curves.front()[i].step),
                   sum / static_cast<double>(curves.size()), lo, hi});
    }
    ctx.add_aggregate("toygan_" + method_name(m) + "_coverage_aggregate.csv", agg);
  }
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& cfg, const RunOverrides& overrides) {
  ExperimentConfig c = cfg;
  if (overrides.seed) c.seeds = {*overrides.seed};
  if (overrides.output_dir) c.output_dir = *overrides.output_dir;

  RunManifest manifest;
  manifest.config_hash = config_hash(c);
  manifest.version = PREDSADDLE_VERSION;
  manifest.experiment = to_string(c.experiment);

  const fs::path out_dir(c.output_dir);
  fs::create_directories(out_dir);
  const ExperimentContext ctx{c, out_dir, manifest};

  switch (c.experiment) {
    case ExperimentKind::bilinear_orbit: run_bilinear_orbit(ctx); break;
    case ExperimentKind::spectral: run_spectral(ctx); break;
    case ExperimentKind::ode_tracking: run_ode_tracking(ctx); break;
    case ExperimentKind::theorem_rate: run_theorem_rate(ctx); break;
    case ExperimentKind::toygan: run_toygan(ctx); break;
  }

  write_manifest(out_dir / "manifest.json", manifest);
  return manifest;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  nlohmann::json j;
  j["config_hash"] = manifest.config_hash;
  j["version"] = manifest.version;
  j["experiment"] = manifest.experiment;
  j["any_collapse"] = manifest.any_collapse;
  j["aggregate_files"] = manifest.aggregate_files;
  j["seed_runs"] = nlohmann::json::array();
  for (const auto& run : manifest.seed_runs) {
    j["seed_runs"].push_back({{"seed", run.seed},
                              {"files", run.files},
                              {"wall_seconds", run.wall_seconds},
                              {"collapsed", run.collapsed}});
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write manifest: " + path.string());
  f << j.dump(2) << "\n";
}

}  // namespace predsaddle
