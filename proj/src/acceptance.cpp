#include "predsaddle/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "predsaddle/dynamics.hpp"
#include "predsaddle/experiments.hpp"
#include "predsaddle/gan.hpp"
#include "predsaddle/theorem.hpp"

namespace predsaddle {

namespace {

namespace fs = std::filesystem;

// Step budget for the toy GAN runs, fixed from a pilot sweep; also mirrored in
// configs/toygan8.cfg.
constexpr std::int64_t kToyganSteps = 13000;
constexpr std::int64_t kToyganEvalEvery = 1000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

Outcome spectral_contrast() {
  const auto plain = discrete_map(Method::plain, 1.0, 0.1, 0.1);
  const auto pred = discrete_map(Method::predict, 1.0, 0.1, 0.1);
  const double plain_det_err = std::abs(plain.modes[0].det - 1.0);
  const double plain_mod_err = std::max(std::abs(std::abs(plain.modes[0].lambda1) - 1.0),
                                        std::abs(std::abs(plain.modes[0].lambda2) - 1.0));
  const double pred_det_err = std::abs(pred.modes[0].det - 0.99);
  const double pred_rho_err = std::abs(pred.spectral_radius - std::sqrt(0.99));
  Outcome o;
  o.pass = plain_det_err <= 1e-12 && plain_mod_err <= 1e-12 && pred_det_err <= 1e-12 &&
           pred_rho_err <= 1e-9;
  o.detail = "plain |det-1|=" + fmt(plain_det_err) + " ||lambda|-1|=" + fmt(plain_mod_err) +
             "; predict |det-0.99|=" + fmt(pred_det_err) +
             " |rho-sqrt(0.99)|=" + fmt(pred_rho_err);
  return o;
}

Outcome convergence_contrast() {
  const ProblemPtr problem = make_bilinear(Mat::Ones(1, 1));
  const Vec u0 = Vec::Ones(1);
  const Vec v0 = Vec::Zero(1);
  RunOptions opts;
  opts.sched_u = Schedule::constant(0.1);
  opts.sched_v = Schedule::constant(0.1);
  opts.n_steps = 2000;
  opts.record_every = 2000;

  opts.method = Method::predict;
  const TrajectoryRecord pred = run(*problem, u0, v0, opts);
  opts.method = Method::plain;
  const TrajectoryRecord plain = run(*problem, u0, v0, opts);

  const double pred_norm = std::hypot(pred.u_final.norm(), pred.v_final.norm());
  const double plain_norm = std::hypot(plain.u_final.norm(), plain.v_final.norm());
  Outcome o;
  o.pass = !pred.collapsed && !plain.collapsed && pred_norm <= 1e-3 && plain_norm >= 0.5 &&
           plain_norm <= 1.5;
  o.detail = "predict |state|=" + fmt(pred_norm) + " (<=0.001); plain |state|=" +
             fmt(plain_norm) + " (in [0.5,1.5])";
  return o;
}

Outcome ode_tracking() {
  const Mat K = Mat::Ones(1, 1);
  const Vec u0 = Vec::Ones(1);
  const Vec v0 = Vec::Zero(1);
  Outcome o;
  o.pass = true;
  for (Method m : {Method::plain, Method::predict}) {
    const double e_full = trajectory_vs_ode(m, K, 1e-2, 1e-2, u0, v0, 10.0);
    const double e_half = trajectory_vs_ode(m, K, 5e-3, 5e-3, u0, v0, 10.0);
    const double ratio = e_full / e_half;
    const bool ok = e_full <= 0.1 && ratio >= 1.6 && ratio <= 2.6;
    o.pass = o.pass && ok;
    o.detail += std::string(m == Method::plain ? "plain" : "predict") + " err=" + fmt(e_full) +
                " ratio=" + fmt(ratio) + " (in [1.6,2.6]); ";
  }
  return o;
}

Outcome theorem_rate() {
  const RegularizedSaddle problem(Mat::Ones(1, 1), 1.0);
  const RateFit fit = measure_rate(problem, 0.1, 0.5, 0.5, 100000, {1, 2, 3, 4, 5});
  const BoundCheck check = check_bound_holds(fit, fit.constants.inflated(1.1));
  Outcome o;
  o.pass = fit.has_fit && fit.slope_of_mean >= -0.7 && fit.slope_of_mean <= -0.3 &&
           check.violations == 0;
  o.detail = "averaged-gap slope=" + fmt(fit.slope_of_mean) +
             " (required in [-0.7,-0.3]); running-mean-gap slope=" +
             fmt(fit.running_slope_of_mean) + " (diagnostic, envelope rate); bound violations=" +
             std::to_string(check.violations) + "/" + std::to_string(fit.ls.size());
  return o;
}

Outcome lemma_residuals() {
  const RegularizedSaddle problem(Mat::Ones(1, 1), 1.0);
  RunOptions opts;
  opts.method = Method::predict;
  opts.sched_u = Schedule::inverse_sqrt(0.5);
  opts.sched_v = Schedule::inverse_sqrt(0.5);
  opts.n_steps = 1000;
  opts.record_every = 1000;
  opts.store_iterates = true;
  const TrajectoryRecord rec = run(problem, Vec::Ones(1), Vec::Ones(1), opts);
  const LemmaReport l1 =
      lemma_contraction_check(problem, rec, opts.sched_u, opts.sched_v, LemmaKind::lemma1);
  const LemmaReport l2 =
      lemma_contraction_check(problem, rec, opts.sched_u, opts.sched_v, LemmaKind::lemma2);
  Outcome o;
  o.pass = !rec.collapsed && l1.max_residual <= 1e-9 && l2.max_residual <= 1e-9;
  o.detail = "max residual lemma1=" + fmt(l1.max_residual) + " lemma2=" + fmt(l2.max_residual) +
             " (<=1e-9, " + std::to_string(l1.residuals.size()) + " steps)";
  return o;
}

Outcome gradient_exactness() {
  Outcome o;
  o.pass = true;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng pick = Rng::substream(seed, 90);
    const auto h1 = static_cast<Eigen::Index>(3 + pick.uniform_int(6));
    const auto h2 = static_cast<Eigen::Index>(3 + pick.uniform_int(6));
    const int batch = static_cast<int>(2 + pick.uniform_int(6));

    // Standalone MLP backward against central differences.
    {
      Rng net_rng = Rng::substream(seed, 91);
      Mlp net = Mlp::random({2, h1, h2, 1},
                            {Activation::tanh, Activation::tanh, Activation::sigmoid}, net_rng);
      Mat x(2, batch);
      for (Eigen::Index j = 0; j < x.cols(); ++j)
        for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = net_rng.normal();
      MlpCache cache;
      net.forward(x, cache);
      const Vec grad = net.backward(cache, Mat::Ones(1, batch)).flatten();

      const Vec theta = net.flatten();
      const double h = 1e-5;
      Mlp probe = net;
      double err = 0;
      for (Eigen::Index i = 0; i < theta.size(); ++i) {
        Vec tp = theta;
        tp[i] = theta[i] + h;
        probe.unflatten(tp);
        const double f_plus = probe.forward(x).sum();
        tp[i] = theta[i] - h;
        probe.unflatten(tp);
        const double f_minus = probe.forward(x).sum();
        err = std::max(err, std::abs(grad[i] - (f_plus - f_minus) / (2 * h)));
      }
      const double rel = err / std::max(grad.lpNorm<Eigen::Infinity>(), 1.0);
      worst = std::max(worst, rel);
      o.pass = o.pass && rel <= 1e-5;
    }

    // Full GAN loss against central differences through both networks.
    {
      GanConfig cfg;
      cfg.data = MixtureSpec{8, 1.0, 0.05};
      cfg.batch_size = batch;
      cfg.gen_hidden = {h1, h2};
      cfg.disc_hidden = {h2, h1};
      const GanProblem problem(cfg, seed);
      const GradCheck check = finite_diff_check(problem, problem.initial_theta_g(),
                                                problem.initial_theta_d(), 1e-5);
      worst = std::max({worst, check.err_u, check.err_v});
      o.pass = o.pass && check.err_u <= 1e-5 && check.err_v <= 1e-5;
    }
  }
  o.detail = "worst relative error over 10 seeded configs = " + fmt(worst) + " (<=1e-5)";
  return o;
}

Outcome toygan_mode_recovery() {
  GanConfig cfg;
  cfg.data = MixtureSpec{8, 1.0, 0.01};
  cfg.batch_size = 512;

  auto sweep = [&](Method m, std::string& report, int& hits, int& collapses) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      GanTrainOptions opts;
      opts.method = m;
      opts.n_steps = kToyganSteps;
      opts.seed = seed;
      opts.record_every = 500;
      opts.eval_every = kToyganEvalEvery;
      const GanTrainResult result = train_gan(cfg, opts);
      if (result.trajectory.collapsed) ++collapses;
      if (!result.trajectory.collapsed && result.final_coverage.covered >= 6) ++hits;
      report += std::to_string(result.final_coverage.covered) +
                (result.trajectory.collapsed ? "c " : " ");
    }
  };

  Outcome o;
  std::string pred_report, plain_report;
  int pred_hits = 0, pred_collapses = 0, plain_hits = 0, plain_collapses = 0;
  sweep(Method::predict, pred_report, pred_hits, pred_collapses);
  sweep(Method::plain, plain_report, plain_hits, plain_collapses);

  o.pass = pred_collapses == 0 && pred_hits >= 3;
  o.detail = "predict coverage/8 per seed: " + pred_report + "(need >=6 in >=3 seeds, 0 collapses)" +
             "; plain (reported only): " + plain_report;
  return o;
}

Outcome exclusions() {
  // The suite must contain exactly the desk-scale criteria; large-scale
  // reproductions (image GANs, inception scores, domain-adaptation accuracy
  // tables) are intentionally absent.
  static const std::vector<std::string> expected = {
      "spectral_contrast", "convergence_contrast", "ode_tracking",
      "theorem_rate",      "lemma_residuals",      "gradient_exactness",
      "toygan_mode_recovery", "exclusions",         "determinism"};
  Outcome o;
  o.pass = acceptance_criteria_names() == expected;
  o.detail = "suite limited to desk-scale criteria; no large-scale reproductions registered";
  return o;
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

Outcome determinism(const fs::path& scratch) {
  std::vector<ExperimentConfig> configs;
  {
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
    configs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.experiment = ExperimentKind::theorem_rate;
    c.method = "predict";
    c.k_matrix = Mat::Ones(1, 1);
    c.mu = 1.0;
    c.noise_std = 0.1;
    c.c_alpha = 0.5;
    c.c_beta = 0.5;
    c.n_steps = 3000;
    c.seeds = {1, 2};
    configs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.experiment = ExperimentKind::toygan;
    c.method = "predict";
    c.n_modes = 8;
    c.radius = 1.0;
    c.sigma = 0.01;
    c.batch_size = 64;
    c.n_steps = 30;
    c.record_every = 10;
    c.eval_every = 10;
    c.n_probe = 500;
    c.seeds = {1};
    configs.push_back(c);
  }

  Outcome o;
  o.pass = true;
  int files_checked = 0;
  for (size_t i = 0; i < configs.size(); ++i) {
    const fs::path dir_a = scratch / ("det_" + std::to_string(i) + "_a");
    const fs::path dir_b = scratch / ("det_" + std::to_string(i) + "_b");
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    RunOverrides ov;
    ov.output_dir = dir_a.string();
    const RunManifest ma = run_experiment(configs[i], ov);
    ov.output_dir = dir_b.string();
    run_experiment(configs[i], ov);

    std::vector<std::string> files = ma.aggregate_files;
    for (const auto& sr : ma.seed_runs) files.insert(files.end(), sr.files.begin(), sr.files.end());
    for (const auto& f : files) {
      ++files_checked;
      if (!same_bytes(dir_a / f, dir_b / f)) {
        o.pass = false;
        o.detail += "mismatch: " + f + "; ";
      }
    }
  }
  if (o.pass)
    o.detail = std::to_string(files_checked) + " csv files byte-identical across reruns";
  return o;
}

}  // namespace

const std::vector<std::string>& acceptance_criteria_names() {
  static const std::vector<std::string> names = {
      "spectral_contrast", "convergence_contrast", "ode_tracking",
      "theorem_rate",      "lemma_residuals",      "gradient_exactness",
      "toygan_mode_recovery", "exclusions",         "determinism"};
  return names;
}

std::vector<CriterionResult> run_acceptance(const std::vector<std::string>& only,
                                            const std::filesystem::path& scratch_dir,
                                            std::ostream& out) {
  const auto& names = acceptance_criteria_names();
  for (const auto& name : only)
    if (std::find(names.begin(), names.end(), name) == names.end())
      throw std::invalid_argument("unknown acceptance criterion '" + name + "'");

  const std::map<std::string, std::function<Outcome()>> criteria = {
      {"spectral_contrast", spectral_contrast},
      {"convergence_contrast", convergence_contrast},
      {"ode_tracking", ode_tracking},
      {"theorem_rate", theorem_rate},
      {"lemma_residuals", lemma_residuals},
      {"gradient_exactness", gradient_exactness},
      {"toygan_mode_recovery", toygan_mode_recovery},
      {"exclusions", exclusions},
      {"determinism", [&] { return determinism(scratch_dir); }},
  };

  std::vector<CriterionResult> results;
  for (const auto& name : names) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria.at(name)();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    results.push_back(CriterionResult{name, outcome.pass, outcome.detail, secs});
    out << (outcome.pass ? "PASS " : "FAIL ") << name << "  " << outcome.detail << "  ["
        << fmt(secs) << "s]\n"
        << std::flush;
  }
  return results;
}

}  // namespace predsaddle
