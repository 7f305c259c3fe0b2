#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "predsaddle/dynamics.hpp"
#include "predsaddle/gan.hpp"
#include "predsaddle/theorem.hpp"

namespace py = pybind11;
using namespace predsaddle;

namespace {

Method method_from(const std::string& name) {
  if (name == "plain") return Method::plain;
  if (name == "predict") return Method::predict;
  throw std::invalid_argument("method must be 'plain' or 'predict'");
}

py::dict trajectory_dict(const TrajectoryRecord& rec) {
  py::dict d;
  std::vector<std::int64_t> k;
  std::vector<double> loss, err_u, err_v, gap_avg;
  for (const auto& r : rec.rows) {
    k.push_back(r.k);
    loss.push_back(r.loss);
    err_u.push_back(r.err_u);
    err_v.push_back(r.err_v);
    gap_avg.push_back(r.gap_avg);
  }
  d["k"] = k;
  d["loss"] = loss;
  d["err_u"] = err_u;
  d["err_v"] = err_v;
  d["gap_avg"] = gap_avg;
  d["collapsed"] = rec.collapsed;
  d["collapse_step"] = rec.collapse_step;
  d["u_final"] = rec.u_final;
  d["v_final"] = rec.v_final;
  d["u_avg"] = rec.u_avg;
  d["v_avg"] = rec.v_avg;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "prediction-step saddle-point optimization";

  py::register_exception<GapUnavailableError>(m, "GapUnavailable");
  py::register_exception<DivergenceError>(m, "Divergence");

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def_static("substream", &Rng::substream, py::arg("seed"), py::arg("stream"))
      .def("normal", &Rng::normal)
      .def("uniform", &Rng::uniform);

  py::class_<SaddleProblem, std::shared_ptr<SaddleProblem>>(m, "SaddleProblem")
      .def_property_readonly("dim_u", &SaddleProblem::dim_u)
      .def_property_readonly("dim_v", &SaddleProblem::dim_v)
      .def("loss", &SaddleProblem::loss)
      .def("grad_u", &SaddleProblem::grad_u)
      .def("grad_v", &SaddleProblem::grad_v)
      .def("stochastic_grad_u", &SaddleProblem::stochastic_grad_u)
      .def("stochastic_grad_v", &SaddleProblem::stochastic_grad_v);

  m.def("make_bilinear", [](const Mat& K) -> std::shared_ptr<SaddleProblem> {
    return std::make_shared<BilinearSaddle>(K);
  });
  m.def("make_regularized",
        [](const Mat& K, double mu) -> std::shared_ptr<SaddleProblem> {
          return std::make_shared<RegularizedSaddle>(K, mu);
        },
        py::arg("K"), py::arg("mu"));
  m.def("with_noise",
        [](std::shared_ptr<SaddleProblem> p, double noise_std,
           std::uint64_t seed) -> std::shared_ptr<SaddleProblem> {
          auto noisy = with_noise(std::move(p), NoisyGradientConfig{noise_std, seed});
          return std::const_pointer_cast<SaddleProblem>(noisy);
        },
        py::arg("problem"), py::arg("noise_std"), py::arg("seed") = 0);

  m.def("primal_dual_gap", &primal_dual_gap);
  m.def("finite_diff_check",
        [](const SaddleProblem& p, const Vec& u, const Vec& v, double h) {
          const GradCheck c = finite_diff_check(p, u, v, h);
          return py::make_tuple(c.err_u, c.err_v);
        },
        py::arg("problem"), py::arg("u"), py::arg("v"), py::arg("h") = 1e-5);
  m.def("predict_point", &predict_point);

  m.def("run",
        [](const SaddleProblem& problem, const Vec& u0, const Vec& v0, const std::string& method,
           const std::string& updater, double rate, const std::string& schedule,
           std::int64_t n_steps, std::int64_t record_every, std::uint64_t seed) {
          RunOptions opts;
          opts.method = method_from(method);
          opts.sched_u = schedule == "inverse_sqrt" ? Schedule::inverse_sqrt(rate)
                                                    : Schedule::constant(rate);
          opts.sched_v = opts.sched_u;
          if (updater == "sgd") {
            opts.updater_u = Updater::sgd();
          } else if (updater == "adam") {
            opts.updater_u = Updater::adam();
          } else if (updater == "momentum") {
            opts.updater_u = Updater::momentum_sgd(0.9);
          } else {
            throw std::invalid_argument("updater must be sgd, momentum, or adam");
          }
          opts.updater_v = opts.updater_u;
          opts.n_steps = n_steps;
          opts.record_every = record_every;
          opts.seed = seed;
          return trajectory_dict(run(problem, u0, v0, opts));
        },
        py::arg("problem"), py::arg("u0"), py::arg("v0"), py::arg("method") = "predict",
        py::arg("updater") = "sgd", py::arg("rate") = 0.1, py::arg("schedule") = "constant",
        py::arg("n_steps") = 1000, py::arg("record_every") = 1, py::arg("seed") = 0);

  py::class_<ModeDecomposition>(m, "ModeDecomposition")
      .def_readonly("U", &ModeDecomposition::U)
      .def_readonly("sigma", &ModeDecomposition::sigma)
      .def_readonly("alpha", &ModeDecomposition::alpha)
      .def_readonly("beta", &ModeDecomposition::beta);
  m.def("decompose", &decompose, py::arg("K"), py::arg("alpha"), py::arg("beta"));

  py::class_<OscillatorSolution>(m, "OscillatorSolution")
      .def("evaluate", &OscillatorSolution::evaluate)
      .def_property_readonly("affine_modes",
                             [](const OscillatorSolution& s) { return s.affine_modes; });
  m.def("undamped_solution", &undamped_solution, py::arg("K"), py::arg("alpha"), py::arg("beta"),
        py::arg("u0"), py::arg("v0"));
  m.def("damped_solution", &damped_solution, py::arg("K"), py::arg("alpha"), py::arg("beta"),
        py::arg("u0"), py::arg("v0"));

  py::class_<ModeMap>(m, "ModeMap")
      .def_readonly("kappa", &ModeMap::kappa)
      .def_readonly("det", &ModeMap::det)
      .def_readonly("lambda1", &ModeMap::lambda1)
      .def_readonly("lambda2", &ModeMap::lambda2)
      .def_property_readonly("M", [](const ModeMap& mm) { return Mat(mm.M); });
  py::class_<UpdateMapSpectrum>(m, "UpdateMapSpectrum")
      .def_readonly("modes", &UpdateMapSpectrum::modes)
      .def_readonly("spectral_radius", &UpdateMapSpectrum::spectral_radius);
  m.def("discrete_map",
        [](const std::string& method, double kappa, double alpha, double beta) {
          return discrete_map(method_from(method), kappa, alpha, beta);
        },
        py::arg("method"), py::arg("kappa"), py::arg("alpha"), py::arg("beta"));
  m.def("update_map_spectrum",
        [](const std::string& method, const Mat& K, double alpha, double beta) {
          return update_map_spectrum(method_from(method), K, alpha, beta);
        },
        py::arg("method"), py::arg("K"), py::arg("alpha"), py::arg("beta"));
  m.def("trajectory_vs_ode",
        [](const std::string& method, const Mat& K, double alpha, double beta, const Vec& u0,
           const Vec& v0, double horizon) {
          return trajectory_vs_ode(method_from(method), K, alpha, beta, u0, v0, horizon);
        },
        py::arg("method"), py::arg("K"), py::arg("alpha"), py::arg("beta"), py::arg("u0"),
        py::arg("v0"), py::arg("horizon"));

  py::class_<BoundConstants>(m, "BoundConstants")
      .def(py::init<>())
      .def_readwrite("g_u", &BoundConstants::g_u)
      .def_readwrite("g_v", &BoundConstants::g_v)
      .def_readwrite("d_u", &BoundConstants::d_u)
      .def_readwrite("d_v", &BoundConstants::d_v)
      .def_readwrite("l_v", &BoundConstants::l_v)
      .def_readwrite("c_alpha", &BoundConstants::c_alpha)
      .def_readwrite("c_beta", &BoundConstants::c_beta)
      .def("inflated", &BoundConstants::inflated);
  m.def("evaluate_bound", &evaluate_bound, py::arg("constants"), py::arg("l"));

  py::class_<RateFit>(m, "RateFit")
      .def_readonly("ls", &RateFit::ls)
      .def_readonly("mean_gap", &RateFit::mean_gap)
      .def_readonly("seed_gap", &RateFit::seed_gap)
      .def_readonly("has_fit", &RateFit::has_fit)
      .def_readonly("slope_of_mean", &RateFit::slope_of_mean)
      .def_readonly("slope_mean", &RateFit::slope_mean)
      .def_readonly("slope_std", &RateFit::slope_std)
      .def_readonly("mean_running_gap", &RateFit::mean_running_gap)
      .def_readonly("running_slope_of_mean", &RateFit::running_slope_of_mean)
      .def_readonly("constants", &RateFit::constants);
  m.def("measure_rate",
        [](const Mat& K, double mu, double noise_std, double c_alpha, double c_beta,
           std::int64_t n_steps, const std::vector<std::uint64_t>& seeds) {
          const RegularizedSaddle problem(K, mu);
          return measure_rate(problem, noise_std, c_alpha, c_beta, n_steps, seeds);
        },
        py::arg("K"), py::arg("mu"), py::arg("noise_std"), py::arg("c_alpha"), py::arg("c_beta"),
        py::arg("n_steps"), py::arg("seeds"));

  py::class_<MixtureSpec>(m, "MixtureSpec")
      .def(py::init([](int n_modes, double radius, double sigma) {
             return MixtureSpec{n_modes, radius, sigma};
           }),
           py::arg("n_modes") = 8, py::arg("radius") = 1.0, py::arg("sigma") = 0.01)
      .def_readwrite("n_modes", &MixtureSpec::n_modes)
      .def_readwrite("radius", &MixtureSpec::radius)
      .def_readwrite("sigma", &MixtureSpec::sigma)
      .def("means", &MixtureSpec::means);
  m.def("sample_mixture", &sample_mixture, py::arg("spec"), py::arg("n"), py::arg("rng"));

  py::class_<ModeCoverage>(m, "ModeCoverage")
      .def_readonly("covered", &ModeCoverage::covered)
      .def_readonly("counts", &ModeCoverage::counts)
      .def_readonly("mean_dist", &ModeCoverage::mean_dist);
  m.def("mode_coverage", &mode_coverage, py::arg("samples"), py::arg("spec"),
        py::arg("threshold_sigmas") = 3.0, py::arg("min_fraction") = 0.2);

  m.def("train_gan",
        [](int n_modes, double radius, double sigma, int batch_size, const std::string& method,
           std::int64_t n_steps, std::uint64_t seed, std::int64_t eval_every,
           std::int64_t n_probe, const std::string& objective) {
          GanConfig cfg;
          cfg.data = MixtureSpec{n_modes, radius, sigma};
          cfg.batch_size = batch_size;
          cfg.objective = objective == "non_saturating" ? GanObjective::non_saturating
                                                        : GanObjective::saturating;
          GanTrainOptions opts;
          opts.method = method_from(method);
          opts.n_steps = n_steps;
          opts.seed = seed;
          opts.eval_every = eval_every;
          opts.n_probe = n_probe;
          const GanTrainResult result = train_gan(cfg, opts);
          py::dict d;
          d["collapsed"] = result.trajectory.collapsed;
          d["covered"] = result.final_coverage.covered;
          std::vector<std::int64_t> steps;
          std::vector<int> covered;
          for (const auto& p : result.coverage) {
            steps.push_back(p.step);
            covered.push_back(p.covered);
          }
          d["coverage_steps"] = steps;
          d["coverage"] = covered;
          d["samples"] = result.final_samples;
          return d;
        },
        py::arg("n_modes") = 8, py::arg("radius") = 1.0, py::arg("sigma") = 0.01,
        py::arg("batch_size") = 512, py::arg("method") = "predict", py::arg("n_steps") = 1000,
        py::arg("seed") = 1, py::arg("eval_every") = 500, py::arg("n_probe") = 10000,
        py::arg("objective") = "saturating");

  m.attr("__version__") = PREDSADDLE_VERSION;
}
