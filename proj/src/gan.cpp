#include "predsaddle/gan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace predsaddle {

namespace {

std::vector<Eigen::Index> net_dims(Eigen::Index in, const std::vector<Eigen::Index>& hidden,
                                   Eigen::Index out) {
  std::vector<Eigen::Index> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

std::vector<Activation> net_acts(size_t n_hidden, Activation head) {
  std::vector<Activation> acts(n_hidden, Activation::tanh);
  acts.push_back(head);
  return acts;
}

}  // namespace

GanProblem::GanProblem(GanConfig cfg, std::uint64_t init_seed)
    : cfg_(std::move(cfg)),
      gen_proto_(net_dims(cfg_.latent_dim, cfg_.gen_hidden, 2),
                 net_acts(cfg_.gen_hidden.size(), Activation::linear)),
      disc_proto_(net_dims(2, cfg_.disc_hidden, 1),
                  net_acts(cfg_.disc_hidden.size(), Activation::sigmoid)) {
  if (cfg_.batch_size < 1) throw std::invalid_argument("gan: batch_size must be >= 1");
  if (cfg_.latent_dim < 1) throw std::invalid_argument("gan: latent_dim must be >= 1");
  if (!(cfg_.clamp_eps > 0) || cfg_.clamp_eps >= 0.5)
    throw std::invalid_argument("gan: clamp_eps must lie in (0, 0.5)");

  Rng init = Rng::substream(init_seed, 0);
  init_g_ = Mlp::random(net_dims(cfg_.latent_dim, cfg_.gen_hidden, 2),
                        net_acts(cfg_.gen_hidden.size(), Activation::linear), init)
                .flatten();
  init_d_ = Mlp::random(net_dims(2, cfg_.disc_hidden, 1),
                        net_acts(cfg_.disc_hidden.size(), Activation::sigmoid), init)
                .flatten();

  Rng real_rng = Rng::substream(init_seed, 1);
  eval_real_ = sample_mixture(cfg_.data, cfg_.batch_size, real_rng);
  Rng z_rng = Rng::substream(init_seed, 2);
  eval_z_ = Mat(cfg_.latent_dim, cfg_.batch_size);
  for (Eigen::Index j = 0; j < eval_z_.cols(); ++j)
    for (Eigen::Index i = 0; i < eval_z_.rows(); ++i) eval_z_(i, j) = z_rng.normal();
}

Mlp GanProblem::generator(const Vec& theta_g) const {
  Mlp g = gen_proto_;
  g.unflatten(theta_g);
  return g;
}

Mlp GanProblem::discriminator(const Vec& theta_d) const {
  Mlp d = disc_proto_;
  d.unflatten(theta_d);
  return d;
}

Mat GanProblem::generate(const Vec& theta_g, const Mat& z) const {
  return generator(theta_g).forward(z);
}

Mat GanProblem::sample_latent(std::int64_t n, Rng& rng) const {
  Mat z(cfg_.latent_dim, n);
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, j) = rng.normal();
  return z;
}

Mat GanProblem::discriminate(const Vec& theta_d, const Mat& x) const {
  return discriminator(theta_d).forward(x);
}

double GanProblem::batch_loss(const Vec& theta_g, const Vec& theta_d, const Mat& real,
                              const Mat& z) const {
  if (real.cols() < 1 || z.cols() < 1) throw DimensionError("gan: batches must be nonempty");
  const Mlp d = discriminator(theta_d);
  const Mat fake = generate(theta_g, z);
  const Mat p_real = d.forward(real);
  const Mat p_fake = d.forward(fake);
  const double eps = cfg_.clamp_eps;
  double loss = 0;
  for (Eigen::Index i = 0; i < p_real.cols(); ++i)
    loss += std::log(std::clamp(p_real(0, i), eps, 1 - eps)) / p_real.cols();
  for (Eigen::Index i = 0; i < p_fake.cols(); ++i)
    loss += std::log(1 - std::clamp(p_fake(0, i), eps, 1 - eps)) / p_fake.cols();
  return loss;
}

namespace {

// d/dp of mean log(clamp(p)): zero where the clamp is active.
Mat dlog_p(const Mat& p, double eps) {
  Mat d(p.rows(), p.cols());
  const double n = static_cast<double>(p.cols());
  for (Eigen::Index i = 0; i < p.cols(); ++i)
    d(0, i) = (p(0, i) > eps && p(0, i) < 1 - eps) ? 1.0 / (n * p(0, i)) : 0.0;
  return d;
}

// d/dp of mean log(1 - clamp(p)).
Mat dlog_1mp(const Mat& p, double eps) {
  Mat d(p.rows(), p.cols());
  const double n = static_cast<double>(p.cols());
  for (Eigen::Index i = 0; i < p.cols(); ++i)
    d(0, i) = (p(0, i) > eps && p(0, i) < 1 - eps) ? -1.0 / (n * (1 - p(0, i))) : 0.0;
  return d;
}

}  // namespace

Vec GanProblem::generator_gradient(const Vec& theta_g, const Vec& theta_d, const Mat& z) const {
  if (z.cols() < 1) throw DimensionError("gan: latent batch must be nonempty");
  const Mlp g = generator(theta_g);
  const Mlp d = discriminator(theta_d);

  MlpCache g_cache, d_cache;
  const Mat fake = g.forward(z, g_cache);
  const Mat p_fake = d.forward(fake, d_cache);

  // Saturating: descend mean log(1 - D(G(z))). Non-saturating: descend
  // -mean log D(G(z)).
  const Mat upstream = cfg_.objective == GanObjective::saturating
                           ? dlog_1mp(p_fake, cfg_.clamp_eps)
                           : Mat(-dlog_p(p_fake, cfg_.clamp_eps));
  Mat d_fake;
  d.backward(d_cache, upstream, &d_fake);
  return g.backward(g_cache, d_fake).flatten();
}

Vec GanProblem::discriminator_gradient(const Vec& theta_g, const Vec& theta_d, const Mat& real,
                                       const Mat& z) const {
  if (real.cols() < 1 || z.cols() < 1) throw DimensionError("gan: batches must be nonempty");
  const Mlp d = discriminator(theta_d);
  const Mat fake = generate(theta_g, z);

  // One pass over the concatenated batch; the two loss terms just contribute
  // different upstream slices.
  Mat both(2, real.cols() + fake.cols());
  both << real, fake;
  MlpCache cache;
  const Mat p = d.forward(both, cache);
  Mat upstream(1, both.cols());
  upstream << dlog_p(p.leftCols(real.cols()), cfg_.clamp_eps),
      dlog_1mp(p.rightCols(fake.cols()), cfg_.clamp_eps);
  return d.backward(cache, upstream).flatten();
}

std::pair<Vec, Vec> GanProblem::gan_gradients(const Vec& theta_g, const Vec& theta_d,
                                              const Mat& real, const Mat& z) const {
  return {generator_gradient(theta_g, theta_d, z),
          discriminator_gradient(theta_g, theta_d, real, z)};
}

double GanProblem::loss(const Vec& theta_g, const Vec& theta_d) const {
  return batch_loss(theta_g, theta_d, eval_real_, eval_z_);
}

Vec GanProblem::grad_u(const Vec& theta_g, const Vec& theta_d) const {
  return generator_gradient(theta_g, theta_d, eval_z_);
}

Vec GanProblem::grad_v(const Vec& theta_g, const Vec& theta_d) const {
  return discriminator_gradient(theta_g, theta_d, eval_real_, eval_z_);
}

Vec GanProblem::stochastic_grad_u(const Vec& theta_g, const Vec& theta_d, Rng& rng) const {
  return generator_gradient(theta_g, theta_d, sample_latent(cfg_.batch_size, rng));
}

Vec GanProblem::stochastic_grad_v(const Vec& theta_g, const Vec& theta_d, Rng& rng) const {
  const Mat real = sample_mixture(cfg_.data, cfg_.batch_size, rng);
  return discriminator_gradient(theta_g, theta_d, real, sample_latent(cfg_.batch_size, rng));
}

GanTrainResult train_gan(const GanConfig& cfg, const GanTrainOptions& opts) {
  if (opts.n_steps < 0) throw std::invalid_argument("train_gan: n_steps must be >= 0");
  const GanProblem problem(cfg, opts.seed);

  SolverState st = SolverState::init(
      problem.initial_theta_g(), problem.initial_theta_d(),
      Updater::adam(opts.adam_beta1, opts.adam_beta2, opts.adam_epsilon),
      Updater::adam(opts.adam_beta1, opts.adam_beta2, opts.adam_epsilon));
  const Schedule lr = Schedule::constant(opts.learning_rate);
  Rng train_rng = Rng::substream(opts.seed, 3);
  Rng probe_rng = Rng::substream(opts.seed, 4);
  const Mat probe_z = problem.sample_latent(opts.n_probe, probe_rng);
  const StepOptions sopts{.predict_primal = opts.method == Method::predict};
  const double nan = std::numeric_limits<double>::quiet_NaN();

  GanTrainResult result;
  auto evaluate = [&](std::int64_t step_idx) {
    result.final_samples = problem.generate(st.u, probe_z);
    result.final_coverage = mode_coverage(result.final_samples, cfg.data, opts.threshold_sigmas,
                                          opts.min_fraction);
    result.coverage.push_back(CoveragePoint{step_idx, result.final_coverage.covered});
  };
  evaluate(0);

  for (std::int64_t k = 1; k <= opts.n_steps; ++k) {
    try {
      step(problem, st, lr, lr, train_rng, sopts);
    } catch (const DivergenceError& e) {
      result.trajectory.collapsed = true;
      result.trajectory.collapse_step = e.step;
      break;
    }
    result.trajectory.steps_completed = k;
    if (k % opts.record_every == 0 || k == opts.n_steps) {
      TrajectoryRow row;
      row.k = k;
      row.loss = problem.loss(st.u, st.v);
      row.err_u = nan;
      row.err_v = nan;
      row.gap_avg = nan;
      row.alpha = opts.learning_rate;
      row.beta = opts.learning_rate;
      result.trajectory.rows.push_back(row);
    }
    if (k % opts.eval_every == 0 || k == opts.n_steps) evaluate(k);
  }
  result.trajectory.u_final = st.u;
  result.trajectory.v_final = st.v;
  return result;
}

}  // namespace predsaddle
