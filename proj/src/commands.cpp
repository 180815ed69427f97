#include "tvqs/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "tvqs/simd/kernels.hpp"

namespace tvqs::commands {

namespace fs = std::filesystem;
using nlohmann::json;

void apply_overrides(config::ExperimentConfig& c, const Overrides& o) {
  if (o.seed) c.train.seed = *o.seed;
  if (o.out) c.output_dir = *o.out;
  try {
    if (o.mode) c.train.mode = vfe::parse_loss_mode(*o.mode);
  } catch (const std::invalid_argument& e) {
    throw config::ConfigError("--mode", e.what());
  }
  try {
    if (o.grad) c.train.grad_theta = vfe::parse_theta_gradient(*o.grad);
  } catch (const std::invalid_argument& e) {
    throw config::ConfigError("--grad", e.what());
  }
  if (o.shots) {
    if (*o.shots < 0) throw config::ConfigError("--shots", "must be non-negative");
    c.train.shots_per_setting = static_cast<std::size_t>(*o.shots);
  }
}

config::ExperimentConfig resolve(const std::string& config_path, const Overrides& overrides) {
  auto c = config::load(config_path);
  apply_overrides(c, overrides);
  c.validate();
  return c;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return Rng::derive(master, stream).next_u64();
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string opt(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

fs::path prepare_dir(const std::string& dir) {
  const fs::path p(dir);
  fs::create_directories(p);
  return p;
}

json train_config_json(const vfe::TrainConfig& t) {
  return {{"beta", t.beta},
          {"n_layers", t.n_layers},
          {"n_batch", t.n_batch},
          {"n_spsa", t.n_spsa},
          {"n_iter_max", t.n_iter_max},
          {"learning_rate", t.adam.learning_rate},
          {"adam_beta1", t.adam.beta1},
          {"adam_beta2", t.adam.beta2},
          {"adam_epsilon", t.adam.epsilon},
          {"spsa_c", t.spsa_c},
          {"mode", vfe::to_string(t.mode)},
          {"grad_theta", vfe::to_string(t.grad_theta)},
          {"psr_engine", vfe::to_string(t.psr_engine)},
          {"shots_per_setting", t.shots_per_setting},
          {"fullspace_reeval", t.fullspace_reeval},
          {"target_epsilon", t.target_epsilon},
          {"seed", t.seed}};
}

json params_json(const vfe::RunRecord& run) {
  json theta = json::array();
  for (int k = 0; k < run.theta_best.depth(); ++k) {
    const auto layer = run.theta_best.layer(k);
    theta.push_back(std::vector<double>(layer.begin(), layer.end()));
  }
  const probmodel::BernoulliProduct model(run.logits_best);
  return {{"n_qubits", run.theta_best.n_qubits()},
          {"n_layers", run.theta_best.depth()},
          {"theta", theta},
          {"logits", run.logits_best},
          {"phi", model.probs()}};
}

std::string matrix_long_csv(const Eigen::MatrixXcd& m) {
  std::ostringstream out;
  out << kCsvHeader << "\nrow,col,re,im\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const auto v = m(i, j);
      if (std::abs(v) < 1e-14) continue;
      out << i << ',' << j << ',' << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
    }
  }
  return out.str();
}

}  // namespace

std::string trace_csv(const vfe::RunRecord& run) {
  std::ostringstream out;
  out << kCsvHeader << "\niter,loss_sample,loss_fullspace,variance,grad_phi_norm,grad_theta_norm,epsilon\n";
  for (const auto& r : run.trace) {
    out << r.iter << ',' << format_double(r.loss_sample) << ',' << opt(r.loss_fullspace) << ','
        << format_double(r.variance) << ',' << format_double(r.grad_phi_norm) << ','
        << format_double(r.grad_theta_norm) << ',' << opt(r.epsilon) << '\n';
  }
  return out.str();
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("line fit needs two distinct x values");
  LineFit f;
  f.n_points = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
    f.max_abs_residual = std::max(f.max_abs_residual, std::abs(r));
  }
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

LineFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("power-law fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

namespace {

std::uint64_t trial_stream(int n, int depth, int n_spsa, int trial) {
  return ((static_cast<std::uint64_t>(n) * 64 + static_cast<std::uint64_t>(depth)) * 64 +
          static_cast<std::uint64_t>(n_spsa)) * 4096 + static_cast<std::uint64_t>(trial);
}

ScalingPoint summarize_point(const std::vector<ScalingRow>& rows, std::size_t begin) {
  ScalingPoint p;
  p.n = rows[begin].n;
  p.n_layers = rows[begin].n_layers;
  p.n_spsa = rows[begin].n_spsa;
  double cost_sum = 0.0, eps_sum = 0.0;
  for (std::size_t i = begin; i < rows.size(); ++i) {
    ++p.n_trials;
    eps_sum += rows[i].epsilon;
    if (rows[i].converged) {
      ++p.n_converged;
      cost_sum += rows[i].cost;
    }
  }
  p.mean_epsilon = eps_sum / p.n_trials;
  p.mean_cost = p.n_converged > 0 ? cost_sum / p.n_converged : 0.0;
  return p;
}

}  // namespace

ScalingResult run_scaling(const config::ExperimentConfig& cfg) {
  using config::CampaignKind;
  const auto& camp = cfg.campaign;
  ScalingResult out;
  out.kind = camp.kind;

  for (std::size_t ni = 0; ni < camp.n_values.size(); ++ni) {
    const int n = camp.n_values[ni];
    spinchain::XXZSpec model = cfg.model;
    model.n = n;
    const spinchain::SpectralOracle oracle(model);
    const double f_exact = oracle.thermal(cfg.train.beta).free_energy;
    config::ExperimentConfig sized = cfg;
    sized.model.n = n;
    const vfe::Problem problem(model, sized.entangler(), cfg.train.beta);

    std::vector<int> depths;
    std::vector<int> spsa_values{0};
    if (camp.kind == CampaignKind::Layers) {
      depths = camp.layer_values;
    } else {
      depths = {camp.layers_per_n[ni]};
    }
    if (camp.kind == CampaignKind::Spsa) spsa_values = camp.n_spsa_values;

    std::optional<double> best_value;
    for (int depth : depths) {
      for (int n_spsa : spsa_values) {
        const std::size_t begin = out.rows.size();
        for (int trial = 0; trial < camp.trials; ++trial) {
          vfe::TrainConfig t = cfg.train;
          t.n_layers = depth;
          t.n_iter_max = camp.n_iter_max;
          t.fullspace_reeval = true;
          t.seed = derive_seed(cfg.train.seed, trial_stream(n, depth, n_spsa, trial));
          if (camp.kind == CampaignKind::Layers) {
            t.mode = vfe::LossMode::FullSpace;
            t.grad_theta = vfe::ThetaGradient::Psr;
            t.target_epsilon = 0.0;
          } else {
            t.mode = vfe::LossMode::Sample;
            t.grad_theta = camp.kind == CampaignKind::Psr ? vfe::ThetaGradient::Psr : vfe::ThetaGradient::Spsa;
            t.target_epsilon = camp.target_epsilon;
            if (n_spsa > 0) t.n_spsa = n_spsa;
          }
          const auto run = vfe::train(t, problem, f_exact);

          ScalingRow row;
          row.n = n;
          row.n_layers = depth;
          row.n_batch = camp.kind == CampaignKind::Layers ? 0 : t.n_batch;
          row.n_spsa = n_spsa;
          row.trial = trial;
          row.seed = t.seed;
          row.n_iter = static_cast<int>(run.trace.size());
          row.epsilon = run.trace.back().epsilon.value_or(0.0);
          if (camp.kind == CampaignKind::Layers) {
            row.epsilon = run.epsilon.value_or(row.epsilon);
            row.converged = row.epsilon <= camp.target_epsilon;
            row.cost = static_cast<double>(row.n_iter) * n * depth;
          } else {
            row.converged = !run.divergent;
            const double per_iter = camp.kind == CampaignKind::Psr ? static_cast<double>(t.n_batch) * n * depth
                                                                    : static_cast<double>(t.n_batch) * n_spsa;
            row.cost = row.n_iter * per_iter;
          }
          out.rows.push_back(row);
        }
        ScalingPoint p = summarize_point(out.rows, begin);
        if (camp.kind == CampaignKind::Layers) {
          p.qualifies = p.mean_epsilon <= camp.target_epsilon;
        } else if (camp.kind == CampaignKind::Psr) {
          p.qualifies = 2 * p.n_converged > p.n_trials;
        } else {
          p.qualifies = p.n_converged > 0 &&
                        static_cast<double>(p.n_trials - p.n_converged) <= camp.max_divergent_fraction * p.n_trials;
        }
        out.points.push_back(p);
        if (p.qualifies) {
          const double v = camp.kind == CampaignKind::Layers ? depth : p.mean_cost;
          if (!best_value || v < *best_value) best_value = v;
        }
      }
      if (camp.kind == CampaignKind::Layers && camp.stop_at_contour && out.points.back().qualifies) break;
    }
    if (best_value) {
      out.fit_n.push_back(n);
      out.fit_value.push_back(*best_value);
    }
  }

  if (out.fit_n.size() >= 2) {
    const std::vector<double> xs(out.fit_n.begin(), out.fit_n.end());
    try {
      out.power_law = fit_power_law(xs, out.fit_value);
    } catch (const std::invalid_argument&) {
    }
    if (camp.kind == CampaignKind::Layers) out.linear = fit_line(xs, out.fit_value);
  }
  return out;
}

std::vector<SweepRun> run_thermal_sweep(const config::ExperimentConfig& cfg) {
  const spinchain::SpectralOracle oracle(cfg.model);
  std::vector<SweepRun> out;
  for (std::size_t i = 0; i < cfg.sweep.betas.size(); ++i) {
    SweepRun s;
    s.beta = cfg.sweep.betas[i];
    s.seed = derive_seed(cfg.train.seed, i);
    vfe::TrainConfig t = cfg.train;
    t.beta = s.beta;
    t.seed = s.seed;
    const vfe::Problem problem(cfg.model, cfg.entangler(), s.beta);
    s.exact = oracle.thermal(s.beta);
    s.run = vfe::train(t, problem, s.exact.free_energy);

    const probmodel::BernoulliProduct model(s.run.logits_best);
    const auto& theta = s.run.theta_best;
    Rng rng = Rng::derive(s.seed, 17);
    using observables::Method;
    s.estimates.push_back(observables::estimate_thermals(model, theta, problem, Method::FullSpace, 0, 0, rng));
    s.estimates.push_back(observables::estimate_thermals(model, theta, problem, Method::Sample, cfg.sweep.n_samples,
                                                         cfg.sweep.n_repeats, rng));
    s.estimates.push_back(observables::estimate_thermals(model, theta, problem, Method::ThermalRelation,
                                                         cfg.sweep.n_samples, cfg.sweep.n_repeats, rng));
    if (cfg.sweep.direct_samples > 0) {
      s.estimates.push_back(observables::estimate_thermals(model, theta, problem, Method::Sample,
                                                           cfg.sweep.direct_samples, cfg.sweep.n_repeats, rng));
    }
    out.push_back(std::move(s));
  }
  return out;
}

int cmd_train(const config::ExperimentConfig& cfg) {
  cfg.validate();
  const vfe::Problem problem(cfg.model, cfg.entangler(), cfg.train.beta);
  std::optional<spinchain::SpectralOracle> oracle;
  std::optional<double> f_exact;
  if (cfg.model.n <= probmodel::kDefaultEnumerationCap) {
    oracle.emplace(cfg.model);
    f_exact = oracle->thermal(cfg.train.beta).free_energy;
  }
  const auto run = vfe::train(cfg.train, problem, f_exact);

  const auto dir = prepare_dir(cfg.output_dir);
  write_text(dir / "trace.csv", trace_csv(run));
  write_text(dir / "params.json", params_json(run).dump(2) + "\n");

  json summary = {{"seed", cfg.train.seed},
                  {"selected_iteration", run.selected_iteration},
                  {"selected_loss", run.selected_loss},
                  {"iterations_executed", run.trace.size()},
                  {"divergent", run.divergent},
                  {"wall_seconds", run.wall_seconds.empty() ? 0.0 : run.wall_seconds.back()},
                  {"simd_isa", simd::active().name},
                  {"model", {{"n", cfg.model.n}, {"delta", cfg.model.delta}, {"h", cfg.model.h}}},
                  {"nnn_ratio", cfg.nnn_ratio},
                  {"layer_order", ansatz::to_string(cfg.layer_order)},
                  {"train", train_config_json(cfg.train)}};
  summary["epsilon"] = run.epsilon ? json(*run.epsilon) : json(nullptr);
  summary["f_exact"] = f_exact ? json(*f_exact) : json(nullptr);
  summary["iterations_to_target"] = run.iterations_to_target ? json(*run.iterations_to_target) : json(nullptr);

  if (oracle && cfg.model.n <= kArtifactCap) {
    const probmodel::BernoulliProduct model(run.logits_best);
    const auto rho = observables::assemble_gibbs(model, run.theta_best, problem.entangler());
    const auto rho_exact = oracle->gibbs_matrix(cfg.train.beta);
    summary["gibbs_fidelity"] = observables::fidelity(rho, rho_exact);
    write_text(dir / "density_trained.csv", matrix_long_csv(oracle->project(rho)));
    write_text(dir / "density_exact.csv", matrix_long_csv(oracle->project(rho_exact)));

    const auto id = observables::identify_eigenstates(model, run.theta_best, problem.entangler(), *oracle,
                                                      cfg.train.beta);
    std::ostringstream fm, pairs;
    fm << kCsvHeader << "\nrank,bits";
    for (Eigen::Index c = 0; c < id.fidelity_matrix.cols(); ++c) fm << ",n" << c;
    fm << '\n';
    pairs << kCsvHeader << "\nrank,bits,p,energy,gibbs_weight,eigenvalue,fidelity\n";
    for (std::size_t r = 0; r < id.ranked.size(); ++r) {
      const auto ri = static_cast<Eigen::Index>(r);
      const auto bits = qsim::format_bits(id.ranked[r], cfg.model.n);
      fm << r << ',' << bits;
      for (Eigen::Index c = 0; c < id.fidelity_matrix.cols(); ++c) fm << ',' << format_double(id.fidelity_matrix(ri, c));
      fm << '\n';
      pairs << r << ',' << bits << ',' << format_double(id.probs[r]) << ',' << format_double(id.energies[r]) << ','
            << format_double(id.gibbs_weights[r]) << ',' << format_double(id.eigenvalues[r]) << ','
            << format_double(id.fidelity_matrix(ri, ri)) << '\n';
    }
    write_text(dir / "fidelity_matrix.csv", fm.str());
    write_text(dir / "eigen_pairs.csv", pairs.str());
  }
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return 0;
}

int cmd_thermal_sweep(const config::ExperimentConfig& cfg) {
  cfg.validate();
  const auto runs = run_thermal_sweep(cfg);
  const auto dir = prepare_dir(cfg.output_dir);
  std::ostringstream out, train_out;
  out << kCsvHeader << "\nbeta,method,F,E,S,F_se,E_se,S_se,n_samples,n_repeats,F_exact,E_exact,S_exact\n";
  train_out << kCsvHeader << "\nbeta,seed,epsilon,selected_iteration,iterations_executed\n";
  for (const auto& s : runs) {
    for (const auto& e : s.estimates) {
      out << format_double(s.beta) << ',' << observables::to_string(e.free_energy.method) << ','
          << format_double(e.free_energy.value) << ',' << format_double(e.energy.value) << ','
          << format_double(e.entropy.value) << ',' << format_double(e.free_energy.std_error) << ','
          << format_double(e.energy.std_error) << ',' << format_double(e.entropy.std_error) << ','
          << e.energy.n_samples << ',' << e.energy.n_repeats << ',' << format_double(s.exact.free_energy) << ','
          << format_double(s.exact.energy) << ',' << format_double(s.exact.entropy) << '\n';
    }
    train_out << format_double(s.beta) << ',' << s.seed << ',' << opt(s.run.epsilon) << ','
              << s.run.selected_iteration << ',' << s.run.trace.size() << '\n';
  }
  write_text(dir / "thermals.csv", out.str());
  write_text(dir / "sweep_runs.csv", train_out.str());
  return 0;
}

int cmd_scaling(const config::ExperimentConfig& cfg) {
  cfg.validate();
  const auto result = run_scaling(cfg);
  const auto dir = prepare_dir(cfg.output_dir);
  std::ostringstream csv;
  csv << kCsvHeader << "\nkind,n,n_layers,n_batch,n_spsa,trial,seed,n_iter,epsilon,converged,cost\n";
  for (const auto& r : result.rows) {
    csv << config::to_string(result.kind) << ',' << r.n << ',' << r.n_layers << ',' << r.n_batch << ',' << r.n_spsa
        << ',' << r.trial << ',' << r.seed << ',' << r.n_iter << ',' << format_double(r.epsilon) << ','
        << (r.converged ? 1 : 0) << ',' << format_double(r.cost) << '\n';
  }
  write_text(dir / "scaling.csv", csv.str());

  json points = json::array();
  for (const auto& p : result.points) {
    points.push_back({{"n", p.n},
                      {"n_layers", p.n_layers},
                      {"n_spsa", p.n_spsa},
                      {"n_trials", p.n_trials},
                      {"n_converged", p.n_converged},
                      {"mean_epsilon", p.mean_epsilon},
                      {"mean_cost", p.mean_cost},
                      {"qualifies", p.qualifies}});
  }
  auto fit_json = [](const std::optional<LineFit>& f) {
    if (!f) return json(nullptr);
    return json{{"slope", f->slope},
                {"intercept", f->intercept},
                {"r_squared", f->r_squared},
                {"max_abs_residual", f->max_abs_residual},
                {"n_points", f->n_points}};
  };
  const json fit = {{"kind", config::to_string(result.kind)},
                    {"target_epsilon", cfg.campaign.target_epsilon},
                    {"fit_n", result.fit_n},
                    {"fit_value", result.fit_value},
                    {"exponent", result.power_law ? json(result.power_law->slope) : json(nullptr)},
                    {"power_law", fit_json(result.power_law)},
                    {"linear", fit_json(result.linear)},
                    {"points", points}};
  write_text(dir / "fit.json", fit.dump(2) + "\n");
  return 0;
}

int cmd_exact(const config::ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  const spinchain::SpectralOracle oracle(cfg.model);
  const auto t = oracle.thermal(cfg.train.beta);
  const std::vector<double> spectrum(oracle.eigenvalues().begin(), oracle.eigenvalues().end());
  out << "N=" << cfg.model.n << " delta=" << format_double(cfg.model.delta) << " h=" << format_double(cfg.model.h)
      << " beta=" << format_double(t.beta) << '\n';
  out << "F=" << format_double(t.free_energy) << " E=" << format_double(t.energy)
      << " S=" << format_double(t.entropy) << '\n';
  out << "spectrum:";
  for (double e : spectrum) out << ' ' << format_double(e);
  out << '\n';

  const auto dir = prepare_dir(cfg.output_dir);
  const json report = {{"n", cfg.model.n},        {"delta", cfg.model.delta}, {"h", cfg.model.h},
                       {"beta", t.beta},          {"F", t.free_energy},       {"E", t.energy},
                       {"S", t.entropy},          {"spectrum", spectrum}};
  write_text(dir / "exact.json", report.dump(2) + "\n");
  return 0;
}

}  // namespace tvqs::commands
