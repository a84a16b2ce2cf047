#include "starcoex/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace starcoex::experiment {

namespace {

constexpr double kPi = 3.14159265358979323846;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::string format_g(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

Scheme parse_scheme(const std::string& text) {
  Scheme s;
  s.label = text;
  if (text == "star-es") {
    s.kind = SchemeKind::star_es;
  } else if (text == "star-ms") {
    s.kind = SchemeKind::star_ms;
  } else if (text.rfind("star-quantized", 0) == 0) {
    s.kind = SchemeKind::star_quantized;
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos || colon + 1 >= text.size())
      throw config::ConfigError("scheme '" + text +
                                "' needs a bit count, e.g. star-quantized:4");
    s.bits = static_cast<unsigned>(std::stoul(text.substr(colon + 1)));
    if (s.bits == 0 || s.bits > 16)
      throw config::ConfigError("scheme '" + text + "': bits out of range");
    s.label = "star-quantized-" + std::to_string(s.bits);
  } else if (text == "conventional-ris") {
    s.kind = SchemeKind::conventional_ris;
  } else if (text == "random-phases") {
    s.kind = SchemeKind::random_phases;
  } else if (text == "no-ris") {
    s.kind = SchemeKind::no_ris;
  } else {
    throw config::ConfigError("unknown scheme '" + text + "'");
  }
  return s;
}

std::pair<std::size_t, std::size_t> grid_factor(std::size_t n) {
  if (n == 0) throw std::invalid_argument("grid_factor: n must be positive");
  for (std::size_t d = static_cast<std::size_t>(std::sqrt(double(n))); d >= 1;
       --d) {
    if (n % d == 0) return {d, n / d};
  }
  return {1, n};
}

Settings load_settings(const config::Config& cfg) {
  Settings s;
  s.deployment = model::Deployment{};
  s.deployment.bs_x = cfg.get_double("scenario", "bs_x", s.deployment.bs_x);
  s.deployment.bs_y = cfg.get_double("scenario", "bs_y", s.deployment.bs_y);
  s.deployment.ris_x = cfg.get_double("scenario", "ris_x", s.deployment.ris_x);
  s.deployment.ris_y = cfg.get_double("scenario", "ris_y", s.deployment.ris_y);
  s.deployment.radar_x =
      cfg.get_double("scenario", "radar_x", s.deployment.radar_x);
  s.deployment.radar_y =
      cfg.get_double("scenario", "radar_y", s.deployment.radar_y);
  s.deployment.ue_row_offset =
      cfg.get_double("scenario", "ue_row_d0", 20.0) / 2.0;
  s.deployment.exp_direct =
      cfg.get_double("scenario", "exp_direct", s.deployment.exp_direct);
  s.deployment.exp_surface =
      cfg.get_double("scenario", "exp_surface", s.deployment.exp_surface);
  s.deployment.penetration_db = cfg.get_double("scenario", "penetration_db",
                                               s.deployment.penetration_db);
  s.deployment.carrier_hz =
      cfg.get_double("scenario", "carrier_hz", s.deployment.carrier_hz);

  ScenarioSpec& spec = s.base;
  spec = model::paper_default_spec();
  spec.m = cfg.get_size("scenario", "m", spec.m);
  if (cfg.has("scenario", "n")) {
    const auto [nh, nv] = grid_factor(cfg.get_size("scenario", "n", 64));
    spec.n_h = nh;
    spec.n_v = nv;
  }
  spec.n_h = cfg.get_size("scenario", "n_h", spec.n_h);
  spec.n_v = cfg.get_size("scenario", "n_v", spec.n_v);
  spec.k_t = cfg.get_size("scenario", "k_t", spec.k_t);
  spec.k_r = cfg.get_size("scenario", "k_r", spec.k_r);
  spec.q = cfg.get_size("scenario", "q", spec.q);
  spec.pri = cfg.get_size("scenario", "pri", spec.pri);

  const std::size_t z = cfg.get_size("scenario", "z", 8);
  const double ang_lo = cfg.get_double("scenario", "angle_min", -kPi / 3.0);
  const double ang_hi = cfg.get_double("scenario", "angle_max", kPi / 4.0);
  spec.detection_angles.clear();
  for (std::size_t i = 0; i < z; ++i)
    spec.detection_angles.push_back(
        z == 1 ? ang_lo
               : ang_lo + (ang_hi - ang_lo) * static_cast<double>(i) /
                              static_cast<double>(z - 1));

  const double bandwidth = cfg.get_double("scenario", "bandwidth_hz", 200e3);
  const double noise_w =
      db_to_linear(-174.0 + 10.0 * std::log10(bandwidth)) * 1e-3;
  spec.sigma_c2 = cfg.get_double("scenario", "sigma_c2_w", noise_w);
  spec.sigma_r2 = cfg.get_double("scenario", "sigma_r2_w", noise_w);
  spec.rho = cfg.get_double("scenario", "rho_w", 0.1);
  if (cfg.has("scenario", "snr_db"))
    spec.rho = spec.sigma_c2 * db_to_linear(cfg.get_double("scenario", "snr_db", 0.0));
  spec.gamma_r = db_to_linear(cfg.get_double("scenario", "gamma_r_db", 10.0));
  spec.p_max = cfg.get_double("scenario", "p_max_w", 10.0);
  const double alpha_db =
      cfg.get_double("scenario", "alpha_over_noise_db", -12.0);
  spec.alpha_all = std::sqrt(spec.sigma_r2 * db_to_linear(alpha_db));
  spec.alpha.clear();
  spec.tau_c = cfg.get_double("scenario", "tau_c", spec.tau_c);
  spec.se_prefactor =
      cfg.get_double("scenario", "se_prefactor", spec.se_prefactor);

  const double el_spacing = cfg.get_double("scenario", "element_spacing", 0.25);
  const double radar_spacing =
      cfg.get_double("scenario", "radar_spacing", 0.5);
  spec.d_h = spec.d_v = 0.0;          // re-derived from the deployment
  spec.delta_radar = 0.0;
  model::apply_deployment(spec, s.deployment);
  spec.d_h = spec.d_v = el_spacing * spec.wavelength;
  spec.delta_radar = radar_spacing * spec.wavelength;

  if (cfg.has("sweep", "variable")) {
    const std::string var = cfg.get_string("sweep", "variable");
    if (var == "n") s.sweep = SweepVariable::n;
    else if (var == "m") s.sweep = SweepVariable::m;
    else if (var == "snr_db") s.sweep = SweepVariable::snr_db;
    else if (var == "gamma_r_db") s.sweep = SweepVariable::gamma_r_db;
    else if (var == "p_max") s.sweep = SweepVariable::p_max;
    else
      throw config::ConfigError("unknown sweep variable '" + var +
                                "' (use n, m, snr_db, gamma_r_db, p_max)");
    s.sweep_values = cfg.get_double_list("sweep", "values");
  } else {
    s.sweep = SweepVariable::none;
    s.sweep_values = {0.0};
  }

  if (cfg.has("schemes", "list")) {
    for (const std::string& item : cfg.get_string_list("schemes", "list"))
      s.schemes.push_back(parse_scheme(item));
  } else {
    s.schemes = {parse_scheme("star-es")};
  }

  s.ao.pgam.mu_init = cfg.get_double("optimizer", "mu_init", 1.0);
  s.ao.pgam.kappa = cfg.get_double("optimizer", "kappa", 0.5);
  s.ao.pgam.tol = cfg.get_double("optimizer", "tol", 1e-5);
  s.ao.pgam.max_iters = static_cast<int>(
      cfg.get_size("optimizer", "max_iters", 200));
  s.ao.pgam.n_starts =
      static_cast<int>(cfg.get_size("optimizer", "n_starts", 5));
  s.ao.outer_tol = cfg.get_double("optimizer", "outer_tol", 1e-4);
  s.ao.max_outer =
      static_cast<int>(cfg.get_size("optimizer", "max_outer", 20));

  s.mc_runs = cfg.get_size("mc", "runs", 1000);
  s.random_phase_draws = cfg.get_size("output", "random_phase_draws", 20);
  s.emit_timing = cfg.get_bool("output", "emit_timing", true);
  s.seed = cfg.get_u64("run", "seed", 1);
  s.threads = static_cast<unsigned>(cfg.get_size("run", "threads", 0));

  cfg.reject_unknown_keys();
  s.ao.check();
  return s;
}

Scenario scenario_for_point(const Settings& settings, double value) {
  ScenarioSpec spec = settings.base;
  switch (settings.sweep) {
    case SweepVariable::none:
      break;
    case SweepVariable::n: {
      const auto [nh, nv] = grid_factor(static_cast<std::size_t>(value));
      spec.n_h = nh;
      spec.n_v = nv;
      break;
    }
    case SweepVariable::m:
      spec.m = static_cast<std::size_t>(value);
      break;
    case SweepVariable::snr_db:
      spec.rho = spec.sigma_c2 * db_to_linear(value);
      break;
    case SweepVariable::gamma_r_db:
      spec.gamma_r = db_to_linear(value);
      break;
    case SweepVariable::p_max:
      spec.p_max = value;
      break;
  }
  return model::build_scenario(spec);
}

namespace {

struct Finalized {
  bool feasible = false;
  metrics::EffectiveCovariances covs;
  radar::RadarBeams beams;
  double sum_se = 0.0;
  double min_sinr = 0.0;
  double power = 0.0;
  double min_feasible = 0.0;
};

Finalized finalize(const Scenario& scn, const PassiveBeamformer& pb) {
  Finalized f;
  f.covs = metrics::build_covariances(scn, pb);
  try {
    f.beams = radar::optimal_transmit_beams(scn, f.covs, pb);
  } catch (const radar::InfeasibleBudget& bad) {
    f.min_feasible = bad.min_feasible;
    return f;
  }
  f.feasible = true;
  std::vector<la::CVec> u = f.beams.u;
  f.sum_se = metrics::sum_se(scn, f.covs, u);
  f.min_sinr = ao::min_radar_sinr(scn, f.covs, f.beams);
  f.power = f.beams.total_power();
  return f;
}

SchemeOutcome outcome_from(const Scenario& scn, double sweep_value,
                           std::uint64_t seed, const PassiveBeamformer& pb) {
  SchemeOutcome out;
  out.sweep_value = sweep_value;
  out.seed = seed;
  out.pb = pb;
  Finalized f = finalize(scn, pb);
  out.feasible = f.feasible;
  if (f.feasible) {
    out.sum_se = f.sum_se;
    out.min_radar_sinr = f.min_sinr;
    out.radar_power = f.power;
    out.beams = std::move(f.beams);
  }
  return out;
}

// Best-of-n_starts alternating optimization from random-phase initials.
SchemeOutcome run_ao_multistart(const Settings& settings, const Scenario& scn,
                                double sweep_value, std::uint64_t point_seed,
                                bool freeze_amplitudes,
                                const PassiveBeamformer* fixed_init) {
  SchemeOutcome out;
  out.sweep_value = sweep_value;
  out.seed = point_seed;
  ao::Options opts = settings.ao;
  opts.pgam.freeze_amplitudes = freeze_amplitudes;
  const int starts = fixed_init ? 1 : opts.pgam.n_starts;
  std::string last_error;
  for (int st = 0; st < starts; ++st) {
    PassiveBeamformer init;
    if (fixed_init) {
      init = *fixed_init;
    } else {
      Rng rng(derive_seed(point_seed, 100 + static_cast<std::uint64_t>(st)));
      init = star::random_phases(scn.n(), rng);
      if (freeze_amplitudes) {
        // keep the partition amplitudes, randomize phases only
        PassiveBeamformer part =
            star::fixed_partition(scn.n(), scn.n() / 2);
        init.beta_t = part.beta_t;
        init.beta_r = part.beta_r;
        init.protocol = part.protocol;
      }
    }
    try {
      ao::Result res = ao::alternating_optimize(scn, init, opts);
      if (!out.feasible || res.sum_se > out.sum_se) {
        out.feasible = true;
        out.sum_se = res.sum_se;
        out.pb = std::move(res.pb);
        out.beams = std::move(res.beams);
        out.trace = std::move(res.trace);
        out.min_radar_sinr = out.trace.outer.back().min_radar_sinr;
        out.radar_power = out.trace.outer.back().total_radar_power;
      }
    } catch (const ao::RadarInfeasible& bad) {
      last_error = bad.what();
    }
  }
  if (!out.feasible && !last_error.empty())
    std::cerr << "warning: " << last_error << "\n";
  return out;
}

}  // namespace

SchemeOutcome run_scheme(const Settings& settings, const Scenario& scn,
                         const Scheme& scheme, double sweep_value,
                         std::uint64_t point_seed,
                         const SchemeOutcome* base_es) {
  switch (scheme.kind) {
    case SchemeKind::star_es:
      return run_ao_multistart(settings, scn, sweep_value, point_seed, false,
                               nullptr);
    case SchemeKind::star_ms: {
      if (!base_es || !base_es->feasible) return {sweep_value};
      PassiveBeamformer rounded = star::ms_round(base_es->pb);
      return run_ao_multistart(settings, scn, sweep_value, point_seed, true,
                               &rounded);
    }
    case SchemeKind::star_quantized: {
      if (!base_es || !base_es->feasible) return {sweep_value};
      PassiveBeamformer pb = star::quantize_phases(base_es->pb, scheme.bits);
      return outcome_from(scn, sweep_value, point_seed, pb);
    }
    case SchemeKind::conventional_ris:
      return run_ao_multistart(settings, scn, sweep_value, point_seed, true,
                               nullptr);
    case SchemeKind::random_phases: {
      SchemeOutcome out;
      out.sweep_value = sweep_value;
      out.seed = point_seed;
      double se = 0.0, sinr = 0.0, power = 0.0;
      std::size_t ok = 0;
      for (std::size_t d = 0; d < settings.random_phase_draws; ++d) {
        Rng rng(derive_seed(point_seed, 500 + d));
        PassiveBeamformer pb = star::random_phases(scn.n(), rng);
        Finalized f = finalize(scn, pb);
        if (!f.feasible) continue;
        se += f.sum_se;
        sinr += f.min_sinr;
        power += f.power;
        ++ok;
        out.pb = std::move(pb);  // last feasible draw kept as the artifact
        out.beams = std::move(f.beams);
      }
      if (ok > 0) {
        out.feasible = true;
        out.sum_se = se / static_cast<double>(ok);
        out.min_radar_sinr = sinr / static_cast<double>(ok);
        out.radar_power = power / static_cast<double>(ok);
      }
      return out;
    }
    case SchemeKind::no_ris:
      return outcome_from(scn, sweep_value, point_seed,
                          star::PassiveBeamformer::no_ris(scn.n()));
  }
  return {sweep_value};
}

int run_experiment(const Settings& settings, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  const bool need_base = [&] {
    for (const Scheme& s : settings.schemes)
      if (s.kind == SchemeKind::star_ms ||
          s.kind == SchemeKind::star_quantized ||
          s.kind == SchemeKind::star_es)
        return true;
    return false;
  }();

  std::map<std::string, std::ofstream> csvs;
  for (const Scheme& s : settings.schemes) {
    auto& os = csvs[s.label];
    os.open(fs::path(out_dir) / (s.label + ".csv"));
    if (!os) {
      std::cerr << "error: cannot write to " << out_dir << "\n";
      return 1;
    }
    os << "sweep_value,sum_se,min_radar_sinr,radar_power_w,wall_time_ms,seed\n";
  }

  for (std::size_t pi = 0; pi < settings.sweep_values.size(); ++pi) {
    const double value = settings.sweep_values[pi];
    const std::uint64_t point_seed = derive_seed(settings.seed, pi);
    Scenario scn;
    try {
      scn = scenario_for_point(settings, value);
    } catch (const std::exception& ex) {
      std::cerr << "error: sweep point " << format_g(value) << ": "
                << ex.what() << "\n";
      return 1;
    }

    SchemeOutcome base;
    if (need_base)
      base = run_ao_multistart(settings, scn, value,
                               derive_seed(point_seed, 7), false, nullptr);

    for (const Scheme& scheme : settings.schemes) {
      const auto t0 = std::chrono::steady_clock::now();
      SchemeOutcome out =
          scheme.kind == SchemeKind::star_es
              ? base
              : run_scheme(settings, scn, scheme, value,
                           derive_seed(point_seed, 7), &base);
      const double wall_ms =
          settings.emit_timing
              ? std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count()
              : 0.0;

      std::ofstream& os = csvs[scheme.label];
      if (!out.feasible) {
        // skipped row: radar budget infeasible at this point
        os << format_g(value) << ",nan,nan,nan," << format_g(wall_ms) << ","
           << out.seed << "\n";
        std::cerr << "note: scheme " << scheme.label << " at sweep value "
                  << format_g(value) << " skipped (radar budget infeasible)\n";
        continue;
      }
      os << format_g(value) << "," << format_g(out.sum_se) << ","
         << format_g(out.min_radar_sinr) << "," << format_g(out.radar_power)
         << "," << format_g(wall_ms) << "," << out.seed << "\n";

      const std::string stem =
          scheme.label + "_p" + std::to_string(pi);
      star::save_file(out.pb, (fs::path(out_dir) / ("pb_" + stem + ".txt")).string());
      radar::save_beams(out.beams,
                        (fs::path(out_dir) / ("beams_" + stem + ".txt")).string());
      if (!out.trace.outer.empty()) {
        ao::write_trace_csv(out.trace,
                            (fs::path(out_dir) / ("ao_" + stem + ".csv")).string());
        if (!out.trace.pgam_traces.empty())
          pgam::write_trace_csv(
              out.trace.pgam_traces.back(),
              (fs::path(out_dir) / ("conv_" + stem + ".csv")).string());
      }
    }
  }
  return 0;
}

bool within_3se(double closed, const mc::Estimate& est) {
  return std::abs(closed - est.mean) <= 3.0 * est.std_error;
}

int validate(const Settings& settings) {
  // Reduced dimensions keep the oracle suite quick while still exercising the
  // configured deployment.
  ScenarioSpec spec = settings.base;
  spec.m = std::min<std::size_t>(spec.m, 8);
  if (spec.n_h * spec.n_v > 16) {
    spec.n_h = 4;
    spec.n_v = 4;
  }
  spec.q = std::min<std::size_t>(spec.q, 4);
  spec.bs_paths = std::max<std::size_t>(1, spec.m / 2);
  spec.radar_paths = std::max<std::size_t>(1, spec.q / 2);
  const Scenario scn = model::build_scenario(spec);

  Rng rng(settings.seed);
  const PassiveBeamformer pb = star::random_phases(scn.n(), rng);
  std::vector<la::CVec> u_beams(scn.z());
  const double amp = std::sqrt(scn.p_max / static_cast<double>(scn.z()) /
                               static_cast<double>(scn.q));
  for (std::size_t z = 0; z < scn.z(); ++z) {
    u_beams[z].resize(scn.q);
    for (std::size_t i = 0; i < scn.q; ++i)
      u_beams[z][i] = amp * std::conj(scn.steering[z][i]);
  }

  int failures = 0;
  auto report = [&](const char* name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " " << name << ": " << detail
              << "\n";
    if (!ok) ++failures;
  };

  {  // channel coloring: sample covariance of the direct BS-UE link
    const std::size_t runs = std::max<std::size_t>(settings.mc_runs, 10000);
    la::CMat acc = mc::estimate_covariance(scn.m, runs, [&](std::size_t r) {
      Rng ch_rng(derive_seed(settings.seed ^ 0x11, r));
      return model::sample_channels(scn, ch_rng).h_bk[0];
    });
    la::CMat expect = scn.r_bs;
    expect *= scn.beta_bk[0];
    la::CMat diff = acc;
    diff *= -1.0;
    diff += expect;
    const double rel = la::fro_norm(diff) / la::fro_norm(expect);
    report("channel-covariance", rel <= 0.05,
           "relative Frobenius error " + format_g(rel) + " (<= 0.05) at " +
               std::to_string(runs) + " draws");
  }

  {  // transmit normalization
    const metrics::EffectiveCovariances covs =
        metrics::build_covariances(scn, pb);
    const double closed = covs.lambda_bar;
    const mc::Estimate est = mc::estimate_lambda(
        scn, pb, settings.mc_runs, settings.seed ^ 0x22, settings.threads);
    const double rel = std::abs(closed - est.mean) / closed;
    report("normalization-lambda", rel <= 0.03,
           "relative error " + format_g(rel) + " (<= 0.03)");
  }

  {  // UE SINR closed form vs sample moments, every UE
    const metrics::EffectiveCovariances covs =
        metrics::build_covariances(scn, pb);
    bool ok = true;
    std::string detail;
    for (std::size_t k = 0; k < scn.k(); ++k) {
      const double closed = metrics::ue_sinr(scn, covs, k, u_beams);
      const mc::Estimate est =
          mc::estimate_ue_sinr(scn, pb, u_beams, k, settings.mc_runs,
                               settings.seed ^ (0x33 + k), settings.threads);
      if (!within_3se(closed, est)) ok = false;
      detail += (k ? "; " : "") + std::string("ue") + std::to_string(k) +
                " closed " + format_g(closed) + " mc " + format_g(est.mean) +
                " +- " + format_g(est.std_error);
    }
    report("ue-sinr", ok, detail);
  }

  {  // radar interference covariance
    const metrics::EffectiveCovariances covs =
        metrics::build_covariances(scn, pb);
    const la::CMat est = mc::estimate_radar_interference(
        scn, pb, settings.mc_runs, settings.seed ^ 0x44, settings.threads);
    la::CMat diff = est;
    diff *= -1.0;
    diff += covs.a_interf;
    const double rel = la::fro_norm(diff) / la::fro_norm(covs.a_interf);
    report("radar-interference", rel <= 0.05,
           "relative Frobenius error " + format_g(rel) + " (<= 0.05)");
  }

  {  // closed-form gradients vs central differences
    const double err =
        mc::fd_gradient_check(scn, pb, u_beams, 20, 1e-4, settings.seed ^ 0x55);
    report("gradient-check", err <= 1e-5,
           "worst relative error " + format_g(err) + " (<= 1e-5)");
  }

  return failures == 0 ? 0 : 1;
}

}  // namespace starcoex::experiment
