#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cgrav/dynamics.hpp"
#include "cgrav/ephemeris.hpp"
#include "cgrav/error.hpp"
#include "cgrav/kepler.hpp"
#include "cgrav/observer.hpp"

namespace cgrav::cli {
namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Globals {
  std::string ephemeris;
  std::string out_dir;
  bool json = false;
  bool deg = false;
};

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

PlanetTable load(const Globals& g) { return g.ephemeris.empty() ? builtin_table() : load_table(g.ephemeris); }

PlanetId planet_arg(const std::string& name) {
  const auto id = parse_planet(name);
  if (!id) throw Error(ErrorCode::Validation, "unknown planet '" + name + "'");
  return *id;
}

PrecessionModel model_arg(const std::string& s) {
  if (s == "causal") return PrecessionModel::Causal;
  if (s == "gr") return PrecessionModel::GeneralRelativity;
  throw Error(ErrorCode::Validation, "unknown model '" + s + "' (causal|gr)");
}

LightTime light_time_arg(const std::string& s) {
  if (s == "neglect") return LightTime::NeglectEarthVelocity;
  if (s == "exact") return LightTime::Exact;
  throw Error(ErrorCode::Validation, "unknown light-time mode '" + s + "' (neglect|exact)");
}

HistoryBootstrap bootstrap_arg(const std::string& s) {
  if (s == "none") return HistoryBootstrap::None;
  if (s == "straight_line_past") return HistoryBootstrap::StraightLinePast;
  if (s == "keplerian_past") return HistoryBootstrap::KeplerianPast;
  throw Error(ErrorCode::Validation, "unknown history bootstrap '" + s + "'");
}

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const nlohmann::json& j, const char* key) {
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) throw Error(ErrorCode::MalformedConfig, std::string(key) + " must be a 3-array");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

std::ofstream open_out(const Globals& g, const std::string& name) {
  const fs::path dir = g.out_dir.empty() ? fs::path(".") : fs::path(g.out_dir);
  fs::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw Error(ErrorCode::Validation, "cannot write " + (dir / name).string());
  return f;
}

ordered_json config_json(const IntegratorConfig& cfg) {
  return {{"rel_tol", cfg.rel_tol},
          {"abs_tol", cfg.abs_tol},
          {"max_step_s", std::isfinite(cfg.max_step) ? ordered_json(cfg.max_step) : ordered_json(nullptr)},
          {"initial_step_s", cfg.initial_step},
          {"r_min_m", cfg.r_min},
          {"history_bootstrap", std::string(to_string(cfg.history_bootstrap))},
          {"lag_fraction", cfg.lag_fraction}};
}

ordered_json report_json(const ConservationReport& r) {
  return {{"max_rel_drift_E", r.max_rel_drift_E},
          {"max_rel_drift_M", r.max_rel_drift_M},
          {"max_rel_drift_binding", r.max_rel_drift_binding},
          {"fourvel_norm_residual", r.fourvel_norm_residual}};
}

// --- orbit ---------------------------------------------------------------------------------

void cmd_orbit(const Globals& g, const std::string& planet, std::ostream& out) {
  const auto table = load(g);
  const auto& rec = table.at(planet_arg(planet));
  const double c = table.c();
  const double m = sun_mass_from_orbit(rec, c);
  const auto orbit = orbit_from_invariants(invariants_for_planet(rec, c), m, 0.0, c);
  const double revs = 100.0 * rec.mean_frequency / table.at(PlanetId::Earth).mean_frequency;
  const int periods = static_cast<int>(std::floor(revs));

  ordered_json j;
  j["planet"] = std::string(planet_name(rec.id));
  j["p_m"] = orbit.p;
  j["e"] = orbit.e;
  j["a_m"] = orbit.a;
  j["b_m"] = orbit.b;
  j["T_s"] = orbit.T;
  j["omega_rad_s"] = orbit.omega;
  j["m10G_over_c2_m"] = m / (c * c);
  j["revolutions_per_century"] = periods;
  for (auto model : {PrecessionModel::Causal, PrecessionModel::GeneralRelativity}) {
    const double deficit = precession_deficit(rec, model, c);
    j[std::string(to_string(model))] = {{"one_minus_gamma", deficit},
                                        {"gamma", 1.0 - deficit},
                                        {"century_advance_arcsec", century_advance(deficit, periods)}};
  }
  if (g.json) {
    out << j.dump(2) << "\n";
    return;
  }
  out << "planet " << planet_name(rec.id) << "\n"
      << "  p = " << fmt6(orbit.p) << " m, e = " << fmt6(orbit.e) << ", a = " << fmt6(orbit.a)
      << " m, b = " << fmt6(orbit.b) << " m\n"
      << "  T = " << fmt6(orbit.T) << " s, omega = " << fmt6(orbit.omega) << " rad/s\n"
      << "  m10G/c^2 = " << fmt6(m / (c * c)) << " m\n";
  for (auto model : {PrecessionModel::Causal, PrecessionModel::GeneralRelativity}) {
    const auto& mj = j[std::string(to_string(model))];
    out << "  [" << to_string(model) << "] 1-gamma = " << fmt6(mj["one_minus_gamma"].get<double>())
        << ", century advance (" << periods << " revolutions) = "
        << fmt6(mj["century_advance_arcsec"].get<double>()) << " arcsec\n";
  }
}

// --- integrate -----------------------------------------------------------------------------

void cmd_integrate(const Globals& g, const std::string& planet, double periods, const IntegratorConfig& cfg,
                   std::ostream& out) {
  if (!(periods > 0.0)) throw Error(ErrorCode::Validation, "--periods must be positive");
  const auto table = load(g);
  const auto& rec = table.at(planet_arg(planet));
  const double c = table.c();
  const double m = table.constants().sun_mass_parameter;
  const auto s0 = perihelion_state(rec.semi_major, rec.eccentricity, m, c);
  const auto orbit = orbit_from_invariants(conserved_quantities(s0, m, c), m, 0.0, c);
  const auto run = integrate_central(s0, m, periods * orbit.T, cfg, c);
  const auto report = conservation_report(run.trajectory, m);

  auto csv = open_out(g, "trajectory.csv");
  write_trajectory_csv(csv, run.trajectory);

  ordered_json j;
  j["planet"] = std::string(planet_name(rec.id));
  j["periods"] = periods;
  j["t_end_s"] = periods * orbit.T;
  j["m10G_m3_s2"] = m;
  j["config"] = config_json(cfg);
  j["status"] = run.status == RunStatus::Completed ? "completed" : "collision";
  j["accepted_steps"] = run.accepted;
  j["rejected_steps"] = run.rejected;
  j["samples"] = run.trajectory.size();
  j["conservation"] = report_json(report);
  auto meta = open_out(g, "run.json");
  meta << j.dump(2) << "\n";

  if (g.json) {
    out << j.dump(2) << "\n";
  } else {
    out << "integrated " << planet_name(rec.id) << " for " << fmt6(periods) << " periods: " << run.accepted
        << " steps (" << run.rejected << " rejected)\n"
        << "  drift E " << fmt6(report.max_rel_drift_E) << ", |M| " << fmt6(report.max_rel_drift_M)
        << ", c^2-E " << fmt6(report.max_rel_drift_binding) << ", four-velocity "
        << fmt6(report.fourvel_norm_residual) << "\n";
  }
}

// --- pair ----------------------------------------------------------------------------------

void cmd_pair(const Globals& g, const std::string& scenario_path, std::ostream& out) {
  std::ifstream in(scenario_path);
  if (!in) throw Error(ErrorCode::MalformedConfig, "cannot read scenario " + scenario_path);
  nlohmann::json sj;
  try {
    sj = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedConfig, std::string("scenario: ") + e.what());
  }

  IntegratorConfig cfg;
  PairMasses masses;
  SourceSpec bodies[2];
  double t_end = 0.0;
  double c = kSpeedOfLight;
  try {
    c = sj.value("c_m_s", kSpeedOfLight);
    t_end = sj.at("t_end_s").get<double>();
    if (sj.contains("config")) {
      const auto& cj = sj["config"];
      cfg.rel_tol = cj.value("rel_tol", cfg.rel_tol);
      cfg.abs_tol = cj.value("abs_tol", cfg.abs_tol);
      cfg.max_step = cj.value("max_step_s", cfg.max_step);
      cfg.r_min = cj.value("r_min_m", cfg.r_min);
      cfg.lag_fraction = cj.value("lag_fraction", cfg.lag_fraction);
      if (cj.contains("history_bootstrap")) cfg.history_bootstrap = bootstrap_arg(cj["history_bootstrap"]);
    }
    const auto& bj = sj.at("bodies");
    if (!bj.is_array() || bj.size() != 2) throw Error(ErrorCode::MalformedConfig, "scenario: need exactly 2 bodies");
    for (std::size_t k = 0; k < 2; ++k) {
      const auto& b = bj[k];
      const double mass = b.at("mass_m3_s2").get<double>();
      const double strength = b.value("strength_m3_s2", mass);
      (k == 0 ? masses.a : masses.b) = mass;
      bodies[k] = SourceSpec{strength, Trajectory({{0.0, vec_from(b, "x_m"), vec_from(b, "v_m_s")}}, c)};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedConfig, std::string("scenario: ") + e.what());
  }

  const auto run = integrate_retarded_pair(bodies[0], bodies[1], masses, t_end, cfg);
  auto ca = open_out(g, "pair_a.csv");
  write_trajectory_csv(ca, run.a);
  auto cb = open_out(g, "pair_b.csv");
  write_trajectory_csv(cb, run.b);

  ordered_json j;
  j["t_end_s"] = t_end;
  j["config"] = config_json(cfg);
  j["status"] = run.status == RunStatus::Completed ? "completed" : "collision";
  j["accepted_steps"] = run.accepted;
  j["rejected_steps"] = run.rejected;
  j["field_evaluations"] = run.field_evaluations;
  j["max_retarded_lead_s"] = run.max_retarded_lead;
  j["max_stencil_fraction"] = run.max_stencil_fraction;
  j["min_light_delay_s"] = run.min_light_delay;
  j["final_separation_m"] = norm(run.a.back().x - run.b.back().x);
  auto meta = open_out(g, "pair.json");
  meta << j.dump(2) << "\n";
  if (g.json) {
    out << j.dump(2) << "\n";
  } else {
    out << "pair integrated to t = " << fmt6(t_end) << " s: " << run.accepted << " steps, status "
        << j["status"].get<std::string>() << ", final separation " << fmt6(j["final_separation_m"].get<double>())
        << " m\n";
  }
}

// --- advance / sweep -----------------------------------------------------------------------

ordered_json advance_json(const ObservationScenario& sc, const AdvanceResult& r) {
  auto pair = [](const std::array<double, 2>& a) { return ordered_json::array({a[0], a[1]}); };
  ordered_json j;
  j["scenario"] = {{"phi1_0_rad", sc.phi1_0},
                   {"phi3_0_rad", sc.phi3_0},
                   {"l1", sc.l1},
                   {"l2", sc.l2},
                   {"model", std::string(to_string(sc.model))},
                   {"light_time", std::string(to_string(sc.light_time))}};
  j["alpha_rad"] = r.alpha_rad;
  j["alpha_deg"] = r.alpha_deg;
  j["t1_s"] = pair(r.t1);
  j["t3_s"] = pair(r.t3);
  j["tau3"] = pair(r.tau3);
  j["earth_radii_a3"] = pair(r.earth_radii);
  j["earth_angles_rad"] = pair(r.earth_angles);
  j["mercury_angles_rad"] = pair(r.mercury_angles);
  j["positions_m"] = {{"mercury_l1", vec_json(r.positions[0])},
                      {"earth_l1", vec_json(r.positions[1])},
                      {"mercury_l2", vec_json(r.positions[2])},
                      {"earth_l2", vec_json(r.positions[3])}};
  j["observed_advance_deg_per_century"] = 1.55548;
  return j;
}

struct AdvanceArgs {
  double phi1 = 0.0;
  double phi3 = 0.0;
  int centuries = 1;
  std::string model = "causal";
  std::string light_time = "neglect";
};

ObservationScenario scenario_from(const Globals& g, const AdvanceArgs& a, const PlanetTable& table) {
  const double unit = g.deg ? kPi / 180.0 : 1.0;
  const auto pair = select_perihelion_pair(a.centuries, table);
  ObservationScenario sc;
  sc.phi1_0 = a.phi1 * unit;
  sc.phi3_0 = a.phi3 * unit;
  sc.l1 = pair.l1;
  sc.l2 = pair.l2;
  sc.model = model_arg(a.model);
  sc.light_time = light_time_arg(a.light_time);
  return sc;
}

void cmd_advance(const Globals& g, const AdvanceArgs& a, std::ostream& out) {
  const auto table = load(g);
  const auto sc = scenario_from(g, a, table);
  out << advance_json(sc, advance_angle(sc, table)).dump(2) << "\n";
}

std::vector<double> grid(const std::vector<double>& explicit_values, int n, double unit) {
  std::vector<double> v;
  if (!explicit_values.empty()) {
    for (double x : explicit_values) v.push_back(x * unit);
    return v;
  }
  if (n < 1) throw Error(ErrorCode::Validation, "grid size must be >= 1");
  for (int i = 0; i < n; ++i) v.push_back(2.0 * kPi * i / n);
  return v;
}

void cmd_sweep(const Globals& g, const AdvanceArgs& a, const std::vector<double>& phi1s,
               const std::vector<double>& phi3s, int n1, int n3, unsigned threads, std::ostream& out) {
  const auto table = load(g);
  const double unit = g.deg ? kPi / 180.0 : 1.0;
  const auto sc = scenario_from(g, a, table);
  const auto g1 = grid(phi1s, n1, unit);
  const auto g3 = grid(phi3s, n3, unit);
  const auto alpha = advance_sweep(g1, g3, sc, table, threads);
  if (g.out_dir.empty()) {
    write_sweep_csv(out, g1, g3, alpha);
    return;
  }
  auto f = open_out(g, "sweep.csv");
  write_sweep_csv(f, g1, g3, alpha);
  out << "wrote " << g1.size() * g3.size() << " cells to " << (fs::path(g.out_dir) / "sweep.csv").string() << "\n";
}

// --- constants -----------------------------------------------------------------------------

void cmd_constants(const Globals& g, std::ostream& out) {
  const auto table = load(g);
  if (!g.json) {
    out << serialize_table(table);
    return;
  }
  ordered_json j;
  const auto& k = table.constants();
  j["constants"] = {{"c_m_s", k.c}, {"G", k.G}, {"m10G_m3_s2", k.sun_mass_parameter}};
  j["planets"] = ordered_json::array();
  for (const auto& r : table.records()) {
    j["planets"].push_back({{"name", std::string(planet_name(r.id))},
                            {"k", static_cast<int>(r.id)},
                            {"e", r.eccentricity},
                            {"a_m", r.semi_major},
                            {"omega_rad_s", r.mean_frequency},
                            {"omega2a3_over_c2_m", r.omega2a3_over_c2},
                            {"theta_rad", r.inclination}});
  }
  out << j.dump(2) << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Causal-gravity celestial mechanics: orbits, integration and the Mercury advance observable", "cgrav"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--ephemeris", g.ephemeris, "INI file overriding the built-in planet table");
  app.add_option("--out", g.out_dir, "Directory for bulk output files");
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_flag("--deg", g.deg, "Angles on the command line are in degrees");

  std::string planet;
  auto* orbit = app.add_subcommand("orbit", "Orbit parameters and precession of one planet");
  orbit->add_option("planet", planet, "Planet name")->required();

  double periods = 10.0;
  IntegratorConfig cfg;
  auto* integrate = app.add_subcommand("integrate", "Integrate a planet in the central field");
  integrate->add_option("planet", planet, "Planet name")->required();
  integrate->add_option("--periods", periods, "Number of radial periods");
  integrate->add_option("--rel-tol", cfg.rel_tol, "Relative tolerance");
  integrate->add_option("--abs-tol", cfg.abs_tol, "Absolute tolerance");
  integrate->add_option("--max-step", cfg.max_step, "Maximum step (s)");

  std::string scenario;
  auto* pair = app.add_subcommand("pair", "Integrate a retarded two-body scenario (JSON)");
  pair->add_option("scenario", scenario, "Scenario file")->required();

  AdvanceArgs adv;
  auto add_advance_opts = [&](CLI::App* sub) {
    sub->add_option("--centuries", adv.centuries, "Observation window in Earth centuries");
    sub->add_option("--model", adv.model, "Precession model: causal|gr");
    sub->add_option("--light-time", adv.light_time, "Light-time mode: neglect|exact");
  };
  auto* advance = app.add_subcommand("advance", "Perihelion advance angle seen from Earth");
  advance->add_option("--phi1", adv.phi1, "Mercury perihelion angle");
  advance->add_option("--phi3", adv.phi3, "Earth perihelion angle");
  add_advance_opts(advance);

  std::vector<double> phi1s, phi3s;
  int n1 = 8, n3 = 1;
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Advance angle over a grid of perihelion angles (CSV)");
  sweep->add_option("--phi1", phi1s, "Explicit Mercury angles")->delimiter(',');
  sweep->add_option("--phi3", phi3s, "Explicit Earth angles")->delimiter(',');
  sweep->add_option("--n1", n1, "Uniform grid size over [0, 2 pi) for phi1");
  sweep->add_option("--n3", n3, "Uniform grid size over [0, 2 pi) for phi3");
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");
  add_advance_opts(sweep);

  auto* constants = app.add_subcommand("constants", "Dump the ephemeris table");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (*orbit) cmd_orbit(g, planet, out);
    else if (*integrate) cmd_integrate(g, planet, periods, cfg, out);
    else if (*pair) cmd_pair(g, scenario, out);
    else if (*advance) cmd_advance(g, adv, out);
    else if (*sweep) cmd_sweep(g, adv, phi1s, phi3s, n1, n3, threads, out);
    else if (*constants) cmd_constants(g, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace cgrav::cli
