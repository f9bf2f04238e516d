#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "skewspec/cocycle.hpp"
#include "skewspec/errors.hpp"
#include "skewspec/montecarlo.hpp"
#include "skewspec/parallel.hpp"
#include "skewspec/report.hpp"
#include "skewspec/verify.hpp"

using namespace skewspec;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "skewspec 0.1.0";

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

double parse_omega(const std::string& s) {
  if (s == "golden") return kGoldenOmega;
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw contract_error("omega must be 'golden' or a decimal number");
  }
  require(pos == s.size(), "omega must be 'golden' or a decimal number");
  return v;
}

// e(angle); the half turn maps to exactly -1 so the z = -1 code paths
// (Schrodinger reduction, dual census route) engage without float residue
cplx angle_to_unit(double angle) {
  if (angle == 0.5) return cplx(-1.0, 0.0);
  if (angle == 0.0) return cplx(1.0, 0.0);
  return unit_phase(angle);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  require(bool(f), "cannot open output file: " + path);
  return f;
}

void write_manifest(const std::string& command, const ordered_json& config,
                    const std::vector<std::string>& outputs, double secs) {
  ordered_json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["config"] = config;
  m["duration_seconds"] = secs;
  m["outputs"] = outputs;
  std::string path = outputs.front() + ".manifest.json";
  std::ofstream f = open_out(path);
  f << m.dump(2) << "\n";
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string norm_key(std::string k) {
  while (!k.empty() && k.front() == '-') k.erase(k.begin());
  for (char& ch : k)
    if (ch == '_') ch = '-';
  return k;
}

// Applies --config FILE by injecting --key=value tokens for keys the command
// line does not already carry: explicit flags beat the file, the file beats
// the built-in defaults. Unknown keys surface as normal unknown-flag errors.
void expand_config(std::vector<std::string>& args) {
  size_t pos = 0;
  std::string path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      pos = i + 2;
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      pos = i + 1;
      break;
    }
  }
  if (path.empty()) return;

  std::set<std::string> given;
  for (const std::string& a : args)
    if (a.size() > 2 && a[0] == '-' && a[1] == '-')
      given.insert(norm_key(a.substr(0, a.find('='))));

  std::ifstream in(path);
  require(bool(in), "cannot read config file: " + path);
  std::vector<std::string> injected;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    size_t eq = t.find('=');
    require(eq != std::string::npos, "config line is not key=value: " + t);
    std::string key = norm_key(trim(t.substr(0, eq)));
    require(!key.empty(), "config line has an empty key: " + t);
    if (key == "config" || given.count(key) != 0) continue;
    injected.push_back("--" + key + "=" + trim(t.substr(eq + 1)));
  }
  args.insert(args.begin() + static_cast<long>(pos), injected.begin(), injected.end());
}

std::vector<double> default_b_grid() {
  std::vector<double> grid;
  for (double b = 0.4; b <= 1.1e6; b *= 2.0) grid.push_back(b);
  return grid;
}

std::string join_coords(const TorusPoint& x) {
  std::string s;
  for (int i = 0; i < x.dim(); ++i) {
    if (i) s += ",";
    s += fmt_g17(x[i]);
  }
  return s;
}

// ---------------------------------------------------------------- lyapunov

struct LyapOpts {
  std::string kind = "szego";
  double lambda = 0.5;
  double g = 1.0;
  std::string omega = "golden";
  int r = 2;
  double z_angle = 0.0;
  double energy = 0.0;
  long steps = 100000;
  int samples = 32;
  std::string mode = "sampled";
  std::vector<double> start;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  std::string config;
};

int run_lyapunov(const LyapOpts& o) {
  double omega = parse_omega(o.omega);
  SkewShiftMap map(o.r, omega);
  int threads = resolve_thread_count(o.threads);
  OrbitAverage mode = o.mode == "orbit" ? OrbitAverage::orbit : OrbitAverage::sampled;
  TorusPoint start_point;
  const TorusPoint* start = nullptr;
  if (!o.start.empty()) {
    require(mode == OrbitAverage::orbit, "lyapunov: --start only applies to --mode orbit");
    require(static_cast<int>(o.start.size()) == o.r,
            "lyapunov: --start needs exactly r coordinates");
    start_point = TorusPoint(o.start);
    start = &start_point;
  }

  Timer timer;
  LyapunovEstimate est;
  bool szego = o.kind == "szego";
  if (szego) {
    SamplingFunction f = SamplingFunction::canonical(o.r, cplx(o.lambda, 0.0));
    est = lyapunov_szego(f, map, angle_to_unit(o.z_angle), o.steps, o.samples, o.seed,
                         mode, start, threads);
  } else {
    est = lyapunov_schrodinger(o.g, map, o.energy, o.steps, o.samples, o.seed, mode,
                               start, threads);
  }

  std::ofstream out = open_out(o.out);
  write_csv(out,
            {"kind", "lambda", "g", "omega", "r", "z_angle", "energy", "steps",
             "samples", "seed", "mode", "value", "std_error", "renorms", "det_drift"},
            {{o.kind, szego ? fmt_g17(o.lambda) : "", szego ? "" : fmt_g17(o.g),
              fmt_g17(omega), std::to_string(o.r), szego ? fmt_g17(o.z_angle) : "",
              szego ? "" : fmt_g17(o.energy), std::to_string(est.steps),
              std::to_string(est.samples), std::to_string(o.seed), o.mode,
              fmt_g17(est.value), fmt_g17(est.std_error), std::to_string(est.renorms),
              fmt_g17(est.det_drift)}});
  out.close();

  ordered_json cfg;
  cfg["kind"] = o.kind;
  if (szego) {
    cfg["lambda"] = o.lambda;
    cfg["z_angle"] = o.z_angle;
  } else {
    cfg["g"] = o.g;
    cfg["energy"] = o.energy;
  }
  cfg["omega"] = omega;
  cfg["r"] = o.r;
  cfg["steps"] = o.steps;
  cfg["samples"] = o.samples;
  cfg["seed"] = o.seed;
  cfg["mode"] = o.mode;
  if (start) cfg["start"] = o.start;
  cfg["threads"] = threads;
  write_manifest("lyapunov", cfg, {o.out}, timer.seconds());

  std::printf("lyapunov %s: value %.6g +/- %.2g (steps %ld, samples %d, seed %llu)\n",
              o.kind.c_str(), est.value, est.std_error, est.steps, est.samples,
              static_cast<unsigned long long>(o.seed));
  return 0;
}

void add_lyapunov(CLI::App& app, int& rc) {
  auto o = std::make_shared<LyapOpts>();
  CLI::App* c = app.add_subcommand("lyapunov", "transfer-matrix growth rate estimate");
  c->add_option("--kind", o->kind, "szego or schrodinger")
      ->check(CLI::IsMember({"szego", "schrodinger"}))
      ->capture_default_str();
  c->add_option("--lambda", o->lambda, "coupling of the circle coefficients (szego)")
      ->capture_default_str();
  c->add_option("--g", o->g, "potential coupling (schrodinger)")->capture_default_str();
  c->add_option("--omega", o->omega, "frequency: 'golden' or a decimal")
      ->capture_default_str();
  c->add_option("--r", o->r, "torus dimension")->capture_default_str();
  c->add_option("--z-angle", o->z_angle, "spectral point e(angle) (szego)")
      ->capture_default_str();
  c->add_option("--energy", o->energy, "spectral energy (schrodinger)")
      ->capture_default_str();
  c->add_option("--steps", o->steps, "transfer steps per sample")->capture_default_str();
  c->add_option("--samples", o->samples, "independent base points")->capture_default_str();
  c->add_option("--mode", o->mode, "sampled or orbit")
      ->check(CLI::IsMember({"sampled", "orbit"}))
      ->capture_default_str();
  c->add_option("--start", o->start, "base point for orbit mode, comma separated")
      ->delimiter(',');
  c->add_option("--seed", o->seed, "rng seed")->capture_default_str();
  c->add_option("--threads", o->threads, "worker count; 0 = auto")->capture_default_str();
  c->add_option("--out", o->out, "output CSV path")->required();
  c->add_option("--config", o->config, "key=value config file; explicit flags win");
  c->callback([o, &rc] { rc = run_lyapunov(*o); });
}

// --------------------------------------------------------------------- ids

struct IdsOpts {
  double g = 1.0;
  std::string omega = "golden";
  int r = 2;
  long n = 2048;
  int samples = 16;
  int grid = 512;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  std::string config;
};

int run_ids(const IdsOpts& o) {
  double omega = parse_omega(o.omega);
  SkewShiftMap map(o.r, omega);
  int threads = resolve_thread_count(o.threads);

  Timer timer;
  IDSTable t = ids_estimate(o.g, map, o.n, o.samples, o.grid, o.seed, threads);

  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < t.energies.size(); ++i)
    rows.push_back({fmt_g17(t.energies[i]), fmt_g17(t.k[i])});
  std::ofstream out = open_out(o.out);
  write_csv(out, {"energy", "k"}, rows);
  out.close();

  ordered_json cfg;
  cfg["g"] = o.g;
  cfg["omega"] = omega;
  cfg["r"] = o.r;
  cfg["N"] = o.n;
  cfg["samples"] = o.samples;
  cfg["grid"] = o.grid;
  cfg["seed"] = o.seed;
  cfg["threads"] = threads;
  write_manifest("ids", cfg, {o.out}, timer.seconds());

  std::printf("ids: N = %ld, %d samples, k spans [%.6g, %.6g] over %zu energies\n",
              t.n_used, t.samples, t.k.front(), t.k.back(), t.energies.size());
  return 0;
}

void add_ids(CLI::App& app, int& rc) {
  auto o = std::make_shared<IdsOpts>();
  CLI::App* c =
      app.add_subcommand("ids", "integrated density of states of the potential window");
  c->add_option("--g", o->g, "potential coupling")->capture_default_str();
  c->add_option("--omega", o->omega, "frequency: 'golden' or a decimal")
      ->capture_default_str();
  c->add_option("--r", o->r, "torus dimension")->capture_default_str();
  c->add_option("--N", o->n, "window length")->capture_default_str();
  c->add_option("--samples", o->samples, "averaged base points")->capture_default_str();
  c->add_option("--grid", o->grid, "energy grid points")->capture_default_str();
  c->add_option("--seed", o->seed, "rng seed")->capture_default_str();
  c->add_option("--threads", o->threads, "worker count; 0 = auto")->capture_default_str();
  c->add_option("--out", o->out, "output CSV path")->required();
  c->add_option("--config", o->config, "key=value config file; explicit flags win");
  c->callback([o, &rc] { rc = run_ids(*o); });
}

// ------------------------------------------------------------- suitability

struct SuitOpts {
  double lambda = 0.5;
  std::string omega = "golden";
  int r = 2;
  double z_angle = 0.5;
  double beta_angle = 0.0;
  double beta_tilde_angle = 0.0;
  std::vector<long> scales = {32, 64, 128};
  int samples = 400;
  double gamma = 0.0;
  double tau = 0.5;
  int p = 3;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  std::string audit;
  std::string config;
};

int run_suitability(const SuitOpts& o) {
  ExperimentConfig cfg;
  cfg.seed = o.seed;
  cfg.samples = o.samples;
  cfg.scales = o.scales;
  cfg.lambda = o.lambda;
  cfg.r = o.r;
  cfg.omega = parse_omega(o.omega);
  cfg.z = angle_to_unit(o.z_angle);
  cfg.beta = angle_to_unit(o.beta_angle);
  cfg.beta_tilde = angle_to_unit(o.beta_tilde_angle);
  cfg.gamma = o.gamma;
  cfg.tau = o.tau;
  cfg.p = o.p;
  cfg.threads = resolve_thread_count(o.threads);

  Timer timer;
  std::ofstream audit_file;
  std::ostream* audit = nullptr;
  if (!o.audit.empty()) {
    audit_file = open_out(o.audit);
    audit = &audit_file;
  }
  UnsuitableMeasureReport rep = measure_unsuitable(cfg, audit);
  if (audit) audit_file.close();

  std::ofstream out = open_out(o.out);
  out << census_to_json(rep) << "\n";
  out.close();

  ordered_json jcfg;
  jcfg["lambda"] = o.lambda;
  jcfg["omega"] = cfg.omega;
  jcfg["r"] = o.r;
  jcfg["z_angle"] = o.z_angle;
  jcfg["beta_angle"] = o.beta_angle;
  jcfg["beta_tilde_angle"] = o.beta_tilde_angle;
  jcfg["scales"] = o.scales;
  jcfg["samples"] = o.samples;
  jcfg["gamma"] = o.gamma;
  jcfg["tau"] = o.tau;
  jcfg["p"] = o.p;
  jcfg["seed"] = o.seed;
  jcfg["threads"] = cfg.threads;
  std::vector<std::string> outputs = {o.out};
  if (!o.audit.empty()) outputs.push_back(o.audit);
  write_manifest("suitability", jcfg, outputs, timer.seconds());

  std::string ps;
  for (const ScaleCensus& s : rep.scales) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%.4g (N = %ld)", ps.empty() ? "" : ", ", s.p_hat,
                  s.scale);
    ps += buf;
  }
  std::printf("suitability census: unsuitable fraction %s\n", ps.c_str());
  return 0;
}

void add_suitability(CLI::App& app, int& rc) {
  auto o = std::make_shared<SuitOpts>();
  CLI::App* c = app.add_subcommand(
      "suitability", "census of windows failing the resolvent decay test");
  c->add_option("--lambda", o->lambda, "coupling of the circle coefficients")
      ->capture_default_str();
  c->add_option("--omega", o->omega, "frequency: 'golden' or a decimal")
      ->capture_default_str();
  c->add_option("--r", o->r, "torus dimension")->capture_default_str();
  c->add_option("--z-angle", o->z_angle, "spectral point e(angle); 0.5 is exactly -1")
      ->capture_default_str();
  c->add_option("--beta-angle", o->beta_angle, "low boundary phase angle")
      ->capture_default_str();
  c->add_option("--beta-tilde-angle", o->beta_tilde_angle, "high boundary phase angle")
      ->capture_default_str();
  c->add_option("--scales", o->scales, "window half-widths, ascending")
      ->delimiter(',')
      ->capture_default_str();
  c->add_option("--samples", o->samples, "base points per scale")->capture_default_str();
  c->add_option("--gamma", o->gamma, "decay rate; 0 resolves to 1/sqrt(N)")
      ->capture_default_str();
  c->add_option("--tau", o->tau, "norm budget exponent, Gamma = N^tau")
      ->capture_default_str();
  c->add_option("--p", o->p, "dyadic safety level")->capture_default_str();
  c->add_option("--seed", o->seed, "rng seed")->capture_default_str();
  c->add_option("--threads", o->threads, "worker count; 0 = auto")->capture_default_str();
  c->add_option("--out", o->out, "output JSON path")->required();
  c->add_option("--audit", o->audit, "per-sample CSV audit stream");
  c->add_option("--config", o->config, "key=value config file; explicit flags win");
  c->callback([o, &rc] { rc = run_suitability(*o); });
}

// ------------------------------------------------------------------ wegner

struct WegnerOpts {
  double lambda = 0.5;
  std::string omega = "golden";
  int r = 2;
  double z_angle = 0.5;
  long scale = 64;
  int samples = 400;
  std::vector<double> b_grid;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  std::string csv;
  std::string config;
};

int run_wegner(const WegnerOpts& o) {
  ExperimentConfig cfg;
  cfg.seed = o.seed;
  cfg.samples = o.samples;
  cfg.scales = {o.scale};
  cfg.lambda = o.lambda;
  cfg.r = o.r;
  cfg.omega = parse_omega(o.omega);
  cfg.z = angle_to_unit(o.z_angle);
  cfg.threads = resolve_thread_count(o.threads);
  std::vector<double> grid = o.b_grid.empty() ? default_b_grid() : o.b_grid;

  Timer timer;
  WegnerTailReport tail = wegner_tail_estimate(cfg, grid);

  std::ofstream out = open_out(o.out);
  out << wegner_to_json(tail) << "\n";
  out.close();
  std::vector<std::string> outputs = {o.out};
  if (!o.csv.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < tail.thresholds.size(); ++i)
      rows.push_back({fmt_g17(tail.thresholds[i]), fmt_g17(tail.prob_full[i]),
                      fmt_g17(tail.prob_sub[i])});
    std::ofstream curve = open_out(o.csv);
    write_csv(curve, {"threshold", "prob_full", "prob_sub"}, rows);
    outputs.push_back(o.csv);
  }

  ordered_json jcfg;
  jcfg["lambda"] = o.lambda;
  jcfg["omega"] = cfg.omega;
  jcfg["r"] = o.r;
  jcfg["z_angle"] = o.z_angle;
  jcfg["scale"] = o.scale;
  jcfg["samples"] = o.samples;
  jcfg["b_grid"] = grid;
  jcfg["seed"] = o.seed;
  jcfg["threads"] = cfg.threads;
  write_manifest("wegner", jcfg, outputs, timer.seconds());

  std::printf("wegner tail at N = %ld: slope %.4g (full), %.4g (subwindows)\n",
              tail.scale, tail.slope_full, tail.slope_sub);
  return 0;
}

void add_wegner(CLI::App& app, int& rc) {
  auto o = std::make_shared<WegnerOpts>();
  CLI::App* c =
      app.add_subcommand("wegner", "resolvent norm exceedance tail over random windows");
  c->add_option("--lambda", o->lambda, "coupling of the circle coefficients")
      ->capture_default_str();
  c->add_option("--omega", o->omega, "frequency: 'golden' or a decimal")
      ->capture_default_str();
  c->add_option("--r", o->r, "torus dimension")->capture_default_str();
  c->add_option("--z-angle", o->z_angle, "spectral point e(angle); 0.5 is exactly -1")
      ->capture_default_str();
  c->add_option("--scale", o->scale, "window half-width N")->capture_default_str();
  c->add_option("--samples", o->samples, "base points")->capture_default_str();
  c->add_option("--b-grid", o->b_grid,
                "threshold grid, comma separated; default 0.4 * 2^k up to 1.1e6")
      ->delimiter(',');
  c->add_option("--seed", o->seed, "rng seed")->capture_default_str();
  c->add_option("--threads", o->threads, "worker count; 0 = auto")->capture_default_str();
  c->add_option("--out", o->out, "output JSON path")->required();
  c->add_option("--csv", o->csv, "also write the exceedance curve as CSV");
  c->add_option("--config", o->config, "key=value config file; explicit flags win");
  c->callback([o, &rc] { rc = run_wegner(*o); });
}

// ------------------------------------------------------------ return-times

struct RtOpts {
  std::string omega = "golden";
  int r = 2;
  std::vector<double> center;
  double epsilon = 0.1;
  long horizon = 100000;
  int starts = 10;
  std::uint64_t seed = 1;
  std::string out;
  std::string config;
};

int run_return_times(const RtOpts& o) {
  double omega = parse_omega(o.omega);
  SkewShiftMap map(o.r, omega);
  std::vector<double> center = o.center;
  if (center.empty()) center.assign(static_cast<size_t>(o.r), 0.5);
  require(static_cast<int>(center.size()) == o.r,
          "return-times: --center needs exactly r coordinates");
  BallRegion region(TorusPoint(center), o.epsilon);
  require(o.starts >= 1, "return-times: need at least one start");

  Timer timer;
  Rng rng(o.seed);
  std::vector<std::vector<std::string>> rows;
  std::vector<double> errors;
  for (int s = 0; s < o.starts; ++s) {
    TorusPoint x = TorusPoint::random(o.r, rng);
    ReturnTimeStats st = return_time_count(map, x, region, o.horizon);
    double err = std::fabs(st.frequency - st.target_measure);
    errors.push_back(err);
    rows.push_back({std::to_string(s), join_coords(x), std::to_string(st.hits),
                    fmt_g17(st.frequency), fmt_g17(st.target_measure), fmt_g17(err)});
  }
  std::ofstream out = open_out(o.out);
  write_csv(out, {"start", "x", "hits", "frequency", "target_measure", "abs_error"},
            rows);
  out.close();

  ordered_json cfg;
  cfg["omega"] = omega;
  cfg["r"] = o.r;
  cfg["center"] = center;
  cfg["epsilon"] = o.epsilon;
  cfg["L"] = o.horizon;
  cfg["starts"] = o.starts;
  cfg["seed"] = o.seed;
  write_manifest("return-times", cfg, {o.out}, timer.seconds());

  std::sort(errors.begin(), errors.end());
  double med = errors.size() % 2 == 1
                   ? errors[errors.size() / 2]
                   : 0.5 * (errors[errors.size() / 2 - 1] + errors[errors.size() / 2]);
  std::printf("return-times: target measure %.6g, median |frequency - measure| = %.3g "
              "over %d starts\n",
              region.measure(), med, o.starts);
  return 0;
}

void add_return_times(CLI::App& app, int& rc) {
  auto o = std::make_shared<RtOpts>();
  CLI::App* c =
      app.add_subcommand("return-times", "orbit visit frequency of a torus ball");
  c->add_option("--omega", o->omega, "frequency: 'golden' or a decimal")
      ->capture_default_str();
  c->add_option("--r", o->r, "torus dimension")->capture_default_str();
  c->add_option("--center", o->center, "ball center, comma separated; default all 0.5")
      ->delimiter(',');
  c->add_option("--epsilon", o->epsilon, "ball radius in the sup metric")
      ->capture_default_str();
  c->add_option("--L", o->horizon, "orbit horizon")->capture_default_str();
  c->add_option("--starts", o->starts, "random base points")->capture_default_str();
  c->add_option("--seed", o->seed, "rng seed")->capture_default_str();
  c->add_option("--out", o->out, "output CSV path")->required();
  c->add_option("--config", o->config, "key=value config file; explicit flags win");
  c->callback([o, &rc] { rc = run_return_times(*o); });
}

// ----------------------------------------------------------------- spacing

struct SpacingOpts {
  double g = 1.0;
  std::string omega = "golden";
  int r = 2;
  std::vector<double> x;
  long n = 2048;
  double center = 0.0;
  double halfwidth = 0.2;
  std::uint64_t seed = 1;
  std::string out;
  std::string config;
};

TorusPoint base_point(const std::vector<double>& given, int r, std::uint64_t seed) {
  if (!given.empty()) {
    require(static_cast<int>(given.size()) == r, "--x needs exactly r coordinates");
    return TorusPoint(given);
  }
  Rng rng(seed);
  return TorusPoint::random(r, rng);
}

int run_spacing(const SpacingOpts& o) {
  double omega = parse_omega(o.omega);
  SkewShiftMap map(o.r, omega);
  TorusPoint x = base_point(o.x, o.r, o.seed);

  Timer timer;
  SpacingStats st = spacing_stats(PotentialSpec(o.g, map, x), o.n, o.center, o.halfwidth);

  ordered_json j;
  j["kind"] = "spacing";
  j["g"] = o.g;
  j["omega"] = omega;
  j["r"] = o.r;
  j["x"] = x.coords;
  j["N"] = o.n;
  j["center"] = o.center;
  j["halfwidth"] = o.halfwidth;
  j["gap_count"] = st.gaps.size();
  j["mean"] = st.mean;
  j["variance"] = st.variance;
  j["ks_poisson"] = st.ks_poisson;
  j["ks_clock"] = st.ks_clock;
  j["gaps"] = st.gaps;
  std::ofstream out = open_out(o.out);
  out << j.dump(2) << "\n";
  out.close();

  ordered_json cfg;
  cfg["g"] = o.g;
  cfg["omega"] = omega;
  cfg["r"] = o.r;
  cfg["x"] = x.coords;
  cfg["N"] = o.n;
  cfg["center"] = o.center;
  cfg["halfwidth"] = o.halfwidth;
  cfg["seed"] = o.seed;
  write_manifest("spacing", cfg, {o.out}, timer.seconds());

  std::printf("spacing: %zu gaps, mean %.4g, ks_poisson %.4g, ks_clock %.4g\n",
              st.gaps.size(), st.mean, st.ks_poisson, st.ks_clock);
  return 0;
}

void add_spacing(CLI::App& app, int& rc) {
  auto o = std::make_shared<SpacingOpts>();
  CLI::App* c =
      app.add_subcommand("spacing", "normalized eigenvalue gap statistics in a window");
  c->add_option("--g", o->g, "potential coupling")->capture_default_str();
  c->add_option("--omega", o->omega, "frequency: 'golden' or a decimal")
      ->capture_default_str();
  c->add_option("--r", o->r, "torus dimension")->capture_default_str();
  c->add_option("--x", o->x, "base point, comma separated; default drawn from seed")
      ->delimiter(',');
  c->add_option("--N", o->n, "window length")->capture_default_str();
  c->add_option("--center", o->center, "energy window center")->capture_default_str();
  c->add_option("--halfwidth", o->halfwidth, "energy window half-width")
      ->capture_default_str();
  c->add_option("--seed", o->seed, "rng seed for the default base point")
      ->capture_default_str();
  c->add_option("--out", o->out, "output JSON path")->required();
  c->add_option("--config", o->config, "key=value config file; explicit flags win");
  c->callback([o, &rc] { rc = run_spacing(*o); });
}

// ----------------------------------------------------------- zero-spectrum

struct ZeroOpts {
  double g = 1.0;
  std::string omega = "golden";
  int r = 2;
  std::vector<double> x;
  std::vector<long> sizes = {256, 1024, 4096};
  std::uint64_t seed = 1;
  std::string out;
  std::string config;
};

int run_zero_spectrum(const ZeroOpts& o) {
  double omega = parse_omega(o.omega);
  SkewShiftMap map(o.r, omega);
  TorusPoint x = base_point(o.x, o.r, o.seed);

  Timer timer;
  ZeroSpectrumReport rep = zero_in_spectrum_check(PotentialSpec(o.g, map, x), o.sizes);

  ordered_json j;
  j["kind"] = "zero_spectrum";
  j["g"] = o.g;
  j["omega"] = omega;
  j["r"] = o.r;
  j["x"] = x.coords;
  j["sizes"] = rep.sizes;
  j["min_abs_eig"] = rep.min_abs_eig;
  j["nonincreasing"] = rep.nonincreasing;
  std::ofstream out = open_out(o.out);
  out << j.dump(2) << "\n";
  out.close();

  ordered_json cfg;
  cfg["g"] = o.g;
  cfg["omega"] = omega;
  cfg["r"] = o.r;
  cfg["x"] = x.coords;
  cfg["sizes"] = o.sizes;
  cfg["seed"] = o.seed;
  write_manifest("zero-spectrum", cfg, {o.out}, timer.seconds());

  std::string vals;
  for (double v : rep.min_abs_eig) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%.4g", vals.empty() ? "" : ", ", v);
    vals += buf;
  }
  std::printf("zero-spectrum: min |eig| = %s (%s)\n", vals.c_str(),
              rep.nonincreasing ? "nonincreasing" : "NOT nonincreasing");
  return 0;
}

void add_zero_spectrum(CLI::App& app, int& rc) {
  auto o = std::make_shared<ZeroOpts>();
  CLI::App* c = app.add_subcommand(
      "zero-spectrum", "distance from zero energy to the window spectrum");
  c->add_option("--g", o->g, "potential coupling")->capture_default_str();
  c->add_option("--omega", o->omega, "frequency: 'golden' or a decimal")
      ->capture_default_str();
  c->add_option("--r", o->r, "torus dimension")->capture_default_str();
  c->add_option("--x", o->x, "base point, comma separated; default drawn from seed")
      ->delimiter(',');
  c->add_option("--sizes", o->sizes, "window lengths, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  c->add_option("--seed", o->seed, "rng seed for the default base point")
      ->capture_default_str();
  c->add_option("--out", o->out, "output JSON path")->required();
  c->add_option("--config", o->config, "key=value config file; explicit flags win");
  c->callback([o, &rc] { rc = run_zero_spectrum(*o); });
}

// ------------------------------------------------------------------ verify

struct VerifyOpts {
  std::string suite = "fast";
  int threads = 0;
  std::string scratch;
  std::string config;
};

int run_verify(const VerifyOpts& o) {
  int threads = resolve_thread_count(o.threads);
  std::string scratch =
      o.scratch.empty()
          ? (std::filesystem::temp_directory_path() / "skewspec-verify").string()
          : o.scratch;
  std::vector<CheckResult> res =
      o.suite == "fast" ? fast_checks(threads) : acceptance_checks(threads, scratch);
  bool all = true;
  for (const CheckResult& c : res) {
    std::printf("[%s] %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str());
    if (!c.detail.empty()) std::printf("       %s\n", c.detail.c_str());
    all = all && c.pass;
  }
  std::printf("%zu checks, %s\n", res.size(),
              all ? "all passed" : "failures listed above");
  return all ? 0 : 3;
}

void add_verify(CLI::App& app, int& rc) {
  auto o = std::make_shared<VerifyOpts>();
  CLI::App* c = app.add_subcommand("verify", "run the built-in check suites");
  c->add_option("--suite", o->suite, "fast or acceptance")
      ->check(CLI::IsMember({"fast", "acceptance"}))
      ->capture_default_str();
  c->add_option("--threads", o->threads, "worker count; 0 = auto")->capture_default_str();
  c->add_option("--scratch", o->scratch,
                "writable directory for rerun artifacts (acceptance suite)");
  c->add_option("--config", o->config, "key=value config file; explicit flags win");
  c->callback([o, &rc] { rc = run_verify(*o); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skew-shift CMV / Schrodinger operator toolkit", "skewspec"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  int rc = 0;
  add_lyapunov(app, rc);
  add_ids(app, rc);
  add_suitability(app, rc);
  add_wegner(app, rc);
  add_return_times(app, rc);
  add_spacing(app, rc);
  add_zero_spectrum(app, rc);
  add_verify(app, rc);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    expand_config(args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const contract_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const numeric_error& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 2;
  }
  return rc;
}
