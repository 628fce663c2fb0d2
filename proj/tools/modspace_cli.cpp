// modspace: command-line front end for modulation-space norms, evolution and probes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "modspace/modspace.hpp"

namespace fs = std::filesystem;
using namespace modspace;
using io::json;

namespace {

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  require(EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) == 1, ErrorKind::Io,
          "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string fmt(double v) { return io::format_number(v); }

// Boxes below this fraction of the largest piece are FFT round-off and are
// left out of listings.
constexpr double kNegligible = 1e-12;

// ---------------------------------------------------------------------------
// Options shared by every subcommand

struct Global {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;
  std::string format = "report";
  bool timing = false;
};

/// Collects the run manifest: command, resolved options, digests.
class Manifest {
 public:
  Manifest(std::string command, const Global& g) : command_(std::move(command)), global_(g) {}

  void record_options(const CLI::App* app) {
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() && opt->get_positional() == false) continue;
      const std::string name = opt->get_single_name();
      if (name == "help" || name == "config") continue;
      std::string value;
      if (opt->count() > 0) {
        const auto& r = opt->results();
        if (opt->get_type_size() == 0) {
          value = "true";
        } else {
          for (std::size_t i = 0; i < r.size(); ++i) value += (i ? "," : "") + r[i];
        }
      } else {
        value = opt->get_type_size() == 0 ? "false" : opt->get_default_str();
      }
      config_[name] = value;
    }
  }

  void add_input(const fs::path& p) { inputs_.push_back({{"path", p.string()}, {"sha256", sha256_hex(io::read_text(p))}}); }

  /// Writes `text` to out/name and records its digest.
  void write_output(const fs::path& path, const std::string& text) {
    io::write_text(path, text);
    outputs_.push_back({{"path", path.string()}, {"sha256", sha256_hex(text)}});
  }

  json to_json(double seconds) const {
    json m{{"command", command_},
           {"version", kVersion},
           {"seed", global_.seed},
           {"config", config_},
           {"inputs", inputs_},
           {"outputs", outputs_}};
    if (global_.timing) m["runtime_seconds"] = seconds;
    return m;
  }

 private:
  std::string command_;
  Global global_;
  json config_ = json::object();
  json inputs_ = json::array();
  json outputs_ = json::array();
};

class Clock {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void record_all(Manifest& m, const CLI::App& root, const CLI::App* sub, const CLI::App* leaf = nullptr) {
  m.record_options(&root);
  m.record_options(sub);
  if (leaf) m.record_options(leaf);
}

/// Writes report.json (and points.csv when given) under --out, then prints
/// the report or the CSV to stdout according to --format.
void emit(const Global& g, Manifest& manifest, const Clock& clock, json report, const std::string& csv) {
  if (!g.out.empty()) {
    if (!csv.empty()) manifest.write_output(fs::path(g.out) / "points.csv", csv);
    json doc = report;
    doc["manifest"] = manifest.to_json(clock.seconds());
    io::write_text(fs::path(g.out) / "report.json", doc.dump(2) + "\n");
  }
  if (g.format == "csv" && !csv.empty()) {
    std::cout << csv;
  } else {
    report["manifest"] = manifest.to_json(clock.seconds());
    std::cout << report.dump(2) << "\n";
  }
}

// ---------------------------------------------------------------------------
// norm

struct NormArgs {
  std::string field;
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
  std::string window = "raised-cosine";
  int k_max = -1;
  bool breakdown = false;
};

int resolve_k_max(const GridSpec& g, int k_max) { return k_max < 0 ? g.max_box_radius() : k_max; }

void run_norm(const Global& g, Manifest& manifest, const NormArgs& a) {
  const Clock clock;
  const Field f = io::load_field(a.field);
  manifest.add_input(a.field);
  const ModulationParams mp{a.s, a.p, a.q};
  const BoxTable table(f.grid(), make_window(parse_window_kind(a.window)), resolve_k_max(f.grid(), a.k_max));
  const SpectralField c = fft_forward(f);
  const double norm = modulation_norm(c, mp, table);
  const double tail = truncation_tail(c, table);
  std::cout << fmt(norm) << "\n";

  std::vector<std::string> columns;
  const int n = f.grid().n;
  if (n == 1) {
    columns.push_back("k");
  } else {
    for (int d = 0; d < n; ++d) columns.push_back("k" + std::to_string(d + 1));
  }
  columns.push_back("box_norm");
  columns.push_back("weighted_q");
  std::vector<std::vector<double>> rows;
  const auto norms = box_norms(c, a.p, table);
  const double floor = kNegligible * *std::max_element(norms.begin(), norms.end());
  for (std::size_t o = 0; o < norms.size(); ++o) {
    if (norms[o] <= floor) continue;
    const Index3 k = table.box(o);
    std::vector<double> row;
    for (int d = 0; d < n; ++d) row.push_back(k[d]);
    row.push_back(norms[o]);
    const double w = std::pow(japanese_bracket(k, n), a.s) * norms[o];
    row.push_back(std::isinf(a.q) ? w : std::pow(w, a.q));
    rows.push_back(std::move(row));
  }
  const std::string csv = io::to_csv(columns, rows);
  if (a.breakdown) std::cout << csv;
  if (!g.out.empty()) {
    json report{{"norm", norm}, {"truncation_tail", tail}, {"k_max", table.k_max()}};
    if (a.breakdown) manifest.write_output(fs::path(g.out) / "breakdown.csv", csv);
    report["manifest"] = manifest.to_json(clock.seconds());
    io::write_text(fs::path(g.out) / "report.json", report.dump(2) + "\n");
  }
}

// ---------------------------------------------------------------------------
// decompose

struct DecomposeArgs {
  std::string field;
  std::string window = "raised-cosine";
  int k_max = -1;
  bool all = false;
};

void run_decompose(const Global& g, Manifest& manifest, const DecomposeArgs& a) {
  require(!g.out.empty(), ErrorKind::InvalidArgument, "decompose needs --out DIR for the piece files");
  const Clock clock;
  const Field f = io::load_field(a.field);
  manifest.add_input(a.field);
  const Decomposition d = decompose(f, make_window(parse_window_kind(a.window)), resolve_k_max(f.grid(), a.k_max));
  const int n = f.grid().n;
  const double floor = kNegligible * lp_norm(f, 2.0);
  json pieces = json::array();
  for (const Index3& k : d.boxes()) {
    const Field& piece = d.piece(k);
    const double l2 = lp_norm(piece, 2.0);
    if (!a.all && l2 <= floor) continue;
    std::string name = "box";
    for (int i = 0; i < n; ++i) name += "_" + std::to_string(k[i]);
    name += ".json";
    manifest.write_output(fs::path(g.out) / name, io::to_json(piece).dump() + "\n");
    json idx = json::array();
    for (int i = 0; i < n; ++i) idx.push_back(k[i]);
    pieces.push_back({{"k", idx}, {"file", name}, {"l2_norm", l2}});
  }
  json report{{"k_max", d.k_max()}, {"window", a.window}, {"pieces", pieces}};
  report["manifest"] = manifest.to_json(clock.seconds());
  io::write_text(fs::path(g.out) / "report.json", report.dump(2) + "\n");
  std::cout << pieces.size() << " pieces written to " << g.out << "\n";
}

// ---------------------------------------------------------------------------
// evolve

struct EvolveArgs {
  std::string field;
  std::string init;
  int n = 1;
  int P = 1;
  int M = 64;
  std::string propagator = "fractional-heat";
  double alpha = 1.0;
  EvolveConfig cfg;
  std::string mode = "picard-global";
  std::string window = "raised-cosine";
};

PropagatorSpec parse_propagator(const std::string& name, double alpha) {
  if (name == "fractional-heat" || name == "heat") return PropagatorSpec::fractional_heat(alpha);
  if (name == "schrodinger") return PropagatorSpec::schrodinger();
  if (name == "kg-cos") return PropagatorSpec::kg_cos();
  if (name == "kg-sinc") return PropagatorSpec::kg_sinc();
  throw Error(ErrorKind::InvalidArgument, "unknown propagator '" + name + "'");
}

Field initial_field(const EvolveArgs& a, Manifest& manifest) {
  require(a.field.empty() != a.init.empty(), ErrorKind::InvalidArgument,
          "evolve needs exactly one of --field FILE or --init SPEC");
  if (!a.field.empty()) {
    manifest.add_input(a.field);
    return io::load_field(a.field);
  }
  const GridSpec grid = make_grid(a.n, a.P, a.M);
  const auto colon = a.init.find(':');
  const std::string kind = a.init.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : a.init.substr(colon + 1);
  double value = 0.0;
  try {
    value = arg.empty() ? 0.0 : std::stod(arg);
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, "bad --init argument '" + arg + "'");
  }
  if (kind == "constant") return Field::sample(grid, [&](const std::array<double, 3>&) { return value; });
  if (kind == "zero") return Field::zeros(grid);
  if (kind == "mode")
    return Field::sample(grid, [&](const std::array<double, 3>& x) { return std::exp(cplx(0, value * x[0])); });
  throw Error(ErrorKind::InvalidArgument, "unknown --init '" + a.init + "' (constant:C, mode:XI, zero)");
}

void run_evolve(const Global& g, Manifest& manifest, EvolveArgs a) {
  const Clock clock;
  a.cfg.mode = parse_solver_mode(a.mode);
  a.cfg.window = parse_window_kind(a.window);
  const PropagatorSpec spec = parse_propagator(a.propagator, a.alpha);
  const Field u0 = initial_field(a, manifest);

  Trajectory traj;
  if (a.cfg.linear) {
    validate(a.cfg);
    for (int j = 0; j < a.cfg.time_nodes; ++j) {
      const double t = a.cfg.T * j / (a.cfg.time_nodes - 1);
      traj.times.push_back(t);
      traj.states.push_back(propagate(u0, spec, t));
    }
    traj.converged = true;
  } else {
    require(spec.has_generator(), ErrorKind::InvalidArgument,
            "nonlinear evolution needs a semigroup propagator (fractional-heat or schrodinger)");
    traj = evolve(u0, spec, a.cfg);
  }

  const Window w = make_window(a.cfg.window);
  const int k_max = resolve_k_max(u0.grid(), a.cfg.k_max);
  json states = json::array();
  for (std::size_t j = 0; j < traj.states.size(); ++j) {
    json entry{{"t", traj.times[j]}, {"norm", modulation_norm(traj.states[j], a.cfg.metric, w, k_max)}};
    if (!g.out.empty()) {
      char name[32];
      std::snprintf(name, sizeof name, "state_%03zu.json", j);
      manifest.write_output(fs::path(g.out) / name, io::to_json(traj.states[j]).dump() + "\n");
      entry["file"] = name;
    }
    states.push_back(entry);
  }
  const double residual =
      (!a.cfg.linear && !traj.segments.empty()) ? duhamel_residual(traj, spec, a.cfg) : 0.0;
  cplx mean{};
  for (const cplx& v : traj.states.back().samples()) mean += v;
  mean /= static_cast<double>(traj.states.back().size());

  json report{{"propagator", std::string(to_string(spec.kind))},
              {"mode", a.cfg.linear ? "linear" : std::string(to_string(a.cfg.mode))},
              {"converged", traj.converged},
              {"blew_up", traj.blew_up},
              {"diagnostic", traj.diagnostic},
              {"iterations", traj.iterations},
              {"iterate_differences", traj.iterate_differences},
              {"contraction_ratios", traj.contraction_ratios},
              {"contraction_factor", traj.contraction_factor()},
              {"duhamel_residual", residual},
              {"states", states}};
  std::printf("converged=%s blew_up=%s iterations=%d residual=%.3g mean_final=%.12g%+.3gi t_final=%.12g\n",
              traj.converged ? "true" : "false", traj.blew_up ? "true" : "false", traj.iterations, residual,
              mean.real(), mean.imag(), traj.times.back());
  if (!traj.diagnostic.empty()) std::printf("diagnostic: %s\n", traj.diagnostic.c_str());
  if (!g.out.empty()) {
    report["manifest"] = manifest.to_json(clock.seconds());
    io::write_text(fs::path(g.out) / "report.json", report.dump(2) + "\n");
  }
}

// ---------------------------------------------------------------------------
// classify and sweep

struct ClassifyArgs {
  std::string equation = "fractional-heat";
  int n = 1;
  int k = 2;
  double s = 0.0;
  double q = 2.0;
  double alpha = 1.0;
};

void run_classify(const ClassifyArgs& a) {
  const Verdict v = classify(parse_equation(a.equation), a.n, a.k, a.s, a.q, a.alpha);
  std::cout << verdict_line(v) << "\n";
}

struct SweepArgs {
  ClassifyArgs base;
  double s_min = -3.0;
  double s_max = 1.0;
  int resolution = 17;
  std::vector<double> q_list{1.0, 2.0, 4.0};
  bool measure = false;
};

void run_sweep(const Global& g, Manifest& manifest, const SweepArgs& a) {
  const Clock clock;
  require(std::isfinite(a.s_min) && std::isfinite(a.s_max) && a.s_min <= a.s_max, ErrorKind::InvalidArgument,
          "empty or non-finite s range");
  require(a.resolution >= 1, ErrorKind::InvalidArgument, "resolution must be >= 1");
  require(a.resolution == 1 || a.s_max > a.s_min, ErrorKind::InvalidArgument,
          "a degenerate s range takes resolution 1");
  require(!a.q_list.empty(), ErrorKind::InvalidArgument, "empty q list");
  const Equation eq = parse_equation(a.base.equation);
  require(!a.measure || eq == Equation::FractionalHeat, ErrorKind::InvalidArgument,
          "--measure runs the inflation probe, which is defined for fractional-heat");

  std::string csv = "s,inv_q,q,status,theorem";
  if (a.measure) csv += ",probe_case,fitted_exponent,predicted_exponent,consistent";
  csv += "\n";
  for (int i = 0; i < a.resolution; ++i) {
    const double s = a.resolution == 1 ? a.s_min : a.s_min + (a.s_max - a.s_min) * i / (a.resolution - 1);
    for (double q : a.q_list) {
      const Verdict v = classify(eq, a.base.n, a.base.k, s, q, a.base.alpha);
      csv += fmt(s) + "," + fmt(1.0 / q) + "," + fmt(q) + "," + std::string(to_string(v.status)) + "," + v.theorem;
      if (a.measure) {
        if (v.status == Status::IllPosed) {
          InflationConfig cfg;
          cfg.n = a.base.n;
          cfg.k = a.base.k;
          cfg.alpha = a.base.alpha;
          cfg.s = s;
          cfg.q = q;
          cfg.threads = g.threads;
          cfg.which = s < -a.base.alpha / (a.base.k - 1.0) ? InflationCase::One : InflationCase::Two;
          const ProbeReport rep = inflation_probe(cfg);
          const SlopeCheck& c = rep.check("inflation_exponent");
          csv += std::string(",") + (cfg.which == InflationCase::One ? "1" : "2") + "," + fmt(c.fit.slope) + "," +
                 fmt(c.predicted) + "," + (rep.verdict == ProbeVerdict::Consistent ? "true" : "false");
        } else {
          csv += ",,,,";
        }
      }
      csv += "\n";
    }
  }
  std::cout << csv;
  if (!g.out.empty()) {
    manifest.write_output(fs::path(g.out) / "sweep.csv", csv);
    json report{{"rows", a.resolution * static_cast<int>(a.q_list.size())}};
    report["manifest"] = manifest.to_json(clock.seconds());
    io::write_text(fs::path(g.out) / "report.json", report.dump(2) + "\n");
  }
}

// ---------------------------------------------------------------------------
// probes

void run_probe(const Global& g, Manifest& manifest, const ProbeReport& rep) {
  emit(g, manifest, Clock{}, io::to_json(rep, g.timing), io::to_csv(rep));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modulation-space norms, frequency-uniform decompositions, evolution and probes", "modspace"};
  app.set_version_flag("--version", std::string(kVersion));
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML file whose keys mirror the flag names");

  Global g;
  app.add_option("--seed", g.seed, "Seed for randomized ensembles");
  app.add_option("--threads", g.threads, "Worker threads for probes")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory for report.json, CSV and field files");
  app.add_option("--format", g.format, "Stdout format for probe results")->check(CLI::IsMember({"csv", "report"}));
  app.add_flag("--timing", g.timing, "Record wall-clock runtime in reports");

  // norm
  NormArgs norm;
  auto* norm_cmd = app.add_subcommand("norm", "Modulation norm of a field file");
  norm_cmd->add_option("field", norm.field, "Field file")->required();
  norm_cmd->add_option("--s", norm.s, "Regularity s");
  norm_cmd->add_option("--p", norm.p, "Spatial exponent p (inf allowed)");
  norm_cmd->add_option("--q", norm.q, "Lattice exponent q (inf allowed)");
  norm_cmd->add_option("--window", norm.window, "raised-cosine or sharp");
  norm_cmd->add_option("--k-max", norm.k_max, "Active box radius (-1: largest admissible)");
  norm_cmd->add_flag("--breakdown", norm.breakdown, "Print per-box table");

  // decompose
  DecomposeArgs dec;
  auto* dec_cmd = app.add_subcommand("decompose", "Write every box piece of a field file");
  dec_cmd->add_option("field", dec.field, "Field file")->required();
  dec_cmd->add_option("--window", dec.window, "raised-cosine or sharp");
  dec_cmd->add_option("--k-max", dec.k_max, "Active box radius (-1: largest admissible)");
  dec_cmd->add_flag("--all", dec.all, "Also write pieces at round-off level");

  // evolve
  EvolveArgs ev;
  auto* ev_cmd = app.add_subcommand("evolve", "Solve u_t + A u = u^k or apply a linear propagator");
  ev_cmd->add_option("--field", ev.field, "Initial field file");
  ev_cmd->add_option("--init", ev.init, "Built-in initial data: constant:C, mode:XI, zero");
  ev_cmd->add_option("--n", ev.n, "Dimension for --init");
  ev_cmd->add_option("--P", ev.P, "Period multiplier for --init");
  ev_cmd->add_option("--M", ev.M, "Samples per axis for --init");
  ev_cmd->add_option("--propagator", ev.propagator, "fractional-heat, schrodinger, kg-cos, kg-sinc");
  ev_cmd->add_option("--alpha", ev.alpha, "Order of the fractional heat semigroup");
  ev_cmd->add_option("--k", ev.cfg.power_k, "Power of the nonlinearity u^k");
  ev_cmd->add_option("--T", ev.cfg.T, "Horizon");
  ev_cmd->add_option("--time-nodes", ev.cfg.time_nodes, "Trajectory samples including t=0 and t=T");
  ev_cmd->add_option("--quad-nodes", ev.cfg.quad_nodes, "Gauss-Legendre nodes per interval");
  ev_cmd->add_option("--picard-tol", ev.cfg.picard_tol, "Picard stopping tolerance");
  ev_cmd->add_option("--picard-max-iter", ev.cfg.picard_max_iter, "Picard iteration cap");
  ev_cmd->add_option("--dealias-factor", ev.cfg.dealias_factor, "Padding factor (<= 0: (k+1)/2)");
  ev_cmd->add_option("--mode", ev.mode, "picard-global or etd-step");
  ev_cmd->add_option("--etd-order", ev.cfg.etd_order, "1 or 2");
  ev_cmd->add_option("--etd-substeps", ev.cfg.etd_substeps, "ETD steps per trajectory interval");
  ev_cmd->add_flag("--linear", ev.cfg.linear, "Drop the nonlinearity");
  ev_cmd->add_option("--s", ev.cfg.metric.s, "Metric regularity s");
  ev_cmd->add_option("--p", ev.cfg.metric.p, "Metric exponent p");
  ev_cmd->add_option("--q", ev.cfg.metric.q, "Metric exponent q");
  ev_cmd->add_option("--window", ev.window, "Metric window");
  ev_cmd->add_option("--k-max", ev.cfg.k_max, "Metric box radius (-1: largest admissible)");
  ev_cmd->add_option("--blowup-factor", ev.cfg.blowup_factor, "Abort when the norm exceeds this times the data");

  // classify
  ClassifyArgs cl;
  auto* cl_cmd = app.add_subcommand("classify", "Well/ill-posedness verdict for (equation, n, k, s, q)");
  auto add_classify = [](CLI::App* cmd, ClassifyArgs& a) {
    cmd->add_option("--equation", a.equation, "fractional-heat, schrodinger, klein-gordon, heat-iwabuchi");
    cmd->add_option("--n", a.n, "Dimension");
    cmd->add_option("--k", a.k, "Power of the nonlinearity");
    cmd->add_option("--alpha", a.alpha, "Order of the fractional heat semigroup");
  };
  add_classify(cl_cmd, cl);
  cl_cmd->add_option("--s", cl.s, "Regularity s");
  cl_cmd->add_option("--q", cl.q, "Lattice exponent q");

  // sweep
  SweepArgs sw;
  auto* sw_cmd = app.add_subcommand("sweep", "Phase diagram of verdicts over (s, 1/q) as CSV");
  add_classify(sw_cmd, sw.base);
  sw_cmd->add_option("--s-min", sw.s_min, "Smallest s");
  sw_cmd->add_option("--s-max", sw.s_max, "Largest s");
  sw_cmd->add_option("--resolution", sw.resolution, "Number of s samples");
  sw_cmd->add_option("--q-list", sw.q_list, "q values")->delimiter(',');
  sw_cmd->add_flag("--measure", sw.measure, "Attach inflation-probe exponents to ill-posed rows");

  // probe
  auto* probe_cmd = app.add_subcommand("probe", "Rate experiments");
  probe_cmd->require_subcommand(1);

  InflationConfig inf;
  int inf_case = 1;
  std::string inf_window = "raised-cosine";
  auto* inf_cmd = probe_cmd->add_subcommand("inflation", "Norm inflation of the first Duhamel iterate");
  inf_cmd->add_option("--case", inf_case, "1 or 2")->check(CLI::IsMember({1, 2}));
  inf_cmd->add_option("--n", inf.n, "Dimension");
  inf_cmd->add_option("--k", inf.k, "Power");
  inf_cmd->add_option("--alpha", inf.alpha, "Order of the fractional heat semigroup");
  inf_cmd->add_option("--s", inf.s, "Regularity s (default: -1.5, or -0.5 for case 2)");
  inf_cmd->add_option("--q", inf.q, "Lattice exponent q (default: 2, or 4 for case 2)");
  inf_cmd->add_option("--N-list", inf.N_list, "Increasing N values")->delimiter(',');
  inf_cmd->add_option("--sep", inf.sep, "Separation multiplier (case 2)");
  inf_cmd->add_option("--quad-nodes", inf.quad_nodes, "Gauss-Legendre nodes for the witness integral");
  inf_cmd->add_option("--window", inf_window, "raised-cosine or sharp");
  inf_cmd->add_option("--input-tol", inf.input_tol, "Input slope tolerance");
  inf_cmd->add_option("--output-tol", inf.output_tol, "Output slope tolerance");
  inf_cmd->add_option("--exponent-tol", inf.exponent_tol, "Inflation exponent tolerance");

  SmoothingConfig sm;
  double sm_alpha = 1.0;
  std::string sm_window = "raised-cosine";
  auto* sm_cmd = probe_cmd->add_subcommand("smoothing", "Smoothing rate of the fractional heat semigroup");
  sm_cmd->add_option("--alpha", sm_alpha, "Order of the fractional heat semigroup");
  sm_cmd->add_option("--s1", sm.s1, "Target regularity");
  sm_cmd->add_option("--s2", sm.s2, "Source regularity");
  sm_cmd->add_option("--q", sm.q, "Lattice exponent q");
  sm_cmd->add_option("--N-min", sm.N_min, "Smallest bump centre");
  sm_cmd->add_option("--N-max", sm.N_max, "Largest bump centre");
  sm_cmd->add_option("--t-list", sm.t_list, "Times (default: 8 log-spaced in [1/128, 1/8])")->delimiter(',');
  sm_cmd->add_option("--window", sm_window, "raised-cosine or sharp");
  sm_cmd->add_option("--tolerance", sm.tolerance, "Slope tolerance");

  ProductConfig pr;
  std::string pr_form = "split";
  std::string pr_window = "raised-cosine";
  auto* pr_cmd = probe_cmd->add_subcommand("product", "Ensemble check of the product estimates");
  pr_cmd->add_option("--form", pr_form, "split or power")->check(CLI::IsMember({"split", "power"}));
  pr_cmd->add_option("--n", pr.n, "Dimension");
  pr_cmd->add_option("--k", pr.k, "Power");
  pr_cmd->add_option("--p", pr.p, "Spatial exponent p");
  pr_cmd->add_option("--s", pr.s, "Regularity (split form)");
  pr_cmd->add_option("--q", pr.q, "Target q (split form)");
  pr_cmd->add_option("--q1", pr.q1, "q1");
  pr_cmd->add_option("--q2", pr.q2, "q2");
  pr_cmd->add_option("--s1", pr.s1, "Source regularity (power form)");
  pr_cmd->add_option("--s2", pr.s2, "Target regularity (power form)");
  pr_cmd->add_option("--ensemble", pr.ensemble, "Ensemble size per band radius");
  pr_cmd->add_option("--bands", pr.bands, "Band radii")->delimiter(',');
  pr_cmd->add_option("--window", pr_window, "raised-cosine or sharp");
  pr_cmd->add_option("--tolerance", pr.tolerance, "Slope tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (!g.out.empty()) fs::create_directories(g.out);
    if (norm_cmd->parsed()) {
      Manifest m("norm", g);
      record_all(m, app, norm_cmd);
      run_norm(g, m, norm);
    } else if (dec_cmd->parsed()) {
      Manifest m("decompose", g);
      record_all(m, app, dec_cmd);
      run_decompose(g, m, dec);
    } else if (ev_cmd->parsed()) {
      Manifest m("evolve", g);
      record_all(m, app, ev_cmd);
      run_evolve(g, m, ev);
    } else if (cl_cmd->parsed()) {
      run_classify(cl);
    } else if (sw_cmd->parsed()) {
      Manifest m("sweep", g);
      record_all(m, app, sw_cmd);
      run_sweep(g, m, sw);
    } else if (inf_cmd->parsed()) {
      inf.which = inf_case == 1 ? InflationCase::One : InflationCase::Two;
      if (inf.which == InflationCase::Two) {
        if (inf_cmd->count("--s") == 0) inf.s = -0.5;
        if (inf_cmd->count("--q") == 0) inf.q = 4.0;
      }
      inf.window = parse_window_kind(inf_window);
      inf.threads = g.threads;
      Manifest m("probe inflation", g);
      record_all(m, app, probe_cmd, inf_cmd);
      run_probe(g, m, inflation_probe(inf));
    } else if (sm_cmd->parsed()) {
      sm.window = parse_window_kind(sm_window);
      sm.threads = g.threads;
      Manifest m("probe smoothing", g);
      record_all(m, app, probe_cmd, sm_cmd);
      run_probe(g, m, smoothing_probe(PropagatorSpec::fractional_heat(sm_alpha), sm));
    } else if (pr_cmd->parsed()) {
      pr.form = pr_form == "split" ? ProductForm::Split : ProductForm::Power;
      pr.window = parse_window_kind(pr_window);
      pr.seed = g.seed;
      pr.threads = g.threads;
      Manifest m("probe product", g);
      record_all(m, app, probe_cmd, pr_cmd);
      run_probe(g, m, product_probe(pr));
    }
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
