#include "otmisfit_app/app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "otmisfit/errors.hpp"
#include "otmisfit/field_io.hpp"
#include "otmisfit/inversion.hpp"
#include "otmisfit/key_value.hpp"
#include "otmisfit/ma_solver.hpp"
#include "otmisfit/preprocess.hpp"
#include "otmisfit/seismic_model.hpp"
#include "otmisfit/transport_2d.hpp"

namespace otm::app {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using seismic::LayerModel;

const std::vector<std::string> kKnownKeys = {
    // preprocessing
    "theta_rel", "sigma_rel", "margin_cells", "support_tol",
    // solver
    "delta", "epsilon", "tol", "max_iters", "filtered", "interpolation", "fixed_node",
    // run
    "seed", "jobs",
    // acquisition geometry
    "offset_min", "offset_max", "offset_count", "time_min", "time_max", "time_count", "peak_freq",
    // wavelet sweep
    "sweep_n", "sweep_x_min", "sweep_x_max", "sweep_freq", "s_min", "s_max", "s_count", "noise", "noise_rel",
    // models and scans
    "model", "reference", "fixed", "start", "axes", "range1", "range2", "max_evals", "xtol", "ftol",
    "threshold"};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<double> parse_numbers(const std::string& key, const std::string& text, std::size_t count) {
  const auto parts = split(text, ',');
  if (parts.size() != count) {
    throw Error(ErrorCode::ParseError, "'" + key + "' needs " + std::to_string(count) +
                                           " comma-separated values, got '" + text + "'");
  }
  std::vector<double> out;
  for (const std::string& p : parts) {
    KeyValueConfig tmp;
    tmp.set(key, p);
    out.push_back(*tmp.get_double(key));
  }
  return out;
}

LayerModel model_value(const KeyValueConfig& cfg, const std::string& key, const LayerModel& fallback) {
  const auto raw = cfg.get(key);
  if (!raw) return fallback;
  const auto v = parse_numbers(key, *raw, 4);
  LayerModel m{v[0], v[1], v[2], v[3]};
  m.validate();
  return m;
}

seismic::UniformRange range_value(const KeyValueConfig& cfg, const std::string& key,
                                  const seismic::UniformRange& fallback) {
  const auto raw = cfg.get(key);
  if (!raw) return fallback;
  const auto v = parse_numbers(key, *raw, 3);
  const int count = static_cast<int>(v[2]);
  if (count < 1 || static_cast<double>(count) != v[2] || (count > 1 && !(v[1] > v[0]))) {
    throw Error(ErrorCode::InvalidArgument, "'" + key + "' must be min,max,count with max > min and count >= 1");
  }
  return {v[0], v[1], count};
}

seismic::AcquisitionGeometry geometry_value(const KeyValueConfig& cfg, seismic::AcquisitionGeometry geom) {
  if (auto v = cfg.get_double("offset_min")) geom.offsets.min = *v;
  if (auto v = cfg.get_double("offset_max")) geom.offsets.max = *v;
  if (auto v = cfg.get_int("offset_count")) geom.offsets.count = *v;
  if (auto v = cfg.get_double("time_min")) geom.times.min = *v;
  if (auto v = cfg.get_double("time_max")) geom.times.max = *v;
  if (auto v = cfg.get_int("time_count")) geom.times.count = *v;
  if (auto v = cfg.get_double("peak_freq")) geom.wavelet_peak_freq = *v;
  geom.validate();
  return geom;
}

// Preprocessing and solver settings on top of the given defaults.
inversion::MisfitConfig misfit_value(const KeyValueConfig& cfg, inversion::MisfitConfig base) {
  if (auto v = cfg.get_double("theta_rel")) base.preprocess.theta_rel = *v;
  if (auto v = cfg.get_double("sigma_rel")) base.preprocess.sigma_rel = *v;
  if (auto v = cfg.get_int("margin_cells")) base.preprocess.margin_cells = *v;
  if (auto v = cfg.get_double("support_tol")) base.preprocess.support_tol = *v;
  const SolverConfig parsed = SolverConfig::from_config(cfg);
  if (cfg.contains("delta")) base.solver.delta = parsed.delta;
  if (cfg.contains("epsilon")) base.solver.epsilon = parsed.epsilon;
  if (cfg.contains("tol")) base.solver.newton_tol = parsed.newton_tol;
  if (cfg.contains("max_iters")) base.solver.max_newton_iters = parsed.max_newton_iters;
  if (cfg.contains("filtered")) base.solver.use_filtered = parsed.use_filtered;
  if (cfg.contains("interpolation")) base.solver.interpolation = parsed.interpolation;
  if (cfg.contains("fixed_node")) base.solver.fixed_node = parsed.fixed_node;
  if (!(base.preprocess.theta_rel > 0.0)) throw Error(ErrorCode::InvalidConfig, "theta_rel must be positive");
  if (base.preprocess.sigma_rel < 0.0) throw Error(ErrorCode::InvalidConfig, "sigma_rel must be >= 0");
  base.geometry = geometry_value(cfg, base.geometry);
  return base;
}

json report_json(const SolverReport& r) {
  json j;
  j["iterations"] = r.iterations;
  j["monotone_iterations"] = r.monotone_iterations;
  j["residual_history"] = r.residual_history;
  j["converged"] = r.converged;
  j["scheme"] = std::string(to_string(r.scheme));
  j["delta"] = r.delta;
  j["epsilon"] = r.epsilon;
  j["lipschitz"] = r.lipschitz;
  j["boundary_violations"] = r.boundary_violations;
  return j;
}

json transport_json(const SignedTransport& st) {
  json reports = json::object();
  if (st.positive) reports["positive"] = report_json(st.positive->solve.report);
  if (st.negative) reports["negative"] = report_json(st.negative->solve.report);
  return reports;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + (dir / name).string());
  return out;
}

void write_json(const fs::path& dir, const std::string& name, const json& j) {
  auto out = open_output(dir, name);
  out << j.dump(2) << '\n';
}

struct Run {
  KeyValueConfig cfg;
  fs::path out_dir;
};

int cmd_w2(const Run& run, const std::string& file_f, const std::string& file_g) {
  const GridField f = io::read_field_csv(file_f);
  const GridField g = io::read_field_csv(file_g);
  const auto mc = misfit_value(run.cfg, inversion::MisfitConfig{});
  const SignedTransport st = signed_w2(f, g, mc.preprocess, mc.solver);
  json j;
  j["w2_squared"] = st.w2_squared;
  j["l2_squared"] = l2_squared(f, g);
  j["solver_report"] = transport_json(st);
  write_json(run.out_dir, "w2.json", j);
  return kSuccess;
}

int cmd_wavelet_sweep(const Run& run) {
  const KeyValueConfig& c = run.cfg;
  seismic::SweepOptions o;
  if (auto v = c.get_int("sweep_n")) o.n = *v;
  if (auto v = c.get_double("sweep_x_min")) o.x_min = *v;
  if (auto v = c.get_double("sweep_x_max")) o.x_max = *v;
  if (auto v = c.get_double("sweep_freq")) o.peak_freq = *v;
  if (auto v = c.get_double("s_min")) o.s_min = *v;
  if (auto v = c.get_double("s_max")) o.s_max = *v;
  if (auto v = c.get_int("s_count")) o.s_count = *v;
  if (auto v = c.get_double("noise_rel")) o.noise_rel = *v;
  if (auto v = c.get_int("seed")) o.seed = static_cast<std::uint64_t>(*v);
  if (auto v = c.get("noise")) {
    if (*v == "none") o.noise = seismic::NoiseTarget::none;
    else if (*v == "source") o.noise = seismic::NoiseTarget::source;
    else if (*v == "both") o.noise = seismic::NoiseTarget::both;
    else throw Error(ErrorCode::InvalidArgument, "noise must be none, source or both");
  }
  if (o.s_count < 1) throw Error(ErrorCode::InvalidArgument, "s_count must be >= 1");
  const auto rows = seismic::wavelet_sweep(o);
  auto out = open_output(run.out_dir, "wavelet_sweep.csv");
  out << "s,l2_sq,w2_sq\n";
  for (const auto& r : rows) {
    out << format_double(r.s) << ',' << format_double(r.l2_squared) << ',' << format_double(r.w2_squared) << '\n';
  }
  return kSuccess;
}

int cmd_surface(const Run& run) {
  const KeyValueConfig& c = run.cfg;
  const auto mc = misfit_value(c, inversion::experiment_config());
  const auto axes = split(c.get("axes").value_or("d1,v1"), ',');
  if (axes.size() != 2) throw Error(ErrorCode::InvalidArgument, "axes must name two parameters, e.g. d1,v1");
  inversion::Axis a1{inversion::parse_param(axes[0]), {}};
  inversion::Axis a2{inversion::parse_param(axes[1]), {}};
  if (a1.param == a2.param) throw Error(ErrorCode::InvalidArgument, "axes must differ");
  const auto default_range = [](inversion::Param p) -> seismic::UniformRange {
    switch (p) {
      case inversion::Param::d1: return {0.6, 1.4, 17};
      case inversion::Param::d2: return {0.25, 0.75, 17};
      case inversion::Param::v1: return {0.7, 1.3, 17};
      case inversion::Param::v2: return {1.2, 1.8, 17};
    }
    return {};
  };
  a1.range = range_value(c, "range1", default_range(a1.param));
  a2.range = range_value(c, "range2", default_range(a2.param));
  const LayerModel reference = model_value(c, "reference", LayerModel{});
  const LayerModel fixed = model_value(c, "fixed", reference);
  const int jobs = c.get_int("jobs").value_or(1);
  if (jobs < 1) throw Error(ErrorCode::InvalidArgument, "jobs must be >= 1");
  const GridField panel = seismic::synthesize_panel(reference, mc.geometry);
  const auto surface = inversion::scan_surface(a1, a2, fixed, panel, mc, jobs);
  auto out = open_output(run.out_dir, "surface.csv");
  inversion::write_surface_csv(out, surface);
  if (surface.failures > 0) std::cerr << "surface: " << surface.failures << " cells failed (written as nan)\n";
  return kSuccess;
}

int cmd_invert(const Run& run) {
  const KeyValueConfig& c = run.cfg;
  const auto mc = misfit_value(c, inversion::experiment_config());
  const LayerModel reference = model_value(c, "reference", LayerModel{});
  const LayerModel start = model_value(c, "start", LayerModel{1.2, 0.4, 0.9, 1.6});
  inversion::NelderMeadOptions nm;
  if (auto v = c.get_int("max_evals")) nm.max_evals = *v;
  if (auto v = c.get_double("xtol")) nm.xtol = *v;
  if (auto v = c.get_double("ftol")) nm.ftol = *v;
  if (nm.max_evals < 1) throw Error(ErrorCode::InvalidArgument, "max_evals must be >= 1");
  const GridField panel = seismic::synthesize_panel(reference, mc.geometry);
  const auto result = inversion::invert(start, panel, mc, nm);
  json j;
  j["x_min"] = result.x_min;
  j["value"] = result.value;
  j["evals"] = result.evals;
  j["converged"] = result.converged;
  write_json(run.out_dir, "invert.json", j);
  if (!result.converged) {
    std::cerr << "invert: no convergence within " << nm.max_evals << " evaluations\n";
    return kNoConvergence;
  }
  return kSuccess;
}

int cmd_register(const Run& run, const std::string& file_f, const std::string& file_g) {
  const GridField f = io::read_field_csv(file_f);
  const GridField g = io::read_field_csv(file_g);
  const auto mc = misfit_value(run.cfg, inversion::MisfitConfig{});
  const bool threshold = run.cfg.get_bool("threshold").value_or(true);
  const SignedTransport st = signed_w2(f, g, mc.preprocess, mc.solver);
  const auto emit = [&](const ComponentSolve& c, const std::string& suffix) {
    const TransportResult tr = displacement_field(c.solve.potential, c.pair, threshold);
    auto out = open_output(run.out_dir, "displacement" + suffix + ".csv");
    write_displacement_csv(out, tr, c.pair);
    auto amp = open_output(run.out_dir, "amplitude" + suffix + ".csv");
    io::write_field_csv(amp, registered_amplitude(c.solve.potential));
  };
  if (st.positive) emit(*st.positive, "");
  if (st.negative) emit(*st.negative, "_negative");
  json j;
  j["w2_squared"] = st.w2_squared;
  j["thresholded"] = threshold;
  j["solver_report"] = transport_json(st);
  write_json(run.out_dir, "register.json", j);
  return kSuccess;
}

int cmd_synth(const Run& run) {
  const KeyValueConfig& c = run.cfg;
  const auto geom = geometry_value(c, seismic::AcquisitionGeometry{});
  const LayerModel model = model_value(c, "model", LayerModel{});
  GridField panel = seismic::synthesize_panel(model, geom);
  const double noise_rel = c.get_double("noise_rel").value_or(0.0);
  if (noise_rel < 0.0) throw Error(ErrorCode::InvalidArgument, "noise_rel must be >= 0");
  if (noise_rel > 0.0) {
    const auto seed = static_cast<std::uint64_t>(c.get_int("seed").value_or(42));
    panel = seismic::add_noise(panel, noise_rel * panel.max_abs(), seed);
  }
  auto out = open_output(run.out_dir, "panel.csv");
  io::write_field_csv(out, panel);
  return kSuccess;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Wasserstein (optimal transport) misfit between gridded signals"};
  app.require_subcommand(1);
  app.fallthrough();

  std::map<std::string, std::string> overrides;
  const auto bind = [&overrides](CLI::App* target, const std::string& flag, const std::string& key,
                                 const std::string& help) {
    return target->add_option_function<std::string>(
        flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
  };

  std::string out_dir = ".";
  std::string config_file;
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--config", config_file, "Flat key = value configuration file");
  bind(&app, "--seed", "seed", "Random seed");
  bind(&app, "--jobs", "jobs", "Worker threads for surface scans");
  app.add_flag_callback("--filtered", [&overrides] { overrides["filtered"] = "true"; },
                        "Use the filtered higher-order scheme");
  bind(&app, "--theta-rel", "theta_rel", "Padding level relative to max g");
  bind(&app, "--sigma-rel", "sigma_rel", "Smoothing width in grid cells");
  bind(&app, "--delta", "delta", "Second-difference floor (default from the Lipschitz bound)");
  bind(&app, "--tol", "tol", "Newton tolerance (max-norm residual)");
  bind(&app, "--interpolation", "interpolation", "Target interpolant: bilinear or cubic");

  std::string file_f, file_g;

  CLI::App* w2 = app.add_subcommand("w2", "W2^2 and L2^2 between two GridField CSV files");
  w2->add_option("f", file_f, "Source field CSV")->required();
  w2->add_option("g", file_g, "Target field CSV")->required();

  CLI::App* sweep = app.add_subcommand("wavelet-sweep", "W2^2 and L2^2 of a Ricker profile against its shifts");
  bind(sweep, "--s-min", "s_min", "Smallest shift");
  bind(sweep, "--s-max", "s_max", "Largest shift");
  bind(sweep, "--s-count", "s_count", "Number of shifts");
  bind(sweep, "--freq", "sweep_freq", "Ricker peak frequency");
  bind(sweep, "--n", "sweep_n", "Samples per profile");
  bind(sweep, "--noise", "noise", "Noise target: none, source or both");
  bind(sweep, "--noise-rel", "noise_rel", "Noise amplitude relative to max |f|");

  CLI::App* surface = app.add_subcommand("surface", "Misfit cross-section over two layer parameters");
  bind(surface, "--axes", "axes", "Two parameters, e.g. d1,v1");
  bind(surface, "--range1", "range1", "min,max,count of the first axis");
  bind(surface, "--range2", "range2", "min,max,count of the second axis");
  bind(surface, "--fixed", "fixed", "d1,d2,v1,v2 supplying the parameters not scanned");
  bind(surface, "--reference", "reference", "d1,d2,v1,v2 of the observed panel");

  CLI::App* invert = app.add_subcommand("invert", "Nelder-Mead minimisation of the W2 misfit");
  bind(invert, "--start", "start", "Initial d1,d2,v1,v2");
  bind(invert, "--reference", "reference", "d1,d2,v1,v2 of the observed panel");
  bind(invert, "--max-evals", "max_evals", "Evaluation budget");

  CLI::App* reg = app.add_subcommand("register", "Displacement field grad u(x) - x between two fields");
  reg->add_option("f", file_f, "Source field CSV")->required();
  reg->add_option("g", file_g, "Target field CSV")->required();
  reg->add_flag_callback("--no-threshold", [&overrides] { overrides["threshold"] = "false"; },
                         "Keep the vectors inside the padding layer");

  CLI::App* synth = app.add_subcommand("synth", "Synthetic two-layer offset-time panel");
  bind(synth, "--model", "model", "d1,d2,v1,v2");
  bind(synth, "--noise-rel", "noise_rel", "Noise amplitude relative to max |panel|");

  for (CLI::App* sub : {w2, sweep, surface, invert, reg, synth}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, std::cerr, std::cerr);
    return code == 0 ? kSuccess : kInputError;
  }

  try {
    Run run;
    if (!config_file.empty()) run.cfg = KeyValueConfig::load(config_file);
    for (const auto& [k, v] : overrides) run.cfg.set(k, v);
    const auto unknown = run.cfg.unknown_keys(kKnownKeys);
    if (!unknown.empty()) throw Error(ErrorCode::InvalidConfig, "unknown configuration key '" + unknown.front() + "'");
    run.out_dir = out_dir;
    misfit_value(run.cfg, inversion::MisfitConfig{});

    if (w2->parsed()) return cmd_w2(run, file_f, file_g);
    if (sweep->parsed()) return cmd_wavelet_sweep(run);
    if (surface->parsed()) return cmd_surface(run);
    if (invert->parsed()) return cmd_invert(run);
    if (reg->parsed()) return cmd_register(run, file_f, file_g);
    if (synth->parsed()) return cmd_synth(run);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const bool solver = e.code() == ErrorCode::NoConvergence || e.code() == ErrorCode::SingularSystem;
    return solver ? kNoConvergence : kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run_cli(args);
}

}  // namespace otm::app
