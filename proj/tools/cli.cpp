#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "kglab/bounds.hpp"
#include "kglab/montecarlo.hpp"

namespace kglab::cli {
namespace {

using nlohmann::json;

std::string join_numbers(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_number(v[i]);
  }
  return s;
}

InstanceSpec instance_from_json(const json& j, const std::string& where) {
  InstanceSpec spec;
  if (j.is_number_integer()) {
    spec.catalog_id = j.get<int>();
    return spec;
  }
  if (!j.is_object() || !j.contains("means") || !j.contains("stds")) {
    throw ValidationError(where + ": instance must be a catalog id or {\"means\": [...], \"stds\": [...]}");
  }
  try {
    spec.means = j.at("means").get<std::vector<double>>();
    spec.stds = j.at("stds").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ValidationError(where + ": " + e.what());
  }
  return spec;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::vector<ArmIndex> parse_arms(const std::vector<int>& one_based, std::size_t k) {
  std::vector<ArmIndex> arms;
  for (int a : one_based) {
    if (a < 1 || static_cast<std::size_t>(a) > k) {
      throw ValidationError("--arms: arm " + std::to_string(a) + " outside 1.." + std::to_string(k));
    }
    arms.push_back(static_cast<ArmIndex>(a - 1));
  }
  return arms;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), ec.message());
}

std::vector<BoundSet> bounds_on(const BanditInstance& inst, const std::vector<std::uint64_t>& grid,
                                PeLowerForm form) {
  std::vector<BoundSet> out;
  out.reserve(grid.size());
  for (auto t : grid) out.push_back(evaluate_bounds(inst.constants(), t, form));
  return out;
}

// Options common to experiment-style subcommands; flags given on the command
// line override values from --config.
struct ExperimentFlags {
  std::string config;
  int instance_id = 0;
  std::string instance_file;
  std::uint64_t rounds = 0;
  std::uint64_t n0 = 0;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  std::string checkpoints;
  std::string t_grid;
  std::string out;
  std::string kind;
  std::vector<int> arms;
  std::string pe_lower_form = "derivation";
  bool rule_of_three = false;

  CLI::Option* o_instance = nullptr;
  CLI::Option* o_instance_file = nullptr;
  CLI::Option* o_rounds = nullptr;
  CLI::Option* o_n0 = nullptr;
  CLI::Option* o_reps = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_checkpoints = nullptr;
  CLI::Option* o_t_grid = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_kind = nullptr;
  CLI::Option* o_arms = nullptr;

  void add_instance(CLI::App* app) {
    o_instance = app->add_option("--instance", instance_id, "Catalog instance id (1-5)");
    o_instance_file = app->add_option("--instance-file", instance_file, "Instance JSON {\"means\":[..],\"stds\":[..]}");
    o_instance->excludes(o_instance_file);
    app->add_option("--config", config, "JSON experiment configuration; flags override it");
  }
  void add_simulation(CLI::App* app) {
    o_rounds = app->add_option("--rounds,-n", rounds, "Horizon n (total pulls, initial stage included)");
    o_n0 = app->add_option("--n0", n0, "Initial pulls per arm (default 5)");
    o_reps = app->add_option("--reps", reps, "Monte Carlo replications (default 1000)");
    o_seed = app->add_option("--seed", seed, "Base seed (default 0)");
    o_checkpoints = app->add_option("--checkpoints", checkpoints,
                                    "Checkpoint grid: geometric:<start>:<stop>:<points> or list:a,b,c");
  }
  void add_pe_lower_form(CLI::App* app) {
    app->add_option("--pe-lower-form", pe_lower_form, "PE/SR lower-bound variant: derivation or statement")
        ->check(CLI::IsMember({"derivation", "statement"}));
  }

  PeLowerForm form() const {
    return pe_lower_form == "statement" ? PeLowerForm::kStatement : PeLowerForm::kDerivation;
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = config.empty() ? ExperimentConfig{} : load_config(config);
    auto given = [](const CLI::Option* o) { return o != nullptr && o->count() > 0; };
    if (given(o_instance)) cfg.instance = InstanceSpec{instance_id, {}, {}};
    if (given(o_instance_file)) cfg.instance = load_instance_file(instance_file);
    if (given(o_rounds)) cfg.rounds = rounds;
    if (given(o_n0)) cfg.n0 = n0;
    if (given(o_reps)) cfg.reps = reps;
    if (given(o_seed)) cfg.seed = seed;
    if (given(o_checkpoints)) cfg.checkpoints = checkpoints;
    if (given(o_t_grid)) cfg.t_grid = t_grid;
    if (given(o_out)) cfg.out = out;
    if (given(o_kind)) cfg.kind = parse_figure_kind(kind);
    if (!cfg.instance) throw ValidationError("an instance is required (--instance, --instance-file or config)");
    if (given(o_arms)) cfg.arms = parse_arms(arms, cfg.instance->build().k());
    if (cfg.n0 == 0) throw ValidationError("n0 must be at least 1");
    if (cfg.reps == 0) throw ValidationError("reps must be at least 1");
    return cfg;
  }
};

void print_instance(std::ostream& out, const std::string& label, const BanditInstance& inst) {
  const auto& c = inst.constants();
  out << label << "\n";
  out << "k = " << inst.k() << "\n";
  out << "means = " << join_numbers(inst.means()) << "\n";
  out << "stds = " << join_numbers(inst.stds()) << "\n";
  out << "best = arm " << c.best + 1 << "\n";
  out << "delta_min = " << format_number(c.delta_min) << ", delta_max = " << format_number(c.delta_max) << "\n";
  out << "sigma_min = " << format_number(c.sigma_min) << ", sigma_max = " << format_number(c.sigma_max) << "\n";
}

EstimateSeries simulate(const ExperimentConfig& cfg, const BanditInstance& inst,
                        const std::vector<std::uint64_t>& checkpoints) {
  ReplicationOptions opts;
  opts.threads = threads_from_env();
  return run_replications(inst, cfg.rounds, cfg.n0, cfg.reps, cfg.seed, checkpoints, opts);
}

}  // namespace

BanditInstance InstanceSpec::build() const {
  if (catalog_id) return catalog(*catalog_id);
  return make_instance(means, stds);
}

std::string InstanceSpec::label() const {
  if (catalog_id) return "instance " + std::to_string(*catalog_id);
  return "custom instance";
}

InstanceSpec load_instance_file(const std::filesystem::path& path) {
  return instance_from_json(read_json(path), path.string());
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const json j = read_json(path);
  if (!j.is_object()) throw ValidationError(path.string() + ": configuration must be a JSON object");
  ExperimentConfig cfg;
  const std::string where = path.string();
  try {
    if (j.contains("instance")) cfg.instance = instance_from_json(j.at("instance"), where);
    if (j.contains("rounds")) cfg.rounds = j.at("rounds").get<std::uint64_t>();
    if (j.contains("n0")) cfg.n0 = j.at("n0").get<std::uint64_t>();
    if (j.contains("reps")) cfg.reps = j.at("reps").get<std::uint64_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("checkpoints")) cfg.checkpoints = j.at("checkpoints").get<std::string>();
    if (j.contains("t_grid")) cfg.t_grid = j.at("t_grid").get<std::string>();
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    if (j.contains("kind")) cfg.kind = parse_figure_kind(j.at("kind").get<std::string>());
    if (j.contains("arms")) {
      for (int a : j.at("arms").get<std::vector<int>>()) {
        if (a < 1) throw ValidationError(where + ": arms are 1-based");
        cfg.arms.push_back(static_cast<ArmIndex>(a - 1));
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(where + ": " + e.what());
  }
  for (const auto& key : j.items()) {
    static const std::vector<std::string> known = {"instance", "rounds", "n0", "reps", "seed", "checkpoints",
                                                   "t_grid", "out", "kind", "arms"};
    if (std::find(known.begin(), known.end(), key.key()) == known.end()) {
      throw ValidationError(where + ": unknown configuration key '" + key.key() + "'");
    }
  }
  return cfg;
}

std::vector<std::uint64_t> resolve_checkpoints(const ExperimentConfig& cfg, std::size_t k) {
  const std::uint64_t initial = k * cfg.n0;
  if (cfg.rounds < initial) {
    throw ValidationError("rounds (" + std::to_string(cfg.rounds) + ") must be at least k*n0 = " +
                          std::to_string(initial));
  }
  if (cfg.checkpoints.empty()) return default_checkpoints(k, cfg.n0, cfg.rounds);
  auto grid = parse_t_grid(cfg.checkpoints);
  for (auto t : grid) {
    if (t < initial || t > cfg.rounds) {
      throw ValidationError("checkpoint " + std::to_string(t) + " outside [k*n0, rounds] = [" +
                            std::to_string(initial) + ", " + std::to_string(cfg.rounds) + "]");
    }
  }
  return grid;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"kglab: knowledge-gradient best-arm identification experiments and finite-time bounds", "kglab"};
  app.require_subcommand(1);

  auto* instance_cmd = app.add_subcommand("instance", "Inspect the instance catalog");
  instance_cmd->require_subcommand(1);
  auto* list_cmd = instance_cmd->add_subcommand("list", "List catalog instances");
  auto* show_cmd = instance_cmd->add_subcommand("show", "Show one instance");
  int show_id = 0;
  std::string show_file;
  auto* show_id_opt = show_cmd->add_option("id", show_id, "Catalog id (1-5)");
  auto* show_file_opt = show_cmd->add_option("--file", show_file, "Instance JSON file");
  show_id_opt->excludes(show_file_opt);

  ExperimentFlags sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run KG replications; write measures.csv and alpha.csv");
  sim.add_instance(simulate_cmd);
  sim.add_simulation(simulate_cmd);
  sim.o_out = simulate_cmd->add_option("--out", sim.out, "Output directory (default .)");
  sim.add_pe_lower_form(simulate_cmd);

  ExperimentFlags bnd;
  std::string bounds_arm_out;
  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate every analytical bound on a t grid");
  bnd.add_instance(bounds_cmd);
  bnd.o_t_grid = bounds_cmd->add_option("--t-grid", bnd.t_grid, "Grid: geometric:<start>:<stop>:<points> or list:a,b");
  bnd.o_out = bounds_cmd->add_option("--out", bnd.out, "Output CSV path (default stdout)");
  bounds_cmd->add_option("--arms-out", bounds_arm_out, "Also write per-arm rho/alpha bounds to this CSV");
  bnd.add_pe_lower_form(bounds_cmd);

  ExperimentFlags fig;
  std::string fig_name;
  auto* figure_cmd = app.add_subcommand("figure", "Reproduce a figure analogue as CSV + SVG");
  fig.add_instance(figure_cmd);
  fig.add_simulation(figure_cmd);
  fig.o_kind = figure_cmd->add_option("--kind", fig.kind, "sampling-rates, pe, sr, cr or bounds-only")
                   ->check(CLI::IsMember({"sampling-rates", "pe", "sr", "cr", "bounds-only"}));
  fig.o_t_grid = figure_cmd->add_option("--t-grid", fig.t_grid, "Grid for bounds-only figures");
  fig.o_arms = figure_cmd->add_option("--arms", fig.arms, "1-based arms for sampling-rates (default: first, median, best)")
                   ->delimiter(',');
  fig.o_out = figure_cmd->add_option("--out", fig.out, "Output directory (default .)");
  figure_cmd->add_option("--name", fig_name, "File stem (default <instance>_<kind>)");
  figure_cmd->add_flag("--rule-of-three", fig.rule_of_three, "Add the 3/reps band where pe_hat is zero");
  fig.add_pe_lower_form(figure_cmd);

  ExperimentFlags asy;
  auto* asymptotics_cmd = app.add_subcommand("asymptotics", "Limit allocation, CR rate and bound decay rates");
  asy.add_instance(asymptotics_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* ctx = &app;
    for (auto* sub : {instance_cmd, list_cmd, show_cmd, simulate_cmd, bounds_cmd, figure_cmd, asymptotics_cmd}) {
      if (sub->parsed()) ctx = sub;
    }
    err << ctx->help();
    return kValidation;
  }

  try {
    if (*list_cmd) {
      for (int id = 1; id <= kCatalogSize; ++id) {
        const auto inst = catalog(id);
        out << id << ": k=" << inst.k() << " best=arm " << inst.best() + 1 << " means=[" << join_numbers(inst.means())
            << "] stds=[" << join_numbers(inst.stds()) << "]\n";
      }
      return kSuccess;
    }
    if (*show_cmd) {
      if (show_file_opt->count() > 0) {
        const auto spec = load_instance_file(show_file);
        print_instance(out, show_file, spec.build());
      } else if (show_id_opt->count() > 0) {
        print_instance(out, "instance " + std::to_string(show_id), catalog(show_id));
      } else {
        throw ValidationError("instance show: give a catalog id or --file");
      }
      return kSuccess;
    }

    if (*simulate_cmd) {
      const auto cfg = sim.resolve();
      const auto inst = cfg.instance->build();
      const auto checkpoints = resolve_checkpoints(cfg, inst.k());
      const auto series = simulate(cfg, inst, checkpoints);
      const auto bounds = bounds_on(inst, checkpoints, sim.form());
      ensure_directory(cfg.out);
      emit_csv(cfg.out / "measures.csv", measures_table(series, bounds));
      emit_csv(cfg.out / "alpha.csv", alpha_table(series, bounds));
      out << "wrote " << (cfg.out / "measures.csv").string() << " and " << (cfg.out / "alpha.csv").string() << "\n";
      return kSuccess;
    }

    if (*bounds_cmd) {
      const auto cfg = bnd.resolve();
      const auto inst = cfg.instance->build();
      const auto bounds = bounds_on(inst, parse_t_grid(cfg.t_grid), bnd.form());
      if (bnd.o_out->count() > 0) {
        emit_csv(cfg.out, bounds_table(bounds));
      } else {
        out << to_csv(bounds_table(bounds));
      }
      if (!bounds_arm_out.empty()) emit_csv(bounds_arm_out, bounds_arm_table(bounds));
      return kSuccess;
    }

    if (*figure_cmd) {
      auto cfg = fig.resolve();
      const auto inst = cfg.instance->build();
      const auto arms = cfg.arms.empty() ? default_figure_arms(inst) : cfg.arms;
      for (auto a : arms) {
        if (a >= inst.k()) throw ValidationError("arm " + std::to_string(a + 1) + " out of range");
      }
      std::optional<EstimateSeries> series;
      std::vector<BoundSet> bounds;
      if (cfg.kind == FigureKind::kBoundsOnly) {
        bounds = bounds_on(inst, parse_t_grid(cfg.t_grid), fig.form());
      } else {
        const auto checkpoints = resolve_checkpoints(cfg, inst.k());
        series = simulate(cfg, inst, checkpoints);
        bounds = bounds_on(inst, checkpoints, fig.form());
      }
      auto spec = make_figure(cfg.kind, inst, series ? &*series : nullptr, bounds, arms);
      spec.title = cfg.instance->label() + ": " + spec.title;
      if (fig.rule_of_three && series && cfg.kind == FigureKind::kPe) {
        const auto transformed = estimate_transforms(*series);
        Curve band{"pe_rule_of_three", true, "neg_log_over_t", {}};
        for (std::size_t c = 0; c < transformed.checkpoint_rounds.size(); ++c) {
          std::optional<double> v;
          if (series->pe_hat[c] == 0.0) v = transformed.pe_rule_of_three_rate[c];
          band.points.push_back({transformed.checkpoint_rounds[c], v, true, false});
        }
        spec.curves.push_back(std::move(band));
      }
      std::string stem = fig_name;
      if (stem.empty()) {
        stem = (cfg.instance->catalog_id ? "instance" + std::to_string(*cfg.instance->catalog_id) : "custom") + "_" +
               std::string(figure_kind_name(cfg.kind));
      }
      ensure_directory(cfg.out);
      emit_csv(cfg.out / (stem + ".csv"), figure_table(spec));
      emit_svg(cfg.out / (stem + ".svg"), spec);
      if (series) {
        emit_csv(cfg.out / (stem + "_measures.csv"), measures_table(*series, bounds));
        emit_csv(cfg.out / (stem + "_alpha.csv"), alpha_table(*series, bounds));
      }
      out << "wrote " << (cfg.out / (stem + ".svg")).string() << "\n";
      return kSuccess;
    }

    if (*asymptotics_cmd) {
      const auto cfg = asy.resolve();
      const auto inst = cfg.instance->build();
      const auto profile = asymptotic_profile(inst.constants());
      out << "arm,ratio_to_best,alpha_limit\n";
      for (ArmIndex i = 0; i < inst.k(); ++i) {
        out << i + 1 << ',' << format_number(profile.ratio_to_best[i]) << ','
            << format_number(profile.alpha_limits[i]) << "\n";
      }
      out << "cr_rate," << format_number(profile.cr_rate) << "\n";
      out << "pe_upper_rate," << format_number(profile.pe_upper_rate) << "\n";
      out << "pe_lower_rate," << format_number(profile.pe_lower_rate) << "\n";
      return kSuccess;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kValidation;
}

}  // namespace kglab::cli
