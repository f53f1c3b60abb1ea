#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "typestate/closure.hpp"
#include "typestate/dot.hpp"
#include "typestate/io.hpp"
#include "typestate/pipeline.hpp"

namespace fs = std::filesystem;
using namespace typestate;

namespace {

struct CommonFlags {
  std::string model;
  std::string oracle = "dist";
  std::optional<std::size_t> b_dist;
  std::optional<std::size_t> b_state;
  std::string purpose;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string metrics;
  std::uint64_t eq_cap = LearnConfig{}.eq_cap;
};

void add_model_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--model", f.model, "model spec JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--bdist", f.b_dist, "distinguisher bound");
  cmd->add_option("--state-bound", f.b_state, "state bound");
  cmd->add_option("--purpose", f.purpose, "learning purpose JSON")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "seed of the nondet fixture");
  cmd->add_option("--eq-cap", f.eq_cap, "equivalence queries before giving up");
}

LearnConfig config_of(const CommonFlags& f) {
  LearnConfig c;
  auto kind = parse_oracle_kind(f.oracle);
  if (!kind) throw ModelError("unknown oracle '" + f.oracle + "'");
  c.oracle = *kind;
  c.bounds = Bounds{f.b_dist, f.b_state};
  if (!f.purpose.empty()) c.purpose = load_purpose_spec(f.purpose);
  c.seed = f.seed;
  c.eq_cap = f.eq_cap;
  return c;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write '" + path.string() + "'");
  out << text;
}

int learn(const CommonFlags& f) {
  const auto spec = load_model_spec(f.model);
  const auto outcome = run_learn(spec, config_of(f));
  const auto metrics = metrics_to_json(outcome.metrics).dump(2) + "\n";
  if (!f.out_dir.empty()) {
    const fs::path dir(f.out_dir);
    fs::create_directories(dir);
    write_file(dir / "metrics.json", metrics);
    if (outcome.automaton) {
      write_file(dir / "learned.json",
                 interface_automaton_to_json(*outcome.automaton, "learned from " + f.model)
                         .dump(2) + "\n");
      write_file(dir / "learned.dot", export_dot(*outcome.automaton));
    }
    if (outcome.mealy) write_file(dir / "learned_mealy.json", mealy_to_json(*outcome.mealy).dump(2) + "\n");
  }
  if (!f.metrics.empty()) write_file(f.metrics, metrics);
  if (outcome.exit_code != kExitOk) std::cerr << outcome.message << "\n";
  if (outcome.automaton && outcome.exit_code == kExitOk) std::cout << export_dot(*outcome.automaton);
  std::cout << metrics;
  return outcome.exit_code;
}

int compare(const CommonFlags& f) {
  const auto spec = load_model_spec(f.model);
  const auto report = compare_to_json(run_compare(spec, config_of(f))).dump(2) + "\n";
  if (!f.metrics.empty()) write_file(f.metrics, report);
  if (!f.out_dir.empty()) write_file(fs::path(f.out_dir) / "compare.json", report);
  std::cout << report;
  return kExitOk;
}

int export_model(const std::string& path, const std::string& format) {
  auto spec = load_model_spec(path);
  if (spec.refinement) spec = apply_refinement(spec, *spec.refinement);
  const auto ia = spec.to_interface_automaton();
  if (format == "dot") std::cout << export_dot(ia);
  else if (format == "json") std::cout << interface_automaton_to_json(ia, spec.source).dump(2) << "\n";
  else if (format == "closure") std::cout << mealy_to_json(closure(ia).machine).dump(2) << "\n";
  else throw ModelError("unknown export format '" + format + "'");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn callback typestates of asynchronous interfaces"};
  app.require_subcommand(1);

  CommonFlags lf;
  auto* learn_cmd = app.add_subcommand("learn", "learn a model's typestate");
  add_model_flags(learn_cmd, lf);
  learn_cmd->add_option("--oracle", lf.oracle, "dist, state-bound or perfect")
      ->check(CLI::IsMember({"dist", "state-bound", "perfect"}));
  learn_cmd->add_option("--out-dir", lf.out_dir, "directory for learned automaton and metrics");
  learn_cmd->add_option("--metrics", lf.metrics, "metrics JSON path");

  CommonFlags cf;
  auto* compare_cmd = app.add_subcommand("compare", "dist oracle versus state-bound oracle");
  add_model_flags(compare_cmd, cf);
  compare_cmd->add_option("--out-dir", cf.out_dir, "directory for the report");
  compare_cmd->add_option("--metrics", cf.metrics, "report JSON path");

  std::string export_path, format = "dot";
  auto* export_cmd = app.add_subcommand("export", "render a model");
  export_cmd->add_option("--model", export_path, "model spec JSON")
      ->required()
      ->check(CLI::ExistingFile);
  export_cmd->add_option("--format", format, "dot, json or closure")
      ->check(CLI::IsMember({"dot", "json", "closure"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*learn_cmd) return learn(lf);
    if (*compare_cmd) return compare(cf);
    if (*export_cmd) return export_model(export_path, format);
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
