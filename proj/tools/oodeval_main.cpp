// SPDX-License-Identifier: Apache-2.0
//
// oodeval: fit detector statistics, score OOD detection methods, evaluate
// FPR/AUROC/AUPR reports and generate synthetic unit-test image suites.
//
// Exit codes: 0 ok, 2 usage error, 3 data error, 4 numeric degeneracy.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "oodeval/bundle.hpp"
#include "oodeval/detectors.hpp"
#include "oodeval/errors.hpp"
#include "oodeval/fitstats.hpp"
#include "oodeval/matrix_io.hpp"
#include "oodeval/pipeline.hpp"
#include "oodeval/png_io.hpp"
#include "oodeval/report_io.hpp"
#include "oodeval/unitgen.hpp"

namespace {

namespace fs = std::filesystem;
using namespace oodeval;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct Options {
  std::string bundle_path;
  std::string state_path;
  std::string out_path;
  std::string out_dir;
  std::string methods = "all";
  std::string set_name;
  std::string format = "json";
  std::string recipes = "all";
  std::string source_dir;
  std::string kl_grouping = "predicted";
  std::vector<std::string> report_inputs;
  double tpr_q = 0.95;
  double fail_threshold = 0.10;
  int knn_k = 1000;
  int count = 400;
  int width = 224;
  int height = 224;
  uint64_t seed = 0;
};

FitOptions fit_options(const Options& opt) {
  FitOptions fit;
  fit.knn_k = opt.knn_k;
  if (opt.kl_grouping == "predicted")
    fit.kl_grouping = KlGrouping::predicted;
  else if (opt.kl_grouping == "true")
    fit.kl_grouping = KlGrouping::true_label;
  else
    throw DataError("--kl-grouping must be 'predicted' or 'true'");
  return fit;
}

void check_run_config(const Options& opt) {
  if (!(opt.tpr_q > 0.0 && opt.tpr_q <= 1.0))
    throw DataError("--tpr-q must be in (0, 1]");
  if (opt.fail_threshold < 0.0 || opt.fail_threshold > 1.0)
    throw DataError("--fail-threshold must be in [0, 1]");
  if (opt.knn_k < 1) throw DataError("--knn-k must be >= 1");
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_fit(const Options& opt) {
  check_run_config(opt);
  const EvalBundle bundle = load_bundle(opt.bundle_path);
  const FittedState state = fit_detectors(bundle, fit_options(opt));
  save_fitted_state(opt.out_path, state);
  std::cout << "fitted: N_tr=" << bundle.train_features.rows()
            << " d=" << bundle.feature_dim() << " C=" << bundle.num_classes()
            << " vim_D=" << state.vim.principal_dim()
            << " vim_alpha=" << state.vim.alpha
            << " react_r=" << state.react_r
            << " knn_K=" << state.knn.k
            << " kl_refs=" << state.kl_refs.refs.rows() << "\n";
  std::cout << "state written to " << opt.out_path << "\n";
  return kExitOk;
}

FittedState obtain_state(const Options& opt, const EvalBundle& bundle) {
  if (!opt.state_path.empty()) return load_fitted_state(opt.state_path);
  return fit_detectors(bundle, fit_options(opt));
}

int cmd_score(const Options& opt) {
  check_run_config(opt);
  const EvalBundle bundle = load_bundle(opt.bundle_path);
  const FittedState state = obtain_state(opt, bundle);
  const Method method = method_from_name(opt.methods);

  const SetData* set = nullptr;
  if (opt.set_name == "id_test") {
    set = &bundle.id_test;
  } else {
    set = bundle.find_ood(opt.set_name);
    if (set == nullptr)
      throw DataError("unknown set '" + opt.set_name +
                      "' (use id_test or an OOD set name)");
  }
  const Eigen::VectorXd scores = score_method(method, *set, state);

  std::vector<float> values(static_cast<std::size_t>(scores.size()));
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    values[static_cast<std::size_t>(i)] = static_cast<float>(scores(i));
  write_matrix(opt.out_path,
               MatrixFile::from_f32(static_cast<uint64_t>(scores.size()), 1,
                                    std::move(values)));
  std::cout << "wrote " << scores.size() << " scores for method "
            << method_name(method) << " on set " << opt.set_name << " to "
            << opt.out_path << "\n";
  return kExitOk;
}

std::vector<Method> resolve_methods(const std::string& csv, bool& explicit_out) {
  explicit_out = csv != "all";
  if (!explicit_out) return all_methods();
  std::vector<Method> methods;
  for (const auto& name : split_csv(csv))
    methods.push_back(method_from_name(name));
  if (methods.empty()) throw DataError("--methods list is empty");
  return methods;
}

int cmd_eval(const Options& opt) {
  check_run_config(opt);
  const ReportFormat format = report_format_from_name(opt.format);
  const EvalBundle bundle = load_bundle(opt.bundle_path);
  const FittedState state = obtain_state(opt, bundle);

  EvalConfig config;
  config.methods = resolve_methods(opt.methods, config.methods_explicit);
  config.tpr_q = opt.tpr_q;
  config.unit_fail_threshold = opt.fail_threshold;
  const std::vector<EvalReport> reports = run_eval(bundle, state, config);
  if (reports.empty()) throw DataError("no applicable methods to evaluate");

  // all content is computed before any file is written
  std::vector<std::pair<std::string, std::string>> outputs;
  const char* ext = report_format_extension(format);
  for (const auto& report : reports)
    outputs.emplace_back("report_" + report.method + "." + ext,
                         render_report(report, format));
  outputs.emplace_back(std::string("summary.") + ext,
                       render_summary(reports, format));

  fs::create_directories(opt.out_dir);
  for (const auto& [name, content] : outputs) {
    std::ofstream out(fs::path(opt.out_dir) / name,
                      std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + name + " in " + opt.out_dir);
    out << content;
  }
  std::cout << "evaluated " << reports.size() << " methods over "
            << reports.front().per_class.size() << " OOD classes; reports in "
            << opt.out_dir << "\n";
  return kExitOk;
}

int cmd_gen_unittests(const Options& opt) {
  std::vector<Recipe> recipes;
  if (opt.recipes == "all") {
    recipes = all_recipes();
  } else {
    for (const auto& name : split_csv(opt.recipes))
      recipes.push_back(recipe_from_name(name));
  }
  if (recipes.empty()) throw DataError("--recipes list is empty");

  for (Recipe recipe : recipes) {
    RecipeSpec spec;
    spec.recipe = recipe;
    spec.width = opt.width;
    spec.height = opt.height;
    spec.count = opt.count;
    spec.base_seed = opt.seed;
    spec.source_dir = opt.source_dir;
    validate_spec(spec);
  }
  for (Recipe recipe : recipes) {
    RecipeSpec spec;
    spec.recipe = recipe;
    spec.width = opt.width;
    spec.height = opt.height;
    spec.count = opt.count;
    spec.base_seed = opt.seed;
    spec.source_dir = opt.source_dir;
    const SuiteResult result = generate_suite(
        spec, (fs::path(opt.out_dir) / recipe_name(recipe)).string());
    std::cout << "generated " << result.files.size() << " images in "
              << result.directory << "\n";
  }
  return kExitOk;
}

int cmd_report(const Options& opt) {
  const ReportFormat format = report_format_from_name(opt.format);
  std::vector<EvalReport> reports;
  for (const auto& path : opt.report_inputs) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open report " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    reports.push_back(parse_report_json(buf.str()));
  }
  const std::string summary = render_summary(reports, format);
  if (opt.out_path.empty()) {
    std::cout << summary;
  } else {
    std::ofstream out(opt.out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + opt.out_path);
    out << summary;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OOD-detection evaluation toolkit"};
  app.require_subcommand(1);
  Options opt;

  CLI::App* fit = app.add_subcommand("fit", "fit detector statistics");
  fit->add_option("--bundle", opt.bundle_path, "bundle manifest JSON")
      ->required();
  fit->add_option("--out", opt.out_path, "output state file")->required();
  fit->add_option("--knn-k", opt.knn_k, "requested K for the KNN index");
  fit->add_option("--kl-grouping", opt.kl_grouping,
                  "KL-Matching grouping: predicted|true");

  CLI::App* score = app.add_subcommand("score", "score one method on one set");
  score->add_option("--bundle", opt.bundle_path)->required();
  score->add_option("--state", opt.state_path, "fitted state (else fit now)");
  score->add_option("--method", opt.methods, "method id")->required();
  score->add_option("--set", opt.set_name, "id_test or an OOD set name")
      ->required();
  score->add_option("--out", opt.out_path, "output score matrix (n x 1 f32)")
      ->required();
  score->add_option("--knn-k", opt.knn_k);
  score->add_option("--kl-grouping", opt.kl_grouping);

  CLI::App* eval = app.add_subcommand("eval", "evaluate methods on a bundle");
  eval->add_option("--bundle", opt.bundle_path)->required();
  eval->add_option("--state", opt.state_path, "fitted state (else fit now)");
  eval->add_option("--methods", opt.methods,
                   "comma-separated method ids or 'all'");
  eval->add_option("--tpr-q", opt.tpr_q, "TPR target Q in (0,1]")
      ->check(CLI::Range(1e-9, 1.0));
  eval->add_option("--fail-threshold", opt.fail_threshold,
                   "unit-test FPR failure threshold")
      ->check(CLI::Range(0.0, 1.0));
  eval->add_option("--knn-k", opt.knn_k)->check(CLI::PositiveNumber);
  eval->add_option("--kl-grouping", opt.kl_grouping);
  eval->add_option("--out-dir", opt.out_dir, "report output directory")
      ->required();
  eval->add_option("--format", opt.format, "json|csv|md");

  CLI::App* gen =
      app.add_subcommand("gen-unittests", "generate synthetic image suites");
  gen->add_option("--out-dir", opt.out_dir)->required();
  gen->add_option("--recipes", opt.recipes,
                  "comma-separated recipe names or 'all'");
  gen->add_option("--count", opt.count, "images per suite")
      ->check(CLI::PositiveNumber);
  gen->add_option("--width", opt.width)->check(CLI::Range(8, 1 << 16));
  gen->add_option("--height", opt.height)->check(CLI::Range(8, 1 << 16));
  gen->add_option("--seed", opt.seed, "base seed");
  gen->add_option("--source-dir", opt.source_dir,
                  "PNG sources for pixel-permutation recipes");

  CLI::App* report =
      app.add_subcommand("report", "re-render a summary from JSON reports");
  report->add_option("--inputs", opt.report_inputs, "report JSON files")
      ->required();
  report->add_option("--format", opt.format, "json|csv|md");
  report->add_option("--out", opt.out_path, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (fit->parsed()) return cmd_fit(opt);
    if (score->parsed()) return cmd_score(opt);
    if (eval->parsed()) return cmd_eval(opt);
    if (gen->parsed()) return cmd_gen_unittests(opt);
    if (report->parsed()) return cmd_report(opt);
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
