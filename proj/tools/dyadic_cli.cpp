#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dyadic/dyadic_c.h"

namespace {

struct CommonArgs {
  std::string instance_path;
  std::uint64_t seed = 42;
  int threads = 1;
  bool exact = false;
  bool atomic = false;
  bool variant = false;
  std::string csv_path;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_instance) {
  if (with_instance) {
    cmd->add_option("--instance", args.instance_path, "Instance JSON file")
        ->required()
        ->check(CLI::ExistingFile);
  }
  cmd->add_option("--seed", args.seed, "Seed for the iterative searches");
  cmd->add_option("--threads", args.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--exact", args.exact, "Use rational arithmetic where supported");
  cmd->add_flag("--atomic-mode", args.atomic, "Allocate whole leaves only");
  cmd->add_flag("--variant", args.variant,
                "Alternate readings: localized test functions, alternate weak layout");
  cmd->add_option("--csv", args.csv_path, "Write the tabular part of the report to this file");
}

dy_options make_options(const CommonArgs& args) {
  dy_options options;
  dy_options_init(&options);
  options.seed = args.seed;
  options.threads = args.threads;
  options.exact = args.exact ? 1 : 0;
  options.atomic = args.atomic ? 1 : 0;
  options.variant = args.variant ? 1 : 0;
  options.csv = args.csv_path.empty() ? 0 : 1;
  return options;
}

int emit_report(char* report, const std::string& csv_path) {
  if (report == nullptr) return DY_ERROR;
  nlohmann::json j = nlohmann::json::parse(report);
  dy_string_free(report);
  if (!csv_path.empty() && j.contains("csv")) {
    std::ofstream out(csv_path);
    if (!out) {
      std::cerr << "cannot write CSV file: " << csv_path << "\n";
      return DY_ERR_INPUT;
    }
    out << j["csv"].get<std::string>();
    j.erase("csv");
  }
  std::cout << j.dump(2) << "\n";
  return DY_OK;
}

int fail_with(int status) {
  std::cerr << dy_last_error() << "\n";
  return status;
}

int run_instance_command(const CommonArgs& args, const std::string& what, bool is_check) {
  dy_instance* instance = nullptr;
  int status = dy_instance_load_file(args.instance_path.c_str(), &instance);
  if (status != DY_OK) return fail_with(status);

  dy_options options = make_options(args);
  char* report = nullptr;
  status = is_check ? dy_check(instance, what.c_str(), &options, &report)
                    : dy_eval(instance, what.c_str(), &options, &report);
  dy_instance_free(instance);

  if (report == nullptr) return fail_with(status);
  int emit_status = emit_report(report, args.csv_path);
  return emit_status != DY_OK ? emit_status : status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-weight dyadic operator toolbox"};
  app.require_subcommand(1);

  CommonArgs eval_args, check_args, suite_args;
  std::string eval_what, check_what;
  double sizes = 1.0;

  CLI::App* eval = app.add_subcommand("eval", "Evaluate one quantity on an instance");
  eval->add_option("what", eval_what, "norm|T|Tstar|mixed|weak|wolff")
      ->required()
      ->check(CLI::IsMember({"norm", "T", "Tstar", "mixed", "weak", "wolff"}));
  add_common(eval, eval_args, true);

  CLI::App* check = app.add_subcommand("check", "Run an invariant suite on an instance");
  check->add_option("what", check_what,
                    "thm12|thm11|sparse|carleson|dor|lemma45|lemma47|weak")
      ->required()
      ->check(CLI::IsMember(
          {"thm12", "thm11", "sparse", "carleson", "dor", "lemma45", "lemma47", "weak"}));
  add_common(check, check_args, true);

  CLI::App* suite = app.add_subcommand("suite", "Run the randomized property suite");
  add_common(suite, suite_args, false);
  suite->add_option("--sizes", sizes, "Scale factor for every criterion's instance count")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : DY_ERR_INPUT;
  }

  if (eval->parsed()) return run_instance_command(eval_args, eval_what, false);
  if (check->parsed()) return run_instance_command(check_args, check_what, true);

  dy_options options = make_options(suite_args);
  char* summary = nullptr;
  int status = dy_suite(suite_args.seed, sizes, &options, &summary);
  if (summary == nullptr) return fail_with(status);
  int emit_status = emit_report(summary, suite_args.csv_path);
  return emit_status != DY_OK ? emit_status : status;
}
