#include "lsq/cps.hpp"
#include "lsq/eval.hpp"
#include "lsq/harness.hpp"
#include "lsq/lexer.hpp"
#include "lsq/syntax.hpp"
#include "lsq/target.hpp"
#include "lsq/typecheck.hpp"
#include "mini/cfg.hpp"
#include "mini/difftest.hpp"
#include "mini/normalize.hpp"
#include "mini/runtime.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_source(const std::string &path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in)
    throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int report(const lsq::DiffReport &r) {
  std::cout << lsq::to_json(r) << "\n";
  return r.failures.empty() ? 0 : 1;
}

std::string target_outcome(const lsq::target::Result &r) {
  switch (r.status) {
  case lsq::target::Status::Value: return "value " + lsq::target::print_term(r.value);
  case lsq::target::Status::Stuck: return "stuck: " + r.reason;
  case lsq::target::Status::OutOfFuel: return "out of fuel";
  }
  return "?";
}

void print_outcome(const mini::RunOutcome &o) {
  std::cout << "yields [";
  for (size_t i = 0; i < o.yields.size(); ++i)
    std::cout << (i ? ", " : "") << o.yields[i].str();
  std::cout << "]\n";
  if (o.result)
    std::cout << "result " << o.result->str() << "\n";
  if (o.exception)
    std::cout << "exception " << o.exception->str() << "\n";
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"lsqc: coroutine calculus and MiniLang coroutine compiler"};
  app.require_subcommand(1);

  std::string file;
  bool subtyping = false, trace = false, no_opt = false, target_input = false;
  long fuel = 100000;
  uint64_t seed = 42;
  int count = 200;
  std::string coroutine, dump = "entries", args_csv;
  int snapshot_at = -1;

  auto *typecheck = app.add_subcommand("typecheck", "Type a source program");
  typecheck->add_option("file", file, "Source file, or - for stdin")->required();
  typecheck->add_flag("--subtyping", subtyping, "Enable subtyping");

  auto *eval = app.add_subcommand("eval", "Evaluate a source program");
  eval->add_option("file", file, "Source file, or - for stdin")->required();
  eval->add_flag("--trace", trace, "Print every reduction step");
  eval->add_option("--fuel", fuel, "Step budget");

  auto *transform = app.add_subcommand("transform", "Translate a source program to the target calculus");
  transform->add_option("file", file, "Source file, or - for stdin")->required();

  auto *eval_target = app.add_subcommand("eval-target", "Translate, typecheck and evaluate in the target calculus");
  eval_target->add_option("file", file, "Source file, or - for stdin")->required();
  eval_target->add_flag("--target-input", target_input, "The file is already a target program");
  eval_target->add_option("--fuel", fuel, "Step budget");

  auto *difftest = app.add_subcommand("difftest", "Differential test of the translation");
  difftest->add_option("--seed", seed, "Generator seed");
  difftest->add_option("--count", count, "Number of programs");
  difftest->add_option("--fuel", fuel, "Step budget per program");

  auto *mini_cmd = app.add_subcommand("mini", "MiniLang coroutine pipeline");
  mini_cmd->require_subcommand(1);
  auto *compile = mini_cmd->add_subcommand("compile", "Compile a coroutine and dump a pipeline stage");
  compile->add_option("file", file, "MiniLang file")->required();
  compile->add_option("--coroutine", coroutine, "Coroutine name")->required();
  compile->add_option("--dump", dump, "cfg, segments or entries")
      ->check(CLI::IsMember({"cfg", "segments", "entries"}));
  compile->add_flag("--no-opt", no_opt, "Load and store every variable in scope");

  auto *run = mini_cmd->add_subcommand("run", "Compile and run a coroutine to completion");
  run->add_option("file", file, "MiniLang file")->required();
  run->add_option("--coroutine", coroutine, "Coroutine name")->required();
  run->add_option("--args", args_csv, "Comma separated arguments");
  run->add_option("--snapshot-at", snapshot_at, "Snapshot after this many resumes");
  run->add_flag("--no-opt", no_opt, "Load and store every variable in scope");

  auto *mini_diff = mini_cmd->add_subcommand("difftest", "Differential test of the pipeline");
  mini_diff->add_option("--seed", seed, "Generator seed");
  mini_diff->add_option("--count", count, "Number of programs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*typecheck) {
      auto t = lsq::parse_term(read_source(file));
      auto ty = lsq::check_user_program(t, subtyping ? lsq::Mode::Subtyping : lsq::Mode::Base);
      std::cout << lsq::print_type(ty) << "\n";
      return 0;
    }
    if (*eval) {
      auto t = lsq::parse_term(read_source(file));
      lsq::StepObserver obs;
      if (trace)
        obs = [](const lsq::Configuration &c, const std::string &rule) {
          std::cout << "[" << rule << "] " << lsq::print_term(c.term) << "\n";
        };
      auto r = lsq::eval({t, {}}, fuel, obs);
      std::cout << lsq::describe_source(r) << "\n";
      return r.status == lsq::EvalStatus::Finished ? 0 : 1;
    }
    if (*transform) {
      auto t = lsq::parse_term(read_source(file));
      lsq::check_user_program(t, lsq::Mode::Base);
      std::cout << lsq::target::print_term(lsq::cps::transform_free({}, t)) << "\n";
      return 0;
    }
    if (*eval_target) {
      std::string src = read_source(file);
      lsq::target::TermP t;
      if (target_input) {
        t = lsq::target::parse_term(src);
      } else {
        auto s = lsq::parse_term(src);
        lsq::check_user_program(s, lsq::Mode::Base);
        t = lsq::cps::transform_free({}, s);
      }
      auto ty = lsq::target::typecheck(t);
      auto r = lsq::target::eval(t, fuel);
      std::cout << target_outcome(r) << " : " << lsq::target::print_type(ty) << "\n";
      return r.status == lsq::target::Status::Value ? 0 : 1;
    }
    if (*difftest)
      return report(lsq::difftest_calculus(seed, count, fuel));
    if (*compile) {
      auto p = mini::normalize(mini::parse_mini(read_source(file)));
      int k = p.find(coroutine);
      if (k < 0)
        throw UsageError("no coroutine named " + coroutine);
      auto opt = no_opt ? mini::AnalysisOptions::none() : mini::AnalysisOptions{};
      auto g = mini::build_cfg(p, k);
      if (dump == "cfg") {
        std::cout << mini::dump_cfg(g);
      } else if (dump == "segments") {
        std::cout << mini::dump_segments(g, mini::split_segments(g));
      } else {
        auto cp = mini::compile(p, opt);
        std::cout << mini::dump_entries(cp.coroutines[k], &cp);
      }
      return 0;
    }
    if (*run) {
      auto p = mini::parse_mini(read_source(file));
      auto cp = mini::compile(p, no_opt ? mini::AnalysisOptions::none() : mini::AnalysisOptions{});
      auto args = mini::parse_values(args_csv);
      if (snapshot_at < 0) {
        print_outcome(mini::run_compiled(cp, coroutine, args));
        return 0;
      }
      auto in = mini::start_instance(cp, coroutine, args);
      mini::RunOutcome head;
      for (int i = 0; i < snapshot_at && in.live; ++i)
        if (mini::resume_instance(in))
          head.yields.push_back(mini::read_value(in));
      auto copy = mini::snapshot_instance(in);
      auto rest = mini::drain(in);
      head.yields.insert(head.yields.end(), rest.yields.begin(), rest.yields.end());
      head.result = rest.result;
      head.exception = rest.exception;
      print_outcome(head);
      std::cout << "snapshot after " << snapshot_at << " resumes:\n";
      print_outcome(mini::drain(copy));
      return 0;
    }
    if (*mini_diff)
      return report(mini::difftest_mini(seed, count));
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
