#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "execute.hpp"
#include "flowlab/errors.hpp"
#include "run_spec.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw flowlab::InvalidInputError("cannot read spec file '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void report_error(const std::string& kind, const std::string& message) {
  nlohmann::json record{{"error", kind}, {"message", message}};
  std::cerr << record.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  using flowlab::cli::Mode;

  CLI::App app{"numerical laboratory for translating mean curvature flow"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_dir;
  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress progress output");

  struct Sub {
    Mode mode;
    CLI::App* cmd;
  };
  std::vector<Sub> subs;
  auto add_sub = [&](Mode mode, const std::string& help) {
    CLI::App* cmd = app.add_subcommand(flowlab::cli::mode_name(mode), help);
    cmd->add_option("--spec", spec_path, "run specification file");
    cmd->add_option("--out", out_dir, "output directory (overrides the spec)");
    subs.push_back({mode, cmd});
  };
  add_sub(Mode::graph_run, "evolve a graph over a structured grid");
  add_sub(Mode::curve_run, "evolve a planar curve");
  add_sub(Mode::bowl, "integrate the radial bowl-soliton profile");
  add_sub(Mode::stationary, "solve the translator equation by Newton");
  add_sub(Mode::check_invariants, "run the built-in invariant suite");

  CLI11_PARSE(app, argc, argv);

  Mode mode = Mode::graph_run;
  for (const Sub& s : subs)
    if (s.cmd->parsed()) mode = s.mode;

  try {
    std::string text;
    if (!spec_path.empty())
      text = read_file(spec_path);
    else if (mode != Mode::check_invariants)
      throw flowlab::InvalidInputError("--spec is required for this mode");

    flowlab::cli::RunSpec spec = flowlab::cli::parse_spec(text, mode);
    flowlab::cli::ExecuteOptions options;
    options.out_dir = out_dir.empty() ? spec.out : out_dir;
    options.quiet = quiet;
    options.spec_text = text;
    return flowlab::cli::execute(spec, options);
  } catch (const flowlab::InvalidInputError& e) {
    report_error("InvalidInputError", e.what());
    return 2;
  } catch (const std::exception& e) {
    report_error("RuntimeError", e.what());
    return 1;
  }
}
