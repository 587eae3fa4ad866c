#pragma once

#include <string>

#include "run_spec.hpp"

namespace flowlab::cli {

struct ExecuteOptions {
  std::string out_dir;  ///< created fresh; existing directories are refused
  bool quiet = false;
  std::string spec_text;  ///< raw document, echoed into the manifest
};

/// Run the computation selected by the spec and write its artifacts plus a
/// manifest.json into the output directory. Returns the process exit code:
/// 0 for converged / t_end_reached, nonzero otherwise. Errors before any
/// artifact exists are reported by throwing.
int execute(const RunSpec& spec, const ExecuteOptions& options);

}  // namespace flowlab::cli
