#pragma once

#include <string>

namespace aggdiff {

// Exit-code contract shared by the C API and the CLI:
//   0 success / run completed      1 error (parse, I/O, solver failure)
//   2 kernel inadmissible          3 indeterminate classification
//   4 numerical blow-up            5 dt floor reached
//   6 sweep protocol error
// Each command reads a config file and writes its artifacts under out_dir
// (created fresh; an existing directory is refused). Diagnostic text goes to
// stdout/stderr; verbose adds progress lines.
int cmd_check_kernel(const std::string& config_path, const std::string& out_dir, bool verbose);
int cmd_classify(const std::string& config_path, const std::string& out_dir, bool verbose);
int cmd_simulate(const std::string& config_path, const std::string& out_dir, bool verbose);
int cmd_sweep(const std::string& config_path, const std::string& out_dir, bool verbose);
int cmd_virial(const std::string& config_path, const std::string& out_dir, bool verbose);
int cmd_barenblatt(const std::string& config_path, const std::string& out_dir, bool verbose);

}  // namespace aggdiff
