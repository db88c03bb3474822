#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "aggdiff.h"

namespace {

std::string default_out_root() {
    const char* env = std::getenv("AGGDIFF_OUT_ROOT");
    return env ? env : "runs";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aggdiff: a numerical laboratory for aggregation-diffusion equations"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 1;
    bool verbose = false;
    app.add_option("--config", config_path, "Path to the run configuration file")->required();
    app.add_option("--out", out_dir,
                   "Output directory (default: $AGGDIFF_OUT_ROOT/<command> or runs/<command>)");
    app.add_option("--threads", threads,
                   "Worker threads reserved for sweep probes (probes currently run "
                   "sequentially; accepted for interface stability)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--verbose", verbose, "Print progress details");

    auto* check = app.add_subcommand("check-kernel", "Kernel admissibility and singular order");
    auto* classify = app.add_subcommand("classify", "Criticality class and critical-mass prediction");
    auto* simulate = app.add_subcommand("simulate", "Run the finite-volume solver");
    auto* sweep = app.add_subcommand("sweep", "Bisect the empirical critical mass");
    auto* virial = app.add_subcommand("virial", "Second-moment (virial) identity check");
    auto* barenblatt = app.add_subcommand("barenblatt", "Porous-medium convergence study");
    for (auto* sub : {check, classify, simulate, sweep, virial, barenblatt}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Usage errors and --help map onto the documented exit codes: 0 or 1.
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const char* name = check->parsed()        ? "check-kernel"
                       : classify->parsed()   ? "classify"
                       : simulate->parsed()   ? "simulate"
                       : sweep->parsed()      ? "sweep"
                       : virial->parsed()     ? "virial"
                       : barenblatt->parsed() ? "barenblatt"
                                              : "";
    if (out_dir.empty()) out_dir = default_out_root() + "/" + name;

    int rc = 1;
    if (check->parsed()) rc = agd_cmd_check_kernel(config_path.c_str(), out_dir.c_str(), verbose);
    else if (classify->parsed()) rc = agd_cmd_classify(config_path.c_str(), out_dir.c_str(), verbose);
    else if (simulate->parsed()) rc = agd_cmd_simulate(config_path.c_str(), out_dir.c_str(), verbose);
    else if (sweep->parsed()) rc = agd_cmd_sweep(config_path.c_str(), out_dir.c_str(), verbose);
    else if (virial->parsed()) rc = agd_cmd_virial(config_path.c_str(), out_dir.c_str(), verbose);
    else if (barenblatt->parsed()) rc = agd_cmd_barenblatt(config_path.c_str(), out_dir.c_str(), verbose);

    if (rc == AGD_ERROR) {
        const char* msg = agd_last_error();
        if (msg && msg[0]) std::fprintf(stderr, "%s\n", msg);
    }
    return rc;
}
