#pragma once

#include <string>

#include "core/experiments.hpp"
#include "core/solver.hpp"

namespace aggdiff {

// Creates the directory (parents included); an existing directory is refused
// so a re-run can never clobber recorded results.
void create_run_directory(const std::string& path);

// Fixed column order: t, mass, linf, lp_<p>..., S, W, F, I, D, dt_used,
// tail_<k_rel>..., then int_a, virial_w, boundary_term when recorded.
// All values printed with 17 significant digits; byte-identical on re-run.
void write_diagnostics_csv(const std::string& path, const RunOutcome& out, const SimConfig& cfg);

// Cartesian: x, y, u rows in row-major order; radial: r, u.
void write_snapshot_csv(const std::string& path, const GridField& u);

void write_outcome_json(const std::string& path, const RunOutcome& out);

std::string status_name(RunStatus s);

}  // namespace aggdiff
