#pragma once
// Text output: CSV trajectories and the human-readable run summary.

#include <iosfwd>
#include <string>

#include "pram/engine.hpp"

namespace pram {

// Shortest representation that round-trips a double exactly (%.17g).
std::string format_real(double value);

// RFC 4180 field: quoted (with internal quotes doubled) when the content
// requires it or when `force_quote` is set.
std::string csv_field(const std::string& value, bool force_quote = false);

// "iter,signature,mass", one row per (iteration, group), iteration 0 first.
// Signatures are always quoted; masses use format_real.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

// "iter,probe_name,value".
void write_probes_csv(std::ostream& out, const Trajectory& trajectory);

// Per-iteration group counts and total mass, then the final group table.
void write_summary(std::ostream& out, const Trajectory& trajectory);

void write_file(const std::string& path, const std::string& content);

}  // namespace pram
