#include "pram/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pram/error.hpp"

namespace pram {

std::string format_real(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::string csv_field(const std::string& value, bool force_quote) {
    bool needs_quote = force_quote || value.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quote) return value;
    std::string out;
    out.reserve(value.size() + 2);
    out.push_back('"');
    for (char c : value) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "iter,signature,mass\n";
    for (const Trajectory::Row& row : trajectory.rows) {
        out << row.iteration << ',' << csv_field(row.signature, true) << ','
            << format_real(row.mass) << '\n';
    }
}

void write_probes_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "iter,probe_name,value\n";
    for (const Trajectory::ProbeValue& pv : trajectory.probe_values) {
        out << pv.iteration << ',' << csv_field(pv.probe) << ',' << format_real(pv.value)
            << '\n';
    }
}

void write_summary(std::ostream& out, const Trajectory& trajectory) {
    out << "iteration  groups  total_mass\n";
    for (const Trajectory::IterationStats& s : trajectory.stats) {
        out << s.iteration << "  " << s.group_count << "  " << format_real(s.total_mass) << '\n';
    }
    out << "\nfinal groups (name  mass  signature)\n";
    for (const Trajectory::FinalGroup& g : trajectory.final_groups) {
        out << (g.display_name.empty() ? "-" : g.display_name) << "  " << format_real(g.mass)
            << "  " << g.signature << '\n';
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error::runtime("cannot open for writing: " + path);
    out << content;
    if (!out) throw Error::runtime("write failed: " + path);
}

}  // namespace pram
