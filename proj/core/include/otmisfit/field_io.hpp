#pragma once

#include <filesystem>
#include <iosfwd>

#include "otmisfit/grid.hpp"
#include "otmisfit/transport_1d.hpp"

namespace otm::io {

// GridField CSV: first line holds `n1,n2,x1_min,x1_max,x2_min,x2_max`, then
// n2 lines of n1 comma-separated values (line j+2 holds row j). Floats use 17
// significant digits so a write/read cycle is exact.
void write_field_csv(std::ostream& out, const GridField& field);
void write_field_csv(const std::filesystem::path& path, const GridField& field);

/// Throws Error(ParseError) naming the offending line.
GridField read_field_csv(std::istream& in);
GridField read_field_csv(const std::filesystem::path& path);

// Signal1D CSV: one `x,value` pair per line, uniformly spaced x.
void write_signal_csv(std::ostream& out, const Signal1D& signal);
Signal1D read_signal_csv(std::istream& in);

}  // namespace otm::io
