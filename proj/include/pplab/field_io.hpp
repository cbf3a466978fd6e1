#pragma once

#include <iosfwd>
#include <string>

#include "pplab/grid.hpp"

namespace pplab {

// One row per grid point: x0[,x1[,x2]],value
void write_field_csv(std::ostream& os, const Field& f);
void write_field_csv(const std::string& path, const Field& f);

// Little-endian header (int32 n, f64 L, int32 M, f64 t, int32 gauge) then M^n f64 values.
void write_field_binary(std::ostream& os, const Field& f);
void write_field_binary(const std::string& path, const Field& f);
Field read_field_binary(std::istream& is);
Field read_field_binary(const std::string& path);

}  // namespace pplab
