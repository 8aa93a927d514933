#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "subdiff/mesh.hpp"

namespace subdiff {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Columns x[,y] followed by one column per field.
void write_field_csv(std::ostream& os, const Mesh& mesh, const std::vector<NodalField>& fields,
                     const std::vector<std::string>& names);

/// Reads a field written by write_field_csv (last column), checking that the
/// node coordinates match the mesh.
NodalField read_field_csv(const std::string& path, const Mesh& mesh);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace subdiff
