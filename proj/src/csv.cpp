#include "subdiff/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "subdiff/errors.hpp"

namespace subdiff {

std::string format_double(double value) {
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) return std::to_string(value);
    return std::string(buffer, end);
}

void write_field_csv(std::ostream& os, const Mesh& mesh, const std::vector<NodalField>& fields,
                     const std::vector<std::string>& names) {
    if (fields.size() != names.size()) throw DomainError("write_field_csv: names/fields mismatch");
    os << (mesh.dimension == 1 ? "x" : "x,y");
    for (const auto& name : names) os << ',' << name;
    os << '\n';
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        for (int d = 0; d < mesh.dimension; ++d) {
            if (d) os << ',';
            os << format_double(mesh.coords(d, i));
        }
        for (const auto& f : fields) os << ',' << format_double(f[i]);
        os << '\n';
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        cells.push_back(cell);
    }
    return cells;
}

namespace {

double parse_double(const std::string& text, const std::string& where) {
    double value = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    while (first < last && *first == ' ') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw DomainError("could not parse number '" + text + "' in " + where);
    }
    return value;
}

}  // namespace

NodalField read_field_csv(const std::string& path, const Mesh& mesh) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open field file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DomainError("empty field file: " + path);
    const std::size_t columns = split_csv_line(line).size();
    if (columns < static_cast<std::size_t>(mesh.dimension) + 1) {
        throw DomainError("field file " + path + " needs coordinate and value columns");
    }
    NodalField out(mesh.num_nodes());
    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != columns) throw DomainError("ragged row in " + path);
        if (row >= mesh.num_nodes()) throw DomainError("too many rows in " + path);
        for (int d = 0; d < mesh.dimension; ++d) {
            const double x = parse_double(cells[d], path);
            if (std::abs(x - mesh.coords(d, row)) > 1e-9) {
                throw DomainError("node coordinates in " + path + " do not match the mesh at row " +
                                  std::to_string(row + 1));
            }
        }
        out[row] = parse_double(cells.back(), path);
        ++row;
    }
    if (row != mesh.num_nodes()) {
        throw DomainError(path + " has " + std::to_string(row) + " rows, mesh has " +
                          std::to_string(mesh.num_nodes()) + " nodes");
    }
    return out;
}

}  // namespace subdiff
