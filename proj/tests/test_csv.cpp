#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "subdiff/csv.hpp"
#include "subdiff/errors.hpp"

using namespace subdiff;
namespace fs = std::filesystem;

namespace {

fs::path scratch_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "subdiff_test_csv";
    fs::create_directories(dir);
    return dir / name;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
}

}  // namespace

TEST_CASE("format_double round-trips") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng) * std::pow(10.0, i % 40 - 20);
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1e-3) == "0.001");
    CHECK(format_double(std::numeric_limits<double>::denorm_min()) == "5e-324");
}

TEST_CASE("split_csv_line trims trailing carriage returns") {
    const auto cells = split_csv_line("a,1.5,x\r");
    REQUIRE(cells.size() == 3);
    CHECK(cells[2] == "x");
}

TEST_CASE("field files round-trip in 1D and 2D") {
    for (int dim : {1, 2}) {
        const Mesh mesh = build_mesh(dim, dim == 1 ? 37 : 6);
        const NodalField a = NodalField::Random(mesh.num_nodes());
        const NodalField b = NodalField::Random(mesh.num_nodes());
        const fs::path path = scratch_file("field" + std::to_string(dim) + ".csv");
        {
            std::ofstream os(path);
            write_field_csv(os, mesh, {a, b}, {"a", "b"});
        }
        // The last column is read back.
        CHECK(read_field_csv(path.string(), mesh) == b);
        std::ifstream in(path);
        std::string header;
        std::getline(in, header);
        CHECK(header == (dim == 1 ? "x,a,b" : "x,y,a,b"));
    }
}

TEST_CASE("malformed field files") {
    const Mesh mesh = build_mesh(1, 2);
    std::ostringstream os;
    CHECK_THROWS_AS(write_field_csv(os, mesh, {NodalField::Zero(3)}, {}), DomainError);

    auto expect = [&](const std::string& text, const std::string& fragment) {
        const fs::path path = scratch_file("bad.csv");
        write_text(path, text);
        try {
            read_field_csv(path.string(), mesh);
            FAIL("expected DomainError for " << text);
        } catch (const DomainError& e) {
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };
    expect("", "empty");
    expect("x\n0\n", "coordinate and value");
    expect("x,q\n0,1\n0.5\n1,3\n", "ragged");
    expect("x,q\n0,1\n0.25,2\n1,3\n", "do not match");
    expect("x,q\n0,1\n0.5,abc\n1,3\n", "could not parse");
    expect("x,q\n0,1\n0.5,2\n", "rows");
    expect("x,q\n0,1\n0.5,2\n1,3\n1.5,4\n", "too many");
    CHECK_THROWS_AS(read_field_csv("/nonexistent/file.csv", mesh), DomainError);
}
