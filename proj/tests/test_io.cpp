#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "kminerr/io.hpp"
#include "kminerr/problems.hpp"

using namespace kminerr;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("kminerr_io_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("matrix market round trip is exact") {
    TempDir dir;
    const auto p = gen_random(7, 5, 4242);
    const std::string path = dir.file("a.mtx");
    save_matrix_market(path, p.A);
    const Matrix back = load_matrix_market(path);
    REQUIRE(back.rows() == 7);
    REQUIRE(back.cols() == 5);
    CHECK(back.data() == p.A.data());

    // 1x1 and zero entries
    save_matrix_market(path, Matrix(1, 1, {0.1}));
    const Matrix one = load_matrix_market(path);
    CHECK(one.rows() == 1);
    CHECK(one(0, 0) == 0.1);
}

TEST_CASE("vector text round trip is exact") {
    TempDir dir;
    SplitMix64 rng(9);
    Vector v(23);
    for (auto& e : v) e = rng.next_gaussian() * std::pow(10.0, (rng.next() % 40) - 20.0);
    v.push_back(0.0);
    v.push_back(-0.0);
    const std::string path = dir.file("v.txt");
    save_vector(path, v);
    const Vector back = load_vector(path);
    CHECK(back == v);
}

TEST_CASE("coordinate matrix market files load") {
    TempDir dir;
    const std::string path = dir.file("coord.mtx");
    {
        std::ofstream os(path);
        os << "%%MatrixMarket matrix coordinate real general\n";
        os << "% a comment line\n";
        os << "3 4 3\n";
        os << "1 1 2.5\n";
        os << "3 4 -1\n";
        os << "2 2 1e-3\n";
    }
    const Matrix A = load_matrix_market(path);
    REQUIRE(A.rows() == 3);
    REQUIRE(A.cols() == 4);
    CHECK(A(0, 0) == 2.5);
    CHECK(A(2, 3) == -1.0);
    CHECK(A(1, 1) == 1e-3);
    CHECK(A(0, 1) == 0.0);
}

TEST_CASE("malformed matrix market input names the offending line") {
    TempDir dir;

    auto expect_parse_error = [&](const std::string& content, std::size_t line) {
        const std::string path = dir.file("bad.mtx");
        std::ofstream(path) << content;
        try {
            load_matrix_market(path);
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(e.line() == line);
            CHECK(std::string(e.what()).find(path) != std::string::npos);
        }
    };

    expect_parse_error("%%MatrixMarket matrix array complex general\n1 1\n1\n", 1);
    expect_parse_error("%%MatrixMarket matrix array real symmetric\n1 1\n1\n", 1);
    expect_parse_error("not a header\n", 1);
    expect_parse_error("%%MatrixMarket matrix array real general\n2 2\n1\nbroken\n", 4);
    expect_parse_error("%%MatrixMarket matrix coordinate real general\n2 2 1\n5 1 3.0\n", 3);
    expect_parse_error("%%MatrixMarket matrix array real general\n2 2\n1\n", 4);
}

TEST_CASE("missing files raise io_error") {
    CHECK_THROWS_AS(load_matrix_market("/nonexistent/path/a.mtx"), io_error);
    CHECK_THROWS_AS(load_vector("/nonexistent/path/v.txt"), io_error);
    CHECK_THROWS_AS(save_vector("/nonexistent/path/v.txt", Vector{1.0}), io_error);
}

TEST_CASE("vector files reject garbage with line numbers") {
    TempDir dir;
    const std::string path = dir.file("v.txt");
    std::ofstream(path) << "1.5\n\n2.5\nnot_a_number\n";
    try {
        load_vector(path);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 4);
    }
}

TEST_CASE("format_double round trips through parsing") {
    SplitMix64 rng(31);
    for (int i = 0; i < 200; ++i) {
        double v = rng.next_gaussian() * std::pow(10.0, static_cast<double>(rng.next() % 60) - 30.0);
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
}
