#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "accrestart/data_io.hpp"
#include "support.hpp"

using namespace accrestart;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "accrestart_test_data_io";
    fs::create_directories(dir);
    return dir / name;
}

SparseDesign libsvm(const std::string& text, std::optional<Index> features = std::nullopt)
{
    std::istringstream in(text);
    return parse_libsvm(in, LabelRule::numeric(), features);
}

std::string error_of(const std::string& text)
{
    try {
        libsvm(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("libsvm row")
{
    const auto d = libsvm("-1 1:0.5 3:2\n");
    CHECK(d.rows() == 1);
    CHECK(d.cols() == 3);
    CHECK(d.b[0] == -1.0);
    CHECK(d.A.coeff(0, 0) == 0.5);
    CHECK(d.A.coeff(0, 1) == 0.0);
    CHECK(d.A.coeff(0, 2) == 2.0);
    CHECK(d.A.nonZeros() == 2);
}

TEST_CASE("libsvm comments, blank lines and feature count")
{
    const auto d = libsvm("# header\n\n1 2:1 # trailing\n-1 1:3\n", 5);
    CHECK(d.rows() == 2);
    CHECK(d.cols() == 5);
    CHECK(d.A.coeff(1, 0) == 3.0);
}

TEST_CASE("libsvm errors carry the line number")
{
    CHECK(error_of("1 1:1\n1 2:1 2:3\n").find("line 2") != std::string::npos);
    CHECK(error_of("1 1:1\n1 0:1\n").find("line 2") != std::string::npos);
    CHECK(error_of("1 1:1\n1 1:1\n1 x:1\n").find("line 3") != std::string::npos);
    CHECK(error_of("1 3\n").find("line 1") != std::string::npos);
    CHECK(!error_of("").empty());
    CHECK_THROWS_AS(libsvm("1 7:1\n", 4), ConfigError);
}

TEST_CASE("label rules")
{
    CHECK(LabelRule::one_vs_rest("a").apply("a") == 1.0);
    CHECK(LabelRule::one_vs_rest("a").apply("b") == -1.0);
    const auto map = LabelRule::parse_mapping("x=1,y=-1");
    CHECK(map.apply("y") == -1.0);
    CHECK_THROWS_AS(map.apply("z"), ConfigError);
    CHECK_THROWS_AS(LabelRule::parse_mapping("x1"), ConfigError);
    LabelRule binary;
    binary.kind = LabelRule::Kind::binary;
    CHECK(binary.apply("+1") == 1.0);
    CHECK_THROWS_AS(binary.apply("2"), ConfigError);
    CHECK_THROWS_AS(LabelRule::numeric().apply("cat"), ConfigError);
}

TEST_CASE("csv parsing")
{
    std::istringstream in("a,b,label\n1,0,yes\n0,2.5,no\n");
    const auto d = parse_csv(in, LabelRule::parse_mapping("yes=1,no=-1"));
    CHECK(d.rows() == 2);
    CHECK(d.cols() == 2);
    CHECK(d.A.coeff(1, 1) == 2.5);
    CHECK(d.A.nonZeros() == 2);
    CHECK(d.b[1] == -1.0);
    std::istringstream ragged("a,b,label\n1,0\n");
    CHECK_THROWS_AS(parse_csv(ragged, LabelRule::numeric()), ConfigError);
}

TEST_CASE("iris data set")
{
    DatasetManifest m;
    m.path = "data/iris.csv";
    m.format = format_for(m.path);
    m.label_rule = LabelRule::one_vs_rest("Iris-setosa");
    const auto d = load_design(m);
    CHECK(d.cols() == 4);
    CHECK(d.rows() == 150);
    CHECK((d.b.array() == 1.0).count() == 50);
    m.label_rule = LabelRule::parse_mapping("Iris-setosa=1,Iris-versicolor=-1");
    CHECK_THROWS_AS(load_design(m), ConfigError);
    m.path = "data/missing.csv";
    CHECK_THROWS_AS(load_design(m), IoError);
}

TEST_CASE("data directory lookup")
{
    const fs::path dir = scratch("lookup");
    fs::create_directories(dir);
    { std::ofstream(dir / "tiny.svm") << "1 1:2\n"; }
    setenv("ACCRESTART_DATA_DIR", dir.c_str(), 1);
    CHECK(resolve_data_path("tiny.svm") == dir / "tiny.svm");
    DatasetManifest m;
    m.path = "tiny.svm";
    CHECK(load_design(m).A.coeff(0, 0) == 2.0);
    unsetenv("ACCRESTART_DATA_DIR");
    CHECK(resolve_data_path("tiny.svm") == fs::path("tiny.svm"));
}

TEST_CASE("libsvm write and read back")
{
    const auto s = synth_lasso(6, 9, 0.5, 10.0, 4);
    std::stringstream buf;
    write_libsvm(s.design, buf);
    const auto d = parse_libsvm(buf, LabelRule::numeric(), 6);
    CHECK(testing::rel_diff(d.b, s.design.b) == 0.0);
    CHECK((Eigen::MatrixXd(d.A) - Eigen::MatrixXd(s.design.A)).norm() == 0.0);
}

TEST_CASE("synthetic instances")
{
    const auto a = synth_lasso(8, 12, 0.3, 100.0, 9);
    const auto b = synth_lasso(8, 12, 0.3, 100.0, 9);
    CHECK(testing::rel_diff(a.design.b, b.design.b) == 0.0);
    for (Index j = 0; j < 8; ++j) CHECK(a.design.A.col(j).nonZeros() >= 1);
    const auto dense = synth_lasso(5, 7, 1.0, 1.0, 1);
    CHECK(dense.design.A.nonZeros() == 35);
    CHECK((dense.planted.array() != 0.0).count() == 1);
    CHECK_THROWS_AS(synth_lasso(0, 5, 0.5, 1.0, 0), ConfigError);
    CHECK_THROWS_AS(synth_lasso(5, 5, 0.0, 1.0, 0), ConfigError);
}

TEST_CASE("shortest round-trip formatting")
{
    for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.30000000000000004, 123456789.123456789}) {
        const auto text = format_double(x);
        CHECK(parse_double(text) == x);
        CHECK(text.size() <= 24);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(std::isnan(parse_double("nan")));
    CHECK(parse_double("-inf") == -std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(parse_double("1.5x"), ConfigError);
}

TEST_CASE("trace round-trip")
{
    RunTrace t;
    t.solver = SolverKind::approx;
    t.policy = "approx-combo(sigma=0.4,K=12)";
    t.seed = 7;
    t.records.push_back({0, 0.0, 2.5, std::nullopt, std::nullopt, false});
    t.records.push_back({12, 3.0, 1.0 / 3.0, 1e-7, 0.25, true});
    std::stringstream buf;
    write_trace(t, buf, {{"problem", "lasso"}});
    const auto back = read_trace(buf);
    REQUIRE(back.records.size() == 2);
    CHECK(!back.records[0].gap);
    CHECK(!back.records[0].dist_v);
    CHECK(*back.records[1].gap == 1e-7);
    CHECK(back.records[1].F == 1.0 / 3.0);
    CHECK(back.records[1].restart);
    CHECK(back.records[1].iter == 12);
    const auto find = [&](const std::string& key) {
        for (const auto& [k, v] : back.header)
            if (k == key) return v;
        return std::string("<missing>");
    };
    CHECK(find("solver") == "approx");
    CHECK(find("seed") == "7");
    CHECK(find("policy") == t.policy);
    CHECK(find("problem") == "lasso");

    std::istringstream bad("iter,epoch,F,gap,dist_v,restart\n1,2,x,,,0\n");
    CHECK_THROWS_AS(read_trace(bad), ConfigError);
}

TEST_CASE("reference round-trip")
{
    const ReferenceSolution ref{(Vector(3) << 0.1, -2.0 / 3.0, 0.0).finished(), 0.123456789012345678};
    const fs::path path = scratch("ref.txt");
    write_reference(ref, path, {{"problem", "lasso"}});
    const auto back = read_reference(path, 3);
    CHECK(back.F == ref.F);
    CHECK(back.x == ref.x);
    CHECK_THROWS_AS(read_reference(path, 4), ConfigError);
    CHECK_THROWS_AS(read_reference(scratch("absent.txt")), IoError);
}
