#include <doctest.h>

#include <cmath>

#include "sciagent/csv.hpp"
#include "test_util.hpp"

using namespace sciagent;

TEST_CASE("table parse basics") {
    csv::Table t = csv::parse_table("x,value\n0,1.5\n0.5, 2.25 \n");
    CHECK(t.header.size() == 2);
    CHECK(t.rows.size() == 2);
    CHECK(t.rows[1][0] == 0.5);
    CHECK(t.rows[1][1] == 2.25);
}

TEST_CASE("nan and inf tokens parse into IEEE values") {
    csv::Table t = csv::parse_table("index,value\n0,nan\n1,inf\n2,-inf\n");
    CHECK(std::isnan(t.rows[0][1]));
    CHECK(std::isinf(t.rows[1][1]));
    CHECK(t.rows[2][1] < 0);
}

TEST_CASE("parse errors carry line information") {
    CHECK_THROWS_AS(csv::parse_table(""), csv::ParseError);
    CHECK_THROWS_AS(csv::parse_table("x,value\n1\n"), csv::ParseError);
    CHECK_THROWS_AS(csv::parse_table("x,value\n1,abc\n"), csv::ParseError);
}

TEST_CASE("artifact kinds round-trip through files") {
    testutil::TempDir tmp("csv");

    csv::write_artifact_1d(tmp / "solution_u.csv", {0.0, 0.5, 1.0}, {1.0, 2.0, 3.0});
    csv::Artifact a = csv::read_artifact(tmp / "solution_u.csv");
    CHECK(a.kind == csv::ArtifactKind::field_1d);
    CHECK(a.x.size() == 3);
    CHECK(a.value[2] == 3.0);

    csv::write_artifact_2d(tmp / "solution_f.csv", {0, 1, 0, 1}, {0, 0, 1, 1}, {1, 2, 3, 4});
    a = csv::read_artifact(tmp / "solution_f.csv");
    CHECK(a.kind == csv::ArtifactKind::field_2d);
    CHECK(a.y[2] == 1.0);

    csv::write_artifact_vector(tmp / "solution_x.csv", {9, 8, 7});
    a = csv::read_artifact(tmp / "solution_x.csv");
    CHECK(a.kind == csv::ArtifactKind::vector);
    CHECK(a.value[0] == 9.0);
    CHECK(a.value[2] == 7.0);
}

TEST_CASE("float formatting survives a write/read cycle exactly") {
    testutil::TempDir tmp("csvfmt");
    std::vector<double> xs = {1.0 / 3.0, 2.0 / 7.0, 1e-300, 12345.6789};
    std::vector<double> vs = {-1.0 / 3.0, 3.14159265358979312, 2.2250738585072014e-308, 0.1};
    csv::write_artifact_1d(tmp / "solution_q.csv", xs, vs);
    csv::Artifact a = csv::read_artifact(tmp / "solution_q.csv");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(a.x[i] == xs[i]);
        CHECK(a.value[i] == vs[i]);
    }
}

TEST_CASE("unrecognized artifact header is rejected") {
    testutil::TempDir tmp("csvbad");
    testutil::write_file(tmp / "solution_w.csv", "col_a,col_b\n1,2\n");
    CHECK_THROWS_AS(csv::read_artifact(tmp / "solution_w.csv"), csv::ParseError);
}
