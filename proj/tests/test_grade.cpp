#include <doctest.h>

#include <cmath>

#include "sciagent/grade.hpp"
#include "sciagent/metrics.hpp"
#include "sciagent/pde/sod.hpp"
#include "test_util.hpp"

using namespace sciagent;

namespace {

csv::Artifact artifact_1d(const std::vector<double>& x, const std::vector<double>& v) {
    csv::Artifact a;
    a.kind = csv::ArtifactKind::field_1d;
    a.x = x;
    a.value = v;
    return a;
}

csv::Artifact artifact_vec(const std::vector<double>& v) {
    csv::Artifact a;
    a.kind = csv::ArtifactKind::vector;
    a.value = v;
    return a;
}

}  // namespace

TEST_CASE("a candidate equal to the oracle grades to zero") {
    const auto& sod = problems::find_problem("sod");
    const grade::Reference& ref = grade::reference_for("sod");
    std::map<std::string, csv::Artifact> artifacts;
    for (const char* q : {"rho", "u", "p"}) {
        const pde::Field1D& f = ref.fields_1d.at(q);
        artifacts[q] = artifact_1d(f.grid.xs, f.values);
    }
    grade::GradeResult g = grade::grade_artifacts(sod, artifacts);
    CHECK(g.aggregate <= 1e-12);
    CHECK(g.below_threshold);
}

TEST_CASE("a uniform shift of one percent of the rms grades to about 0.01") {
    const auto& sod = problems::find_problem("sod");
    const grade::Reference& ref = grade::reference_for("sod");
    std::map<std::string, csv::Artifact> artifacts;
    for (const char* q : {"rho", "u", "p"}) {
        const pde::Field1D& f = ref.fields_1d.at(q);
        double rms = 0;
        for (double v : f.values) rms += v * v;
        rms = std::sqrt(rms / f.values.size());
        std::vector<double> shifted = f.values;
        for (double& v : shifted) v += 0.01 * rms;
        artifacts[q] = artifact_1d(f.grid.xs, shifted);
    }
    grade::GradeResult g = grade::grade_artifacts(sod, artifacts);
    for (const auto& [q, err] : g.per_quantity) CHECK(err == doctest::Approx(0.01).epsilon(1e-6));
    CHECK(g.aggregate == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("hllc output graded through the artifact path lands in the oracle band") {
    const auto& sod = problems::find_problem("sod");
    pde::SodSolution hllc = pde::solve_sod_hllc(400, 0.2);
    std::map<std::string, csv::Artifact> artifacts;
    artifacts["rho"] = artifact_1d(hllc.rho.grid.xs, hllc.rho.values);
    artifacts["u"] = artifact_1d(hllc.u.grid.xs, hllc.u.values);
    artifacts["p"] = artifact_1d(hllc.p.grid.xs, hllc.p.values);
    grade::GradeResult g = grade::grade_artifacts(sod, artifacts);
    CHECK(g.per_quantity.at("rho") <= 1.5e-1);
    CHECK(g.per_quantity.at("rho") > 1e-4);
}

TEST_CASE("hilbert grading is the worst-case L-infinity against ones") {
    const auto& hilbert = problems::find_problem("hilbert");
    std::map<std::string, csv::Artifact> artifacts;
    for (int n : {5, 10, 15, 20, 25}) {
        std::vector<double> x(n, 1.0);
        x[0] += n == 25 ? 5e-3 : 1e-4;
        artifacts["x" + std::to_string(n)] = artifact_vec(x);
    }
    grade::GradeResult g = grade::grade_artifacts(hilbert, artifacts);
    CHECK(g.per_quantity.at("x5") == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(g.aggregate == doctest::Approx(5e-3).epsilon(1e-12));
    CHECK(g.below_threshold);

    artifacts.erase("x15");
    grade::GradeResult missing = grade::grade_artifacts(hilbert, artifacts);
    CHECK(std::isinf(missing.aggregate));
    CHECK_FALSE(missing.below_threshold);

    artifacts["x15"] = artifact_vec(std::vector<double>(14, 1.0));  // wrong length
    grade::GradeResult short_vec = grade::grade_artifacts(hilbert, artifacts);
    CHECK(std::isinf(short_vec.aggregate));
}

TEST_CASE("keyhole grading recognizes the reference group up to scaling") {
    const auto& keyhole = problems::find_problem("keyhole");
    std::map<std::string, csv::Artifact> artifacts;
    artifacts["exponents"] = artifact_vec({1.0, -0.5, -1.5, -0.5, -1.0, -1.0, -1.0});
    CHECK(grade::grade_artifacts(keyhole, artifacts).aggregate == 0.0);

    artifacts["exponents"] = artifact_vec({2.0, -1.0, -3.0, -1.0, -2.0, -2.0, -2.0});
    CHECK(grade::grade_artifacts(keyhole, artifacts).aggregate == 0.0);

    artifacts["exponents"] = artifact_vec({1.0, -0.5, -1.5, -0.5, -1.0, -1.0, 0.0});
    CHECK(grade::grade_artifacts(keyhole, artifacts).aggregate == 1.0);

    artifacts["exponents"] = artifact_vec({0.123456, 1, 1, 1, 1, 1, 1});
    CHECK(grade::grade_artifacts(keyhole, artifacts).aggregate == 1.0);
}

TEST_CASE("2D regrid agrees with direct evaluation for a smooth field") {
    pde::Grid2D ref = pde::Grid2D::uniform(0.0, 1.0, 0.0, 1.0, 16, 16);
    ref.mask.assign(ref.nodes(), pde::NodeKind::interior);
    auto fn = [](double x, double y) { return 2.0 * x - 3.0 * y + 0.25; };

    csv::Artifact cand;
    cand.kind = csv::ArtifactKind::field_2d;
    for (int j = 0; j <= 23; ++j) {
        for (int i = 0; i <= 23; ++i) {
            double x = i / 23.0, y = j / 23.0;
            cand.x.push_back(x);
            cand.y.push_back(y);
            cand.value.push_back(fn(x, y));
        }
    }
    std::vector<double> out = grade::regrid_candidate_2d(cand, ref);
    for (int j = 0; j <= 16; ++j)
        for (int i = 0; i <= 16; ++i)
            CHECK(out[ref.idx(i, j)] ==
                  doctest::Approx(fn(ref.xs[i], ref.ys[j])).epsilon(1e-12));
}
