#pragma once

#include <map>
#include <string>

#include "sciagent/csv.hpp"
#include "sciagent/pde/grid.hpp"
#include "sciagent/problems.hpp"

namespace sciagent::grade {

// Ground-truth fields for one benchmark problem, computed lazily by the
// matching reference solver at a fixed grading resolution and memoized for
// the life of the process.
struct Reference {
    std::map<std::string, pde::Field1D> fields_1d;
    std::map<std::string, pde::Field2D> fields_2d;
};

const Reference& reference_for(const std::string& oracle_id);

struct GradeResult {
    std::map<std::string, double> per_quantity;  // error per requested quantity
    double aggregate = 0;                        // recipe aggregate (mean or max)
    bool below_threshold = false;
};

// Scores parsed candidate artifacts against the problem's recipe:
//   pde          relative L2 against the oracle field after regridding,
//   linalg       L-infinity against the all-ones solution,
//   dimensional  0/1 on exact recovery of the reference dimensionless group.
// Missing or malformed quantities grade as +infinity; NaN values propagate.
GradeResult grade_artifacts(const problems::ProblemSpec& problem,
                            const std::map<std::string, csv::Artifact>& artifacts);

// Bilinear sample of a (possibly ragged) rectilinear candidate at reference
// nodes; exposed for tests.
std::vector<double> regrid_candidate_2d(const csv::Artifact& candidate,
                                        const pde::Grid2D& ref_grid);

}  // namespace sciagent::grade
