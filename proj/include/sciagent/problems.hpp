#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sciagent/error.hpp"

namespace sciagent::problems {

enum class Family { pde, linalg, dimensional };
std::string to_string(Family f);

// How a candidate solution is scored: which reference solver supplies ground
// truth, which artifact quantities must be produced, the solving-success
// threshold, and how per-quantity errors are combined.
struct GradingRecipe {
    std::string oracle_id;
    std::vector<std::string> quantities;
    double threshold = 0;
    enum class Aggregate { mean, max } aggregate = Aggregate::mean;
};

struct ProblemSpec {
    std::string id;
    Family family = Family::pde;
    std::string description;  // benchmark task statement handed to the agent
    GradingRecipe grading;
    std::vector<std::filesystem::path> attachments;

    void validate() const;  // throws Error on violations
};

const std::vector<ProblemSpec>& builtin_catalog();
const ProblemSpec& find_problem(const std::string& id);
std::vector<std::string> problem_ids();

// External catalog: JSON array of problem objects
// {id, family, description, grading:{oracle, quantities, threshold, aggregate},
//  attachments:[paths]}.
std::vector<ProblemSpec> load_catalog_json(const std::filesystem::path& file);

}  // namespace sciagent::problems
