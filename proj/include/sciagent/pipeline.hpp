#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "sciagent/gateway.hpp"
#include "sciagent/grade.hpp"
#include "sciagent/metrics.hpp"
#include "sciagent/problems.hpp"
#include "sciagent/prompt.hpp"
#include "sciagent/sandbox.hpp"

namespace sciagent::pipeline {

struct Exchange {
    std::string role;
    std::string prompt;
    std::string response;
    std::size_t prompt_tokens = 0;
    int retry_count = 0;
};

struct StageRecord {
    std::string stage;  // "answer0", "review1", ...
    std::vector<Exchange> exchanges;
    std::string code;
    int code_blocks = 0;
    bool extraction_ok = false;
    sandbox::ExecutionResult exec;
    metrics::ExecutionClass classification = metrics::ExecutionClass::bug;
    std::optional<grade::GradeResult> grade_result;
};

struct RunRecord {
    std::string problem_id;
    int sample_index = 0;
    std::vector<StageRecord> stages;
    std::string error;  // set when the run aborted (gateway failure etc.)
};

struct PipelineOptions {
    int reviews = 2;
    gateway::RoleAssignment roles;
    sandbox::ExecutionLimits limits;  // workspace field is a root; stages run in subdirectories
    bool grade = true;
};

// One full problem run: consultant expansion, initial program, then
// review/revise rounds. Every stage is recorded even when it fails; a failed
// code extraction still reaches the reviewer with the raw response fenced as
// the solution. Gateway failures abort the run but preserve the partial
// record.
class Pipeline {
public:
    Pipeline(const prompt::TemplateSet& templates, gateway::Gateway& gw, PipelineOptions opt);

    RunRecord run(const problems::ProblemSpec& problem, int sample_index);

private:
    StageRecord finish_stage(const problems::ProblemSpec& problem, StageRecord stage,
                             int sample_index);

    const prompt::TemplateSet& templates_;
    gateway::Gateway& gw_;
    PipelineOptions opt_;
};

// Deterministic transcript line for one stage (no wall-clock data, no paths).
std::string stage_to_jsonl(const RunRecord& rec, const StageRecord& stage);
std::string run_to_jsonl(const RunRecord& rec);

struct StageAggregate {
    std::string stage;
    double execution_success_rate = 0;
    double solving_success_rate = 0;
    std::size_t n_graded = 0;
    std::size_t n_nan = 0;
    std::optional<metrics::BoxStats> errors;
};

struct CampaignRecord {
    std::string problem_id;
    int n_samples = 0;
    int reviews = 0;
    std::string programmer_model;
    std::vector<RunRecord> runs;
    std::vector<StageAggregate> aggregates;
};

using BackendFactory = std::function<std::shared_ptr<gateway::Backend>(int sample_index)>;

struct CampaignOptions {
    int n_samples = 1;
    int jobs = 1;
    gateway::TruncationPolicy truncation;
    gateway::RetryPolicy retry;
    PipelineOptions pipeline;
};

// n_samples independent runs (each with its own backend cursor and workspace
// tree), aggregated per stage. Individual run failures are recorded and the
// campaign continues.
CampaignRecord run_campaign(const problems::ProblemSpec& problem, const prompt::TemplateSet& tpl,
                            const BackendFactory& backends, const CampaignOptions& opt);

std::vector<StageAggregate> aggregate_stages(const problems::ProblemSpec& problem,
                                             const std::vector<RunRecord>& runs, int reviews);

std::string campaign_report_json(const CampaignRecord& c);
std::string campaign_report_csv(const CampaignRecord& c);

// transcripts/<problem>_sample<k>.jsonl + reports/<problem>_campaign.{json,csv}
void write_campaign_outputs(const CampaignRecord& c, const std::filesystem::path& out_dir);

}  // namespace sciagent::pipeline
