#include "sciagent/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace sciagent::pipeline {

using nlohmann::json;

Pipeline::Pipeline(const prompt::TemplateSet& templates, gateway::Gateway& gw, PipelineOptions opt)
    : templates_(templates), gw_(gw), opt_(std::move(opt)) {
    if (opt_.reviews < 0) throw Error("pipeline: reviews must be >= 0");
    opt_.roles.validate();
}

namespace {

std::string combined_output(const sandbox::ExecutionResult& exec) {
    std::string out = exec.stdout_text;
    if (!exec.stderr_text.empty()) {
        if (!out.empty() && out.back() != '\n') out += '\n';
        out += "[stderr]\n";
        out += exec.stderr_text;
    }
    if (out.empty()) out = "(no output)";
    return out;
}

}  // namespace

StageRecord Pipeline::finish_stage(const problems::ProblemSpec& problem, StageRecord stage,
                                   int sample_index) {
    const std::string& response = stage.exchanges.back().response;
    try {
        prompt::ExtractedCode ec = prompt::extract_code(response);
        stage.code = ec.code;
        stage.code_blocks = ec.block_count;
        stage.extraction_ok = true;
    } catch (const prompt::NoCodeBlock&) {
        stage.extraction_ok = false;
        stage.code.clear();
    }

    if (stage.extraction_ok) {
        sandbox::ExecutionLimits limits = opt_.limits;
        limits.workspace = opt_.limits.workspace / problem.id /
                           ("sample" + std::to_string(sample_index)) / stage.stage;
        for (const auto& a : problem.attachments) limits.stage_files.push_back(a);
        stage.exec = sandbox::execute(stage.code, limits);
    } else {
        stage.exec = {};
        stage.exec.status = sandbox::ExecStatus::nonzero_exit;
        stage.exec.exit_code = -1;
        stage.exec.stderr_text = "response contained no fenced code block";
    }

    sandbox::ParsedArtifacts parsed = sandbox::parse_artifacts(stage.exec);
    stage.classification =
        sandbox::classify_execution(stage.exec, parsed, problem.grading.quantities);

    if (opt_.grade && stage.classification == metrics::ExecutionClass::success) {
        std::map<std::string, csv::Artifact> artifacts;
        for (const auto& [name, path] : stage.exec.artifacts) {
            try {
                artifacts[name] = csv::read_artifact(path);
            } catch (const Error&) {
                // unparsable extras are ignored; required ones already failed classification
            }
        }
        stage.grade_result = grade::grade_artifacts(problem, artifacts);
    }
    return stage;
}

RunRecord Pipeline::run(const problems::ProblemSpec& problem, int sample_index) {
    problem.validate();
    RunRecord rec;
    rec.problem_id = problem.id;
    rec.sample_index = sample_index;

    auto ask = [&](prompt::Role role, const prompt::RenderedPrompt& rp, StageRecord& stage) {
        gateway::CompletionRequest req{rp.text, opt_.roles.for_role(role), role};
        gateway::CompletionResponse resp = gw_.complete(req);
        stage.exchanges.push_back(
            {prompt::to_string(role), rp.text, resp.text, rp.estimated_tokens, resp.retry_count});
        return resp.text;
    };

    try {
        StageRecord stage0;
        stage0.stage = "answer0";
        std::string expansion =
            ask(prompt::Role::consultant, prompt::render_consultant(templates_, problem), stage0);
        ask(prompt::Role::programmer_initial,
            prompt::render_programmer_initial(templates_, problem, expansion), stage0);
        rec.stages.push_back(finish_stage(problem, std::move(stage0), sample_index));

        for (int k = 1; k <= opt_.reviews; ++k) {
            const StageRecord& prev = rec.stages.back();
            std::string solution_text =
                prev.extraction_ok ? prompt::wrap_in_fence(prev.code)
                                   : prompt::wrap_in_fence(prev.exchanges.back().response, "text");
            std::string truncated =
                gateway::truncate_output(combined_output(prev.exec), gw_.policy());

            StageRecord stage;
            stage.stage = "review" + std::to_string(k);
            std::string feedback =
                ask(prompt::Role::reviewer,
                    prompt::render_reviewer(templates_, problem, expansion, solution_text,
                                            truncated),
                    stage);
            std::string prev_slot = solution_text + "\n\nExecuting Results:\n" + truncated;
            ask(prompt::Role::programmer_revise,
                prompt::render_programmer_revise(templates_, problem, prev_slot, feedback), stage);
            rec.stages.push_back(finish_stage(problem, std::move(stage), sample_index));
        }
    } catch (const Error& e) {
        rec.error = e.what();
    }
    return rec;
}

namespace {

json stage_json(const RunRecord& rec, const StageRecord& stage) {
    json exchanges = json::array();
    for (const auto& e : stage.exchanges) {
        exchanges.push_back(json{{"role", e.role},
                                 {"prompt", e.prompt},
                                 {"response", e.response},
                                 {"prompt_tokens", e.prompt_tokens},
                                 {"retry_count", e.retry_count}});
    }
    json artifacts = json::array();
    for (const auto& [name, path] : stage.exec.artifacts) artifacts.push_back(name);
    json obj{{"problem", rec.problem_id},
             {"sample", rec.sample_index},
             {"stage", stage.stage},
             {"exchanges", exchanges},
             {"code", stage.code},
             {"code_blocks", stage.code_blocks},
             {"extraction_ok", stage.extraction_ok},
             {"execution",
              json{{"status", sandbox::to_string(stage.exec.status)},
                   {"exit_code", stage.exec.exit_code},
                   {"stdout", stage.exec.stdout_text},
                   {"stderr", stage.exec.stderr_text},
                   {"artifacts", artifacts}}},
             {"classification", metrics::to_string(stage.classification)}};
    if (stage.grade_result) {
        json per = json::object();
        for (const auto& [q, err] : stage.grade_result->per_quantity)
            per[q] = std::isfinite(err) ? json(err) : json(nullptr);
        obj["grade"] = json{{"per_quantity", per},
                            {"aggregate", std::isfinite(stage.grade_result->aggregate)
                                              ? json(stage.grade_result->aggregate)
                                              : json(nullptr)},
                            {"below_threshold", stage.grade_result->below_threshold}};
    }
    return obj;
}

}  // namespace

std::string stage_to_jsonl(const RunRecord& rec, const StageRecord& stage) {
    return stage_json(rec, stage).dump();
}

std::string run_to_jsonl(const RunRecord& rec) {
    std::string out;
    for (const auto& stage : rec.stages) {
        out += stage_to_jsonl(rec, stage);
        out += '\n';
    }
    if (!rec.error.empty()) {
        out += json{{"problem", rec.problem_id}, {"sample", rec.sample_index},
                    {"aborted", rec.error}}
                   .dump();
        out += '\n';
    }
    return out;
}

std::vector<StageAggregate> aggregate_stages(const problems::ProblemSpec& problem,
                                             const std::vector<RunRecord>& runs, int reviews) {
    std::vector<StageAggregate> out;
    const auto n = static_cast<double>(runs.size());
    for (int s = 0; s <= reviews; ++s) {
        StageAggregate agg;
        agg.stage = s == 0 ? "answer0" : "review" + std::to_string(s);
        std::size_t ok = 0;
        std::vector<double> errors;
        std::size_t nan_count = 0;
        for (const auto& run : runs) {
            if (s >= static_cast<int>(run.stages.size())) continue;
            const StageRecord& st = run.stages[s];
            if (st.classification == metrics::ExecutionClass::success) ++ok;
            if (st.grade_result) {
                double e = st.grade_result->aggregate;
                if (std::isnan(e)) {
                    ++nan_count;
                } else {
                    errors.push_back(e);
                }
            }
        }
        agg.execution_success_rate = runs.empty() ? 0.0 : static_cast<double>(ok) / n;
        std::size_t solved = 0;
        for (double e : errors)
            if (e < problem.grading.threshold) ++solved;
        agg.solving_success_rate = runs.empty() ? 0.0 : static_cast<double>(solved) / n;
        agg.n_graded = errors.size();
        agg.n_nan = nan_count;
        if (!errors.empty()) agg.errors = metrics::box_stats(errors);
        out.push_back(std::move(agg));
    }
    return out;
}

CampaignRecord run_campaign(const problems::ProblemSpec& problem, const prompt::TemplateSet& tpl,
                            const BackendFactory& backends, const CampaignOptions& opt) {
    if (opt.n_samples < 1) throw Error("campaign: n_samples must be >= 1");
    CampaignRecord rec;
    rec.problem_id = problem.id;
    rec.n_samples = opt.n_samples;
    rec.reviews = opt.pipeline.reviews;
    rec.programmer_model = opt.pipeline.roles.programmer.model;
    rec.runs.resize(opt.n_samples);

    std::atomic<int> next{0};
    auto worker = [&] {
        while (true) {
            int s = next.fetch_add(1);
            if (s >= opt.n_samples) break;
            try {
                gateway::Gateway gw(backends(s), opt.truncation, opt.retry);
                Pipeline pipe(tpl, gw, opt.pipeline);
                rec.runs[s] = pipe.run(problem, s);
            } catch (const Error& e) {
                rec.runs[s].problem_id = problem.id;
                rec.runs[s].sample_index = s;
                rec.runs[s].error = e.what();
            }
        }
    };

    int jobs = std::max(1, std::min(opt.jobs, opt.n_samples));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    rec.aggregates = aggregate_stages(problem, rec.runs, opt.pipeline.reviews);
    return rec;
}

std::string campaign_report_json(const CampaignRecord& c) {
    json stages = json::array();
    for (const auto& a : c.aggregates) {
        json s{{"stage", a.stage},
               {"execution_success_rate", a.execution_success_rate},
               {"solving_success_rate", a.solving_success_rate},
               {"n_graded", a.n_graded},
               {"n_nan", a.n_nan}};
        if (a.errors) {
            s["errors"] = json{{"mean", a.errors->mean},
                               {"q1", a.errors->q1},
                               {"median", a.errors->median},
                               {"q3", a.errors->q3},
                               {"whisker_low", a.errors->whisker_low},
                               {"whisker_high", a.errors->whisker_high},
                               {"n", a.errors->n}};
        }
        stages.push_back(std::move(s));
    }
    json report{{"problem", c.problem_id},
                {"programmer", c.programmer_model},
                {"n_samples", c.n_samples},
                {"reviews", c.reviews},
                {"metadata",
                 json{{"quantiles", "linear interpolation between order statistics"},
                      {"whiskers", "most extreme data within 1.5*IQR (Tukey)"},
                      {"regrid", "candidate resampled to reference grid, linear/bilinear"},
                      {"reference", "in-process fine-grid reference solvers"},
                      {"nan_handling", "NaN runs excluded from error stats, counted separately"}}},
                {"stages", stages}};
    return report.dump(2) + "\n";
}

std::string campaign_report_csv(const CampaignRecord& c) {
    std::ostringstream os;
    os << "problem,programmer,stage,execution_success_rate,solving_success_rate,"
          "mean_rel_l2,q1,median,q3,n_graded,n_nan\n";
    for (const auto& a : c.aggregates) {
        os << c.problem_id << ',' << c.programmer_model << ',' << a.stage << ','
           << a.execution_success_rate << ',' << a.solving_success_rate << ',';
        if (a.errors)
            os << a.errors->mean << ',' << a.errors->q1 << ',' << a.errors->median << ','
               << a.errors->q3;
        else
            os << ",,,";
        os << ',' << a.n_graded << ',' << a.n_nan << '\n';
    }
    return os.str();
}

void write_campaign_outputs(const CampaignRecord& c, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "transcripts");
    fs::create_directories(out_dir / "reports");
    for (const auto& run : c.runs) {
        fs::path file = out_dir / "transcripts" /
                        (c.problem_id + "_sample" + std::to_string(run.sample_index) + ".jsonl");
        std::ofstream out(file);
        if (!out) throw Error("cannot write " + file.string());
        out << run_to_jsonl(run);
    }
    {
        std::ofstream out(out_dir / "reports" / (c.problem_id + "_campaign.json"));
        out << campaign_report_json(c);
    }
    {
        std::ofstream out(out_dir / "reports" / (c.problem_id + "_campaign.csv"));
        out << campaign_report_csv(c);
    }
}

}  // namespace sciagent::pipeline
