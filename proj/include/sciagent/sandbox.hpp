#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sciagent/error.hpp"
#include "sciagent/metrics.hpp"

namespace sciagent::sandbox {

struct ExecutionLimits {
    double wall_timeout_s = 300.0;
    std::size_t max_output_bytes = 1 << 20;  // per stream
    std::filesystem::path workspace;
    std::string interpreter_cmd = "python3 {file}";  // whitespace-split argv template
    std::string code_filename = "main.py";
    std::vector<std::string> env_allowlist = {"PATH", "HOME", "LANG", "LC_ALL", "TMPDIR"};
    std::vector<std::filesystem::path> stage_files;  // copied into the workspace before the run

    void validate() const;
};

enum class ExecStatus { ok, nonzero_exit, timeout, spawn_failure };
std::string to_string(ExecStatus s);

struct ExecutionResult {
    ExecStatus status = ExecStatus::spawn_failure;
    int exit_code = -1;
    std::string stdout_text;
    std::string stderr_text;
    std::map<std::string, std::filesystem::path> artifacts;  // quantity name -> solution csv
    double wall_time_s = 0;
};

// Writes the code into the workspace, runs the interpreter there with a
// sanitized environment, captures both streams (capped with a marker), kills
// the process group at the wall timeout, then collects solution_*.csv
// artifacts. A missing interpreter yields status spawn_failure, which is
// infrastructure, not a defect in the executed code.
ExecutionResult execute(const std::string& code, const ExecutionLimits& limits);

struct ParsedArtifacts {
    std::map<std::string, std::vector<double>> values;  // flattened per quantity
    std::set<std::string> unparsable;
};

ParsedArtifacts parse_artifacts(const ExecutionResult& result);

// bug: run failed or a required artifact is missing/unparsable;
// nan: a required artifact carries a NaN or infinite value;
// success: otherwise.
metrics::ExecutionClass classify_execution(const ExecutionResult& result,
                                           const ParsedArtifacts& parsed,
                                           const std::vector<std::string>& required);

}  // namespace sciagent::sandbox
