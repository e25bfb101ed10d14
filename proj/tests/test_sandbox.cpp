#include <doctest.h>

#include <cstdlib>

#include "sciagent/sandbox.hpp"
#include "test_util.hpp"

using namespace sciagent;
using namespace sciagent::sandbox;

namespace {

ExecutionLimits limits_in(const testutil::TempDir& tmp, const std::string& sub) {
    ExecutionLimits l;
    l.workspace = tmp.path() / sub;
    l.wall_timeout_s = 30.0;
    return l;
}

}  // namespace

TEST_CASE("hello world executes cleanly") {
    testutil::TempDir tmp("sb_hello");
    ExecutionResult r = execute("print('hello')\n", limits_in(tmp, "ws"));
    CHECK(r.status == ExecStatus::ok);
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("hello") != std::string::npos);
    CHECK(r.artifacts.empty());
}

TEST_CASE("stderr is captured separately and exit codes are kept") {
    testutil::TempDir tmp("sb_err");
    ExecutionResult r = execute("import sys\nsys.stderr.write('boom\\n')\nsys.exit(3)\n",
                                limits_in(tmp, "ws"));
    CHECK(r.status == ExecStatus::nonzero_exit);
    CHECK(r.exit_code == 3);
    CHECK(r.stderr_text.find("boom") != std::string::npos);
}

TEST_CASE("infinite loop is killed at the wall timeout") {
    testutil::TempDir tmp("sb_loop");
    ExecutionLimits l = limits_in(tmp, "ws");
    l.wall_timeout_s = 2.0;
    ExecutionResult r = execute("while True:\n    pass\n", l);
    CHECK(r.status == ExecStatus::timeout);
    CHECK(r.wall_time_s >= 2.0);
}

TEST_CASE("solution artifacts are collected by quantity name") {
    testutil::TempDir tmp("sb_art");
    std::string code =
        "with open('solution_u.csv','w') as f:\n"
        "    f.write('x,value\\n0,1.0\\n1,2.0\\n')\n"
        "with open('notes.txt','w') as f:\n"
        "    f.write('ignored')\n";
    ExecutionResult r = execute(code, limits_in(tmp, "ws"));
    CHECK(r.status == ExecStatus::ok);
    REQUIRE(r.artifacts.count("u") == 1);
    CHECK(r.artifacts.size() == 1);
    ParsedArtifacts parsed = parse_artifacts(r);
    REQUIRE(parsed.values.count("u") == 1);
    CHECK(parsed.values.at("u") == std::vector<double>{1.0, 2.0});
}

TEST_CASE("a missing interpreter is a spawn failure, not a code bug") {
    testutil::TempDir tmp("sb_spawn");
    ExecutionLimits l = limits_in(tmp, "ws");
    l.interpreter_cmd = "definitely-not-a-real-interpreter-xyz {file}";
    ExecutionResult r = execute("print(1)\n", l);
    CHECK(r.status == ExecStatus::spawn_failure);
    CHECK(r.stderr_text.find("cannot execute interpreter") != std::string::npos);
}

TEST_CASE("oversized output is capped with a marker") {
    testutil::TempDir tmp("sb_cap");
    ExecutionLimits l = limits_in(tmp, "ws");
    l.max_output_bytes = 10000;
    ExecutionResult r = execute("print('x' * 1000000)\n", l);
    CHECK(r.status == ExecStatus::ok);
    CHECK(r.stdout_text.size() < 1000000);
    CHECK(r.stdout_text.find("[output truncated at") != std::string::npos);
}

TEST_CASE("environment passes only the allowlist") {
    testutil::TempDir tmp("sb_env");
    setenv("SCIAGENT_TEST_SECRET", "leak-me", 1);
    ExecutionResult r = execute(
        "import os\nprint('SECRET=' + str(os.environ.get('SCIAGENT_TEST_SECRET')))\n",
        limits_in(tmp, "ws"));
    unsetenv("SCIAGENT_TEST_SECRET");
    CHECK(r.status == ExecStatus::ok);
    CHECK(r.stdout_text.find("SECRET=None") != std::string::npos);
}

TEST_CASE("staged attachments appear in the workspace") {
    testutil::TempDir tmp("sb_stage");
    testutil::write_file(tmp / "dataset.csv", "a,b\n1,2\n");
    ExecutionLimits l = limits_in(tmp, "ws");
    l.stage_files = {tmp / "dataset.csv"};
    ExecutionResult r = execute("print(open('dataset.csv').read())\n", l);
    CHECK(r.status == ExecStatus::ok);
    CHECK(r.stdout_text.find("a,b") != std::string::npos);
}

TEST_CASE("a dirty workspace is rejected") {
    testutil::TempDir tmp("sb_dirty");
    testutil::write_file(tmp / "ws" / "leftover.txt", "old");
    CHECK_THROWS_AS(execute("print(1)\n", limits_in(tmp, "ws")), Error);
}

TEST_CASE("concurrent executions in distinct workspaces stay isolated") {
    testutil::TempDir tmp("sb_iso");
    std::string code =
        "with open('solution_z.csv','w') as f:\n"
        "    f.write('index,value\\n0,1.0\\n')\n";
    ExecutionResult a = execute(code, limits_in(tmp, "ws_a"));
    ExecutionResult b = execute(code, limits_in(tmp, "ws_b"));
    CHECK(a.artifacts.at("z") != b.artifacts.at("z"));
    CHECK(std::filesystem::exists(a.artifacts.at("z")));
    CHECK(std::filesystem::exists(b.artifacts.at("z")));
}

TEST_CASE("classification: bug, nan, success partition") {
    testutil::TempDir tmp("sb_cls");
    const std::vector<std::string> required{"u"};

    ExecutionResult timeout_run;
    timeout_run.status = ExecStatus::timeout;
    CHECK(classify_execution(timeout_run, {}, required) == metrics::ExecutionClass::bug);

    ExecutionResult ok_missing;
    ok_missing.status = ExecStatus::ok;
    ok_missing.exit_code = 0;
    CHECK(classify_execution(ok_missing, {}, required) == metrics::ExecutionClass::bug);

    std::string nan_code =
        "with open('solution_u.csv','w') as f:\n"
        "    f.write('x,value\\n0,nan\\n')\n";
    ExecutionResult nan_run = execute(nan_code, limits_in(tmp, "ws_nan"));
    CHECK(classify_execution(nan_run, parse_artifacts(nan_run), required) ==
          metrics::ExecutionClass::nan_result);

    std::string good_code =
        "with open('solution_u.csv','w') as f:\n"
        "    f.write('x,value\\n0,0.5\\n')\n";
    ExecutionResult good_run = execute(good_code, limits_in(tmp, "ws_good"));
    CHECK(classify_execution(good_run, parse_artifacts(good_run), required) ==
          metrics::ExecutionClass::success);

    std::string bad_csv_code =
        "with open('solution_u.csv','w') as f:\n"
        "    f.write('oops this is not an artifact\\n')\n";
    ExecutionResult bad_run = execute(bad_csv_code, limits_in(tmp, "ws_bad"));
    CHECK(classify_execution(bad_run, parse_artifacts(bad_run), required) ==
          metrics::ExecutionClass::bug);

    // exactly one class for each case above
    for (const auto* r : {&timeout_run, &nan_run, &good_run}) {
        auto c = classify_execution(*r, parse_artifacts(*r), required);
        int hits = (c == metrics::ExecutionClass::bug) + (c == metrics::ExecutionClass::nan_result) +
                   (c == metrics::ExecutionClass::success);
        CHECK(hits == 1);
    }
}
