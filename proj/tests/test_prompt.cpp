#include <doctest.h>

#include <random>

#include "sciagent/prompt.hpp"
#include "sciagent/tokens.hpp"
#include "test_util.hpp"

using namespace sciagent;
using namespace sciagent::prompt;

namespace {

const TemplateSet& templates() {
    static TemplateSet t = TemplateSet::load(default_template_dir());
    return t;
}

problems::ProblemSpec tiny_problem() {
    problems::ProblemSpec p;
    p.id = "tiny";
    p.family = problems::Family::pde;
    p.description = "Solve the toy equation.";
    p.grading = {"tiny", {"u"}, 0.1, problems::GradingRecipe::Aggregate::mean};
    return p;
}

}  // namespace

TEST_CASE("templates render byte-identically with empty slots (golden files)") {
    const TemplateSet& t = templates();
    struct Row {
        const RoleTemplate* tpl;
        const char* golden;
        std::map<std::string, std::string> slots;
    };
    std::map<std::string, std::string> one{{"problem", ""}};
    const std::vector<Row> rows = {
        {&t.consultant, "consultant.golden.txt", {{"problem", ""}}},
        {&t.programmer_initial, "programmer_initial.golden.txt", {{"problem", ""}, {"expansion", ""}}},
        {&t.reviewer, "reviewer.golden.txt", {{"problem", ""}, {"expansion", ""}, {"solution", ""}}},
        {&t.programmer_revise,
         "programmer_revise.golden.txt",
         {{"problem", ""}, {"solution", ""}, {"feedback", ""}}},
    };
    for (const auto& row : rows) {
        std::string got = row.tpl->substitute(row.slots);
        std::string want = testutil::read_file(std::filesystem::path(SCIAGENT_GOLDEN_DIR) / row.golden);
        REQUIRE(!want.empty());
        CHECK(got == want);
    }
}

TEST_CASE("consultant prompt carries the role framing and the problem") {
    const auto& hilbert = problems::find_problem("hilbert");
    RenderedPrompt p = render_consultant(templates(), hilbert);
    CHECK(p.text.find("Expand the context of a scientific problem") != std::string::npos);
    CHECK(p.text.find("Implement various appropriate methods from scratch") != std::string::npos);
    CHECK(p.estimated_tokens == gateway::estimate_tokens(p.text));

    const auto& burgers = problems::find_problem("burgers");
    RenderedPrompt b = render_consultant(templates(), burgers);
    CHECK(b.text.find("The PDE of 1-D Burgers equation") != std::string::npos);
}

TEST_CASE("consultant rejects an empty problem description") {
    problems::ProblemSpec p = tiny_problem();
    p.description = "";
    CHECK_THROWS_AS(render_consultant(templates(), p), MissingContent);
}

TEST_CASE("programmer initial combines problem, expansion and output contract") {
    auto p = tiny_problem();
    RenderedPrompt r = render_programmer_initial(templates(), p, "plan A: finite differences");
    CHECK(r.text.find("[Consultant's expansion]") != std::string::npos);
    CHECK(r.text.find("plan A: finite differences") != std::string::npos);
    CHECK(r.text.find("select an appropriate solving algorithm") != std::string::npos);
    CHECK(r.text.find("solution_<name>.csv") != std::string::npos);
    CHECK(r.text.find("Requested quantities: u") != std::string::npos);
    CHECK(r.estimated_tokens == gateway::estimate_tokens(r.text));
    CHECK_THROWS_AS(render_programmer_initial(templates(), p, ""), MissingContent);
}

TEST_CASE("reviewer prompt carries solution plus run output and the feedback checklist") {
    auto p = tiny_problem();
    std::string solution = wrap_in_fence("print(42)");
    RenderedPrompt r = render_reviewer(templates(), p, "context", solution, "42\n");
    CHECK(r.text.find("Review the answer provided by the programmer") != std::string::npos);
    CHECK(r.text.find("Assist the programmer in checking and refining runtime errors") !=
          std::string::npos);
    CHECK(r.text.find("[Programmer's solution]") != std::string::npos);
    CHECK(r.text.find("print(42)") != std::string::npos);
    CHECK(r.text.find("Executing Results:") != std::string::npos);

    CHECK_THROWS_AS(render_reviewer(templates(), p, "context", "no fences here", "out"),
                    NoCodeBlock);
}

TEST_CASE("reviewer prompt stays within the configured ceiling for huge outputs") {
    auto p = tiny_problem();
    gateway::TruncationPolicy policy;
    policy.output_budget = 2000;
    std::string huge(1000000, 'x');
    for (std::size_t i = 400; i < huge.size(); i += 800) huge[i] = '\n';
    std::string truncated = gateway::truncate_output(huge, policy);

    std::string solution = wrap_in_fence("pass");
    RenderedPrompt base = render_reviewer(templates(), p, "ctx", solution, "");
    RenderedPrompt full = render_reviewer(templates(), p, "ctx", solution, truncated);
    // ceiling: the fixed parts plus the truncated-output budget
    CHECK(full.estimated_tokens <= base.estimated_tokens + policy.output_budget + 1);
}

TEST_CASE("revise prompt names the feedback slots and optimization requirement") {
    auto p = tiny_problem();
    RenderedPrompt r =
        render_programmer_revise(templates(), p, wrap_in_fence("pass"), "tighten the loop");
    CHECK(r.text.find("[Reviewer's Feedback]") != std::string::npos);
    CHECK(r.text.find("tighten the loop") != std::string::npos);
    CHECK(r.text.find("Explain the specific parts of the code that have been optimized") !=
          std::string::npos);
    CHECK(r.text.find("fully incorporating feedback from the reviewer model") != std::string::npos);
    CHECK_THROWS_AS(render_programmer_revise(templates(), p, wrap_in_fence("pass"), ""),
                    MissingContent);
}

TEST_CASE("rendering is pure") {
    auto p = tiny_problem();
    RenderedPrompt a = render_programmer_initial(templates(), p, "zzz");
    RenderedPrompt b = render_programmer_initial(templates(), p, "zzz");
    CHECK(a.text == b.text);
}

TEST_CASE("code extraction basics") {
    ExtractedCode one = extract_code("before\n```python\nprint(1)\n```\nafter");
    CHECK(one.code == "print(1)");
    CHECK(one.block_count == 1);

    CHECK_THROWS_AS(extract_code("prose only, no fences"), NoCodeBlock);

    ExtractedCode two = extract_code("```python\nfirst\n```\ntext\n```python\nsecond\n```");
    CHECK(two.code == "first");
    CHECK(two.block_count == 2);
}

TEST_CASE("code extraction handles label variants") {
    CHECK(extract_code("```python:\nx=1\n```").code == "x=1");
    CHECK(extract_code("```python3\nx=2\n```").code == "x=2");
    CHECK(extract_code("```\nx=3\n```").code == "x=3");
    // the first block whose label matches the tag wins over earlier foreign blocks
    ExtractedCode picked = extract_code("```json\n{}\n```\n```python\ncode\n```");
    CHECK(picked.code == "code");
    CHECK(picked.block_count == 2);
    // with no matching label anywhere, fall back to the first block
    ExtractedCode fallback = extract_code("```json\n{}\n```");
    CHECK(fallback.code == "{}");
}

TEST_CASE("unterminated fence runs to the end of the response") {
    ExtractedCode c = extract_code("```python\nline1\nline2");
    CHECK(c.code == "line1\nline2");
}

TEST_CASE("extraction round-trips wrapped code") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 200; ++rep) {
        std::string code = testutil::random_text(rng, 400);
        while (!code.empty() && code.back() == '\n') code.pop_back();
        if (code.find("```") != std::string::npos) continue;
        CHECK(extract_code(wrap_in_fence(code)).code == code);
    }
}
