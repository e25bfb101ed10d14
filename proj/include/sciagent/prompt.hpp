#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "sciagent/error.hpp"
#include "sciagent/problems.hpp"

namespace sciagent::prompt {

struct MissingPlaceholder : Error {
    using Error::Error;
};
struct MissingContent : Error {
    using Error::Error;
};
struct NoCodeBlock : Error {
    using Error::Error;
};

enum class Role { consultant, programmer_initial, reviewer, programmer_revise };
std::string to_string(Role r);

// A role prompt body with {placeholder} slots. Each placeholder referenced by
// a renderer must occur exactly once in the body; load() enforces this.
struct RoleTemplate {
    Role role;
    std::string body;

    // Pure substitution; every named slot must occur exactly once.
    std::string substitute(const std::map<std::string, std::string>& slots) const;
};

struct TemplateSet {
    RoleTemplate consultant;
    RoleTemplate programmer_initial;
    RoleTemplate reviewer;
    RoleTemplate programmer_revise;
    std::string output_contract;  // addendum appended to programmer prompts, {quantities} slot

    static TemplateSet load(const std::filesystem::path& dir);
};

// Directory holding the golden template files: SCIAGENT_TEMPLATE_DIR env var
// if set, otherwise the in-repo templates/ directory recorded at build time.
std::filesystem::path default_template_dir();

struct RenderedPrompt {
    Role role;
    std::string text;
    std::size_t estimated_tokens = 0;
};

RenderedPrompt render_consultant(const TemplateSet& t, const problems::ProblemSpec& p);
RenderedPrompt render_programmer_initial(const TemplateSet& t, const problems::ProblemSpec& p,
                                         const std::string& expansion);
RenderedPrompt render_reviewer(const TemplateSet& t, const problems::ProblemSpec& p,
                               const std::string& expansion, const std::string& solution,
                               const std::string& run_output);
RenderedPrompt render_programmer_revise(const TemplateSet& t, const problems::ProblemSpec& p,
                                        const std::string& prev_solution,
                                        const std::string& feedback);

struct ExtractedCode {
    std::string code;
    int block_count = 0;       // total fenced blocks seen in the response
    std::string label;         // language label of the chosen block, if any
};

// Returns the first fenced block whose opening line carries the configured
// language tag (a missing label is tolerated); the label is stripped. Throws
// NoCodeBlock when the response has no fenced block at all.
ExtractedCode extract_code(const std::string& response, const std::string& fence_tag = "python");

std::string wrap_in_fence(const std::string& code, const std::string& label = "python");

// True when the solution text contains at least one fenced block.
bool has_code_block(const std::string& text);

}  // namespace sciagent::prompt
