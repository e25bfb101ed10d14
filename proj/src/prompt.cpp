#include "sciagent/prompt.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sciagent/tokens.hpp"

namespace sciagent::prompt {

std::string to_string(Role r) {
    switch (r) {
        case Role::consultant: return "consultant";
        case Role::programmer_initial: return "programmer_initial";
        case Role::reviewer: return "reviewer";
        case Role::programmer_revise: return "programmer_revise";
    }
    return "?";
}

namespace {

std::size_t count_occurrences(const std::string& body, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = body.find(needle); pos != std::string::npos;
         pos = body.find(needle, pos + needle.size()))
        ++n;
    return n;
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot read template file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RoleTemplate load_role(Role role, const std::filesystem::path& file,
                       std::initializer_list<const char*> slots) {
    RoleTemplate t{role, read_file(file)};
    for (const char* s : slots) {
        std::string marker = std::string("{") + s + "}";
        std::size_t n = count_occurrences(t.body, marker);
        if (n != 1)
            throw MissingPlaceholder(file.string() + ": placeholder " + marker + " occurs " +
                                     std::to_string(n) + " times, expected exactly once");
    }
    return t;
}

void require_content(const std::string& value, const char* what) {
    if (value.empty()) throw MissingContent(std::string("empty ") + what);
}

RenderedPrompt finish(Role role, std::string text) {
    RenderedPrompt r{role, std::move(text), 0};
    r.estimated_tokens = gateway::estimate_tokens(r.text);
    return r;
}

std::string quantity_list(const problems::ProblemSpec& p) {
    std::string q;
    for (const auto& name : p.grading.quantities) q += (q.empty() ? "" : ", ") + name;
    return q;
}

}  // namespace

std::string RoleTemplate::substitute(const std::map<std::string, std::string>& slots) const {
    std::string out = body;
    for (const auto& [name, value] : slots) {
        std::string marker = "{" + name + "}";
        std::size_t pos = out.find(marker);
        if (pos == std::string::npos)
            throw MissingPlaceholder("template for " + to_string(role) + " lacks " + marker);
        out.replace(pos, marker.size(), value);
    }
    return out;
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
    TemplateSet t;
    t.consultant = load_role(Role::consultant, dir / "consultant.txt", {"problem"});
    t.programmer_initial =
        load_role(Role::programmer_initial, dir / "programmer_initial.txt", {"problem", "expansion"});
    t.reviewer =
        load_role(Role::reviewer, dir / "reviewer.txt", {"problem", "expansion", "solution"});
    t.programmer_revise = load_role(Role::programmer_revise, dir / "programmer_revise.txt",
                                    {"problem", "solution", "feedback"});
    t.output_contract = read_file(dir / "output_contract.txt");
    if (count_occurrences(t.output_contract, "{quantities}") != 1)
        throw MissingPlaceholder("output_contract.txt: expected one {quantities} slot");
    return t;
}

std::filesystem::path default_template_dir() {
    if (const char* env = std::getenv("SCIAGENT_TEMPLATE_DIR"); env && *env) return env;
#ifdef SCIAGENT_TEMPLATE_DIR
    return SCIAGENT_TEMPLATE_DIR;
#else
    return "templates";
#endif
}

RenderedPrompt render_consultant(const TemplateSet& t, const problems::ProblemSpec& p) {
    require_content(p.description, "problem description");
    return finish(Role::consultant, t.consultant.substitute({{"problem", p.description}}));
}

RenderedPrompt render_programmer_initial(const TemplateSet& t, const problems::ProblemSpec& p,
                                         const std::string& expansion) {
    require_content(p.description, "problem description");
    require_content(expansion, "consultant expansion");
    std::string text = t.programmer_initial.substitute(
        {{"problem", p.description}, {"expansion", expansion}});
    std::string contract = t.output_contract;
    std::size_t pos = contract.find("{quantities}");
    contract.replace(pos, std::string("{quantities}").size(), quantity_list(p));
    text += "\n" + contract;
    return finish(Role::programmer_initial, std::move(text));
}

RenderedPrompt render_reviewer(const TemplateSet& t, const problems::ProblemSpec& p,
                               const std::string& expansion, const std::string& solution,
                               const std::string& run_output) {
    require_content(p.description, "problem description");
    require_content(expansion, "consultant expansion");
    if (!has_code_block(solution)) throw NoCodeBlock("reviewer input has no fenced code block");
    std::string combined = solution + "\n\nExecuting Results:\n" + run_output;
    return finish(Role::reviewer,
                  t.reviewer.substitute({{"problem", p.description},
                                         {"expansion", expansion},
                                         {"solution", combined}}));
}

RenderedPrompt render_programmer_revise(const TemplateSet& t, const problems::ProblemSpec& p,
                                        const std::string& prev_solution,
                                        const std::string& feedback) {
    require_content(p.description, "problem description");
    require_content(prev_solution, "previous solution");
    require_content(feedback, "reviewer feedback");
    std::string text = t.programmer_revise.substitute(
        {{"problem", p.description}, {"solution", prev_solution}, {"feedback", feedback}});
    std::string contract = t.output_contract;
    std::size_t pos = contract.find("{quantities}");
    contract.replace(pos, std::string("{quantities}").size(), quantity_list(p));
    text += "\n" + contract;
    return finish(Role::programmer_revise, std::move(text));
}

namespace {

struct FenceScan {
    std::vector<std::pair<std::string, std::string>> blocks;  // (label, contents)
};

// Splits the response into fenced blocks. A fence is a line whose first
// non-blank characters are ``` ; text after the backticks on the opening line
// is the label. An unterminated block runs to the end of the response.
FenceScan scan_fences(const std::string& text) {
    FenceScan scan;
    std::istringstream in(text);
    std::string line;
    bool in_block = false;
    std::string label;
    std::string body;
    while (std::getline(in, line)) {
        std::string stripped = line;
        std::size_t first = stripped.find_first_not_of(" \t\r");
        bool is_fence = first != std::string::npos && stripped.compare(first, 3, "```") == 0;
        if (!in_block && is_fence) {
            in_block = true;
            label = stripped.substr(first + 3);
            while (!label.empty() && (label.back() == '\r' || label.back() == ' ')) label.pop_back();
            body.clear();
        } else if (in_block && is_fence) {
            in_block = false;
            if (!body.empty()) body.pop_back();  // line-based fences: drop final '\n'
            scan.blocks.emplace_back(label, body);
        } else if (in_block) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            body += line;
            body += '\n';
        }
    }
    if (in_block) {
        if (!body.empty()) body.pop_back();
        scan.blocks.emplace_back(label, body);
    }
    return scan;
}

bool label_matches(const std::string& label, const std::string& tag) {
    if (label.empty()) return true;
    return label.compare(0, tag.size(), tag) == 0;  // tolerates "python:", "python3"
}

}  // namespace

bool has_code_block(const std::string& text) { return !scan_fences(text).blocks.empty(); }

ExtractedCode extract_code(const std::string& response, const std::string& fence_tag) {
    FenceScan scan = scan_fences(response);
    if (scan.blocks.empty()) throw NoCodeBlock("response contains no fenced code block");
    ExtractedCode out;
    out.block_count = static_cast<int>(scan.blocks.size());
    for (const auto& [label, body] : scan.blocks) {
        if (label_matches(label, fence_tag)) {
            out.label = label;
            out.code = body;
            return out;
        }
    }
    out.label = scan.blocks.front().first;
    out.code = scan.blocks.front().second;
    return out;
}

// Line-based fencing cannot distinguish a trailing newline; code without one
// round-trips exactly through extract_code.
std::string wrap_in_fence(const std::string& code, const std::string& label) {
    std::string out = "```" + label + "\n" + code;
    if (!code.empty() && code.back() != '\n') out += '\n';
    return out + "```\n";
}

}  // namespace sciagent::prompt
