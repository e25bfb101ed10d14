#include "sciagent/tokens.hpp"

#include <algorithm>
#include <vector>

namespace sciagent::gateway {

std::size_t estimate_tokens(std::string_view text) {
    return (text.size() + 3) / 4;
}

void TruncationPolicy::validate() const {
    if (prompt_budget == 0 || output_budget == 0) {
        throw Error("truncation policy: budgets must be positive");
    }
    if (!(head_fraction > 0.0 && head_fraction < 1.0)) {
        throw Error("truncation policy: head_fraction must lie in (0,1)");
    }
}

namespace {

// Longest prefix of whole lines (including their '\n') fitting max_chars.
// Falls back to a mid-line cut when the first line alone is too long.
std::size_t head_cut(std::string_view text, std::size_t max_chars) {
    std::size_t kept = 0;
    while (kept < max_chars) {
        std::size_t nl = text.find('\n', kept);
        std::size_t line_end = (nl == std::string_view::npos) ? text.size() : nl + 1;
        if (line_end > max_chars) break;
        kept = line_end;
        if (nl == std::string_view::npos) break;
    }
    if (kept == 0) kept = std::min(max_chars, text.size());
    return kept;
}

// Mirror of head_cut for the suffix: returns the start offset of the tail.
std::size_t tail_cut(std::string_view text, std::size_t max_chars) {
    if (max_chars == 0) return text.size();
    std::size_t start = text.size();
    while (start > 0 && text.size() - start < max_chars) {
        std::size_t nl = text.rfind('\n', start - 1);
        std::size_t line_start = (nl == std::string_view::npos) ? 0 : nl + 1;
        if (line_start == start) {  // consecutive newlines
            line_start = (start >= 1) ? start - 1 : 0;
        }
        if (text.size() - line_start > max_chars) break;
        start = line_start;
        if (nl == std::string_view::npos) break;
    }
    if (start == text.size()) start = text.size() - std::min(max_chars, text.size());
    return start;
}

}  // namespace

std::string truncate_output(std::string_view run_output, const TruncationPolicy& policy) {
    policy.validate();
    if (estimate_tokens(run_output) <= policy.output_budget) {
        return std::string(run_output);
    }

    // The marker is charged against the budget so truncation is idempotent.
    constexpr std::size_t marker_reserve_chars = 64;
    const std::size_t budget_chars = policy.output_budget * 4;
    const std::size_t content_chars =
        budget_chars > marker_reserve_chars ? budget_chars - marker_reserve_chars : 0;
    const auto head_chars =
        static_cast<std::size_t>(static_cast<double>(content_chars) * policy.head_fraction);
    const std::size_t tail_chars = content_chars - head_chars;

    const std::size_t head_end = head_cut(run_output, head_chars);
    std::size_t tail_start = tail_cut(run_output, tail_chars);
    if (tail_start < head_end) tail_start = head_end;

    const std::size_t elided = tail_start - head_end;
    if (elided == 0) return std::string(run_output);

    std::string marker = "\n[... " + std::to_string(elided) + " characters elided ...]\n";
    std::string out;
    out.reserve(head_end + marker.size() + (run_output.size() - tail_start));
    out.append(run_output.substr(0, head_end));
    out.append(marker);
    out.append(run_output.substr(tail_start));
    return out;
}

}  // namespace sciagent::gateway
