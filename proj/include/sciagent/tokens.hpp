#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "sciagent/error.hpp"

namespace sciagent::gateway {

// Tokenizer-free token estimate: ceil(chars / 4). Monotone in concatenation.
std::size_t estimate_tokens(std::string_view text);

struct TruncationPolicy {
    std::size_t prompt_budget = 4500;  // tokens
    std::size_t output_budget = 2000;  // tokens
    double head_fraction = 0.5;        // share of the budget kept from the head

    void validate() const;
};

// Keeps the head and tail of an over-budget runtime output, joined by a marker
// line stating how many characters were elided. Cuts fall on line boundaries
// except when a single line exceeds the budget on its own. The marker is paid
// for out of the budget, so the result always satisfies
// estimate_tokens(result) <= policy.output_budget and a second call is the
// identity.
std::string truncate_output(std::string_view run_output, const TruncationPolicy& policy);

}  // namespace sciagent::gateway
