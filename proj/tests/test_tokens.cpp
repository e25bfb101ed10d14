#include <doctest.h>

#include <random>

#include "sciagent/tokens.hpp"
#include "test_util.hpp"

using namespace sciagent::gateway;

TEST_CASE("token estimate is ceil(chars/4)") {
    CHECK(estimate_tokens("") == 0);
    CHECK(estimate_tokens(std::string(4000, 'a')) == 1000);
    CHECK(estimate_tokens("a") == 1);
    CHECK(estimate_tokens("abcd") == 1);
    CHECK(estimate_tokens("abcde") == 2);
}

TEST_CASE("token estimate is monotone under concatenation") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 200; ++i) {
        std::string a = testutil::random_text(rng, 300);
        std::string b = testutil::random_text(rng, 300);
        CHECK(estimate_tokens(a + b) >= estimate_tokens(a));
        CHECK(estimate_tokens(a + a) >= estimate_tokens(a));
    }
}

TEST_CASE("short output passes through untouched") {
    TruncationPolicy policy;
    policy.output_budget = 100;
    std::string text = "line one\nline two\n";
    CHECK(truncate_output(text, policy) == text);
}

TEST_CASE("long line-structured output keeps head and tail") {
    TruncationPolicy policy;
    policy.output_budget = 2000;
    policy.head_fraction = 0.5;

    std::string log;
    for (int i = 0; i < 100000; ++i) log += "iteration " + std::to_string(i) + " residual\n";

    std::string out = truncate_output(log, policy);
    CHECK(estimate_tokens(out) <= policy.output_budget);
    CHECK(out.find("characters elided") != std::string::npos);
    CHECK(out.compare(0, 21, "iteration 0 residual\n") == 0);
    std::string last = "iteration 99999 residual\n";
    CHECK(out.size() >= last.size());
    CHECK(out.compare(out.size() - last.size(), last.size(), last) == 0);
    // cuts at line boundaries: segments around the marker are whole lines
    std::size_t marker = out.find("\n[...");
    CHECK(out[marker] == '\n');
}

TEST_CASE("one enormous line is split at the budget boundary") {
    TruncationPolicy policy;
    policy.output_budget = 50;
    std::string line(100000, 'x');
    std::string out = truncate_output(line, policy);
    CHECK(estimate_tokens(out) <= policy.output_budget);
    CHECK(out.find("characters elided") != std::string::npos);
}

TEST_CASE("truncation is idempotent") {
    TruncationPolicy policy;
    policy.output_budget = 300;
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        std::string text = testutil::random_text(rng, 8000);
        std::string once = truncate_output(text, policy);
        CHECK(truncate_output(once, policy) == once);
        CHECK(estimate_tokens(once) <= policy.output_budget);
    }
}

TEST_CASE("policy validation") {
    TruncationPolicy bad;
    bad.head_fraction = 1.5;
    CHECK_THROWS_AS(truncate_output("x", bad), sciagent::Error);
    bad.head_fraction = 0.5;
    bad.output_budget = 0;
    CHECK_THROWS_AS(truncate_output("x", bad), sciagent::Error);
}
