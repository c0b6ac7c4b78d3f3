#include <doctest.h>

#include "fixtures.hpp"
#include "ravenx/errors.hpp"
#include "ravenx/generator.hpp"
#include "ravenx/harness.hpp"
#include "ravenx/uncertainty.hpp"

using namespace ravenx;

TEST_CASE("fixture prompts match byte for byte") {
  for (const char* name : fixtures::kNames) {
    CAPTURE(name);
    const auto p = fixtures::puzzle(name);
    CHECK(render_prompt(p, style_for(p)) == fixtures::expected_prompt(name));
  }
}

TEST_CASE("style selection") {
  const auto plain = fixtures::puzzle("iravenx_confounders_3x10");
  const auto prob = fixtures::puzzle("iravenx_probabilistic_3x10");
  CHECK(style_for(plain) == PromptStyle::Plain);
  CHECK(style_for(prob) == PromptStyle::Probabilistic);
  CHECK_THROWS_AS(render_prompt(plain, PromptStyle::Probabilistic), StyleMismatchError);
  CHECK_THROWS_AS(render_prompt(prob, PromptStyle::Plain), StyleMismatchError);
  CHECK(style_from_name(style_name(PromptStyle::Probabilistic)) == PromptStyle::Probabilistic);
  CHECK_THROWS_AS(style_from_name("fancy"), ConfigError);
}

TEST_CASE("render then parse recovers every index") {
  GenConfig cfg;
  cfg.grid_cols = 10;
  cfg.range_m = 100;
  const auto p = generate_puzzle(cfg, 0);
  const auto prompt = render_prompt(p, PromptStyle::Plain);
  for (int j = 0; j < 8; ++j) {
    const auto line = "Answer #" + std::to_string(j) + ": ";
    CHECK(prompt.find(line) != std::string::npos);
    const auto parsed = parse_answer("Reasoning...\nMy Answer: Answer #" + std::to_string(j));
    CHECK(parsed == ParsedAnswer{j, false});
  }
}

TEST_CASE("answer parsing") {
  CHECK(parse_answer("no idea") == ParsedAnswer{0, true});
  CHECK(parse_answer("") == ParsedAnswer{0, true});
  CHECK(parse_answer("My Answer: Answer #9") == ParsedAnswer{0, true});
  CHECK(parse_answer("Answer #4 looks good") == ParsedAnswer{0, true});
  CHECK(parse_answer("**My Answer:** Answer #6") == ParsedAnswer{6, false});
  CHECK(parse_answer("my answer:  answer # 2") == ParsedAnswer{2, false});
  CHECK(parse_answer("My Answer: Answer #1 ... wait. My Answer: Answer #5") ==
        ParsedAnswer{5, false});
}

TEST_CASE("probabilistic entries never print a negative zero") {
  GenConfig cfg;
  cfg.grid_cols = 10;
  cfg.range_m = 1000;
  UncertaintyConfig u;
  u.smoothing = {SmoothingKind::Gaussian, 0.3};
  const auto p = apply_uncertainty(generate_puzzle(cfg, 3), u);
  const auto text = render_prompt(p, PromptStyle::Probabilistic);
  CHECK(text.find("-0.00") == std::string::npos);
  CHECK(text.find("0.00::") != std::string::npos);
}
