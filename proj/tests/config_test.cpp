#include "hft/config.hpp"

#include <gtest/gtest.h>

#include "hft/error.hpp"

namespace hft {
namespace {

using nlohmann::json;

std::string error_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    return e.what();
  }
  ADD_FAILURE() << "expected InvalidConfig";
  return {};
}

TEST(RunConfig, ReferenceDefaults) {
  const RunConfig c = run_config_from_json(json::object());
  EXPECT_EQ(c.train_batch_size, 64u);
  EXPECT_EQ(c.eval_batch_size, 128u);
  EXPECT_EQ(c.epochs, 30u);
  EXPECT_DOUBLE_EQ(c.learning_rate, 2e-5);
  EXPECT_DOUBLE_EQ(c.warmup, 0.1);
  EXPECT_EQ(c.schedule.alpha_at(0), 4.0);
  EXPECT_EQ(c.schedule.alpha_at(10), 1.0);
  EXPECT_EQ(c.schedule.alpha_at(20), 0.5);
  EXPECT_TRUE(c.new_tokens && c.heated_loss && c.fusion && c.adv.enabled);
  EXPECT_DOUBLE_EQ(c.adv.epsilon, 0.5);
  EXPECT_EQ(c.added_tokens.size(), 6u);
  EXPECT_EQ(c.fusion_head.hidden, 16u);
  EXPECT_EQ(c.rounds, 2u);
}

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c;
  c.seed = 9;
  c.adv.epsilon = 0.1;
  c.model.hidden_dim = 32;
  const RunConfig back = run_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(RunConfig, UnknownKeyIsNamed) {
  EXPECT_NE(error_message([] { run_config_from_json(json{{"adv", {{"epsilonn", 1}}}}); }).find("adv.epsilonn"),
            std::string::npos);
  EXPECT_NE(error_message([] { run_config_from_json(json{{"learning_rte", 1}}); }).find("learning_rte"),
            std::string::npos);
}

TEST(RunConfig, InvalidValues) {
  EXPECT_NE(error_message([] { run_config_from_json(json{{"epochs", 0}}); }).find("epochs"), std::string::npos);
  EXPECT_NE(error_message([] { run_config_from_json(json{{"epochs", "many"}}); }).find("epochs"), std::string::npos);
  error_message([] { run_config_from_json(json{{"model", {{"num_heads", 3}}}}); });
  error_message([] { run_config_from_json(json{{"schedule", json::array({json::array({1, 2.0})})}}); });
}

TEST(Overrides, DottedKeys) {
  json doc = json::object();
  apply_override(doc, "adv.epsilon=0.1");
  apply_override(doc, "fusion_head.mode=logits+pooled");
  apply_override(doc, "schedule=[[0,2.0]]");
  apply_override(doc, "heated_loss=false");
  const RunConfig c = run_config_from_json(doc);
  EXPECT_DOUBLE_EQ(c.adv.epsilon, 0.1);
  EXPECT_EQ(c.fusion_head.mode, FusionMode::LogitsAndPooled);
  EXPECT_EQ(c.schedule.alpha_at(50), 2.0);
  EXPECT_FALSE(c.heated_loss);
}

TEST(Overrides, RejectsUnknownAndMalformed) {
  json doc = json::object();
  EXPECT_NE(error_message([&] { apply_override(doc, "adv.eps=0.1"); }).find("adv.eps"), std::string::npos);
  error_message([&] { apply_override(doc, "no_equals_sign"); });
}

TEST(Toml, SubsetParses) {
  const char* text = R"(# desk run
seed = 3
learning_rate = 1e-3   # inline comment
schedule = [
  [0, 4.0],
  [5, 1.0],
]
added_tokens = ['covid-19', "lockdown"]

[adv]
enabled = true
epsilon = 0.1

[model]
hidden_dim = 32
)";
  const RunConfig c = run_config_from_json(parse_config_text(text, true));
  EXPECT_EQ(c.seed, 3u);
  EXPECT_DOUBLE_EQ(c.learning_rate, 1e-3);
  EXPECT_EQ(c.schedule.alpha_at(7), 1.0);
  EXPECT_EQ(c.added_tokens, (std::vector<std::string>{"covid-19", "lockdown"}));
  EXPECT_DOUBLE_EQ(c.adv.epsilon, 0.1);
  EXPECT_EQ(c.model.hidden_dim, 32u);
}

TEST(Toml, BadLineReportsLineNumber) {
  EXPECT_NE(error_message([] { parse_config_text("seed = 1\nnonsense\n", true); }).find("line 2"), std::string::npos);
}

}  // namespace
}  // namespace hft
