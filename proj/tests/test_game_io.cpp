#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "sdg/game_io.hpp"
#include "sdg/instances.hpp"

using namespace sdg;

namespace {

std::vector<std::pair<std::string, AnyGame>> builtins() {
  return {
      {"g1", build_g1()},
      {"g1-tilde", build_g1_tilde()},
      {"half-minus-0", build_half(Side::kMinus, 0.0)},
      {"half-plus-0", build_half(Side::kPlus, 0.0)},
      {"tilde-half-minus-0.05", build_tilde_half(Side::kMinus, 0.05)},
      {"tilde-half-plus-0.05", build_tilde_half(Side::kPlus, 0.05)},
      {"perfect-test", build_perfect_test()},
  };
}

ErrorCode code_of(const std::string& text) {
  try {
    parse_game(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "parse succeeded";
  return ErrorCode::kParseError;
}

}  // namespace

TEST(GameIo, RoundTripsBuiltins) {
  for (const auto& [name, game] : builtins()) {
    const std::string text = to_json(game, name).dump(2);
    EXPECT_EQ(parse_game(text), game) << name;
  }
}

TEST(GameIo, GoldenFilesMatchBuiltins) {
  for (const auto& [name, game] : builtins()) {
    const std::string path = std::string(SDG_DATA_DIR) + "/games/" + name + ".json";
    EXPECT_EQ(load_game(path), game) << path;
  }
}

TEST(GameIo, MalformedInputIsAParseError) {
  EXPECT_EQ(code_of("{ not json"), ErrorCode::kParseError);
  EXPECT_EQ(code_of("[1, 2]"), ErrorCode::kParseError);

  Json doc = to_json(build_g1());
  doc.erase("states");
  EXPECT_EQ(code_of(doc.dump()), ErrorCode::kParseError);

  Json extra = to_json(build_g1());
  extra["colour"] = "blue";
  EXPECT_EQ(code_of(extra.dump()), ErrorCode::kParseError);

  Json typo = to_json(build_perfect_test());
  typo["payoff"]["a"]["a"]["w9"] = 1.0;
  EXPECT_EQ(code_of(typo.dump()), ErrorCode::kParseError);
}

TEST(GameIo, InvalidGameParsesButFailsValidation) {
  Json doc = to_json(kernel_to_transition(build_g1(), 1.0));
  // Break one transition row so it sums to 1.5.
  auto& row = doc["dynamics"]["entries"].begin().value().begin().value().begin().value();
  row[row.begin().key()] = row.begin().value().get<double>() + 0.5;
  EXPECT_EQ(code_of(doc.dump()), ErrorCode::kInvalidGame);
}

TEST(GameIo, MissingFile) { EXPECT_THROW(load_game("/nonexistent/game.json"), Error); }
