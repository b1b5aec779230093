#include <gtest/gtest.h>

#include <set>

#include "finqa/grammar.hpp"
#include "support/oracles.hpp"

using namespace finqa;

namespace {

VocabPartition demo_vocab() { return VocabPartition({"1", "2", "5829", "5735"}, {"const_100"}, {"net revenue"}); }

std::set<std::string> valid_set(const DecodeState& s, const VocabPartition& v) {
  TokenMask m = valid_mask(s, v);
  std::set<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (m[i]) out.insert(v.token(i));
  return out;
}

DecodeState feed(const VocabPartition& v, const std::vector<std::string>& tokens) {
  DecodeState s = initial_state();
  for (const auto& t : tokens) s = advance(s, v, t);
  return s;
}

std::vector<std::string> with_eof(std::vector<std::string> t) {
  t.emplace_back(kEofToken);
  return t;
}

}  // namespace

TEST(Grammar, InitialState) {
  auto v = demo_vocab();
  DecodeState s = initial_state();
  EXPECT_EQ(s.completed_steps, 0u);
  EXPECT_EQ(s.slot, Slot::ExpectOp);
  auto valid = valid_set(s, v);
  EXPECT_EQ(valid.size(), 10u);
  for (auto op : kAllOperations) EXPECT_TRUE(valid.count(opener_token(op)));
  EXPECT_FALSE(valid.count("EOF"));
  EXPECT_THROW(advance(s, v, ")"), Error);
}

TEST(Grammar, MemoryTokensFollowCompletedSteps) {
  auto v = demo_vocab();
  auto after_open = valid_set(feed(v, {"add("}), v);
  EXPECT_TRUE(after_open.count("1"));
  EXPECT_TRUE(after_open.count("const_100"));
  EXPECT_FALSE(after_open.count("#0"));
  EXPECT_FALSE(after_open.count("net revenue"));

  auto second = valid_set(feed(v, {"add(", "1", "2", ")", "subtract("}), v);
  EXPECT_TRUE(second.count("#0"));
  EXPECT_FALSE(second.count("#1"));
}

TEST(Grammar, TableOperationSlots) {
  auto v = demo_vocab();
  EXPECT_EQ(valid_set(feed(v, {"table-average("}), v), std::set<std::string>{"net revenue"});
  EXPECT_EQ(valid_set(feed(v, {"table-average(", "net revenue"}), v), std::set<std::string>{"none"});
  EXPECT_EQ(valid_set(feed(v, {"table-average(", "net revenue", "none"}), v), std::set<std::string>{")"});
}

TEST(Grammar, AdvanceTransitions) {
  auto v = demo_vocab();
  DecodeState s = advance(initial_state(), v, "add(");
  EXPECT_EQ(s.slot, Slot::ExpectArg1);
  EXPECT_EQ(s.op, OperationKind::Add);
  EXPECT_EQ(s.completed_steps, 0u);

  DecodeState t{1, Slot::ExpectArg1, OperationKind::Subtract, false};
  DecodeState u = advance(t, v, "#0");
  EXPECT_EQ(u.slot, Slot::ExpectArg2);
  EXPECT_EQ(u.completed_steps, 1u);

  try {
    advance(s, v, "#0");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidToken);
    EXPECT_NE(std::string(e.what()).find("ExpectArg1"), std::string::npos);
  }
}

TEST(Grammar, Accepts) {
  auto v = demo_vocab();
  EXPECT_TRUE(accepts(std::span<const std::string>(with_eof(tokenize_program("add(1,2)"))), v));
  EXPECT_FALSE(accepts(std::span<const std::string>(tokenize_program("add(1,2")), v));
  EXPECT_FALSE(accepts(std::span<const std::string>(tokenize_program("add(1,2)")), v));  // no EOF
  EXPECT_FALSE(accepts(std::span<const std::string>(std::vector<std::string>{"EOF"}), v));

  VocabPartition symbolic({}, {}, {"k1", "k2", "k3", "k4"});
  // rows are not valid arithmetic operands for the decoder
  EXPECT_FALSE(accepts(std::span<const std::string>(with_eof(tokenize_program("add(k4,k3), add(k1,k2), subtract(#1, #0)"))),
                       symbolic));
  VocabPartition numeric({"4", "3", "1", "2"}, {}, {});
  EXPECT_TRUE(accepts(std::span<const std::string>(with_eof(tokenize_program("add(4,3), add(1,2), subtract(#1, #0)"))), numeric));
}

TEST(Grammar, GreaterOnlyAsFinalStep) {
  auto v = demo_vocab();
  DecodeState s = feed(v, {"greater(", "1", "2", ")"});
  EXPECT_EQ(valid_set(s, v), std::set<std::string>{"EOF"});
}

TEST(Grammar, StepCapForcesEof) {
  VocabPartition v({"1"}, {}, {}, kMaxProgramSteps);
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < kMaxProgramSteps; ++i) {
    for (auto t : {"add(", "1", "1", ")"}) tokens.emplace_back(t);
  }
  DecodeState s = feed(v, tokens);
  EXPECT_EQ(s.completed_steps, kMaxProgramSteps);
  EXPECT_EQ(valid_set(s, v), std::set<std::string>{"EOF"});
}

TEST(Grammar, VocabularyValidation) {
  EXPECT_THROW(VocabPartition({"abc"}, {}, {}), Error);
  EXPECT_THROW(VocabPartition({}, {"const_x"}, {}), Error);
  EXPECT_THROW(VocabPartition({}, {}, {"none"}), Error);
  EXPECT_THROW(VocabPartition({}, {}, {"12"}), Error);
  EXPECT_THROW(VocabPartition({"1", "1"}, {}, {}), Error);
}

TEST(Grammar, OpenersWithoutFillableSlotsAreMasked) {
  VocabPartition no_rows({"1"}, {}, {});
  auto valid = valid_set(initial_state(), no_rows);
  EXPECT_FALSE(valid.count("table-sum("));
  EXPECT_TRUE(valid.count("add("));

  VocabPartition only_rows({}, {}, {"revenue"});
  auto first = valid_set(initial_state(), only_rows);
  EXPECT_FALSE(first.count("add("));
  EXPECT_TRUE(first.count("table-sum("));
  auto later = valid_set(feed(only_rows, {"table-sum(", "revenue", "none", ")"}), only_rows);
  EXPECT_TRUE(later.count("add("));  // #0 can now fill the slots
}

TEST(Grammar, LivenessOverReachableStates) {
  // Breadth-first search over the full reachable state space of a small vocabulary.
  VocabPartition v({"1"}, {"const_m1"}, {"rev"}, 4, {kAllOperations.begin(), kAllOperations.end()}, 4);
  std::vector<DecodeState> frontier{initial_state()};
  std::vector<DecodeState> seen;
  while (!frontier.empty()) {
    DecodeState s = frontier.back();
    frontier.pop_back();
    if (std::find(seen.begin(), seen.end(), s) != seen.end()) continue;
    seen.push_back(s);
    TokenMask m = valid_mask(s, v);
    ASSERT_GT(m.count(), 0u) << describe(s);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (m[i]) frontier.push_back(advance(s, v, i));
  }
  EXPECT_GT(seen.size(), 20u);
}

TEST(Grammar, MemoryGrowsByOnePerStep) {
  VocabPartition v({"1"}, {}, {});
  DecodeState s = initial_state();
  std::size_t previous = 0;
  for (std::size_t step = 0; step < 10; ++step) {
    s = advance(s, v, "multiply(");
    TokenMask m = valid_mask(s, v);
    std::size_t memory = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (m[i] && v.token_class(i) == TokenClass::Memory) ++memory;
    if (step > 0) {
      EXPECT_EQ(memory, previous + 1);
    }
    EXPECT_EQ(memory, step);
    previous = memory;
    for (auto t : {"1", "1", ")"}) s = advance(s, v, t);
  }
}

TEST(Grammar, TokenizeProgram) {
  EXPECT_EQ(tokenize_program("add(1, 2), table_sum(net revenue, none)"),
            (std::vector<std::string>{"add(", "1", "2", ")", "table-sum(", "net revenue", "none", ")"}));
  EXPECT_EQ(tokenize_program("subtract(#0,"), (std::vector<std::string>{"subtract(", "#0"}));
}

TEST(Grammar, DetokenizedAcceptanceMatchesParser) {
  auto v = demo_vocab();
  std::vector<std::string> tokens = {"add(", "5829", "5735", ")", "greater(", "#0", "1", ")"};
  EXPECT_EQ(ref::detokenize(tokens), "add(5829, 5735), greater(#0, 1)");
  EXPECT_NO_THROW(parse_program(ref::detokenize(tokens)));
  EXPECT_TRUE(accepts(std::span<const std::string>(with_eof(tokens)), v));
}
