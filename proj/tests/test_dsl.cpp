#include <gtest/gtest.h>

#include <random>
#include <string>

#include "finqa/dsl.hpp"
#include "support/oracles.hpp"

using namespace finqa;
using finqa::ref::Rng;

namespace {

Errc parse_error(std::string_view text) {
  try {
    parse_program(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a parse error for: " << text;
  return Errc::InvalidArgument;
}

}  // namespace

TEST(ParseProgram, SingleStep) {
  Program p = parse_program("add(1,2)");
  ASSERT_EQ(p.steps.size(), 1u);
  EXPECT_EQ(p.steps[0].op, OperationKind::Add);
  EXPECT_EQ(std::get<NumberLiteral>(p.steps[0].args[0]).value, 1.0);
  EXPECT_EQ(std::get<NumberLiteral>(p.steps[0].args[1]).raw, "2");
}

TEST(ParseProgram, SymbolicThreeStepExample) {
  Program p = parse_program("add(k4,k3), add(k1,k2), subtract(#1, #0)");
  ASSERT_EQ(p.steps.size(), 3u);
  EXPECT_EQ(std::get<RowRef>(p.steps[0].args[0]).name, "k4");
  EXPECT_EQ(p.steps[2].op, OperationKind::Subtract);
  EXPECT_EQ(std::get<StepRef>(p.steps[2].args[0]).index, 1u);
  EXPECT_EQ(std::get<StepRef>(p.steps[2].args[1]).index, 0u);
}

TEST(ParseProgram, ForwardStepRefRejected) {
  EXPECT_EQ(parse_error("add(1,2), multiply(#5, 2)"), Errc::ForwardStepRef);
  EXPECT_EQ(parse_error("add(#0, 1)"), Errc::ForwardStepRef);
  EXPECT_EQ(parse_error("add(1,2), add(#1, 1)"), Errc::ForwardStepRef);
  EXPECT_EQ(parse_error("add(1,2), add(#99999999999999999999999, 1)"), Errc::ForwardStepRef);
}

TEST(ParseProgram, ErrorsAreTyped) {
  EXPECT_EQ(parse_error("sum(1,2)"), Errc::UnknownOperation);
  EXPECT_EQ(parse_error("Add(1,2)"), Errc::UnknownOperation);
  EXPECT_EQ(parse_error("add(1"), Errc::MalformedSyntax);
  EXPECT_EQ(parse_error("add 1,2)"), Errc::MalformedSyntax);
  EXPECT_EQ(parse_error("add(1,2) add(3,4)"), Errc::MalformedSyntax);
  EXPECT_EQ(parse_error("add(1,2),"), Errc::MalformedSyntax);
  EXPECT_EQ(parse_error("add(1,)"), Errc::MalformedSyntax);
  EXPECT_EQ(parse_error("   "), Errc::MalformedSyntax);
  EXPECT_EQ(parse_error("add(1,2,3)"), Errc::ArityViolation);
  EXPECT_EQ(parse_error("add(1)"), Errc::ArityViolation);
  EXPECT_EQ(parse_error("add(1, none)"), Errc::ArityViolation);
  EXPECT_EQ(parse_error("table-sum(revenue, 2)"), Errc::ArityViolation);
  EXPECT_EQ(parse_error("table-sum(none, none)"), Errc::ArityViolation);
  EXPECT_EQ(parse_error("add(#x, 1)"), Errc::MalformedSyntax);
  EXPECT_EQ(parse_error("add(const_foo, 1)"), Errc::MalformedSyntax);
}

TEST(ParseProgram, WhitespaceAndAliases) {
  Program a = parse_program("  table_average( net revenue ,none )  ");
  EXPECT_EQ(a.steps[0].op, OperationKind::TableAverage);
  EXPECT_EQ(std::get<RowRef>(a.steps[0].args[0]).name, "net revenue");
  EXPECT_EQ(serialize_program(a), "table-average(net revenue, none)");
}

TEST(ParseProgram, ConstantsAndRowNamesWithParens) {
  Program p = parse_program("multiply(const_100, const_m1), table-max(net income ( loss ), none)");
  EXPECT_EQ(std::get<NamedConstant>(p.steps[0].args[0]).value, 100.0);
  EXPECT_EQ(std::get<NamedConstant>(p.steps[0].args[1]).value, -1.0);
  EXPECT_EQ(std::get<RowRef>(p.steps[1].args[0]).name, "net income ( loss )");
}

TEST(SerializeProgram, CanonicalSpacing) {
  EXPECT_EQ(serialize_program(parse_program("add(1,2)")), "add(1, 2)");
  EXPECT_EQ(serialize_program(parse_program("add(k4,k3), add(k1,k2), subtract(#1, #0)")),
            "add(k4, k3), add(k1, k2), subtract(#1, #0)");
  EXPECT_EQ(serialize_program(parse_program("add(1,2),greater(#0,5)")), "add(1, 2), greater(#0, 5)");
}

TEST(SerializeProgram, RoundTripProperty) {
  Rng rng(2024);
  for (int i = 0; i < 2000; ++i) {
    Program p = ref::random_program(rng, 5);
    const std::string text = serialize_program(p);
    Program back = parse_program(text);
    ASSERT_EQ(back, p) << text;
    for (std::size_t s = 0; s < back.steps.size(); ++s) {
      for (const auto& a : back.steps[s].args) {
        if (const auto* r = std::get_if<StepRef>(&a)) {
          ASSERT_LT(r->index, s);
        }
      }
    }
  }
}

TEST(ParseProgram, TotalOnArbitraryBytes) {
  Rng rng(7);
  const std::string alphabet = "add(subtract)#0123456789,. none const_m1k-%$ \t\n";
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    const std::size_t len = ref::pick(rng, 40);
    for (std::size_t k = 0; k < len; ++k) {
      s.push_back(ref::coin(rng, 0.3) ? static_cast<char>(ref::pick(rng, 256))
                                           : alphabet[ref::pick(rng, alphabet.size())]);
    }
    try {
      Program p = parse_program(s);
      EXPECT_FALSE(p.steps.empty());
    } catch (const Error&) {
    }
  }
}

TEST(FinancialNumber, StrippingRules) {
  EXPECT_DOUBLE_EQ(parse_financial_number("$ 5,735"), 5735.0);
  EXPECT_DOUBLE_EQ(parse_financial_number("(235)"), -235.0);
  EXPECT_DOUBLE_EQ(parse_financial_number("14.1%"), 14.1);
  EXPECT_DOUBLE_EQ(parse_financial_number("  -3.5 "), -3.5);
  EXPECT_DOUBLE_EQ(parse_financial_number("\xC2\xA3" "1,000"), 1000.0);
  EXPECT_DOUBLE_EQ(parse_financial_number("\xE2\x82\xAC" "2.5"), 2.5);
  EXPECT_DOUBLE_EQ(parse_financial_number("$ ( 1,234.5 )"), -1234.5);
}

TEST(FinancialNumber, RejectsNonNumerals) {
  for (const char* bad : {"", "   ", "n/a", "$", "-", "2015 sales", "1.2.3", "()", "12abc"}) {
    try {
      parse_financial_number(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::NotANumber) << bad;
    }
  }
}
