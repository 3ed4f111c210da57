#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace beq;
using namespace beqtest_support;

TEST(CheckBelievedEquivalence, EmptySetHoldsVacuously) {
  auto cat = partitions({{0, 1}});
  auto r = check_believed_equivalence({}, cat);
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.violations.empty());
}

TEST(CheckBelievedEquivalence, SameCellSameValueHolds) {
  auto cat = partitions({{0, 1}});
  std::vector<TestCase> cases{tc("a", {0.2}, 3), tc("b", {0.7}, 3)};
  EXPECT_TRUE(check_believed_equivalence(cases, cat).holds);
}

TEST(CheckBelievedEquivalence, SameCellDifferentValueIsOneViolation) {
  auto cat = partitions({{0, 1}});
  std::vector<TestCase> cases{tc("a", {0.2}, 3), tc("b", {0.7}, 4)};
  auto r = check_believed_equivalence(cases, cat);
  EXPECT_FALSE(r.holds);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].conflicting_witness, "a");
  EXPECT_EQ(r.violations[0].offender, "b");
  EXPECT_EQ(r.violations[0].existing_value, EvalValue(3));
  EXPECT_EQ(r.violations[0].new_value, EvalValue(4));
  EXPECT_FALSE(pairwise_holds(cases, cat));
}

TEST(CheckBelievedEquivalence, OneViolationPerDistinctValueOrderedByOffender) {
  auto cat = partitions({{0, 0.5, 1}});
  std::vector<TestCase> cases{tc("z", {0.1}, 1), tc("y", {0.2}, 2), tc("x", {0.3}, 2), tc("w", {0.4}, 3),
                              tc("q", {0.9}, 5), tc("p", {0.8}, 6)};
  auto r = check_believed_equivalence(cases, cat);
  ASSERT_EQ(r.violations.size(), 3u);
  EXPECT_EQ(r.violations[0].offender, "p");
  EXPECT_EQ(r.violations[1].offender, "w");
  EXPECT_EQ(r.violations[2].offender, "y");
  EXPECT_EQ(r.violations.size(), pairwise_violation_count(cases, cat));
}

TEST(CheckBelievedEquivalence, AgreesWithPairwiseOracleOnRandomInstances) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    auto cat = random_categorization(rng, m, 3);
    std::vector<TestCase> cases;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 40)(rng);
    for (std::size_t k = 0; k < n; ++k)
      cases.push_back(tc("c" + std::to_string(k), random_point(rng, m), std::uniform_int_distribution<int>(0, 2)(rng)));
    auto r = check_believed_equivalence(cases, cat);
    EXPECT_EQ(r.holds, pairwise_holds(cases, cat));
    EXPECT_EQ(r.violations.size(), pairwise_violation_count(cases, cat));
  }
}

TEST(Classify, EmptyLedgerGivesNewCell) {
  auto cat = partitions({{0, 1}});
  EquivalenceLedger ledger(cat.revision());
  auto v = classify(tc("n", {0.5}, 1), ledger, cat);
  EXPECT_EQ(v.kind, Consistency::NewCell);
  EXPECT_FALSE(v.violation.has_value());
}

TEST(Classify, MatchingValueIsConsistent) {
  auto cat = partitions({{0, 1}});
  std::vector<TestCase> cases{tc("w", {0.2}, 2)};
  auto ledger = rebuild(cases, cat);
  EXPECT_EQ(classify(tc("n", {0.6}, 2), ledger, cat).kind, Consistency::Consistent);
}

TEST(Classify, ConflictingValueIsInconsistentWithWitness) {
  auto cat = partitions({{0, 1}});
  std::vector<TestCase> cases{tc("w", {0.2}, 2)};
  auto ledger = rebuild(cases, cat);
  auto v = classify(tc("n", {0.6}, 5), ledger, cat);
  ASSERT_EQ(v.kind, Consistency::Inconsistent);
  EXPECT_EQ(v.violation->conflicting_witness, "w");
  EXPECT_EQ(v.violation->offender, "n");
  EXPECT_EQ(v.violation->existing_value, EvalValue(2));
  EXPECT_EQ(v.violation->new_value, EvalValue(5));
}

TEST(Classify, StaleLedgerRejected) {
  auto cat = partitions({{0, 1}});
  auto ledger = rebuild({}, cat);
  auto cut = cat.with_category(0, cat.partition(0)->with_cut(1, 0.5));
  try {
    classify(tc("n", {0.6}, 1), ledger, cut);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RevisionMismatch);
  }
}

TEST(InsertConsistent, NewCellAddsCell) {
  auto cat = partitions({{0, 0.5, 1}});
  std::vector<TestCase> cases{tc("w", {0.2}, 2)};
  auto ledger = rebuild(cases, cat);
  auto next = insert_consistent(tc("n", {0.7}, 9), ledger, cat);
  EXPECT_EQ(next.cell_count(), ledger.cell_count() + 1);
}

TEST(InsertConsistent, ConsistentAddsWitnessOnly) {
  auto cat = partitions({{0, 0.5, 1}});
  std::vector<TestCase> cases{tc("w", {0.2}, 2)};
  auto ledger = rebuild(cases, cat);
  auto next = insert_consistent(tc("n", {0.3}, 2), ledger, cat);
  EXPECT_EQ(next.cell_count(), ledger.cell_count());
  EXPECT_EQ(next.witness_count(), ledger.witness_count() + 1);
  EXPECT_EQ(next.find(signature_of(cat, std::vector<double>{0.3}))->witnesses,
            (std::vector<std::string>{"w", "n"}));
}

TEST(InsertConsistent, InconsistentWouldViolate) {
  auto cat = partitions({{0, 0.5, 1}});
  std::vector<TestCase> cases{tc("w", {0.2}, 2)};
  auto ledger = rebuild(cases, cat);
  try {
    insert_consistent(tc("n", {0.3}, 3), ledger, cat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::WouldViolate);
  }
}

TEST(InsertConsistent, RandomInsertionsKeepPairwiseOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    auto cat = random_categorization(rng, m, 3);
    EquivalenceLedger ledger(cat.revision());
    std::vector<TestCase> accepted;
    for (int k = 0; k < 60; ++k) {
      auto c = tc("c" + std::to_string(k), random_point(rng, m), std::uniform_int_distribution<int>(0, 1)(rng));
      const auto verdict = classify(c, ledger, cat);
      bool inserted = true;
      try {
        ledger = insert_consistent(c, ledger, cat);
      } catch (const Error& e) {
        ASSERT_EQ(e.kind(), ErrorKind::WouldViolate);
        inserted = false;
      }
      EXPECT_EQ(inserted, verdict.kind != Consistency::Inconsistent);
      if (inserted) accepted.push_back(c);
      ASSERT_TRUE(pairwise_holds(accepted, cat));
    }
    EXPECT_EQ(ledger.witness_count(), accepted.size());
  }
}

TEST(Rebuild, EmptyCasesGiveEmptyLedger) {
  auto cat = partitions({{0, 1}});
  auto ledger = rebuild({}, cat);
  EXPECT_EQ(ledger.cell_count(), 0u);
  EXPECT_EQ(ledger.revision(), cat.revision());
}

TEST(Rebuild, SucceedsAfterEffectiveCutAndFailsAfterIneffectiveCut) {
  auto cat = partitions({{0, 1}});
  std::vector<TestCase> cases{tc("a", {0.2}, 0), tc("b", {0.8}, 1)};
  auto good = cat.with_category(0, cat.partition(0)->with_cut(1, 0.5));
  auto ledger = rebuild(cases, good);
  EXPECT_EQ(ledger.cell_count(), 2u);
  EXPECT_EQ(ledger.revision(), good.revision());

  auto bad = cat.with_category(0, cat.partition(0)->with_cut(1, 0.1));
  try {
    rebuild(cases, bad);
    FAIL();
  } catch (const StillInconsistent& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StillInconsistent);
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_EQ(e.violations()[0].offender, "b");
  }
}

TEST(Ledger, CanonicalValueIsFirstWitness) {
  auto cat = partitions({{0, 1}});
  std::vector<TestCase> cases{tc("late", {0.4}, 7), tc("early", {0.5}, 7)};
  auto ledger = rebuild(cases, cat);
  const auto* rec = ledger.find(signature_of(cat, std::vector<double>{0.4}));
  ASSERT_NE(rec, nullptr);
  EXPECT_EQ(rec->witnesses.front(), "late");
  EXPECT_EQ(rec->value, EvalValue(7));
}

TEST(Ledger, SerializationIsDeterministicAndSorted) {
  auto cat = partitions({{0, 0.5, 1}, {0, 0.5, 1}});
  std::vector<TestCase> cases{tc("a", {0.9, 0.9}, 1), tc("b", {0.1, 0.9}, 2), tc("c", {0.1, 0.1}, 3)};
  const auto one = to_json(rebuild(cases, cat)).dump();
  const auto two = to_json(rebuild(cases, cat)).dump();
  EXPECT_EQ(one, two);
  EXPECT_EQ(one,
            R"({"revision":0,"cells":[{"signature":[1,1],"value":3,"witnesses":["c"]},)"
            R"({"signature":[1,2],"value":2,"witnesses":["b"]},{"signature":[2,2],"value":1,"witnesses":["a"]}]})");
}
