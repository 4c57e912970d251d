#include <gtest/gtest.h>

#include "captrans/statespace.hpp"

using namespace captrans;

TEST(Statespace, IndexIsTailTimesFourPlusHead) {
  for (auto e : all_transitions()) EXPECT_EQ(e.index(), 4 * e.tail() + e.head());
  EXPECT_EQ(TransitionId::from_states(1, 2).index(), 6);
  EXPECT_THROW(TransitionId(16), std::out_of_range);
  EXPECT_THROW(TransitionId(-1), std::out_of_range);
  EXPECT_THROW(TransitionId::from_states(4, 0), std::out_of_range);
}

TEST(Statespace, ClassifyExamples) {
  EXPECT_EQ(classify(TransitionId(6)), StatePartition::Operate);
  EXPECT_EQ(classify(TransitionId(0)), StatePartition::Idle);
  EXPECT_EQ(classify(TransitionId(12)), StatePartition::Discard);
  EXPECT_EQ(to_string(classify(TransitionId(6))), "E2");
}

TEST(Statespace, PartitionSizes) {
  std::array<int, 4> count{};
  for (auto e : all_transitions()) ++count[static_cast<std::size_t>(classify(e))];
  EXPECT_EQ(count[0], 1);
  EXPECT_EQ(count[1], 3);
  EXPECT_EQ(count[2], 9);
  EXPECT_EQ(count[3], 3);
  for (int idx : {4, 8, 12}) EXPECT_EQ(classify(TransitionId(idx)), StatePartition::Discard);
  for (int idx : {1, 2, 3}) EXPECT_EQ(classify(TransitionId(idx)), StatePartition::Purchase);
}

TEST(Statespace, OpenedAndClosedShifts) {
  EXPECT_EQ(shifts_opened(TransitionId(6)), 1);
  EXPECT_EQ(shifts_closed(TransitionId(6)), 0);
  EXPECT_EQ(shifts_opened(TransitionId(12)), 0);
  EXPECT_EQ(shifts_closed(TransitionId(12)), 3);
  EXPECT_EQ(shifts_opened(TransitionId(5)), 0);
  EXPECT_EQ(shifts_closed(TransitionId(5)), 0);
}

TEST(Statespace, Properties) {
  for (auto e : all_transitions()) {
    EXPECT_EQ(shifts_opened(e) * shifts_closed(e), 0);
    if (classify(e) == StatePartition::Purchase) EXPECT_EQ(shifts_opened(e), e.head());
  }
}
