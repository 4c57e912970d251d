#pragma once

// Machine shift-state transitions.
//
// A machine is in one of four states per period (0 = not operating, 1..3 =
// number of work shifts). A transition e = (tail, head) moves the machine from
// its previous-period state to its current-period state; the 16 transitions
// are indexed row-major, index = 4 * tail + head.

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace captrans {

inline constexpr int kStateCount = 4;
inline constexpr int kTransitionCount = kStateCount * kStateCount;

enum class StatePartition {
  Idle,      // (0,0): not bought yet or already discarded
  Purchase,  // (0,s'), s' > 0
  Operate,   // (s,s'), both > 0
  Discard,   // (s,0), s > 0
};

class TransitionId {
 public:
  constexpr TransitionId() = default;

  /// Throws std::out_of_range for index outside 0..15.
  constexpr explicit TransitionId(int index) : index_(index) {
    if (index < 0 || index >= kTransitionCount) throw std::out_of_range("transition index out of range");
  }

  static constexpr TransitionId from_states(int tail, int head) {
    if (tail < 0 || tail >= kStateCount || head < 0 || head >= kStateCount)
      throw std::out_of_range("state out of range");
    return TransitionId(kStateCount * tail + head);
  }

  constexpr int index() const noexcept { return index_; }
  constexpr int tail() const noexcept { return index_ / kStateCount; }
  constexpr int head() const noexcept { return index_ % kStateCount; }

  friend constexpr bool operator==(TransitionId, TransitionId) = default;

 private:
  int index_ = 0;
};

constexpr StatePartition classify(TransitionId e) noexcept {
  if (e.tail() == 0) return e.head() == 0 ? StatePartition::Idle : StatePartition::Purchase;
  return e.head() == 0 ? StatePartition::Discard : StatePartition::Operate;
}

/// Number of shifts opened by the transition, max(0, head - tail).
constexpr int shifts_opened(TransitionId e) noexcept {
  return e.head() > e.tail() ? e.head() - e.tail() : 0;
}

/// Number of shifts closed by the transition, max(0, tail - head).
constexpr int shifts_closed(TransitionId e) noexcept {
  return e.tail() > e.head() ? e.tail() - e.head() : 0;
}

/// True for transitions that leave the machine operating in the current period.
constexpr bool is_operating(TransitionId e) noexcept {
  auto p = classify(e);
  return p == StatePartition::Purchase || p == StatePartition::Operate;
}

constexpr std::array<TransitionId, kTransitionCount> all_transitions() {
  std::array<TransitionId, kTransitionCount> out{};
  for (int i = 0; i < kTransitionCount; ++i) out[static_cast<std::size_t>(i)] = TransitionId(i);
  return out;
}

inline std::string to_string(StatePartition p) {
  switch (p) {
    case StatePartition::Idle: return "E0";
    case StatePartition::Purchase: return "E1";
    case StatePartition::Operate: return "E2";
    case StatePartition::Discard: return "E3";
  }
  return "?";
}

}  // namespace captrans
