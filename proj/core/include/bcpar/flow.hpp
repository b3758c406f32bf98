#pragma once

#include <cstdint>
#include <vector>

#include "bcpar/classfile.hpp"

namespace bcpar {

/// Backward liveness of local slots over the instruction-level CFG.
class Liveness {
 public:
  Liveness(const std::vector<Instr>& code, int max_locals);
  /// Live-in at the instruction starting at `offset`; the offset one past
  /// the last instruction (method exit) has nothing live.
  bool live_at(std::int32_t offset, int slot) const;

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<std::vector<bool>> live_in_;
  int max_locals_ = 0;
};

/// Indices of CFG successors of instruction `i`.
std::vector<std::size_t> successors(const std::vector<Instr>& code, std::size_t i);

}  // namespace bcpar
