#include "bcpar/flow.hpp"

#include <algorithm>
#include <map>

namespace bcpar {

namespace {

std::size_t index_of(const std::vector<Instr>& code, std::int32_t offset) {
  auto it = std::lower_bound(code.begin(), code.end(), offset,
                             [](const Instr& in, std::int32_t off) { return static_cast<std::int32_t>(in.offset) < off; });
  return static_cast<std::size_t>(it - code.begin());
}

}  // namespace

std::vector<std::size_t> successors(const std::vector<Instr>& code, std::size_t i) {
  std::vector<std::size_t> out;
  const Instr& in = code[i];
  if (is_branch(in.op)) out.push_back(index_of(code, in.target));
  for (const auto& c : in.cases) out.push_back(index_of(code, c.second));
  if (in.op == Opcode::tableswitch || in.op == Opcode::lookupswitch) out.push_back(index_of(code, in.target));
  if (!ends_block(in.op) && i + 1 < code.size()) out.push_back(i + 1);
  return out;
}

Liveness::Liveness(const std::vector<Instr>& code, int max_locals) : max_locals_(max_locals) {
  std::size_t n = code.size();
  for (const auto& in : code) offsets_.push_back(in.offset);
  live_in_.assign(n, std::vector<bool>(static_cast<std::size_t>(max_locals), false));
  std::vector<std::vector<std::size_t>> succ(n);
  for (std::size_t i = 0; i < n; ++i) succ[i] = successors(code, i);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = n; k-- > 0;) {
      std::vector<bool> live(static_cast<std::size_t>(max_locals), false);
      for (auto s : succ[k]) {
        if (s >= n) continue;
        for (int v = 0; v < max_locals; ++v)
          if (live_in_[s][static_cast<std::size_t>(v)]) live[static_cast<std::size_t>(v)] = true;
      }
      const Instr& in = code[k];
      auto slot = in.local_slot();
      if (slot && *slot < max_locals) {
        auto sl = static_cast<std::size_t>(*slot);
        if (store_kind(in.op)) live[sl] = false;
        if (load_kind(in.op) || in.op == Opcode::iinc || in.op == Opcode::ret) live[sl] = true;
      }
      if (live != live_in_[k]) {
        live_in_[k] = std::move(live);
        changed = true;
      }
    }
  }
}

bool Liveness::live_at(std::int32_t offset, int slot) const {
  if (slot < 0 || slot >= max_locals_) return false;
  auto it = std::lower_bound(offsets_.begin(), offsets_.end(), static_cast<std::uint32_t>(offset));
  if (it == offsets_.end() || *it != static_cast<std::uint32_t>(offset)) return false;
  return live_in_[static_cast<std::size_t>(it - offsets_.begin())][static_cast<std::size_t>(slot)];
}

}  // namespace bcpar
