#ifndef COVERLAB_COUNTER_MACHINE_HPP
#define COVERLAB_COUNTER_MACHINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace coverlab {

// Two-counter register machine. Instructions, one per line, counters a/b,
// absolute 0-based jump targets:
//   inc <c>        increment counter c, fall through
//   decj <c> <L>   if c > 0: decrement, fall through; else jump to line L
//   halt           stop
// Executing any instruction costs exactly one step; executing halt leaves the
// machine halted at that step count. Running past the last line halts without
// consuming an extra step.
struct Instruction {
  enum class Op { Inc, DecJ, Halt } op;
  int counter = 0;        // 0 = a, 1 = b
  std::uint32_t target = 0;  // DecJ only
};

struct Program {
  std::vector<Instruction> code;
};

// Parses assembly text (comments start with '#', blank lines ignored).
// Throws std::invalid_argument on malformed input or out-of-range targets.
Program parse_program(const std::string& text);

struct MachineState {
  std::uint32_t pc = 0;
  std::uint64_t counters[2] = {0, 0};
  bool halted = false;
};

// Runs at most max_steps instructions from the initial state; returns the
// 1-based step at which the machine halted, or nullopt if still running.
std::optional<std::uint64_t> run_halting_step(const Program& program, std::uint64_t max_steps);

// Certifies non-termination statically: true when no halt instruction (and no
// fall-off-the-end) is reachable in the control-flow graph once decj edges on
// counters that no instruction ever increments are treated as
// unconditional jumps (such counters stay 0 forever from the empty start).
bool provably_loops(const Program& program);

struct CatalogEntry {
  std::uint64_t index = 0;  // enumeration index this program is attached to
  Program program;
  bool halts = false;
  std::uint64_t halt_step = 0;  // meaningful when halts
  std::string source;
};

// Catalog file: records framed by "@program index=<i> truth=<halts:<t>|loops>"
// and "@end", with assembly lines in between.
std::vector<CatalogEntry> parse_catalog(const std::string& text);
std::vector<CatalogEntry> load_catalog(const std::string& path);

}  // namespace coverlab

#endif  // COVERLAB_COUNTER_MACHINE_HPP
