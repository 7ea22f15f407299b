#pragma once

// Two-symbol Turing machines with in-transition halting.
//
// A machine with n states has 2n table entries, one per (state, read symbol).
// Each entry is either a Step (write, move, next state) or a HaltWrite that
// writes a symbol and stops without moving. That gives 4n+2 possible actions
// per entry and (4n+2)^(2n) machines per rule space.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ctmlab {

enum class Symbol : std::uint8_t { Zero = 0, One = 1 };

inline constexpr Symbol flip(Symbol s) { return s == Symbol::Zero ? Symbol::One : Symbol::Zero; }
inline constexpr int to_int(Symbol s) { return static_cast<int>(s); }
inline constexpr char to_char(Symbol s) { return s == Symbol::Zero ? '0' : '1'; }

enum class Move : std::uint8_t { Left = 0, Right = 1 };

inline constexpr Move mirror(Move m) { return m == Move::Left ? Move::Right : Move::Left; }

/// One transition table entry. `next == 0` encodes HaltWrite; otherwise
/// `next` is the 1-based successor state and `move` is meaningful.
struct Action {
  Symbol write = Symbol::Zero;
  Move move = Move::Left;
  int next = 1;

  static constexpr Action step(Symbol write, Move move, int next) { return {write, move, next}; }
  static constexpr Action halt(Symbol write) { return {write, Move::Left, 0}; }

  constexpr bool halts() const { return next == 0; }

  friend constexpr bool operator==(const Action& a, const Action& b) {
    if (a.halts() || b.halts()) return a.halts() == b.halts() && a.write == b.write;
    return a.write == b.write && a.move == b.move && a.next == b.next;
  }
};

/// Number of distinct actions a single entry can take in an n-state machine.
inline constexpr std::uint64_t actions_per_entry(int states) {
  return 4 * static_cast<std::uint64_t>(states) + 2;
}

/// Ordinal of an action under the fixed ordering: Steps sorted by
/// (write, move Left<Right, next), then HaltWrite(0), HaltWrite(1).
std::uint64_t action_ordinal(const Action& a, int states);
Action action_from_ordinal(std::uint64_t ordinal, int states);

class RuleTable {
 public:
  /// All entries default to Step{0, Left, 1} (ordinal 0).
  explicit RuleTable(int states);
  RuleTable(int states, std::vector<Action> entries);

  int states() const { return states_; }
  std::span<const Action> entries() const { return entries_; }

  const Action& at(int state, Symbol read) const { return entries_[slot(state, read)]; }
  void set(int state, Symbol read, const Action& a);

  /// Entry position 2(state-1)+read.
  static constexpr std::size_t slot(int state, Symbol read) {
    return 2 * static_cast<std::size_t>(state - 1) + static_cast<std::size_t>(to_int(read));
  }

  /// Throws ValidationError when the table is not a well-formed n-state machine.
  void validate() const;

  bool has_halt_entry() const;

  friend bool operator==(const RuleTable&, const RuleTable&) = default;

 private:
  int states_;
  std::vector<Action> entries_;
};

struct MachineIndex {
  std::uint64_t index = 0;
  int states = 1;

  friend bool operator==(const MachineIndex&, const MachineIndex&) = default;
};

/// (4n+2)^(2n). Throws std::overflow_error when the value does not fit in 64 bits
/// (n > 6), std::invalid_argument for n < 1.
std::uint64_t space_size(int states);

/// Mixed-radix decoding, entry 2(s-1)+r in digit position 2(s-1)+r, most
/// significant first. Throws std::out_of_range for indices outside the space.
RuleTable decode_machine(MachineIndex idx);
void decode_machine_into(MachineIndex idx, RuleTable& out);
MachineIndex encode_machine(const RuleTable& t);

struct RunConfig {
  std::int64_t max_steps = 100;
  Symbol blank = Symbol::Zero;
  bool enable_no_halt_check = false;
  bool enable_blank_escape = false;
  bool enable_cycle_check = false;
  std::size_t cycle_memory_limit = 4096;

  void validate() const;
};

enum class NonHaltReason : std::uint8_t { NoHaltRule, BlankEscape, CycleDetected };

std::string_view to_string(NonHaltReason r);

struct Halted {
  std::string output;
  std::int64_t steps = 0;
  int used_rules = 0;
  std::int64_t first_cell = 0;
  std::int64_t last_cell = 0;

  friend bool operator==(const Halted&, const Halted&) = default;
};

struct NonHaltingProved {
  NonHaltReason reason;

  friend bool operator==(const NonHaltingProved&, const NonHaltingProved&) = default;
};

struct StepLimit {
  friend bool operator==(const StepLimit&, const StepLimit&) = default;
};

using RunOutcome = std::variant<Halted, NonHaltingProved, StepLimit>;

/// Runs `t` from state 1 at cell 0 on a tape filled with `cfg.blank`, applying
/// whichever non-halting checks `cfg` enables. The output of a halting run is
/// the tape over every visited cell, left to right.
RunOutcome simulate(const RuleTable& t, const RunConfig& cfg);

/// Attempts to prove that `t` never halts on a blank tape. All three checks
/// run (cycle detection bounded by `cfg.cycle_memory_limit`) within
/// `cfg.max_steps` simulated steps. A returned reason is a proof; nullopt
/// means nothing was proved (the machine may halt).
std::optional<NonHaltReason> prove_non_halting(const RuleTable& t, const RunConfig& cfg);

enum class Symmetry : std::uint8_t { ComplementSymbols, ReflectDirections };

RuleTable transform(const RuleTable& t, Symmetry sym);

/// Machine text format, one line per entry:
///   `state,read -> write,move,next` or `state,read -> write,HALT`
std::string to_text(const RuleTable& t);
RuleTable parse_machine_text(std::string_view text);

/// Reusable simulation scratch space for hot loops over many machines.
class Simulator {
 public:
  explicit Simulator(RunConfig cfg);

  const RunConfig& config() const { return cfg_; }

  RunOutcome run(const RuleTable& t);

 private:
  RunConfig cfg_;
  std::vector<std::uint8_t> tape_;
};

}  // namespace ctmlab
