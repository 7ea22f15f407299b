#include "ctmlab/machine.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "ctmlab/errors.hpp"

namespace ctmlab {

namespace {

constexpr int kMaxStates = 32;  // used-rule bookkeeping is a 64-bit mask

}  // namespace

std::uint64_t action_ordinal(const Action& a, int states) {
  const auto n = static_cast<std::uint64_t>(states);
  if (a.halts()) return 4 * n + static_cast<std::uint64_t>(to_int(a.write));
  return static_cast<std::uint64_t>(to_int(a.write)) * 2 * n +
         static_cast<std::uint64_t>(a.move) * n + static_cast<std::uint64_t>(a.next - 1);
}

Action action_from_ordinal(std::uint64_t ordinal, int states) {
  const auto n = static_cast<std::uint64_t>(states);
  if (ordinal >= 4 * n + 2) throw std::out_of_range("action ordinal out of range");
  if (ordinal >= 4 * n) return Action::halt(ordinal == 4 * n ? Symbol::Zero : Symbol::One);
  const auto write = ordinal / (2 * n) == 0 ? Symbol::Zero : Symbol::One;
  const auto move = (ordinal / n) % 2 == 0 ? Move::Left : Move::Right;
  return Action::step(write, move, static_cast<int>(ordinal % n) + 1);
}

RuleTable::RuleTable(int states) : states_(states) {
  if (states < 1 || states > kMaxStates)
    throw ValidationError("state count must be in 1.." + std::to_string(kMaxStates));
  entries_.assign(2 * static_cast<std::size_t>(states), Action::step(Symbol::Zero, Move::Left, 1));
}

RuleTable::RuleTable(int states, std::vector<Action> entries)
    : states_(states), entries_(std::move(entries)) {
  validate();
  for (auto& e : entries_)
    if (e.halts()) e.move = Move::Left;
}

void RuleTable::set(int state, Symbol read, const Action& a) {
  if (state < 1 || state > states_) throw ValidationError("state out of range");
  if (!a.halts() && (a.next < 1 || a.next > states_))
    throw ValidationError("next state out of range");
  entries_[slot(state, read)] = a.halts() ? Action::halt(a.write) : a;
}

void RuleTable::validate() const {
  if (states_ < 1 || states_ > kMaxStates)
    throw ValidationError("state count must be in 1.." + std::to_string(kMaxStates));
  if (entries_.size() != 2 * static_cast<std::size_t>(states_))
    throw ValidationError("rule table must have exactly 2n entries");
  for (const auto& e : entries_) {
    if (to_int(e.write) > 1) throw ValidationError("written symbol must be 0 or 1");
    if (e.next < 0 || e.next > states_) throw ValidationError("next state out of range");
  }
}

bool RuleTable::has_halt_entry() const {
  return std::any_of(entries_.begin(), entries_.end(), [](const Action& a) { return a.halts(); });
}

std::uint64_t space_size(int states) {
  if (states < 1) throw std::invalid_argument("state count must be at least 1");
  const std::uint64_t base = actions_per_entry(states);
  std::uint64_t size = 1;
  for (int i = 0; i < 2 * states; ++i) {
    if (size > std::numeric_limits<std::uint64_t>::max() / base)
      throw std::overflow_error("rule space size for n=" + std::to_string(states) +
                                " exceeds 64 bits");
    size *= base;
  }
  return size;
}

void decode_machine_into(MachineIndex idx, RuleTable& out) {
  const auto total = space_size(idx.states);
  if (idx.index >= total)
    throw std::out_of_range("machine index " + std::to_string(idx.index) +
                            " outside space of size " + std::to_string(total));
  if (out.states() != idx.states) out = RuleTable(idx.states);
  const std::uint64_t base = actions_per_entry(idx.states);
  auto rest = idx.index;
  for (int pos = 2 * idx.states - 1; pos >= 0; --pos) {
    const auto a = action_from_ordinal(rest % base, idx.states);
    rest /= base;
    out.set(pos / 2 + 1, pos % 2 == 0 ? Symbol::Zero : Symbol::One, a);
  }
}

RuleTable decode_machine(MachineIndex idx) {
  RuleTable t(idx.states);
  decode_machine_into(idx, t);
  return t;
}

MachineIndex encode_machine(const RuleTable& t) {
  t.validate();
  const std::uint64_t base = actions_per_entry(t.states());
  std::uint64_t index = 0;
  for (const auto& e : t.entries()) index = index * base + action_ordinal(e, t.states());
  return {index, t.states()};
}

void RunConfig::validate() const {
  if (max_steps < 1) throw ValidationError("max_steps must be at least 1");
  if (enable_cycle_check && cycle_memory_limit < 1)
    throw ValidationError("cycle_memory_limit must be positive");
}

std::string_view to_string(NonHaltReason r) {
  switch (r) {
    case NonHaltReason::NoHaltRule: return "no_halt_rule";
    case NonHaltReason::BlankEscape: return "blank_escape";
    case NonHaltReason::CycleDetected: return "cycle_detected";
  }
  return "unknown";
}

Simulator::Simulator(RunConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  const auto width = std::min<std::int64_t>(2 * cfg_.max_steps + 3, 4096);
  tape_.assign(static_cast<std::size_t>(width), static_cast<std::uint8_t>(to_int(cfg_.blank)));
}

RunOutcome Simulator::run(const RuleTable& t) {
  const int n = t.states();
  const auto entries = t.entries();
  const auto blank = static_cast<std::uint8_t>(to_int(cfg_.blank));

  if (cfg_.enable_no_halt_check && !t.has_halt_entry())
    return NonHaltingProved{NonHaltReason::NoHaltRule};

  // escapes[dir] bit q-1: starting in state q on a fresh blank cell beyond
  // the visited region, blank reads keep moving in `dir` forever.
  std::uint64_t escapes[2] = {0, 0};
  if (cfg_.enable_blank_escape) {
    for (int dir = 0; dir < 2; ++dir) {
      for (int q = 1; q <= n; ++q) {
        std::uint64_t seen = 0;
        int s = q;
        bool escape = false;
        while (true) {
          const auto& a = entries[RuleTable::slot(s, static_cast<Symbol>(blank))];
          if (a.halts() || static_cast<int>(a.move) != dir) break;
          seen |= std::uint64_t{1} << (s - 1);
          s = a.next;
          if (seen & (std::uint64_t{1} << (s - 1))) {
            escape = true;
            break;
          }
        }
        if (escape) escapes[dir] |= std::uint64_t{1} << (q - 1);
      }
    }
  }
  auto escaping = [&](int dir, int state) {
    return (escapes[dir] >> (state - 1)) & 1U;
  };

  std::int64_t origin = static_cast<std::int64_t>(tape_.size()) / 2;
  std::int64_t pos = origin;
  std::int64_t lo = pos;
  std::int64_t hi = pos;
  int state = 1;
  std::uint64_t used = 0;

  auto reset_tape = [&] {
    std::fill(tape_.begin() + lo, tape_.begin() + hi + 1, blank);
  };

  if (cfg_.enable_blank_escape && (escaping(0, 1) || escaping(1, 1)))
    return NonHaltingProved{NonHaltReason::BlankEscape};

  std::unordered_set<std::string> snapshots;
  std::string key;

  for (std::int64_t step = 1; step <= cfg_.max_steps; ++step) {
    if (cfg_.enable_cycle_check) {
      key.assign(reinterpret_cast<const char*>(&state), sizeof state);
      const auto offset = pos - lo;
      key.append(reinterpret_cast<const char*>(&offset), sizeof offset);
      key.append(reinterpret_cast<const char*>(tape_.data() + lo),
                 static_cast<std::size_t>(hi - lo + 1));
      if (snapshots.contains(key)) {
        reset_tape();
        return NonHaltingProved{NonHaltReason::CycleDetected};
      }
      if (snapshots.size() < cfg_.cycle_memory_limit) snapshots.insert(key);
    }

    const auto read = tape_[static_cast<std::size_t>(pos)];
    const auto slot = 2 * static_cast<std::size_t>(state - 1) + read;
    const Action& a = entries[slot];
    used |= std::uint64_t{1} << slot;
    tape_[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(to_int(a.write));

    if (a.halts()) {
      Halted h;
      h.output.reserve(static_cast<std::size_t>(hi - lo + 1));
      for (auto c = lo; c <= hi; ++c) h.output.push_back(tape_[static_cast<std::size_t>(c)] ? '1' : '0');
      h.steps = step;
      h.used_rules = std::popcount(used);
      h.first_cell = lo - origin;
      h.last_cell = hi - origin;
      reset_tape();
      return h;
    }

    state = a.next;
    if (a.move == Move::Left) {
      if (pos == 0) {
        const auto grow = static_cast<std::int64_t>(tape_.size());
        tape_.insert(tape_.begin(), static_cast<std::size_t>(grow), blank);
        pos += grow;
        lo += grow;
        hi += grow;
        origin += grow;
      }
      --pos;
      if (pos < lo) {
        lo = pos;
        if (cfg_.enable_blank_escape && escaping(0, state)) {
          reset_tape();
          return NonHaltingProved{NonHaltReason::BlankEscape};
        }
      }
    } else {
      if (pos + 1 == static_cast<std::int64_t>(tape_.size())) tape_.resize(tape_.size() * 2, blank);
      ++pos;
      if (pos > hi) {
        hi = pos;
        if (cfg_.enable_blank_escape && escaping(1, state)) {
          reset_tape();
          return NonHaltingProved{NonHaltReason::BlankEscape};
        }
      }
    }
  }
  reset_tape();
  return StepLimit{};
}

RunOutcome simulate(const RuleTable& t, const RunConfig& cfg) {
  t.validate();
  Simulator sim(cfg);
  return sim.run(t);
}

std::optional<NonHaltReason> prove_non_halting(const RuleTable& t, const RunConfig& cfg) {
  t.validate();
  RunConfig prover = cfg;
  prover.enable_no_halt_check = true;
  prover.enable_blank_escape = true;
  prover.enable_cycle_check = true;
  if (prover.cycle_memory_limit < 1) prover.cycle_memory_limit = 1;
  Simulator sim(prover);
  const auto outcome = sim.run(t);
  if (const auto* p = std::get_if<NonHaltingProved>(&outcome)) return p->reason;
  return std::nullopt;
}

RuleTable transform(const RuleTable& t, Symmetry sym) {
  t.validate();
  RuleTable out(t.states());
  for (int s = 1; s <= t.states(); ++s) {
    for (auto r : {Symbol::Zero, Symbol::One}) {
      if (sym == Symmetry::ReflectDirections) {
        auto a = t.at(s, r);
        if (!a.halts()) a.move = mirror(a.move);
        out.set(s, r, a);
      } else {
        auto a = t.at(s, flip(r));
        a.write = flip(a.write);
        out.set(s, r, a);
      }
    }
  }
  return out;
}

std::string to_text(const RuleTable& t) {
  std::ostringstream os;
  for (int s = 1; s <= t.states(); ++s) {
    for (auto r : {Symbol::Zero, Symbol::One}) {
      const auto& a = t.at(s, r);
      os << s << ',' << to_char(r) << " -> " << to_char(a.write) << ',';
      if (a.halts())
        os << "HALT";
      else
        os << (a.move == Move::Left ? 'L' : 'R') << ',' << a.next;
      os << '\n';
    }
  }
  return os.str();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto at = s.find(sep, start);
    parts.push_back(trim(s.substr(start, at == std::string_view::npos ? at : at - start)));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return parts;
}

int parse_int(std::string_view s, std::size_t line) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ParseError("expected integer, got '" + std::string(s) + "'", line);
  return v;
}

Symbol parse_symbol(std::string_view s, std::size_t line) {
  if (s == "0") return Symbol::Zero;
  if (s == "1") return Symbol::One;
  throw ParseError("expected symbol 0 or 1, got '" + std::string(s) + "'", line);
}

}  // namespace

RuleTable parse_machine_text(std::string_view text) {
  struct Parsed {
    int state;
    Symbol read;
    Action action;
    std::size_t line;
  };
  std::vector<Parsed> rows;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto arrow = line.find("->");
    if (arrow == std::string_view::npos) throw ParseError("missing '->'", line_no);
    const auto lhs = split(trim(line.substr(0, arrow)), ',');
    const auto rhs = split(trim(line.substr(arrow + 2)), ',');
    if (lhs.size() != 2) throw ParseError("expected 'state,read' before '->'", line_no);
    Parsed p{parse_int(lhs[0], line_no), parse_symbol(lhs[1], line_no), {}, line_no};
    const auto write = rhs.empty() ? Symbol::Zero : parse_symbol(rhs[0], line_no);
    if (rhs.size() == 2 && rhs[1] == "HALT") {
      p.action = Action::halt(write);
    } else if (rhs.size() == 3 && (rhs[1] == "L" || rhs[1] == "R")) {
      p.action = Action::step(write, rhs[1] == "L" ? Move::Left : Move::Right,
                              parse_int(rhs[2], line_no));
    } else {
      throw ParseError("expected 'write,move,next' or 'write,HALT' after '->'", line_no);
    }
    rows.push_back(p);
  }
  if (rows.empty() || rows.size() % 2 != 0)
    throw ParseError("machine text must list exactly 2n entries", 0);
  const int n = static_cast<int>(rows.size() / 2);
  RuleTable t(n);
  std::vector<bool> seen(rows.size(), false);
  for (const auto& p : rows) {
    if (p.state < 1 || p.state > n) throw ParseError("state out of range 1.." + std::to_string(n), p.line);
    if (!p.action.halts() && (p.action.next < 1 || p.action.next > n))
      throw ParseError("next state out of range 1.." + std::to_string(n), p.line);
    const auto slot = RuleTable::slot(p.state, p.read);
    if (seen[slot]) throw ParseError("duplicate entry", p.line);
    seen[slot] = true;
    t.set(p.state, p.read, p.action);
  }
  return t;
}

}  // namespace ctmlab
