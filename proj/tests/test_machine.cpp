#include <doctest.h>

#include <algorithm>
#include <random>
#include <stdexcept>

#include "ctmlab/errors.hpp"
#include "ctmlab/machine.hpp"
#include "oracle.hpp"

using namespace ctmlab;

namespace {

RuleTable random_table(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> pick(0, space_size(n) - 1);
  return decode_machine({pick(rng), n});
}

std::string complement(std::string s) {
  for (auto& c : s) c = c == '0' ? '1' : '0';
  return s;
}

std::vector<oracle::Act> to_oracle(const RuleTable& t) {
  std::vector<oracle::Act> out;
  for (const auto& a : t.entries()) {
    if (a.halts())
      out.push_back({to_int(a.write), 0, 0});
    else
      out.push_back({to_int(a.write), a.move == Move::Left ? -1 : +1, a.next});
  }
  return out;
}

RunConfig plain(std::int64_t max_steps, Symbol blank = Symbol::Zero) {
  RunConfig cfg;
  cfg.max_steps = max_steps;
  cfg.blank = blank;
  return cfg;
}

}  // namespace

TEST_CASE("action ordering matches the listed alphabet") {
  for (int n = 1; n <= 4; ++n) {
    const auto acts = oracle::alphabet(n);
    REQUIRE(acts.size() == actions_per_entry(n));
    for (std::uint64_t i = 0; i < acts.size(); ++i) {
      const auto a = action_from_ordinal(i, n);
      CHECK(to_int(a.write) == acts[i].write);
      CHECK(a.halts() == (acts[i].next == 0));
      if (!a.halts()) {
        CHECK(a.next == acts[i].next);
        CHECK((a.move == Move::Left) == (acts[i].move == -1));
      }
      CHECK(action_ordinal(a, n) == i);
    }
  }
}

TEST_CASE("decode_machine endpoints") {
  const auto first = decode_machine({0, 2});
  for (const auto& a : first.entries()) CHECK(a == Action::step(Symbol::Zero, Move::Left, 1));

  const auto last = decode_machine({space_size(2) - 1, 2});
  for (const auto& a : last.entries()) CHECK(a == Action::halt(Symbol::One));

  CHECK_THROWS_AS(decode_machine({space_size(2), 2}), std::out_of_range);
}

TEST_CASE("entry (1,0) is the most significant digit") {
  // ordinal 1 in the least significant digit is entry (2,1).
  const auto t = decode_machine({1, 2});
  CHECK(t.at(2, Symbol::One) == Action::step(Symbol::Zero, Move::Left, 2));
  CHECK(t.at(1, Symbol::Zero) == Action::step(Symbol::Zero, Move::Left, 1));
  const auto u = decode_machine({1000, 2});  // 10^3: first digit 1
  CHECK(u.at(1, Symbol::Zero) == Action::step(Symbol::Zero, Move::Left, 2));
}

TEST_CASE("encode_machine examples") {
  CHECK(encode_machine(RuleTable(2)).index == 0);
  // 12345 lies outside the 10,000-machine (2,2) space.
  CHECK_THROWS_AS(decode_machine({12345, 2}), std::out_of_range);
  CHECK(encode_machine(decode_machine({12345, 3})).index == 12345);
  CHECK(encode_machine(decode_machine({7'000'000, 3})).index == 7'000'000);
  CHECK(encode_machine(decode_machine({9'999, 2})).index == 9'999);
}

TEST_CASE("encode/decode bijection") {
  SUBCASE("every (2,2) index round-trips") {
    RuleTable t(2);
    for (std::uint64_t i = 0; i < space_size(2); ++i) {
      decode_machine_into({i, 2}, t);
      REQUIRE(encode_machine(t).index == i);
    }
  }
  SUBCASE("random (3,2) tables round-trip") {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> ord(0, static_cast<int>(actions_per_entry(3)) - 1);
    for (int k = 0; k < 1000; ++k) {
      RuleTable t(3);
      for (int s = 1; s <= 3; ++s)
        for (auto r : {Symbol::Zero, Symbol::One}) t.set(s, r, action_from_ordinal(ord(rng), 3));
      REQUIRE(decode_machine(encode_machine(t)) == t);
    }
  }
}

TEST_CASE("space_size") {
  CHECK(space_size(1) == 36);
  CHECK(space_size(2) == 10'000);
  CHECK(space_size(3) == 7'529'536);
  CHECK(space_size(6) == 95'428'956'661'682'176ULL);  // 26^12
  CHECK_THROWS_AS(space_size(7), std::overflow_error);
  CHECK_THROWS_AS(space_size(0), std::invalid_argument);
}

TEST_CASE("RuleTable validation") {
  CHECK_THROWS_AS(RuleTable(0), ValidationError);
  CHECK_THROWS_AS(RuleTable(2, {Action::halt(Symbol::One)}), ValidationError);
  CHECK_THROWS_AS(RuleTable(1, {Action::step(Symbol::One, Move::Left, 2), Action::halt(Symbol::One)}),
                  ValidationError);
  RuleTable t(2);
  CHECK_THROWS_AS(t.set(3, Symbol::Zero, Action::halt(Symbol::Zero)), ValidationError);
  CHECK_THROWS_AS(t.set(1, Symbol::Zero, Action::step(Symbol::Zero, Move::Left, 5)), ValidationError);
}

TEST_CASE("simulate examples") {
  SUBCASE("single halting write") {
    RuleTable t(2);
    t.set(1, Symbol::Zero, Action::halt(Symbol::One));
    const auto out = simulate(t, plain(10));
    const auto& h = std::get<Halted>(out);
    CHECK(h.output == "1");
    CHECK(h.steps == 1);
    CHECK(h.used_rules == 1);
    CHECK(h.first_cell == 0);
    CHECK(h.last_cell == 0);
  }
  SUBCASE("two cells both written") {
    RuleTable t(2);
    t.set(1, Symbol::Zero, Action::step(Symbol::One, Move::Right, 2));
    t.set(2, Symbol::Zero, Action::halt(Symbol::One));
    const auto& h = std::get<Halted>(simulate(t, plain(10)));
    CHECK(h.output == "11");
    CHECK(h.steps == 2);
    CHECK(h.used_rules == 2);
    CHECK(h.last_cell - h.first_cell + 1 == 2);
  }
  SUBCASE("self-loop on blank") {
    RuleTable t(2);
    t.set(1, Symbol::Zero, Action::step(Symbol::Zero, Move::Right, 1));
    t.set(2, Symbol::One, Action::halt(Symbol::One));
    CHECK(std::holds_alternative<StepLimit>(simulate(t, plain(100))));
    auto cfg = plain(100);
    cfg.enable_blank_escape = true;
    CHECK(simulate(t, cfg) == RunOutcome{NonHaltingProved{NonHaltReason::BlankEscape}});
  }
  SUBCASE("halting on the last allowed step") {
    RuleTable t(2);
    t.set(1, Symbol::Zero, Action::step(Symbol::One, Move::Right, 2));
    t.set(2, Symbol::Zero, Action::halt(Symbol::One));
    CHECK(std::holds_alternative<Halted>(simulate(t, plain(2))));
    CHECK(std::holds_alternative<StepLimit>(simulate(t, plain(1))));
  }
  SUBCASE("max_steps must be positive") {
    CHECK_THROWS_AS(simulate(RuleTable(1), plain(0)), ValidationError);
  }
}

TEST_CASE("simulate agrees with the brute-force oracle") {
  std::mt19937_64 rng(7);
  Simulator sim(plain(60));
  Simulator sim1(plain(60, Symbol::One));
  for (int k = 0; k < 20000; ++k) {
    const int n = 2 + k % 3;
    const auto t = random_table(n, rng);
    for (int blank = 0; blank <= 1; ++blank) {
      const auto out = blank ? sim1.run(t) : sim.run(t);
      const auto ref = oracle::run(to_oracle(t), blank, 60);
      REQUIRE(std::holds_alternative<Halted>(out) == ref.halted);
      if (ref.halted) {
        const auto& h = std::get<Halted>(out);
        CHECK(h.output == ref.output);
        CHECK(h.steps == ref.steps);
        CHECK(h.used_rules == ref.used);
      }
    }
  }
}

TEST_CASE("halting runs use between 1 and 2n rules and respect the step bound") {
  Simulator sim(plain(10));
  RuleTable t(2);
  for (std::uint64_t i = 0; i < space_size(2); ++i) {
    decode_machine_into({i, 2}, t);
    const auto out = sim.run(t);
    if (const auto* h = std::get_if<Halted>(&out)) {
      REQUIRE(h->used_rules >= 1);
      REQUIRE(h->used_rules <= 4);
      REQUIRE(h->steps <= 10);
      REQUIRE(h->output.size() == static_cast<std::size_t>(h->last_cell - h->first_cell + 1));
    }
  }
}

TEST_CASE("prove_non_halting examples") {
  const auto cfg = plain(50);
  SUBCASE("no halt entry") {
    CHECK(prove_non_halting(RuleTable(2), cfg) == NonHaltReason::NoHaltRule);
  }
  SUBCASE("blank escape") {
    RuleTable t(2);
    t.set(1, Symbol::Zero, Action::step(Symbol::Zero, Move::Right, 1));
    t.set(2, Symbol::One, Action::halt(Symbol::One));
    CHECK(prove_non_halting(t, cfg) == NonHaltReason::BlankEscape);
  }
  SUBCASE("escape through a closed chain of states") {
    RuleTable t(3);
    t.set(1, Symbol::Zero, Action::step(Symbol::One, Move::Left, 2));
    t.set(2, Symbol::Zero, Action::step(Symbol::Zero, Move::Left, 3));
    t.set(3, Symbol::Zero, Action::step(Symbol::One, Move::Left, 2));
    t.set(3, Symbol::One, Action::halt(Symbol::One));
    CHECK(prove_non_halting(t, cfg) == NonHaltReason::BlankEscape);
  }
  SUBCASE("two-cell ping-pong") {
    // 1,0 -> 1,R,2 ; 2,0 -> 1,L,1 ; 1,1 -> 1,R,2 ; 2,1 -> 1,L,1. The tape
    // becomes "11" after two steps and then the configuration (state 1, head
    // on the left cell) recurs every two steps. State 3 holds the only
    // halting entry and is unreachable.
    RuleTable t(3);
    t.set(1, Symbol::Zero, Action::step(Symbol::One, Move::Right, 2));
    t.set(2, Symbol::Zero, Action::step(Symbol::One, Move::Left, 1));
    t.set(1, Symbol::One, Action::step(Symbol::One, Move::Right, 2));
    t.set(2, Symbol::One, Action::step(Symbol::One, Move::Left, 1));
    t.set(3, Symbol::Zero, Action::halt(Symbol::One));
    CHECK(prove_non_halting(t, cfg) == NonHaltReason::CycleDetected);
    CHECK(std::holds_alternative<StepLimit>(simulate(t, plain(1000))));
  }
  SUBCASE("halting machine is not proved") {
    RuleTable t(2);
    t.set(1, Symbol::Zero, Action::halt(Symbol::Zero));
    CHECK_FALSE(prove_non_halting(t, cfg).has_value());
  }
}

TEST_CASE("non-halting proofs are sound") {
  // Whenever a reason is returned, ten times the budget still does not halt.
  auto check = [](const RuleTable& t, Symbol blank) {
    const auto cfg = plain(30, blank);
    if (prove_non_halting(t, cfg)) REQUIRE_FALSE(std::holds_alternative<Halted>(simulate(t, plain(300, blank))));
  };
  RuleTable t(2);
  for (std::uint64_t i = 0; i < space_size(2); ++i) {
    decode_machine_into({i, 2}, t);
    check(t, Symbol::Zero);
    check(t, Symbol::One);
  }
  std::mt19937_64 rng(99);
  for (int k = 0; k < 5000; ++k) check(random_table(3, rng), Symbol::Zero);
}

TEST_CASE("transform is an involution") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 500; ++k) {
    const auto t = random_table(3, rng);
    CHECK(transform(transform(t, Symmetry::ReflectDirections), Symmetry::ReflectDirections) == t);
    CHECK(transform(transform(t, Symmetry::ComplementSymbols), Symmetry::ComplementSymbols) == t);
  }
}

TEST_CASE("symmetry properties over random (2,2) machines") {
  std::mt19937_64 rng(11);
  Simulator zero(plain(10));
  Simulator one(plain(10, Symbol::One));
  int halted = 0;
  for (int k = 0; k < 10000; ++k) {
    const auto t = random_table(2, rng);
    const auto base = zero.run(t);
    const auto reflected = zero.run(transform(t, Symmetry::ReflectDirections));
    const auto complemented = one.run(transform(t, Symmetry::ComplementSymbols));
    REQUIRE(std::holds_alternative<Halted>(base) == std::holds_alternative<Halted>(reflected));
    REQUIRE(std::holds_alternative<Halted>(base) == std::holds_alternative<Halted>(complemented));
    if (const auto* h = std::get_if<Halted>(&base)) {
      ++halted;
      auto rev = h->output;
      std::reverse(rev.begin(), rev.end());
      CHECK(std::get<Halted>(reflected).output == rev);
      CHECK(std::get<Halted>(complemented).output == complement(h->output));
    }
  }
  CHECK(halted > 0);
}

TEST_CASE("machine text format") {
  RuleTable t(2);
  t.set(1, Symbol::Zero, Action::step(Symbol::One, Move::Right, 2));
  t.set(2, Symbol::Zero, Action::halt(Symbol::One));
  const auto text = to_text(t);
  CHECK(text ==
        "1,0 -> 1,R,2\n"
        "1,1 -> 0,L,1\n"
        "2,0 -> 1,HALT\n"
        "2,1 -> 0,L,1\n");
  CHECK(parse_machine_text(text) == t);

  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const auto u = random_table(3, rng);
    CHECK(parse_machine_text(to_text(u)) == u);
  }

  CHECK_THROWS_AS(parse_machine_text("1,0 -> 1,R,2\n1,0 -> 1,HALT\n"), ParseError);
  CHECK_THROWS_AS(parse_machine_text("1,0 => 1,HALT\n1,1 -> 1,HALT\n"), ParseError);
  CHECK_THROWS_AS(parse_machine_text("1,0 -> 1,R,3\n1,1 -> 1,HALT\n"), ParseError);
  CHECK_THROWS_AS(parse_machine_text("1,0 -> 1,HALT\n"), ParseError);
  try {
    parse_machine_text("1,0 -> 1,HALT\n1,1 -> 2,HALT\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}
