#include <doctest.h>

#include <cmath>

#include "ctmlab/bdm.hpp"
#include "ctmlab/errors.hpp"

using namespace ctmlab;

namespace {

const CtmTable& table22() {
  static const CtmTable t = [] {
    SpaceSpec spec;
    spec.states = 2;
    return to_ctm(run_space(spec, ShardPlan::even(2, 1)));
  }();
  return t;
}

double ctm(std::string_view s) { return table22().find(s)->complexity_bits; }

BdmConfig cfg(std::size_t len, Boundary b = Boundary::DropRemainder, Fallback f = Fallback::LogLengthPenalty) {
  return {len, b, f};
}

}  // namespace

TEST_CASE("partition") {
  SUBCASE("exact fit") {
    const auto d = partition("010101", cfg(2));
    CHECK(d.blocks == std::map<std::string, std::uint64_t>{{"01", 3}});
    CHECK_FALSE(d.tail.has_value());
    CHECK(d.covered_length() == 6);
  }
  SUBCASE("remainder dropped") {
    const auto d = partition("0001101", cfg(3));
    CHECK(d.blocks == std::map<std::string, std::uint64_t>{{"000", 1}, {"110", 1}});
    CHECK_FALSE(d.tail.has_value());
    CHECK(d.covered_length() == 6);
  }
  SUBCASE("remainder kept") {
    const auto d = partition("0001101", cfg(3, Boundary::KeepShortTail));
    CHECK(d.tail == std::optional<std::string>("1"));
    CHECK(d.covered_length() == 7);
  }
  SUBCASE("shorter than one block") {
    CHECK(partition("01", cfg(3)).blocks.empty());
  }
  SUBCASE("invalid input") {
    CHECK_THROWS_AS(partition("0120", cfg(2)), ValidationError);
    CHECK_THROWS_AS(partition("", cfg(2)), ValidationError);
    CHECK_THROWS_AS(partition("01", cfg(0)), ValidationError);
  }
}

TEST_CASE("a single block is its own CTM value") {
  for (const auto& [s, e] : table22().entries()) CHECK(bdm_value(s, table22(), cfg(s.size())) == e.complexity_bits);
}

TEST_CASE("repetition adds log2 of the multiplicity") {
  for (std::string b : {"0", "01", "110", "1001"}) {
    std::string s;
    for (int k = 1; k <= 9; ++k) {
      s += b;
      CHECK(bdm_value(s, table22(), cfg(b.size())) == doctest::Approx(ctm(b) + std::log2(k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sum over distinct blocks") {
  CHECK(bdm_value("00011000", table22(), cfg(2)) ==
        doctest::Approx(ctm("00") + 1.0 + ctm("01") + ctm("10")).epsilon(1e-12));
  CHECK(bdm_value("0101101", table22(), cfg(2, Boundary::KeepShortTail)) ==
        doctest::Approx(ctm("01") + 1.0 + ctm("10") + ctm("1")).epsilon(1e-12));
  CHECK(bdm_value("0101101", table22(), cfg(2)) == doctest::Approx(ctm("01") + 1.0 + ctm("10")).epsilon(1e-12));
}

TEST_CASE("missing blocks") {
  SUBCASE("log-length penalty") {
    CHECK(block_complexity(table22(), "000000", Fallback::LogLengthPenalty) == 6.0 + std::log2(6.0));
    CHECK(bdm_value("0000000000", table22(), cfg(5)) == doctest::Approx(5.0 + std::log2(5.0) + 1.0));
  }
  SUBCASE("strict lookup names the block") {
    try {
      block_complexity(table22(), "01100", Fallback::Error);
      FAIL("expected LookupError");
    } catch (const LookupError& e) {
      CHECK(std::string(e.what()).find("01100") != std::string::npos);
    }
    CHECK_THROWS_AS(bdm_value("000000", table22(), cfg(3, Boundary::DropRemainder, Fallback::Error)),
                    LookupError);
  }
  SUBCASE("strict mode rejects blocks longer than any table string") {
    CHECK_THROWS_AS(bdm_value("00000", table22(), cfg(5, Boundary::DropRemainder, Fallback::Error)),
                    ValidationError);
    CHECK(bdm_value("1111", table22(), cfg(4, Boundary::DropRemainder, Fallback::Error)) == ctm("1111"));
  }
}

TEST_CASE("entropy comparison uses the same partition") {
  const auto r = block_entropy_equiv_check("00011000", table22(), cfg(2));
  CHECK(r.block_entropy == doctest::Approx(1.5));
  CHECK(r.bdm == bdm_value("00011000", table22(), cfg(2)));
  CHECK(r.difference == r.bdm - r.block_entropy);
}

TEST_CASE("all-miss BDM can order strings against block entropy") {
  // With every block missing, BDM only sees the number of distinct blocks and
  // their multiplicities, and with enough blocks it ranks some pairs opposite
  // to block entropy.
  const std::string a(12, '0');
  const std::string b = std::string(6, '0') + std::string(6, '1');
  const std::string c = "010011000111";
  std::string x, y;
  for (int i = 0; i < 10; ++i) x += a;
  x += b + c;
  for (int i = 0; i < 6; ++i) y += a;
  for (int i = 0; i < 6; ++i) y += b;
  const auto rx = block_entropy_equiv_check(x, table22(), cfg(12));
  const auto ry = block_entropy_equiv_check(y, table22(), cfg(12));
  const double penalty = 12.0 + std::log2(12.0);
  CHECK(rx.bdm == doctest::Approx(3 * penalty + std::log2(10.0)));
  CHECK(ry.bdm == doctest::Approx(2 * penalty + 2 * std::log2(6.0)));
  CHECK(rx.bdm > ry.bdm);
  CHECK(rx.block_entropy < ry.block_entropy);
}
