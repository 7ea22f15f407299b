#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctmlab/ctm_table.hpp"
#include "ctmlab/errors.hpp"

using namespace ctmlab;

namespace {

SpaceSpec spec_for(int n) {
  SpaceSpec s;
  s.states = n;
  return s;
}

FrequencyTable toy(int n = 2) {
  FrequencyTable f(spec_for(n));
  for (int i = 0; i < 3; ++i) f.record_outcome(Halted{"0", 1, 1, 0, 0}, {static_cast<std::uint64_t>(i), Symbol::Zero});
  f.record_outcome(Halted{"1", 1, 1, 0, 0}, {7, Symbol::Zero});
  for (int i = 0; i < 4; ++i) f.record_outcome(NonHaltingProved{NonHaltReason::NoHaltRule}, {100, Symbol::Zero});
  return f;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ctmlab_test_" + name);
}

}  // namespace

TEST_CASE("probabilities over halting machines") {
  const auto t = to_ctm(toy());
  REQUIRE(t.size() == 2);
  CHECK(t.find("0")->probability == 0.75);
  CHECK(t.find("1")->probability == 0.25);
  CHECK(t.find("0")->complexity_bits == doctest::Approx(0.41503749927884381).epsilon(1e-15));
  CHECK(t.find("1")->complexity_bits == 2.0);
  CHECK(t.probability_mass() == 1.0);
  CHECK(t.find("0")->source_space == 2);
  CHECK(t.find("0")->count == 3);
}

TEST_CASE("probabilities over all machines") {
  const auto t = to_ctm(toy(), Normalization::AllMachines);
  CHECK(t.find("0")->probability == 0.375);
  CHECK(t.find("1")->probability == 0.125);
  CHECK(t.find("1")->complexity_bits == 3.0);
  CHECK(t.probability_mass() == 0.5);
}

TEST_CASE("(2,2) table") {
  SpaceSpec spec = spec_for(2);
  const auto t = to_ctm(run_space(spec, ShardPlan::even(2, 1)));
  CHECK(t.size() == 17);
  CHECK(t.find("0")->probability == 1000.0 / 3044.0);
  CHECK(*complexity_of(t, "0") == 0.0 - std::log2(1000.0 / 3044.0));
  CHECK(*complexity_of(t, "0") == doctest::Approx(1.6059684).epsilon(1e-7));
  CHECK(t.find("00")->count == 264);
  CHECK(t.find("1111")->count == 2);
  CHECK_FALSE(complexity_of(t, "00000").has_value());
  CHECK(t.probability_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.longest_string() == 4);
  for (const auto& [s, e] : t.entries()) {
    CHECK(e.min_used_rules >= 1);
    CHECK(e.min_used_rules <= 4);
  }
}

TEST_CASE("to_ctm rejects a table without halting runs") {
  FrequencyTable f(spec_for(2));
  f.record_outcome(StepLimit{}, {0, Symbol::Zero});
  CHECK_THROWS_AS(to_ctm(f), ValidationError);
}

TEST_CASE("constructor validation") {
  const auto good = to_ctm(toy());
  auto entries = good.entries();
  SUBCASE("probability must match count") {
    entries["0"].probability = 0.7;
    CHECK_THROWS_AS(CtmTable(Normalization::HaltingMachines, good.sources(), entries), ValidationError);
  }
  SUBCASE("non-binary key") {
    entries["2"] = entries["0"];
    CHECK_THROWS_AS(CtmTable(Normalization::HaltingMachines, good.sources(), entries), ValidationError);
  }
  SUBCASE("unknown source space") {
    entries["0"].source_space = 3;
    CHECK_THROWS_AS(CtmTable(Normalization::HaltingMachines, good.sources(), entries), ValidationError);
  }
  SUBCASE("used rules out of range") {
    entries["0"].min_used_rules = 5;
    CHECK_THROWS_AS(CtmTable(Normalization::HaltingMachines, good.sources(), entries), ValidationError);
  }
}

TEST_CASE("merge prefers the larger space") {
  const auto small = to_ctm(run_space(spec_for(2), ShardPlan::even(2, 1)));
  FrequencyTable f3(spec_for(3));
  f3.record_outcome(Halted{"0", 1, 1, 0, 0}, {0, Symbol::Zero});
  f3.record_outcome(Halted{"0000000", 9, 3, 0, 6}, {1, Symbol::Zero});
  const auto large = to_ctm(f3);

  for (const auto& m : {merge_ctm(small, large), merge_ctm(large, small)}) {
    CHECK(m.size() == 18);
    CHECK(m.find("0")->source_space == 3);
    CHECK(m.find("0")->probability == 0.5);
    CHECK(m.find("00")->source_space == 2);
    CHECK(m.find("0000000")->source_space == 3);
    CHECK(m.sources().size() == 2);
  }
  CHECK(merge_ctm(small, large) == merge_ctm(large, small));
  const auto m = merge_ctm(small, large);
  CHECK(merge_ctm(m, m) == m);
  CHECK(merge_ctm(m, small) == m);
}

TEST_CASE("merge on equal state counts keeps the newer entry") {
  const auto a = to_ctm(toy());
  CHECK(merge_ctm(a, a) == a);
  FrequencyTable f(spec_for(2));
  f.record_outcome(Halted{"1", 1, 1, 0, 0}, {0, Symbol::Zero});
  const auto b = to_ctm(f);
  CHECK_THROWS_AS(merge_ctm(a, b), ValidationError);
}

TEST_CASE("merge rejects mixed normalizations") {
  CHECK_THROWS_AS(merge_ctm(to_ctm(toy()), to_ctm(toy(), Normalization::AllMachines)), ValidationError);
}

TEST_CASE("canonical order") {
  const auto t = to_ctm(run_space(spec_for(2), ShardPlan::even(2, 1)));
  const auto rows = t.sorted();
  REQUIRE(rows.size() == 17);
  CHECK(rows[0].first == "0");
  CHECK(rows[1].first == "1");
  CHECK(rows[2].first == "00");
  CHECK(rows[3].first == "01");
  CHECK(rows[4].first == "10");
  CHECK(rows[5].first == "11");
  CHECK(rows[6].first == "011");
  CHECK(rows.back().first == "1111");
}

TEST_CASE("serialization round trip") {
  const auto t = to_ctm(run_space(spec_for(2), ShardPlan::even(2, 1)));
  const auto text = serialize(t);
  CHECK(parse_ctm_table(text) == t);
  CHECK(serialize(parse_ctm_table(text)) == text);

  std::istringstream in(text);
  std::string meta, header, first;
  std::getline(in, meta);
  std::getline(in, header);
  std::getline(in, first);
  CHECK(meta.find("\"format\":\"ctm-table/1\"") != std::string::npos);
  CHECK(header == "string,count,probability,complexity_bits,min_used_rules,source_space");
  CHECK(first == "0,1000,0.32851511169513797,1.6059683588414584,1,2");

  const auto a = temp_path("a.ctm");
  const auto b = temp_path("b.ctm");
  save(t, a);
  save(load_ctm_table(a), b);
  std::ifstream fa(a), fb(b);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(sa.str() == text);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST_CASE("parse errors carry line numbers") {
  const auto text = serialize(to_ctm(toy()));
  const auto first_row = text.find("\n0,");
  REQUIRE(first_row != std::string::npos);

  SUBCASE("duplicate key") {
    const auto row_end = text.find('\n', first_row + 1);
    const auto row = text.substr(first_row, row_end - first_row);
    const auto dup = text + row.substr(1) + "\n";
    try {
      parse_ctm_table(dup);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 5);
    }
  }
  SUBCASE("bad number") {
    auto bad = text;
    bad.replace(first_row + 3, 1, "x");
    CHECK_THROWS_AS(parse_ctm_table(bad), ParseError);
  }
  SUBCASE("missing header") {
    CHECK_THROWS_AS(parse_ctm_table(text.substr(0, text.find('\n') + 1)), ParseError);
  }
  SUBCASE("not json") {
    CHECK_THROWS_AS(parse_ctm_table("hello\n"), ParseError);
  }
}

TEST_CASE("load errors") {
  CHECK_THROWS_AS(load_ctm_table(temp_path("does_not_exist.ctm")), IoError);
}
