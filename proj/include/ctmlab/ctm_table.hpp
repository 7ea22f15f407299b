#pragma once

// Algorithmic probability and coding-theorem complexity tables.
//
// A CtmTable maps each output string of one or more rule spaces to its
// empirical probability and to complexity_bits = -log2(probability).
// Tables are immutable once built; merge_ctm produces a new table.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctmlab/space.hpp"

namespace ctmlab {

enum class Normalization : std::uint8_t {
  HaltingMachines,  // count / halted runs; a probability distribution
  AllMachines,      // count / total runs; sums to halted / total_runs
};

std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view s);

/// One rule space a table draws entries from.
struct SourceSpace {
  SpaceSpec spec;
  Census census;

  friend bool operator==(const SourceSpace&, const SourceSpace&) = default;
};

struct CtmEntry {
  std::uint64_t count = 0;
  double probability = 0.0;
  double complexity_bits = 0.0;
  int source_space = 0;  // state count of the rule space the entry came from
  int min_used_rules = 0;

  friend bool operator==(const CtmEntry&, const CtmEntry&) = default;
};

class CtmTable {
 public:
  using Entries = std::map<std::string, CtmEntry, std::less<>>;

  CtmTable(Normalization normalization, std::vector<SourceSpace> sources, Entries entries);

  Normalization normalization() const { return normalization_; }
  const std::vector<SourceSpace>& sources() const { return sources_; }
  const Entries& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  const CtmEntry* find(std::string_view s) const;
  const SourceSpace& source(int states) const;

  /// Length of the longest string in the table (0 when empty).
  std::size_t longest_string() const;

  /// Rows in canonical order: count desc, length asc, lexicographic.
  std::vector<std::pair<std::string, CtmEntry>> sorted() const;

  /// Sum of all entry probabilities.
  double probability_mass() const;

  friend bool operator==(const CtmTable&, const CtmTable&) = default;

 private:
  void validate() const;

  Normalization normalization_;
  std::vector<SourceSpace> sources_;
  Entries entries_;
};

/// Throws ValidationError when the table recorded no halting run.
CtmTable to_ctm(const FrequencyTable& freq, Normalization norm = Normalization::HaltingMachines);

std::optional<double> complexity_of(const CtmTable& table, std::string_view s);

/// Union of both tables; a string present in both keeps the entry from the
/// larger rule space (the newer table on equal state counts).
CtmTable merge_ctm(const CtmTable& older, const CtmTable& newer);

/// Canonical, byte-stable text form. Numbers use 17 significant digits.
std::string serialize(const CtmTable& table);
CtmTable parse_ctm_table(std::string_view text);

void save(const CtmTable& table, const std::filesystem::path& path);
CtmTable load_ctm_table(const std::filesystem::path& path);

}  // namespace ctmlab
