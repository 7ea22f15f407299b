#pragma once

// Block Decomposition Method: extends CTM values of short blocks to long
// binary strings. BDM(s) = sum over distinct blocks b of CTM(b) + log2(n_b),
// where n_b is the number of times b occurs in the partition of s.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "ctmlab/ctm_table.hpp"

namespace ctmlab {

enum class Boundary : std::uint8_t { DropRemainder, KeepShortTail };
enum class Fallback : std::uint8_t { Error, LogLengthPenalty };

struct BdmConfig {
  std::size_t block_len = 12;
  Boundary boundary = Boundary::DropRemainder;
  Fallback fallback = Fallback::LogLengthPenalty;

  void validate() const;
};

struct Decomposition {
  std::map<std::string, std::uint64_t> blocks;
  std::optional<std::string> tail;

  std::size_t covered_length() const;

  friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

/// Consecutive non-overlapping blocks from the left.
Decomposition partition(std::string_view s, const BdmConfig& cfg);

/// CTM of a single block, or len + log2(len) for a missing block under
/// LogLengthPenalty. Throws LookupError for a missing block under Error.
double block_complexity(const CtmTable& table, std::string_view block, Fallback fallback);

double bdm_value(std::string_view s, const CtmTable& table, const BdmConfig& cfg);
double bdm_value(const Decomposition& d, const CtmTable& table, Fallback fallback);

struct EntropyComparison {
  double bdm = 0.0;
  double block_entropy = 0.0;  // over the full blocks of the same partition
  double difference = 0.0;     // bdm - block_entropy

  friend bool operator==(const EntropyComparison&, const EntropyComparison&) = default;
};

EntropyComparison block_entropy_equiv_check(std::string_view s, const CtmTable& table,
                                            const BdmConfig& cfg);

}  // namespace ctmlab
