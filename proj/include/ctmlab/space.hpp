#pragma once

// Exhaustive enumeration of a rule space into output frequency counts.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctmlab/machine.hpp"

namespace ctmlab {

enum class BlankMode : std::uint8_t { Zero, BothBlanks };

std::string_view to_string(BlankMode m);
BlankMode parse_blank_mode(std::string_view s);

struct SpaceFilters {
  bool no_halt_rule = true;
  bool blank_escape = true;
  bool cycle = false;

  friend bool operator==(const SpaceFilters&, const SpaceFilters&) = default;
};

/// Step cutoff used when a SpaceSpec leaves max_steps at 0. Values for n <= 3
/// sit above the longest halting runtime of those spaces.
std::int64_t default_max_steps(int states);

struct SpaceSpec {
  int states = 2;
  BlankMode blank_mode = BlankMode::Zero;
  std::int64_t max_steps = 0;  // 0 selects default_max_steps(states)
  SpaceFilters filters;
  std::size_t cycle_memory_limit = 256;

  void validate() const;
  std::int64_t effective_max_steps() const;
  /// Machine runs in the space: space_size(states), doubled for BothBlanks.
  std::uint64_t run_count() const;
  RunConfig run_config(Symbol blank) const;

  friend bool operator==(const SpaceSpec&, const SpaceSpec&) = default;
};

/// Ordering is by machine index, blank 0 before blank 1.
struct ProducerRef {
  std::uint64_t index = 0;
  Symbol blank = Symbol::Zero;

  friend auto operator<=>(const ProducerRef&, const ProducerRef&) = default;
};

struct Census {
  std::uint64_t total_runs = 0;
  std::uint64_t halted = 0;
  std::uint64_t no_halt_rule = 0;
  std::uint64_t blank_escape = 0;
  std::uint64_t cycle_detected = 0;
  std::uint64_t step_limited = 0;

  std::uint64_t proved_nonhalting() const { return no_halt_rule + blank_escape + cycle_detected; }

  Census& operator+=(const Census& o);
  friend bool operator==(const Census&, const Census&) = default;
};

struct StringStats {
  std::uint64_t count = 0;
  int min_used_rules = 0;
  ProducerRef first_producer;

  friend bool operator==(const StringStats&, const StringStats&) = default;
};

/// Canonical ordering of table rows: count descending, then length
/// ascending, then lexicographic.
bool canonical_before(std::uint64_t count_a, std::string_view a, std::uint64_t count_b,
                      std::string_view b);

class FrequencyTable {
 public:
  /// The stored spec has max_steps resolved to its effective value.
  explicit FrequencyTable(SpaceSpec spec);

  const SpaceSpec& spec() const { return spec_; }
  const Census& census() const { return census_; }
  const std::map<std::string, StringStats, std::less<>>& entries() const { return entries_; }

  void record_halt(std::string_view output, int used_rules, ProducerRef producer);
  void record_outcome(const RunOutcome& outcome, ProducerRef producer);

  /// Rows in canonical order.
  std::vector<std::pair<std::string, StringStats>> sorted() const;

  /// Throws ValidationError if census or count bookkeeping is inconsistent.
  void check_invariants() const;

  /// Adds `other` into this table. Specs must match.
  void absorb(const FrequencyTable& other);

  friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;

 private:
  SpaceSpec spec_;
  std::map<std::string, StringStats, std::less<>> entries_;
  Census census_;
};

struct IndexRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;

  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct ShardPlan {
  std::vector<IndexRange> shards;

  /// Splits [0, space_size(states)) into `shard_count` contiguous ranges of
  /// near-equal size.
  static ShardPlan even(int states, std::size_t shard_count);
  static ShardPlan over(std::uint64_t total, std::size_t shard_count);

  void validate(std::uint64_t total) const;
};

/// Runs every machine index in `range` (both blanks for BothBlanks).
FrequencyTable run_range(const SpaceSpec& spec, IndexRange range);

/// Runs an explicit list of machine indices, e.g. a sample of the space.
FrequencyTable run_indices(const SpaceSpec& spec, std::span<const std::uint64_t> indices);

/// Runs every shard of `plan` with up to `threads` workers (0: one per shard)
/// and folds the partial tables in shard order. The result does not depend on
/// the shard or thread count.
FrequencyTable run_space(const SpaceSpec& spec, const ShardPlan& plan, std::size_t threads = 0);

/// Sums partial tables from disjoint ranges of one spec.
FrequencyTable merge_shards(const std::vector<FrequencyTable>& parts);

/// Canonical text form (metadata line, column header, rows in canonical order).
std::string serialize(const FrequencyTable& table);

}  // namespace ctmlab
