#pragma once

// Comparative reports over CTM tables: length-block structure, the
// used-rules trend, divergence from entropy, value diversity against LZ78,
// and stability across rule spaces.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ctmlab/bdm.hpp"
#include "ctmlab/ctm_table.hpp"

namespace ctmlab {

/// 1-based ranks of `values` in ascending order; ties get their average rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman rank correlation with average ranks for ties. Throws
/// ValidationError for fewer than two pairs or a constant ranking.
double spearman_rho(std::span<const std::pair<double, double>> pairs);

/// Value at nearest rank ceil(p/100 * N) of `values` (any order).
double nearest_rank_percentile(std::vector<double> values, double p);

/// Items ordered by descending score, ties lexicographic; no duplicates.
class RankedList {
 public:
  explicit RankedList(std::vector<std::pair<std::string, double>> items);

  const std::vector<std::pair<std::string, double>>& items() const { return items_; }

 private:
  std::vector<std::pair<std::string, double>> items_;
};

// ---------------------------------------------------------------------------
// Typed analyses

struct LengthBlock {
  std::size_t length = 0;
  std::vector<std::string> ranked;  // most probable first
  std::size_t zeros_rank = 0;       // 1 + strings of the block strictly more probable than 0^k; 0 if absent
  std::size_t ones_rank = 0;        // same for 1^k
};

/// A string ranked globally above the first slot its length block would
/// occupy if the distribution were sorted purely by length.
struct LengthAnomaly {
  std::string string;
  std::size_t global_rank = 0;  // 1-based
  std::size_t block_start = 0;  // 1-based: number of shorter strings + 1
  std::size_t places_ahead = 0;

  friend bool operator==(const LengthAnomaly&, const LengthAnomaly&) = default;
};

struct LengthBlockAnalysis {
  std::vector<std::string> global_order;
  std::vector<LengthBlock> blocks;  // ascending length
  std::vector<LengthAnomaly> anomalies;  // in global rank order
};

LengthBlockAnalysis analyze_length_blocks(const CtmTable& table);

struct UsedRulesGroup {
  int used_rules = 0;
  std::size_t strings = 0;
  double min_bits = 0.0;
  double mean_bits = 0.0;
  double max_bits = 0.0;
};

struct UsedRulesAnalysis {
  std::vector<UsedRulesGroup> groups;  // ascending used_rules
  double rho = 0.0;                    // min_used_rules vs complexity_bits
};

UsedRulesAnalysis analyze_used_rules(const CtmTable& table);

struct DivergenceRow {
  std::string string;
  double bdm = 0.0;
  double entropy = 0.0;
  double block_entropy = 0.0;
  std::uint64_t lz78_bits = 0;
  bool flagged = false;
};

/// Flagged: Shannon entropy at or above the corpus' 75th nearest-rank
/// percentile and BDM at or below its 25th.
struct DivergenceAnalysis {
  std::vector<DivergenceRow> rows;  // sorted by length, then lexicographic
  double entropy_q3 = 0.0;
  double bdm_q1 = 0.0;
};

DivergenceAnalysis analyze_divergence(const CtmTable& table, const std::vector<std::string>& corpus,
                                      const BdmConfig& cfg);

/// BDM values are grouped after rounding to 1e-9 bits so that mathematically
/// equal sums compare equal.
struct DiversityAnalysis {
  std::size_t length = 0;
  std::map<std::uint64_t, std::uint64_t> lz78_histogram;
  std::map<double, std::uint64_t> bdm_histogram;
};

DiversityAnalysis analyze_diversity(const CtmTable& table, std::size_t length, const BdmConfig& cfg);

/// `above` outranks `below` in the small table, and the large table orders
/// them the other way.
struct RankInversion {
  std::string above;
  std::string below;
  double percentile = 0.0;  // frequency percentile of the more frequent member in the large table

  friend bool operator==(const RankInversion&, const RankInversion&) = default;
};

struct CrossSpaceAnalysis {
  std::size_t shared = 0;
  double rho_all = 0.0;
  std::optional<double> rho_top_half;  // absent when the top half has no rank variance
  std::vector<RankInversion> inversions;
  std::map<std::string, double> percentile;  // 100 = most frequent shared string in the large table
};

CrossSpaceAnalysis analyze_cross_space(const CtmTable& small, const CtmTable& large);

// ---------------------------------------------------------------------------
// Serializable reports

enum class ReportKind : std::uint8_t {
  LengthBlocks,
  Anomalies,
  UsedRulesConsistency,
  Divergence,
  Diversity,
  CrossSpace
};

std::string_view to_string(ReportKind k);

using Cell = std::variant<std::int64_t, double, std::string>;

struct ReportSection {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Report {
  ReportKind kind;
  std::vector<std::string> provenance;
  std::vector<ReportSection> sections;
};

enum class ReportFormat : std::uint8_t { Csv, JsonLines };

ReportFormat parse_report_format(std::string_view s);
std::string render(const Report& report, ReportFormat format = ReportFormat::Csv);

/// Stable identity of a table: its shape plus a hash of its canonical text.
std::string table_identity(const CtmTable& table);

Report length_block_report(const CtmTable& table);
Report anomaly_report(const CtmTable& table);
Report used_rules_consistency(const CtmTable& table);
Report divergence_report(const CtmTable& table, const std::vector<std::string>& corpus,
                         const BdmConfig& cfg);
Report diversity_report(const CtmTable& table, std::size_t length, const BdmConfig& cfg);
Report cross_space_report(const CtmTable& small, const CtmTable& large);

}  // namespace ctmlab
