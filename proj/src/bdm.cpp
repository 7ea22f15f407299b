#include "ctmlab/bdm.hpp"

#include <cmath>
#include <vector>

#include "ctmlab/baselines.hpp"
#include "ctmlab/errors.hpp"
#include "text_util.hpp"

namespace ctmlab {

void BdmConfig::validate() const {
  if (block_len < 1) throw ValidationError("block length must be at least 1");
}

std::size_t Decomposition::covered_length() const {
  std::size_t n = tail ? tail->size() : 0;
  for (const auto& [b, k] : blocks) n += b.size() * k;
  return n;
}

Decomposition partition(std::string_view s, const BdmConfig& cfg) {
  cfg.validate();
  if (!detail::is_binary(s)) throw ValidationError("BDM needs a nonempty binary string");
  Decomposition d;
  const auto full = s.size() / cfg.block_len * cfg.block_len;
  for (std::size_t i = 0; i < full; i += cfg.block_len) ++d.blocks[std::string(s.substr(i, cfg.block_len))];
  if (full < s.size() && cfg.boundary == Boundary::KeepShortTail) d.tail = std::string(s.substr(full));
  return d;
}

double block_complexity(const CtmTable& table, std::string_view block, Fallback fallback) {
  if (const auto* e = table.find(block)) return e->complexity_bits;
  if (fallback == Fallback::Error)
    throw LookupError("block '" + std::string(block) + "' is not in the CTM table");
  const auto len = static_cast<double>(block.size());
  return len + std::log2(len);
}

double bdm_value(const Decomposition& d, const CtmTable& table, Fallback fallback) {
  double total = 0.0;
  for (const auto& [b, k] : d.blocks)
    total += block_complexity(table, b, fallback) + std::log2(static_cast<double>(k));
  if (d.tail) total += block_complexity(table, *d.tail, fallback);
  return total;
}

double bdm_value(std::string_view s, const CtmTable& table, const BdmConfig& cfg) {
  cfg.validate();
  if (cfg.fallback == Fallback::Error && cfg.block_len > table.longest_string())
    throw ValidationError("block length " + std::to_string(cfg.block_len) +
                          " exceeds the longest string in the table");
  return bdm_value(partition(s, cfg), table, cfg.fallback);
}

EntropyComparison block_entropy_equiv_check(std::string_view s, const CtmTable& table,
                                            const BdmConfig& cfg) {
  const auto d = partition(s, cfg);
  std::vector<std::uint64_t> counts;
  for (const auto& [b, k] : d.blocks) counts.push_back(k);
  EntropyComparison r;
  r.bdm = bdm_value(s, table, cfg);
  r.block_entropy = entropy_of_counts(counts);
  r.difference = r.bdm - r.block_entropy;
  return r;
}

}  // namespace ctmlab
