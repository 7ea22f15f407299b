#include "ctmlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ctmlab/baselines.hpp"
#include "ctmlab/errors.hpp"
#include "text_util.hpp"

namespace ctmlab {

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (auto k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman_rho(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 2) throw ValidationError("rank correlation needs at least two pairs");
  std::vector<double> a, b;
  a.reserve(pairs.size());
  b.reserve(pairs.size());
  for (const auto& [x, y] : pairs) {
    a.push_back(x);
    b.push_back(y);
  }
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(pairs.size());
  const double mean = (n + 1.0) / 2.0;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double da = ra[i] - mean;
    const double db = rb[i] - mean;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw ValidationError("rank correlation of a constant ranking");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double nearest_rank_percentile(std::vector<double> values, double p) {
  if (values.empty()) throw ValidationError("percentile of an empty set");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return values[rank - 1];
}

RankedList::RankedList(std::vector<std::pair<std::string, double>> items) : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (std::size_t i = 1; i < items_.size(); ++i)
    if (items_[i].first == items_[i - 1].first)
      throw ValidationError("ranked list has duplicate item '" + items_[i].first + "'");
}

namespace {

/// Most probable first; ties by length, then lexicographic.
std::vector<std::string> probability_order(const CtmTable& table) {
  std::vector<std::pair<std::string, double>> rows;
  rows.reserve(table.size());
  for (const auto& [s, e] : table.entries()) rows.emplace_back(s, e.probability);
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  });
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (auto& [s, p] : rows) out.push_back(std::move(s));
  return out;
}

}  // namespace

LengthBlockAnalysis analyze_length_blocks(const CtmTable& table) {
  LengthBlockAnalysis a;
  a.global_order = probability_order(table);

  std::map<std::size_t, std::size_t> per_length;
  for (const auto& s : a.global_order) ++per_length[s.size()];
  std::map<std::size_t, std::size_t> block_start;  // 0-based
  std::size_t shorter = 0;
  for (const auto& [len, n] : per_length) {
    block_start[len] = shorter;
    shorter += n;
  }

  std::map<std::size_t, LengthBlock> blocks;
  for (std::size_t i = 0; i < a.global_order.size(); ++i) {
    const auto& s = a.global_order[i];
    auto& b = blocks[s.size()];
    b.length = s.size();
    b.ranked.push_back(s);
    const auto start = block_start[s.size()];
    if (i < start) a.anomalies.push_back({s, i + 1, start + 1, start - i});
  }
  for (auto& [len, b] : blocks) {
    for (const auto& s : b.ranked) {
      const bool zeros = s.find('1') == std::string::npos;
      const bool ones = s.find('0') == std::string::npos;
      if (!zeros && !ones) continue;
      const double p = table.find(s)->probability;
      const auto ahead = std::count_if(b.ranked.begin(), b.ranked.end(),
                                       [&](const std::string& o) { return table.find(o)->probability > p; });
      (zeros ? b.zeros_rank : b.ones_rank) = static_cast<std::size_t>(ahead) + 1;
    }
    a.blocks.push_back(std::move(b));
  }
  return a;
}

UsedRulesAnalysis analyze_used_rules(const CtmTable& table) {
  std::map<int, std::vector<double>> groups;
  std::vector<std::pair<double, double>> pairs;
  for (const auto& [s, e] : table.entries()) {
    if (e.min_used_rules < 1) throw ValidationError("table entry '" + s + "' lacks min_used_rules");
    groups[e.min_used_rules].push_back(e.complexity_bits);
    pairs.emplace_back(e.min_used_rules, e.complexity_bits);
  }
  UsedRulesAnalysis a;
  for (const auto& [k, bits] : groups) {
    UsedRulesGroup g;
    g.used_rules = k;
    g.strings = bits.size();
    g.min_bits = *std::min_element(bits.begin(), bits.end());
    g.max_bits = *std::max_element(bits.begin(), bits.end());
    g.mean_bits = std::accumulate(bits.begin(), bits.end(), 0.0) / static_cast<double>(bits.size());
    a.groups.push_back(g);
  }
  a.rho = spearman_rho(pairs);
  return a;
}

DivergenceAnalysis analyze_divergence(const CtmTable& table, const std::vector<std::string>& corpus,
                                      const BdmConfig& cfg) {
  const std::set<std::string> unique(corpus.begin(), corpus.end());
  DivergenceAnalysis a;
  if (unique.empty()) return a;
  for (const auto& s : unique) {
    DivergenceRow r;
    r.string = s;
    const auto cmp = block_entropy_equiv_check(s, table, cfg);
    r.bdm = cmp.bdm;
    r.block_entropy = cmp.block_entropy;
    r.entropy = shannon_entropy(s);
    r.lz78_bits = lz78_bit_length(s);
    a.rows.push_back(std::move(r));
  }
  std::sort(a.rows.begin(), a.rows.end(), [](const auto& x, const auto& y) {
    if (x.string.size() != y.string.size()) return x.string.size() < y.string.size();
    return x.string < y.string;
  });
  std::vector<double> entropies, bdms;
  for (const auto& r : a.rows) {
    entropies.push_back(r.entropy);
    bdms.push_back(r.bdm);
  }
  a.entropy_q3 = nearest_rank_percentile(entropies, 75.0);
  a.bdm_q1 = nearest_rank_percentile(bdms, 25.0);
  // A constant-entropy corpus has no high-entropy quartile to speak of.
  const bool spread = *std::max_element(entropies.begin(), entropies.end()) >
                      *std::min_element(entropies.begin(), entropies.end());
  for (auto& r : a.rows) r.flagged = spread && r.entropy >= a.entropy_q3 && r.bdm <= a.bdm_q1;
  return a;
}

DiversityAnalysis analyze_diversity(const CtmTable& table, std::size_t length, const BdmConfig& cfg) {
  if (length < 1 || length > 16) throw ValidationError("diversity sweep length must be in 1..16");
  DiversityAnalysis a;
  a.length = length;
  std::string s(length, '0');
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << length); ++v) {
    for (std::size_t i = 0; i < length; ++i) s[i] = (v >> (length - 1 - i)) & 1U ? '1' : '0';
    ++a.lz78_histogram[lz78_bit_length(s)];
    const double bdm = bdm_value(s, table, cfg);
    ++a.bdm_histogram[static_cast<double>(std::llround(bdm * 1e9)) / 1e9];
  }
  return a;
}

CrossSpaceAnalysis analyze_cross_space(const CtmTable& small, const CtmTable& large) {
  if (small.normalization() != large.normalization())
    throw ValidationError("cross-space comparison needs tables with the same normalization");
  std::vector<std::string> shared;
  for (const auto& s : probability_order(large))
    if (small.find(s)) shared.push_back(s);
  if (shared.empty()) throw ValidationError("tables share no strings");

  CrossSpaceAnalysis a;
  a.shared = shared.size();
  const auto n = shared.size();
  for (std::size_t i = 0; i < n; ++i)
    a.percentile[shared[i]] = n == 1 ? 100.0 : 100.0 * static_cast<double>(n - 1 - i) / static_cast<double>(n - 1);

  auto pairs_of = [&](std::size_t count) {
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < count; ++i)
      pairs.emplace_back(small.find(shared[i])->probability, large.find(shared[i])->probability);
    return pairs;
  };
  a.rho_all = n < 2 ? 1.0 : spearman_rho(pairs_of(n));
  const auto top = (n + 1) / 2;
  try {
    a.rho_top_half = spearman_rho(pairs_of(top));
  } catch (const ValidationError&) {
    a.rho_top_half.reset();
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& x = shared[i];
      const auto& y = shared[j];
      if (small.find(x)->probability > small.find(y)->probability &&
          large.find(x)->probability < large.find(y)->probability)
        a.inversions.push_back({x, y, std::max(a.percentile[x], a.percentile[y])});
    }
  }
  std::sort(a.inversions.begin(), a.inversions.end(), [](const auto& p, const auto& q) {
    if (p.percentile != q.percentile) return p.percentile > q.percentile;
    if (p.above != q.above) return p.above < q.above;
    return p.below < q.below;
  });
  return a;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ReportKind k) {
  switch (k) {
    case ReportKind::LengthBlocks: return "length_blocks";
    case ReportKind::Anomalies: return "anomalies";
    case ReportKind::UsedRulesConsistency: return "used_rules_consistency";
    case ReportKind::Divergence: return "divergence";
    case ReportKind::Diversity: return "diversity";
    case ReportKind::CrossSpace: return "cross_space";
  }
  return "unknown";
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json-lines") return ReportFormat::JsonLines;
  throw ValidationError("unknown report format '" + std::string(s) + "'");
}

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return detail::format_double(*d);
  return std::get<std::string>(c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (const auto* d = std::get_if<double>(&c)) return *d;
  return std::get<std::string>(c);
}

Cell count_cell(std::size_t v) { return static_cast<std::int64_t>(v); }

}  // namespace

std::string render(const Report& report, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::Csv) {
    os << "# report: " << to_string(report.kind) << '\n';
    for (const auto& p : report.provenance) os << "# source: " << p << '\n';
    for (const auto& sec : report.sections) {
      os << "## " << sec.name << '\n';
      for (std::size_t i = 0; i < sec.columns.size(); ++i) os << (i ? "," : "") << sec.columns[i];
      os << '\n';
      for (const auto& row : sec.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
        os << '\n';
      }
    }
    return os.str();
  }
  nlohmann::ordered_json head;
  head["report"] = std::string(to_string(report.kind));
  head["provenance"] = report.provenance;
  os << head.dump() << '\n';
  for (const auto& sec : report.sections) {
    for (const auto& row : sec.rows) {
      nlohmann::ordered_json j;
      j["section"] = sec.name;
      for (std::size_t i = 0; i < row.size() && i < sec.columns.size(); ++i)
        j[sec.columns[i]] = cell_json(row[i]);
      os << j.dump() << '\n';
    }
  }
  return os.str();
}

std::string table_identity(const CtmTable& table) {
  std::uint64_t hash = 14695981039346656037ULL;  // FNV-1a
  for (const unsigned char c : serialize(table)) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << "ctm-table states=";
  for (std::size_t i = 0; i < table.sources().size(); ++i) {
    const auto& spec = table.sources()[i].spec;
    os << (i ? "+" : "") << spec.states;
  }
  const auto& first = table.sources().front().spec;
  os << " blank=" << to_string(first.blank_mode) << " max_steps=" << first.max_steps
     << " normalization=" << to_string(table.normalization()) << " entries=" << table.size()
     << " fnv1a64=" << std::hex << hash;
  return os.str();
}

namespace {

ReportSection anomaly_section(const LengthBlockAnalysis& a) {
  ReportSection sec{"anomalies", {"string", "length", "global_rank", "block_start", "places_ahead"}, {}};
  for (const auto& x : a.anomalies)
    sec.rows.push_back({x.string, count_cell(x.string.size()), count_cell(x.global_rank),
                        count_cell(x.block_start), count_cell(x.places_ahead)});
  return sec;
}

}  // namespace

Report length_block_report(const CtmTable& table) {
  const auto a = analyze_length_blocks(table);
  Report r{ReportKind::LengthBlocks, {table_identity(table)}, {}};
  ReportSection blocks{"blocks", {"length", "strings", "zeros_rank", "ones_rank", "top"}, {}};
  ReportSection ranks{"ranking", {"length", "block_rank", "string", "probability"}, {}};
  for (const auto& b : a.blocks) {
    blocks.rows.push_back({count_cell(b.length), count_cell(b.ranked.size()), count_cell(b.zeros_rank),
                           count_cell(b.ones_rank), b.ranked.front()});
    for (std::size_t i = 0; i < b.ranked.size(); ++i)
      ranks.rows.push_back({count_cell(b.length), count_cell(i + 1), b.ranked[i],
                            table.find(b.ranked[i])->probability});
  }
  r.sections.push_back(std::move(blocks));
  r.sections.push_back(std::move(ranks));
  r.sections.push_back(anomaly_section(a));
  return r;
}

Report anomaly_report(const CtmTable& table) {
  Report r{ReportKind::Anomalies, {table_identity(table)}, {}};
  r.sections.push_back(anomaly_section(analyze_length_blocks(table)));
  return r;
}

Report used_rules_consistency(const CtmTable& table) {
  const auto a = analyze_used_rules(table);
  Report r{ReportKind::UsedRulesConsistency, {table_identity(table)}, {}};
  ReportSection groups{"groups", {"min_used_rules", "strings", "min_bits", "mean_bits", "max_bits"}, {}};
  for (const auto& g : a.groups)
    groups.rows.push_back({static_cast<std::int64_t>(g.used_rules), count_cell(g.strings), g.min_bits,
                           g.mean_bits, g.max_bits});
  r.sections.push_back(std::move(groups));
  r.sections.push_back({"summary", {"spearman_rho"}, {{a.rho}}});
  return r;
}

Report divergence_report(const CtmTable& table, const std::vector<std::string>& corpus,
                         const BdmConfig& cfg) {
  const auto a = analyze_divergence(table, corpus, cfg);
  Report r{ReportKind::Divergence, {table_identity(table)}, {}};
  ReportSection rows{"strings", {"string", "bdm", "entropy", "block_entropy", "lz78_bits", "flagged"}, {}};
  std::size_t flagged = 0;
  for (const auto& x : a.rows) {
    rows.rows.push_back({x.string, x.bdm, x.entropy, x.block_entropy,
                         static_cast<std::int64_t>(x.lz78_bits), static_cast<std::int64_t>(x.flagged)});
    flagged += x.flagged;
  }
  r.sections.push_back(std::move(rows));
  r.sections.push_back({"summary",
                        {"corpus", "entropy_q3", "bdm_q1", "flagged", "block_len"},
                        {{count_cell(a.rows.size()), a.entropy_q3, a.bdm_q1, count_cell(flagged),
                          count_cell(cfg.block_len)}}});
  return r;
}

Report diversity_report(const CtmTable& table, std::size_t length, const BdmConfig& cfg) {
  const auto a = analyze_diversity(table, length, cfg);
  Report r{ReportKind::Diversity, {table_identity(table)}, {}};
  ReportSection lz{"lz78_histogram", {"lz78_bits", "strings"}, {}};
  for (const auto& [bits, n] : a.lz78_histogram)
    lz.rows.push_back({static_cast<std::int64_t>(bits), static_cast<std::int64_t>(n)});
  ReportSection bdm{"bdm_histogram", {"bdm", "strings"}, {}};
  for (const auto& [v, n] : a.bdm_histogram) bdm.rows.push_back({v, static_cast<std::int64_t>(n)});
  r.sections.push_back({"summary",
                        {"length", "block_len", "distinct_lz78", "distinct_bdm"},
                        {{count_cell(length), count_cell(cfg.block_len), count_cell(a.lz78_histogram.size()),
                          count_cell(a.bdm_histogram.size())}}});
  r.sections.push_back(std::move(lz));
  r.sections.push_back(std::move(bdm));
  return r;
}

Report cross_space_report(const CtmTable& small, const CtmTable& large) {
  const auto a = analyze_cross_space(small, large);
  Report r{ReportKind::CrossSpace, {table_identity(small), table_identity(large)}, {}};
  Cell top = std::string("undefined");
  if (a.rho_top_half) top = *a.rho_top_half;
  r.sections.push_back({"summary",
                        {"shared", "rho_all", "rho_top_half", "inversions"},
                        {{count_cell(a.shared), a.rho_all, top, count_cell(a.inversions.size())}}});
  ReportSection inv{"inversions", {"above_in_small", "above_in_large", "percentile"}, {}};
  for (const auto& x : a.inversions) inv.rows.push_back({x.above, x.below, x.percentile});
  r.sections.push_back(std::move(inv));
  return r;
}

}  // namespace ctmlab
