#include "ctmlab/ctm_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ctmlab/errors.hpp"
#include "metadata.hpp"
#include "text_util.hpp"

namespace ctmlab {

namespace {

constexpr const char* kFormat = "ctm-table/1";
constexpr const char* kColumns = "string,count,probability,complexity_bits,min_used_rules,source_space";

std::uint64_t denominator(const Census& c, Normalization norm) {
  return norm == Normalization::HaltingMachines ? c.halted : c.total_runs;
}

double probability_for(std::uint64_t count, const Census& c, Normalization norm) {
  return static_cast<double>(count) / static_cast<double>(denominator(c, norm));
}

double bits_for(double probability) { return 0.0 - std::log2(probability); }

}  // namespace

std::string_view to_string(Normalization n) {
  return n == Normalization::HaltingMachines ? "halting" : "all";
}

Normalization parse_normalization(std::string_view s) {
  if (s == "halting") return Normalization::HaltingMachines;
  if (s == "all") return Normalization::AllMachines;
  throw ValidationError("unknown normalization '" + std::string(s) + "'");
}

CtmTable::CtmTable(Normalization normalization, std::vector<SourceSpace> sources, Entries entries)
    : normalization_(normalization), sources_(std::move(sources)), entries_(std::move(entries)) {
  std::sort(sources_.begin(), sources_.end(),
            [](const SourceSpace& a, const SourceSpace& b) { return a.spec.states < b.spec.states; });
  validate();
}

void CtmTable::validate() const {
  if (sources_.empty()) throw ValidationError("table has no source rule space");
  for (std::size_t i = 0; i < sources_.size(); ++i) {
    if (i > 0 && sources_[i].spec.states == sources_[i - 1].spec.states)
      throw ValidationError("table lists two sources with " +
                            std::to_string(sources_[i].spec.states) + " states");
    if (denominator(sources_[i].census, normalization_) == 0)
      throw ValidationError("source space has an empty census");
  }
  for (const auto& [s, e] : entries_) {
    if (!detail::is_binary(s)) throw ValidationError("table key '" + s + "' is not a binary string");
    const auto& src = source(e.source_space);
    if (e.count == 0) throw ValidationError("entry '" + s + "' has zero count");
    if (e.min_used_rules < 1 || e.min_used_rules > 2 * src.spec.states)
      throw ValidationError("entry '" + s + "' has min_used_rules outside 1..2n");
    if (e.probability != probability_for(e.count, src.census, normalization_))
      throw ValidationError("entry '" + s + "' probability does not match its count and census");
    if (e.complexity_bits != bits_for(e.probability))
      throw ValidationError("entry '" + s + "' complexity is not -log2(probability)");
  }
}

const CtmEntry* CtmTable::find(std::string_view s) const {
  const auto it = entries_.find(s);
  return it == entries_.end() ? nullptr : &it->second;
}

const SourceSpace& CtmTable::source(int states) const {
  for (const auto& src : sources_)
    if (src.spec.states == states) return src;
  throw ValidationError("no source rule space with " + std::to_string(states) + " states");
}

std::size_t CtmTable::longest_string() const {
  std::size_t longest = 0;
  for (const auto& [s, e] : entries_) longest = std::max(longest, s.size());
  return longest;
}

std::vector<std::pair<std::string, CtmEntry>> CtmTable::sorted() const {
  std::vector<std::pair<std::string, CtmEntry>> rows(entries_.begin(), entries_.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return canonical_before(a.second.count, a.first, b.second.count, b.first);
  });
  return rows;
}

double CtmTable::probability_mass() const {
  // Summed smallest-first to keep rounding error low.
  std::vector<double> ps;
  ps.reserve(entries_.size());
  for (const auto& [s, e] : entries_) ps.push_back(e.probability);
  std::sort(ps.begin(), ps.end());
  double sum = 0.0;
  for (const auto p : ps) sum += p;
  return sum;
}

CtmTable to_ctm(const FrequencyTable& freq, Normalization norm) {
  const auto& census = freq.census();
  if (census.halted == 0 || freq.entries().empty())
    throw ValidationError("frequency table has no halting runs");
  freq.check_invariants();
  CtmTable::Entries entries;
  for (const auto& [s, st] : freq.entries()) {
    CtmEntry e;
    e.count = st.count;
    e.probability = probability_for(st.count, census, norm);
    e.complexity_bits = bits_for(e.probability);
    e.source_space = freq.spec().states;
    e.min_used_rules = st.min_used_rules;
    entries.emplace(s, e);
  }
  return CtmTable(norm, {SourceSpace{freq.spec(), census}}, std::move(entries));
}

std::optional<double> complexity_of(const CtmTable& table, std::string_view s) {
  if (const auto* e = table.find(s)) return e->complexity_bits;
  return std::nullopt;
}

CtmTable merge_ctm(const CtmTable& older, const CtmTable& newer) {
  if (older.normalization() != newer.normalization())
    throw ValidationError("cannot merge tables with different normalizations");
  std::vector<SourceSpace> sources = older.sources();
  for (const auto& src : newer.sources()) {
    const auto it = std::find_if(sources.begin(), sources.end(), [&](const SourceSpace& o) {
      return o.spec.states == src.spec.states;
    });
    if (it == sources.end()) {
      sources.push_back(src);
    } else if (!(*it == src)) {
      throw ValidationError("tables disagree on the (" + std::to_string(src.spec.states) +
                            ",2) rule space they were built from");
    }
  }
  auto entries = older.entries();
  for (const auto& [s, e] : newer.entries()) {
    auto [it, inserted] = entries.try_emplace(s, e);
    if (!inserted && e.source_space >= it->second.source_space) it->second = e;
  }
  return CtmTable(older.normalization(), std::move(sources), std::move(entries));
}

std::string serialize(const CtmTable& table) {
  nlohmann::json meta;
  meta["format"] = kFormat;
  meta["normalization"] = std::string(to_string(table.normalization()));
  meta["tool_version"] = detail::kToolVersion;
  auto& sources = meta["sources"] = nlohmann::json::array();
  for (const auto& src : table.sources())
    sources.push_back({{"space", detail::spec_to_json(src.spec)},
                       {"census", detail::census_to_json(src.census)}});
  std::ostringstream os;
  os << meta.dump() << '\n' << kColumns << '\n';
  for (const auto& [s, e] : table.sorted()) {
    os << s << ',' << e.count << ',' << detail::format_double(e.probability) << ','
       << detail::format_double(e.complexity_bits) << ',' << e.min_used_rules << ','
       << e.source_space << '\n';
  }
  return os.str();
}

CtmTable parse_ctm_table(std::string_view text) {
  const auto rows = detail::lines(text);
  if (rows.size() < 2) throw ParseError("table file needs a metadata line and a column header", 0);

  nlohmann::json meta;
  Normalization norm{};
  std::vector<SourceSpace> sources;
  try {
    meta = nlohmann::json::parse(rows[0]);
    if (meta.at("format").get<std::string>() != kFormat)
      throw ParseError("unsupported table format", 1);
    norm = parse_normalization(meta.at("normalization").get<std::string>());
    for (const auto& src : meta.at("sources"))
      sources.push_back({detail::spec_from_json(src.at("space")),
                         detail::census_from_json(src.at("census"))});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad metadata: ") + e.what(), 1);
  }
  if (rows[1] != kColumns) throw ParseError("unexpected column header", 2);

  CtmTable::Entries entries;
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const auto line = i + 1;
    const auto f = detail::split(rows[i], ',');
    if (f.size() != 6) throw ParseError("expected 6 fields", line);
    if (!detail::is_binary(f[0])) throw ParseError("string must be nonempty and binary", line);
    CtmEntry e;
    e.count = detail::parse_number<std::uint64_t>(f[1], line, "count");
    e.probability = detail::parse_number<double>(f[2], line, "probability");
    e.complexity_bits = detail::parse_number<double>(f[3], line, "complexity_bits");
    e.min_used_rules = detail::parse_number<int>(f[4], line, "min_used_rules");
    e.source_space = detail::parse_number<int>(f[5], line, "source_space");
    if (!entries.emplace(std::string(f[0]), e).second)
      throw ParseError("duplicate string '" + std::string(f[0]) + "'", line);
  }
  return CtmTable(norm, std::move(sources), std::move(entries));
}

void save(const CtmTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << serialize(table);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

CtmTable load_ctm_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ctm_table(buf.str());
}

}  // namespace ctmlab
