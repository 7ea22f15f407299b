#include "ctmlab/space.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ctmlab/errors.hpp"
#include "metadata.hpp"

namespace ctmlab {

std::string_view to_string(BlankMode m) {
  return m == BlankMode::Zero ? "zero" : "both";
}

BlankMode parse_blank_mode(std::string_view s) {
  if (s == "zero") return BlankMode::Zero;
  if (s == "both") return BlankMode::BothBlanks;
  throw ValidationError("unknown blank mode '" + std::string(s) + "'");
}

std::int64_t default_max_steps(int states) {
  switch (states) {
    case 1:
    case 2: return 10;
    case 3: return 30;
    case 4: return 500;
    default: return 50'000'000;
  }
}

void SpaceSpec::validate() const {
  if (states < 1) throw ValidationError("state count must be at least 1");
  if (max_steps < 0) throw ValidationError("max_steps must be positive (0 selects the default)");
  if (filters.cycle && cycle_memory_limit < 1)
    throw ValidationError("cycle_memory_limit must be positive");
  (void)space_size(states);
}

std::int64_t SpaceSpec::effective_max_steps() const {
  return max_steps > 0 ? max_steps : default_max_steps(states);
}

std::uint64_t SpaceSpec::run_count() const {
  const auto size = space_size(states);
  if (blank_mode == BlankMode::Zero) return size;
  if (size > UINT64_MAX / 2) throw std::overflow_error("run count exceeds 64 bits");
  return 2 * size;
}

RunConfig SpaceSpec::run_config(Symbol blank) const {
  RunConfig cfg;
  cfg.max_steps = effective_max_steps();
  cfg.blank = blank;
  cfg.enable_no_halt_check = filters.no_halt_rule;
  cfg.enable_blank_escape = filters.blank_escape;
  cfg.enable_cycle_check = filters.cycle;
  cfg.cycle_memory_limit = cycle_memory_limit;
  return cfg;
}

Census& Census::operator+=(const Census& o) {
  total_runs += o.total_runs;
  halted += o.halted;
  no_halt_rule += o.no_halt_rule;
  blank_escape += o.blank_escape;
  cycle_detected += o.cycle_detected;
  step_limited += o.step_limited;
  return *this;
}

bool canonical_before(std::uint64_t count_a, std::string_view a, std::uint64_t count_b,
                      std::string_view b) {
  if (count_a != count_b) return count_a > count_b;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

FrequencyTable::FrequencyTable(SpaceSpec spec) : spec_(spec) {
  spec_.max_steps = spec.effective_max_steps();
}

void FrequencyTable::record_halt(std::string_view output, int used_rules, ProducerRef producer) {
  auto it = entries_.find(output);
  if (it == entries_.end()) {
    entries_.emplace(std::string(output), StringStats{1, used_rules, producer});
  } else {
    auto& st = it->second;
    ++st.count;
    st.min_used_rules = std::min(st.min_used_rules, used_rules);
    st.first_producer = std::min(st.first_producer, producer);
  }
  ++census_.halted;
  ++census_.total_runs;
}

void FrequencyTable::record_outcome(const RunOutcome& outcome, ProducerRef producer) {
  if (const auto* h = std::get_if<Halted>(&outcome)) {
    record_halt(h->output, h->used_rules, producer);
    return;
  }
  ++census_.total_runs;
  if (std::holds_alternative<StepLimit>(outcome)) {
    ++census_.step_limited;
    return;
  }
  switch (std::get<NonHaltingProved>(outcome).reason) {
    case NonHaltReason::NoHaltRule: ++census_.no_halt_rule; break;
    case NonHaltReason::BlankEscape: ++census_.blank_escape; break;
    case NonHaltReason::CycleDetected: ++census_.cycle_detected; break;
  }
}

std::vector<std::pair<std::string, StringStats>> FrequencyTable::sorted() const {
  std::vector<std::pair<std::string, StringStats>> rows(entries_.begin(), entries_.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return canonical_before(a.second.count, a.first, b.second.count, b.first);
  });
  return rows;
}

void FrequencyTable::check_invariants() const {
  std::uint64_t sum = 0;
  for (const auto& [s, st] : entries_) {
    if (s.empty() || s.find_first_not_of("01") != std::string::npos)
      throw ValidationError("frequency table key is not a nonempty binary string");
    if (st.count == 0) throw ValidationError("frequency table entry with zero count");
    if (st.min_used_rules < 1 || st.min_used_rules > 2 * spec_.states)
      throw ValidationError("min_used_rules out of range for '" + s + "'");
    sum += st.count;
  }
  if (sum != census_.halted) throw ValidationError("counts do not sum to the halted census");
  if (census_.total_runs != census_.halted + census_.proved_nonhalting() + census_.step_limited)
    throw ValidationError("census does not partition total_runs");
}

void FrequencyTable::absorb(const FrequencyTable& other) {
  if (!(other.spec_ == spec_)) throw ValidationError("cannot merge tables of different space specs");
  for (const auto& [s, st] : other.entries_) {
    auto [it, inserted] = entries_.try_emplace(s, st);
    if (!inserted) {
      it->second.count += st.count;
      it->second.min_used_rules = std::min(it->second.min_used_rules, st.min_used_rules);
      it->second.first_producer = std::min(it->second.first_producer, st.first_producer);
    }
  }
  census_ += other.census_;
}

ShardPlan ShardPlan::over(std::uint64_t total, std::size_t shard_count) {
  if (shard_count == 0) throw ValidationError("shard count must be at least 1");
  ShardPlan plan;
  const std::uint64_t k = shard_count;
  const std::uint64_t base = total / k;
  const std::uint64_t extra = total % k;
  std::uint64_t begin = 0;
  for (std::uint64_t i = 0; i < k; ++i) {
    const auto len = base + (i < extra ? 1 : 0);
    plan.shards.push_back({begin, begin + len});
    begin += len;
  }
  return plan;
}

ShardPlan ShardPlan::even(int states, std::size_t shard_count) {
  return over(space_size(states), shard_count);
}

void ShardPlan::validate(std::uint64_t total) const {
  if (shards.empty()) throw ValidationError("shard plan is empty");
  std::uint64_t next = 0;
  for (const auto& r : shards) {
    if (r.begin != next || r.end < r.begin)
      throw ValidationError("shard ranges must be ordered, disjoint and contiguous");
    next = r.end;
  }
  if (next != total) throw ValidationError("shard ranges do not cover the space");
}

namespace {

class SpaceWorker {
 public:
  explicit SpaceWorker(const SpaceSpec& spec)
      : table_(spec),
        zero_(spec.run_config(Symbol::Zero)),
        one_(spec.run_config(Symbol::One)),
        both_(spec.blank_mode == BlankMode::BothBlanks),
        machine_(spec.states) {}

  void run(std::uint64_t index) {
    decode_machine_into({index, machine_.states()}, machine_);
    table_.record_outcome(zero_.run(machine_), {index, Symbol::Zero});
    if (both_) table_.record_outcome(one_.run(machine_), {index, Symbol::One});
  }

  FrequencyTable take() { return std::move(table_); }

 private:
  FrequencyTable table_;
  Simulator zero_;
  Simulator one_;
  bool both_;
  RuleTable machine_;
};

}  // namespace

FrequencyTable run_range(const SpaceSpec& spec, IndexRange range) {
  spec.validate();
  if (range.end > space_size(spec.states) || range.begin > range.end)
    throw ValidationError("index range outside the space");
  SpaceWorker worker(spec);
  for (auto i = range.begin; i < range.end; ++i) worker.run(i);
  return worker.take();
}

FrequencyTable run_indices(const SpaceSpec& spec, std::span<const std::uint64_t> indices) {
  spec.validate();
  const auto size = space_size(spec.states);
  SpaceWorker worker(spec);
  for (const auto i : indices) {
    if (i >= size) throw ValidationError("machine index outside the space");
    worker.run(i);
  }
  return worker.take();
}

FrequencyTable run_space(const SpaceSpec& spec, const ShardPlan& plan, std::size_t threads) {
  spec.validate();
  plan.validate(space_size(spec.states));
  const auto shard_count = plan.shards.size();
  const auto workers = std::max<std::size_t>(1, threads == 0 ? shard_count : std::min(threads, shard_count));

  std::vector<FrequencyTable> parts(shard_count, FrequencyTable(spec));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (auto i = next.fetch_add(1); i < shard_count; i = next.fetch_add(1))
      parts[i] = run_range(spec, plan.shards[i]);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return merge_shards(parts);
}

FrequencyTable merge_shards(const std::vector<FrequencyTable>& parts) {
  if (parts.empty()) throw ValidationError("nothing to merge");
  FrequencyTable out(parts.front().spec());
  for (const auto& p : parts) out.absorb(p);
  return out;
}

std::string serialize(const FrequencyTable& table) {
  nlohmann::json meta;
  meta["format"] = "ctm-frequency/1";
  meta["space"] = detail::spec_to_json(table.spec());
  meta["census"] = detail::census_to_json(table.census());
  meta["tool_version"] = detail::kToolVersion;
  std::ostringstream os;
  os << meta.dump() << '\n';
  os << "string,count,min_used_rules,first_producer,first_producer_blank\n";
  for (const auto& [s, st] : table.sorted()) {
    os << s << ',' << st.count << ',' << st.min_used_rules << ',' << st.first_producer.index << ','
       << to_char(st.first_producer.blank) << '\n';
  }
  return os.str();
}

namespace detail {

nlohmann::json spec_to_json(const SpaceSpec& spec) {
  return {
      {"states", spec.states},
      {"blank_mode", std::string(to_string(spec.blank_mode))},
      {"max_steps", spec.effective_max_steps()},
      {"filters",
       {{"no_halt_rule", spec.filters.no_halt_rule},
        {"blank_escape", spec.filters.blank_escape},
        {"cycle", spec.filters.cycle}}},
      {"cycle_memory_limit", spec.cycle_memory_limit},
  };
}

SpaceSpec spec_from_json(const nlohmann::json& j) {
  SpaceSpec spec;
  spec.states = j.at("states").get<int>();
  spec.blank_mode = parse_blank_mode(j.at("blank_mode").get<std::string>());
  spec.max_steps = j.at("max_steps").get<std::int64_t>();
  const auto& f = j.at("filters");
  spec.filters.no_halt_rule = f.at("no_halt_rule").get<bool>();
  spec.filters.blank_escape = f.at("blank_escape").get<bool>();
  spec.filters.cycle = f.at("cycle").get<bool>();
  spec.cycle_memory_limit = j.at("cycle_memory_limit").get<std::size_t>();
  spec.validate();
  return spec;
}

nlohmann::json census_to_json(const Census& c) {
  return {
      {"total_runs", c.total_runs},         {"halted", c.halted},
      {"no_halt_rule", c.no_halt_rule},     {"blank_escape", c.blank_escape},
      {"cycle_detected", c.cycle_detected}, {"step_limited", c.step_limited},
  };
}

Census census_from_json(const nlohmann::json& j) {
  Census c;
  c.total_runs = j.at("total_runs").get<std::uint64_t>();
  c.halted = j.at("halted").get<std::uint64_t>();
  c.no_halt_rule = j.at("no_halt_rule").get<std::uint64_t>();
  c.blank_escape = j.at("blank_escape").get<std::uint64_t>();
  c.cycle_detected = j.at("cycle_detected").get<std::uint64_t>();
  c.step_limited = j.at("step_limited").get<std::uint64_t>();
  if (c.total_runs != c.halted + c.proved_nonhalting() + c.step_limited)
    throw ValidationError("census does not partition total_runs");
  return c;
}

}  // namespace detail

}  // namespace ctmlab
