#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctmlab/analysis.hpp"
#include "ctmlab/baselines.hpp"
#include "ctmlab/bdm.hpp"
#include "ctmlab/ctm_table.hpp"
#include "ctmlab/errors.hpp"
#include "ctmlab/machine.hpp"
#include "ctmlab/space.hpp"

namespace ctmlab::cli {

namespace {

struct Globals {
  std::size_t threads = 0;
  std::string out;
  std::string format = "csv";
};

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes either to --out or to the given stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw IoError("cannot open '" + path + "' for writing");
    }
    os_ = path.empty() ? &fallback : &file_;
  }

  std::ostream& stream() { return *os_; }

  void close() {
    os_->flush();
    if (!*os_) throw IoError("write failed");
  }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

/// Simple record output in csv (header + rows) or json-lines.
class Records {
 public:
  Records(std::vector<std::string> columns, const std::string& format)
      : columns_(std::move(columns)), json_(parse_report_format(format) == ReportFormat::JsonLines) {}

  void add(std::vector<nlohmann::ordered_json> values) { rows_.push_back(std::move(values)); }

  void write(std::ostream& os) const {
    if (!json_) {
      for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
      os << '\n';
    }
    for (const auto& row : rows_) {
      if (json_) {
        nlohmann::ordered_json j;
        for (std::size_t i = 0; i < columns_.size(); ++i) j[columns_[i]] = row[i];
        os << j.dump() << '\n';
        continue;
      }
      for (std::size_t i = 0; i < row.size(); ++i) {
        os << (i ? "," : "");
        if (row[i].is_string())
          os << row[i].get<std::string>();
        else if (row[i].is_number_float())
          os << fmt_double(row[i].get<double>());
        else
          os << row[i].dump();
      }
      os << '\n';
    }
  }

 private:
  std::vector<std::string> columns_;
  bool json_;
  std::vector<std::vector<nlohmann::ordered_json>> rows_;
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> all_strings_of_length(std::size_t len) {
  if (len < 1 || len > 20) throw ValidationError("--all-length must be in 1..20");
  std::vector<std::string> out;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
    std::string s(len, '0');
    for (std::size_t i = 0; i < len; ++i)
      if ((v >> (len - 1 - i)) & 1U) s[i] = '1';
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ctm-lab: algorithmic complexity estimation by exhaustive Turing machine runs"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads (0: one per shard)");
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_option("--format", g.format, "Record format")->check(CLI::IsMember({"csv", "json-lines"}));

  std::function<void()> action;

  // run-space
  auto* run_space_cmd = app.add_subcommand("run-space", "Enumerate a full (n,2) rule space into a CTM table");
  SpaceSpec spec;
  bool both_blanks = false;
  std::size_t shards = 1;
  std::string norm = "halting";
  std::string freq_out;
  bool no_filters = false;
  run_space_cmd->add_option("--states", spec.states, "Number of states n")->required();
  run_space_cmd->add_flag("--both-blanks", both_blanks, "Run every machine on blank 0 and blank 1");
  run_space_cmd->add_option("--max-steps", spec.max_steps, "Step cutoff (default depends on n)");
  run_space_cmd->add_option("--shards", shards, "Number of index shards / workers");
  run_space_cmd->add_option("--normalization", norm)->check(CLI::IsMember({"halting", "all"}));
  run_space_cmd->add_flag("--cycle-check", spec.filters.cycle, "Enable cycle detection");
  run_space_cmd->add_flag("--no-filters", no_filters, "Disable the no-halt-rule and blank-escape filters");
  run_space_cmd->add_option("--freq-out", freq_out, "Also write the raw frequency table");
  run_space_cmd->callback([&] {
    action = [&] {
      if (g.out.empty()) throw ValidationError("run-space requires --out");
      spec.blank_mode = both_blanks ? BlankMode::BothBlanks : BlankMode::Zero;
      if (no_filters) spec.filters.no_halt_rule = spec.filters.blank_escape = false;
      const auto freq = run_space(spec, ShardPlan::even(spec.states, shards), g.threads);
      if (!freq_out.empty()) {
        std::ofstream f(freq_out, std::ios::binary);
        if (!f) throw IoError("cannot open '" + freq_out + "' for writing");
        f << serialize(freq);
      }
      save(to_ctm(freq, parse_normalization(norm)), g.out);
      const auto& c = freq.census();
      err << "runs=" << c.total_runs << " halted=" << c.halted << " proved=" << c.proved_nonhalting()
          << " step_limited=" << c.step_limited << " strings=" << freq.entries().size() << '\n';
    };
  });

  // table
  auto* table_cmd = app.add_subcommand("table", "CTM table operations");
  table_cmd->require_subcommand(1);
  auto* merge_cmd = table_cmd->add_subcommand("merge", "Merge two tables, preferring the larger rule space");
  std::string table_a, table_b;
  merge_cmd->add_option("older", table_a)->required();
  merge_cmd->add_option("newer", table_b)->required();
  merge_cmd->callback([&] {
    action = [&] {
      if (g.out.empty()) throw ValidationError("table merge requires --out");
      save(merge_ctm(load_ctm_table(table_a), load_ctm_table(table_b)), g.out);
    };
  });

  // ctm eval
  auto* ctm_cmd = app.add_subcommand("ctm", "CTM lookups");
  ctm_cmd->require_subcommand(1);
  auto* ctm_eval = ctm_cmd->add_subcommand("eval", "Complexity of one string");
  std::string table_path, input;
  ctm_eval->add_option("--table", table_path)->required();
  ctm_eval->add_option("--string", input)->required();
  ctm_eval->callback([&] {
    action = [&] {
      const auto table = load_ctm_table(table_path);
      const auto* e = table.find(input);
      if (!e) throw LookupError("'" + input + "' is not in the table");
      Records r({"string", "probability", "complexity_bits"}, g.format);
      r.add({input, e->probability, e->complexity_bits});
      Sink sink(g.out, out);
      r.write(sink.stream());
      sink.close();
    };
  });

  // bdm eval
  auto* bdm_cmd = app.add_subcommand("bdm", "Block Decomposition Method");
  bdm_cmd->require_subcommand(1);
  auto* bdm_eval = bdm_cmd->add_subcommand("eval", "BDM value of strings");
  BdmConfig bdm_cfg;
  bool keep_tail = false, strict = false;
  std::string input_file;
  bdm_eval->add_option("--table", table_path)->required();
  bdm_eval->add_option("--block-len", bdm_cfg.block_len)->required();
  bdm_eval->add_flag("--keep-tail", keep_tail);
  bdm_eval->add_flag("--strict", strict, "Fail on blocks missing from the table");
  auto* bdm_string = bdm_eval->add_option("--string", input);
  bdm_eval->add_option("--file", input_file)->excludes(bdm_string);
  bdm_eval->callback([&] {
    action = [&] {
      bdm_cfg.boundary = keep_tail ? Boundary::KeepShortTail : Boundary::DropRemainder;
      bdm_cfg.fallback = strict ? Fallback::Error : Fallback::LogLengthPenalty;
      if (input.empty() && input_file.empty()) throw ValidationError("give --string or --file");
      const auto table = load_ctm_table(table_path);
      const auto strings = input_file.empty() ? std::vector<std::string>{input} : read_lines(input_file);
      Records r({"string", "value"}, g.format);
      for (const auto& s : strings) r.add({s, bdm_value(s, table, bdm_cfg)});
      Sink sink(g.out, out);
      r.write(sink.stream());
      sink.close();
    };
  });

  // entropy
  auto* entropy_cmd = app.add_subcommand("entropy", "Shannon or block entropy");
  std::size_t block = 0;
  entropy_cmd->add_option("--string", input)->required();
  entropy_cmd->add_option("--block", block, "Block length for block entropy");
  entropy_cmd->callback([&] {
    action = [&] {
      Records r({"string", block ? "block_entropy" : "entropy"}, g.format);
      r.add({input, block ? block_entropy(input, block) : shannon_entropy(input)});
      Sink sink(g.out, out);
      r.write(sink.stream());
      sink.close();
    };
  });

  // rle
  auto* rle_cmd = app.add_subcommand("rle", "Run-length encoding");
  rle_cmd->require_subcommand(1);
  auto* rle_enc = rle_cmd->add_subcommand("encode");
  auto* rle_dec = rle_cmd->add_subcommand("decode");
  for (auto* c : {rle_enc, rle_dec}) c->add_option("--string", input)->required();
  rle_enc->callback([&] {
    action = [&] {
      Records r({"input", "encoded"}, g.format);
      r.add({input, rle_encode(input)});
      Sink sink(g.out, out);
      r.write(sink.stream());
      sink.close();
    };
  });
  rle_dec->callback([&] {
    action = [&] {
      Records r({"input", "decoded"}, g.format);
      r.add({input, rle_decode(input)});
      Sink sink(g.out, out);
      r.write(sink.stream());
      sink.close();
    };
  });

  // compress lz78
  auto* compress_cmd = app.add_subcommand("compress", "Compression baselines");
  compress_cmd->require_subcommand(1);
  auto* lz78_cmd = compress_cmd->add_subcommand("lz78", "LZ78 compressed bit length");
  auto* lz_string = lz78_cmd->add_option("--string", input);
  lz78_cmd->add_option("--file", input_file)->excludes(lz_string);
  lz78_cmd->callback([&] {
    action = [&] {
      if (input.empty() && input_file.empty()) throw ValidationError("give --string or --file");
      const auto strings = input_file.empty() ? std::vector<std::string>{input} : read_lines(input_file);
      Records r({"string", "lz78_bits"}, g.format);
      for (const auto& s : strings) r.add({s, lz78_bit_length(s)});
      Sink sink(g.out, out);
      r.write(sink.stream());
      sink.close();
    };
  });

  // report
  auto* report_cmd = app.add_subcommand("report", "Comparative reports over CTM tables");
  std::string kind, large_path, corpus_path;
  std::size_t length = 12, all_length = 0;
  BdmConfig report_cfg;
  report_cmd->add_option("kind", kind)
      ->required()
      ->check(CLI::IsMember({"length-blocks", "anomalies", "used-rules", "divergence", "diversity", "cross-space"}));
  report_cmd->add_option("--table", table_path, "Table (the smaller one for cross-space)")->required();
  report_cmd->add_option("--large", large_path, "Larger-space table for cross-space");
  report_cmd->add_option("--corpus", corpus_path, "Corpus file, one string per line (divergence)");
  report_cmd->add_option("--all-length", all_length, "Use every binary string of this length as corpus");
  report_cmd->add_option("--len", length, "String length for the diversity sweep");
  report_cmd->add_option("--block-len", report_cfg.block_len);
  report_cmd->add_flag("--keep-tail", keep_tail);
  report_cmd->add_flag("--strict", strict);
  report_cmd->callback([&] {
    action = [&] {
      report_cfg.boundary = keep_tail ? Boundary::KeepShortTail : Boundary::DropRemainder;
      report_cfg.fallback = strict ? Fallback::Error : Fallback::LogLengthPenalty;
      const auto table = load_ctm_table(table_path);
      Report rep;
      if (kind == "length-blocks") {
        rep = length_block_report(table);
      } else if (kind == "anomalies") {
        rep = anomaly_report(table);
      } else if (kind == "used-rules") {
        rep = used_rules_consistency(table);
      } else if (kind == "divergence") {
        std::vector<std::string> corpus;
        if (all_length > 0) corpus = all_strings_of_length(all_length);
        else if (!corpus_path.empty()) corpus = read_lines(corpus_path);
        else throw ValidationError("divergence needs --corpus or --all-length");
        rep = divergence_report(table, corpus, report_cfg);
      } else if (kind == "diversity") {
        rep = diversity_report(table, length, report_cfg);
      } else {
        if (large_path.empty()) throw ValidationError("cross-space needs --large");
        rep = cross_space_report(table, load_ctm_table(large_path));
      }
      Sink sink(g.out, out);
      sink.stream() << render(rep, parse_report_format(g.format));
      sink.close();
    };
  });

  // machine
  auto* machine_cmd = app.add_subcommand("machine", "Inspect a single machine");
  int states = 2, blank = 0;
  std::uint64_t index = 0;
  std::int64_t max_steps = 0;
  machine_cmd->add_option("--states", states)->required();
  machine_cmd->add_option("--index", index)->required();
  machine_cmd->add_option("--blank", blank)->check(CLI::IsMember({0, 1}));
  machine_cmd->add_option("--max-steps", max_steps);
  machine_cmd->callback([&] {
    action = [&] {
      const auto t = decode_machine({index, states});
      RunConfig cfg;
      cfg.max_steps = max_steps > 0 ? max_steps : default_max_steps(states);
      cfg.blank = blank ? Symbol::One : Symbol::Zero;
      Sink sink(g.out, out);
      auto& os = sink.stream();
      os << to_text(t);
      if (const auto reason = prove_non_halting(t, cfg)) {
        os << "# non-halting: " << to_string(*reason) << '\n';
      } else {
        const auto outcome = simulate(t, cfg);
        if (const auto* h = std::get_if<Halted>(&outcome))
          os << "# halted: output=" << h->output << " steps=" << h->steps << " used_rules=" << h->used_rules
             << '\n';
        else
          os << "# step limit reached after " << cfg.max_steps << " steps\n";
      }
      sink.close();
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (action) action();
    return 0;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ctmlab::cli
