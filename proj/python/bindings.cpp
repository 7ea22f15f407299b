#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ctmlab/analysis.hpp"
#include "ctmlab/baselines.hpp"
#include "ctmlab/bdm.hpp"
#include "ctmlab/ctm_table.hpp"
#include "ctmlab/errors.hpp"
#include "ctmlab/machine.hpp"
#include "ctmlab/space.hpp"

namespace py = pybind11;
using namespace ctmlab;

namespace {

py::dict outcome_dict(const RunOutcome& outcome) {
  py::dict d;
  if (const auto* h = std::get_if<Halted>(&outcome)) {
    d["status"] = "halted";
    d["output"] = h->output;
    d["steps"] = h->steps;
    d["used_rules"] = h->used_rules;
  } else if (const auto* p = std::get_if<NonHaltingProved>(&outcome)) {
    d["status"] = "non_halting";
    d["reason"] = std::string(to_string(p->reason));
  } else {
    d["status"] = "step_limit";
  }
  return d;
}

py::dict entry_dict(const CtmEntry& e) {
  py::dict d;
  d["count"] = e.count;
  d["probability"] = e.probability;
  d["complexity_bits"] = e.complexity_bits;
  d["min_used_rules"] = e.min_used_rules;
  d["source_space"] = e.source_space;
  return d;
}

BdmConfig bdm_config(std::size_t block_len, bool keep_tail, bool strict) {
  return {block_len, keep_tail ? Boundary::KeepShortTail : Boundary::DropRemainder,
          strict ? Fallback::Error : Fallback::LogLengthPenalty};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Coding-theorem complexity estimates from exhaustive Turing machine runs";
  m.attr("__version__") = "0.1.0";

  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", validation.ptr());
  py::register_exception<LookupError>(m, "NotInTableError", validation.ptr());
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("space_size", &space_size, py::arg("states"));

  m.def(
      "machine_text",
      [](std::uint64_t index, int states) { return to_text(decode_machine({index, states})); },
      py::arg("index"), py::arg("states"));

  m.def(
      "simulate",
      [](std::uint64_t index, int states, int blank, std::int64_t max_steps, bool filters) {
        RunConfig cfg;
        cfg.blank = blank ? Symbol::One : Symbol::Zero;
        cfg.max_steps = max_steps;
        cfg.enable_no_halt_check = cfg.enable_blank_escape = cfg.enable_cycle_check = filters;
        return outcome_dict(simulate(decode_machine({index, states}), cfg));
      },
      py::arg("index"), py::arg("states"), py::arg("blank") = 0, py::arg("max_steps") = 100,
      py::arg("filters") = false);

  py::class_<CtmTable>(m, "CtmTable")
      .def_static("load", &load_ctm_table, py::arg("path"))
      .def_static("parse", [](const std::string& text) { return parse_ctm_table(text); }, py::arg("text"))
      .def("save", [](const CtmTable& t, const std::filesystem::path& p) { save(t, p); }, py::arg("path"))
      .def("serialize", [](const CtmTable& t) { return serialize(t); })
      .def("__len__", &CtmTable::size)
      .def("__contains__", [](const CtmTable& t, const std::string& s) { return t.find(s) != nullptr; })
      .def("__eq__", [](const CtmTable& a, const CtmTable& b) { return a == b; })
      .def(
          "entry",
          [](const CtmTable& t, const std::string& s) -> py::object {
            const auto* e = t.find(s);
            return e ? py::object(entry_dict(*e)) : py::none();
          },
          py::arg("string"))
      .def("complexity", [](const CtmTable& t, const std::string& s) { return complexity_of(t, s); },
           py::arg("string"))
      .def("strings", [](const CtmTable& t) {
        std::vector<std::string> out;
        for (const auto& [s, e] : t.sorted()) out.push_back(s);
        return out;
      })
      .def_property_readonly("normalization", [](const CtmTable& t) { return std::string(to_string(t.normalization())); })
      .def_property_readonly("states", [](const CtmTable& t) {
        std::vector<int> out;
        for (const auto& s : t.sources()) out.push_back(s.spec.states);
        return out;
      })
      .def("probability_mass", &CtmTable::probability_mass)
      .def("identity", [](const CtmTable& t) { return table_identity(t); });

  m.def(
      "run_space",
      [](int states, bool both_blanks, std::int64_t max_steps, std::size_t shards, const std::string& normalization) {
        SpaceSpec spec;
        spec.states = states;
        spec.blank_mode = both_blanks ? BlankMode::BothBlanks : BlankMode::Zero;
        spec.max_steps = max_steps;
        const auto norm = parse_normalization(normalization);
        py::gil_scoped_release release;
        return to_ctm(run_space(spec, ShardPlan::even(states, shards)), norm);
      },
      py::arg("states"), py::arg("both_blanks") = false, py::arg("max_steps") = 0, py::arg("shards") = 1,
      py::arg("normalization") = "halting");

  m.def("merge", &merge_ctm, py::arg("older"), py::arg("newer"));

  m.def(
      "bdm",
      [](const std::string& s, const CtmTable& t, std::size_t block_len, bool keep_tail, bool strict) {
        return bdm_value(s, t, bdm_config(block_len, keep_tail, strict));
      },
      py::arg("string"), py::arg("table"), py::arg("block_len") = 12, py::arg("keep_tail") = false,
      py::arg("strict") = false);

  m.def("shannon_entropy", &shannon_entropy, py::arg("string"));
  m.def("block_entropy", &block_entropy, py::arg("string"), py::arg("block_len"));
  m.def("rle_encode", &rle_encode, py::arg("string"));
  m.def("rle_decode", &rle_decode, py::arg("encoded"));
  m.def("lz78_bit_length", &lz78_bit_length, py::arg("string"));
  m.def("spearman_rho", [](const std::vector<std::pair<double, double>>& p) { return spearman_rho(p); },
        py::arg("pairs"));

  m.def(
      "report",
      [](const std::string& kind, const CtmTable& table, const CtmTable* large,
         const std::vector<std::string>& corpus, std::size_t length, std::size_t block_len,
         const std::string& format) {
        const auto fmt = parse_report_format(format);
        const auto cfg = bdm_config(block_len, false, false);
        if (kind == "length-blocks") return render(length_block_report(table), fmt);
        if (kind == "anomalies") return render(anomaly_report(table), fmt);
        if (kind == "used-rules") return render(used_rules_consistency(table), fmt);
        if (kind == "divergence") return render(divergence_report(table, corpus, cfg), fmt);
        if (kind == "diversity") return render(diversity_report(table, length, cfg), fmt);
        if (kind == "cross-space") {
          if (!large) throw ValidationError("cross-space needs a large table");
          return render(cross_space_report(table, *large), fmt);
        }
        throw ValidationError("unknown report kind '" + kind + "'");
      },
      py::arg("kind"), py::arg("table"), py::arg("large") = nullptr, py::arg("corpus") = std::vector<std::string>{},
      py::arg("length") = 12, py::arg("block_len") = 12, py::arg("format") = "csv");
}
