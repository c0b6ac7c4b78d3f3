// Python bindings. Puzzles and records cross the boundary as their JSONL
// line strings; the Python package turns them into dicts.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ravenx/errors.hpp"
#include "ravenx/generator.hpp"
#include "ravenx/harness.hpp"
#include "ravenx/metrics.hpp"
#include "ravenx/solver.hpp"
#include "ravenx/uncertainty.hpp"

namespace py = pybind11;
using namespace ravenx;

namespace {

std::vector<Puzzle> load_puzzles(const std::vector<std::string>& lines) {
  std::vector<Puzzle> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(deserialize_puzzle(l));
  return out;
}

std::vector<EvalRecord> load_records(const std::vector<std::string>& lines) {
  std::vector<EvalRecord> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(deserialize_record(l));
  return out;
}

Smoothing smoothing_from(const std::string& kind, double param) {
  if (kind == "none") return {};
  if (kind == "bins") return {SmoothingKind::Bins, param};
  if (kind == "gaussian") return {SmoothingKind::Gaussian, param};
  throw ConfigError("unknown smoothing '" + kind + "'");
}

py::dict priors_dict(const RuleVector& w) {
  py::dict d;
  for (RuleKind r : kAllRules) d[py::str(std::string(rule_name(r)))] = w[rule_index(r)];
  return d;
}

SolverConfig solver_config(bool entropy_weighting, bool include_confounders,
                           const std::optional<std::map<std::string, double>>& priors) {
  SolverConfig cfg;
  cfg.entropy_weighting = entropy_weighting;
  cfg.include_confounders = include_confounders;
  if (priors) {
    for (const auto& [name, w] : *priors) cfg.rule_priors[rule_index(rule_from_name(name))] = w;
  }
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Symbolic RPM generation, perception noise, abductive solving and LLM prompting.";

  static py::exception<Error> base(m, "RavenxError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  m.def(
      "generate",
      [](int grid_cols, int range_m, int n, std::uint64_t seed) {
        GenConfig cfg;
        cfg.grid_cols = grid_cols;
        cfg.range_m = range_m;
        cfg.n_puzzles = n;
        cfg.seed = seed;
        std::vector<std::string> out;
        py::gil_scoped_release release;
        generate_dataset(cfg, [&](Puzzle&& p) { out.push_back(serialize_puzzle(p)); });
        return out;
      },
      py::arg("grid_cols"), py::arg("range_m"), py::arg("n"), py::arg("seed") = 0);

  m.def(
      "apply_uncertainty",
      [](const std::string& puzzle, int n_confounders, const std::string& smoothing, double param,
         std::uint64_t seed, bool smooth_confounders) {
        UncertaintyConfig cfg;
        cfg.n_confounders = n_confounders;
        cfg.smoothing = smoothing_from(smoothing, param);
        cfg.seed = seed;
        cfg.smooth_confounders = smooth_confounders;
        return serialize_puzzle(apply_uncertainty(deserialize_puzzle(puzzle), cfg));
      },
      py::arg("puzzle"), py::arg("n_confounders") = 0, py::arg("smoothing") = "none",
      py::arg("param") = 0.0, py::arg("seed") = 0, py::arg("smooth_confounders") = true);

  m.def("snr_db", &snr_db, py::arg("k"));

  m.def("validate", [](const std::string& puzzle) {
    // Structural problems surface as exceptions from the parser itself.
    try {
      deserialize_puzzle(puzzle);
    } catch (const InvariantError& e) {
      return std::vector<std::string>{e.what()};
    }
    return std::vector<std::string>{};
  });

  m.def(
      "score",
      [](const std::string& puzzle, bool entropy_weighting, bool include_confounders,
         std::optional<std::map<std::string, double>> priors) {
        const auto res = score_candidates(deserialize_puzzle(puzzle),
                                          solver_config(entropy_weighting, include_confounders, priors));
        std::vector<double> entropies;
        for (const auto& c : res.confidences) entropies.push_back(c.entropy);
        py::dict d;
        d["scores"] = std::vector<double>(res.scores.begin(), res.scores.end());
        d["predicted_index"] = res.predicted_index;
        d["entropies"] = entropies;
        return d;
      },
      py::arg("puzzle"), py::arg("entropy_weighting") = true, py::arg("include_confounders") = true,
      py::arg("priors") = py::none());

  m.def(
      "solve",
      [](const std::vector<std::string>& puzzles, bool entropy_weighting, int threads) {
        const auto data = load_puzzles(puzzles);
        const auto cfg = solver_config(entropy_weighting, true, std::nullopt);
        std::vector<std::string> out;
        py::gil_scoped_release release;
        for (const auto& r : solve_dataset(data, cfg, threads)) out.push_back(serialize_record(r));
        return out;
      },
      py::arg("puzzles"), py::arg("entropy_weighting") = true, py::arg("threads") = 1);

  m.def(
      "train",
      [](const std::vector<std::string>& puzzles, int epochs, double lr, int batch_size, double tau,
         std::uint64_t seed, bool entropy_weighting) {
        TrainConfig t;
        t.epochs = epochs;
        t.learning_rate = lr;
        t.batch_size = batch_size;
        t.temperature = tau;
        t.seed = seed;
        const auto data = load_puzzles(puzzles);
        TrainResult res;
        {
          py::gil_scoped_release release;
          res = train_rule_priors(data, t, solver_config(entropy_weighting, true, std::nullopt));
        }
        return py::make_tuple(priors_dict(res.rule_priors), res.loss_trace);
      },
      py::arg("puzzles"), py::arg("epochs") = 50, py::arg("lr") = 0.1, py::arg("batch_size") = 0,
      py::arg("tau") = 1.0, py::arg("seed") = 0, py::arg("entropy_weighting") = true);

  m.def(
      "render_prompt",
      [](const std::string& puzzle, std::optional<std::string> style) {
        const auto p = deserialize_puzzle(puzzle);
        return render_prompt(p, style ? style_from_name(*style) : style_for(p));
      },
      py::arg("puzzle"), py::arg("style") = py::none());

  m.def("parse_answer", [](const std::string& text) {
    const auto a = parse_answer(text);
    return py::make_tuple(a.index, a.failed);
  });

  m.def("task_accuracy",
        [](const std::vector<std::string>& records) { return task_accuracy(load_records(records)); });

  m.def("arithmetic_accuracy",
        [](const std::vector<std::string>& records, const std::vector<std::string>& puzzles) {
          return arithmetic_accuracy(load_records(records), load_puzzles(puzzles));
        });

  m.def(
      "emit_report",
      [](const std::vector<std::string>& records, const std::vector<std::string>& puzzles,
         const std::string& fmt) {
        return emit_report(load_records(records), load_puzzles(puzzles), report_format_from_name(fmt));
      },
      py::arg("records"), py::arg("puzzles"), py::arg("fmt") = "markdown");
}
