#include "nsad/cli.h"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nsad/attribution.h"
#include "nsad/common.h"
#include "nsad/dataset.h"
#include "nsad/detector.h"
#include "nsad/evaluation.h"
#include "nsad/serialization.h"
#include "nsad/synthetic.h"

namespace nsad {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct DataOptions {
  std::string path;
  std::string label_column = kDefaultLabelColumn;
};

struct DetectorOptions {
  std::string detector = "ns-nn";
  double sample_ratio = 2.0;
  double delta = kDefaultDelta;
  NnConfig nn;
  int steps_per_epoch = 0;
  RfConfig rf;
  std::string criterion = "gini";
  int max_depth = 0;
  std::string max_features = "sqrt";
  bool no_bootstrap = false;
};

struct Options {
  std::uint64_t seed = 0;
  std::string output;
  DataOptions data;
  DetectorOptions detector;
  std::vector<std::string> detectors;

  SynthConfig synth;
  double epsilon = kDefaultEpsilon;
  std::string baselines;
  std::string model;
  std::vector<std::size_t> rows;
  int steps = kDefaultIgSteps;
  bool text = false;
  int trials = 4;
  int folds = 5;
  std::string dataset_name;
  std::string table;
};

void AddDataOptions(CLI::App* app, DataOptions& data) {
  app->add_option("--data", data.path, "Input CSV (header row, numeric columns)")->required();
  app->add_option("--label-column", data.label_column,
                  "Ground-truth 0/1 column; used only when present in the header")
      ->capture_default_str();
}

void AddDetectorOptions(CLI::App* app, DetectorOptions& o) {
  app->add_option("--sample-ratio", o.sample_ratio, "Negatives per positive point (r_s)")
      ->capture_default_str();
  app->add_option("--delta", o.delta, "Expansion of the sampling box, normalized units")
      ->capture_default_str();
  app->add_option("--hidden-layers", o.nn.num_hidden_layers)->capture_default_str()->group("ns-nn");
  app->add_option("--width", o.nn.layer_width)->capture_default_str()->group("ns-nn");
  app->add_option("--dropout", o.nn.dropout)->capture_default_str()->group("ns-nn");
  app->add_option("--batch-size", o.nn.batch_size)->capture_default_str()->group("ns-nn");
  app->add_option("--epochs", o.nn.epochs)->capture_default_str()->group("ns-nn");
  app->add_option("--steps-per-epoch", o.steps_per_epoch, "0 = one pass over the data")
      ->capture_default_str()
      ->group("ns-nn");
  app->add_option("--learning-rate", o.nn.learning_rate)->capture_default_str()->group("ns-nn");
  app->add_option("--momentum", o.nn.momentum)->capture_default_str()->group("ns-nn");
  app->add_option("--estimators", o.rf.num_estimators)->capture_default_str()->group("ns-rf");
  app->add_option("--criterion", o.criterion)
      ->check(CLI::IsMember({"gini", "entropy"}))
      ->capture_default_str()
      ->group("ns-rf");
  app->add_option("--max-depth", o.max_depth, "0 = unlimited")->capture_default_str()->group("ns-rf");
  app->add_option("--min-samples-split", o.rf.min_samples_split)->capture_default_str()->group("ns-rf");
  app->add_option("--min-samples-leaf", o.rf.min_samples_leaf)->capture_default_str()->group("ns-rf");
  app->add_option("--max-features", o.max_features, "Integer or 'sqrt'")
      ->capture_default_str()
      ->group("ns-rf");
  app->add_flag("--no-bootstrap", o.no_bootstrap)->group("ns-rf");
}

void AddSeed(CLI::App* app, std::uint64_t& seed) {
  app->add_option("--seed", seed, "Master seed (env NS_ANOMALY_SEED)")
      ->envname("NS_ANOMALY_SEED")
      ->capture_default_str();
}

DetectorConfig MakeDetectorConfig(const DetectorOptions& o, const std::string& kind,
                                  std::uint64_t seed) {
  DetectorConfig config;
  config.kind = ParseDetectorKind(kind);
  config.sample_ratio = o.sample_ratio;
  config.delta = o.delta;
  config.seed = seed;
  config.nn = o.nn;
  if (o.steps_per_epoch > 0) config.nn.steps_per_epoch = o.steps_per_epoch;
  config.rf = o.rf;
  config.rf.criterion = ParseCriterion(o.criterion);
  if (o.max_depth > 0) config.rf.max_depth = o.max_depth;
  if (o.max_features != "sqrt") {
    try {
      std::size_t used = 0;
      config.rf.max_features = std::stoi(o.max_features, &used);
      if (used != o.max_features.size()) throw std::invalid_argument(o.max_features);
    } catch (const std::exception&) {
      throw PreconditionError("--max-features must be an integer or 'sqrt'");
    }
  }
  config.rf.bootstrap = !o.no_bootstrap;
  config.Validate();
  return config;
}

ordered_json DetectorConfigJson(const DetectorConfig& c) {
  ordered_json j;
  j["detector"] = DetectorName(c.kind);
  j["sample_ratio"] = c.sample_ratio;
  j["delta"] = c.delta;
  j["seed"] = c.seed;
  if (c.kind == DetectorKind::kNeuralNetwork) {
    j["nn"] = ToJson(c.nn);
  } else {
    j["rf"] = ToJson(c.rf);
  }
  return j;
}

// Loads a CSV, taking labels from the label column only if the header has it.
Dataset LoadData(const DataOptions& data) {
  const auto header = ReadCsvHeader(data.path);
  const bool labeled =
      std::find(header.begin(), header.end(), data.label_column) != header.end();
  return LoadCsv(data.path, labeled ? std::optional(data.label_column) : std::nullopt);
}

std::string Dump(const ordered_json& j) { return j.dump(2) + "\n"; }
std::string Dump(const json& j) { return j.dump(2) + "\n"; }

std::string DefaultBaselinePath(const std::string& model_path) {
  std::filesystem::path p(model_path);
  p.replace_extension(".baselines.json");
  return p.string();
}

std::string BlameBars(const AnomalyInterpretation& interpretation,
                      const std::vector<std::string>& names) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << "score " << interpretation.score
      << "  blame sum " << interpretation.BlameSum() << "  residual "
      << interpretation.completeness_residual << '\n';
  for (const std::size_t d : interpretation.RankedDimensions()) {
    const double b = interpretation.blames[d];
    const int bars = static_cast<int>(std::lround(std::min(1.0, std::abs(b)) * 40.0));
    out << "  " << std::left << std::setw(12) << names[d] << std::right << std::setw(9) << b
        << "  observed " << std::setw(10) << interpretation.observed_raw[d] << "  expected "
        << std::setw(10) << interpretation.baseline_raw[d] << "  " << std::string(bars, '#')
        << '\n';
  }
  return out.str();
}

int GenSynth(const Options& o, const ordered_json& run_config, std::ostream& out) {
  SynthConfig config = o.synth;
  config.seed = o.seed;
  const Dataset data = GenerateMultimodal(config);
  WriteCsv(data, o.output);
  WriteFileAtomically(o.output + ".run.json", Dump(run_config));
  out << "wrote " << data.size() << " rows (" << data.CountLabel(kAnomalousLabel)
      << " anomalies) to " << o.output << '\n';
  return kExitOk;
}

int Train(const Options& o, const ordered_json& run_config, std::ostream& out) {
  const DetectorConfig config = MakeDetectorConfig(o.detector, o.detector.detector, o.seed);
  const Dataset data = LoadData(o.data);
  const Detector detector = TrainDetector(data, config);
  json provenance = json::parse(run_config.dump());
  WriteFileAtomically(o.output, DetectorToJson(detector, provenance).dump() + "\n");
  out << "trained " << DetectorName(config.kind) << " on " << data.size() << " points; model "
      << o.output << '\n';
  if (config.kind == DetectorKind::kNeuralNetwork) {
    const BaselineSet baselines = SelectDetectorBaselines(detector, data, o.epsilon);
    const std::string path = o.baselines.empty() ? DefaultBaselinePath(o.output) : o.baselines;
    json doc = ToJson(baselines);
    doc["run_config"] = provenance;
    WriteFileAtomically(path, Dump(doc));
    out << baselines.points.size() << " baseline points (epsilon " << o.epsilon << ") written to "
        << path << '\n';
  }
  return kExitOk;
}

int Score(const Options& o, const ordered_json& run_config, std::ostream& out) {
  const Detector detector = DetectorFromJson(ReadJsonFile(o.model));
  const Dataset data = LoadData(o.data);
  const std::vector<double> scores = detector.ScoreAll(data);
  std::ostringstream csv;
  csv << "index,score,predicted_class\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    csv << i << ',' << FormatDouble(scores[i]) << ',' << (scores[i] >= 0.5 ? 1 : 0) << '\n';
  }
  WriteFileAtomically(o.output, csv.str());
  WriteFileAtomically(o.output + ".run.json", Dump(run_config));
  out << "scored " << scores.size() << " points to " << o.output << '\n';
  if (data.has_labels() && data.CountLabel(0) > 0 && data.CountLabel(1) > 0) {
    out << "AUC against " << o.data.label_column << ": " << RocAuc(scores, data.labels()) << '\n';
  }
  return kExitOk;
}

int InterpretCommand(const Options& o, const ordered_json& run_config, std::ostream& out) {
  const Detector detector = DetectorFromJson(ReadJsonFile(o.model));
  detector.network();  // Rejects forests before touching the baseline file.
  const std::string baseline_path =
      o.baselines.empty() ? DefaultBaselinePath(o.model) : o.baselines;
  const BaselineSet baselines = BaselineSetFromJson(ReadJsonFile(baseline_path));
  const Dataset data = LoadData(o.data);
  if (data.dims() != detector.normalizer().dims()) {
    throw ShapeError("model expects " + std::to_string(detector.normalizer().dims()) +
                     " dimensions, data has " + std::to_string(data.dims()));
  }
  std::vector<std::size_t> rows = o.rows;
  if (rows.empty()) {
    rows.resize(data.size());
    std::iota(rows.begin(), rows.end(), 0);
  }

  ordered_json report;
  report["run_config"] = run_config;
  report["interpretations"] = ordered_json::array();
  for (const std::size_t row : rows) {
    if (row >= data.size()) {
      throw PreconditionError("row " + std::to_string(row) + " is out of range (data has " +
                              std::to_string(data.size()) + " rows)");
    }
    const AnomalyInterpretation interpretation =
        InterpretPoint(detector, baselines, data.Row(row), o.steps);
    ordered_json entry;
    entry["row"] = row;
    entry.update(InterpretationToJson(interpretation, detector.dim_names()));
    report["interpretations"].push_back(std::move(entry));
    if (o.text) out << "row " << row << ": " << BlameBars(interpretation, detector.dim_names());
  }
  WriteFileAtomically(o.output, Dump(report));
  out << "interpreted " << rows.size() << " points to " << o.output << '\n';
  return kExitOk;
}

int Benchmark(const Options& o, const ordered_json& run_config, std::ostream& out) {
  const Dataset data = LoadData(o.data);
  if (!data.has_labels()) {
    throw PreconditionError("benchmark needs ground-truth labels in column '" +
                            o.data.label_column + "'");
  }
  const std::string name = o.dataset_name.empty()
                               ? std::filesystem::path(o.data.path).stem().string()
                               : o.dataset_name;
  std::vector<std::string> kinds = o.detectors;
  if (kinds.empty()) kinds.push_back(o.detector.detector);

  std::vector<EvalReport> reports;
  ordered_json doc;
  doc["run_config"] = run_config;
  doc["reports"] = ordered_json::array();
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    // Every detector sees the same fold assignment.
    const DetectorConfig config = MakeDetectorConfig(o.detector, kinds[i], o.seed);
    reports.push_back(KFoldCv(data, config, o.folds, o.trials, o.seed, name));
    ordered_json entry = ToJson(reports.back());
    entry["config"] = DetectorConfigJson(config);
    doc["reports"].push_back(std::move(entry));
  }
  doc["rank_sum_p_values"] = ordered_json::array();
  for (std::size_t a = 0; a < reports.size(); ++a) {
    for (std::size_t b = a + 1; b < reports.size(); ++b) {
      ordered_json entry;
      entry["a"] = reports[a].detector;
      entry["b"] = reports[b].detector;
      entry["p_value"] = RankSumTest(reports[a].aucs, reports[b].aucs);
      doc["rank_sum_p_values"].push_back(std::move(entry));
    }
  }
  const std::string table = FormatReportTable(reports);
  WriteFileAtomically(o.output, Dump(doc));
  if (!o.table.empty()) WriteFileAtomically(o.table, table);
  out << table;
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Negative-sampling anomaly detection with integrated-gradients interpretation",
               "nsad"};
  app.require_subcommand(1);
  Options o;

  CLI::App* gen = app.add_subcommand("gen-synth", "Generate a labeled multimodal Gaussian CSV");
  gen->add_option("--dims", o.synth.dims)->capture_default_str();
  gen->add_option("--modes", o.synth.num_modes)->capture_default_str();
  gen->add_option("--magnitude", o.synth.mode_magnitude, "Mode centers at +-magnitude per axis")
      ->capture_default_str();
  gen->add_option("--sigma", o.synth.sigma, "Per-dimension standard deviation")
      ->capture_default_str();
  gen->add_option("--n", o.synth.n_normal, "Normal points")->capture_default_str();
  gen->add_option("--anomaly-frac", o.synth.anomaly_fraction,
                  "Uniform anomalies as a fraction of --n")
      ->capture_default_str();
  gen->add_option("--noise-frac", o.synth.noise_dim_fraction,
                  "Fraction of dimensions replaced by uniform noise")
      ->capture_default_str();
  AddSeed(gen, o.seed);
  gen->add_option("-o,--output", o.output, "Output CSV")->required();

  CLI::App* train = app.add_subcommand("train", "Train a negative-sampling detector");
  AddDataOptions(train, o.data);
  train->add_option("--detector", o.detector.detector)
      ->check(CLI::IsMember({"ns-nn", "ns-rf"}))
      ->capture_default_str();
  AddDetectorOptions(train, o.detector);
  train->add_option("--epsilon", o.epsilon, "Baseline tolerance: keep positives scoring >= 1-eps")
      ->capture_default_str();
  train->add_option("--baselines", o.baselines,
                    "Baseline output (ns-nn; default <model>.baselines.json)");
  AddSeed(train, o.seed);
  train->add_option("-o,--output", o.output, "Model JSON")->required();

  CLI::App* score = app.add_subcommand("score", "Score points with a trained detector");
  score->add_option("--model", o.model)->required();
  AddDataOptions(score, o.data);
  score->add_option("-o,--output", o.output, "Scores CSV")->required();

  CLI::App* interpret = app.add_subcommand("interpret", "Attribute anomaly scores (ns-nn only)");
  interpret->add_option("--model", o.model)->required();
  interpret->add_option("--baselines", o.baselines, "Default <model>.baselines.json");
  AddDataOptions(interpret, o.data);
  interpret->add_option("--rows", o.rows, "Row indices to interpret (default: all)")
      ->delimiter(',');
  interpret->add_option("-k,--steps", o.steps, "Integrated-gradients steps")->capture_default_str();
  interpret->add_flag("--text", o.text, "Print a plain-text blame summary");
  interpret->add_option("-o,--output", o.output, "Report JSON")->required();

  CLI::App* bench = app.add_subcommand("benchmark", "Repeated stratified k-fold AUC evaluation");
  AddDataOptions(bench, o.data);
  bench->add_option("--detector", o.detectors, "ns-nn and/or ns-rf (repeatable)")
      ->check(CLI::IsMember({"ns-nn", "ns-rf"}));
  AddDetectorOptions(bench, o.detector);
  bench->add_option("--trials", o.trials)->capture_default_str();
  bench->add_option("--folds", o.folds)->capture_default_str();
  bench->add_option("--dataset-name", o.dataset_name, "Row label (default: CSV file stem)");
  bench->add_option("--table", o.table, "Also write the text table here");
  AddSeed(bench, o.seed);
  bench->add_option("-o,--output", o.output, "Report JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\nrun 'nsad --help' for usage\n";
    return kExitUsageError;
  }

  CLI::App* command = app.get_subcommands().front();
  ordered_json run_config;
  run_config["command"] = command->get_name();
  run_config["args"] = args;
  run_config["seed"] = o.seed;
  ordered_json options = ordered_json::object();
  for (const CLI::Option* opt : command->get_options()) {
    if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
    const auto& results = opt->results();
    options[opt->get_name()] =
        results.empty() ? ordered_json(opt->get_default_str())
                        : (results.size() == 1 ? ordered_json(results.front()) : ordered_json(results));
  }
  run_config["options"] = std::move(options);

  try {
    if (command == gen) return GenSynth(o, run_config, out);
    if (command == train) return Train(o, run_config, out);
    if (command == score) return Score(o, run_config, out);
    if (command == interpret) return InterpretCommand(o, run_config, out);
    return Benchmark(o, run_config, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace nsad
