// Copyright 2026 The mvforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mvforge/cli.h"

#include <signal.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "mvforge/baselines.h"
#include "mvforge/bundle.h"
#include "mvforge/error.h"
#include "mvforge/mvrank.h"
#include "mvforge/pairgen.h"
#include "mvforge/provenance.h"
#include "mvforge/ranker.h"
#include "mvforge/recommend.h"
#include "mvforge/service.h"
#include "mvforge/synth.h"

namespace mvforge {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

std::vector<int> parse_int_list(const std::string& text, char sep = ',') {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw UsageError("not an integer list: '" + text + "'");
    }
  }
  return out;
}

ModelKind kind_flag(const std::string& name) {
  auto kind = parse_model_kind(name);
  if (!kind) throw UsageError("--kind must be single or mv");
  return *kind;
}

PairDataset load_pair_dataset(ModelKind kind, const fs::path& pairs) {
  if (!fs::exists(pairs)) throw UsageError("pairs file not found: " + pairs.string());
  if (kind == ModelKind::kSingleChart) {
    const auto records = read_chart_pairs_jsonl(read_file(pairs));
    const fs::path sidecar = features_sidecar_path(pairs);
    if (!fs::exists(sidecar)) throw UsageError("missing feature sidecar " + sidecar.string());
    try {
      return single_chart_dataset(records, feature_store_from_json(json::parse(read_file(sidecar))));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kCorrupt, std::string("bad feature sidecar: ") + e.what());
    }
  }
  return mv_dataset(read_mv_pairs_jsonl(read_file(pairs)));
}

ModelBundle load_model_flag(const std::string& path, std::optional<ModelKind> kind = {}) {
  if (path.empty() || !fs::exists(path)) throw UsageError("model file not found: '" + path + "'");
  ModelBundle b = load_bundle_file(path);
  if (kind && b.kind != *kind) {
    throw Error(ErrorCode::kLayout, path + " holds a " + std::string(model_kind_name(b.kind)) +
                                        " model, expected " + std::string(model_kind_name(*kind)));
  }
  return b;
}

// ---- gen-synth -------------------------------------------------------------

struct GenSynthArgs {
  SynthOptions synth;
  std::string out;
};

int cmd_gen_synth(const GenSynthArgs& a, std::ostream& out) {
  if (a.synth.tables < 1) throw UsageError("--tables must be at least 1");
  if (a.synth.cols_min < 1 || a.synth.cols_max < a.synth.cols_min) {
    throw UsageError("need 1 <= --cols-min <= --cols-max");
  }
  const SynthCorpus corpus = generate_synthetic_corpus(a.synth);
  write_synthetic_corpus(corpus, a.out);
  out << "wrote " << corpus.tables.size() << " tables to " << a.out << "\n";
  return kExitOk;
}

// ---- gen-sessions ----------------------------------------------------------

struct GenSessionsArgs {
  MvSessionOptions sessions;
  std::string model_single;
  std::string out;
};

int cmd_gen_sessions(const GenSessionsArgs& a, std::ostream& out) {
  if (a.sessions.sessions < 1) throw UsageError("--sessions must be at least 1");
  const ModelBundle single = load_model_flag(a.model_single, ModelKind::kSingleChart);
  const MvSessionCorpus corpus = generate_mv_sessions(a.sessions, single);
  for (const ProvenanceLog& log : corpus.logs) {
    write_file(fs::path(a.out) / log_file_name(log.session_id),
               export_log_jsonl(log, log_table(log)));
  }
  out << "wrote " << corpus.logs.size() << " session logs to " << a.out << "\n";
  return kExitOk;
}

// ---- pairs -----------------------------------------------------------------

struct PairsArgs {
  std::string corpus;
  std::string provenance;
  std::string model_single;
  std::string out;
  std::optional<std::size_t> cap;
  std::uint64_t seed = 0;
};

bool empty_dir(const fs::path& dir) {
  return !fs::is_directory(dir) || fs::directory_iterator(dir) == fs::directory_iterator();
}

int cmd_pairs(const PairsArgs& a, std::ostream& out) {
  if (!a.corpus.empty()) {
    if (empty_dir(a.corpus)) throw UsageError("corpus directory is missing or empty: " + a.corpus);
    if (!fs::exists(fs::path(a.corpus) / "ground_truth.jsonl")) {
      throw UsageError("no ground_truth.jsonl in " + a.corpus);
    }
    CorpusPairOptions opts;
    opts.cap_per_ground_truth = a.cap;
    opts.seed = a.seed;
    const CorpusPairs result = corpus_pairs_from_dir(a.corpus, opts);
    write_file(a.out, write_chart_pairs_jsonl(result.records));
    write_file(features_sidecar_path(a.out), to_json(result.features).dump());
    out << result.counters.pairs << " pairs\n";
    const json counters = result.counters.to_json();
    for (const auto& [key, value] : counters.items()) {
      out << key << ": " << value.dump() << "\n";
    }
    return kExitOk;
  }
  if (empty_dir(a.provenance)) {
    throw UsageError("provenance directory is missing or empty: " + a.provenance);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.provenance)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 12 && name.substr(name.size() - 12) == ".mvlog.jsonl") files.push_back(entry.path());
  }
  if (files.empty()) throw UsageError("no .mvlog.jsonl files in " + a.provenance);
  std::sort(files.begin(), files.end());
  const ModelBundle single = load_model_flag(a.model_single, ModelKind::kSingleChart);
  std::vector<MvPairRecord> records;
  std::size_t sessions = 0, skipped = 0, skipped_no_consent = 0;
  for (const fs::path& f : files) {
    const ProvenanceLog log = import_log_jsonl(read_file(f));
    ++sessions;
    if (!log.consent) {
      ++skipped_no_consent;
      continue;
    }
    std::vector<MvStatePair> pairs;
    try {
      pairs = provenance_pairs(log);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInsufficientHistory) throw;
      ++skipped;
      continue;
    }
    auto recs = mv_pair_records(pairs, single, log.features);
    records.insert(records.end(), std::make_move_iterator(recs.begin()),
                   std::make_move_iterator(recs.end()));
  }
  write_file(a.out, write_mv_pairs_jsonl(records));
  out << records.size() << " pairs\n";
  out << "sessions_seen: " << sessions << "\n";
  out << "sessions_skipped_no_consent: " << skipped_no_consent << "\n";
  out << "sessions_skipped_short_history: " << skipped << "\n";
  return kExitOk;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string kind;
  std::string pairs;
  std::string out;
  std::string resume;
  TrainingHyper hyper;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const ModelKind kind = kind_flag(a.kind);
  if (a.hyper.epochs < 0) throw UsageError("--epochs must be non-negative");
  if (a.hyper.batch_size < 1) throw UsageError("--batch-size must be positive");
  std::optional<ModelBundle> start;
  if (!a.resume.empty()) start = load_model_flag(a.resume, kind);
  const PairDataset data = load_pair_dataset(kind, a.pairs);
  auto on_epoch = [&out](const neural::EpochReport& r) {
    out << "epoch " << r.epoch << " loss " << fixed(r.mean_loss, 6) << "\n";
  };
  TrainReport report;
  if (start) {
    report = resume_training(*start, data, a.hyper, on_epoch);
  } else {
    report = train_model(kind, data, a.hyper, default_scorer_config(kind), on_epoch);
  }
  save_bundle_file(report.bundle, a.out);
  out << "trained " << model_kind_name(kind) << " model on " << data.size() << " pairs -> "
      << a.out << "\n";
  return kExitOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string model;
  std::string kind;
  std::string pairs;
  int mccv = 0;
  double split = 0.8;
  std::vector<std::string> baselines;
  bool recall = false;
  std::string ks = "1,3,5,10";
  std::string corpus;
  bool oracle = false;
  bool audit = false;
  std::string report;
  std::optional<int> epochs;
  std::uint64_t seed = 0;
};

int cmd_recall(const EvalArgs& a, std::ostream& out) {
  if (a.corpus.empty() || empty_dir(a.corpus)) throw UsageError("--recall needs --corpus dir");
  const std::vector<int> ks = parse_int_list(a.ks);
  if (ks.empty() || *std::min_element(ks.begin(), ks.end()) < 1) {
    throw UsageError("--k needs positive integers");
  }
  SubsetScorer scorer;
  if (a.oracle) {
    const fs::path u = fs::path(a.corpus) / "utility.json";
    if (!fs::exists(u)) throw UsageError("--oracle needs " + u.string());
    scorer = planted_scorer(planted_utility_from_json(json::parse(read_file(u))));
  } else {
    scorer = bundle_subset_scorer(load_model_flag(a.model, ModelKind::kSingleChart));
  }
  const auto tables = load_recall_tables(a.corpus);
  if (tables.empty()) throw Error(ErrorCode::kEmptyDataset, "no usable ground truths in corpus");
  const auto curve = topk_recall_curve(scorer, tables, ks);
  out << "k,recall\n";
  for (std::size_t i = 0; i < ks.size(); ++i) out << ks[i] << "," << fixed(curve[i]) << "\n";
  return kExitOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (a.recall) return cmd_recall(a, out);
  if (a.pairs.empty()) throw UsageError("eval needs --pairs (or --recall)");
  for (const std::string& b : a.baselines) {
    if (b != "nn" && b != "ranksvm") throw UsageError("--baseline must be nn or ranksvm");
  }
  std::optional<ModelBundle> model;
  if (!a.model.empty()) model = load_model_flag(a.model);
  ModelKind kind = model ? model->kind : ModelKind::kSingleChart;
  if (!a.kind.empty()) kind = kind_flag(a.kind);
  if (model && model->kind != kind) throw Error(ErrorCode::kLayout, "--kind does not match --model");
  const PairDataset data = load_pair_dataset(kind, a.pairs);

  if (a.mccv <= 0) {
    if (!model) throw UsageError("eval without --mccv needs --model");
    out << "pair_accuracy " << fixed(pair_accuracy(*model, data)) << " over " << data.size()
        << " pairs\n";
    return kExitOk;
  }
  if (a.split <= 0.0 || a.split >= 1.0) throw UsageError("--split must be in (0, 1)");
  if (data.group_ids().size() < 2) throw Error(ErrorCode::kEmptyDataset, "need at least two groups");

  TrainingHyper hyper = model ? model->hyper : TrainingHyper{};
  if (!model) hyper.seed = a.seed;
  if (a.epochs) hyper.epochs = *a.epochs;
  const neural::ScorerConfig config = model ? model->model.config() : default_scorer_config(kind);

  std::vector<std::pair<std::string, CvReport>> reports;
  reports.emplace_back("ours", mc_cross_validate(
      data,
      [&](const PairDataset& train, const PairDataset& test, int) {
        return pair_accuracy(train_model(kind, train, hyper, config).bundle, test);
      },
      a.mccv, a.split, a.seed));
  for (const std::string& b : a.baselines) {
    TrainAndEvaluate fn;
    if (b == "nn") {
      NnBaselineConfig cfg;
      cfg.hyper = hyper;
      fn = [cfg](const PairDataset& train, const PairDataset& test, int) {
        return pair_accuracy(as_scorer(train_nn_baseline(train, cfg)), test);
      };
    } else {
      RankSvmConfig cfg;
      cfg.seed = hyper.seed;
      fn = [cfg](const PairDataset& train, const PairDataset& test, int) {
        return pair_accuracy(as_scorer(train_ranksvm_baseline(train, cfg)), test);
      };
    }
    reports.emplace_back(b, mc_cross_validate(data, fn, a.mccv, a.split, a.seed));
  }

  const CvReport& ours = reports.front().second;
  bool identical_splits = true;
  for (const auto& [name, r] : reports) {
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
      identical_splits = identical_splits && r.runs[i].test_groups == ours.runs[i].test_groups;
    }
  }
  out << "run\ttrain_groups\ttest_groups\ttrain_pairs\ttest_pairs";
  for (const auto& [name, r] : reports) out << "\t" << name;
  out << "\tdisjoint\n";
  for (std::size_t i = 0; i < ours.runs.size(); ++i) {
    const CvRun& run = ours.runs[i];
    out << run.run << "\t" << run.train_groups.size() << "\t" << run.test_groups.size() << "\t"
        << run.train_pairs << "\t" << run.test_pairs;
    for (const auto& [name, r] : reports) out << "\t" << fixed(r.runs[i].value);
    out << "\t" << (run.disjoint ? "yes" : "no") << "\n";
  }
  out << "mean";
  for (const auto& [name, r] : reports) {
    out << "\t" << name << " " << fixed(r.mean) << " ± " << fixed(r.std);
  }
  out << "\n";
  out << "audit: disjoint=" << (ours.disjoint ? "true" : "false")
      << " identical_splits=" << (identical_splits ? "true" : "false") << "\n";
  if (a.audit) {
    for (const CvRun& run : ours.runs) {
      json j = {{"run", run.run}, {"test_groups", run.test_groups}};
      out << j.dump() << "\n";
    }
  }
  if (!a.report.empty()) {
    json j = json::object();
    for (const auto& [name, r] : reports) j[name] = to_json(r, a.audit);
    j["identical_splits"] = identical_splits;
    write_file(a.report, j.dump(2));
  }
  return ours.disjoint && identical_splits ? kExitOk : kExitFailure;
}

// ---- recommend -------------------------------------------------------------

struct RecommendArgs {
  std::string table;
  int n = 0;
  std::string lock;
  std::string model_single;
  std::string model_mv;
  std::string emit = "json";
  bool keep_types = false;
  std::uint64_t seed = 0;
};

// "0,3:bar;1" -> charts over columns {0,3} as a bar and {1} with its best type.
std::vector<std::pair<ColumnSet, std::optional<ChartType>>> parse_locks(const std::string& text) {
  std::vector<std::pair<ColumnSet, std::optional<ChartType>>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    std::optional<ChartType> type;
    const auto colon = item.find(':');
    if (colon != std::string::npos) {
      type = parse_chart_type(item.substr(colon + 1));
      if (!type) throw UsageError("unknown chart type in --lock: " + item);
      item.resize(colon);
    }
    const auto cols = parse_int_list(item);
    if (cols.empty()) throw UsageError("empty column list in --lock");
    out.emplace_back(canonical_columns(cols), type);
  }
  return out;
}

int cmd_recommend(const RecommendArgs& a, std::ostream& out) {
  if (a.n < 1 || a.n > kMaxMvCharts) throw UsageError("--n must be between 1 and 12");
  if (a.emit != "json" && a.emit != "vegalite") throw UsageError("--emit must be json or vegalite");
  if (!fs::exists(a.table)) throw UsageError("table not found: " + a.table);
  const auto locks = parse_locks(a.lock);
  const ModelBundle single = load_model_flag(a.model_single, ModelKind::kSingleChart);
  const ModelBundle mv_model = load_model_flag(a.model_mv, ModelKind::kMv);
  const DataTable table = parse_csv(read_file(a.table), fs::path(a.table).stem().string());
  const TableFeatures features = featurize_table(table);

  const ChartScorer chart_scorer = cached_chart_scorer(single, features);
  std::vector<ChartSpec> locked;
  for (const auto& [cols, type] : locks) {
    for (int c : cols) {
      if (c < 0 || c >= table.num_columns()) {
        throw UsageError("--lock column " + std::to_string(c) + " not in table");
      }
    }
    if (static_cast<int>(cols.size()) > kMaxChartColumns) throw UsageError("--lock chart has more than 4 columns");
    locked.push_back(assign_encodings(table, cols, type ? *type : chart_scorer(cols).best_type()));
  }
  PoolOptions opts;
  opts.dedup = !a.keep_types;
  const CandidatePool pool = enumerate_candidates(table, bundle_chart_scorer(single, features), opts);
  const MvScorer scorer = learned_mv_scorer(mv_model, single, features);
  const MVState mv = recommend_mv(table, a.n, locked, pool, scorer);
  if (a.emit == "vegalite") {
    for (const MvChart& c : mv.charts) out << vegalite_json(c.spec, table).dump() << "\n";
    return kExitOk;
  }
  std::vector<ChartScore> per_chart;
  for (const MvChart& c : mv.charts) per_chart.push_back(chart_scorer(c.spec.columns));
  out << recommendation_json(table, mv, scorer({mv.specs()}).front(), per_chart).dump(2) << "\n";
  return kExitOk;
}

// ---- serve -----------------------------------------------------------------

struct ServeArgs {
  std::string config;
  std::optional<int> port;
  std::uint64_t seed = 0;
};

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<fs::path> path;
  if (!a.config.empty()) {
    if (!fs::exists(a.config)) throw UsageError("config not found: " + a.config);
    path = a.config;
  }
  ServiceConfig config = load_service_config(path, process_environment());
  if (a.port) config.port = *a.port;
  std::unique_ptr<Service> service;
  try {
    service = Service::from_config(config);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw UsageError(e.what());
    throw;
  }

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGINT);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    stop_server();
  });

  out << "mvforge " << kVersion << " listening on " << config.host << ":" << config.port << std::endl;
  const bool ok = run_server(*service);
  if (!ok) {
    err << "cannot bind " << config.host << ":" << config.port << "\n";
    // Wake the waiter so it can be joined.
    pthread_kill(waiter.native_handle(), SIGTERM);
  }
  waiter.join();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  const std::size_t flushed = service->flush_all();
  out << "flushed " << flushed << " consenting sessions" << std::endl;
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"mvforge: learned multiple-view recommendation", "mvforge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  GenSynthArgs gs;
  auto* gen = app.add_subcommand("gen-synth", "Generate a seeded synthetic corpus");
  gen->add_option("--tables", gs.synth.tables, "Number of tables")->capture_default_str();
  gen->add_option("--cols-min", gs.synth.cols_min, "Fewest columns per table")->capture_default_str();
  gen->add_option("--cols-max", gs.synth.cols_max, "Most columns per table")->capture_default_str();
  gen->add_option("--rows-min", gs.synth.rows_min)->capture_default_str();
  gen->add_option("--rows-max", gs.synth.rows_max)->capture_default_str();
  gen->add_flag("--interaction", gs.synth.interaction, "Add a nonlinear interaction term");
  gen->add_option("--gamma", gs.synth.gamma, "Interaction strength")->capture_default_str();
  gen->add_option("--min-gap", gs.synth.min_gap, "Utility gap between best and runner-up")
      ->capture_default_str();
  gen->add_option("--seed", gs.synth.seed)->capture_default_str();
  gen->add_option("--out", gs.out, "Output directory")->required();

  GenSessionsArgs gss;
  auto* gsess = app.add_subcommand("gen-sessions", "Generate synthetic authoring session logs");
  gsess->add_option("--sessions", gss.sessions.sessions)->capture_default_str();
  gsess->add_option("--model-single", gss.model_single, "Single-chart model")->required();
  gsess->add_option("--seed", gss.sessions.seed)->capture_default_str();
  gsess->add_option("--out", gss.out, "Output directory")->required();

  PairsArgs pa;
  auto* pairs = app.add_subcommand("pairs", "Build ranked pairs from a corpus or provenance logs");
  auto* corpus_opt = pairs->add_option("--corpus", pa.corpus, "Corpus directory");
  auto* prov_opt = pairs->add_option("--provenance", pa.provenance, "Directory of session logs");
  corpus_opt->excludes(prov_opt);
  pairs->add_option("--model-single", pa.model_single, "Single-chart model (provenance only)");
  pairs->add_option("--cap", pa.cap, "Negatives kept per ground truth");
  pairs->add_option("--seed", pa.seed)->capture_default_str();
  pairs->add_option("--out", pa.out, "Output pairs JSONL")->required();

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a single-chart or MV ranking model");
  train->add_option("--kind", ta.kind, "single or mv")->required();
  train->add_option("--pairs", ta.pairs, "Pairs JSONL")->required();
  train->add_option("--epochs", ta.hyper.epochs)->capture_default_str();
  train->add_option("--margin", ta.hyper.margin)->capture_default_str();
  train->add_option("--lambda", ta.hyper.lambda, "Type-loss weight")->capture_default_str();
  train->add_option("--lr", ta.hyper.lr)->capture_default_str();
  train->add_option("--batch-size", ta.hyper.batch_size)->capture_default_str();
  train->add_option("--seed", ta.hyper.seed)->capture_default_str();
  train->add_option("--resume", ta.resume, "Continue from this model file");
  train->add_option("--out", ta.out, "Output model file")->required();

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Pair accuracy, cross validation and recall");
  eval->add_option("--model", ea.model, "Model file");
  eval->add_option("--kind", ea.kind, "single or mv, when no model is given");
  eval->add_option("--pairs", ea.pairs, "Pairs JSONL");
  eval->add_option("--mccv", ea.mccv, "Monte-Carlo cross-validation runs");
  eval->add_option("--split", ea.split, "Train fraction of groups")->capture_default_str();
  eval->add_option("--baseline", ea.baselines, "nn and/or ranksvm on identical splits");
  eval->add_option("--epochs", ea.epochs, "Override training epochs");
  eval->add_flag("--recall", ea.recall, "Top-k recall over a corpus");
  eval->add_option("--k", ea.ks, "Comma-separated k values")->capture_default_str();
  eval->add_option("--corpus", ea.corpus, "Corpus directory for --recall");
  eval->add_flag("--oracle", ea.oracle, "Score with the corpus's planted utility");
  eval->add_flag("--audit", ea.audit, "Print each run's held-out groups");
  eval->add_option("--report", ea.report, "Write the full report as JSON");
  eval->add_option("--seed", ea.seed)->capture_default_str();

  RecommendArgs ra;
  auto* rec = app.add_subcommand("recommend", "Recommend an MV for a CSV table");
  rec->add_option("--table", ra.table, "CSV file")->required();
  rec->add_option("--n", ra.n, "Number of charts")->required();
  rec->add_option("--lock", ra.lock, "Locked charts, e.g. \"0,3:bar;1\"");
  rec->add_option("--model-single", ra.model_single)->required();
  rec->add_option("--model-mv", ra.model_mv)->required();
  rec->add_option("--emit", ra.emit, "json or vegalite")->capture_default_str();
  rec->add_flag("--keep-types", ra.keep_types, "Keep alternative chart types in the pool");
  rec->add_option("--seed", ra.seed)->capture_default_str();

  ServeArgs sa;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", sa.config, "JSON config file");
  serve->add_option("--port", sa.port);
  serve->add_option("--seed", sa.seed)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen_synth(gs, out);
    if (gsess->parsed()) return cmd_gen_sessions(gss, out);
    if (pairs->parsed()) {
      if (pa.corpus.empty() == pa.provenance.empty()) {
        throw UsageError("pairs needs exactly one of --corpus or --provenance");
      }
      return cmd_pairs(pa, out);
    }
    if (train->parsed()) return cmd_train(ta, out);
    if (eval->parsed()) return cmd_eval(ea, out);
    if (rec->parsed()) return cmd_recommend(ra, out);
    if (serve->parsed()) return cmd_serve(sa, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfig ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace mvforge
