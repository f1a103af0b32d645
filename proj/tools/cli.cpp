#include "cli.h"

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "rainbench/annotations.h"
#include "rainbench/error.h"
#include "rainbench/file_io.h"
#include "rainbench/metrics.h"
#include "rainbench/report.h"
#include "rainbench/survey_service.h"

namespace rainbench::cli {

namespace {

std::vector<std::string> images_in(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::kIoError, "not a directory: " + dir.string());
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Manifest entries are stored relative to the manifest's own directory.
std::string relative_to(const fs::path& p, const fs::path& manifest_path) {
  const fs::path base = fs::absolute(manifest_path).parent_path();
  return fs::absolute(p).lexically_normal().lexically_relative(base.lexically_normal()).generic_string();
}

ModelOutputSet parse_model_spec(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw UsageError("--model expects NAME=DIR, got '" + spec + "'", 2);
  }
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

int run_ingest(const IngestOptions& o) {
  const auto records = parse_annotations(read_file(o.annotations));
  const WeatherCounts counts = count_weather(records);
  const std::string image_dir = relative_to(o.images, o.out);
  DatasetManifest m = build_class_manifest(records, image_dir, o.per_class, o.seed);
  write_file_atomic(o.out, persist_manifest(m));
  std::printf("ingest: %zu records (rainy %zu, clear %zu, other %zu); sampled %zu per class; seed %llu -> %s\n",
              records.size(), counts.rainy, counts.clear, counts.other, o.per_class,
              static_cast<unsigned long long>(o.seed), o.out.string().c_str());
  return 0;
}

int run_pair(const PairOptions& o) {
  std::vector<std::string> clean, rain;
  for (const auto& p : images_in(o.clean_dir)) clean.push_back(relative_to(p, o.out));
  for (const auto& p : images_in(o.rain_dir)) rain.push_back(relative_to(p, o.out));
  DatasetManifest m;
  m.seed = o.seed;
  m.clean_entries = clean;
  m.rain_entries = rain;
  m.pairs = assign_splits(make_pairs(clean, rain), o.counts, o.seed);
  write_file_atomic(o.out, persist_manifest(m));
  if (o.layout) write_pair_layout(m, fs::absolute(o.out).parent_path(), *o.layout);
  std::printf("pair: %zu pairs (train %zu, test %zu, val %zu); seed %llu -> %s\n", m.pairs.size(), o.counts.train,
              o.counts.test, o.counts.val, static_cast<unsigned long long>(o.seed), o.out.string().c_str());
  return 0;
}

int run_bench(const BenchOptions& o) {
  const DatasetManifest m = load_manifest(read_text_file(o.manifest));
  const fs::path base = fs::absolute(o.manifest).parent_path();
  const BenchmarkResult result = run_benchmark(m, o.models, base, o.threads);
  write_file_atomic(o.report / "table.txt", emit_table(result.table, TableStyle::kText));
  write_file_atomic(o.report / "table.csv", emit_table(result.table, TableStyle::kCsv));
  write_file_atomic(o.report / "table.json", emit_table(result.table, TableStyle::kStructured));
  write_file_atomic(o.report / "scores.csv", emit_scores(result.records));
  if (o.gallery) annotate_gallery(m, o.models, result.records, base, o.report / "gallery", o.threads);
  std::printf("bench: %zu test pairs, %zu model(s); manifest seed %llu -> %s\n", result.table.n, o.models.size(),
              static_cast<unsigned long long>(m.seed), o.report.string().c_str());
  return 0;
}

int run_score(const ScoreOptions& o) {
  const QualityScore q = score_pair(load_image(o.reference.string()), load_image(o.candidate.string()));
  std::printf("ssim %.6f\npsnr_hvs_m %.4f\npsnr_hvs %.4f\npsnr %.4f\nmse %.6f\n", q.ssim, q.psnr_hvs_m, q.psnr_hvs,
              q.psnr, q.mse);
  return 0;
}

std::atomic<SurveyServer*> g_server{nullptr};

void handle_signal(int) {
  if (auto* s = g_server.load()) s->stop();
}

int run_survey_serve(const SurveyServeOptions& o) {
  SurveyStore store(images_in(o.syn_pool), images_in(o.real_pool), o.log, o.shape, o.seed);
  // Surface pool problems before accepting traffic.
  build_quiz(images_in(o.syn_pool), images_in(o.real_pool), o.seed, "probe", o.shape);
  ServerOptions opts;
  if (const char* token = std::getenv("RAINBENCH_ADMIN_TOKEN")) opts.admin_token = token;
  opts.static_dir = o.static_dir;
  SurveyServer server(store, opts);
  const int port = server.bind(o.host, o.port);
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::printf("survey-serve: listening on %s:%d; seed %llu\n", o.host.c_str(), port,
              static_cast<unsigned long long>(o.seed));
  std::fflush(stdout);
  server.listen();
  g_server = nullptr;
  return 0;
}

int run_survey_report(const SurveyReportOptions& o) {
  const auto sessions = EventLog::replay(o.log);
  const std::string report = aggregate_report(sessions, o.positive);
  if (o.out) {
    write_file_atomic(*o.out, report);
  } else {
    std::fputs(report.c_str(), stdout);
  }
  return 0;
}

}  // namespace

Command parse_cli(const std::vector<std::string>& args) {
  CLI::App app{"Rain-removal benchmark harness", "rainbench"};
  app.require_subcommand(1);

  IngestOptions ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Sample clear/rainy images from weather annotations");
  c_ingest->add_option("--annotations", ingest.annotations, "BDD100K-style label JSON")->required();
  c_ingest->add_option("--images", ingest.images, "Directory holding the annotated images")->required();
  c_ingest->add_option("--per-class", ingest.per_class, "Images sampled per class")->default_val(1000);
  c_ingest->add_option("--seed", ingest.seed, "Sampling seed")->default_val(kDefaultSeed);
  c_ingest->add_option("--out", ingest.out, "Manifest to write")->required();

  PairOptions pair;
  auto* c_pair = app.add_subcommand("pair", "Pair clean and rained images and assign splits");
  c_pair->add_option("--clean", pair.clean_dir, "Clean images")->required()->check(CLI::ExistingDirectory);
  c_pair->add_option("--rain", pair.rain_dir, "Rained counterparts (same file stems)")
      ->required()
      ->check(CLI::ExistingDirectory);
  c_pair->add_option("--train", pair.counts.train, "Train pairs")->required();
  c_pair->add_option("--test", pair.counts.test, "Test pairs")->required();
  c_pair->add_option("--val", pair.counts.val, "Validation pairs")->required();
  c_pair->add_option("--seed", pair.seed, "Split seed")->default_val(kDefaultSeed);
  c_pair->add_option("--out", pair.out, "Manifest to write")->required();
  std::string layout;
  c_pair->add_option("--layout", layout, "Also write rain/, norain/ and merged/ PNGs under this root");

  BenchOptions bench;
  std::vector<std::string> model_specs;
  bool no_gallery = false;
  auto* c_bench = app.add_subcommand("bench", "Score model outputs over the test split");
  c_bench->add_option("--manifest", bench.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  c_bench->add_option("--model", model_specs, "NAME=DIR, repeatable")->take_all();
  c_bench->add_option("--report", bench.report, "Report directory")->required();
  c_bench->add_flag("--no-gallery", no_gallery, "Skip gallery strips");
  c_bench->add_option("--threads", bench.threads, "Worker count (default RAINBENCH_THREADS or all cores)");

  ScoreOptions score;
  auto* c_score = app.add_subcommand("score", "Print quality scores of a candidate against a reference");
  c_score->add_option("reference", score.reference, "Reference image")->required()->check(CLI::ExistingFile);
  c_score->add_option("candidate", score.candidate, "Candidate image")->required()->check(CLI::ExistingFile);

  SurveyServeOptions serve;
  std::string serve_log, serve_static;
  auto* c_serve = app.add_subcommand("survey-serve", "Serve the real/fake quiz over HTTP");
  c_serve->add_option("--syn-pool", serve.syn_pool, "Synthetic rain images")->required()->check(CLI::ExistingDirectory);
  c_serve->add_option("--real-pool", serve.real_pool, "Real rain images")->required()->check(CLI::ExistingDirectory);
  c_serve->add_option("--host", serve.host, "Bind address")->default_val("127.0.0.1");
  c_serve->add_option("--port", serve.port, "Port (0 picks a free one)")->default_val(8080)->check(CLI::Range(0, 65535));
  c_serve->add_option("--log", serve_log, "Append-only event log");
  c_serve->add_option("--static", serve_static, "Directory served at /")->check(CLI::ExistingDirectory);
  c_serve->add_option("--fake", serve.shape.fake, "Synthetic items per quiz")->default_val(6);
  c_serve->add_option("--real", serve.shape.real, "Real items per quiz")->default_val(4);
  c_serve->add_option("--seed", serve.seed, "Base seed for quiz draws")->default_val(kDefaultSeed);

  SurveyReportOptions report;
  std::string positive = "fake";
  std::string report_out;
  auto* c_report = app.add_subcommand("survey-report", "Tally a survey event log");
  c_report->add_option("--log", report.log, "Event log")->required()->check(CLI::ExistingFile);
  c_report->add_option("--positive", positive, "Positive class")->check(CLI::IsMember({"fake", "real"}));
  c_report->add_option("--out", report_out, "Write the report here instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw UsageError(app.help(), 0);
  } catch (const CLI::ParseError& e) {
    std::string help;
    for (auto* sub : app.get_subcommands()) help = sub->help();
    if (help.empty()) help = app.help();
    throw UsageError(std::string(e.what()) + "\n" + help, e.get_exit_code() == 0 ? 0 : 2);
  }

  if (c_ingest->parsed()) return ingest;
  if (c_pair->parsed()) {
    if (!layout.empty()) pair.layout = layout;
    return pair;
  }
  if (c_bench->parsed()) {
    for (const auto& s : model_specs) bench.models.push_back(parse_model_spec(s));
    for (std::size_t i = 0; i < bench.models.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (bench.models[i].model_name == bench.models[j].model_name) {
          throw UsageError("duplicate model name '" + bench.models[i].model_name + "'", 2);
        }
      }
      if (bench.models[i].model_name == kBaselineLabel) throw UsageError("model name is reserved", 2);
    }
    bench.gallery = !no_gallery;
    return bench;
  }
  if (c_score->parsed()) return score;
  if (c_serve->parsed()) {
    if (!serve_log.empty()) serve.log = serve_log;
    if (!serve_static.empty()) serve.static_dir = serve_static;
    return serve;
  }
  report.positive = *verdict_from_string(positive);
  if (!report_out.empty()) report.out = report_out;
  return report;
}

int run(const Command& cmd) {
  try {
    return std::visit(
        [](const auto& o) -> int {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, IngestOptions>) return run_ingest(o);
          else if constexpr (std::is_same_v<T, PairOptions>) return run_pair(o);
          else if constexpr (std::is_same_v<T, BenchOptions>) return run_bench(o);
          else if constexpr (std::is_same_v<T, ScoreOptions>) return run_score(o);
          else if constexpr (std::is_same_v<T, SurveyServeOptions>) return run_survey_serve(o);
          else return run_survey_report(o);
        },
        cmd);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(e.name()).c_str(), e.detail().c_str());
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: IoError: %s\n", e.what());
    return 1;
  }
}

}  // namespace rainbench::cli
