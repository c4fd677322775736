// estr: command-line front end for the event-stream text recognition toolkit.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "estr/corrector.hpp"
#include "estr/error.hpp"
#include "estr/eval_metrics.hpp"
#include "estr/event_core.hpp"
#include "estr/event_simulator.hpp"
#include "estr/frame_stacker.hpp"
#include "estr/memory_kernel.hpp"
#include "estr/pipeline/backend.hpp"
#include "estr/pipeline/bench.hpp"
#include "estr/pipeline/config.hpp"
#include "estr/pipeline/records.hpp"
#include "estr/pipeline/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTransport = 3;

int cmd_stats(const std::string& path, std::uint16_t width, std::uint16_t height) {
  const estr::ParsedEvents parsed = estr::read_events_file(path, width, height);
  const estr::StreamStats st = estr::compute_stats(parsed.stream);
  ordered_json j;
  j["source"] = path;
  j["width"] = parsed.stream.width;
  j["height"] = parsed.stream.height;
  j["n_events"] = st.n_events;
  j["n_positive"] = st.n_positive;
  j["n_negative"] = st.n_negative;
  j["duration_us"] = st.duration_us;
  j["events_per_second"] = st.events_per_second;
  j["resorted"] = parsed.diagnostics.resorted;
  ordered_json grid = ordered_json::array();
  for (int r = 0; r < estr::kStatsGridRows; ++r) {
    auto first = st.spatial_histogram.begin() + r * estr::kStatsGridCols;
    grid.push_back(std::vector<std::uint64_t>(first, first + estr::kStatsGridCols));
  }
  j["spatial_histogram"] = grid;
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_simulate(std::vector<std::string> files, double threshold, double eps, std::uint64_t period_us) {
  if (files.size() < 2) throw CLI::ValidationError("simulate", "need at least one input frame and an output path");
  const std::string out = files.back();
  files.pop_back();
  std::vector<estr::GrayImage> frames;
  for (const auto& f : files) frames.push_back(estr::read_gray_pixmap(f));
  const estr::EventStream stream =
      estr::simulate(estr::sequence_from_images(frames, period_us), {threshold, eps}, estr::Execution::parallel);
  estr::write_events_file(out, stream);
  ordered_json j;
  j["frames"] = files.size();
  j["events"] = stream.events.size();
  j["output"] = out;
  std::cout << j.dump() << "\n";
  return kExitOk;
}

int cmd_stack(const std::string& in, const std::string& outdir, std::uint32_t t_count, std::uint16_t width,
              std::uint16_t height) {
  const estr::ParsedEvents parsed = estr::read_events_file(in, width, height);
  const estr::FrameStack frames = estr::stack(parsed.stream, t_count);
  fs::create_directories(outdir);
  ordered_json windows = ordered_json::array();
  for (std::size_t i = 0; i < frames.t_count(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%02zu.ppm", i);
    estr::export_frame(frames.frames[i], (fs::path(outdir) / name).string());
    windows.push_back({frames.window_bounds[i].begin, frames.window_bounds[i].end});
  }
  estr::export_frame(estr::representative_frame(frames), (fs::path(outdir) / "representative.ppm").string());
  ordered_json j;
  j["t_count"] = frames.t_count();
  j["windows_us"] = windows;
  j["representative"] = (fs::path(outdir) / "representative.ppm").string();
  std::cout << j.dump() << "\n";
  return kExitOk;
}

std::vector<std::string> read_ids(const std::string& path) {
  std::vector<std::string> ids;
  if (fs::path(path).extension() == ".jsonl") {
    const std::string text = estr::pipeline::read_text_file(path);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j["id"].is_string()) {
        throw estr::Error(path + ": every line needs a string \"id\"");
      }
      ids.push_back(j["id"].get<std::string>());
    }
    return ids;
  }
  std::istringstream in(estr::pipeline::read_text_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

int cmd_split(const std::string& path, std::uint64_t seed, const std::string& out_dir) {
  const auto split = estr::eval::split_dataset(read_ids(path), seed);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    const auto dump = [&](const char* name, const std::vector<std::string>& ids) {
      std::string text;
      for (const auto& id : ids) text += id + "\n";
      estr::pipeline::write_text_file((fs::path(out_dir) / name).string(), text);
    };
    dump("train.txt", split.train);
    dump("val.txt", split.val);
    dump("test.txt", split.test);
  }
  ordered_json j;
  j["seed"] = seed;
  j["sizes"] = {{"train", split.train.size()}, {"val", split.val.size()}, {"test", split.test.size()}};
  if (out_dir.empty()) {
    j["train"] = split.train;
    j["val"] = split.val;
    j["test"] = split.test;
  }
  std::cout << j.dump() << "\n";
  return kExitOk;
}

struct CorrectOptions {
  std::string db_path;
  std::string scorer_path;
  int prompt_template = 3;
  double margin = 0.0;
  std::size_t max_candidates = estr::kDefaultMaxCandidates;
  std::string backend = "local";
  std::string endpoint;
  int timeout_ms = 10000;
  std::size_t concurrency = 4;
  std::string input;
  std::string output;
};

int cmd_correct(const CorrectOptions& o) {
  const auto db = estr::GlyphDatabase::load_file(o.db_path, o.max_candidates);
  const auto records = estr::pipeline::read_text_records(o.input);
  const estr::PromptTemplate tmpl = estr::prompt_template_from_id(o.prompt_template);
  std::vector<std::string> corrected(records.size());

  if (o.backend == "local") {
    if (o.scorer_path.empty()) throw CLI::ValidationError("--scorer", "the local backend needs a scorer corpus");
    const auto scorer = estr::BigramScorer::train_file(o.scorer_path);
    for (std::size_t i = 0; i < records.size(); ++i) corrected[i] = estr::correct(records[i].text, db, scorer, o.margin).corrected;
  } else {
    estr::pipeline::BackendSpec spec;
    spec.kind = estr::pipeline::backend_kind_from_name(o.backend);
    spec.endpoint = o.endpoint;
    spec.timeout_ms = o.timeout_ms;
    const auto backend = estr::pipeline::make_backend(spec);
    // Bounded fan-out; each worker pulls the next record index.
    std::atomic<std::size_t> next{0};
    std::vector<std::string> errors(records.size());
    const auto worker = [&] {
      for (std::size_t i = next++; i < records.size(); i = next++) {
        try {
          corrected[i] = estr::correct_via_llm(records[i].text, db, tmpl, *backend).corrected;
        } catch (const estr::BackendFailure& e) {
          errors[i] = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::max<std::size_t>(1, std::min(o.concurrency, records.size())); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!errors[i].empty()) {
        std::cerr << "estr correct: record '" << records[i].id << "': " << errors[i] << "\n";
        return kExitTransport;
      }
    }
  }

  std::string out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    ordered_json j;
    j["id"] = records[i].id;
    j["text"] = records[i].text;
    j["corrected"] = corrected[i];
    out += j.dump() + "\n";
  }
  if (o.output.empty()) {
    std::cout << out;
  } else {
    estr::pipeline::write_text_file(o.output, out);
  }
  return kExitOk;
}

int cmd_score(const std::string& metric, const std::string& pred, const std::string& gt, const std::string& field) {
  const auto pairs = estr::pipeline::join_by_id(estr::pipeline::read_text_records(pred, field),
                                                estr::pipeline::read_text_records(gt));
  ordered_json j;
  j["metric"] = metric;
  j["n"] = pairs.size();
  if (metric == "bleu") {
    const auto r = estr::eval::corpus_bleu(pairs, estr::Execution::parallel);
    j["aggregation"] = "corpus";
    j["bleu"] = r.bleu;
    j["precisions"] = r.precisions;
    j["brevity_penalty"] = r.brevity_penalty;
    j["hyp_len"] = r.hyp_len;
    j["ref_len"] = r.ref_len;
    j["sentence_mean_bleu"] = estr::eval::mean_sentence_bleu(pairs);
  } else {
    j["accuracy"] = estr::eval::word_accuracy(pairs);
  }
  std::cout << j.dump() << "\n";
  return kExitOk;
}

// Brute force: every pattern scored directly, full stable sort.
std::vector<std::size_t> full_sort_topk(const double* q, const estr::memory::MemoryBank& bank, std::size_t k,
                                        std::vector<double>& scores_out) {
  const std::size_t m = bank.pattern_count();
  std::vector<double> s(m);
  for (std::size_t j = 0; j < m; ++j) s[j] = estr::memory::cosine(q, bank.pattern(j), estr::memory::kPatternDim);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  order.resize(k);
  scores_out.clear();
  for (std::size_t i : order) scores_out.push_back(s[i]);
  return order;
}

int cmd_memtest(std::size_t cases, std::uint64_t seed) {
  using namespace estr::memory;
  std::mt19937_64 rng(seed);
  const std::size_t ks[] = {1, 3, 32, 64, 128};
  std::size_t failures = 0;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t k = ks[c % 5];
    const std::size_t m = k + rng() % (257 - k);
    const std::size_t d = 1 + rng() % 64;
    const std::size_t b = 1 + rng() % 4;
    const std::size_t l = 1 + rng() % 4;
    const MemoryBank bank = init_bank(d, m, rng());
    FeatureBatch f(b, l, d);
    std::normal_distribution<double> normal;
    for (double& x : f.data) x = normal(rng);
    const RetrievalResult got = retrieve(f, bank, k);
    const RetrievalResult par = retrieve(f, bank, k, estr::Execution::parallel);
    std::vector<double> q(kPatternDim), want_scores;
    bool ok = got.indices == par.indices && got.scores == par.scores;
    for (std::size_t r = 0; r < f.rows() && ok; ++r) {
      bank.down.apply(f.row(r), q.data());
      const auto want = full_sort_topk(q.data(), bank, k, want_scores);
      for (std::size_t i = 0; i < k; ++i) {
        ok = ok && got.indices[r * k + i] == want[i] && std::abs(got.scores[r * k + i] - want_scores[i]) <= 1e-9;
      }
    }
    if (!ok) ++failures;
  }
  std::cout << "memtest: " << cases - failures << "/" << cases << " retrieval cases match the full-sort oracle\n";
  return failures == 0 ? kExitOk : kExitData;
}

int cmd_bench(const std::string& manifest_path, const std::string& db_path, const std::string& scorer_path,
              const std::optional<std::string>& config_path, const std::map<std::string, std::string>& flags,
              const std::string& out_dir) {
  const auto config = estr::pipeline::load_config(config_path, flags);
  const auto manifest = estr::pipeline::load_manifest(manifest_path);
  const auto db = estr::GlyphDatabase::load_file(db_path, config.max_candidates);
  const auto scorer = estr::BigramScorer::train_file(scorer_path);
  const auto started = std::chrono::steady_clock::now();
  const auto report = estr::pipeline::bench(manifest, config, db, scorer);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const std::string json = estr::pipeline::bench_report_json(report);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    for (const auto& arm : report.arms) {
      estr::pipeline::write_text_records((fs::path(out_dir) / (arm.name + ".jsonl")).string(), arm.predictions);
    }
    std::vector<estr::pipeline::TextRecord> labels;
    for (const auto& r : manifest.records) labels.push_back({r.id, r.label});
    estr::pipeline::write_text_records((fs::path(out_dir) / "labels.jsonl").string(), labels);
    estr::pipeline::write_text_file((fs::path(out_dir) / "report.json").string(), json);
  }
  std::cout << json;
  std::cerr << "bench: " << manifest.records.size() << " records in " << secs << " s\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"estr: event-stream scene text recognition toolkit"};
  app.require_subcommand(1);

  std::uint16_t width = 0, height = 0;
  std::string path_a, path_b;

  auto* stats = app.add_subcommand("stats", "Summarize an event file (csv or evs1)");
  stats->add_option("file", path_a, "Event file")->required();
  stats->add_option("--width", width, "Sensor width (csv only)");
  stats->add_option("--height", height, "Sensor height (csv only)");

  std::vector<std::string> sim_files;
  double threshold = 0.2, eps = 1e-3;
  std::uint64_t period_us = estr::kFramePeriodUs;
  auto* simulate = app.add_subcommand("simulate", "Synthesize events from P5/P6 frames");
  simulate->add_option("--threshold", threshold, "Contrast threshold C")->capture_default_str();
  simulate->add_option("--eps", eps, "Log epsilon")->capture_default_str();
  simulate->add_option("--period-us", period_us, "Microseconds between frames")->capture_default_str();
  simulate->add_option("files", sim_files, "Input frames followed by the output event file")->required();

  std::uint32_t t_count = estr::kDefaultFrameCount;
  auto* stack = app.add_subcommand("stack", "Stack events into polarity frames (P6 output)");
  stack->add_option("--t", t_count, "Number of frames")->capture_default_str();
  stack->add_option("--width", width, "Sensor width (csv only)");
  stack->add_option("--height", height, "Sensor height (csv only)");
  stack->add_option("in", path_a, "Event file")->required();
  stack->add_option("outdir", path_b, "Output directory")->required();

  std::uint64_t seed = 0;
  std::string out_dir;
  auto* split = app.add_subcommand("split", "Split ids 7:1:2 into train/val/test");
  split->add_option("ids", path_a, "Id list (one per line) or JSONL with an \"id\" field")->required();
  split->add_option("--seed", seed, "Shuffle seed")->capture_default_str();
  split->add_option("--out-dir", out_dir, "Write train.txt/val.txt/test.txt here");

  CorrectOptions co;
  auto* correct = app.add_subcommand("correct", "Correct confusable glyphs in predictions");
  correct->add_option("--db", co.db_path, "Glyph database TSV")->required();
  correct->add_option("--scorer", co.scorer_path, "Training corpus for the bigram scorer");
  correct->add_option("--template", co.prompt_template, "Prompt template 1-3")->capture_default_str();
  correct->add_option("--margin", co.margin, "Required score improvement")->capture_default_str();
  correct->add_option("--max-candidates", co.max_candidates, "Candidate cap per glyph")->capture_default_str();
  correct->add_option("--backend", co.backend, "local | echo | identity | http")->capture_default_str();
  correct->add_option("--endpoint", co.endpoint, "URL for the http backend");
  correct->add_option("--timeout-ms", co.timeout_ms, "HTTP timeout")->capture_default_str();
  correct->add_option("--concurrency", co.concurrency, "Concurrent HTTP requests")->capture_default_str();
  correct->add_option("-o,--output", co.output, "Output JSONL (default stdout)");
  correct->add_option("pred", co.input, "Predictions JSONL")->required();

  std::string metric = "bleu", pred, gt, field = "text";
  auto* score = app.add_subcommand("score", "Score predictions against ground truth");
  score->add_option("--metric", metric, "bleu | acc")->check(CLI::IsMember({"bleu", "acc"}))->capture_default_str();
  score->add_option("--pred", pred, "Predictions JSONL")->required();
  score->add_option("--gt", gt, "Ground truth JSONL")->required();
  score->add_option("--field", field, "Prediction field to score (text | corrected)")->capture_default_str();

  std::size_t cases = 200;
  auto* memtest = app.add_subcommand("memtest", "Check memory retrieval against a brute-force oracle");
  memtest->add_option("--cases", cases, "Random instances")->capture_default_str();
  memtest->add_option("--seed", seed, "Seed")->capture_default_str();

  std::string manifest, db_path, scorer_path, config_path;
  std::size_t synthesize = 0;
  std::string fixture_dir;
  std::map<std::string, std::string> bench_flags;
  auto* bench = app.add_subcommand("bench", "Run the four-arm ablation (baseline, +GECM, +MM, both)");
  bench->add_option("--manifest", manifest, "Dataset manifest JSONL");
  bench->add_option("--db", db_path, "Glyph database TSV");
  bench->add_option("--scorer", scorer_path, "Scorer training corpus");
  bench->add_option("--config", config_path, "key = value config file");
  bench->add_option("--out", out_dir, "Write per-arm predictions and report.json here");
  bench->add_option("--synthesize", synthesize, "Generate a fixture dataset with this many records first");
  bench->add_option("--fixture-dir", fixture_dir, "Where --synthesize writes the fixture");
  const std::pair<const char*, const char*> config_flags[] = {
      {"--t", "t_count"},           {"--k", "k"},       {"--template", "template"},
      {"--max-candidates", "max_candidates"}, {"--margin", "margin"}, {"--seed", "seed"},
      {"--noise-rate", "noise_rate"}, {"--memory-patterns", "memory_patterns"}};
  for (const auto& [flag, key] : config_flags) {
    const std::string k = key;
    bench->add_option_function<std::string>(flag, [&bench_flags, k](const std::string& v) { bench_flags[k] = v; },
                                            "Overrides config key " + k);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*stats) return cmd_stats(path_a, width, height);
    if (*simulate) return cmd_simulate(sim_files, threshold, eps, period_us);
    if (*stack) return cmd_stack(path_a, path_b, t_count, width, height);
    if (*split) return cmd_split(path_a, seed, out_dir);
    if (*correct) return cmd_correct(co);
    if (*score) return cmd_score(metric, pred, gt, field);
    if (*memtest) return cmd_memtest(cases, seed);
    if (*bench) {
      if (synthesize > 0) {
        if (fixture_dir.empty()) throw CLI::ValidationError("--fixture-dir", "required with --synthesize");
        const auto fx = estr::pipeline::write_fixture_dataset(fixture_dir, synthesize, 7);
        if (manifest.empty()) manifest = fx.manifest_path;
        if (db_path.empty()) db_path = fx.glyph_path;
        if (scorer_path.empty()) scorer_path = fx.corpus_path;
      }
      if (manifest.empty() || db_path.empty() || scorer_path.empty()) {
        throw CLI::ValidationError("bench", "--manifest, --db and --scorer are required (or use --synthesize)");
      }
      return cmd_bench(manifest, db_path, scorer_path,
                       config_path.empty() ? std::nullopt : std::optional<std::string>(config_path), bench_flags,
                       out_dir);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "estr: " << e.what() << "\n";
    return kExitUsage;
  } catch (const estr::TransportError& e) {
    std::cerr << "estr: transport error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const std::exception& e) {
    std::cerr << "estr: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
