#include <doctest.h>

#include <httplib.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <thread>

#include "estr/context_scorer.hpp"
#include "estr/corrector.hpp"
#include "estr/error.hpp"
#include "estr/event_core.hpp"
#include "estr/frame_stacker.hpp"
#include "estr/memory_kernel.hpp"
#include "estr/pipeline/backend.hpp"
#include "estr/pipeline/bench.hpp"
#include "estr/pipeline/config.hpp"
#include "estr/pipeline/records.hpp"
#include "estr/pipeline/stub_recognizer.hpp"
#include "estr/pipeline/synthetic.hpp"
#include "estr/prompt.hpp"

using namespace estr;
using namespace estr::pipeline;
namespace fs = std::filesystem;

namespace {

EnvLookup env_of(std::map<std::string, std::string> vars) {
  return [vars](const std::string& name) -> std::optional<std::string> {
    const auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

const EnvLookup kNoEnv = env_of({});

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("estr_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Local server whose handler is supplied by the test.
class MockServer {
 public:
  explicit MockServer(httplib::Server::Handler handler) {
    server_.Post("/v1/complete", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/complete"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("shipped defaults") {
  const BenchConfig cfg = load_config(std::nullopt, {}, kNoEnv);
  CHECK(cfg.t_count == 19);         // frames stacked per recording in the dataset statistics
  CHECK(cfg.k == 64);               // best row of the Top-K sweep
  CHECK(cfg.prompt_template == 3);  // best of the three prompt phrasings
  CHECK(cfg.max_candidates == 10);  // best database size in the candidate-count ablation
  CHECK(cfg.margin == 0.0);
  CHECK(cfg == BenchConfig{});
}

TEST_CASE("config precedence is flag, env, file, default") {
  const auto dir = scratch_dir("config");
  const auto path = (dir / "bench.conf").string();
  std::ofstream(path) << "# sweep\nk = 32\nt_count=7  # inline\nmargin = 0.5\n";

  auto cfg = load_config(path, {}, kNoEnv);
  CHECK(cfg.k == 32);
  CHECK(cfg.t_count == 7);
  CHECK(cfg.margin == 0.5);

  cfg = load_config(path, {}, env_of({{"ESTR_K", "16"}, {"ESTR_SEED", "9"}}));
  CHECK(cfg.k == 16);
  CHECK(cfg.seed == 9);

  cfg = load_config(path, {{"k", "3"}}, env_of({{"ESTR_K", "16"}}));
  CHECK(cfg.k == 3);
  CHECK(cfg.t_count == 7);

  CHECK_THROWS_AS(load_config(std::nullopt, {{"bogus", "1"}}, kNoEnv), Error);
  CHECK_THROWS_AS(load_config(std::nullopt, {{"k", "x"}}, kNoEnv), Error);
  CHECK_THROWS_AS(load_config(std::nullopt, {{"template", "4"}}, kNoEnv), Error);
  CHECK_THROWS_AS(load_config(std::nullopt, {{"k", "300"}}, kNoEnv), Error);
  CHECK_THROWS_AS(load_config(std::nullopt, {}, env_of({{"ESTR_NOISE_RATE", "1.5"}})), Error);
  std::ofstream(path) << "unknown = 1\n";
  CHECK_THROWS_AS(load_config(path, {}, kNoEnv), Error);
  CHECK_THROWS_AS(load_config((dir / "missing.conf").string(), {}, kNoEnv), Error);
  fs::remove_all(dir);
}

TEST_CASE("text records") {
  const std::vector<TextRecord> recs = {{"a", "三只松鼠"}, {"b", "x\"y"}};
  const std::string jsonl = format_text_records(recs);
  CHECK(jsonl.substr(0, jsonl.find('\n')) == R"({"id":"a","text":"三只松鼠"})");
  CHECK(parse_text_records(jsonl) == recs);
  CHECK(parse_text_records("\n" + jsonl + "\n\n") == recs);
  CHECK_THROWS_AS(parse_text_records("{\"id\":\"a\"}\n"), Error);
  CHECK_THROWS_AS(parse_text_records("not json\n"), Error);
  CHECK_THROWS_AS(parse_text_records(jsonl + jsonl), Error);

  const auto joined = join_by_id({{"b", "B"}, {"a", "A"}}, {{"a", "ra"}, {"b", "rb"}});
  CHECK(joined == std::vector<std::pair<std::string, std::string>>{{"A", "ra"}, {"B", "rb"}});
  CHECK_THROWS_AS(join_by_id({{"a", "A"}}, {{"a", "ra"}, {"b", "rb"}}), Error);
  CHECK_THROWS_AS(join_by_id({{"a", "A"}, {"c", "C"}}, {{"a", "ra"}}), Error);
}

TEST_CASE("manifest paths resolve against its directory") {
  const auto dir = scratch_dir("manifest");
  fs::create_directories(dir / "ev");
  write_events_file((dir / "ev" / "r.evs1").string(), EventStream{4, 4, {{1, 1, 5, 1}}, ""});
  std::ofstream(dir / "m.jsonl") << R"({"id":"r","events":"ev/r.evs1","label":"cap"})" << "\n";
  const auto m = load_manifest((dir / "m.jsonl").string());
  REQUIRE(m.records.size() == 1);
  CHECK(fs::path(m.records[0].events) == dir / "ev" / "r.evs1");
  CHECK(m.records[0].label == "cap");
  std::ofstream(dir / "bad.jsonl") << R"({"id":"r","events":"ev/none.evs1","label":"cap"})" << "\n";
  CHECK_THROWS_AS(load_manifest((dir / "bad.jsonl").string()), Error);
  fs::remove_all(dir);
}

TEST_CASE("stub recognizer noise") {
  const auto corpus = make_confusable_corpus(2000, 1);
  const auto db = GlyphDatabase::load(corpus.glyph_tsv);
  std::size_t eligible = 0, swapped = 0;
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    const auto& s = corpus.sentences[i];
    const std::string id = std::to_string(i);
    CHECK(inject_noise(s, db, 0.0, 7, id).text == s);
    const auto all = inject_noise(s, db, 1.0, 7, id);
    CHECK(all.substituted.size() == all.eligible);
    const auto n = inject_noise(s, db, 0.2, 7, id);
    CHECK(n.text == inject_noise(s, db, 0.2, 7, id).text);
    eligible += n.eligible;
    swapped += n.substituted.size();
  }
  REQUIRE(eligible >= 5000);
  const double mean = 0.2 * double(eligible);
  const double sd = std::sqrt(double(eligible) * 0.2 * 0.8);
  CHECK(std::abs(double(swapped) - mean) <= 3 * sd);
  CHECK_THROWS_AS(inject_noise("x", db, 1.5, 0, "a"), Error);
}

TEST_CASE("backend selection") {
  CHECK(backend_kind_from_name("http") == BackendKind::external_http);
  CHECK(backend_kind_from_name("echo") == BackendKind::echo);
  CHECK_THROWS_AS(backend_kind_from_name("gpt"), Error);
  CHECK_THROWS_AS(validate(BackendSpec{BackendKind::external_http, 0, 0, "", 100}), Error);
  CHECK_THROWS_AS(validate(BackendSpec{BackendKind::echo, 0, 0, "http://x", 100}), Error);
  CHECK_THROWS_AS(HttpBackend("https://example.org/x", 100), Error);
  CHECK(HttpBackend::request_body("a\"b") == R"({"prompt":"a\"b"})");
  CHECK(make_backend({BackendKind::identity, 0, 0, "", 100})->complete({"t", "p"}) == "t");
}

TEST_CASE("http backend round trip") {
  std::string captured;
  MockServer server([&](const httplib::Request& req, httplib::Response& res) {
    captured = req.body;
    const auto body = nlohmann::json::parse(req.body);
    res.set_content(nlohmann::json{{"text", body["prompt"]}}.dump(), "application/json");
  });
  const auto backend = make_backend({BackendKind::external_http, 0, 0, server.endpoint(), 2000});
  const auto db = GlyphDatabase::load(reference_glyph_tsv());
  const auto r = correct_via_llm("三只枫鼠 Three Squirrels", db, PromptTemplate::conversational, *backend);
  CHECK(r.corrected == *r.prompt_used);
  CHECK(captured == HttpBackend::request_body(*r.prompt_used));
}

TEST_CASE("http failures surface as transport errors") {
  SUBCASE("server error") {
    MockServer server([](const httplib::Request&, httplib::Response& res) {
      res.status = 500;
      res.set_content("boom", "text/plain");
    });
    HttpBackend backend(server.endpoint(), 2000);
    try {
      correct_via_llm("三只枫鼠", GlyphDatabase::load(reference_glyph_tsv()), PromptTemplate::conversational, backend);
      FAIL("expected a failure");
    } catch (const BackendFailure& e) {
      CHECK(e.status() == 500);
      CHECK(e.endpoint() == server.endpoint());
      CHECK(e.report().corrected == "三只枫鼠");
    }
  }
  SUBCASE("malformed reply") {
    MockServer server([](const httplib::Request&, httplib::Response& res) { res.set_content("{\"txt\":1}", "application/json"); });
    CHECK_THROWS_AS(HttpBackend(server.endpoint(), 2000).complete({"t", "p"}), TransportError);
  }
  SUBCASE("connection refused") {
    std::string endpoint;
    {
      MockServer server([](const httplib::Request&, httplib::Response&) {});
      endpoint = server.endpoint();
    }
    try {
      HttpBackend(endpoint, 500).complete({"t", "p"});
      FAIL("expected a failure");
    } catch (const TransportError& e) {
      CHECK(e.status() == 0);
    }
  }
}

TEST_CASE("feature proxy") {
  Image img(8, 8);
  img.set(0, 0, kPositiveColor);
  img.set(7, 7, kNegativeColor);
  const auto f = frame_feature_proxy(img);
  CHECK(f.batch == 1);
  CHECK(f.length == kProxyLength);
  CHECK(f.dim == kProxyDim);
  double total = 0;
  for (double x : f.data) total += x;
  CHECK(total > 0);
  CHECK(f.row(0)[0] > 0);
  CHECK(frame_feature_proxy(Image(8, 8)).data == std::vector<double>(kProxyLength * kProxyDim, 0.0));
}

TEST_CASE("bench over a generated fixture") {
  const auto dir = scratch_dir("bench");
  const auto fx = write_fixture_dataset(dir.string(), 40, 3);
  const auto manifest = load_manifest(fx.manifest_path);
  CHECK(manifest.records.size() == 40);
  const auto db = GlyphDatabase::load_file(fx.glyph_path);
  const auto scorer = BigramScorer::train_file(fx.corpus_path);

  BenchConfig clean;
  clean.noise_rate = 0.0;
  clean.t_count = 4;
  clean.k = 8;
  clean.memory_patterns = 16;
  const auto r0 = bench(manifest, clean, db, scorer);
  REQUIRE(r0.arms.size() == 4);
  CHECK(r0.arms[0].name == "baseline");
  CHECK(r0.arms[3].name == "gecm_mm");
  for (const auto& arm : r0.arms) CHECK(arm.bleu.bleu[0] == 1.0);
  CHECK(r0.replacements == 0);
  CHECK(r0.memory.shape_preserved);
  CHECK(r0.memory.records == 40);

  BenchConfig noisy = clean;
  noisy.noise_rate = 0.3;
  const auto r1 = bench(manifest, noisy, db, scorer);
  CHECK(r1.arms[1].bleu.bleu[0] > r1.arms[0].bleu.bleu[0]);
  CHECK(r1.arms[1].delta[0] == r1.arms[1].bleu.bleu[0] - r1.arms[0].bleu.bleu[0]);
  CHECK(r1.arms[2].predictions == r1.arms[0].predictions);
  CHECK(r1.arms[3].predictions == r1.arms[1].predictions);
  CHECK(bench_report_json(r1) == bench_report_json(bench(manifest, noisy, db, scorer)));
  fs::remove_all(dir);
}
