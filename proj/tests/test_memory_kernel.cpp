#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "estr/error.hpp"
#include "estr/memory_kernel.hpp"
#include "oracles.hpp"

using namespace estr;
using namespace estr::memory;

namespace {

// Bank over D = 128 whose down projection is the identity and up is zero.
MemoryBank identity_bank(std::vector<double> patterns) {
  MemoryBank b;
  b.patterns = std::move(patterns);
  b.down = {kPatternDim, kPatternDim, std::vector<double>(kPatternDim * kPatternDim, 0.0),
            std::vector<double>(kPatternDim, 0.0)};
  for (std::size_t i = 0; i < kPatternDim; ++i) b.down.weight[i * kPatternDim + i] = 1.0;
  b.up = {kPatternDim, kPatternDim, std::vector<double>(kPatternDim * kPatternDim, 0.0),
          std::vector<double>(kPatternDim, 0.0)};
  return b;
}

std::vector<double> unit(std::size_t axis, double scale = 1.0) {
  std::vector<double> v(kPatternDim, 0.0);
  v[axis] = scale;
  return v;
}

FeatureBatch random_batch(std::mt19937_64& rng, std::size_t b, std::size_t l, std::size_t d) {
  FeatureBatch f(b, l, d);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double& x : f.data) x = n(rng);
  return f;
}

}  // namespace

TEST_CASE("init is deterministic with the documented shapes") {
  const auto a = init_bank(32, kDefaultPatternCount, 7), b = init_bank(32, kDefaultPatternCount, 7);
  CHECK(a.patterns == b.patterns);
  CHECK(a.down.weight == b.down.weight);
  CHECK(a.up.weight == b.up.weight);
  CHECK(a.pattern_count() == 256);
  CHECK(a.patterns.size() == 256 * 128);
  CHECK(a.feature_dim() == 32);
  CHECK(init_bank(32, 256, 8).patterns != a.patterns);
  CHECK_THROWS_AS(init_bank(0, 4, 1), Error);
}

TEST_CASE("pattern entries are centered with variance 1/128") {
  const auto bank = init_bank(4, 10000, 3);
  double sum = 0, sq = 0;
  for (double x : bank.patterns) sum += x, sq += x * x;
  const double n = double(bank.patterns.size());
  const double var = 1.0 / 128.0;
  CHECK(std::abs(sum / n) < 3.0 * std::sqrt(var / n));
  CHECK(sq / n == doctest::Approx(var).epsilon(0.01));
}

TEST_CASE("cosine edge cases") {
  const auto a = unit(0), b = unit(1), z = std::vector<double>(kPatternDim, 0.0);
  CHECK(cosine(a.data(), a.data(), kPatternDim) == 1.0);
  CHECK(cosine(a.data(), b.data(), kPatternDim) == 0.0);
  CHECK(cosine(a.data(), z.data(), kPatternDim) == 0.0);
  const auto neg = unit(0, -3.0);
  CHECK(cosine(a.data(), neg.data(), kPatternDim) == -1.0);
}

TEST_CASE("hand-built retrieval and enhancement") {
  // patterns e0, e1, (e0+e1)/sqrt2 ; query e0
  std::vector<double> p;
  for (auto v : {unit(0), unit(1)}) p.insert(p.end(), v.begin(), v.end());
  auto mix = unit(0, 1.0);
  mix[1] = 1.0;
  p.insert(p.end(), mix.begin(), mix.end());
  auto bank = identity_bank(p);
  for (std::size_t i = 0; i < kPatternDim; ++i) bank.up.weight[i * kPatternDim + i] = 1.0;

  FeatureBatch f(1, 1, kPatternDim);
  f.data[0] = 2.0;
  const auto r = retrieve(f, bank, 2);
  REQUIRE(r.indices == std::vector<std::size_t>{0, 2});
  CHECK(r.scores[0] == 1.0);
  CHECK(r.scores[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
  const double w0 = 1.0 / (1.0 + std::exp(1.0 / std::sqrt(2.0) - 1.0));
  CHECK(r.weights[0] == doctest::Approx(w0));
  CHECK(r.weights[1] == doctest::Approx(1.0 - w0));

  const auto out = enhance(f, bank, 2);
  // e0 gets w0 + w1, e1 gets w1
  CHECK(out.data[0] == doctest::Approx(2.0 + 1.0));
  CHECK(out.data[1] == doctest::Approx(1.0 - w0));
  for (std::size_t i = 2; i < kPatternDim; ++i) CHECK(out.data[i] == 0.0);

  // K = 1 puts all weight on the best pattern
  const auto one = retrieve(f, bank, 1);
  CHECK(one.weights[0] == 1.0);
}

TEST_CASE("retrieval matches a full-sort oracle") {
  std::mt19937_64 rng(11);
  for (int c = 0; c < 40; ++c) {
    const std::size_t d = 1 + rng() % 48;
    const std::size_t m = 1 + rng() % 300;
    const auto bank = init_bank(d, m, rng());
    const std::size_t k = 1 + rng() % m;
    const auto f = random_batch(rng, 1 + rng() % 3, 1 + rng() % 5, d);
    const auto res = retrieve(f, bank, k);
    REQUIRE(res.rows == f.rows());
    for (std::size_t r = 0; r < f.rows(); ++r) {
      std::vector<double> q(kPatternDim);
      bank.down.apply(f.row(r), q.data());
      const auto want = oracle::topk_full_sort(q.data(), bank.patterns, kPatternDim, k);
      double wsum = 0;
      for (std::size_t i = 0; i < k; ++i) {
        CHECK(res.indices[r * k + i] == want.indices[i]);
        CHECK(std::abs(res.scores[r * k + i] - want.scores[i]) <= 1e-12);
        if (i) CHECK(res.scores[r * k + i] <= res.scores[r * k + i - 1]);
        wsum += res.weights[r * k + i];
      }
      CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("K bounds") {
  const auto bank = init_bank(8, 10, 1);
  FeatureBatch f(1, 1, 8, 1.0);
  CHECK_THROWS_AS(retrieve(f, bank, 0), Error);
  CHECK_THROWS_AS(retrieve(f, bank, 11), Error);
  CHECK(retrieve(f, bank, 10).indices.size() == 10);
  FeatureBatch wrong(1, 1, 9, 1.0);
  CHECK_THROWS_AS(retrieve(wrong, bank, 2), Error);
}

TEST_CASE("identical patterns split weight evenly") {
  std::vector<double> p;
  for (int i = 0; i < 5; ++i) {
    auto v = unit(3, 0.5);
    p.insert(p.end(), v.begin(), v.end());
  }
  auto other = unit(4);
  p.insert(p.end(), other.begin(), other.end());
  const auto bank = identity_bank(p);
  FeatureBatch f(1, 1, kPatternDim);
  f.data[3] = 1.0;
  const auto r = retrieve(f, bank, 5);
  CHECK(r.indices == std::vector<std::size_t>{0, 1, 2, 3, 4});
  for (double w : r.weights) CHECK(std::abs(w - 0.2) <= 1e-12);
}

TEST_CASE("retrieval is invariant to positive query scale") {
  std::mt19937_64 rng(5);
  std::vector<double> p(50 * kPatternDim);
  std::normal_distribution<double> n;
  for (double& x : p) x = n(rng);
  const auto bank = identity_bank(p);
  auto f = random_batch(rng, 2, 3, kPatternDim);
  auto scaled = f;
  for (double& x : scaled.data) x *= 37.5;
  const auto a = retrieve(f, bank, 8), b = retrieve(scaled, bank, 8);
  CHECK(a.indices == b.indices);
  for (std::size_t i = 0; i < a.scores.size(); ++i) CHECK(a.scores[i] == doctest::Approx(b.scores[i]));
}

TEST_CASE("zero query scores 0 everywhere and picks the lowest indices") {
  const auto bank = init_bank(16, 20, 2);
  MemoryBank zb = bank;
  std::fill(zb.down.bias.begin(), zb.down.bias.end(), 0.0);
  FeatureBatch f(1, 1, 16, 0.0);
  const auto r = retrieve(f, zb, 4);
  CHECK(r.indices == std::vector<std::size_t>{0, 1, 2, 3});
  for (double s : r.scores) CHECK(s == 0.0);
  for (double w : r.weights) CHECK(w == 0.25);
}

TEST_CASE("enhancement is residual") {
  std::mt19937_64 rng(9);
  auto bank = init_bank(24, 64, 4);
  const auto f = random_batch(rng, 2, 4, 24);
  std::fill(bank.up.weight.begin(), bank.up.weight.end(), 0.0);
  CHECK(enhance(f, bank, 16).data == f.data);

  std::fill(bank.up.bias.begin(), bank.up.bias.end(), 0.5);
  const auto out = enhance(f, bank, 16);
  for (std::size_t i = 0; i < f.data.size(); ++i) CHECK(out.data[i] == f.data[i] + 0.5);
}

TEST_CASE("enhancement is linear in the up projection weights") {
  // Central differences on one up weight match the retrieved mixture entry.
  std::mt19937_64 rng(21);
  auto bank = init_bank(12, 40, 6);
  const auto f = random_batch(rng, 1, 1, 12);
  const auto sel = retrieve(f, bank, 8);
  double mixed3 = 0;
  for (std::size_t i = 0; i < 8; ++i) mixed3 += sel.weights[i] * bank.pattern(sel.indices[i])[3];
  const double h = 1e-4;
  auto plus = bank, minus = bank;
  plus.up.weight[5 * kPatternDim + 3] += h;
  minus.up.weight[5 * kPatternDim + 3] -= h;
  const double grad = (enhance(f, plus, 8).data[5] - enhance(f, minus, 8).data[5]) / (2 * h);
  CHECK(grad == doctest::Approx(mixed3).epsilon(1e-6));
}

TEST_CASE("parallel path equals serial") {
  std::mt19937_64 rng(13);
  const auto bank = init_bank(32, 256, 1);
  const auto f = random_batch(rng, 3, 40, 32);
  const auto a = retrieve(f, bank, 64), b = retrieve(f, bank, 64, Execution::parallel);
  CHECK(a.indices == b.indices);
  CHECK(a.scores == b.scores);
  CHECK(a.weights == b.weights);
  CHECK(enhance(f, bank, 64).data == enhance(f, bank, 64, Execution::parallel).data);
}

TEST_CASE("bank serialization roundtrip") {
  const auto bank = init_bank(10, 7, 99);
  const auto bytes = serialize_bank(bank);
  CHECK(bytes.size() == 8 + 8 * (7 * 128 + 2 * 128 * 10 + 128 + 10));
  const auto back = deserialize_bank(bytes);
  CHECK(back.patterns == bank.patterns);
  CHECK(back.down.weight == bank.down.weight);
  CHECK(back.up.bias == bank.up.bias);
  CHECK(serialize_bank(back) == bytes);

  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(deserialize_bank(bad), Error);
  bad = bytes;
  bad.pop_back();
  CHECK_THROWS_AS(deserialize_bank(bad), Error);

  const auto path = std::filesystem::temp_directory_path() / "estr_bank_test.mbk";
  save_bank(path.string(), bank);
  CHECK(load_bank(path.string()).patterns == bank.patterns);
  std::filesystem::remove(path);
}

TEST_CASE("non-finite parameters are rejected") {
  auto bank = init_bank(4, 3, 1);
  bank.up.weight[2] = std::nan("");
  CHECK_THROWS_AS(validate(bank), Error);
  FeatureBatch f(1, 1, 4, 1.0);
  f.data[1] = INFINITY;
  CHECK_THROWS_AS(validate(f), Error);
}
