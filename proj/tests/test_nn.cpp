#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "modref/nn/adam.hpp"
#include "modref/nn/checkpoint.hpp"
#include "modref/nn/init.hpp"
#include "modref/nn/losses.hpp"
#include "modref/nn/ops.hpp"

using namespace modref;
using namespace modref::nn;

namespace {

Var<float> randf(std::vector<int> shape, uint64_t seed, bool grad = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  std::vector<float> v(numel(shape));
  for (float& x : v) x = dist(rng);
  Var<float> t = make_constant<float>(std::move(shape), std::move(v));
  t->requires_grad = grad;
  return t;
}

}  // namespace

TEST_CASE("conv2d: 1x1 identity kernel reproduces the input") {
  Var<float> x = randf({1, 1, 4, 4}, 3);
  Var<float> w = make_constant<float>({1, 1, 1, 1}, {1.0f});
  Var<float> b = make_constant<float>({1}, {0.0f});
  Var<float> y = conv2d(x, w, b, 1, 0);
  CHECK(y->shape == x->shape);
  for (size_t i = 0; i < x->size(); ++i) CHECK(y->value[i] == doctest::Approx(x->value[i]));
}

TEST_CASE("conv2d: 3x3 averaging kernel preserves constant images in the interior") {
  Var<float> x = make_constant<float>({1, 1, 5, 5}, std::vector<float>(25, 7.0f));
  Var<float> w = make_constant<float>({1, 1, 3, 3}, std::vector<float>(9, 1.0f / 9.0f));
  Var<float> b = make_constant<float>({1}, {0.0f});
  Var<float> y = conv2d(x, w, b, 1, 0);  // valid mode: interior only
  CHECK(y->shape == std::vector<int>{1, 1, 3, 3});
  for (float v : y->value) CHECK(v == doctest::Approx(7.0f).epsilon(1e-6));
}

TEST_CASE("conv2d: non-integral output size is a config error") {
  Var<float> x = randf({1, 1, 6, 6}, 4);  // (6 - 3) is not divisible by stride 2
  Var<float> w = randf({1, 1, 3, 3}, 5);
  Var<float> b = make_constant<float>({1}, {0.0f});
  CHECK_THROWS_AS(conv2d(x, w, b, 2, 0), ConfigError);
}

TEST_CASE("conv2d: channel mismatch is a shape error") {
  Var<float> x = randf({1, 2, 5, 5}, 6);
  Var<float> w = randf({1, 3, 3, 3}, 7);
  Var<float> b = make_constant<float>({1}, {0.0f});
  CHECK_THROWS_AS(conv2d(x, w, b, 1, 1), ShapeError);
}

TEST_CASE("relu: definition") {
  Var<float> x = make_constant<float>({1, 1, 1, 3}, {-1.0f, 0.0f, 2.0f});
  Var<float> y = relu(x);
  CHECK(y->value == std::vector<float>{0.0f, 0.0f, 2.0f});
}

TEST_CASE("downsample_avg: 2x2 block mean") {
  Var<float> x = make_constant<float>({1, 1, 2, 2}, {1.0f, 3.0f, 5.0f, 7.0f});
  Var<float> y = downsample_avg(x, 2);
  CHECK(y->value.size() == 1);
  CHECK(y->value[0] == doctest::Approx(4.0f));
}

TEST_CASE("upsample of downsample fixes constant images") {
  Var<float> x = make_constant<float>({1, 2, 8, 8}, std::vector<float>(128, 3.25f));
  Var<float> y = upsample_bilinear(downsample_avg(x, 2), 2);
  CHECK(y->shape == x->shape);
  for (float v : y->value) CHECK(v == doctest::Approx(3.25f).epsilon(1e-6));
}

TEST_CASE("concat: mismatched spatial dims rejected; backward splits exactly") {
  Var<float> a = randf({1, 2, 4, 4}, 8, true);
  Var<float> b = randf({1, 3, 4, 4}, 9, true);
  Var<float> bad = randf({1, 1, 3, 4}, 10);
  std::array<Var<float>, 3> bad_xs = {a, b, bad};
  CHECK_THROWS_AS(concat_channels<float>(bad_xs), ShapeError);

  std::array<Var<float>, 2> xs = {a, b};
  Var<float> cat = concat_channels<float>(xs);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  std::vector<float> w(cat->size());
  for (float& x : w) x = dist(rng);
  Var<float> loss = reduce_weighted<float>(cat, w);
  backward(loss);

  // re-concatenation of the split gradients equals the upstream gradient
  const size_t plane = 16;
  for (size_t c = 0; c < 2; ++c)
    for (size_t p = 0; p < plane; ++p) CHECK(a->grad[c * plane + p] == w[c * plane + p]);
  for (size_t c = 0; c < 3; ++c)
    for (size_t p = 0; p < plane; ++p) CHECK(b->grad[c * plane + p] == w[(2 + c) * plane + p]);
}

TEST_CASE("softmax CE: uniform logits give ln C; saturated logit gives ~0") {
  const int c = 4;
  Var<float> logits = make_constant<float>({1, c, 1, 1}, std::vector<float>(c, 0.0f));
  LabelBatch target{1, 1, 1, {2}};
  Var<float> loss = softmax_cross_entropy(logits, target);
  CHECK(loss->value[0] == doctest::Approx(std::log(4.0)).epsilon(1e-6));

  Var<float> hot = make_constant<float>({1, c, 1, 1}, std::vector<float>(c, 0.0f));
  hot->value[2] = 100.0f;
  Var<float> loss2 = softmax_cross_entropy(hot, target);
  CHECK(loss2->value[0] < 1e-6f);
}

TEST_CASE("softmax CE: all pixels masked is an error") {
  Var<float> logits = make_constant<float>({1, 2, 1, 2}, {0.0f, 0.0f, 0.0f, 0.0f});
  LabelBatch target{1, 1, 2, {0, 1}};
  MaskBatch mask{1, 1, 2, {0, 0}};
  CHECK_THROWS_AS(softmax_cross_entropy(logits, target, &mask), EvaluationError);
}

TEST_CASE("epe loss: zero residual and the 3-4-5 case") {
  Var<float> gt = make_constant<float>({1, 2, 1, 1}, {0.0f, 0.0f});
  Var<float> same = make_constant<float>({1, 2, 1, 1}, {0.0f, 0.0f});
  MaskBatch mask{1, 1, 1, {1}};
  CHECK(epe_loss(same, gt, mask)->value[0] <= 1e-6f + 1e-9f);

  Var<float> pred = make_constant<float>({1, 2, 1, 1}, {3.0f, 4.0f});
  CHECK(epe_loss(pred, gt, mask)->value[0] == doctest::Approx(5.0f).epsilon(1e-6));

  MaskBatch empty{1, 1, 1, {0}};
  CHECK_THROWS_AS(epe_loss(pred, gt, empty), EvaluationError);
}

TEST_CASE("cosine loss: parallel gives 0, antiparallel gives 2") {
  Var<float> gt = make_constant<float>({1, 3, 1, 1}, {0.0f, 0.0f, -1.0f});
  Var<float> par = make_constant<float>({1, 3, 1, 1}, {0.0f, 0.0f, -1.0f});
  Var<float> anti = make_constant<float>({1, 3, 1, 1}, {0.0f, 0.0f, 1.0f});
  MaskBatch mask{1, 1, 1, {1}};
  CHECK(cosine_normal_loss(par, gt, mask)->value[0] == doctest::Approx(0.0f).epsilon(1e-6));
  CHECK(cosine_normal_loss(anti, gt, mask)->value[0] == doctest::Approx(2.0f).epsilon(1e-6));
}

TEST_CASE("losses are invariant to batch-internal sample permutation") {
  Var<float> pred = randf({2, 2, 4, 4}, 21, false);
  Var<float> gt = randf({2, 2, 4, 4}, 22, false);
  MaskBatch mask{2, 4, 4, std::vector<uint8_t>(32, 1)};
  const float l1 = epe_loss(pred, gt, mask)->value[0];

  // swap the two samples
  auto swap_batch = [](Var<float>& t) {
    const size_t half = t->size() / 2;
    for (size_t i = 0; i < half; ++i) std::swap(t->value[i], t->value[half + i]);
  };
  swap_batch(pred);
  swap_batch(gt);
  const float l2 = epe_loss(pred, gt, mask)->value[0];
  CHECK(l1 == doctest::Approx(l2).epsilon(1e-7));
}

TEST_CASE("adam: zero gradient is a fixed point") {
  Var<float> p = make_parameter<float>({2}, {1.0f, -2.0f}, "p");
  std::array<Parameter<float>, 1> params = {Parameter<float>{p, true}};
  Adam<float> opt(0.1f);
  p->zero_grad();
  opt.step(params);
  CHECK(p->value[0] == 1.0f);
  CHECK(p->value[1] == -2.0f);
}

TEST_CASE("adam: first step magnitude approximately lr for constant gradient") {
  Var<float> p = make_parameter<float>({2}, {0.5f, -0.5f}, "p");
  std::array<Parameter<float>, 1> params = {Parameter<float>{p, true}};
  Adam<float> opt(1e-3f);
  p->grad = {0.7f, -0.3f};
  opt.step(params);
  // bias correction makes mhat/sqrt(vhat) ~ sign(g) on step 1
  CHECK(std::abs(p->value[0] - (0.5f - 1e-3f)) < 1e-6f);
  CHECK(std::abs(p->value[1] - (-0.5f + 1e-3f)) < 1e-6f);
}

TEST_CASE("adam: non-finite gradient aborts with the parameter name") {
  Var<float> p = make_parameter<float>({1}, {0.0f}, "branch0.conv1.weight");
  std::array<Parameter<float>, 1> params = {Parameter<float>{p, true}};
  Adam<float> opt;
  p->grad = {std::nanf("")};
  try {
    opt.step(params);
    FAIL("expected TrainingError");
  } catch (const TrainingError& e) {
    CHECK(std::string(e.what()).find("branch0.conv1.weight") != std::string::npos);
  }
}

TEST_CASE("adam: identical seeds give bit-identical trajectories") {
  auto run = [](uint64_t seed) {
    std::mt19937_64 rng(seed);
    Var<float> p = make_parameter<float>({16}, he_normal<float>(16, 8, rng), "p");
    std::array<Parameter<float>, 1> params = {Parameter<float>{p, true}};
    Adam<float> opt(1e-2f);
    Var<float> target = make_constant<float>({16}, std::vector<float>(16, 0.5f));
    for (int step = 0; step < 25; ++step) {
      zero_gradients<float>(params);
      for (int i = 0; i < 16; ++i) p->grad[i] = p->value[i] - target->value[i];
      opt.step(params);
    }
    return p->value;
  };
  CHECK(run(77) == run(77));
}

TEST_CASE("backward: every reachable parameter receives a gradient buffer") {
  std::mt19937_64 rng(5);
  Var<float> x = randf({1, 2, 4, 4}, 31);
  Var<float> w = make_parameter<float>({3, 2, 3, 3}, he_normal<float>(54, 18, rng), "w");
  Var<float> b = make_parameter<float>({3}, std::vector<float>(3, 0.0f), "b");
  Var<float> y = relu(conv2d(x, w, b, 1, 1));
  std::vector<float> pw(y->size(), 1.0f);
  Var<float> loss = reduce_weighted<float>(y, pw);
  backward(loss);
  CHECK(w->grad.size() == w->value.size());
  CHECK(b->grad.size() == b->value.size());
  float mag = 0;
  for (float g : w->grad) mag += std::abs(g);
  CHECK(mag > 0.0f);
}

TEST_CASE("checkpoint: round-trip preserves names, shapes, bits") {
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() / "modref_nn_test.ckpt";
  std::vector<TensorRecord> tensors = {
      {"layer.weight", {2, 3}, {1.0f, -2.5f, 0.125f, 3.0f, -0.0f, 9.75f}},
      {"layer.bias", {2}, {0.5f, -0.5f}},
  };
  save_checkpoint(p, "{\"k\":1}", tensors);
  Checkpoint c = load_checkpoint(p);
  CHECK(c.config_json == "{\"k\":1}");
  REQUIRE(c.tensors.size() == 2);
  CHECK(c.tensors[0] == tensors[0]);
  CHECK(c.tensors[1] == tensors[1]);
}

TEST_CASE("checkpoint: version mismatch is a version error") {
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() / "modref_nn_ver.ckpt";
  save_checkpoint(p, "{}", {});
  // bump the stored format version
  std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(4);
  uint32_t v = 9;
  f.write(reinterpret_cast<const char*>(&v), 4);
  f.close();
  CHECK_THROWS_AS(load_checkpoint(p), VersionError);
}
