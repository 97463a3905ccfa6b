/* Copyright 2026 The seqisp Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include <doctest.h>

#include <cmath>

#include "seqisp/error.hpp"
#include "seqisp/objective.hpp"
#include "test_support.hpp"

using namespace seqisp;
using seqisp::testing::central_diff;
using seqisp::testing::random_image;
using seqisp::testing::rel_error;

TEST_SUITE("objective") {

TEST_CASE("mse task") {
  const MseTask task;
  const Image a = random_image(1, 5, 5);
  CHECK(task.loss(a, a) == 0.0);
  CHECK(task.loss(Image(3, 3, 0.4), Image(3, 3, 0.5)) == doctest::Approx(0.01));
  CHECK_THROWS_AS(task.loss(Image(2, 2), Image(3, 2)), InvalidArgument);
  CHECK_THROWS_AS(task.loss_grad(Image(2, 2), Image(3, 2)), InvalidArgument);

  Image out = random_image(2, 4, 4);
  const Image target = random_image(3, 4, 4);
  const Image g = task.loss_grad(out, target);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double fd = central_diff([&] { return task.loss(out, target); }, out[i], 1e-6);
    CHECK(rel_error(g[i], fd) <= 1e-6);
  }
  CHECK(make_task("synth_restore")->name() == "synth_restore");
  CHECK_THROWS_AS(make_task("detection"), InvalidArgument);
}

TEST_CASE("penalty hinges") {
  const PenaltyConfig cfg;
  CHECK(penalty(Image(2, 2, 0.5), cfg, 0) == 0.0);
  CHECK(penalty(Image(2, 2, 0.005), cfg, 0) == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(penalty(Image(2, 2, 0.95), cfg, 0) == doctest::Approx(0.05).epsilon(1e-12));
  PenaltyConfig len = cfg;
  len.length_penalty = 0.01;
  CHECK(penalty(Image(2, 2, 0.5), len, 3) == doctest::Approx(0.03));

  PenaltyConfig bad;
  bad.intensity_low = 0.95;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("reward") {
  const MseTask task;
  const PenaltyConfig cfg;
  const Image in = random_image(4, 6, 6, 0.3, 0.7);
  const Image target = random_image(5, 6, 6);
  CHECK(reward(in, in, target, task, cfg, 0) == 0.0);

  const Image out = random_image(6, 6, 6, 0.85, 1.0);
  const double r = reward(in, out, target, task, cfg, 2);
  CHECK(r + task.loss(out, target) + penalty(out, cfg, 2) ==
        doctest::Approx(task.loss(in, target)).epsilon(1e-14));

  // L(in)=0.5, L(out)=0.2, P=0.05: evaluated from constant images.
  const Image t0(1, 1, 0.0);
  const Image in5(1, 1, std::sqrt(0.5));
  const Image out2(1, 1, std::sqrt(0.2));
  PenaltyConfig fixed;
  fixed.alpha_low = fixed.alpha_high = 0.0;
  fixed.length_penalty = 0.05;
  CHECK(reward(in5, out2, t0, task, fixed, 1) == doctest::Approx(0.25));
}

TEST_CASE("reinforce loss") {
  const double r[] = {0.5}, lp[] = {-3.0};
  CHECK(reinforce_loss(r, lp) == doctest::Approx(1.5));
  const double zr[] = {0.0, 0.0}, lp2[] = {-1.0, -2.0};
  CHECK(reinforce_loss(zr, lp2) == 0.0);
  const double r2[] = {0.5, -0.2};
  CHECK(reinforce_loss(r2, lp2) == doctest::Approx((0.5 + -0.4) / 2.0));
  const double r2x[] = {1.0, -0.4};
  CHECK(reinforce_loss(r2x, lp2) == doctest::Approx(2.0 * reinforce_loss(r2, lp2)));
  const double same[] = {0.3, 0.3};
  CHECK(reinforce_loss(same, lp2, true) == 0.0);
  CHECK_THROWS_AS(reinforce_loss(r, lp2), InvalidArgument);
}

TEST_CASE("parameter loss") {
  const MseTask task;
  const PenaltyConfig cfg;
  const Image mid(2, 2, 0.5);
  CHECK(param_loss(mid, mid, task, cfg, 0).value == 0.0);

  const Image out(2, 2, 0.005);
  const Image target(2, 2, 0.105);
  CHECK(param_loss(out, target, task, cfg, 0).value == doctest::Approx(0.015));

  Image hot = random_image(7, 5, 5, 0.9, 1.0);
  const Image tgt = random_image(8, 5, 5);
  REQUIRE(mean_intensity(hot) > 0.9);
  const auto g = param_loss(hot, tgt, task, cfg, 0).grad;
  auto loss = [&] { return param_loss(hot, tgt, task, cfg, 0).value; };
  for (std::size_t i = 0; i < hot.size(); ++i) {
    CHECK(rel_error(g[i], central_diff(loss, hot[i], 1e-6)) <= 1e-4);
  }
  Image dark = random_image(9, 5, 5, 0.0, 0.015);
  REQUIRE(mean_intensity(dark) < 0.01);
  const auto gd = param_loss(dark, tgt, task, cfg, 0).grad;
  auto dloss = [&] { return param_loss(dark, tgt, task, cfg, 0).value; };
  for (std::size_t i = 0; i < dark.size(); ++i) {
    CHECK(rel_error(gd[i], central_diff(dloss, dark[i], 1e-7)) <= 1e-4);
  }
}

}
