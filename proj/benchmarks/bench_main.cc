// benchmarks/bench_main.cc

// Copyright 2026  The gid authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>

#include "gid/baselines.h"
#include "gid/encoder.h"
#include "gid/evaluation.h"
#include "gid/losses.h"

namespace {

namespace ad = gid::ad;

ad::Matrix Randn(int r, int c, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> n;
  return ad::Matrix::NullaryExpr(r, c, [&] { return n(g); });
}

void BM_LossStack(benchmark::State &state) {
  const int b = static_cast<int>(state.range(0)), c = 8, d = 64;
  const ad::Matrix h1 = Randn(b, d, 1), h2 = Randn(b, d, 2), w = Randn(d, c, 3),
                   proj = Randn(d, 256, 4);
  const std::vector<gid::Origin> origin(b, gid::Origin::kOod);
  const std::vector<int> gold(b, -1);
  for (auto _ : state) {
    const auto x1 = ad::Input(h1), x2 = ad::Input(h2);
    const std::vector<gid::ViewDistributions> views{
        {ad::SoftmaxRows(ad::MatMul(x1, ad::Constant(w))), ad::SoftmaxRows(ad::MatMul(x1, ad::Constant(-w)))},
        {ad::SoftmaxRows(ad::MatMul(x2, ad::Constant(w))), ad::SoftmaxRows(ad::MatMul(x2, ad::Constant(-w)))}};
    gid::LossParts parts;
    parts.dc = gid::DataConsistency(x1, x2);
    parts.pc = gid::PredictionConsistency(views);
    parts.cp = gid::CrossPrediction(views, origin, gold);
    parts.cl = gid::NtXent(ad::Tanh(ad::VStack({ad::MatMul(x1, ad::Constant(proj)),
                                                ad::MatMul(x2, ad::Constant(proj))})),
                           gid::ViewPairMap(b), 0.07);
    const auto total = gid::TotalLoss(parts, {});
    ad::Backward(total);
    benchmark::DoNotOptimize(x1.grad().data());
  }
  state.SetItemsProcessed(state.iterations() * b);
}
BENCHMARK(BM_LossStack)->Arg(16)->Arg(64);

void BM_EncoderForward(benchmark::State &state) {
  gid::EncoderConfig c;
  c.dim = static_cast<int>(state.range(0));
  c.ffn_dim = 2 * c.dim;
  gid::ToyEncoder enc(c);
  std::vector<std::string> texts;
  for (int i = 0; i < 64; ++i)
    texts.push_back(enc.Template("please check the status of transfer number " + std::to_string(i)));
  std::uint64_t view = 0;
  for (auto _ : state) {
    auto fr = enc.Forward(texts, ++view, true);
    ad::Backward(ad::Sum(fr.pooled));
    benchmark::DoNotOptimize(fr.pooled.value().data());
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_EncoderForward)->Arg(16)->Arg(64);

void BM_Kmeans(benchmark::State &state) {
  const ad::Matrix pts = Randn(static_cast<int>(state.range(0)), 64, 7);
  for (auto _ : state) {
    auto s = gid::KmeansCluster(pts, 5, 3, 100);
    benchmark::DoNotOptimize(s.assignment.data());
  }
}
BENCHMARK(BM_Kmeans)->Arg(300)->Arg(3000);

void BM_HungarianAlign(benchmark::State &state) {
  const int m = static_cast<int>(state.range(0));
  std::mt19937_64 g(5);
  std::vector<int> clusters(20 * m), gold(20 * m);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    gold[i] = static_cast<int>(i) % m;
    clusters[i] = g() % 4 == 0 ? static_cast<int>(g() % m) : (gold[i] + 1) % m;
  }
  for (auto _ : state) benchmark::DoNotOptimize(gid::HungarianAlign(clusters, gold, m).data());
}
BENCHMARK(BM_HungarianAlign)->Arg(5)->Arg(46)->Arg(150);

}  // namespace

BENCHMARK_MAIN();
