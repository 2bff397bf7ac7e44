// SPDX-License-Identifier: Apache-2.0
//
// subarray-design: placement optimization and DoA evaluation for sparse arrays of subarrays
// Copyright (C) 2026 The subarray-design authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <benchmark/benchmark.h>
#include <omp.h>

#include "subarray/benchmarks.hpp"
#include "subarray/beampattern.hpp"
#include "subarray/bounds.hpp"
#include "subarray/estimation.hpp"

using namespace subarray;

namespace {

const ElementLayout& layout() {
  static const ElementLayout l = build_subarray_layout(4, 4, 0.5, 0.6);
  return l;
}

const SuperArrayConfig& naive() {
  static const SuperArrayConfig c = naive_benchmark(layout());
  return c;
}

const std::vector<Vec2>& elements() {
  static const std::vector<Vec2> d = expand_super_array(naive(), layout());
  return d;
}

void BM_PatternSerial(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_pattern_reference(elements(), n, 1.5));
}

void BM_PatternOpenMP(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  omp_set_num_threads(static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_pattern(elements(), n, 1.5));
}

void BM_PatternStructured(benchmark::State& st) {
  const StructuredPattern ebp(layout(), static_cast<int>(st.range(0)), 1.5);
  for (auto _ : st) benchmark::DoNotOptimize(ebp.evaluate(naive().centers));
}

void BM_Msll(benchmark::State& st) {
  const PatternField f = StructuredPattern(layout(), static_cast<int>(st.range(0)), 1.5).evaluate(naive().centers);
  for (auto _ : st) benchmark::DoNotOptimize(extract_msll(f));
}

void BM_ChordProfile(benchmark::State& st) {
  omp_set_num_threads(static_cast<int>(st.range(0)));
  ZzbOptions opt;
  opt.uniform_h = 128;
  opt.log_h = 128;
  for (auto _ : st) benchmark::DoNotOptimize(chord_profile(elements(), {1, 0}, opt));
}

void BM_Campaign(benchmark::State& st) {
  omp_set_num_threads(static_cast<int>(st.range(0)));
  const SensingModel m(elements());
  const double pitch = default_dictionary_pitch(elements());
  const SteeringDictionary dict = make_dictionary(m, pitch, 0.5 + pitch);
  CampaignOptions o;
  o.scenario.k = 5;
  o.snr_db = {0};
  o.trials = 32;
  for (auto _ : st) benchmark::DoNotOptimize(run_campaign(m, dict, o));
}

}  // namespace

BENCHMARK(BM_PatternSerial)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PatternOpenMP)->Args({128, 1})->Args({256, 1})->Args({256, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PatternStructured)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Msll)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChordProfile)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Campaign)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
