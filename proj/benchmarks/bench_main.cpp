// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <vector>

#include "nearlink/beamforming.hpp"
#include "nearlink/channel.hpp"
#include "nearlink/constants.hpp"
#include "nearlink/geometry.hpp"
#include "nearlink/mimo.hpp"
#include "nearlink/placement.hpp"

using namespace nearlink;

namespace
{
const double kLam = kSpeedOfLight / 28e9;

ElementLayout ground_16()
{
    const auto centers = random_panel_positions(1414, 1000, 16, 20, 2);
    return make_distributed_panels({32, 32, kLam / 2, 6.0}, centers);
}

ElementLayout sat_corners(double range)
{
    const std::vector<Vec3> c{{-0.707, -0.5, range}, {0.707, -0.5, range}, {-0.707, 0.5, range},
                              {0.707, 0.5, range}};
    return make_distributed_panels({1, 1, kLam / 2, 0.0}, c);
}
} // namespace

static void BM_ChannelFill(benchmark::State& state)
{
    const auto g = ground_16();
    const auto s = sat_corners(400e3);
    for (auto _ : state)
        benchmark::DoNotOptimize(channel_matrix(g, s, kLam, ChannelModel::PhaseOnly));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size() * s.size()));
}
BENCHMARK(BM_ChannelFill)->Unit(benchmark::kMillisecond);

static void BM_SingularValues4x16384(benchmark::State& state)
{
    const auto h = channel_matrix(ground_16(), sat_corners(400e3), kLam, ChannelModel::PhaseOnly);
    for (auto _ : state)
        benchmark::DoNotOptimize(singular_values(h));
}
BENCHMARK(BM_SingularValues4x16384)->Unit(benchmark::kMillisecond);

static void BM_PeakSidelobe(benchmark::State& state)
{
    const auto centers = random_panel_positions(1414, 1000, 16, 20, 1);
    const auto obj = PlacementObjective::for_aperture(1414, kLam, {}, -kPi / 3, kPi / 3,
                                                      static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(peak_sidelobe(centers, kLam, obj));
}
BENCHMARK(BM_PeakSidelobe)->Arg(100001)->Arg(1000001)->Unit(benchmark::kMillisecond);

static void BM_EvaluateGain(benchmark::State& state)
{
    const auto g = ground_16();
    const FocalPoint f = point_at(500e3, 0.0);
    const auto w = delay_and_sum_weights(g, f, kLam);
    for (auto _ : state)
        benchmark::DoNotOptimize(evaluate_gain(g, w, point_at(700e3, 1e-4), kLam));
}
BENCHMARK(BM_EvaluateGain)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
