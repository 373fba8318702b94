#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "stereolab/cost_volume.hpp"
#include "stereolab/eval.hpp"
#include "stereolab/grid.hpp"
#include "stereolab/io.hpp"
#include "stereolab/prefill.hpp"
#include "stereolab/refiner.hpp"
#include "stereolab/sparsify.hpp"

namespace stereolab {

enum class PrefillMethod { None, Nearest, IpBasic };

struct MatchConfig {
  FeatureMethod features = FeatureMethod::Census;
  int window = 7;
  int iterations = 32;
  int radius = 4;  // K
  int smooth_radius = 1;
  float max_disparity = kDefaultMaxDisparity;
  PrefillMethod prefill = PrefillMethod::None;
};

struct MatchResult {
  RefineTrace trace;
  DisparityMap init;
  int rejected_guidance = 0;
};

inline CostVolume build_match_volume(const Image& left, const Image& right,
                                     const MatchConfig& config) {
  if (!left.same_shape(right)) throw std::invalid_argument("match: image shape mismatch");
  const FeatureMap fl = featurize(left, config.features, config.window);
  const FeatureMap fr = featurize(right, config.features, config.window);
  return build_correlation(fl, fr);
}

// Guidance points must already be disparities in pixels; unit mismatches are
// hard errors, never silent conversions.
inline DisparityMap prefill_disparity(const SparsePointSet& points, PrefillMethod method) {
  if (points.unit != ValueUnit::Pixels)
    throw std::domain_error("prefill: guidance points must be disparities in pixels");
  switch (method) {
    case PrefillMethod::Nearest:
      return fill_nearest(points);
    case PrefillMethod::IpBasic: {
      IpBasicParams params;
      params.invert = false;  // disparity space: larger = nearer already
      return fill_ipbasic(points, params);
    }
    case PrefillMethod::None:
      break;
  }
  throw std::invalid_argument("prefill: no method selected");
}

inline MatchResult run_match(const CostVolume& vol, int rows, int cols,
                             const SparsePointSet* points, const DisparityMap* init,
                             const MatchConfig& config) {
  if (points && points->unit != ValueUnit::Pixels)
    throw std::domain_error("match: guidance points must be disparities in pixels");
  DisparityMap prefilled(0, 0);
  const DisparityMap* dense = init;
  if (!init && points && config.prefill != PrefillMethod::None) {
    prefilled = prefill_disparity(*points, config.prefill);
    dense = &prefilled;
  }
  InitResult start = init_disparity(rows, cols, points, dense, config.max_disparity);
  MatchResult res{run_refiner(vol, start.map, config.iterations, config.radius,
                              config.smooth_radius, config.max_disparity),
                  std::move(start.map), start.rejected};
  return res;
}

inline MatchResult run_match(const Image& left, const Image& right, const SparsePointSet* points,
                             const DisparityMap* init, const MatchConfig& config) {
  const CostVolume vol = build_match_volume(left, right, config);
  return run_match(vol, left.rows(), left.cols(), points, init, config);
}

struct SweepConfig {
  std::vector<int> counts{100, 300, 1000, 3000};
  std::vector<std::string> variants{"zero", "naive", "prefilled"};
  MatchConfig match;
  std::uint32_t seed = 0;
  PrefillMethod prefill_method = PrefillMethod::Nearest;
};

struct SweepRun {
  std::string scene;
  int points = 0;
  std::string variant;
  std::vector<double> avg_err_per_iter;
  double avg_err = 0.0;
  double bad1 = 0.0;
};

struct SweepResult {
  std::vector<int> counts;
  std::vector<std::string> variants;
  std::vector<SweepRun> runs;

  double mean(int points, const std::string& variant, bool bad) const {
    double acc = 0.0;
    int n = 0;
    for (const auto& run : runs)
      if (run.points == points && run.variant == variant) {
        acc += bad ? run.bad1 : run.avg_err;
        ++n;
      }
    if (n == 0) throw std::invalid_argument("sweep: no runs for the requested cell");
    return acc / n;
  }
  double mean_avg_err(int points, const std::string& variant) const {
    return mean(points, variant, false);
  }
  double mean_bad1(int points, const std::string& variant) const {
    return mean(points, variant, true);
  }
};

namespace detail {

inline std::uint32_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t x = a * 0x9e3779b97f4a7c15ull + b * 0xbf58476d1ce4e5b9ull + c + 0x94d049bb133111ebull;
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return static_cast<std::uint32_t>(x);
}

}  // namespace detail

// Guidance-benefit sweep over a scene corpus: for every point budget, the
// same sampled guidance feeds each initialization variant, so rows compare
// initializations and nothing else.
inline SweepResult run_sweep(const std::vector<Scene>& scenes, const SweepConfig& config) {
  for (const auto& v : config.variants)
    if (v != "zero" && v != "naive" && v != "prefilled")
      throw std::invalid_argument("sweep: unknown variant '" + v + "'");
  if (scenes.empty()) throw std::invalid_argument("sweep: empty corpus");

  SweepResult result;
  result.counts = config.counts;
  result.variants = config.variants;
  for (std::size_t si = 0; si < scenes.size(); ++si) {
    const Scene& scene = scenes[si];
    const CostVolume vol = build_match_volume(scene.left, scene.right, config.match);
    const Mask mask = valid_mask(scene.gt);
    const DisparityMap gt = clip_disparity(scene.gt, config.match.max_disparity);
    for (int count : config.counts) {
      const SparsePointSet points = sample_uniform(
          scene.gt, count,
          detail::mix_seed(config.seed, si, static_cast<std::uint64_t>(count)),
          ValueUnit::Pixels);
      for (const auto& variant : config.variants) {
        MatchConfig match = config.match;
        const SparsePointSet* guidance = nullptr;
        match.prefill = PrefillMethod::None;
        if (variant == "naive") guidance = &points;
        if (variant == "prefilled") {
          guidance = &points;
          match.prefill = config.prefill_method;
        }
        MatchResult mr =
            run_match(vol, scene.gt.rows(), scene.gt.cols(), guidance, nullptr, match);
        SweepRun run;
        run.scene = scene.name;
        run.points = count;
        run.variant = variant;
        for (const auto& snapshot : mr.trace.snapshots)
          run.avg_err_per_iter.push_back(
              avg_err(clip_disparity(snapshot, config.match.max_disparity), gt, mask));
        run.avg_err = run.avg_err_per_iter.back();
        run.bad1 = bad_ratio(clip_disparity(mr.trace.snapshots.back(), config.match.max_disparity),
                             gt, mask, 1.0);
        result.runs.push_back(std::move(run));
      }
    }
  }
  return result;
}

inline void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << "points";
  for (const auto& v : result.variants) out << "," << v << "_avg_err," << v << "_bad1";
  out << "\n";
  char buf[64];
  for (int count : result.counts) {
    out << count;
    for (const auto& v : result.variants) {
      std::snprintf(buf, sizeof(buf), ",%.9g,%.9g", result.mean_avg_err(count, v),
                    result.mean_bad1(count, v));
      out << buf;
    }
    out << "\n";
  }
  if (!out) throw FormatError("cannot write '" + path + "'");
}

}  // namespace stereolab
