#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "stereolab/analysis.hpp"
#include "stereolab/eval.hpp"
#include "stereolab/fusion.hpp"
#include "stereolab/geometry.hpp"
#include "stereolab/io.hpp"
#include "stereolab/pipeline.hpp"
#include "stereolab/prefill.hpp"
#include "stereolab/sparsify.hpp"

namespace sl = stereolab;
namespace fs = std::filesystem;

namespace {

bool has_extension(const std::string& path, const char* ext) {
  std::string e = fs::path(path).extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

// .png is 8-bit imagery, .pfm raw floats.
sl::Image load_image(const std::string& path) {
  if (has_extension(path, ".png")) return sl::read_image_png(path);
  if (has_extension(path, ".pfm")) return sl::read_pfm(path);
  throw sl::FormatError("'" + path + "': expected .png or .pfm image");
}

// .png is KITTI depth in meters, .pfm disparity in pixels.
struct GroundTruth {
  sl::Grid<float> map;
  sl::ValueUnit unit;
};

GroundTruth load_gt(const std::string& path) {
  if (has_extension(path, ".png")) return {sl::read_kitti_depth_png(path), sl::ValueUnit::Meters};
  if (has_extension(path, ".pfm")) {
    sl::Grid<float> map = sl::read_pfm(path);
    if (map.channels() != 1) throw sl::FormatError("'" + path + "': expected single-channel PFM");
    return {std::move(map), sl::ValueUnit::Pixels};
  }
  throw sl::FormatError("'" + path + "': expected .png (depth) or .pfm (disparity)");
}

std::pair<int, int> parse_shape(const std::string& text) {
  int rows = 0, cols = 0;
  char sep = 0;
  std::istringstream in(text);
  if (!(in >> rows >> sep >> cols) || sep != 'x' || rows <= 0 || cols <= 0 || in.rdbuf()->in_avail())
    throw std::invalid_argument("shape must be HxW, e.g. 375x1242");
  return {rows, cols};
}

sl::SparsePointSet convert_points(const sl::SparsePointSet& in, sl::ValueUnit target,
                                  const sl::CameraRig& rig) {
  if (in.unit == target) return in;
  sl::SparsePointSet out = in;
  out.unit = target;
  for (auto& p : out.points)
    p.value = static_cast<float>(target == sl::ValueUnit::Meters
                                     ? sl::disparity_to_depth(p.value, rig)
                                     : sl::depth_to_disparity(p.value, rig));
  return out;
}

void write_cost_slice_png(const sl::LocalCostSlab& slab, int channel, const std::string& path) {
  sl::Image gray(slab.rows(), slab.cols(), 1);
  float lo = 0.0f, hi = 0.0f;
  bool first = true;
  for (int r = 0; r < slab.rows(); ++r)
    for (int c = 0; c < slab.cols(); ++c) {
      const float cost = -slab(r, c, channel);  // higher-is-better back to raw cost
      if (first || cost < lo) lo = cost;
      if (first || cost > hi) hi = cost;
      first = false;
    }
  const float range = hi > lo ? hi - lo : 1.0f;
  for (int r = 0; r < slab.rows(); ++r)
    for (int c = 0; c < slab.cols(); ++c)
      gray(r, c) = (-slab(r, c, channel) - lo) / range;  // darker = lower cost
  sl::write_image_png(gray, path);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(static_cast<int>(sl::detail::parse_long(tok, "list")));
  }
  if (out.empty()) throw std::invalid_argument("expected a comma-separated list of integers");
  return out;
}

std::vector<std::string> parse_str_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  if (out.empty()) throw std::invalid_argument("expected a comma-separated list");
  return out;
}

sl::PrefillMethod parse_prefill(const std::string& name) {
  if (name == "nearest") return sl::PrefillMethod::Nearest;
  if (name == "ipbasic") return sl::PrefillMethod::IpBasic;
  throw std::invalid_argument("prefill method must be nearest or ipbasic");
}

sl::FeatureMethod parse_features(const std::string& name) {
  if (name == "census") return sl::FeatureMethod::Census;
  if (name == "zncc") return sl::FeatureMethod::Zncc;
  if (name == "raw") return sl::FeatureMethod::Raw;
  throw std::invalid_argument("features must be census, zncc or raw");
}

int run_sparsify(const std::string& gt_path, const std::string& mode, int n, int beams,
                 unsigned seed, const std::string& calib_path, const std::string& out_path) {
  GroundTruth gt = load_gt(gt_path);
  sl::SparsePointSet set;
  if (mode == "uniform") {
    if (n <= 0) throw std::invalid_argument("uniform mode needs --n");
    set = sl::sample_uniform(gt.map, n, seed, gt.unit);
  } else if (mode == "beams") {
    if (beams <= 0) throw std::invalid_argument("beams mode needs --beams");
    if (calib_path.empty()) throw std::invalid_argument("beams mode needs --calib");
    set = sl::sample_beams(gt.map, sl::read_calibration(calib_path), beams, {}, gt.unit);
  } else {
    throw std::invalid_argument("mode must be uniform or beams");
  }
  sl::write_sparse_points(set, out_path);
  return 0;
}

int run_prefill(const std::string& points_path, const std::string& method,
                const std::string& shape_text, const std::string& space,
                const std::string& calib_path, const std::string& out_path) {
  sl::SparsePointSet points = sl::read_sparse_points(points_path);
  const auto [rows, cols] = parse_shape(shape_text);
  if (rows != points.rows || cols != points.cols)
    throw std::domain_error("--shape " + shape_text + " does not match the points header (" +
                            std::to_string(points.rows) + "x" + std::to_string(points.cols) + ")");

  sl::ValueUnit target = points.unit;
  if (space == "depth") target = sl::ValueUnit::Meters;
  else if (space == "disparity") target = sl::ValueUnit::Pixels;
  else if (!space.empty()) throw std::invalid_argument("--space must be depth or disparity");
  if (target != points.unit) {
    if (calib_path.empty())
      throw std::invalid_argument("unit conversion requires --calib");
    points = convert_points(points, target, sl::read_calibration(calib_path));
  }

  sl::Grid<float> dense(0, 0);
  if (method == "nearest") {
    dense = sl::fill_nearest(points);
  } else if (method == "ipbasic") {
    sl::IpBasicParams params;
    params.invert = target == sl::ValueUnit::Meters;
    dense = sl::fill_ipbasic(points, params);
  } else {
    throw std::invalid_argument("method must be nearest or ipbasic");
  }

  if (has_extension(out_path, ".png")) {
    if (target != sl::ValueUnit::Meters)
      throw std::domain_error("PNG output stores depth; use --space depth or a .pfm output");
    sl::write_kitti_depth_png(dense, out_path);
  } else if (has_extension(out_path, ".pfm")) {
    sl::write_pfm(dense, out_path);
  } else {
    throw std::invalid_argument("output must end in .png or .pfm");
  }
  return 0;
}

int run_fuse(const std::string& left_path, const std::string& right_path,
             const std::string& points_path, const std::string& calib_path,
             const std::string& out_path) {
  const sl::Image left = load_image(left_path);
  const sl::Image right = load_image(right_path);
  const sl::CameraRig rig = sl::read_calibration(calib_path);
  sl::SparsePointSet points = sl::read_sparse_points(points_path);
  if (points.unit == sl::ValueUnit::Pixels)
    points = convert_points(points, sl::ValueUnit::Meters, rig);
  const sl::FusedPair fused = sl::augment_images(left, right, points, rig);
  if (fused.dropped > 0)
    std::cerr << "fuse: dropped " << fused.dropped
              << " point(s) (out-of-frame right projection or z-buffer collision)\n";

  // Left view in rows [0, H), right view in rows [H, 2H).
  sl::Grid<float> packed(2 * left.rows(), left.cols(), 6);
  for (int r = 0; r < left.rows(); ++r)
    for (int c = 0; c < left.cols(); ++c)
      for (int k = 0; k < 6; ++k) {
        packed(r, c, k) = fused.left.grid(r, c, k);
        packed(r + left.rows(), c, k) = fused.right.grid(r, c, k);
      }
  sl::write_tensor(packed, out_path);
  return 0;
}

int run_match_cmd(const std::string& left_path, const std::string& right_path,
                  const std::string& init_path, const std::string& points_path,
                  const std::string& prefill, const std::string& features, int iters, int k,
                  const std::string& out_path, const std::string& trace_dir) {
  const sl::Image left = load_image(left_path);
  const sl::Image right = load_image(right_path);

  sl::MatchConfig config;
  config.features = parse_features(features);
  config.iterations = iters;
  config.radius = k;
  if (!prefill.empty()) {
    if (points_path.empty()) throw std::invalid_argument("--prefill requires --points");
    config.prefill = parse_prefill(prefill);
  }

  sl::SparsePointSet points;
  const sl::SparsePointSet* points_ptr = nullptr;
  if (!points_path.empty()) {
    points = sl::read_sparse_points(points_path);
    if (points.rows != left.rows() || points.cols != left.cols())
      throw std::domain_error("points frame does not match the images");
    points_ptr = &points;
  }
  sl::DisparityMap init(0, 0);
  const sl::DisparityMap* init_ptr = nullptr;
  if (!init_path.empty()) {
    init = sl::read_pfm(init_path);
    if (init.channels() != 1 || init.rows() != left.rows() || init.cols() != left.cols())
      throw std::domain_error("--init must be a single-channel PFM matching the images");
    init_ptr = &init;
  }

  const sl::MatchResult result = sl::run_match(left, right, points_ptr, init_ptr, config);
  if (result.rejected_guidance > 0)
    std::cerr << "match: rejected " << result.rejected_guidance << " out-of-frame guidance point(s)\n";
  sl::write_pfm(result.trace.snapshots.back(), out_path);

  if (!trace_dir.empty()) {
    fs::create_directories(trace_dir);
    const int width = static_cast<int>(std::to_string(iters).size());
    for (std::size_t t = 0; t < result.trace.snapshots.size(); ++t) {
      std::ostringstream name;
      name << "t" << std::setw(std::max(width, 2)) << std::setfill('0') << (t + 1) << ".pfm";
      sl::write_pfm(result.trace.snapshots[t], (fs::path(trace_dir) / name.str()).string());
    }
  }
  return 0;
}

int run_eval(const std::string& pred_path, const std::string& gt_path,
             const std::string& calib_path) {
  const sl::CameraRig rig = sl::read_calibration(calib_path);
  const GroundTruth pred = load_gt(pred_path);
  const GroundTruth gt = load_gt(gt_path);
  if (!pred.map.same_shape(gt.map)) throw std::domain_error("prediction and gt shapes differ");

  const auto to_disparity = [&](const GroundTruth& g) {
    return g.unit == sl::ValueUnit::Pixels ? g.map : sl::depth_to_disparity(g.map, rig);
  };
  const auto to_depth_mm = [&](const GroundTruth& g) {
    sl::DepthMap z = g.unit == sl::ValueUnit::Meters ? g.map : sl::disparity_to_depth(g.map, rig);
    for (int r = 0; r < z.rows(); ++r)
      for (int c = 0; c < z.cols(); ++c)
        if (sl::is_valid(z(r, c))) z(r, c) *= 1000.0f;
    return z;
  };

  const sl::DisparityMap d_pred = sl::clip_disparity(to_disparity(pred));
  const sl::DisparityMap d_gt = sl::clip_disparity(to_disparity(gt));
  const sl::Mask mask = sl::valid_mask(d_gt);
  // Depth columns skip pixels without a defined depth on either side (for
  // example a zero-disparity estimate); such pixels already count as bad in
  // the disparity columns.
  const sl::DepthMap z_pred = to_depth_mm(pred), z_gt = to_depth_mm(gt);
  sl::Mask z_mask = mask;
  for (int r = 0; r < z_mask.rows(); ++r)
    for (int c = 0; c < z_mask.cols(); ++c)
      if (z_mask(r, c) && (!sl::is_valid(z_pred(r, c)) || !sl::is_valid(z_gt(r, c))))
        z_mask(r, c) = false;
  const sl::DepthErrors depth = sl::depth_errors(z_pred, z_gt, z_mask);

  std::printf("%.9g,%.9g,%.9g,%.9g,%.9g\n", sl::bad_ratio(d_pred, d_gt, mask, 1.0),
              sl::bad_ratio(d_pred, d_gt, mask, 2.0), sl::avg_err(d_pred, d_gt, mask),
              depth.rmse_mm, depth.mae_mm);
  return 0;
}

int run_toy(int size, int fg, int dbg, int dfg, const std::string& out_dir) {
  const sl::ToyPair pair = sl::make_toy_pair(size, fg, dbg, dfg);
  const sl::ToyStudy study = sl::run_toy_study(pair);
  fs::create_directories(out_dir);
  const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

  sl::write_image_png(pair.left, path("left.png"));
  sl::write_image_png(pair.right, path("right.png"));
  sl::write_pfm(pair.gt, path("gt.pfm"));

  {
    std::ofstream out(path("laplacian.csv"));
    out << "init,laplacian\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "full,%.9g\n", study.lap_full);
    out << buf;
    std::snprintf(buf, sizeof(buf), "sparse,%.9g\n", study.lap_sparse);
    out << buf;
    std::snprintf(buf, sizeof(buf), "filled,%.9g\n", study.lap_filled);
    out << buf;
    std::snprintf(buf, sizeof(buf), "zero,%.9g\n", study.lap_zero);
    out << buf;
  }
  {
    std::ofstream out(path("retrieval_error.csv"));
    out << "init,e,e_lowpass\n";
    char buf[96];
    std::snprintf(buf, sizeof(buf), "sparse,%.9g,%.9g\n", study.e_sparse, study.e_lp_sparse);
    out << buf;
    std::snprintf(buf, sizeof(buf), "filled,%.9g,%.9g\n", study.e_filled, study.e_lp_filled);
    out << buf;
    std::snprintf(buf, sizeof(buf), "zero,%.9g,%.9g\n", study.e_zero, study.e_lp_zero);
    out << buf;
  }
  {
    // Offset-zero channel of the retrieved slab along the middle row.
    const int mid = pair.gt.rows() / 2;
    const int center = study.s_full.channels() / 2;
    const auto scanline = [&](const sl::LocalCostSlab& s) {
      std::vector<float> line(static_cast<std::size_t>(s.cols()));
      for (int c = 0; c < s.cols(); ++c) line[static_cast<std::size_t>(c)] = s(mid, c, center);
      return sl::spectrum_1d(line);
    };
    const auto sp_full = scanline(study.s_full);
    const auto sp_sparse = scanline(study.s_sparse);
    const auto sp_filled = scanline(study.s_filled);
    const auto sp_zero = scanline(study.s_zero);
    std::ofstream out(path("spectra.csv"));
    out << "freq,full,sparse,filled,zero\n";
    char buf[160];
    for (std::size_t i = 0; i < sp_full.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%.9g\n", i, sp_full[i], sp_sparse[i],
                    sp_filled[i], sp_zero[i]);
      out << buf;
    }
  }
  const int center = study.s_full.channels() / 2;
  write_cost_slice_png(study.s_full, center, path("s_full.png"));
  write_cost_slice_png(study.s_sparse, center, path("s_sparse.png"));
  write_cost_slice_png(study.s_filled, center, path("s_filled.png"));
  write_cost_slice_png(study.s_zero, center, path("s_zero.png"));
  return 0;
}

int run_sweep_cmd(const std::string& corpus, const std::string& points_list,
                  const std::string& variants_list, const std::string& out_path) {
  sl::SweepConfig config;
  config.counts = parse_int_list(points_list);
  config.variants = parse_str_list(variants_list);
  const std::vector<sl::Scene> scenes = sl::load_corpus(corpus);
  const sl::SweepResult result = sl::run_sweep(scenes, config);
  sl::write_sweep_csv(result, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-guided stereo matching toolkit"};
  app.require_subcommand(1);

  std::string gt_path, mode, calib_path, out_path;
  int n = 0, beams = 0;
  unsigned seed = 0;
  auto* sparsify = app.add_subcommand("sparsify", "Sample sparse guidance from dense ground truth");
  sparsify->add_option("--gt", gt_path, "depth .png or disparity .pfm")->required();
  sparsify->add_option("--mode", mode, "uniform|beams")->required();
  sparsify->add_option("--n", n, "point count for uniform mode");
  sparsify->add_option("--beams", beams, "beam count for beams mode");
  sparsify->add_option("--seed", seed, "RNG seed");
  sparsify->add_option("--calib", calib_path, "calibration file (beams mode)");
  sparsify->add_option("-o,--output", out_path, "sparse points file")->required();

  std::string points_path, method, shape_text, space;
  auto* prefill = app.add_subcommand("prefill", "Densify sparse points");
  prefill->add_option("--points", points_path, "sparse points file")->required();
  prefill->add_option("--method", method, "nearest|ipbasic")->required();
  prefill->add_option("--shape", shape_text, "HxW")->required();
  prefill->add_option("--space", space, "depth|disparity (default: native unit)");
  prefill->add_option("--calib", calib_path, "calibration for unit conversion");
  prefill->add_option("-o,--output", out_path, ".png (depth) or .pfm")->required();

  std::string left_path, right_path;
  auto* fuse = app.add_subcommand("fuse", "Concatenate projected XYZ onto both images");
  fuse->add_option("--left", left_path)->required();
  fuse->add_option("--right", right_path)->required();
  fuse->add_option("--points", points_path)->required();
  fuse->add_option("--calib", calib_path)->required();
  fuse->add_option("-o,--output", out_path, "stacked 2HxWx6 tensor")->required();

  std::string init_path, prefill_method, features = "census", trace_dir;
  int iters = 32, k = 4;
  auto* match = app.add_subcommand("match", "Iterative disparity matching");
  match->add_option("--left", left_path)->required();
  match->add_option("--right", right_path)->required();
  match->add_option("--init", init_path, "dense initial disparity (.pfm)");
  match->add_option("--points", points_path, "sparse guidance (unit=px)");
  match->add_option("--prefill", prefill_method, "nearest|ipbasic");
  match->add_option("--features", features, "census|zncc|raw");
  match->add_option("--iters", iters, "refinement iterations");
  match->add_option("--k", k, "retrieval window radius");
  match->add_option("-o,--output", out_path, "final disparity .pfm")->required();
  match->add_option("--trace-dir", trace_dir, "write every iterate as PFM");

  std::string pred_path;
  auto* eval = app.add_subcommand("eval", "Print bad1,bad2,avg_err,rmse_mm,mae_mm");
  eval->add_option("--pred", pred_path)->required();
  eval->add_option("--gt", gt_path)->required();
  eval->add_option("--calib", calib_path)->required();

  int size = 40, fg = 15, dbg = 6, dfg = 15;
  auto* toy = app.add_subcommand("toy", "Diagnostic toy-pair study");
  toy->add_option("--size", size);
  toy->add_option("--fg", fg);
  toy->add_option("--dbg", dbg);
  toy->add_option("--dfg", dfg);
  toy->add_option("-o,--output", out_path, "output directory")->required();

  std::string corpus, points_list = "100,300,1000,3000", variants_list = "zero,naive,prefilled";
  auto* sweep = app.add_subcommand("sweep", "Error vs. guidance density over a corpus");
  sweep->add_option("--corpus", corpus, "directory of scene subdirectories")->required();
  sweep->add_option("--points", points_list, "comma-separated point counts");
  sweep->add_option("--variants", variants_list, "subset of zero,naive,prefilled");
  sweep->add_option("-o,--output", out_path, "CSV path")->required();

  try {
    app.parse(argc, argv);
    if (sparsify->parsed())
      return run_sparsify(gt_path, mode, n, beams, seed, calib_path, out_path);
    if (prefill->parsed())
      return run_prefill(points_path, method, shape_text, space, calib_path, out_path);
    if (fuse->parsed()) return run_fuse(left_path, right_path, points_path, calib_path, out_path);
    if (match->parsed())
      return run_match_cmd(left_path, right_path, init_path, points_path, prefill_method, features,
                           iters, k, out_path, trace_dir);
    if (eval->parsed()) return run_eval(pred_path, gt_path, calib_path);
    if (toy->parsed()) return run_toy(size, fg, dbg, dfg, out_path);
    if (sweep->parsed()) return run_sweep_cmd(corpus, points_list, variants_list, out_path);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const sl::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
