#include "gsift/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gsift/colorspace.hpp"
#include "gsift/dataset.hpp"
#include "gsift/error.hpp"
#include "gsift/evaluation.hpp"
#include "gsift/face_detect.hpp"
#include "gsift/pipeline.hpp"
#include "gsift/pnm.hpp"
#include "gsift/sift.hpp"
#include "gsift/svm.hpp"
#include "gsift/synthetic.hpp"

namespace gsift::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDefaultDataDir = "gsift-data";

struct TrainFlags {
  std::string kernel = "rbf";
  double gamma = 0.0;
  TrainConfig cfg;
};

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

void add_sift_flags(CLI::App* app, ScaleSpaceParams& p) {
  app->add_option("--octaves", p.octaves, "Octaves (capped by image size)")->check(CLI::PositiveNumber);
  app->add_option("--scales-per-octave", p.scales_per_octave, "DoG scales sampled per octave")
      ->check(CLI::PositiveNumber);
  app->add_option("--sigma", p.base_sigma, "Base blur of each octave")->check(CLI::PositiveNumber);
  app->add_option("--contrast", p.contrast_threshold, "Minimum |DoG| of a kept keypoint");
  app->add_option("--edge-ratio", p.edge_ratio, "Principal curvature ratio bound")->check(CLI::PositiveNumber);
}

void add_pipeline_flags(CLI::App* app, PipelineConfig& cfg) {
  auto& s = cfg.skin;
  app->add_option("--hue-min", s.hue_min, "Skin hue lower bound (degrees, exclusive)");
  app->add_option("--hue-max", s.hue_max, "Skin hue upper bound (degrees, exclusive)");
  app->add_option("--sat-min", s.saturation_min, "Skin saturation lower bound (0..255, exclusive)");
  app->add_option("--sat-max", s.saturation_max, "Skin saturation upper bound (0..255, exclusive)");
  app->add_option("--val-min", s.value_min, "Skin value lower bound (0..255, exclusive)");
  app->add_option("--val-max", s.value_max, "Skin value upper bound (0..255, exclusive)");
  app->add_option("--min-area", cfg.min_area, "Smallest skin region kept, in pixels")->check(CLI::NonNegativeNumber);
  app->add_option("--threshold", cfg.detect.threshold, "Minimum template correlation of a detection");
  app->add_option("--scales", cfg.detect.scales, "Window sides relative to the region's shorter side")
      ->delimiter(',');
  app->add_option("--stride", cfg.detect.stride, "Scan stride in template pixels")->check(CLI::PositiveNumber);
  app->add_option("--nms-overlap", cfg.detect.nms_overlap, "IoU above which weaker boxes are suppressed");
  app->add_option("--slots", cfg.slots, "Keypoints per feature vector")->check(CLI::PositiveNumber);
  app->add_option("--template-side", cfg.template_side, "Template side in pixels")->check(CLI::Range(16, 1024));
  add_sift_flags(app, cfg.sift);
}

void add_train_flags(CLI::App* app, TrainFlags& t) {
  app->add_option("--C", t.cfg.C, "Box constraint")->check(CLI::PositiveNumber);
  app->add_option("--gamma", t.gamma, "RBF width; 0 means 1/feature-dimension");
  app->add_option("--tol", t.cfg.tol, "KKT tolerance")->check(CLI::PositiveNumber);
  app->add_option("--max-passes", t.cfg.max_passes, "Iteration budget in units of 100000 pair updates")
      ->check(CLI::PositiveNumber);
}

std::optional<fs::path> cache_dir_from_env() {
  if (const char* v = std::getenv(kCacheEnv); v != nullptr && *v != '\0') return fs::path(v);
  return std::nullopt;
}

KernelSpec kernel_from_name(const std::string& name, double gamma, std::size_t dim) {
  const auto kind = parse_kernel_kind(name);
  if (!kind) throw Error(Errc::invalid_argument, "unknown kernel '" + name + "'");
  KernelSpec spec{*kind, *kind == KernelKind::rbf ? gamma : 0.0};
  return with_default_gamma(spec, dim);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string tok; std::getline(in, tok, ',');) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

fs::path default_template_path(const fs::path& model) {
  fs::path p = model;
  p += ".tpl.pgm";
  return p;
}

std::vector<RgbImage> load_images(const Dataset& ds) {
  std::vector<RgbImage> out;
  out.reserve(ds.size());
  for (const auto& it : ds.items) out.push_back(load_ppm(it.path));
  return out;
}

void draw_box(RgbImage& img, const FaceBox& b) {
  auto put = [&img](int x, int y) {
    if (img.contains(x, y)) img.set(x, y, 0, 255, 0);
  };
  for (int t = 0; t < 2; ++t) {
    for (int x = b.x; x < b.x + b.w; ++x) {
      put(x, b.y + t);
      put(x, b.y + b.h - 1 - t);
    }
    for (int y = b.y; y < b.y + b.h; ++y) {
      put(b.x + t, y);
      put(b.x + b.w - 1 - t, y);
    }
  }
}

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io_error, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(Errc::io_error, "write failed: " + path.string());
}

// Template saved to disk is 8-bit; reload it so features computed here match
// the ones a later predict run computes from the file.
FaceTemplate persist_template(const FaceTemplate& t, const fs::path& path) {
  save_template(t, path);
  return load_template(path);
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Face gender classification with SIFT features and kernel SVMs", "gsift"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");

  // gen-data
  fs::path gen_out = kDefaultDataDir;
  int gen_n = 60;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic two-class face dataset");
  gen->add_option("--out", gen_out, "Dataset root (male/ and female/ are created)");
  gen->add_option("--n", gen_n, "Images per class")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Generator seed");

  // detect
  fs::path det_in, det_template, det_annotate, det_mask, det_rois;
  PipelineConfig det_cfg;
  auto* det = app.add_subcommand("detect", "Find faces in a PPM image");
  det->add_option("--in", det_in, "Input PPM")->required()->check(CLI::ExistingFile);
  det->add_option("--template", det_template, "Template PGM")->required()->check(CLI::ExistingFile);
  det->add_option("--annotate", det_annotate, "Write a copy of the input with boxes drawn");
  det->add_option("--mask", det_mask, "Write the skin mask as PGM (members 255)");
  det->add_option("--rois", det_rois, "Write skin regions as \"x y w h area\" lines");
  add_pipeline_flags(det, det_cfg);

  // template
  fs::path tpl_faces, tpl_out;
  int tpl_side = kDefaultTemplateSide;
  auto* tpl = app.add_subcommand("template", "Average a directory of face crops into a template");
  tpl->add_option("--faces", tpl_faces, "Directory of .pgm/.ppm face crops")->required()->check(CLI::ExistingDirectory);
  tpl->add_option("--out", tpl_out, "Template PGM (a .txt sidecar is written next to it)")->required();
  tpl->add_option("--side", tpl_side, "Template side in pixels")->check(CLI::Range(16, 1024));

  // extract
  fs::path ext_in, ext_out, ext_render;
  ScaleSpaceParams ext_params;
  auto* ext = app.add_subcommand("extract", "Dump SIFT keypoints of a face image");
  ext->add_option("--in", ext_in, "Input PGM or PPM")->required()->check(CLI::ExistingFile);
  ext->add_option("--out", ext_out, "Keypoint dump")->required();
  ext->add_option("--render", ext_render, "Write a PPM with keypoints drawn as arrows");
  add_sift_flags(ext, ext_params);

  // train
  fs::path tr_data = kDefaultDataDir, tr_out, tr_template;
  std::uint64_t tr_seed = 0;
  unsigned tr_threads = default_threads();
  PipelineConfig tr_cfg;
  TrainFlags tr_flags;
  auto* tr = app.add_subcommand("train", "Train a kernel SVM on a dataset");
  tr->add_option("--data", tr_data, "Dataset root")->check(CLI::ExistingDirectory);
  tr->add_option("--out", tr_out, "Model file")->required();
  tr->add_option("--template", tr_template, "Template PGM; built from the dataset when omitted");
  tr->add_option("--kernel", tr_flags.kernel, "linear, quadratic or rbf");
  tr->add_option("--seed", tr_seed, "Solver seed");
  tr->add_option("--threads", tr_threads, "Worker threads for feature extraction")->check(CLI::PositiveNumber);
  add_train_flags(tr, tr_flags);
  add_pipeline_flags(tr, tr_cfg);

  // predict
  fs::path pr_model, pr_template;
  std::vector<fs::path> pr_images;
  PipelineConfig pr_cfg;
  auto* pr = app.add_subcommand("predict", "Classify images with a trained model");
  pr->add_option("--model", pr_model, "Model file")->required()->check(CLI::ExistingFile);
  pr->add_option("--template", pr_template, "Template PGM (default: <model>.tpl.pgm)");
  pr->add_option("images", pr_images, "PPM images")->required()->check(CLI::ExistingFile);
  add_pipeline_flags(pr, pr_cfg);

  // eval
  fs::path ev_data = kDefaultDataDir, ev_report;
  std::string ev_kernels = "linear,quadratic,rbf";
  EvalConfig ev_cfg;
  unsigned ev_threads = default_threads();
  PipelineConfig ev_pcfg;
  TrainFlags ev_flags;
  auto* ev = app.add_subcommand("eval", "Repeated random-split evaluation of several kernels");
  ev->add_option("--data", ev_data, "Dataset root")->check(CLI::ExistingDirectory);
  ev->add_option("--kernels", ev_kernels, "Comma-separated kernels")->check([](const std::string& s) {
    const auto names = split_list(s);
    if (names.empty()) return std::string("no kernels given");
    for (const auto& n : names) {
      if (!parse_kernel_kind(n)) return "unknown kernel '" + n + "'";
    }
    return std::string();
  });
  ev->add_option("--trials", ev_cfg.n_trials, "Number of random splits")->check(CLI::PositiveNumber);
  ev->add_option("--test-fraction", ev_cfg.test_fraction, "Share of each class held out per trial")
      ->check(CLI::Range(0.0, 1.0));
  ev->add_option("--seed", ev_cfg.seed, "Split seed");
  ev->add_option("--report", ev_report, "Also write the key=value report here");
  ev->add_option("--threads", ev_threads, "Worker threads for feature extraction")->check(CLI::PositiveNumber);
  add_train_flags(ev, ev_flags);
  add_pipeline_flags(ev, ev_pcfg);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    CLI::App* target = &app;
    for (auto* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    CLI::App* target = &app;
    for (auto* sub : app.get_subcommands()) target = sub;
    err << "error: " << e.what() << "\n\n" << target->help();
    return kUsage;
  }

  try {
    if (*gen) {
      const Dataset ds = generate_synthetic_dataset(gen_n, gen_out, gen_seed);
      out << gen_out.string() << ": " << ds.count(kMaleLabel) << " male, " << ds.count(kFemaleLabel)
          << " female\n";
    } else if (*det) {
      const RgbImage img = load_ppm(det_in);
      const FaceTemplate t = load_template(det_template);
      const SkinMask mask = skin_mask(img, det_cfg.skin);
      const auto rois = extract_rois(mask, det_cfg.min_area);
      if (!det_mask.empty()) save_pgm(mask_to_gray(mask), det_mask);
      if (!det_rois.empty()) {
        std::ostringstream lines;
        for (const auto& r : rois) lines << r.x << ' ' << r.y << ' ' << r.w << ' ' << r.h << ' ' << r.area << '\n';
        write_text(det_rois, lines.str());
      }
      const auto boxes = detect_faces(img, t, rois, det_cfg.detect);
      for (const auto& b : boxes) out << b.x << ' ' << b.y << ' ' << b.w << ' ' << b.h << ' ' << fmt9(b.score) << '\n';
      if (!det_annotate.empty()) {
        RgbImage marked = img;
        for (const auto& b : boxes) draw_box(marked, b);
        save_ppm(marked, det_annotate);
      }
    } else if (*tpl) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(tpl_faces)) {
        const auto ext_name = e.path().extension();
        if (e.is_regular_file() && (ext_name == ".pgm" || ext_name == ".ppm")) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      std::vector<GrayImage> faces;
      for (const auto& f : files) faces.push_back(load_gray_any(f));
      save_template(build_template(faces, tpl_side), tpl_out);
      out << tpl_out.string() << ": " << tpl_side << "x" << tpl_side << " from " << faces.size() << " faces\n";
    } else if (*ext) {
      const auto kps = extract(load_gray_any(ext_in), ext_params);
      save_keypoints(kps, ext_out);
      if (!ext_render.empty()) save_ppm(render_keypoints(load_gray_any(ext_in), kps), ext_render);
      out << ext_out.string() << ": " << kps.size() << " keypoints\n";
    } else if (*tr) {
      const Dataset ds = load_dataset(tr_data);
      FaceTemplate t = tr_template.empty() ? template_from_images(load_images(ds), tr_cfg)
                                           : load_template(tr_template);
      t = persist_template(t, default_template_path(tr_out));
      FeatureCache cache(cache_dir_from_env());
      const auto feats = dataset_features(ds, &t, tr_cfg, cache, tr_threads);
      std::vector<LabeledSample> samples;
      samples.reserve(ds.size());
      for (std::size_t i = 0; i < ds.size(); ++i) {
        samples.push_back({std::vector<double>(feats[i].values.begin(), feats[i].values.end()), ds.items[i].label});
      }
      const KernelSpec k = kernel_from_name(tr_flags.kernel, tr_flags.gamma, tr_cfg.slots * kDescriptorSize);
      TrainConfig cfg = tr_flags.cfg;
      cfg.seed = tr_seed;
      const SvmModel model = train(samples, k, cfg);
      save_model(model, tr_out);
      out << tr_out.string() << ": " << kernel_label(k) << ", " << model.support_vectors.size()
          << " support vectors from " << ds.size() << " images\n";
    } else if (*pr) {
      const SvmModel model = load_model(pr_model);
      const FaceTemplate t = load_template(pr_template.empty() ? default_template_path(pr_model) : pr_template);
      for (const auto& path : pr_images) {
        const FaceAnalysis a = analyze_face(load_ppm(path), &t, pr_cfg, path.string());
        const std::vector<double> x(a.features.values.begin(), a.features.values.end());
        const double f = decision_value(model, x);
        out << label_name(f >= 0.0 ? kMaleLabel : kFemaleLabel) << ' ' << fmt9(f) << ' ' << path.string() << '\n';
      }
    } else if (*ev) {
      const Dataset ds = load_dataset(ev_data);
      const FaceTemplate t = template_from_images(load_images(ds), ev_pcfg);
      FeatureCache cache(cache_dir_from_env());
      const auto feats = dataset_features(ds, &t, ev_pcfg, cache, ev_threads);
      std::vector<KernelSpec> kernels;
      for (const auto& name : split_list(ev_kernels)) {
        kernels.push_back(kernel_from_name(name, ev_flags.gamma, ev_pcfg.slots * kDescriptorSize));
      }
      ev_cfg.train = ev_flags.cfg;
      const EvalReport report = run_trials(ds, feats, kernels, ev_cfg);
      out << format_table(report);
      if (!ev_report.empty()) write_text(ev_report, format_kv(report));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace gsift::cli
