#pragma once

// Command implementations behind the assignflow executable. Each command
// writes its artifacts into an output directory and returns the process exit
// code: 0 on convergence, 2 when the iteration cap was hit, 1 on bad input.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "assignflow/features.hpp"
#include "assignflow/flow.hpp"
#include "assignflow/mapping.hpp"
#include "assignflow/pnm.hpp"
#include "assignflow/presets.hpp"
#include "assignflow/prior_io.hpp"
#include "assignflow/rectangles.hpp"

namespace assignflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonOptions {
  double rho = 0.1;
  std::size_t window = 3;  // odd side length of the averaging window
  double entropy_tol = 1e-3;
  int max_iterations = 1000;
  std::string mean = "approx";  // approx | exact
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

struct LabelOptions {
  CommonOptions common;
  std::string image;
  std::string priors;
  std::string metric = "l1";  // l1 | vertex
};

struct InpaintOptions {
  LabelOptions label;
  std::string mask;
};

struct PatchLabelOptions {
  CommonOptions common;
  std::string image;
  std::string dictionary;
  std::optional<std::size_t> patch;  // odd side length; must match the dictionary
};

struct RectanglesOptions {
  CommonOptions common;
  rectangles::ScenarioParams scenario;
};

struct SelfAssignOptions {
  CommonOptions common;
  std::string image;
  int steps = 6;
};

struct GenerateOptions {
  std::string preset;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // preset default when unset
};

namespace detail {

inline FlowConfig flow_config(const CommonOptions& o) {
  FlowConfig cfg;
  cfg.entropy_tol = o.entropy_tol;
  cfg.max_iterations = o.max_iterations;
  if (o.mean == "approx") cfg.mean_mode = MeanMode::approximate;
  else if (o.mean == "exact") cfg.mean_mode = MeanMode::exact;
  else throw DomainError("--mean must be 'approx' or 'exact'");
  return cfg;
}

inline json common_json(const CommonOptions& o) {
  return {{"rho", o.rho},
          {"window", o.window},
          {"entropy_tol", o.entropy_tol},
          {"max_iter", o.max_iterations},
          {"mean", o.mean},
          {"seed", o.seed}};
}

inline void write_trace(const fs::path& path, const std::vector<TraceEntry>& trace) {
  std::ofstream out(path);
  out << "iter,entropy,objective\n";
  out.precision(17);
  for (const auto& e : trace) out << e.iteration << ',' << e.entropy << ',' << e.objective << '\n';
}

inline void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

inline json result_json(const FlowResult& r, std::size_t labels) {
  const auto& last = r.trace.back();
  return {{"iterations", r.iterations},
          {"final_entropy", last.entropy},
          {"final_objective", last.objective},
          {"converged", r.converged},
          {"labels", labels}};
}

inline int exit_code(const FlowResult& r) { return r.converged ? 0 : 2; }

inline pnm::Image render(std::size_t h, std::size_t w, const Matrix& u) {
  return pnm::from_rows(h, w, u.cols(), u.data());
}

/// Replaces each pixel by the one-hot code of the prior color it matches
/// exactly at 8-bit precision (all zeros when none matches).
inline FeatureImage vertex_encode(const FeatureImage& img, const PriorSet& priors) {
  FeatureImage out(img.height, img.width, priors.size());
  out.missing = img.missing;
  for (std::size_t i = 0; i < img.pixels(); ++i) {
    const auto px = img.pixel(i);
    for (std::size_t k = 0; k < priors.size(); ++k) {
      bool same = priors.items[k].size() == px.size();
      for (std::size_t c = 0; same && c < px.size(); ++c)
        same = pnm::to_byte(px[c]) == pnm::to_byte(priors.items[k][c]);
      if (same) {
        out.values[i * priors.size() + k] = 1.0;
        break;
      }
    }
  }
  return out;
}

struct LabelRun {
  FlowResult result;
  FeatureImage image;
  PriorSet priors;
};

inline LabelRun run_vector_labeling(const LabelOptions& o, const std::vector<std::uint8_t>* missing) {
  const auto img8 = pnm::read_file(o.image);
  LabelRun run;
  run.image = pnm::to_features(img8);
  if (missing) {
    if (missing->size() != run.image.pixels()) throw FormatError("mask and image sizes differ");
    run.image.missing = *missing;
  }
  run.priors = io::read_prior_csv_file(o.priors);
  DistanceMatrix D;
  if (o.metric == "l1") {
    if (run.priors.dimension() != run.image.channels)
      throw FormatError("prior dimension does not match image channels");
    D = build_distance_matrix(run.image, run.priors, scaled_l1_distance, o.common.rho);
  } else if (o.metric == "vertex") {
    PriorSet codes;
    for (std::size_t k = 0; k < run.priors.size(); ++k) codes.items.push_back(presets::one_hot(k, run.priors.size()));
    D = build_distance_matrix(vertex_encode(run.image, run.priors), codes, half_l1_distance, o.common.rho);
  } else {
    throw DomainError("--metric must be 'l1' or 'vertex'");
  }
  const GridGraph g(run.image.height, run.image.width, radius_from_side(o.common.window));
  run.result = run_flow(D, g, flow_config(o.common));
  return run;
}

inline int finish_vector_labeling(const std::string& command, const LabelOptions& o, const LabelRun& run,
                                  json inputs) {
  const fs::path dir(o.common.out_dir);
  fs::create_directories(dir);
  const auto& W = run.result.assignment;
  const auto u = vector_assignment(W, run.priors);
  const auto lab = labels(W);
  const std::string assigned = u.cols() == 3 ? "assigned.ppm" : "assigned.pgm";
  if (u.cols() == 1 || u.cols() == 3) pnm::write_file((dir / assigned).string(), render(run.image.height, run.image.width, u));
  pnm::write_file((dir / "labels.pgm").string(),
                  pnm::label_image(run.image.height, run.image.width, lab, run.priors.size()));
  write_trace(dir / "trace.csv", run.result.trace);
  json params = common_json(o.common);
  params["metric"] = o.metric;
  json outputs = {{"labels", "labels.pgm"}, {"trace", "trace.csv"}};
  if (u.cols() == 1 || u.cols() == 3) outputs["assigned"] = assigned;
  write_json(dir / "manifest.json", {{"command", command},
                                     {"parameters", params},
                                     {"inputs", inputs},
                                     {"outputs", outputs},
                                     {"result", result_json(run.result, run.priors.size())}});
  return exit_code(run.result);
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace detail

inline int cmd_label(const LabelOptions& o) {
  return detail::guarded([&] {
    const auto run = detail::run_vector_labeling(o, nullptr);
    return detail::finish_vector_labeling("label", o, run, {{"image", o.image}, {"priors", o.priors}});
  });
}

inline int cmd_inpaint(const InpaintOptions& o) {
  return detail::guarded([&] {
    const auto missing = pnm::mask_from_image(pnm::read_file(o.mask));
    const auto run = detail::run_vector_labeling(o.label, &missing);
    return detail::finish_vector_labeling("inpaint", o.label, run,
                                          {{"image", o.label.image}, {"priors", o.label.priors}, {"mask", o.mask}});
  });
}

inline int cmd_patch_label(const PatchLabelOptions& o) {
  return detail::guarded([&] {
    const auto dict = io::read_patch_dictionary_file(o.dictionary);
    const auto img = pnm::to_features(pnm::read_file(o.image));
    if (o.patch && radius_from_side(*o.patch) != static_cast<std::size_t>(dict.priors.patch_radius))
      throw FormatError("--patch does not match the dictionary patch size");
    if (dict.priors.channels != img.channels) throw FormatError("dictionary channels do not match the image");
    const auto pd = build_patch_distance_matrix(img, dict.priors, dict.options, o.common.rho);
    const GridGraph g(img.height, img.width, radius_from_side(o.common.window));
    const auto result = run_flow(pd.D, g, detail::flow_config(o.common));

    const std::size_t labels_n = dict.priors.class_count();
    const auto support = gaussian_patch_weights(dict.priors.patch_radius);
    // Effective (adapted) prior patch of each (pixel, label), cached once.
    std::vector<std::vector<double>> eff(img.pixels() * labels_n);
    for (std::size_t j = 0; j < img.pixels(); ++j) {
      const auto p = extract_patch(img, j, dict.priors.patch_radius);
      for (std::size_t c = 0; c < labels_n; ++c)
        eff[j * labels_n + c] = effective_prior(p, dict.priors.items[pd.representative[j * labels_n + c]], dict.options);
    }
    const auto u = patch_assignment(result.assignment, g, support, img.channels, [&](std::size_t j, std::size_t c) {
      return std::span<const double>(eff[j * labels_n + c]);
    });
    const auto v = decompose(img, u);

    const fs::path dir(o.common.out_dir);
    fs::create_directories(dir);
    pnm::write_file((dir / "assigned.pgm").string(), detail::render(img.height, img.width, u));
    Matrix shown = v;
    for (double& x : shown.data()) x = 0.5 * (x + 1.0);
    pnm::write_file((dir / "residual.pgm").string(), detail::render(img.height, img.width, shown));
    pnm::write_file((dir / "labels.pgm").string(),
                    pnm::label_image(img.height, img.width, labels(result.assignment), labels_n));
    detail::write_trace(dir / "trace.csv", result.trace);
    json params = detail::common_json(o.common);
    params["patch"] = 2 * dict.priors.patch_radius + 1;
    params["adaptation"] = io::patch_dictionary_json(dict)["adaptation"];
    detail::write_json(dir / "manifest.json",
                       {{"command", "patch-label"},
                        {"parameters", params},
                        {"inputs", {{"image", o.image}, {"dictionary", o.dictionary}}},
                        {"outputs",
                         {{"assigned", "assigned.pgm"},
                          {"residual", "residual.pgm"},
                          {"labels", "labels.pgm"},
                          {"trace", "trace.csv"}}},
                        {"result", detail::result_json(result, labels_n)}});
    return detail::exit_code(result);
  });
}

namespace detail {

inline json rect_json(const rectangles::RectangleScenario& scn, rectangles::Candidate c) {
  const auto r = scn.rectangle(c);
  json corners = json::array();
  for (const auto& p : r.corners()) corners.push_back({p.x, p.y});
  return {{"position", c.position},
          {"orientation", c.orientation},
          {"center", {r.center.x, r.center.y}},
          {"angle", r.angle},
          {"corners", corners}};
}

inline std::string svg_overlay(const rectangles::RectangleScenario& scn,
                               const std::vector<rectangles::Candidate>& chosen) {
  const double scale = 40.0;
  const auto& p = scn.params;
  std::ostringstream s;
  s.precision(6);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << p.grid_width * p.spacing * scale << "\" height=\""
    << p.grid_height * p.spacing * scale << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& pt : scn.points)
    s << "<circle cx=\"" << pt.x * scale << "\" cy=\"" << pt.y * scale << "\" r=\"1.2\" fill=\"#888\"/>\n";
  auto poly = [&](rectangles::Candidate c, const char* style) {
    s << "<polygon points=\"";
    for (const auto& q : scn.rectangle(c).corners()) s << q.x * scale << ',' << q.y * scale << ' ';
    s << "\" " << style << "/>\n";
  };
  for (const auto& c : scn.foreground) poly(c, "fill=\"none\" stroke=\"#2a6\" stroke-dasharray=\"4 3\"");
  for (const auto& c : chosen) poly(c, "fill=\"none\" stroke=\"black\" stroke-width=\"2\"");
  s << "</svg>\n";
  return s.str();
}

}  // namespace detail

inline int cmd_rectangles(const RectanglesOptions& o) {
  return detail::guarded([&] {
    auto params = o.scenario;
    params.rho = o.common.rho;
    params.seed = o.common.seed;
    const auto scn = rectangles::generate_rectangle_scenario(params);
    FlowConfig cfg = detail::flow_config(o.common);
    cfg.bypass_averaging = true;
    const auto result = run_flow(
        [&scn](const AssignmentMatrix& W) { return rectangles::rectangle_adaptive_distance(scn, W); },
        scn.labels(), scn.grid(), cfg);
    const auto lab = labels(result.assignment);
    const auto chosen = rectangles::selected(scn, lab);
    const std::size_t clashes = rectangles::intersecting_pairs(scn, lab);

    const fs::path dir(o.common.out_dir);
    fs::create_directories(dir);
    json sel = json::array(), fg = json::array();
    for (const auto& c : chosen) sel.push_back(detail::rect_json(scn, c));
    for (const auto& c : scn.foreground) fg.push_back(detail::rect_json(scn, c));
    detail::write_json(dir / "rectangles.json", {{"selected", sel},
                                                 {"foreground_truth", fg},
                                                 {"intersecting_pairs", clashes},
                                                 {"points", scn.points.size()}});
    std::ofstream(dir / "overlay.svg") << detail::svg_overlay(scn, chosen);
    detail::write_trace(dir / "trace.csv", result.trace);
    json params_json = detail::common_json(o.common);
    params_json.erase("window");
    params_json["lambda"] = params.lambda;
    params_json["sigma"] = params.sigma;
    params_json["grid"] = {params.grid_height, params.grid_width};
    params_json["orientations"] = params.orientations;
    params_json["foreground"] = params.foreground;
    params_json["background"] = params.background;
    params_json["foreground_density"] = params.foreground_density;
    params_json["background_density"] = params.background_density;
    detail::write_json(dir / "manifest.json",
                       {{"command", "rectangles"},
                        {"parameters", params_json},
                        {"inputs", json::object()},
                        {"outputs", {{"rectangles", "rectangles.json"}, {"overlay", "overlay.svg"}, {"trace", "trace.csv"}}},
                        {"result", detail::result_json(result, scn.labels())}});
    std::cout << "selected " << chosen.size() << " rectangles, intersecting pairs: " << clashes << '\n';
    return detail::exit_code(result);
  });
}

/// Relative frequency of each prior among the hard labels.
inline std::vector<double> assignment_frequencies(const std::vector<std::size_t>& lab, std::size_t n) {
  std::vector<double> f(n, 0.0);
  for (std::size_t k : lab) f[k] += 1.0;
  for (double& x : f) x /= static_cast<double>(lab.size());
  return f;
}

inline int cmd_selfassign(const SelfAssignOptions& o) {
  return detail::guarded([&] {
    const auto img = pnm::to_features(pnm::read_file(o.image));
    const auto priors = color_cube_priors(o.steps);
    if (img.channels != 3) throw FormatError("selfassign expects an RGB image");
    const auto D = build_distance_matrix(img, priors, scaled_l1_distance, o.common.rho);
    const GridGraph g(img.height, img.width, radius_from_side(o.common.window));
    const auto result = run_flow(D, g, detail::flow_config(o.common));
    const auto lab = labels(result.assignment);
    const auto freq = assignment_frequencies(lab, priors.size());

    const fs::path dir(o.common.out_dir);
    fs::create_directories(dir);
    pnm::write_file((dir / "assigned.ppm").string(),
                    detail::render(img.height, img.width, vector_assignment(result.assignment, priors)));
    pnm::write_file((dir / "labels.pgm").string(), pnm::label_image(img.height, img.width, lab, priors.size()));
    {
      std::ofstream h(dir / "histogram.csv");
      h.precision(17);
      h << "prior,r,g,b,frequency\n";
      for (std::size_t k = 0; k < priors.size(); ++k)
        h << k << ',' << priors.items[k][0] << ',' << priors.items[k][1] << ',' << priors.items[k][2] << ','
          << freq[k] << '\n';
    }
    detail::write_trace(dir / "trace.csv", result.trace);
    json params = detail::common_json(o.common);
    params["steps"] = o.steps;
    detail::write_json(dir / "manifest.json",
                       {{"command", "selfassign"},
                        {"parameters", params},
                        {"inputs", {{"image", o.image}}},
                        {"outputs",
                         {{"assigned", "assigned.ppm"},
                          {"labels", "labels.pgm"},
                          {"histogram", "histogram.csv"},
                          {"trace", "trace.csv"}}},
                        {"result", detail::result_json(result, priors.size())}});
    return detail::exit_code(result);
  });
}

/// Writes the input files of a bundled scenario.
inline int cmd_generate(const GenerateOptions& o) {
  return detail::guarded([&] {
    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    auto write_priors = [&](const PriorSet& p, const std::string& name) {
      std::ofstream out(dir / name);
      io::write_prior_csv(out, p);
    };
    if (o.preset == "vertex31") {
      const auto inst = presets::vertex_label_instance(64, 64, 31, 0.2, o.seed.value_or(7));
      const auto pal = presets::label_palette(inst.labels);
      pnm::Image noisy{inst.width, inst.height, 3, {}}, truth = noisy;
      for (std::size_t i = 0; i < inst.observed.size(); ++i) {
        noisy.data.insert(noisy.data.end(), pal[inst.observed[i]].begin(), pal[inst.observed[i]].end());
        truth.data.insert(truth.data.end(), pal[inst.truth[i]].begin(), pal[inst.truth[i]].end());
      }
      pnm::write_file((dir / "vertex31.ppm").string(), noisy);
      pnm::write_file((dir / "vertex31_truth.ppm").string(), truth);
      PriorSet colors;
      for (const auto& c : pal) colors.items.push_back({c[0] / 255.0, c[1] / 255.0, c[2] / 255.0});
      write_priors(colors, "vertex31_priors.csv");
    } else if (o.preset == "triple-point") {
      const auto inst = presets::triple_point();
      std::vector<double> vals = inst.image.values;
      pnm::write_file((dir / "triple_point.ppm").string(),
                      pnm::from_rows(inst.image.height, inst.image.width, 3, vals));
      pnm::Image mask{inst.image.width, inst.image.height, 1, {}};
      for (auto m : inst.image.missing) mask.data.push_back(m ? 0 : 255);
      pnm::write_file((dir / "triple_point_mask.pgm").string(), mask);
      write_priors(inst.priors, "triple_point_priors.csv");
    } else if (o.preset == "noise") {
      const auto img = presets::uniform_noise(64, 64, o.seed.value_or(3));
      pnm::write_file((dir / "noise.ppm").string(), pnm::from_rows(img.height, img.width, 3, img.values));
    } else if (o.preset == "roof" || o.preset == "fingerprint") {
      const auto inst = o.preset == "roof" ? presets::roof(40, 40, 2, o.seed.value_or(11))
                                            : presets::fingerprint(48, 48, 1, o.seed.value_or(5));
      pnm::write_file((dir / (o.preset + ".pgm")).string(),
                      pnm::from_rows(inst.image.height, inst.image.width, 1, inst.image.values));
      io::PatchDictionary d{inst.priors, inst.options, inst.class_names};
      detail::write_json(dir / (o.preset + "_dictionary.json"), io::patch_dictionary_json(d));
    } else {
      throw DomainError("unknown preset '" + o.preset + "' (vertex31, triple-point, noise, roof, fingerprint)");
    }
    return 0;
  });
}

}  // namespace assignflow::cli
