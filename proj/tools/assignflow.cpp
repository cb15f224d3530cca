#include <CLI11.hpp>

#include "assignflow/cli.hpp"

namespace {

void add_common(CLI::App* app, assignflow::cli::CommonOptions& o) {
  app->add_option("--rho", o.rho, "Distance scaling (selectivity)")->capture_default_str();
  app->add_option("--window", o.window, "Averaging window side length (odd); radius = (side - 1) / 2")
      ->capture_default_str();
  app->add_option("--entropy-tol", o.entropy_tol, "Stop once the average entropy falls to this value")
      ->capture_default_str();
  app->add_option("--max-iter", o.max_iterations, "Iteration cap (exit code 2 when reached)")->capture_default_str();
  app->add_option("--mean", o.mean, "Similarity mean: approx or exact")
      ->check(CLI::IsMember({"approx", "exact"}))
      ->capture_default_str();
  app->add_option("--seed", o.seed, "Seed for generated scenarios")->capture_default_str();
  app->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = assignflow::cli;
  CLI::App app{"Image labeling by assignment flows on the Fisher-Rao manifold"};
  app.require_subcommand(1);

  cli::LabelOptions label;
  auto* label_cmd = app.add_subcommand("label", "Label an image with a set of prior feature vectors");
  add_common(label_cmd, label.common);
  label_cmd->add_option("image", label.image, "Input PPM/PGM")->required();
  label_cmd->add_option("priors", label.priors, "Prior CSV, one feature vector per line")->required();
  label_cmd->add_option("--metric", label.metric, "l1 (scaled L1 on colors) or vertex (exact color match)")
      ->check(CLI::IsMember({"l1", "vertex"}))
      ->capture_default_str();

  cli::InpaintOptions inpaint;
  auto* inpaint_cmd = app.add_subcommand("inpaint", "Label an image and fill pixels marked missing in a mask");
  add_common(inpaint_cmd, inpaint.label.common);
  inpaint_cmd->add_option("image", inpaint.label.image, "Input PPM/PGM")->required();
  inpaint_cmd->add_option("priors", inpaint.label.priors, "Prior CSV")->required();
  inpaint_cmd->add_option("mask", inpaint.mask, "PGM mask, 0 marks missing pixels")->required();
  inpaint_cmd->add_option("--metric", inpaint.label.metric, "l1 or vertex")
      ->check(CLI::IsMember({"l1", "vertex"}))
      ->capture_default_str();

  cli::PatchLabelOptions patch;
  std::size_t patch_side = 0;
  auto* patch_cmd = app.add_subcommand("patch-label", "Label with a patch dictionary and split f = u + v");
  add_common(patch_cmd, patch.common);
  patch_cmd->add_option("image", patch.image, "Input PGM")->required();
  patch_cmd->add_option("dictionary", patch.dictionary, "Patch dictionary JSON")->required();
  auto* patch_opt = patch_cmd->add_option("--patch", patch_side, "Patch side length (odd); checked against the dictionary");

  cli::RectanglesOptions rect;
  auto* rect_cmd = app.add_subcommand("rectangles", "Select non-overlapping rectangles covering a point set");
  rect.common.rho = rect.scenario.rho;
  add_common(rect_cmd, rect.common);
  auto& sp = rect.scenario;
  rect_cmd->add_option("--lambda", sp.lambda, "Overlap penalty")->capture_default_str();
  rect_cmd->add_option("--sigma", sp.sigma, "Cost of the none label")->capture_default_str();
  rect_cmd->add_option("--grid", sp.grid_height, "Centroid grid side (square)")->capture_default_str();
  rect_cmd->add_option("--orientations", sp.orientations, "Orientations per centroid")->capture_default_str();
  rect_cmd->add_option("--foreground", sp.foreground, "Foreground rectangles")->capture_default_str();
  rect_cmd->add_option("--background", sp.background, "Background rectangles")->capture_default_str();
  rect_cmd->add_option("--foreground-density", sp.foreground_density, "Points per unit area, foreground")
      ->capture_default_str();
  rect_cmd->add_option("--background-density", sp.background_density, "Points per unit area, background")
      ->capture_default_str();

  cli::SelfAssignOptions self;
  auto* self_cmd = app.add_subcommand("selfassign", "Assign an image to a regular color cube");
  add_common(self_cmd, self.common);
  self_cmd->add_option("image", self.image, "Input PPM")->required();
  self_cmd->add_option("--steps", self.steps, "Grid points per color axis")->capture_default_str();

  cli::GenerateOptions gen;
  auto* gen_cmd = app.add_subcommand("generate", "Write the input files of a bundled scenario");
  gen_cmd->add_option("preset", gen.preset, "vertex31, triple-point, noise, roof or fingerprint")->required();
  gen_cmd->add_option("--out-dir", gen.out_dir, "Output directory")->capture_default_str();
  std::uint64_t gen_seed = 0;
  auto* gen_seed_opt = gen_cmd->add_option("--seed", gen_seed, "Seed (each preset has its own default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; every usage error maps to the error code 1.
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*label_cmd) return cli::cmd_label(label);
  if (*inpaint_cmd) return cli::cmd_inpaint(inpaint);
  if (*patch_cmd) {
    if (*patch_opt) patch.patch = patch_side;
    return cli::cmd_patch_label(patch);
  }
  if (*rect_cmd) {
    sp.grid_width = sp.grid_height;
    return cli::cmd_rectangles(rect);
  }
  if (*self_cmd) return cli::cmd_selfassign(self);
  if (*gen_cmd) {
    if (*gen_seed_opt) gen.seed = gen_seed;
    return cli::cmd_generate(gen);
  }
  return 1;
}
