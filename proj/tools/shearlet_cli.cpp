/*
 * Copyright (c) The shearlet toolkit authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end. Every subcommand only wires flags to library calls.
// Exit codes: 0 success, 1 usage or file format error, 2 numerical failure.

#include <iostream>

#include "CLI11.hpp"
#include "shearlet/io.hpp"

using namespace shearlet;

namespace {

struct MethodFlags {
  std::string method = "fdst";
  int oversampling = 8, weights = 1, scales = 3;
  double c1 = 1, c2 = 0.4;
  bool undecimated = false;
  std::string weight_file;
  std::vector<CLI::Option*> fdst_only, scale_only, grid_only;
  CLI::Option* undecimated_opt = nullptr;
};

std::map<CLI::App*, std::string> config_files;

void add_config(CLI::App* sub) {
  sub->add_option("--config", config_files[sub], "plain key=value file; flags given on the command line win")
      ->check(CLI::ExistingFile);
}

// config values fill only the options the command line left unset
void apply_config(CLI::App* sub, const std::string& path) {
  for (const auto& item : CLI::ConfigINI().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    auto* opt = sub->get_option_no_throw("--" + item.name);
    if (!opt || item.name == "config") throw std::invalid_argument("unknown config key " + item.name);
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

void add_method_flags(CLI::App* sub, MethodFlags& m, bool with_undecimated) {
  sub->add_option("--method", m.method, "fdst, dsst or dnst")->check(CLI::IsMember({"fdst", "dsst", "dnst"}));
  m.fdst_only = {sub->add_option("--oversampling", m.oversampling, "radial oversampling R (fdst)"),
                 sub->add_option("--weights", m.weights, "weight choice (fdst)")->check(CLI::Range(1, 2)),
                 sub->add_option("--weight-file", m.weight_file, "cached weight table (fdst)")->check(CLI::ExistingFile)};
  m.scale_only = {sub->add_option("--scales", m.scales, "number of scales J (dsst, dnst)")};
  m.grid_only = {sub->add_option("--c1", m.c1, "translation step along the first axis (dsst, dnst)"),
                 sub->add_option("--c2", m.c2, "translation step along the second axis (dsst, dnst)")};
  if (with_undecimated) m.undecimated_opt = sub->add_flag("--undecimated", m.undecimated, "keep every sample (dnst)");
}

bool given(const std::vector<CLI::Option*>& opts) {
  for (auto* o : opts)
    if (o->count() > 0) return true;
  return false;
}

// method flags to file parameters, rejecting flags the method does not use
CoeffParams resolve(const MethodFlags& m, int n) {
  auto reject = [&](bool bad, const std::string& what) {
    if (bad) throw std::invalid_argument(what + " cannot be used with --method " + m.method);
  };
  bool undecimated = m.undecimated_opt && m.undecimated_opt->count() > 0;
  if (m.method == "fdst") {
    reject(given(m.scale_only), "--scales");
    reject(given(m.grid_only), "--c1/--c2");
    reject(undecimated, "--undecimated");
    return {TransformId::fdst, n, m.oversampling, 0, 0, m.weights};
  }
  reject(given(m.fdst_only), "--oversampling/--weights/--weight-file");
  if (m.method == "dsst") {
    reject(undecimated, "--undecimated");
    return {TransformId::dsst, n, m.scales, m.c1, m.c2, 0};
  }
  if (undecimated) {
    reject(given(m.grid_only), "--c1/--c2 with --undecimated");
    return {TransformId::dnst, n, m.scales, 0, 0, 0};
  }
  // the decimated dnst grid must be integer, so both steps default to 1
  auto step = [&](int i, double v) { return m.grid_only[i]->count() ? v : 1.0; };
  return {TransformId::dnst, n, m.scales, step(0, m.c1), step(1, m.c2), 0};
}

int run_transform(const MethodFlags& m, const std::string& in, const std::string& out) {
  auto img = read_any_image(in);
  auto p = resolve(m, img.n);
  auto tr = transform_for(p, m.weight_file);
  auto c = tr->forward(img);
  bool decimated = p.method == TransformId::dnst && p.c1 > 0;
  write_coeffs(out, decimated ? pack_dnst_decimated(p, static_cast<const DnstTransform&>(*tr), c)
                              : pack_coeffs(p, *tr, std::move(c)));
  return 0;
}

int run_inverse(const std::string& in, const std::string& out, std::string mode, double tol, int maxiter,
                const std::string& weight_file, const std::string& reference) {
  auto f = read_coeffs(in);
  if (is_decimated(f)) throw std::invalid_argument("decimated dnst coefficients have no inverse; rerun with --undecimated");
  auto tr = transform_for(f.params, weight_file);
  check_layout(f, *tr);
  bool dnst = f.params.method == TransformId::dnst;
  if (mode.empty()) mode = dnst ? "dual" : "cg";
  if ((mode == "dual") != dnst && mode != "adjoint")
    throw std::invalid_argument("--mode " + mode + " does not apply to " + method_name(f.params.method));
  InverseInfo info;
  auto img = mode == "adjoint" ? real_part(tr->adjoint(f.data)) : tr->inverse(f.data, tol, maxiter, &info);
  write_image(out, img);
  if (!reference.empty()) std::cout << "relative error " << rel_diff(img.data, read_any_image(reference).data) << "\n";
  if (mode == "cg" && !info.converged) {
    std::cerr << "cg stopped after " << info.iterations << " iterations at residual " << info.rel_residual << "\n";
    return 2;
  }
  return 0;
}

int run_measure(MeasureConfig cfg, const std::string& id, const std::string& out_dir) {
  std::vector<int> ids;
  if (id == "all") {
    for (int i = 1; i <= 8; ++i)
      if (cfg.method == "fdst" || (i != 1 && i != 2 && i != 5)) ids.push_back(i);
  } else {
    ids.push_back(std::stoi(id));
  }
  for (int i : ids) {
    auto rep = shearlet::run_measure(i, cfg);
    write_report(rep, out_dir);
    std::cout << "measure " << i << " (" << rep.title << ", " << rep.transform << ")";
    for (const auto& [name, value] : rep.scalars) std::cout << " " << name << "=" << value;
    std::cout << "\n";
  }
  return 0;
}

int run_info(const std::string& in) {
  auto f = read_coeffs(in);
  const auto& p = f.params;
  std::cout << "method " << method_name(p.method) << "\nN " << p.n << "\n"
            << (p.method == TransformId::fdst ? "R " : "J ") << p.r_or_j << "\nc1 " << p.c1 << "\nc2 " << p.c2
            << "\nweight choice " << p.weight_choice << "\nbands " << f.bands.size() << "\ncoefficients "
            << f.data.size() << "\n# cone j k rows cols\n";
  for (const auto& b : f.bands) std::cout << b.cone << " " << b.j << " " << b.k << " " << b.rows << " " << b.cols << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digital shearlet transforms and their benchmark measures"};
  app.require_subcommand(1);
  std::string in, out, mode, reference, id = "all", out_dir = "reports";
  double tol = 1e-6;
  int maxiter = 500, cone = 0, scale = 0, shear = 0;
  MethodFlags tf, sf;
  MeasureConfig cfg;
  int wn = 0, wr = 8, wchoice = 1;

  auto* transform = app.add_subcommand("transform", "image file to coefficient file");
  add_config(transform);
  transform->add_option("--input", in, "SHIM or binary PGM image")->required()->check(CLI::ExistingFile);
  transform->add_option("--output", out, "coefficient file")->required();
  add_method_flags(transform, tf, true);

  auto* inverse = app.add_subcommand("inverse", "coefficient file back to an image");
  add_config(inverse);
  inverse->add_option("--input", in, "coefficient file")->required()->check(CLI::ExistingFile);
  inverse->add_option("--output", out, "image file")->required();
  inverse->add_option("--mode", mode, "adjoint, cg (fdst, dsst) or dual (dnst)")
      ->check(CLI::IsMember({"adjoint", "cg", "dual"}));
  inverse->add_option("--tol", tol, "relative residual for cg");
  inverse->add_option("--maxiter", maxiter, "iteration cap for cg");
  inverse->add_option("--weight-file", tf.weight_file, "cached weight table (fdst)")->check(CLI::ExistingFile);
  inverse->add_option("--reference", reference, "image to report the relative error against")
      ->check(CLI::ExistingFile);

  auto* weights = app.add_subcommand("weights", "fit density compensation weights and cache them");
  add_config(weights);
  weights->add_option("--n", wn, "image side N")->required();
  weights->add_option("--r", wr, "radial oversampling R");
  weights->add_option("--choice", wchoice, "weight basis choice")->check(CLI::Range(1, 2));
  weights->add_option("--out", out, "weight file")->required();

  auto* measure = app.add_subcommand("measure", "run benchmark measures and write reports");
  add_config(measure);
  measure->add_option("--id", id, "1..8 or all");
  measure->add_option("--method", cfg.method, "fdst, dsst, dnst or haar")
      ->check(CLI::IsMember({"fdst", "dsst", "dnst", "haar"}));
  measure->add_option("--size", cfg.size, "image side N");
  measure->add_option("--seed", cfg.seed, "seed for test images");
  measure->add_option("--out-dir", out_dir, "directory for csv and json reports");
  measure->add_option("--trials", cfg.trials, "random trials");
  measure->add_option("--oversampling", cfg.oversampling, "radial oversampling R (fdst)");
  measure->add_option("--weights", cfg.weights, "weight choice (fdst)")->check(CLI::Range(1, 2));
  measure->add_option("--scales", cfg.scales, "number of scales J (dsst, dnst, haar)");
  measure->add_option("--c1", cfg.c1, "translation step, first axis (dsst)");
  measure->add_option("--c2", cfg.c2, "translation step, second axis (dsst)");
  measure->add_option("--tol", cfg.tol, "cg tolerance");
  measure->add_option("--maxiter", cfg.maxiter, "cg iteration cap");
  measure->add_option("--shear", cfg.shear, "shear for the invariance measure");
  measure->add_option("--repeats", cfg.repeats, "timing repeats");
  measure->add_option("--exponents", cfg.exponents, "log2 sizes for the speed measure");

  auto* element = app.add_subcommand("shearlet-image", "write the real part of one analyzing element");
  add_config(element);
  element->add_option("--size", wn, "image side N")->required();
  element->add_option("--cone", cone, "cone: 11, 12, 21, 22 (fdst) or 1, 2")->required();
  element->add_option("--j", scale, "scale");
  element->add_option("--k", shear, "shear");
  element->add_option("--out", out, "image file")->required();
  add_method_flags(element, sf, false);

  auto* info = app.add_subcommand("info", "print the header and band directory of a coefficient file");
  info->add_option("--input", in, "coefficient file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    for (auto& [sub, path] : config_files)
      if (*sub && !path.empty()) apply_config(sub, path);
    if (*transform) return run_transform(tf, in, out);
    if (*inverse) return run_inverse(in, out, mode, tol, maxiter, tf.weight_file, reference);
    if (*weights) {
      write_weights(out, fit_weights(wchoice, PPGridParams(wn, wr)));
      return 0;
    }
    if (*measure) return run_measure(cfg, id, out_dir);
    if (*element) {
      write_image(out, real_part(analyzing_element(*transform_for(resolve(sf, wn), sf.weight_file), cone, scale, shear)));
      return 0;
    }
    return run_info(in);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
