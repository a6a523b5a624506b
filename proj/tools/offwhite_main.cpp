#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "offwhite/classify.hpp"
#include "offwhite/serialize.hpp"
#include "offwhite/simulate.hpp"

namespace {

using namespace offwhite;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInconclusive = 2;

struct CommonOpts {
  std::string spec_path;
  std::string out_path;
  double lambda0 = 0.0;
  int ladder_steps = 0;
  double tau_rel = 0.0;
  double fit_quality = 0.0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_spec = true) {
  auto* s = cmd->add_option("--spec", o.spec_path, "density spec JSON");
  if (needs_spec) s->required();
  cmd->add_option("--out", o.out_path, "write the JSON report here (atomic)");
  cmd->add_option("--lambda0", o.lambda0, "first ladder cutoff");
  cmd->add_option("--ladder-steps", o.ladder_steps, "ladder rungs");
  cmd->add_option("--tau-rel", o.tau_rel, "trailing relative-increment threshold");
  cmd->add_option("--fit-quality", o.fit_quality, "growth-fit quality floor");
}

ClassifyParams make_params(const CommonOpts& o) {
  ClassifyParams p;
  if (o.lambda0 > 0.0) {
    p.moderation.lambda0 = o.lambda0;
    p.sobolev.inner.lambda0 = o.lambda0;
  }
  if (o.ladder_steps > 0) {
    p.moderation.steps = o.ladder_steps;
    p.sobolev.inner.steps = o.ladder_steps;
  }
  if (o.tau_rel > 0.0) {
    p.moderation.tau_rel = o.tau_rel;
    p.sobolev.inner.tau_rel = o.tau_rel;
    p.sobolev.outer.tau_rel = o.tau_rel;
    p.sobolev.circle.tau_rel = o.tau_rel;
  }
  if (o.fit_quality > 0.0) {
    p.moderation.q_min = o.fit_quality;
    p.sobolev.inner.q_min = o.fit_quality;
    p.sobolev.outer.q_min = o.fit_quality;
    p.sobolev.circle.q_min = o.fit_quality;
  }
  return p;
}

void emit(const CommonOpts& o, const ordered_json& j) {
  const std::string text = dump_deterministic(j);
  if (o.out_path.empty()) {
    std::cout << text;
  } else {
    write_atomic(o.out_path, text);
  }
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(std::stoi(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(std::stod(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

int run_validate(const CommonOpts& o) {
  Density d(DensitySpec::from_file(o.spec_path));
  ValidationReport r = validate(d);
  ordered_json j;
  j["spec"] = d.spec().to_json();
  j["validation"] = r.to_json();
  emit(o, j);
  return r.passed() ? kExitOk : kExitInconclusive;
}

int run_functional(const CommonOpts& o, const std::string& which) {
  Density d(DensitySpec::from_file(o.spec_path));
  ClassifyParams params = make_params(o);
  FunctionalResult res;
  if (which == "doubling") {
    res = doubling_functional(make_view(d), params.sobolev);
  } else if (which == "derivative") {
    res = derivative_functional(make_view(d), params.sobolev);
  } else if (which == "line-sobolev") {
    res = line_sobolev(make_view(d), params.sobolev);
  } else if (which == "circle-double" || which == "circle-fourier") {
    ModerationReport mod = moderation_order(d, params.m_max, params.moderation);
    if (mod.status != Finiteness::Finite) {
      ordered_json j;
      j["error"] = "moderation order undetermined; circle functionals need it";
      j["moderation"] = to_json(mod);
      emit(o, j);
      return kExitInconclusive;
    }
    CirclePhi phi = log_remainder_phi(d, mod.order, {});
    res = which == "circle-double" ? circle_double(phi, params.sobolev)
                                   : circle_fourier(phi, params.sobolev);
  } else {
    std::cerr << "unknown functional: " << which << "\n";
    return kExitError;
  }
  ordered_json j;
  j["spec"] = d.spec().to_json();
  j["result"] = to_json(res);
  emit(o, j);
  return res.probe.verdict == Finiteness::Inconclusive ? kExitInconclusive
                                                       : kExitOk;
}

int run_classify(const CommonOpts& o, const std::string& zeros_csv,
                 bool cross) {
  Density d(DensitySpec::from_file(o.spec_path));
  std::vector<double> zeros;
  if (!zeros_csv.empty()) zeros = parse_double_list(zeros_csv);
  Verdict v = classify(d, zeros, make_params(o));
  ordered_json j;
  j["spec"] = d.spec().to_json();
  j["verdict"] = to_json(v);
  if (cross && v.moderation == 1 &&
      (v.outcome == Outcome::OffWhite || v.outcome == Outcome::NotOffWhite)) {
    j["cross_check"] = to_json(verdict_cross_check(d, v));
  }
  emit(o, j);
  if (v.outcome == Outcome::Inconclusive || v.outcome == Outcome::Unsupported)
    return kExitInconclusive;
  return kExitOk;
}

int run_paf(const CommonOpts& o, const std::string& ks_csv, int N,
            const std::string& csv_path) {
  Density d(DensitySpec::from_file(o.spec_path));
  ClassifyParams params = make_params(o);
  ModerationReport mod = moderation_order(d, params.m_max, params.moderation);
  if (mod.status != Finiteness::Finite) {
    ordered_json j;
    j["error"] = "moderation order undetermined";
    j["moderation"] = to_json(mod);
    emit(o, j);
    return kExitInconclusive;
  }
  CircleDensity mu = pushforward_density(d, mod.order);
  SweepReport sweep = hs_sweep(mu.pole_removed(), parse_int_list(ks_csv), N);
  ordered_json j;
  j["spec"] = d.spec().to_json();
  j["moderation_order"] = mod.order;
  j["pair_N"] = N;
  j["sweep"] = to_json(sweep);
  if (!sweep.sections.empty())
    j["last_section"] = to_json(sweep.sections.back(), true);
  emit(o, j);
  if (!csv_path.empty()) write_atomic(csv_path, sweep_csv(sweep));
  return kExitOk;
}

int run_shift_check(const CommonOpts& o, double z0, const std::string& ks_csv) {
  Density d(DensitySpec::from_file(o.spec_path));
  ClassifyParams params = make_params(o);
  ModerationReport mod = moderation_order(d, params.m_max, params.moderation);
  if (mod.status != Finiteness::Finite) return kExitInconclusive;
  CircleDensity mu = pushforward_density(d, mod.order);
  ShiftLawReport rep = shift_law_check(mu, z0, parse_int_list(ks_csv), -3, 3);
  ordered_json j;
  j["spec"] = d.spec().to_json();
  j["z0_angle"] = z0;
  j["report"] = to_json(rep);
  emit(o, j);
  if (!rep.base.index || !rep.shifted.index) return kExitInconclusive;
  return rep.law_holds ? kExitOk : kExitError;
}

int run_simulate(const CommonOpts& o, int paths, int block, uint64_t seed,
                 int embed) {
  Density d(DensitySpec::from_file(o.spec_path));
  ClassifyParams params = make_params(o);
  ModerationReport mod = moderation_order(d, params.m_max, params.moderation);
  if (mod.status != Finiteness::Finite) return kExitInconclusive;
  CircleDensity mu = pushforward_density(d, mod.order).pole_removed();
  SimConfig cfg;
  cfg.paths = paths;
  cfg.block = block;
  cfg.seed = seed;
  cfg.embed = embed;
  Ensemble e = sample_paths(mu, cfg);
  std::vector<double> sigma_hat = empirical_cca(e, block);
  MomentTable m = moments(mu, 2 * block + 4);
  SectionReport gram = canonical_correlations(section_gram(m, block, 0));
  const double null95 = null_quantile(block, paths, 0.95, seed + 1);
  ordered_json j;
  j["spec"] = d.spec().to_json();
  j["paths"] = paths;
  j["block"] = block;
  j["seed"] = seed;
  j["clipped_mass"] = e.clipped_mass;
  j["sigma_hat"] = sigma_hat;
  j["sigma_gram"] = gram.sigmas;
  ordered_json dev = ordered_json::array();
  for (size_t i = 0; i < std::min(sigma_hat.size(), gram.sigmas.size()); ++i)
    dev.push_back(sigma_hat[i] - gram.sigmas[i]);
  j["deviation"] = dev;
  j["null_quantile_95"] = null95;
  emit(o, j);
  return kExitOk;
}

int run_bundle(const CommonOpts& o, const std::string& outdir) {
  Density d(DensitySpec::from_file(o.spec_path));
  CommonOpts local = o;
  local.out_path = outdir + "/report.json";
  Verdict v = classify(d, {}, make_params(o));
  ordered_json j;
  j["spec"] = d.spec().to_json();
  j["verdict"] = to_json(v);
  for (size_t m = 0; m < v.moderation_report.probes.size(); ++m)
    write_atomic(outdir + "/moderation_m" + std::to_string(m) + ".csv",
                 probe_csv(v.moderation_report.probes[m]));
  if (v.decisive)
    write_atomic(outdir + "/decisive_ladder.csv", probe_csv(v.decisive->probe));
  if (v.moderation == 1 &&
      (v.outcome == Outcome::OffWhite || v.outcome == Outcome::NotOffWhite)) {
    CrossCheck cc = verdict_cross_check(d, v);
    j["cross_check"] = to_json(cc);
    write_atomic(outdir + "/hs_sweep.csv", sweep_csv(cc.sweep));
    if (!cc.sweep.sections.empty())
      write_atomic(outdir + "/sigma_spectrum.csv",
                   sigma_csv(cc.sweep.sections.back()));
  }
  emit(local, j);
  std::cout << "wrote " << outdir << "\n";
  if (v.outcome == Outcome::Inconclusive || v.outcome == Outcome::Unsupported)
    return kExitInconclusive;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"offwhite: classify symmetric spectral densities by their "
               "past/future geometry"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string which, zeros_csv, ks_csv = "32,64,128,256", csv_path, outdir;
  int N = 0, paths = 2000, block = 16, embed = 0;
  double z0 = 0.0;
  uint64_t seed = 42;
  bool cross = false;

  auto* c_validate = app.add_subcommand("validate", "check a density spec");
  add_common(c_validate, o);

  auto* c_functional =
      app.add_subcommand("functional", "evaluate one Sobolev-type functional");
  add_common(c_functional, o);
  c_functional
      ->add_option("--which", which,
                   "circle-double|circle-fourier|line-sobolev|doubling|derivative")
      ->required();

  auto* c_classify = app.add_subcommand("classify", "off-white classification");
  add_common(c_classify, o);
  c_classify->add_option("--zeros", zeros_csv,
                         "declared zero angles (comma separated, for m >= 2)");
  c_classify->add_flag("--cross-check", cross,
                       "attach the finite-section consistency check");

  auto* c_paf = app.add_subcommand("paf", "finite-section sweep");
  add_common(c_paf, o);
  c_paf->add_option("--K", ks_csv, "section sizes, comma separated");
  c_paf->add_option("--N", N, "future section offset (pair P_0, F_{N+1})");
  c_paf->add_option("--csv", csv_path, "write K,sigma1,hs_sum rows here");

  auto* c_shift = app.add_subcommand("shift-check", "index shift law");
  add_common(c_shift, o);
  c_shift->add_option("--z0", z0, "angle of the multiplier root")->required();
  c_shift->add_option("--K", ks_csv, "section sizes, comma separated");

  auto* c_sim = app.add_subcommand("simulate", "sampling cross-validation");
  add_common(c_sim, o);
  c_sim->add_option("--paths", paths, "number of sample paths");
  c_sim->add_option("--block", block, "past/future block length p");
  c_sim->add_option("--seed", seed, "RNG seed");
  c_sim->add_option("--embed", embed, "circulant embedding size");

  auto* c_bundle = app.add_subcommand("report-bundle",
                                      "classification plus plot-ready CSVs");
  add_common(c_bundle, o);
  c_bundle->add_option("--outdir", outdir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_validate->parsed()) return run_validate(o);
    if (c_functional->parsed()) return run_functional(o, which);
    if (c_classify->parsed()) return run_classify(o, zeros_csv, cross);
    if (c_paf->parsed()) return run_paf(o, ks_csv, N, csv_path);
    if (c_shift->parsed()) return run_shift_check(o, z0, ks_csv);
    if (c_sim->parsed()) return run_simulate(o, paths, block, seed, embed);
    if (c_bundle->parsed()) return run_bundle(o, outdir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
