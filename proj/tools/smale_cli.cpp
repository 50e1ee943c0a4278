// Command-line entry point: model-file I/O, experiment orchestration and
// JSON report emission. Exit codes: 0 success, 2 negative verdict
// (a finding, not a crash), 1 errors.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "smale/circle_cover.hpp"
#include "smale/io.hpp"
#include "smale/katok.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using smale::Json;

struct Reporter {
  Json report;
  std::string out_path;
  int exit_code = 0;

  Reporter(const std::string& command, Json config) {
    report["command"] = command;
    report["version"] = kVersion;
    if (const char* threads = std::getenv("SMALE_THREADS"))
      config["threads"] = std::atoi(threads);
    report["config"] = std::move(config);
  }
  void verdict_negative() { exit_code = 2; }
  int emit() {
    std::string text = report.dump(2) + "\n";
    if (out_path.empty())
      std::cout << text;
    else
      smale::write_file(out_path, text);
    return exit_code;
  }
};

smale::Mat parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) {
    std::vector<double> r;
    std::stringstream rs(row);
    std::string cell;
    while (std::getline(rs, cell, ',')) r.push_back(std::stod(cell));
    rows.push_back(r);
  }
  if (rows.empty()) throw smale::Error("ParseError", "empty matrix");
  smale::Mat m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw smale::Error("ParseError", "ragged matrix rows");
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

smale::SymbolicPoint parse_point(const std::string& text) {
  Json j = Json::parse(text);
  smale::SymbolicPoint p;
  for (const auto& s : j.at("left")) p.left_period.push_back(s.get<int>());
  for (const auto& s : j.value("core", Json::array())) p.core.push_back(s.get<int>());
  for (const auto& s : j.at("right")) p.right_period.push_back(s.get<int>());
  p.core_start = j.value("start", 0);
  return p;
}

Json vec_to_json(const smale::Vec& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json mat_to_json(const smale::Mat& m) {
  Json out = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale hyperbolic dynamics: horseshoes, blenders, subshifts, shadowing"};
  app.require_subcommand(1);

  std::string out_path;
  app.add_option("--out", out_path, "write the JSON report to a file");

  // ---- sft -----------------------------------------------------------------
  auto* sft_cmd = app.add_subcommand("sft", "subshifts of finite type");
  sft_cmd->require_subcommand(1);
  std::string sft_model;
  bool sft_bits = false;
  double sft_epsilon = 0.3;
  int sft_n = 4;
  int sft_star = 0;
  auto* sft_entropy = sft_cmd->add_subcommand("entropy", "topological entropy");
  sft_entropy->add_option("--model", sft_model)->required();
  sft_entropy->add_flag("--bits", sft_bits, "display in bits as well");
  auto* sft_parry = sft_cmd->add_subcommand("parry", "measure of maximal entropy");
  sft_parry->add_option("--model", sft_model)->required();
  auto* sft_words = sft_cmd->add_subcommand("words", "admissible word counts");
  sft_words->add_option("--model", sft_model)->required();
  sft_words->add_option("--n", sft_n);
  auto* sft_marker = sft_cmd->add_subcommand("marker", "non-self-overlapping marker word");
  sft_marker->add_option("--model", sft_model)->required();
  sft_marker->add_option("--n", sft_n);
  sft_marker->add_option("--star", sft_star);
  auto* sft_extract = sft_cmd->add_subcommand("extract", "embedded full shift");
  sft_extract->add_option("--model", sft_model)->required();
  sft_extract->add_option("--epsilon", sft_epsilon);

  // ---- cocycle ---------------------------------------------------------------
  auto* coc_cmd = app.add_subcommand("cocycle", "locally constant linear cocycles");
  coc_cmd->require_subcommand(1);
  std::string coc_model, coc_x, coc_y, coc_side = "stable", coc_b, coc_bp, coc_blocks;
  int coc_orbits = 100, coc_len = 100, coc_nmax = 30, coc_horizon = 1;
  double coc_C = 10.0, coc_eps = 0.5, coc_alpha = 0.1, coc_tol = 1e-9;
  std::uint64_t coc_seed = 0;
  auto* coc_lyap = coc_cmd->add_subcommand("lyapunov", "exponent estimates");
  coc_lyap->add_option("--model", coc_model)->required();
  coc_lyap->add_option("--orbits", coc_orbits);
  coc_lyap->add_option("--len", coc_len);
  coc_lyap->add_option("--seed", coc_seed);
  auto* coc_hol = coc_cmd->add_subcommand("holonomy", "limit holonomy between points");
  coc_hol->add_option("--model", coc_model)->required();
  coc_hol->add_option("--x", coc_x, "point as JSON {left, core, right, start}")->required();
  coc_hol->add_option("--y", coc_y)->required();
  coc_hol->add_option("--side", coc_side);
  auto* coc_bun = coc_cmd->add_subcommand("bunching", "fiber bunching check");
  coc_bun->add_option("--model", coc_model)->required();
  coc_bun->add_option("--C", coc_C);
  coc_bun->add_option("--eps", coc_eps);
  coc_bun->add_option("--n-max", coc_nmax);
  coc_bun->add_option("--seed", coc_seed);
  auto* coc_common = coc_cmd->add_subcommand("common-measure", "pair invariant measure test");
  coc_common->add_option("--b", coc_b, "matrix rows 'a,b;c,d'")->required();
  coc_common->add_option("--bprime", coc_bp)->required();
  coc_common->add_option("--tol", coc_tol);
  auto* coc_pinch = coc_cmd->add_subcommand("pinching", "pinching/bunching inequalities");
  coc_pinch->add_option("--blocks", coc_blocks, "'min:max,min:max,...'")->required();
  coc_pinch->add_option("--alpha", coc_alpha);
  coc_pinch->add_option("--n", coc_horizon);

  // ---- horseshoe -------------------------------------------------------------
  auto* horse_cmd = app.add_subcommand("horseshoe", "standard affine horseshoes");
  horse_cmd->require_subcommand(1);
  std::string horse_model;
  int horse_k = 1, horse_n = 3, horse_samples = 50;
  double horse_tol = 1e-9, horse_resolution = 1e-4;
  std::vector<double> horse_rho{0.05}, horse_eta{0.12};
  std::uint64_t horse_seed = 0;
  auto* horse_validate = horse_cmd->add_subcommand("validate", "margins per model clause");
  horse_validate->add_option("--model", horse_model)->required();
  auto* horse_spec = horse_cmd->add_subcommand("spectrum", "exact exponent data");
  horse_spec->add_option("--model", horse_model)->required();
  auto* horse_hyp = horse_cmd->add_subcommand("hypothesis", "entropy hypothesis arithmetic");
  horse_hyp->add_option("--model", horse_model)->required();
  horse_hyp->add_option("--k", horse_k);
  auto* horse_ess = horse_cmd->add_subcommand("essential", "center dichotomy");
  horse_ess->add_option("--model", horse_model)->required();
  horse_ess->add_option("--tol", horse_tol);
  auto* horse_rd = horse_cmd->add_subcommand("reverse-doubling", "mass ratio certificate");
  horse_rd->add_option("--model", horse_model)->required();
  horse_rd->add_option("--rho", horse_rho);
  horse_rd->add_option("--eta", horse_eta);
  horse_rd->add_option("--samples", horse_samples);
  horse_rd->add_option("--seed", horse_seed);
  horse_rd->add_option("--resolution", horse_resolution);
  auto* horse_plaque = horse_cmd->add_subcommand("plaque-bound", "cylinder hit bound");
  horse_plaque->add_option("--model", horse_model)->required();
  horse_plaque->add_option("--n", horse_n);
  horse_plaque->add_option("--samples", horse_samples);
  horse_plaque->add_option("--seed", horse_seed);

  // ---- ifs ---------------------------------------------------------------------
  auto* ifs_cmd = app.add_subcommand("ifs", "center contraction systems");
  ifs_cmd->require_subcommand(1);
  std::string ifs_model, ifs_set, ifs_out_set;
  int ifs_n = 2, ifs_trials = 20;
  long ifs_cells = 1000;
  double ifs_c = 0.5, ifs_beta = 1.0;
  std::uint64_t ifs_seed = 0;
  auto* ifs_check = ifs_cmd->add_subcommand("check-recurrent", "certify a grid set");
  ifs_check->add_option("--model", ifs_model)->required();
  ifs_check->add_option("--set", ifs_set)->required();
  auto* ifs_search = ifs_cmd->add_subcommand("search-recurrent", "maximal witness search");
  ifs_search->add_option("--model", ifs_model)->required();
  ifs_search->add_option("--cells", ifs_cells);
  ifs_search->add_option("--out-set", ifs_out_set, "write the witness grid set");
  auto* ifs_perturb = ifs_cmd->add_subcommand("perturb", "randomized composite shifts");
  ifs_perturb->add_option("--model", ifs_model)->required();
  ifs_perturb->add_option("--n", ifs_n);
  ifs_perturb->add_option("--c", ifs_c);
  ifs_perturb->add_option("--beta", ifs_beta);
  ifs_perturb->add_option("--trials", ifs_trials);
  ifs_perturb->add_option("--seed", ifs_seed);
  ifs_perturb->add_option("--cells", ifs_cells);
  auto* ifs_claim = ifs_cmd->add_subcommand("claim", "coverage measure counting");
  ifs_claim->add_option("--model", ifs_model)->required();
  ifs_claim->add_option("--n", ifs_n);
  ifs_claim->add_option("--beta", ifs_beta);

  // ---- blender ---------------------------------------------------------------
  auto* blender_cmd = app.add_subcommand("blender", "graph intersection tests");
  blender_cmd->require_subcommand(1);
  std::string blender_model, blender_graph, blender_value;
  int blender_graphs = 200, blender_maxiter = 60;
  double blender_tol = 1e-9;
  std::uint64_t blender_seed = 0;
  auto* blender_test = blender_cmd->add_subcommand("test", "monte carlo over sampled graphs");
  blender_test->add_option("--model", blender_model)->required();
  blender_test->add_option("--graphs", blender_graphs);
  blender_test->add_option("--seed", blender_seed);
  blender_test->add_option("--max-iter", blender_maxiter);
  blender_test->add_option("--tol", blender_tol);
  auto* blender_one = blender_cmd->add_subcommand("graph", "test a single stored graph");
  blender_one->add_option("--model", blender_model)->required();
  blender_one->add_option("--graph", blender_graph)->required();
  blender_one->add_option("--max-iter", blender_maxiter);
  blender_one->add_option("--tol", blender_tol);
  auto* blender_gap = blender_cmd->add_subcommand("constant-graph", "test a constant graph");
  blender_gap->add_option("--model", blender_model)->required();
  blender_gap->add_option("--value", blender_value, "comma separated values")->required();
  blender_gap->add_option("--max-iter", blender_maxiter);

  // ---- shadow -----------------------------------------------------------------
  auto* shadow_cmd = app.add_subcommand("shadow", "pseudo-orbit shadowing");
  std::string shadow_seq, shadow_po;
  bool shadow_nonlin = false;
  double shadow_tol = 1e-10;
  shadow_cmd->add_option("--seq", shadow_seq)->required();
  shadow_cmd->add_option("--pseudo", shadow_po)->required();
  shadow_cmd->add_flag("--nonlinear", shadow_nonlin);
  shadow_cmd->add_option("--tol", shadow_tol);

  // ---- katok ------------------------------------------------------------------
  auto* katok_cmd = app.add_subcommand("katok", "return sets and refinements");
  katok_cmd->require_subcommand(1);
  std::string katok_model;
  double katok_delta = 0.2, katok_gamma = 0.3, katok_xi = 0.04;
  int katok_rho = 1, katok_ball = 0, katok_N = 8, katok_star = 0;
  auto* katok_select = katok_cmd->add_subcommand("select", "return-set selection");
  katok_select->add_option("--model", katok_model)->required();
  katok_select->add_option("--delta", katok_delta);
  katok_select->add_option("--gamma", katok_gamma);
  katok_select->add_option("--xi", katok_xi);
  katok_select->add_option("--rho", katok_rho, "separation scale 2^-rho");
  katok_select->add_option("--ball", katok_ball, "ball cylinder half width");
  auto* katok_assemble = katok_cmd->add_subcommand("assemble", "select then assemble");
  katok_assemble->add_option("--model", katok_model)->required();
  katok_assemble->add_option("--delta", katok_delta);
  katok_assemble->add_option("--gamma", katok_gamma);
  katok_assemble->add_option("--xi", katok_xi);
  katok_assemble->add_option("--rho", katok_rho);
  katok_assemble->add_option("--ball", katok_ball);
  auto* katok_refine = katok_cmd->add_subcommand("refine", "marker refinement");
  katok_refine->add_option("--model", katok_model)->required();
  katok_refine->add_option("--N", katok_N);
  katok_refine->add_option("--delta", katok_delta);
  katok_refine->add_option("--star", katok_star);

  // ---- cover-circle -----------------------------------------------------------
  auto* cover_cmd = app.add_subcommand("cover-circle", "equal-interval circle covers");
  std::string cover_points, cover_a;
  cover_cmd->add_option("--points", cover_points, "comma separated rationals")->required();
  cover_cmd->add_option("--a", cover_a, "parameter in (0, 1/2)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    using namespace smale;

    // ---- sft ----
    if (sft_cmd->parsed()) {
      if (sft_entropy->parsed()) {
        Reporter rep("sft entropy", Json{{"model", sft_model}, {"bits", sft_bits}});
        rep.out_path = out_path;
        double h = load_sft(sft_model).top_entropy();
        rep.report["results"]["entropy_nats"] = h;
        if (sft_bits) rep.report["results"]["entropy_bits"] = h / std::log(2.0);
        return rep.emit();
      }
      if (sft_parry->parsed()) {
        Reporter rep("sft parry", Json{{"model", sft_model}});
        rep.out_path = out_path;
        auto mu = load_sft(sft_model).parry_measure();
        rep.report["results"]["stationary"] = vec_to_json(mu.stationary);
        rep.report["results"]["transition_probs"] = mat_to_json(mu.transition_probs);
        rep.report["results"]["entropy_rate"] = mu.entropy_rate();
        return rep.emit();
      }
      if (sft_words->parsed()) {
        Reporter rep("sft words", Json{{"model", sft_model}, {"n", sft_n}});
        rep.out_path = out_path;
        rep.report["results"]["count"] = load_sft(sft_model).count_words(sft_n);
        return rep.emit();
      }
      if (sft_marker->parsed()) {
        Reporter rep("sft marker",
                     Json{{"model", sft_model}, {"n", sft_n}, {"star", sft_star}});
        rep.out_path = out_path;
        auto res = load_sft(sft_model).find_marker_word(sft_n, sft_star);
        rep.report["results"]["candidates_examined"] = res.candidates_examined;
        if (res.marker) {
          rep.report["results"]["marker"] = *res.marker;
        } else {
          rep.report["results"]["marker"] = nullptr;
          rep.verdict_negative();
        }
        return rep.emit();
      }
      if (sft_extract->parsed()) {
        Reporter rep("sft extract", Json{{"model", sft_model}, {"epsilon", sft_epsilon}});
        rep.out_path = out_path;
        auto sft = load_sft(sft_model);
        auto ext = extract_full_shift(sft, sft_epsilon);
        rep.report["results"] = Json{{"k", ext.k},
                                     {"n", ext.n},
                                     {"blocks", ext.blocks},
                                     {"marker", ext.marker},
                                     {"pool_size", ext.pool.size()},
                                     {"embedded_entropy", ext.embedded_entropy()},
                                     {"degenerate", ext.degenerate},
                                     {"disjointness", ext.verify_disjointness()},
                                     {"concatenations", ext.verify_concatenations(sft)}};
        return rep.emit();
      }
    }

    // ---- cocycle ----
    if (coc_cmd->parsed()) {
      if (coc_lyap->parsed()) {
        Reporter rep("cocycle lyapunov", Json{{"model", coc_model},
                                              {"orbits", coc_orbits},
                                              {"len", coc_len},
                                              {"seed", coc_seed}});
        rep.out_path = out_path;
        auto coc = load_cocycle(coc_model);
        auto mu = coc.base().parry_measure();
        auto res = lyapunov_exponents(coc, mu, coc_orbits, coc_len, coc_seed);
        rep.report["results"]["exponents"] = res.exponents;
        rep.report["results"]["standard_errors"] = res.standard_errors;
        if (res.exact) rep.report["results"]["exact"] = *res.exact;
        return rep.emit();
      }
      if (coc_hol->parsed()) {
        Reporter rep("cocycle holonomy",
                     Json{{"model", coc_model}, {"side", coc_side}});
        rep.out_path = out_path;
        auto coc = load_cocycle(coc_model);
        auto H = holonomy(coc, parse_point(coc_x), parse_point(coc_y), coc_side);
        rep.report["results"]["matrix"] = mat_to_json(H.matrix);
        rep.report["results"]["residual"] = H.residual;
        rep.report["results"]["converged"] = H.converged;
        rep.report["results"]["intertwining_residual"] = H.intertwining_residual;
        if (!H.converged) rep.verdict_negative();
        return rep.emit();
      }
      if (coc_bun->parsed()) {
        Reporter rep("cocycle bunching", Json{{"model", coc_model},
                                              {"C", coc_C},
                                              {"eps", coc_eps},
                                              {"n_max", coc_nmax},
                                              {"seed", coc_seed}});
        rep.out_path = out_path;
        auto coc = load_cocycle(coc_model);
        auto res = fiber_bunching_check(coc, coc_C, coc_eps, coc_nmax, 4, 16, coc_seed);
        rep.report["results"]["pass"] = res.pass;
        rep.report["results"]["worst_ratio"] = res.worst_ratio;
        rep.report["results"]["worst_n"] = res.worst_n;
        if (!res.pass) rep.verdict_negative();
        return rep.emit();
      }
      if (coc_common->parsed()) {
        Reporter rep("cocycle common-measure",
                     Json{{"b", coc_b}, {"bprime", coc_bp}, {"tol", coc_tol}});
        rep.out_path = out_path;
        auto res = common_invariant_measure_test(parse_matrix(coc_b), parse_matrix(coc_bp),
                                                 coc_tol);
        rep.report["results"]["exists"] = res.exists;
        rep.report["results"]["witness"] = res.witness;
        rep.report["results"]["rejected"] = res.rejected;
        if (!res.exists) rep.verdict_negative();
        return rep.emit();
      }
      if (coc_pinch->parsed()) {
        Reporter rep("cocycle pinching", Json{{"blocks", coc_blocks},
                                              {"alpha", coc_alpha},
                                              {"n", coc_horizon}});
        rep.out_path = out_path;
        std::vector<BlockRates> blocks;
        std::stringstream ss(coc_blocks);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          auto colon = tok.find(':');
          BlockRates b;
          if (colon == std::string::npos) {
            b.min_rate = b.max_rate = std::stod(tok);
          } else {
            b.min_rate = std::stod(tok.substr(0, colon));
            b.max_rate = std::stod(tok.substr(colon + 1));
          }
          blocks.push_back(b);
        }
        auto res = pinching_bunching_check(blocks, coc_alpha, coc_horizon);
        Json out = Json::array();
        for (const auto& b : res.blocks)
          out.push_back(Json{{"pinch_upper", b.pinch_upper},
                             {"pinch_lower", b.pinch_lower},
                             {"bunch_forward", b.bunch_forward},
                             {"bunch_backward", b.bunch_backward},
                             {"pinched", b.pinched},
                             {"bunched", b.bunched}});
        rep.report["results"]["blocks"] = out;
        return rep.emit();
      }
    }

    // ---- horseshoe ----
    if (horse_cmd->parsed()) {
      if (horse_validate->parsed()) {
        Reporter rep("horseshoe validate", Json{{"model", horse_model}});
        rep.out_path = out_path;
        auto r = load_horseshoe(horse_model).validate();
        Json clauses = Json::array();
        for (const auto& c : r.clauses)
          clauses.push_back(Json{{"name", c.name}, {"margin", c.margin}, {"ok", c.ok}});
        rep.report["results"]["clauses"] = clauses;
        rep.report["results"]["valid"] = r.valid();
        if (!r.valid()) rep.verdict_negative();
        return rep.emit();
      }
      if (horse_spec->parsed()) {
        Reporter rep("horseshoe spectrum", Json{{"model", horse_model}});
        rep.out_path = out_path;
        auto sp = lyapunov_spectrum(load_horseshoe(horse_model));
        Json exps = Json::array();
        for (auto [v, m] : sp.exponents) exps.push_back(Json{{"value", v}, {"multiplicity", m}});
        rep.report["results"] = Json{{"exponents", exps},
                                     {"chi_u_inf", sp.chi_u_inf},
                                     {"chi_u_max", sp.chi_u_max},
                                     {"log_jac_u", sp.log_jac_u},
                                     {"log_det_uu", sp.log_det_uu},
                                     {"log_det_c", sp.log_det_c}};
        return rep.emit();
      }
      if (horse_hyp->parsed()) {
        Reporter rep("horseshoe hypothesis", Json{{"model", horse_model}, {"k", horse_k}});
        rep.out_path = out_path;
        auto r = blender_entropy_hypothesis(load_horseshoe(horse_model), horse_k);
        rep.report["results"] = Json{{"almost_pesin_ok", r.almost_pesin_ok},
                                     {"c", r.c},
                                     {"exponent_ratio_ok", r.exponent_ratio_ok},
                                     {"entropy_floor_ok", r.entropy_floor_ok},
                                     {"determinant_gap_ok", r.determinant_gap_ok},
                                     {"margins", r.margins}};
        if (!r.almost_pesin_ok) rep.verdict_negative();
        return rep.emit();
      }
      if (horse_ess->parsed()) {
        Reporter rep("horseshoe essential", Json{{"model", horse_model}, {"tol", horse_tol}});
        rep.out_path = out_path;
        auto r = essential_center_test(load_horseshoe(horse_model), horse_tol);
        rep.report["results"]["verdict"] = r.essential ? "Essential" : "JointlyIntegrable";
        rep.report["results"]["center_diameter"] = r.center_diameter;
        return rep.emit();
      }
      if (horse_rd->parsed()) {
        Reporter rep("horseshoe reverse-doubling", Json{{"model", horse_model},
                                                        {"rho", horse_rho},
                                                        {"eta", horse_eta},
                                                        {"samples", horse_samples},
                                                        {"seed", horse_seed},
                                                        {"resolution", horse_resolution}});
        rep.out_path = out_path;
        auto r = reverse_doubling_search(load_horseshoe(horse_model), horse_rho, horse_eta,
                                         horse_samples, horse_seed, horse_resolution);
        rep.report["results"] = Json{{"certified", r.certified},
                                     {"rho", r.rho},
                                     {"eta", r.eta},
                                     {"worst_ratio", r.worst_ratio},
                                     {"tested_points", r.tested_points}};
        if (!r.certified) rep.verdict_negative();
        return rep.emit();
      }
      if (horse_plaque->parsed()) {
        Reporter rep("horseshoe plaque-bound", Json{{"model", horse_model},
                                                    {"n", horse_n},
                                                    {"samples", horse_samples},
                                                    {"seed", horse_seed}});
        rep.out_path = out_path;
        auto r = plaque_hit_bound_check(load_horseshoe(horse_model), horse_n, horse_samples,
                                        horse_seed);
        rep.report["results"] = Json{{"max_count", r.max_count},
                                     {"bound", r.bound},
                                     {"exhaustive", r.exhaustive}};
        return rep.emit();
      }
    }

    // ---- ifs ----
    if (ifs_cmd->parsed()) {
      if (ifs_check->parsed()) {
        Reporter rep("ifs check-recurrent", Json{{"model", ifs_model}, {"set", ifs_set}});
        rep.out_path = out_path;
        auto ifs = load_center_ifs(ifs_model);
        auto K = gridset_from_text(read_file(ifs_set));
        auto res = recurrent_compact_check(ifs, K);
        rep.report["results"]["certified"] = res.certified;
        rep.report["results"]["reason"] = res.reason;
        rep.report["results"]["rejected_cell"] = res.rejected_cell;
        if (!res.certified) rep.verdict_negative();
        return rep.emit();
      }
      if (ifs_search->parsed()) {
        Reporter rep("ifs search-recurrent",
                     Json{{"model", ifs_model}, {"cells", ifs_cells}});
        rep.out_path = out_path;
        auto ifs = load_center_ifs(ifs_model);
        auto found = search_recurrent_compact(ifs, ifs_cells);
        rep.report["results"]["found"] = found.has_value();
        if (found) {
          rep.report["results"]["occupied_cells"] = found->count();
          if (!ifs_out_set.empty()) write_file(ifs_out_set, gridset_to_text(*found));
        } else {
          rep.verdict_negative();
        }
        return rep.emit();
      }
      if (ifs_perturb->parsed()) {
        Reporter rep("ifs perturb", Json{{"model", ifs_model},
                                         {"n", ifs_n},
                                         {"c", ifs_c},
                                         {"beta", ifs_beta},
                                         {"trials", ifs_trials},
                                         {"seed", ifs_seed},
                                         {"cells", ifs_cells}});
        rep.out_path = out_path;
        auto ifs = load_center_ifs(ifs_model);
        auto r = perturb_and_verify(ifs, ifs_n, ifs_c, ifs_beta, ifs_trials, ifs_seed, ifs_cells);
        rep.report["results"] = Json{{"trials", r.trials},
                                     {"covering_successes", r.covering_successes},
                                     {"certified_successes", r.certified_successes},
                                     {"hit_bound_ok", r.hit_bound_ok},
                                     {"hit_bound_worst", r.hit_bound_worst},
                                     {"lattice_points", r.lattice_points}};
        return rep.emit();
      }
      if (ifs_claim->parsed()) {
        Reporter rep("ifs claim",
                     Json{{"model", ifs_model}, {"n", ifs_n}, {"beta", ifs_beta}});
        rep.out_path = out_path;
        auto ifs = load_center_ifs(ifs_model);
        auto r = coverage_claim_bruteforce(ifs, ifs_n, ifs_beta);
        rep.report["results"] = Json{{"measure_lower", r.measure_lower},
                                     {"measure_upper", r.measure_upper},
                                     {"alpha_n", r.alpha_n},
                                     {"threshold_count", r.threshold_count},
                                     {"ok", r.ok}};
        if (!r.ok) rep.verdict_negative();
        return rep.emit();
      }
    }

    // ---- blender ----
    if (blender_cmd->parsed()) {
      auto verdict_json = [](const BlenderVerdict& v) {
        std::string kind = v.kind == BlenderVerdict::Kind::Intersects ? "Intersects"
                           : v.kind == BlenderVerdict::Kind::Escapes  ? "Escapes"
                                                                      : "ToleranceNotReached";
        Json out{{"kind", kind}, {"deepest", v.deepest}, {"nodes_visited", v.nodes_visited}};
        if (v.kind == BlenderVerdict::Kind::Intersects) {
          Json box = Json::array();
          for (const auto& a : v.point_enclosure.axes)
            box.push_back(Json::array({a.lo, a.hi}));
          out["point_enclosure"] = box;
          out["itinerary_prefix"] =
              std::vector<int>(v.itinerary.begin(),
                               v.itinerary.begin() + std::min<size_t>(16, v.itinerary.size()));
        }
        if (v.kind == BlenderVerdict::Kind::Escapes) out["exit_time"] = v.exit_time;
        return out;
      };
      if (blender_test->parsed()) {
        Reporter rep("blender test", Json{{"model", blender_model},
                                          {"graphs", blender_graphs},
                                          {"seed", blender_seed},
                                          {"max_iter", blender_maxiter},
                                          {"tol", blender_tol}});
        rep.out_path = out_path;
        auto h = load_horseshoe(blender_model);
        auto r = monte_carlo_blender(h, blender_graphs, blender_maxiter, blender_tol,
                                     blender_seed);
        Json escapes = Json::array();
        for (auto [g, t] : r.escape_witnesses)
          escapes.push_back(Json{{"graph", g}, {"exit_time", t}});
        rep.report["results"] = Json{{"graphs", r.graphs},
                                     {"intersect_count", r.intersect_count},
                                     {"recertified_count", r.recertified_count},
                                     {"tolerance_not_reached", r.tolerance_not_reached},
                                     {"escape_witnesses", escapes}};
        if (!r.escape_witnesses.empty()) rep.verdict_negative();
        return rep.emit();
      }
      if (blender_one->parsed()) {
        Reporter rep("blender graph",
                     Json{{"model", blender_model}, {"graph", blender_graph}});
        rep.out_path = out_path;
        auto h = load_horseshoe(blender_model);
        auto g = graph_from_json(Json::parse(read_file(blender_graph)));
        auto v = blender_graph_test(h, g, blender_maxiter, blender_tol);
        rep.report["results"] = verdict_json(v);
        if (v.kind != BlenderVerdict::Kind::Intersects) rep.verdict_negative();
        return rep.emit();
      }
      if (blender_gap->parsed()) {
        Reporter rep("blender constant-graph",
                     Json{{"model", blender_model}, {"value", blender_value}});
        rep.out_path = out_path;
        auto h = load_horseshoe(blender_model);
        std::vector<double> entries;
        std::stringstream ss(blender_value);
        std::string tok;
        while (std::getline(ss, tok, ',')) entries.push_back(std::stod(tok));
        Vec value(entries.size());
        for (size_t i = 0; i < entries.size(); ++i) value[i] = entries[i];
        auto g = LipschitzGraph::constant(h.d_uu(), h.d_c() + h.d_s(), value);
        auto v = blender_graph_test(h, g, blender_maxiter);
        rep.report["results"] = verdict_json(v);
        if (v.kind != BlenderVerdict::Kind::Intersects) rep.verdict_negative();
        return rep.emit();
      }
    }

    // ---- shadow ----
    if (shadow_cmd->parsed()) {
      Reporter rep("shadow", Json{{"seq", shadow_seq},
                                  {"pseudo", shadow_po},
                                  {"nonlinear", shadow_nonlin},
                                  {"tol", shadow_tol}});
      rep.out_path = out_path;
      auto seq = sequence_from_json(Json::parse(read_file(shadow_seq)));
      auto po = pseudo_orbit_from_json(Json::parse(read_file(shadow_po)));
      auto orbit = shadow_nonlin ? shadow_nonlinear(seq, po, shadow_tol)
                                 : shadow_affine(seq, po);
      rep.report["results"]["max_deviation"] = orbit.max_deviation;
      rep.report["results"]["orbit_residual"] = orbit.orbit_residual(seq);
      rep.report["results"]["theta_eps_bound"] = seq.theta() * po.max_jump(seq);
      rep.report["results"]["kappa"] = seq.kappa();
      rep.report["results"]["clamp"] = orbit.clamp;
      Json points = Json::array();
      for (const auto& p : orbit.points) points.push_back(vec_to_json(p));
      rep.report["results"]["points"] = points;
      return rep.emit();
    }

    // ---- katok ----
    if (katok_cmd->parsed()) {
      if (katok_select->parsed() || katok_assemble->parsed()) {
        bool assemble = katok_assemble->parsed();
        Reporter rep(assemble ? "katok assemble" : "katok select",
                     Json{{"model", katok_model},
                          {"delta", katok_delta},
                          {"gamma", katok_gamma},
                          {"xi", katok_xi},
                          {"rho", katok_rho},
                          {"ball", katok_ball}});
        rep.out_path = out_path;
        auto sys = FiniteMetricSystem::make(load_sft(katok_model),
                                            {CylinderIndicator{{0}}});
        ReturnSetParams prm;
        prm.delta = katok_delta;
        prm.gamma = katok_gamma;
        prm.xi = katok_xi;
        prm.rho_j = katok_rho;
        prm.ball_half_width = katok_ball;
        auto ret = select_return_set(sys, prm);
        rep.report["results"]["N"] = ret.N;
        rep.report["results"]["count"] = ret.points.size();
        rep.report["results"]["m_used"] = ret.m_used;
        rep.report["results"]["xm_mass_proxy"] = ret.xm_mass_proxy;
        rep.report["results"]["attrition"] = ret.attrition;
        if (assemble) {
          auto horse = assemble_horseshoe(sys, ret);
          rep.report["results"]["entropy"] = horse.entropy;
          rep.report["results"]["entropy_floor"] = sys.mu.entropy_rate() - katok_delta;
          rep.report["results"]["degenerate"] = horse.degenerate;
        }
        return rep.emit();
      }
      if (katok_refine->parsed()) {
        Reporter rep("katok refine", Json{{"model", katok_model},
                                          {"N", katok_N},
                                          {"delta", katok_delta},
                                          {"star", katok_star}});
        rep.out_path = out_path;
        auto sft = load_sft(katok_model);
        auto r = marker_refine(sft, katok_N, katok_delta, katok_star);
        rep.report["results"] = Json{{"N", r.N},
                                     {"ell", r.ell},
                                     {"L0", r.L0},
                                     {"pool_size", r.pool.size()},
                                     {"entropy", r.entropy},
                                     {"disjointness_certified", r.disjointness_certified},
                                     {"degenerate", r.degenerate},
                                     {"attrition", r.attrition}};
        if (!r.disjointness_certified && !r.degenerate) rep.verdict_negative();
        return rep.emit();
      }
    }

    // ---- cover-circle ----
    if (cover_cmd->parsed()) {
      Reporter rep("cover-circle", Json{{"points", cover_points}, {"a", cover_a}});
      rep.out_path = out_path;
      std::vector<Rational> X;
      std::stringstream ss(cover_points);
      std::string tok;
      while (std::getline(ss, tok, ',')) X.push_back(rational_from_string(tok));
      auto cover = cover_circle(X, rational_from_string(cover_a));
      rep.report["results"]["kappa"] = cover.kappa.str();
      rep.report["results"]["kappa_approx"] = static_cast<double>(cover.kappa);
      rep.report["results"]["depth"] = cover.depth;
      Json arcs = Json::array();
      for (const auto& iv : cover.intervals)
        arcs.push_back(Json{{"start", iv.start.str()}, {"length", iv.length.str()}});
      rep.report["results"]["intervals"] = arcs;
      return rep.emit();
    }
  } catch (const smale::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
