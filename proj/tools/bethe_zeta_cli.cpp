// bethe-zeta: command-line front end. Every command writes one JSON (or CSV)
// report; nothing is written unless the whole report was produced.

#include <complex>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bethe_zeta.hpp"

namespace bz = bethe_zeta;
using bz::json;

namespace {

enum Exit { kOk = 0, kAnalysisFailure = 1, kInputError = 2 };

struct Config {
  std::string command;
  std::string model_path;
  std::string point_path;
  std::string out_path;
  std::string format = "csv";
  double damping = 0.0;
  double tol = 1e-10;
  int max_iter = 10000;
  std::string init = "uniform";
  std::string init_path;
  std::uint64_t seed = 0;
  double t_start = 2.0;
  double t_end = 0.5;
  int steps = 40;
  int lattice = 64;
  int restarts = 64;
  int lbp_starts = 8;
  int max_len = 0;
  double u = 0.0;
  std::string suite = "main-formula";
  int trials = 200;
  std::string generator;
  int gen_n = 4;
  int gen_m = 0;
  double gen_j = 1.0;
  double gen_h = 0.0;
};

json config_json(const Config& c) {
  json j{{"command", c.command}, {"seed", c.seed}};
  if (!c.model_path.empty()) j["model"] = c.model_path;
  if (c.command == "lbp") {
    j.update({{"damping", c.damping}, {"tol", c.tol}, {"max_iter", c.max_iter}, {"init", c.init}});
    if (!c.init_path.empty()) j["init_file"] = c.init_path;
  } else if (c.command == "bethe") {
    j["point"] = c.point_path;
  } else if (c.command == "zeta") {
    if (!c.point_path.empty()) j["point"] = c.point_path;
    j.update({{"u", c.u}, {"max_len", c.max_len}});
  } else if (c.command == "analyze") {
    j.update({{"tol", c.tol}, {"lattice", c.lattice}, {"restarts", c.restarts}, {"lbp_starts", c.lbp_starts}});
  } else if (c.command == "sweep") {
    j.update({{"t_start", c.t_start}, {"t_end", c.t_end}, {"steps", c.steps}, {"tol", c.tol}, {"format", c.format}});
  } else if (c.command == "verify") {
    j.update({{"suite", c.suite}, {"trials", c.trials}});
  } else if (c.command == "generate") {
    j.update({{"name", c.generator}, {"n", c.gen_n}, {"m", c.gen_m}, {"J", c.gen_j}, {"h", c.gen_h}});
  }
  return j;
}

json complex_list(const std::vector<bz::Complex>& ev) {
  json out = json::array();
  for (const auto& z : ev) out.push_back({z.real(), z.imag()});
  return out;
}

json spectral_json(const bz::SpectralReport& s) {
  return {{"eigenvalues", complex_list(s.eigenvalues)},
          {"spectral_radius", s.spectral_radius},
          {"max_real_part", s.max_real_part},
          {"has_real_geq_one", s.has_real_geq_one},
          {"similarity_gap", s.similarity_gap}};
}

json record_json(const bz::FixedPointRecord& r) {
  return {{"q", bz::pseudomarginals_to_json(r.q)},
          {"grad_norm", r.grad_norm},
          {"hessian_det_sign", r.hessian_det_sign},
          {"log_abs_det", r.log_abs_det},
          {"index", r.index},
          {"stability", std::string(bz::to_string(r.stability))},
          {"pd_certificate", std::string(bz::to_string(r.pd_certificate))},
          {"min_hessian_eigenvalue", r.min_hessian_eigenvalue},
          {"spectrum", spectral_json(r.spectrum)}};
}

json certificate_json(const bz::UniquenessCertificate& c) {
  json j{{"kind", std::string(bz::to_string(c.kind))}, {"cycle_rank", c.cycle_rank}, {"rho_jm", c.rho_jm}};
  j["frustrated_edge"] = c.frustrated_edge ? json(*c.frustrated_edge) : json(nullptr);
  return j;
}

bz::EnumerationOptions enumeration_options(const Config& c) {
  bz::EnumerationOptions o;
  o.lattice_points = c.lattice;
  o.n_restarts = c.restarts;
  o.lbp_starts = c.lbp_starts;
  o.seed = c.seed;
  o.tol = c.tol;
  return o;
}

/// Produces the report body; the caller adds config and schema version.
int run_command(const Config& c, json& report, std::string& csv) {
  if (c.command == "generate") {
    report = bz::model_to_json(bz::builtin_model(c.generator, {c.gen_n, c.gen_m, c.gen_j, c.gen_h, c.seed}));
    return kOk;
  }
  if (c.command == "verify") {
    const auto s = bz::verify_suite(c.suite, c.trials, c.seed);
    report = {{"suite", s.suite}, {"trials", s.trials}, {"passed", s.passed}, {"max_error", s.max_error},
              {"tolerance", s.tolerance}, {"ok", s.ok()}};
    return s.ok() ? kOk : kAnalysisFailure;
  }

  const auto model = bz::model_from_json(bz::read_json_file(c.model_path));
  const auto& g = model.graph;

  if (c.command == "lbp") {
    bz::MessageState init = bz::MessageState::uniform(g);
    if (c.init == "random") {
      init = bz::MessageState::random(g, c.seed);
    } else if (c.init == "file") {
      const json j = bz::read_json_file(c.init_path);
      const json& le = j.contains("log_eta") ? j.at("log_eta") : json();
      if (!le.is_array() || static_cast<int>(le.size()) != g.num_directed())
        bz::fail(bz::ErrorKind::SchemaError, "read_messages", "\"log_eta\" needs one value per directed edge");
      for (int e = 0; e < g.num_directed(); ++e) {
        if (!le[static_cast<std::size_t>(e)].is_number())
          bz::fail(bz::ErrorKind::SchemaError, "read_messages", "log messages must be numbers");
        init.log_eta(e) = le[static_cast<std::size_t>(e)].get<double>();
      }
    }
    const auto r = bz::lbp_run(model, init, {c.damping, c.tol, c.max_iter});
    std::vector<double> log_eta(r.state.log_eta.data(), r.state.log_eta.data() + r.state.log_eta.size());
    report = {{"converged", r.converged},
              {"iterations", r.iterations},
              {"residual", r.residual},
              {"m", r.beliefs.m},
              {"chi", r.beliefs.chi},
              {"log_eta", log_eta},
              {"spectrum", complex_list(bz::spectrum_um(g, r.beliefs).eigenvalues)}};
    return r.converged ? kOk : kAnalysisFailure;
  }

  if (c.command == "bethe") {
    const auto q = bz::pseudomarginals_from_json(g, bz::read_json_file(c.point_path));
    const auto dom = bz::in_domain(g, q);
    report = {{"in_domain", dom.inside}, {"margin", dom.margin}};
    if (dom.margin < bz::kDomainFloor) return kAnalysisFailure;
    const bz::Vector grad = bz::gradient(model, q);
    const auto det = bz::signed_log_det(bz::hessian(g, q).full);
    report["free_energy"] = bz::free_energy(model, q);
    report["gradient"] = std::vector<double>(grad.data(), grad.data() + grad.size());
    report["hessian_det_sign"] = det.sign;
    report["hessian_log_abs_det"] = det.log_abs;
    return kOk;
  }

  if (c.command == "zeta") {
    std::optional<bz::Pseudomarginals> q;
    bz::EdgeWeights w = bz::EdgeWeights::constant(g, c.u);
    if (!c.point_path.empty()) {
      q = bz::pseudomarginals_from_json(g, bz::read_json_file(c.point_path));
      w = bz::weights_from_pseudomarginals(g, *q);
    }
    const auto z = bz::zeta_report(g, w, c.max_len);
    report = {{"det_form", z.det_form}, {"weights", w.u}};
    report["ihara_form"] = z.ihara_form ? json(*z.ihara_form) : json(nullptr);
    if (z.product_form) {
      report["product_form"] = {{"value", z.product_form->value}, {"bound", z.product_form->bound},
                                {"max_len", z.product_form->max_len}, {"num_cycles", z.product_form->num_cycles}};
    }
    if (q) {
      const auto mf = bz::verify_main_formula(g, *q);
      report["main_formula"] = {{"lhs_sign", mf.lhs.sign}, {"lhs_log_abs", mf.lhs.log_abs},
                                {"rhs_sign", mf.rhs.sign}, {"rhs_log_abs", mf.rhs.log_abs},
                                {"log_residual", mf.log_residual}, {"signs_agree", mf.signs_agree}};
    }
    return kOk;
  }

  if (c.command == "analyze") {
    const auto idx = bz::index_sum_check(model, enumeration_options(c));
    json fps = json::array();
    json bounds_hold = json::array();
    for (const auto& fp : idx.enumeration.fixed_points) {
      fps.push_back(record_json(fp));
      bounds_hold.push_back(bz::beta_bound_check(model, fp.q).all_pass);
    }
    json failures = json::object();
    for (const auto& [kind, count] : idx.enumeration.failures) failures[kind] = count;
    report = {{"fixed_points", fps},
              {"beta_bounds_hold", bounds_hold},
              {"index_sum", {{"sum", idx.sum}, {"count", idx.count}, {"status", std::string(bz::to_string(idx.status))},
                             {"retried", idx.retried}}},
              {"starts", idx.enumeration.starts},
              {"failed_starts", failures},
              {"certificate", certificate_json(bz::uniqueness_certificate(model))}};
    return idx.passed ? kOk : kAnalysisFailure;
  }

  if (c.command == "certify") {
    report = certificate_json(bz::uniqueness_certificate(model));
    return kOk;
  }

  if (c.command == "sweep") {
    const auto r = bz::saddle_crossing_track(model, {c.t_start, c.t_end, c.steps, 20, c.tol});
    auto brackets = [](const std::vector<bz::CrossingBracket>& list) {
      json out = json::array();
      for (const auto& b : list) out.push_back({b.lo, b.hi});
      return out;
    };
    json rows = json::array();
    std::ostringstream out;
    out.precision(17);
    out << "t,max_re_lambda,rho,det_sign,log_abs_det,F\n";
    for (const auto& row : r.rows) {
      out << row.t << ',' << row.max_re_lambda << ',' << row.rho << ',' << row.det_sign << ',' << row.log_abs_det << ','
          << row.free_energy << '\n';
      rows.push_back({{"t", row.t}, {"max_re_lambda", row.max_re_lambda}, {"rho", row.rho}, {"det_sign", row.det_sign},
                      {"log_abs_det", row.log_abs_det}, {"F", row.free_energy}});
    }
    csv = out.str();
    report = {{"rows", rows}, {"eigen_crossings", brackets(r.eigen_crossings)},
              {"det_crossings", brackets(r.det_crossings)}, {"coincide", r.coincide}, {"grid_step", r.grid_step}};
    return r.coincide ? kOk : kAnalysisFailure;
  }

  if (c.command == "oracle") {
    const auto exact = bz::exact_inference(model);
    json marginals = json::array();
    for (const auto& p : exact.marginals) marginals.push_back({p[0], p[1]});
    json pairs = json::array();
    for (const auto& p : exact.pair_marginals) pairs.push_back({p[0], p[1], p[2], p[3]});
    report = {{"Z", exact.z()}, {"log_Z", exact.log_z}, {"marginals", marginals}, {"pair_marginals", pairs}};
    const auto run = bz::lbp_run(model, bz::MessageState::uniform(g), {0.5, 1e-12, 100000});
    report["lbp_converged"] = run.converged;
    report["bethe_gap"] = run.converged ? json(bz::free_energy(model, run.beliefs) + exact.log_z) : json(nullptr);
    return kOk;
  }

  bz::fail(bz::ErrorKind::InvalidArgument, "run", "unknown command " + c.command);
}

bool is_input_error(bz::ErrorKind k) {
  switch (k) {
    case bz::ErrorKind::SchemaError:
    case bz::ErrorKind::IoError:
    case bz::ErrorKind::UnknownGenerator:
    case bz::ErrorKind::InvalidArgument:
    case bz::ErrorKind::DisconnectedGraph:
    case bz::ErrorKind::SelfLoop:
    case bz::ErrorKind::DuplicateEdge:
    case bz::ErrorKind::TooLarge:
    case bz::ErrorKind::NonPositiveTemperature:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  CLI::App app{"Bethe free energy, LBP fixed points and graph zeta functions"};
  app.require_subcommand(1, 1);

  auto add_model = [&](CLI::App* sub) { sub->add_option("--model", c.model_path, "model JSON file")->required(); };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", c.out_path, "report path (default stdout)"); };

  auto* lbp = app.add_subcommand("lbp", "run loopy belief propagation");
  add_model(lbp);
  add_out(lbp);
  lbp->add_option("--damping", c.damping)->check(CLI::Range(0.0, 0.999999));
  lbp->add_option("--tol", c.tol)->check(CLI::PositiveNumber);
  lbp->add_option("--max-iter", c.max_iter)->check(CLI::PositiveNumber);
  lbp->add_option("--init", c.init)->check(CLI::IsMember({"uniform", "random", "file"}));
  lbp->add_option("--init-file", c.init_path, "JSON with \"log_eta\"");
  lbp->add_option("--seed", c.seed);

  auto* bethe = app.add_subcommand("bethe", "evaluate F, its gradient and Hessian determinant at a point");
  add_model(bethe);
  add_out(bethe);
  bethe->add_option("--point", c.point_path, "pseudomarginals JSON {\"m\", \"chi\"}")->required();

  auto* zeta = app.add_subcommand("zeta", "edge zeta function in determinant, Ihara and product form");
  add_model(zeta);
  add_out(zeta);
  zeta->add_option("--point", c.point_path, "take weights from these pseudomarginals");
  zeta->add_option("--u", c.u, "constant weight on every directed edge");
  zeta->add_option("--max-len", c.max_len, "truncation length of the prime-cycle product (0 = skip)");

  auto* analyze = app.add_subcommand("analyze", "enumerate fixed points, classify them and check the index sum");
  add_model(analyze);
  add_out(analyze);
  analyze->add_option("--tol", c.tol)->check(CLI::PositiveNumber);
  analyze->add_option("--lattice", c.lattice)->check(CLI::PositiveNumber);
  analyze->add_option("--restarts", c.restarts)->check(CLI::NonNegativeNumber);
  analyze->add_option("--lbp-starts", c.lbp_starts)->check(CLI::NonNegativeNumber);
  analyze->add_option("--seed", c.seed);

  auto* sweep = app.add_subcommand("sweep", "track the high-temperature fixed point while t decreases");
  add_model(sweep);
  add_out(sweep);
  sweep->add_option("--t-start", c.t_start)->check(CLI::PositiveNumber);
  sweep->add_option("--t-end", c.t_end)->check(CLI::PositiveNumber);
  sweep->add_option("--steps", c.steps)->check(CLI::PositiveNumber);
  sweep->add_option("--tol", c.tol)->check(CLI::PositiveNumber);
  sweep->add_option("--format", c.format)->check(CLI::IsMember({"csv", "json"}));

  auto* certify = app.add_subcommand("certify", "uniqueness certificate for the LBP fixed point");
  add_model(certify);
  add_out(certify);

  auto* oracle = app.add_subcommand("oracle", "exact inference by enumeration and the Bethe gap");
  add_model(oracle);
  add_out(oracle);

  auto* verify = app.add_subcommand("verify", "randomized identity checks");
  add_out(verify);
  verify->add_option("--suite", c.suite)->check(CLI::IsMember(bz::verify_suites()));
  verify->add_option("--trials", c.trials)->check(CLI::PositiveNumber);
  verify->add_option("--seed", c.seed);

  auto* generate = app.add_subcommand("generate", "write a built-in model");
  add_out(generate);
  generate->add_option("--name", c.generator)->required();
  generate->add_option("--n", c.gen_n);
  generate->add_option("--m", c.gen_m);
  generate->add_option("--coupling", c.gen_j);
  generate->add_option("--field", c.gen_h);
  generate->add_option("--seed", c.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  c.command = app.get_subcommands().front()->get_name();
  if (c.command == "sweep" && !(c.t_start > c.t_end)) {
    std::cerr << "error: --t-start must exceed --t-end\n";
    return kInputError;
  }

  json report;
  std::string csv;
  int status = kOk;
  try {
    status = run_command(c, report, csv);
  } catch (const bz::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_input_error(e.kind()) ? kInputError : kAnalysisFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kAnalysisFailure;
  }

  std::string text;
  if (c.command == "generate") {
    // The model stays loadable: readers ignore the extra keys.
    report["config"] = config_json(c);
    report["schema_version"] = bz::kSchemaVersion;
    text = report.dump(2) + "\n";
  } else if (c.command == "sweep" && c.format == "csv") {
    text = "# " + json{{"config", config_json(c)}, {"schema_version", bz::kSchemaVersion}}.dump() + "\n" + csv;
  } else {
    json full{{"config", config_json(c)}, {"schema_version", bz::kSchemaVersion}, {"report", report}};
    text = full.dump(2) + "\n";
  }
  if (c.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(c.out_path);
    if (!out || !(out << text)) {
      std::cerr << "error: cannot write " << c.out_path << '\n';
      return kInputError;
    }
  }
  return status;
}
