// orbitgeo: command-line front end. Matrices are read and written in the
// {"n", "entries"} JSON format; results go to stdout as JSON.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "orbitgeo/bch.hpp"
#include "orbitgeo/geodesics.hpp"
#include "orbitgeo/matrix_io.hpp"
#include "orbitgeo/minimal_diag.hpp"
#include "orbitgeo/random.hpp"
#include "orbitgeo/suites.hpp"
#include "orbitgeo/unitary_groups.hpp"

namespace fs = std::filesystem;
using namespace orbitgeo;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::optional<double> tol;
  bool json = false;
  std::string out_dir;
};

std::string phases_json(const RealVector& p) {
  std::string s = "[";
  for (Index j = 0; j < p.size(); ++j) s += (j ? ", " : "") + io::format_double(p(j));
  return s + "]";
}

std::string doubles_json(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t j = 0; j < v.size(); ++j) s += (j ? ", " : "") + io::format_double(v[j]);
  return s + "]";
}

geo::DiagonalObservable observable_from(const Matrix& b) {
  require_square(b, "observable");
  if (spectral_norm(off_diag_part(b)) > 0.0 || b.diagonal().imag().cwiseAbs().maxCoeff() > 0.0)
    throw Error(ErrorKind::invalid_input, "observable b must be a real diagonal matrix");
  return geo::DiagonalObservable(b.diagonal().real());
}

void emit(const Globals& g, const std::string& name, const std::string& body) {
  std::cout << body << '\n';
  if (!g.out_dir.empty()) {
    fs::create_directories(g.out_dir);
    std::ofstream(fs::path(g.out_dir) / name) << body << '\n';
  }
}

int cmd_minlift(const Globals& g, const std::string& in) {
  const AntiHermitianMatrix z(io::read_matrix(in));
  const mindiag::QuotientSolution q = mindiag::quotient_norm(z, g.tol.value_or(mindiag::kDefaultTol));
  if (g.json) {
    emit(g, "minlift.json",
         fmt::format("{{\"value\": {}, \"best_diagonal\": {}, \"iterations\": {}, \"certificate_gap\": {}, "
                     "\"lower_bound\": {}}}",
                     io::format_double(q.value), phases_json(q.best_diagonal.phases()), q.iterations,
                     io::format_double(q.certificate_gap), io::format_double(q.lower_bound)));
  } else {
    fmt::print("quotient norm {:.12g}\ncertificate gap {:.3e} after {} iterations\nbest diagonal phases {}\n", q.value,
               q.certificate_gap, q.iterations, phases_json(q.best_diagonal.phases()));
  }
  return 0;
}

int cmd_geodesic(const Globals& g, const std::string& b_path, const std::string& z_path, const std::string& k_path,
                 double t) {
  geo::GeodesicSpec spec{observable_from(io::read_matrix(b_path)), AntiHermitianMatrix(io::read_matrix(z_path)),
                         std::nullopt, 0.0, 0.0};
  if (!k_path.empty()) spec.k0 = AntiHermitianMatrix(io::read_matrix(k_path));
  emit(g, "geodesic.json", io::matrix_to_json(geo::geodesic_eval(spec, t)));
  return 0;
}

int cmd_length(const Globals& g, const std::string& spec_path, int panels) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(io::read_text(spec_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::format, std::string("length spec: ") + e.what());
  }
  if (!doc.contains("b") || !doc.contains("z0") || !doc.contains("interval") || !doc["interval"].is_array() ||
      doc["interval"].size() != 2)
    throw Error(ErrorKind::format, "length spec needs \"b\", \"z0\" and a two-element \"interval\"");
  geo::GeodesicSpec spec{observable_from(io::matrix_from_json(doc["b"].dump())),
                         AntiHermitianMatrix(io::matrix_from_json(doc["z0"].dump())), std::nullopt,
                         doc["interval"][0].get<double>(), doc["interval"][1].get<double>()};
  if (doc.contains("k0")) spec.k0 = AntiHermitianMatrix(io::matrix_from_json(doc["k0"].dump()));

  geo::QuadratureConfig qc;
  qc.panels = panels;
  if (g.tol) qc.tol = *g.tol;
  const geo::LengthReport r = geo::curve_length(spec, qc);
  emit(g, "length.json",
       fmt::format("{{\"length\": {}, \"quadrature_nodes\": {}, \"est_error\": {}, \"node_times\": {}, "
                   "\"per_node_speeds\": {}}}",
                   io::format_double(r.length), r.quadrature_nodes, io::format_double(r.est_error),
                   doubles_json(r.node_times), doubles_json(r.per_node_speeds)));
  if (!g.out_dir.empty()) {
    std::ofstream csv(fs::path(g.out_dir) / "speed.csv");
    csv << "t,speed\n";
    for (std::size_t k = 0; k < r.node_times.size(); ++k)
      csv << io::format_double(r.node_times[k]) << ',' << io::format_double(r.per_node_speeds[k]) << '\n';
  }
  return 0;
}

int cmd_membership(const Globals& g, const std::string& in, const std::string& cls, const std::vector<Index>& cuts,
                   double threshold, double drift) {
  groups::MembershipConfig mc;
  mc.cuts = cuts;
  mc.threshold = threshold;
  mc.drift = drift;
  const groups::MembershipVerdict v = groups::membership(io::read_matrix(in), groups::parse_class(cls), mc);
  std::vector<double> cut_d(v.evidence.tail_profile.cut_indices.begin(), v.evidence.tail_profile.cut_indices.end());
  std::vector<double> drift_v(v.evidence.diag_modulus_drift.begin(), v.evidence.diag_modulus_drift.end());
  std::string factor = "null";
  if (v.evidence.factor)
    factor = fmt::format("{{\"K\": {}, \"D\": {}}}", io::matrix_to_json(v.evidence.factor->k.matrix()),
                         io::matrix_to_json(v.evidence.factor->d.matrix()));
  emit(g, "membership.json",
       fmt::format("{{\"class\": \"{}\", \"member\": {}, \"cuts\": {}, \"tail_norms\": {}, \"diag_modulus_drift\": {}, "
                   "\"factor\": {}}}",
                   groups::to_string(v.cls), v.member ? "true" : "false", doubles_json(cut_d),
                   doubles_json(v.evidence.tail_profile.tail_norms), doubles_json(drift_v), factor));
  return 0;
}

int cmd_factor(const Globals& g, const std::string& in) {
  const groups::UnitaryFactorization f = groups::factor_kd(io::read_matrix(in));
  emit(g, "factor.json",
       fmt::format("{{\"K\": {}, \"D\": {}}}", io::matrix_to_json(f.k.matrix()), io::matrix_to_json(f.d.matrix())));
  return 0;
}

int cmd_bch(const Globals& g, const std::string& x_path, const std::string& y_path, int order, bool no_guard) {
  const AntiHermitianMatrix x(io::read_matrix(x_path));
  const AntiHermitianMatrix y(io::read_matrix(y_path));
  const bch::BchResult r =
      bch::bch_log(x, y, {order, no_guard ? bch::Guard::off : bch::Guard::strict_log2});
  emit(g, "bch.json",
       fmt::format("{{\"value\": {}, \"truncation_estimate\": {}, \"term_norms\": {}}}", io::matrix_to_json(r.value),
                   io::format_double(r.truncation_estimate), doubles_json(r.term_norms)));
  return 0;
}

int cmd_gen(const Globals& g, const std::string& kind, int n, double scale) {
  emit(g, "random.json", io::matrix_to_json(rnd::gen_random(rnd::parse_kind(kind), n, scale, g.seed)));
  return 0;
}

int cmd_verify(const Globals& g, const std::string& suite, int n, int trials, const std::string& replay) {
  if (!replay.empty()) {
    const auto outcomes = suites::replay_report(io::read_text(replay));
    bool all = true;
    for (const auto& o : outcomes) {
      all = all && o.reproduced;
      fmt::print("replay {} trial {}: recorded {:.17g}, replayed {:.17g}: {}\n", o.property, o.trial, o.recorded,
                 o.replayed, o.reproduced ? "reproduced" : "NOT reproduced");
    }
    if (outcomes.empty()) fmt::print("replay: report lists no failures\n");
    return all ? 0 : 1;
  }

  std::vector<suites::Suite> which;
  if (suite == "all") {
    which = suites::all_suites();
  } else {
    which.push_back(suites::parse_suite(suite));
  }
  bool all_pass = true;
  for (suites::Suite s : which) {
    suites::SuiteConfig cfg;
    cfg.suite = s;
    cfg.n = n;
    cfg.trials = trials;
    cfg.seed = g.seed;
    const suites::SuiteReport report = suites::run_suite(cfg);
    all_pass = all_pass && report.all_pass();
    const std::string jsonl = suites::report_jsonl(report);
    if (g.json) {
      std::cout << jsonl;
    } else {
      std::cout << suites::report_summary(report);
    }
    if (!g.out_dir.empty()) {
      fs::create_directories(g.out_dir);
      std::ofstream(fs::path(g.out_dir) / fmt::format("report_{}.jsonl", suites::to_string(s))) << jsonl;
    }
  }
  return all_pass ? 0 : 1;
}

std::vector<Index> parse_cuts(const std::string& s) {
  std::vector<Index> cuts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      cuts.push_back(static_cast<Index>(v));
    } catch (const std::exception&) {
      throw Error(ErrorKind::invalid_input, "bad cut index '" + item + "'");
    }
  }
  return cuts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orbitgeo: quotient norms, unitary groups and orbit geodesics"};
  app.require_subcommand(1);
  Globals g;
  double tol = 0.0;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  auto* tol_opt = app.add_option("--tol", tol, "Solver tolerance");
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_option("--out", g.out_dir, "Also write outputs to this directory");

  std::string in, b_path, z_path, k_path, x_path, y_path, spec_path, cls = "ukd", cuts_s, suite, replay, kind;
  double t = 0.0, threshold = 1e-6, drift = 1e-6, scale = 1.0;
  int panels = 16, order = 8, n = 4, trials = 10;
  bool no_guard = false;

  auto* minlift = app.add_subcommand("minlift", "Quotient norm and best diagonal of an anti-Hermitian Z");
  minlift->add_option("--in", in, "Z as matrix JSON")->required();
  auto* geodesic = app.add_subcommand("geodesic", "Evaluate e^{K0} e^{tZ0} b e^{-tZ0} e^{-K0}");
  geodesic->add_option("--b", b_path, "Diagonal observable")->required();
  geodesic->add_option("--z0", z_path, "Anti-Hermitian Z0")->required();
  geodesic->add_option("--k0", k_path, "Optional base transport K0");
  geodesic->add_option("--t", t, "Curve parameter")->required();
  auto* length = app.add_subcommand("length", "Finsler length of a geodesic segment");
  length->add_option("--spec", spec_path, "JSON with b, z0, optional k0 and interval")->required();
  length->add_option("--panels", panels, "Gauss-Legendre panels")->capture_default_str();
  auto* member = app.add_subcommand("membership", "Group membership test");
  member->add_option("--in", in, "Unitary as matrix JSON")->required();
  member->add_option("--class", cls, "uk, ud, ukd or ukplusd")->capture_default_str();
  member->add_option("--cuts", cuts_s, "Comma-separated truncation cuts");
  member->add_option("--threshold", threshold, "Tail threshold")->capture_default_str();
  member->add_option("--drift", drift, "Diagonal modulus drift bound")->capture_default_str();
  auto* factor = app.add_subcommand("factor", "Factor u = e^K e^D");
  factor->add_option("--in", in, "Unitary as matrix JSON")->required();
  auto* bchc = app.add_subcommand("bch", "Partial BCH sum of log(e^X e^Y)");
  bchc->add_option("--x", x_path, "X")->required();
  bchc->add_option("--y", y_path, "Y")->required();
  bchc->add_option("--order", order, "Highest order")->capture_default_str();
  bchc->add_flag("--no-guard", no_guard, "Skip the convergence guard");
  auto* gen = app.add_subcommand("gen", "Random instance");
  gen->add_option("--kind", kind, "anti_hermitian, diagonal_ah, compact_role or distinct_diag_b")->required();
  gen->add_option("--n", n, "Dimension")->capture_default_str();
  gen->add_option("--scale", scale, "Scale")->capture_default_str();
  auto* verify = app.add_subcommand("verify", "Run property suites");
  verify->add_option("--suite", suite, "Suite name or 'all'")->required();
  verify->add_option("--n", n, "Dimension")->capture_default_str();
  verify->add_option("--trials", trials, "Trials")->capture_default_str();
  verify->add_option("--replay", replay, "Re-run the failures in a report");

  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  if (tol_opt->count() > 0) g.tol = tol;

  try {
    if (*minlift) return cmd_minlift(g, in);
    if (*geodesic) return cmd_geodesic(g, b_path, z_path, k_path, t);
    if (*length) return cmd_length(g, spec_path, panels);
    if (*member) return cmd_membership(g, in, cls, cuts_s.empty() ? std::vector<Index>{} : parse_cuts(cuts_s), threshold, drift);
    if (*factor) return cmd_factor(g, in);
    if (*bchc) return cmd_bch(g, x_path, y_path, order, no_guard);
    if (*gen) return cmd_gen(g, kind, n, scale);
    if (*verify) return cmd_verify(g, suite, n, trials, replay);
  } catch (const Error& e) {
    fmt::print(stderr, "error [{}]: {}\n", to_string(e.kind()), e.what());
    return 2;
  }
  return 0;
}
