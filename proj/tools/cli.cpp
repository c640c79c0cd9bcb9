#include "cli.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include "divproj/divergences.hpp"
#include "divproj/estimators.hpp"
#include "divproj/families.hpp"
#include "divproj/io.hpp"
#include "divproj/oracle.hpp"
#include "divproj/projection.hpp"
#include "divproj/sampling.hpp"
#include "divproj/sufficiency.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

namespace divproj::cli {
namespace {

using json = nlohmann::ordered_json;

struct RunConfig {
  double tolerance = 1e-10;
  double equivalence = 1e-6;
  int max_iterations = 200;
  std::uint64_t seed = 0;
  std::string format = "json";
  unsigned threads = 1;
};

// Numbers go out at 12 significant digits in both formats.
double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return round12(v);
}

json vec(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

std::string fmt12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void text_out(std::ostream& out, const std::string& prefix, const json& j) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      text_out(out, prefix.empty() ? it.key() : prefix + "." + it.key(), it.value());
    }
    return;
  }
  out << prefix << ":";
  if (j.is_array()) {
    bool flat = true;
    for (const auto& e : j) flat = flat && !e.is_structured();
    if (flat) {
      for (const auto& e : j) {
        out << ' ';
        if (e.is_number_float()) {
          out << fmt12(e.get<double>());
        } else if (e.is_string()) {
          out << e.get<std::string>();
        } else {
          out << e.dump();
        }
      }
      out << '\n';
    } else {
      out << ' ' << j.size() << " entries\n";
    }
    return;
  }
  if (j.is_number_float()) {
    out << ' ' << fmt12(j.get<double>()) << '\n';
  } else if (j.is_string()) {
    out << ' ' << j.get<std::string>() << '\n';
  } else {
    out << ' ' << j.dump() << '\n';
  }
}

void emit(std::ostream& out, const RunConfig& cfg, const json& report) {
  if (cfg.format == "json") {
    out << report.dump(2) << '\n';
  } else {
    text_out(out, "", report);
  }
}

json report_json(const SolveReport& r) {
  json j;
  j["route"] = to_string(r.route);
  j["theta_star"] = vec(r.theta_star);
  j["p_star"] = vec(r.p_star.probs());
  j["residual_norm"] = num(r.residual_norm);
  j["iterations"] = r.iterations;
  j["multistart"] = r.multistart;
  if (!r.note.empty()) j["note"] = r.note;
  json trace = json::array();
  for (const auto& t : r.trace) trace.push_back({{"theta", vec(t.theta)}, {"residual", num(t.residual)}});
  j["trace"] = std::move(trace);
  return j;
}

Vector parse_vector(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end == item.c_str() || *end != '\0') {
      throw Error(ErrorCode::InputError, "bad number '" + item + "' in list '" + text + "'");
    }
    vals.push_back(v);
  }
  Vector v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
  return v;
}

NewtonOptions newton_options(const RunConfig& cfg) {
  NewtonOptions o;
  o.tolerance = cfg.tolerance;
  o.max_iterations = cfg.max_iterations;
  o.threads = cfg.threads;
  return o;
}

// Family with its alpha replaced when the command line gives one.
FamilySpec with_alpha(const FamilySpec& spec, std::optional<double> alpha) {
  if (!alpha || spec.kind() == FamilyKind::Exponential) return spec;
  return FamilySpec(spec.kind(), spec.q(), spec.f(), Alpha(*alpha));
}

json base_report(const char* command, const RunConfig& cfg) {
  json j;
  j["command"] = command;
  j["seed"] = cfg.seed;
  return j;
}

// ---------------------------------------------------------------------------

struct DivergenceArgs {
  std::string kind = "kl";
  double alpha = 1.0;
  std::string p;
  std::string q;
};

int run_divergence(const DivergenceArgs& a, const RunConfig& cfg, std::ostream& out) {
  const auto p = io::load_distribution(a.p);
  const auto q = io::load_distribution(a.q);
  if (!(p.alphabet == q.alphabet)) throw Error(ErrorCode::InputError, "P and Q alphabets differ");
  const DivergenceKind kind = parse_divergence_kind(a.kind);
  const double v = divergence(kind, p.dist, q.dist, Alpha(a.alpha));
  if (cfg.format == "text") {
    out << fmt12(v) << '\n';
    return 0;
  }
  json j = base_report("divergence", cfg);
  j["kind"] = a.kind;
  j["alpha"] = num(a.alpha);
  j["value"] = num(v);
  emit(out, cfg, j);
  return 0;
}

struct FamilyEvalArgs {
  std::string spec;
  std::string theta;
};

int run_family_eval(const FamilyEvalArgs& a, const RunConfig& cfg, std::ostream& out) {
  const auto fam = io::load_family(a.spec);
  const Vector theta = parse_vector(a.theta);
  const FamilyPoint fp = evaluate(fam.spec, theta);
  json j = base_report("family eval", cfg);
  j["kind"] = to_string(fam.spec.kind());
  j["alphabet"] = fam.alphabet.symbols();
  j["theta"] = vec(theta);
  j["p"] = vec(fp.p.probs());
  j["z"] = num(fp.z);
  emit(out, cfg, j);
  return 0;
}

struct EstimateArgs {
  std::string kind = "mle";
  std::optional<double> alpha;
  std::string family;
  std::string sample;
  std::string route = "eq";
  std::string init;
};

int run_estimate(const EstimateArgs& a, const RunConfig& cfg, std::ostream& out) {
  const auto fam = io::load_family(a.family);
  const auto smp = io::load_sample(a.sample, fam.alphabet);
  const EstimatorKind kind = parse_estimator_kind(a.kind);
  const double alpha = a.alpha ? *a.alpha : (kind == EstimatorKind::MLE ? 1.0 : fam.spec.alpha().value());
  const Estimator est{kind, Alpha(alpha)};
  const Vector init = a.init.empty() ? Vector::Zero(static_cast<Eigen::Index>(fam.spec.k()))
                                     : parse_vector(a.init);
  json j = base_report("estimate", cfg);
  j["kind"] = a.kind;
  j["alpha"] = num(alpha);
  j["family"] = to_string(fam.spec.kind());
  if (matched_family(kind) != fam.spec.kind()) j["warning"] = "unmatched pair, no equivalence guarantee";
  std::optional<SolveReport> eq;
  std::optional<SolveReport> lik;
  int code = 0;
  auto attempt = [&](const char* name, auto&& fn, std::optional<SolveReport>& slot) {
    try {
      slot = fn();
      j[name] = report_json(*slot);
    } catch (const NoConvergence& e) {
      j[name] = {{"status", "no_convergence"},
                 {"message", e.what()},
                 {"best_theta", vec(e.best_iterate())},
                 {"residual", num(e.residual())}};
      code = 1;
    }
  };
  if (a.route == "eq" || a.route == "both") {
    attempt("estimating_equation",
            [&] { return solve_estimating_equation(est, fam.spec, smp.sample, init, newton_options(cfg)); }, eq);
  }
  if (a.route == "lik" || a.route == "both") {
    attempt("likelihood", [&] { return maximize_likelihood(est, fam.spec, smp.sample, init); }, lik);
  }
  if (eq && lik) j["route_gap"] = num((eq->theta_star - lik->theta_star).cwiseAbs().maxCoeff());
  emit(out, cfg, j);
  return code;
}

struct ProjectEquationArgs {
  std::string kind = "iproj";
  std::optional<double> alpha;
  std::string family;
  std::string sample;
  std::string init;
};

int run_project_equation(const ProjectEquationArgs& a, const RunConfig& cfg, std::ostream& out) {
  const auto fam = io::load_family(a.family);
  const FamilySpec spec = with_alpha(fam.spec, a.alpha);
  const auto smp = io::load_sample(a.sample, fam.alphabet);
  const ProjectionKind kind = parse_projection_kind(a.kind);
  const Vector init = a.init.empty() ? Vector::Zero(static_cast<Eigen::Index>(spec.k()))
                                     : parse_vector(a.init);
  const SolveReport r = solve_projection_equation(kind, spec, smp.sample, init, newton_options(cfg));
  json j = base_report("project equation", cfg);
  j["kind"] = a.kind;
  j["family"] = to_string(spec.kind());
  j["report"] = report_json(r);
  emit(out, cfg, j);
  return 0;
}

json forward_json(const ForwardProjectionResult& r) {
  json j;
  j["p_star"] = vec(r.p_star.probs());
  j["theta"] = vec(r.theta);
  j["z"] = num(r.z);
  json mask = json::array();
  for (bool b : r.support_mask) mask.push_back(b);
  j["support_mask"] = std::move(mask);
  j["objective"] = num(r.objective);
  j["kkt"] = {{"lambda", vec(r.kkt.lambda)}, {"nu", num(r.kkt.nu)}, {"mu", vec(r.kkt.mu)}};
  j["iterations"] = r.iterations;
  j["fallback_used"] = r.fallback_used;
  return j;
}

struct ProjectForwardArgs {
  double alpha = 2.0;
  std::string q;
  std::string linear;
};

int run_project_forward(const ProjectForwardArgs& a, const RunConfig& cfg, std::ostream& out) {
  const auto q = io::load_distribution(a.q);
  const LinearFamilySpec l = io::load_linear(a.linear);
  const ForwardProjectionResult r = forward_b_projection(q.dist, l, Alpha(a.alpha));
  json j = base_report("project forward", cfg);
  j["alpha"] = num(a.alpha);
  j["alphabet"] = q.alphabet.symbols();
  j["result"] = forward_json(r);
  emit(out, cfg, j);
  return 0;
}

struct ProjectReverseArgs {
  std::optional<double> alpha;
  std::string family;
  std::string sample;
};

int run_project_reverse(const ProjectReverseArgs& a, const RunConfig& cfg, std::ostream& out) {
  const auto fam = io::load_family(a.family);
  const FamilySpec spec = with_alpha(fam.spec, a.alpha);
  const auto smp = io::load_sample(a.sample, fam.alphabet);
  const ReverseProjectionResult r = reverse_b_projection(smp.sample, spec);
  json j = base_report("project reverse", cfg);
  j["alpha"] = num(spec.alpha().value());
  j["closure_only"] = r.closure_only;
  j["membership_residual"] = num(r.membership);
  j["z"] = num(r.z);
  j["report"] = report_json(r.report);
  emit(out, cfg, j);
  return 0;
}

struct PythagorasArgs {
  double alpha = 2.0;
  std::string q;
  std::string linear;
  int trials = 20;
};

int run_pythagoras(const PythagorasArgs& a, const RunConfig& cfg, std::ostream& out) {
  if (a.trials < 1) throw Error(ErrorCode::InputError, "--trials must be at least 1");
  const auto q = io::load_distribution(a.q);
  const LinearFamilySpec l = io::load_linear(a.linear);
  const Alpha alpha(a.alpha);
  const ForwardProjectionResult r = forward_b_projection(q.dist, l, alpha);
  std::mt19937_64 rng(cfg.seed);
  double min_gap = std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  for (int t = 0; t < a.trials; ++t) {
    const Distribution p = random_member(l, r.p_star, rng);
    const double gap = pythagorean_gap(alpha, p, r.p_star, q.dist);
    min_gap = std::min(min_gap, gap);
    max_abs = std::max(max_abs, std::abs(gap));
  }
  const bool full = r.p_star.strictly_positive();
  json j = base_report("verify pythagoras", cfg);
  j["alpha"] = num(a.alpha);
  j["trials"] = a.trials;
  j["p_star"] = vec(r.p_star.probs());
  j["full_support"] = full;
  j["min_gap"] = num(min_gap);
  j["max_abs_gap"] = num(max_abs);
  j["inequality_holds"] = min_gap >= -1e-10;
  if (a.alpha < 1.0 || full) j["equality_holds"] = max_abs <= 1e-9;
  emit(out, cfg, j);
  return 0;
}

struct SuffstatArgs {
  std::string model;
  std::optional<double> alpha;
  std::string family;
  std::string sample;
};

int run_suffstat(const SuffstatArgs& a, const RunConfig& cfg, std::ostream& out) {
  const auto fam = io::load_family(a.family);
  const auto smp = io::load_sample(a.sample, fam.alphabet);
  const FamilyKind kind = parse_family_kind(a.model);
  const double alpha = a.alpha ? *a.alpha : fam.spec.alpha().value();
  const SufficientStatistic s =
      sufficient_statistic(kind, smp.sample, fam.spec.q(), fam.spec.f(), Alpha(alpha));
  json j = base_report("suffstat", cfg);
  j["model"] = to_string(kind);
  j["alpha"] = num(alpha);
  j["value"] = vec(s.value);
  j["components"] = s.components_doc;
  emit(out, cfg, j);
  return 0;
}

struct SuffcheckArgs {
  std::string model;
  std::optional<double> alpha;
  std::string family;
  std::string sample_a;
  std::string sample_b;
  std::string grid = "-1:1:101";
};

int run_suffcheck(const SuffcheckArgs& a, const RunConfig& cfg, std::ostream& out) {
  const auto fam = io::load_family(a.family);
  const FamilyKind kind = parse_family_kind(a.model);
  const double alpha = a.alpha ? *a.alpha : fam.spec.alpha().value();
  const FamilySpec spec(kind, fam.spec.q(), fam.spec.f(), Alpha(kind == FamilyKind::Exponential ? 1.0 : alpha));
  const auto sa = io::load_sample(a.sample_a, fam.alphabet);
  const auto sb = io::load_sample(a.sample_b, fam.alphabet);
  const ThetaGrid grid = ThetaGrid::parse(a.grid, spec.k());
  std::vector<Vector> pts;
  for (std::size_t i = 0; i < grid.size(); ++i) pts.push_back(grid.point(i));
  const FactorizationReport r =
      factorization_check(spec, sa.sample.empirical(), sb.sample.empirical(), pts);
  json j = base_report("suffcheck", cfg);
  j["model"] = to_string(kind);
  j["t_gap"] = num(r.t_gap);
  j["equal_statistic"] = r.equal_t;
  j["grid_points"] = r.grid_points;
  j["mean_difference"] = num(r.mean_difference);
  j["max_deviation"] = num(r.max_deviation);
  j["argmax_a"] = vec(grid.point(r.argmax_a));
  j["argmax_b"] = vec(grid.point(r.argmax_b));
  j["argmax_equal"] = r.argmax_equal;
  if (r.equal_t) j["constant_difference"] = r.max_deviation <= 1e-9;
  emit(out, cfg, j);
  return 0;
}

struct OracleForwardArgs {
  std::string kind = "dpd";
  double alpha = 2.0;
  std::string q;
  std::string linear;
  std::size_t resolution = 60;
  bool interior = false;
};

int run_oracle_forward(const OracleForwardArgs& a, const RunConfig& cfg, std::ostream& out) {
  const auto q = io::load_distribution(a.q);
  std::optional<LinearFamilySpec> l;
  if (!a.linear.empty()) l.emplace(io::load_linear(a.linear));
  const SimplexGrid grid(q.dist.size(), a.resolution, a.interior);
  const ForwardOracleResult r = grid_forward_min(parse_divergence_kind(a.kind), Alpha(a.alpha), q.dist,
                                                 l ? &*l : nullptr, grid, cfg.threads);
  json j = base_report("oracle forward", cfg);
  j["kind"] = a.kind;
  j["alpha"] = num(a.alpha);
  j["resolution"] = a.resolution;
  j["grid_points"] = grid.size();
  j["candidates"] = r.candidates;
  j["p_best"] = vec(r.p_best.probs());
  j["value"] = num(r.value);
  j["route"] = to_string(Route::Oracle);
  emit(out, cfg, j);
  return 0;
}

struct OracleReverseArgs {
  std::string kind = "kl";
  std::optional<double> alpha;
  std::string family;
  std::string sample;
  std::string grid = "-2:2:201";
};

int run_oracle_reverse(const OracleReverseArgs& a, const RunConfig& cfg, std::ostream& out) {
  const auto fam = io::load_family(a.family);
  const auto smp = io::load_sample(a.sample, fam.alphabet);
  const double alpha = a.alpha ? *a.alpha : fam.spec.alpha().value();
  const ThetaGrid grid = ThetaGrid::parse(a.grid, fam.spec.k());
  const ReverseOracleResult r = grid_reverse_min(parse_divergence_kind(a.kind), Alpha(alpha),
                                                 smp.sample.empirical(), fam.spec, grid, cfg.threads);
  json j = base_report("oracle reverse", cfg);
  j["kind"] = a.kind;
  j["alpha"] = num(alpha);
  j["grid_points"] = grid.size();
  j["admissible"] = r.admissible;
  j["cell"] = num(grid.cell());
  j["theta_best"] = vec(r.theta_best);
  j["value"] = num(r.value);
  j["likelihood_agrees"] = r.likelihood_agrees;
  j["route"] = to_string(Route::Oracle);
  emit(out, cfg, j);
  return 0;
}

struct SampleArgs {
  std::string family;
  std::string theta;
  long long n = 100;
  double rate = 0.0;
  std::string outlier;
  std::string output;
};

int run_sample(const SampleArgs& a, const RunConfig& cfg, std::ostream& out) {
  if (a.n < 1) throw Error(ErrorCode::InputError, "--n must be at least 1");
  const auto fam = io::load_family(a.family);
  const Vector theta = a.theta.empty() ? Vector::Zero(static_cast<Eigen::Index>(fam.spec.k()))
                                       : parse_vector(a.theta);
  std::optional<Contamination> cont;
  if (a.rate > 0.0 || !a.outlier.empty()) {
    if (a.outlier.empty()) throw Error(ErrorCode::InputError, "--rate needs --outlier");
    const auto idx = fam.alphabet.index_of(a.outlier);
    if (!idx) throw Error(ErrorCode::UnknownLabel, "outlier label '" + a.outlier + "' not in the alphabet");
    cont = Contamination{a.rate, *idx};
  }
  const SampleData s =
      sample_generator(fam.spec, theta, static_cast<std::size_t>(a.n), cont, cfg.seed);
  json j = json::parse(io::sample_to_json(fam.alphabet, s));
  j["seed"] = cfg.seed;
  const std::string text = j.dump() + "\n";
  if (a.output.empty()) {
    out << text;
  } else {
    std::ofstream f(a.output, std::ios::binary);
    if (!f) throw Error(ErrorCode::InputError, "cannot write '" + a.output + "'");
    f << text;
    json summary = base_report("sample", cfg);
    summary["n"] = a.n;
    summary["output"] = a.output;
    summary["counts"] = s.counts();
    emit(out, cfg, summary);
  }
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimum-divergence estimation and projection on finite alphabets", "divproj"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file (flags override it)");

  RunConfig cfg;
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--seed", cfg.seed, "Random seed, recorded in every report");
  app.add_option("--threads", cfg.threads, "Worker threads for grids and multi-start")
      ->check(CLI::Range(1u, 256u));
  app.add_option("--tol", cfg.tolerance, "Residual tolerance")->check(CLI::PositiveNumber);
  app.add_option("--equivalence-tol", cfg.equivalence, "Cross-route tolerance")->check(CLI::PositiveNumber);
  app.add_option("--max-iter", cfg.max_iterations, "Newton iteration cap")->check(CLI::PositiveNumber);

  std::function<int()> action;

  DivergenceArgs div;
  auto* c_div = app.add_subcommand("divergence", "Evaluate a divergence D(P, Q)");
  c_div->add_option("--kind", div.kind, "kl|renyi|dpd|rae")->check(CLI::IsMember({"kl", "renyi", "dpd", "rae"}));
  c_div->add_option("--alpha", div.alpha, "Divergence order");
  c_div->add_option("--p", div.p, "Distribution file for P")->required();
  c_div->add_option("--q", div.q, "Distribution file for Q")->required();
  c_div->callback([&] { action = [&] { return run_divergence(div, cfg, out); }; });

  FamilyEvalArgs fe;
  auto* c_fam = app.add_subcommand("family", "Parametric family tools");
  c_fam->require_subcommand(1);
  c_fam->fallthrough();
  auto* c_fe = c_fam->add_subcommand("eval", "Evaluate P_theta and Z(theta)");
  c_fe->add_option("--spec", fe.spec, "Family file")->required();
  c_fe->add_option("--theta", fe.theta, "Comma-separated parameter")->required();
  c_fe->callback([&] { action = [&] { return run_family_eval(fe, cfg, out); }; });

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Solve an estimating equation or maximize a likelihood");
  c_est->add_option("--kind", est.kind, "mle|hellinger|basu|jones")
      ->check(CLI::IsMember({"mle", "hellinger", "basu", "jones"}));
  c_est->add_option("--alpha", est.alpha, "Estimator alpha (default: the family's)");
  c_est->add_option("--family", est.family, "Family file")->required();
  c_est->add_option("--sample", est.sample, "Sample file (JSON or CSV)")->required();
  c_est->add_option("--route", est.route, "eq|lik|both")->check(CLI::IsMember({"eq", "lik", "both"}));
  c_est->add_option("--init", est.init, "Comma-separated starting parameter");
  c_est->callback([&] { action = [&] { return run_estimate(est, cfg, out); }; });

  auto* c_proj = app.add_subcommand("project", "Projections");
  c_proj->require_subcommand(1);
  c_proj->fallthrough();
  ProjectForwardArgs pf;
  auto* c_pf = c_proj->add_subcommand("forward", "Forward B_alpha-projection of Q on a linear family");
  c_pf->add_option("--alpha", pf.alpha, "Divergence order")->required();
  c_pf->add_option("--q", pf.q, "Distribution file for Q")->required();
  c_pf->add_option("--linear", pf.linear, "Linear family file")->required();
  c_pf->callback([&] { action = [&] { return run_project_forward(pf, cfg, out); }; });
  ProjectReverseArgs pr;
  auto* c_pr = c_proj->add_subcommand("reverse", "Reverse B_alpha-projection through the forward one");
  c_pr->add_option("--alpha", pr.alpha, "Divergence order (default: the family's)");
  c_pr->add_option("--family", pr.family, "Non-normalized alpha-power-law family file")->required();
  c_pr->add_option("--sample", pr.sample, "Sample file")->required();
  c_pr->callback([&] { action = [&] { return run_project_reverse(pr, cfg, out); }; });
  ProjectEquationArgs pe;
  auto* c_pe = c_proj->add_subcommand("equation", "Solve a projection equation");
  c_pe->add_option("--kind", pe.kind, "iproj|bproj|ialpha|dalpha")
      ->check(CLI::IsMember({"iproj", "bproj", "ialpha", "dalpha"}));
  c_pe->add_option("--alpha", pe.alpha, "Family alpha override");
  c_pe->add_option("--family", pe.family, "Family file")->required();
  c_pe->add_option("--sample", pe.sample, "Sample file")->required();
  c_pe->add_option("--init", pe.init, "Comma-separated starting parameter");
  c_pe->callback([&] { action = [&] { return run_project_equation(pe, cfg, out); }; });

  auto* c_ver = app.add_subcommand("verify", "Property checks");
  c_ver->require_subcommand(1);
  c_ver->fallthrough();
  PythagorasArgs py;
  auto* c_py = c_ver->add_subcommand("pythagoras", "Pythagorean gaps for random members of a linear family");
  c_py->add_option("--alpha", py.alpha, "Divergence order")->required();
  c_py->add_option("--q", py.q, "Distribution file for Q")->required();
  c_py->add_option("--linear", py.linear, "Linear family file")->required();
  c_py->add_option("--trials", py.trials, "Number of random members");
  c_py->callback([&] { action = [&] { return run_pythagoras(py, cfg, out); }; });

  const auto models = CLI::IsMember({"exp", "bpow", "mpow", "aexp"});
  SuffstatArgs ss;
  auto* c_ss = app.add_subcommand("suffstat", "Sufficient statistic of a sample");
  c_ss->add_option("--model", ss.model, "exp|bpow|mpow|aexp")->required()->check(models);
  c_ss->add_option("--alpha", ss.alpha, "Alpha (default: the family's)");
  c_ss->add_option("--family", ss.family, "Family file giving Q and f")->required();
  c_ss->add_option("--sample", ss.sample, "Sample file")->required();
  c_ss->callback([&] { action = [&] { return run_suffstat(ss, cfg, out); }; });

  SuffcheckArgs sc;
  auto* c_sc = app.add_subcommand("suffcheck", "Factorization check for two samples");
  c_sc->add_option("--model", sc.model, "exp|bpow|mpow|aexp")->required()->check(models);
  c_sc->add_option("--alpha", sc.alpha, "Alpha (default: the family's)");
  c_sc->add_option("--family", sc.family, "Family file giving Q and f")->required();
  c_sc->add_option("--sample-a", sc.sample_a, "First sample")->required();
  c_sc->add_option("--sample-b", sc.sample_b, "Second sample")->required();
  c_sc->add_option("--grid", sc.grid, "lo:hi:steps");
  c_sc->callback([&] { action = [&] { return run_suffcheck(sc, cfg, out); }; });

  auto* c_or = app.add_subcommand("oracle", "Brute-force grid minimizers");
  c_or->require_subcommand(1);
  c_or->fallthrough();
  OracleForwardArgs of;
  auto* c_of = c_or->add_subcommand("forward", "Grid argmin of D(P, Q) over the simplex");
  c_of->add_option("--kind", of.kind, "kl|renyi|dpd|rae")->check(CLI::IsMember({"kl", "renyi", "dpd", "rae"}));
  c_of->add_option("--alpha", of.alpha, "Divergence order");
  c_of->add_option("--q", of.q, "Distribution file for Q")->required();
  c_of->add_option("--linear", of.linear, "Linear family file (optional constraint)");
  c_of->add_option("--resolution", of.resolution, "Grid denominator d")->check(CLI::PositiveNumber);
  c_of->add_flag("--interior", of.interior, "Drop boundary grid points");
  c_of->callback([&] { action = [&] { return run_oracle_forward(of, cfg, out); }; });
  OracleReverseArgs orv;
  auto* c_orv = c_or->add_subcommand("reverse", "Grid argmin of D(P_hat, P_theta) over theta");
  c_orv->add_option("--kind", orv.kind, "kl|renyi|dpd|rae")->check(CLI::IsMember({"kl", "renyi", "dpd", "rae"}));
  c_orv->add_option("--alpha", orv.alpha, "Divergence order (default: the family's)");
  c_orv->add_option("--family", orv.family, "Family file")->required();
  c_orv->add_option("--sample", orv.sample, "Sample file")->required();
  c_orv->add_option("--grid", orv.grid, "lo:hi:steps per axis");
  c_orv->callback([&] { action = [&] { return run_oracle_reverse(orv, cfg, out); }; });

  SampleArgs sa;
  auto* c_sa = app.add_subcommand("sample", "Draw a (possibly contaminated) sample from P_theta");
  c_sa->add_option("--family", sa.family, "Family file")->required();
  c_sa->add_option("--theta", sa.theta, "Comma-separated parameter (default 0)");
  c_sa->add_option("--n", sa.n, "Sample size");
  c_sa->add_option("--rate", sa.rate, "Contamination rate in [0, 1)");
  c_sa->add_option("--outlier", sa.outlier, "Outlier label");
  c_sa->add_option("--output", sa.output, "Write the sample here instead of standard output");
  c_sa->callback([&] { action = [&] { return run_sample(sa, cfg, out); }; });

  // Global options may also follow the subcommand.
  std::function<void(CLI::App*)> pass_up = [&](CLI::App* a) {
    for (CLI::App* sub : a->get_subcommands({})) {
      sub->fallthrough();
      pass_up(sub);
    }
  };
  pass_up(&app);

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("divproj");
  for (const auto& a : args) argv_store.push_back(a);
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  if (!action) {
    err << app.help();
    return 2;
  }
  try {
    return action();
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    if (cfg.format == "json" && !is_input_error(e.code())) {
      json j;
      j["status"] = to_string(e.code());
      j["message"] = e.what();
      j["seed"] = cfg.seed;
      if (const auto* nc = dynamic_cast<const NoConvergence*>(&e)) {
        j["best_theta"] = vec(nc->best_iterate());
        j["residual"] = num(nc->residual());
      }
      out << j.dump(2) << '\n';
    }
    return is_input_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace divproj::cli
