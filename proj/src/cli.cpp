#include "binreg/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "binreg/error.hpp"
#include "binreg/io.hpp"
#include "binreg/links.hpp"
#include "binreg/mle.hpp"
#include "binreg/overlap.hpp"
#include "binreg/parallel.hpp"
#include "binreg/verify.hpp"

namespace binreg::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr int kSchema = 1;
constexpr std::size_t kFailuresShown = 5;

// JSON has no infinities or NaN.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json array(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

Json header(std::string_view command) {
  Json j;
  j["schema"] = kSchema;
  j["command"] = command;
  return j;
}

void flatten(const Json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

struct Output {
  std::string format = "json";
  std::string json_out;  // also write the JSON report here

  void emit(const Json& j, std::ostream& out) const {
    if (format == "plain") {
      flatten(j, "", out);
    } else {
      out << j.dump(2) << '\n';
    }
    if (!json_out.empty()) {
      std::ofstream f(json_out, std::ios::binary);
      f << j.dump(2) << '\n';
      f.close();
      if (!f) throw ConfigError("cannot write '" + json_out + "'");
    }
  }
};

Json overlap_json(const OverlapReport& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["method"] = to_string(r.method);
  if (r.bounds) {
    j["bounds"] = {{"L0", r.bounds->l0}, {"U0", r.bounds->u0}, {"L1", r.bounds->l1}, {"U1", r.bounds->u1}};
  }
  if (r.tie != TiePattern::None) j["tie_pattern"] = to_string(r.tie);
  if (r.direction_hint) j["direction_hint"] = *r.direction_hint;
  if (r.cone) {
    j["cone"] = {{"feasible", r.cone->feasible},
                 {"margin", number(r.cone->margin)},
                 {"residual", number(r.cone->residual)},
                 {"pivots", r.cone->pivots},
                 {"k", array(r.cone->k)},
                 {"m", array(r.cone->m)}};
  }
  return j;
}

// Cone LP for the verdict; for one predictor the interval test is reported
// alongside it.
OverlapReport detect(const Dataset& ds, const std::string& method) {
  if (method == "scalar") return scalar_overlap(ds);
  if (method == "cone" || ds.d() != 1) return cone_overlap(ds);
  OverlapReport cone = cone_overlap(ds);
  const OverlapReport scalar = scalar_overlap(ds);
  cone.bounds = scalar.bounds;
  cone.tie = scalar.tie;
  if (!cone.direction_hint) cone.direction_hint = scalar.direction_hint;
  return cone;
}

Json link_json(const LinkFamily& link) {
  const ConcavityCertificate c = certify_log_concavity(link);
  Json j;
  j["name"] = link.name();
  j["certificate"] = to_string(c.verdict);
  return j;
}

// fit ------------------------------------------------------------------------

struct FitArgs {
  std::string csv;
  std::string link = "logit";
  double tol = FitOptions{}.tol;
  std::size_t max_iter = FitOptions{}.max_iter;
  bool force = false;
};

int run_fit(const FitArgs& a, const Output& o, std::ostream& out) {
  FitOptions opt;
  opt.tol = a.tol;
  opt.max_iter = a.max_iter;
  validate(opt);
  const LinkFamily& link = link_by_name(a.link);
  const CsvTable table = read_csv(a.csv);
  const Dataset& ds = table.data;

  Json j = header("fit");
  j["link"] = link_json(link);
  j["n"] = ds.n();
  j["d"] = ds.d();
  j["n1"] = ds.n1();
  j["predictors"] = table.predictor_names;
  const OverlapReport ov = detect(ds, "auto");
  j["overlap"] = to_string(ov.verdict);
  if (ov.verdict == OverlapVerdict::Separated && !a.force) {
    j["status"] = "Refused";
    j["note"] = "data are separated: the maximum likelihood estimate does not exist; rerun with --force";
    o.emit(j, out);
    return kSeparated;
  }
  const FitResult fr = fit(ds, link, opt);
  j["status"] = to_string(fr.status);
  j["alpha"] = number(fr.params.alpha);
  j["beta"] = array(fr.params.beta);
  j["loglik"] = number(fr.loglik);
  j["score_norm"] = number(fr.score_norm);
  j["iterations"] = fr.iterations;
  j["hessian_condition"] = number(fr.hessian_condition);
  j["multi_start"] = fr.multi_start;
  if (!fr.note.empty()) j["note"] = fr.note;
  o.emit(j, out);
  return kOk;
}

// overlap ----------------------------------------------------------------------

struct OverlapArgs {
  std::string csv;
  std::string method = "auto";
};

int run_overlap(const OverlapArgs& a, const Output& o, std::ostream& out) {
  const CsvTable table = read_csv(a.csv);
  const Dataset& ds = table.data;
  Json j = header("overlap");
  j["n"] = ds.n();
  j["d"] = ds.d();
  const OverlapReport r = detect(ds, a.method);
  j["rank_ok"] = extended_design(ds).rank_ok;
  const Json report = overlap_json(r);
  for (const auto& [k, v] : report.items()) j[k] = v;
  o.emit(j, out);
  return r.verdict == OverlapVerdict::Separated ? kSeparated : kOk;
}

// verify -----------------------------------------------------------------------

struct VerifyArgs {
  std::string theorem = "all";
  std::string link = "all";
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::vector<std::size_t> dims;
};

Theorem parse_theorem(const std::string& s) {
  if (s == "sign") return Theorem::SignMatch;
  if (s == "zero") return Theorem::ZeroIffEqualMeans;
  if (s == "angle") return Theorem::AcuteAngle;
  throw ConfigError("unknown theorem '" + s + "'");
}

std::vector<std::size_t> default_dims(Theorem t) {
  switch (t) {
    case Theorem::SignMatch: return {1};
    case Theorem::ZeroIffEqualMeans: return {1, 2, 3};
    case Theorem::AcuteAngle: return {2, 3};
  }
  return {1};
}

int run_verify(const VerifyArgs& a, const Output& o, std::ostream& out) {
  std::vector<Theorem> theorems;
  if (a.theorem == "all") {
    theorems = {Theorem::SignMatch, Theorem::ZeroIffEqualMeans, Theorem::AcuteAngle};
  } else {
    theorems = {parse_theorem(a.theorem)};
  }
  std::vector<const LinkFamily*> links;
  if (a.link == "all") {
    const auto all = builtin_links();
    links.assign(all.begin(), all.end());
  } else {
    links = {&link_by_name(a.link)};
  }
  for (std::size_t d : a.dims) {
    if (d == 0) throw ConfigError("--dims entries must be positive");
  }

  Json j = header("verify");
  j["seed"] = a.seed;
  j["trials"] = a.trials;
  Json cells = Json::array();
  bool failed = false;
  std::size_t total_trials = 0, total_passes = 0, total_failures = 0;
  for (Theorem t : theorems) {
    // The sign theorem is a statement about one predictor.
    std::vector<std::size_t> dims = a.dims.empty() || t == Theorem::SignMatch ? default_dims(t) : a.dims;
    for (const LinkFamily* link : links) {
      for (std::size_t d : dims) {
        SuiteConfig cfg;
        cfg.theorem = t;
        cfg.link = link;
        cfg.trials = a.trials;
        cfg.seed = a.seed;
        cfg.dims = {d};
        const SuiteSummary s = run_suite(cfg);
        Json c;
        c["theorem"] = to_string(t);
        c["link"] = s.link;
        c["d"] = d;
        c["asserted"] = s.asserted;
        c["trials"] = s.trials;
        c["passes"] = s.passes;
        c["failures"] = s.failures;
        c["skipped"] = s.skipped;
        c["worst_slack"] = number(s.worst_slack);
        Json examples = Json::array();
        for (std::size_t k = 0; k < s.failed.size() && k < kFailuresShown; ++k) {
          examples.push_back({{"trial", s.failed[k].index}, {"n", s.failed[k].n}, {"details", s.failed[k].details}});
        }
        if (!examples.empty()) c["failed"] = examples;
        cells.push_back(c);
        if (s.asserted) {
          total_trials += s.trials;
          total_passes += s.passes;
          total_failures += s.failures;
          failed = failed || s.failures > 0;
        }
      }
    }
  }
  j["summary"] = {{"trials", total_trials},
                  {"passes", total_passes},
                  {"failures", total_failures},
                  {"verified", !failed}};
  j["cells"] = cells;
  o.emit(j, out);
  return failed ? kVerificationFailure : kOk;
}

// simulate ---------------------------------------------------------------------

struct SimulateArgs {
  std::string kind = "overlapping";
  std::size_t n = 30;
  std::size_t d = 1;
  std::uint64_t seed = 1;
  double shift = 1.0;
  std::string pattern = "g0-low";
  std::string out_path;
};

TiePattern parse_pattern(const std::string& s) {
  if (s == "g0-low") return TiePattern::Group0PointAtLowerEndOfGroup1;
  if (s == "g0-high") return TiePattern::Group0PointAtUpperEndOfGroup1;
  if (s == "g1-low") return TiePattern::Group1PointAtLowerEndOfGroup0;
  if (s == "g1-high") return TiePattern::Group1PointAtUpperEndOfGroup0;
  throw ConfigError("unknown tie pattern '" + s + "'");
}

Dataset simulate(const SimulateArgs& a) {
  if (a.kind == "overlapping") return gen_overlapping(a.n, a.d, a.seed);
  if (a.kind == "separated") return gen_separated(a.n, a.d, a.seed);
  if (a.kind == "balanced") return gen_balanced(a.n, a.d, a.seed);
  if (a.kind == "tied") return gen_tied_scalar(a.n, a.seed);
  if (a.kind == "tie-pattern") return gen_tie_pattern(a.n, parse_pattern(a.pattern), a.seed);
  if (a.kind == "gaussian") {
    const auto dd = static_cast<Eigen::Index>(a.d);
    Vector mu1 = Vector::Zero(dd);
    mu1(0) = a.shift;
    return gen_gaussian(a.n, Vector::Zero(dd), mu1, Matrix::Identity(dd, dd), a.seed);
  }
  throw ConfigError("unknown dataset kind '" + a.kind + "'");
}

int run_simulate(const SimulateArgs& a, const Output& o, std::ostream& out) {
  const Dataset ds = simulate(a);
  if (a.out_path.empty()) {
    write_csv(out, ds);
    return kOk;
  }
  std::ofstream f(a.out_path, std::ios::binary);
  if (!f) throw CsvError("cannot open '" + a.out_path + "' for writing");
  write_csv(f, ds);
  f.close();
  if (!f) throw CsvError("failed writing '" + a.out_path + "'");
  Json j = header("simulate");
  j["kind"] = a.kind;
  j["seed"] = a.seed;
  j["n"] = ds.n();
  j["d"] = ds.d();
  j["n1"] = ds.n1();
  j["path"] = a.out_path;
  o.emit(j, out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Binary regression with separation checks and theorem verification", "binreg"};
  app.require_subcommand(1);
  app.fallthrough();
  Output o;
  app.add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"json", "plain"}))
      ->capture_default_str();

  const std::vector<std::string> link_names{"logit", "probit", "cloglog", "cauchit", "uniform"};

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "Fit an intercept-plus-slope model to a CSV file");
  fit_cmd->add_option("--csv", fa.csv, "Input CSV with a y column")->required();
  fit_cmd->add_option("--link", fa.link, "Inverse link")->check(CLI::IsMember(link_names))->capture_default_str();
  fit_cmd->add_option("--tol", fa.tol, "Score tolerance (standardized scale)")->capture_default_str();
  fit_cmd->add_option("--max-iter", fa.max_iter, "Newton iteration cap")->capture_default_str();
  fit_cmd->add_flag("--force", fa.force, "Fit even when the data are separated");
  fit_cmd->add_option("--json-out", o.json_out, "Also write the JSON report to this file");

  OverlapArgs oa;
  auto* ov_cmd = app.add_subcommand("overlap", "Test whether the two label groups overlap");
  ov_cmd->add_option("--csv", oa.csv, "Input CSV with a y column")->required();
  ov_cmd->add_option("--method", oa.method, "auto: cone LP plus intervals when d = 1")
      ->check(CLI::IsMember({"auto", "scalar", "cone"}))
      ->capture_default_str();

  VerifyArgs va;
  auto* ver_cmd = app.add_subcommand("verify", "Run the property suites");
  ver_cmd->add_option("--theorem", va.theorem, "sign, zero, angle or all")
      ->check(CLI::IsMember({"sign", "zero", "angle", "all"}))
      ->capture_default_str();
  std::vector<std::string> links_all = link_names;
  links_all.push_back("all");
  ver_cmd->add_option("--link", va.link, "Inverse link or all")->check(CLI::IsMember(links_all))->capture_default_str();
  ver_cmd->add_option("--trials", va.trials, "Datasets per (theorem, link, d) cell")->capture_default_str();
  ver_cmd->add_option("--seed", va.seed, "Generator seed")->capture_default_str();
  ver_cmd->add_option("--dims", va.dims, "Predictor dimensions (default depends on the theorem)")->delimiter(',');

  SimulateArgs sa;
  auto* sim_cmd = app.add_subcommand("simulate", "Write a generated dataset as CSV");
  sim_cmd->add_option("--kind", sa.kind, "Generator")
      ->check(CLI::IsMember({"overlapping", "separated", "balanced", "gaussian", "tied", "tie-pattern"}))
      ->capture_default_str();
  sim_cmd->add_option("--n", sa.n, "Rows")->capture_default_str();
  sim_cmd->add_option("--d", sa.d, "Predictors")->capture_default_str();
  sim_cmd->add_option("--seed", sa.seed, "Generator seed")->capture_default_str();
  sim_cmd->add_option("--shift", sa.shift, "gaussian: mean shift of group 1 along x1")->capture_default_str();
  sim_cmd->add_option("--pattern", sa.pattern, "tie-pattern: g0-low, g0-high, g1-low or g1-high")
      ->capture_default_str();
  sim_cmd->add_option("--out", sa.out_path, "Write the CSV here and print a JSON summary");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "binreg: " << e.what() << '\n';
    if (const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front()) {
      err << sub->help();
    }
    return kInputError;
  }

  configure_threads_from_env();
  try {
    if (*fit_cmd) return run_fit(fa, o, out);
    if (*ov_cmd) return run_overlap(oa, o, out);
    if (*ver_cmd) return run_verify(va, o, out);
    if (*sim_cmd) return run_simulate(sa, o, out);
  } catch (const Error& e) {
    err << "binreg: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace binreg::cli
