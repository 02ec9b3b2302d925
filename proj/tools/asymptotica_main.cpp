// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Subcommands:
//   constants gamma|eta   limit constants with certified bounds
//   series davis|normal|klesov   certified series values / remainders
//   verify theorem11|gs|klesov|heyde|prop21|prop31   eps-sweep experiments
//   dist pzero|tail|kolmogorov|mc   exact walk distribution queries
//
// Exit codes: 0 success (verify: pass), 1 verify fail verdict, 2 usage or
// precondition error, 3 requested tolerance unachievable.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "asymptotica/constants.hpp"
#include "asymptotica/dist.hpp"
#include "asymptotica/series.hpp"
#include "asymptotica/specfn.hpp"
#include "asymptotica/verify.hpp"

namespace {

using namespace asymptotica;
using nlohmann::ordered_json;

struct OutputOpts {
  std::string format = "text";
  std::string out_path;
};

void add_output_opts(CLI::App* cmd, OutputOpts& o) {
  cmd->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--out", o.out_path, "Write the report to this file");
}

// temp file + rename so readers never see a partial report
void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string());
    f << content;
  }
  fs::rename(tmp, target);
}

void emit(const OutputOpts& o, const std::string& text_form,
          const ordered_json& json_form, const std::string& csv_form) {
  std::string body;
  if (o.format == "json")
    body = json_form.dump(2) + "\n";
  else if (o.format == "csv")
    body = csv_form;
  else
    body = text_form;
  if (o.out_path.empty())
    std::cout << body;
  else
    write_atomic(o.out_path, body);
}

std::string certified_text(const CertifiedValue& v) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.17g %.17g %llu\n", v.value, v.error_bound,
                static_cast<unsigned long long>(v.terms_used));
  return buf;
}

ordered_json certified_json(const CertifiedValue& v) {
  return ordered_json{{"value", v.value},
                      {"error_bound", v.error_bound},
                      {"bound_kind", v.kind == BoundKind::rigorous
                                         ? "rigorous"
                                         : "standard_error"},
                      {"terms_used", v.terms_used}};
}

std::string certified_csv(const CertifiedValue& v) {
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "value,error_bound,terms_used\r\n%.17g,%.17g,%llu\r\n",
                v.value, v.error_bound,
                static_cast<unsigned long long>(v.terms_used));
  return buf;
}

specfn::LogConvention conv_of(const std::string& s) {
  if (s == "paper") return specfn::LogConvention::paper;
  if (s == "pure-ln") return specfn::LogConvention::pure_ln;
  throw CLI::ValidationError("--log-convention must be paper or pure-ln");
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asymptotica: certified series, limit constants and eps-sweep "
               "verification for weighted random-walk tail sums"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from a TOML/INI config file");
  app.footer("Environment: ASYMPTOTICA_THREADS caps worker threads,\n"
             "ASYMPTOTICA_ISA=scalar|avx2 forces a kernel variant.");

  std::string convention = "paper";
  app.add_option("--log-convention", convention,
                 "Series log convention: paper (ln(n v e)) or pure-ln")
      ->check(CLI::IsMember({"paper", "pure-ln"}));

  // ---- constants ----
  auto* c_cmd = app.add_subcommand("constants", "Limit constants");
  c_cmd->require_subcommand(1);
  double c_delta = 0.0, c_tol = 1e-8;
  std::string c_dist;
  OutputOpts c_out;

  auto* c_gamma = c_cmd->add_subcommand("gamma", "Euler-Maclaurin constant");
  c_gamma->add_option("--delta", c_delta, "Weight exponent in [0, 1]")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  c_gamma->add_option("--tol", c_tol, "Certified absolute tolerance")
      ->capture_default_str();
  add_output_opts(c_gamma, c_out);

  auto* c_eta = c_cmd->add_subcommand("eta", "Weighted return-probability sum");
  c_eta->add_option("--dist", c_dist, "Lattice law (mini-language)")
      ->required();
  c_eta->add_option("--delta", c_delta, "Weight exponent in [0, 1]")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  c_eta->add_option("--tol", c_tol, "Certified absolute tolerance")
      ->capture_default_str();
  add_output_opts(c_eta, c_out);

  // ---- series ----
  auto* s_cmd = app.add_subcommand("series", "Certified series evaluation");
  s_cmd->require_subcommand(1);
  std::string s_dist;
  bool s_normal_marker = false;
  double s_sigma = 1.0, s_delta = 0.0, s_eps = 0.0;
  bool s_remainder = false;
  std::uint64_t s_n_exact = 0, s_n_normal = 0;
  OutputOpts s_out;

  auto add_series_opts = [&](CLI::App* sub, bool with_delta) {
    sub->add_option("--dist", s_dist, "Lattice law, or 'normal[:sigma]'");
    sub->add_flag("--normal", s_normal_marker, "Exactly normal law");
    sub->add_option("--sigma", s_sigma, "Sigma for --normal")
        ->capture_default_str();
    if (with_delta)
      sub->add_option("--delta", s_delta, "Weight exponent in [0, 1]")
          ->check(CLI::Range(0.0, 1.0))
          ->capture_default_str();
    sub->add_option("--eps", s_eps, "Threshold multiplier (eps > 0)")
        ->required();
    sub->add_flag("--remainder", s_remainder,
                  "Also subtract the leading term");
    sub->add_option("--n-exact", s_n_exact, "Exact-probability head length");
    sub->add_option("--n-normal", s_n_normal, "Normal-series head length");
    add_output_opts(sub, s_out);
  };
  auto* s_davis = s_cmd->add_subcommand(
      "davis", "sum (log n)^d/n P(|S_n| >= eps sqrt(n log n))");
  add_series_opts(s_davis, true);
  auto* s_norm = s_cmd->add_subcommand(
      "normal", "sum (log n)^d/n P(|N| >= eps sqrt(log n))");
  add_series_opts(s_norm, true);
  auto* s_klesov =
      s_cmd->add_subcommand("klesov", "sum P(|S_n| >= eps n)");
  add_series_opts(s_klesov, false);

  // ---- verify ----
  auto* v_cmd = app.add_subcommand("verify", "eps-sweep limit verification");
  v_cmd->require_subcommand(1);
  std::string v_dist, v_grid, v_extrap = "power_fit", v_csv_path;
  double v_delta = 0.0, v_tol = 0.02;
  std::uint64_t v_seed = 0, v_n_exact = 0, v_n_normal = 0;
  OutputOpts v_out;
  std::map<std::string, verify::Mode> v_modes = {
      {"theorem11", verify::Mode::theorem11},
      {"gs", verify::Mode::gs_leading},
      {"klesov", verify::Mode::klesov_normal},
      {"heyde", verify::Mode::heyde_leading},
      {"prop21", verify::Mode::prop21},
      {"prop31", verify::Mode::prop31},
  };
  for (auto& [name, mode] : v_modes) {
    auto* sub = v_cmd->add_subcommand(name);
    sub->add_option("--dist", v_dist, "Law under test, or 'normal[:sigma]'");
    sub->add_option("--delta", v_delta, "Weight exponent in [0, 1]")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--eps-grid", v_grid,
                    "Comma-separated strictly decreasing eps values");
    sub->add_option("--tol", v_tol, "Verdict tolerance")->capture_default_str();
    sub->add_option("--seed", v_seed, "Recorded in the report");
    sub->add_option("--extrapolation", v_extrap, "power_fit or last_point")
        ->check(CLI::IsMember({"power_fit", "last_point"}));
    sub->add_option("--n-exact", v_n_exact, "Plan override");
    sub->add_option("--n-normal", v_n_normal, "Plan override");
    sub->add_option("--csv", v_csv_path, "Also write per-eps rows as CSV");
    add_output_opts(sub, v_out);
  }

  // ---- dist ----
  auto* d_cmd = app.add_subcommand("dist", "Exact walk distribution queries");
  d_cmd->require_subcommand(1);
  std::string d_dist;
  std::uint64_t d_n = 0, d_reps = 100000, d_seed = 1;
  double d_t = 0.0;
  OutputOpts d_out;
  auto add_dist_opts = [&](CLI::App* sub, bool with_t) {
    sub->add_option("--dist", d_dist, "Lattice law (mini-language)")
        ->required();
    sub->add_option("--n", d_n, "Number of summands (n >= 1)")->required();
    if (with_t) sub->add_option("--t", d_t, "Threshold t >= 0")->required();
    add_output_opts(sub, d_out);
  };
  auto* d_pzero = d_cmd->add_subcommand("pzero", "P(S_n = 0)");
  add_dist_opts(d_pzero, false);
  auto* d_tail = d_cmd->add_subcommand("tail", "P(|S_n| >= t)");
  add_dist_opts(d_tail, true);
  auto* d_kol = d_cmd->add_subcommand(
      "kolmogorov", "sup_x |P(|S_n| >= sigma sqrt(n) x) - P(|N| >= x)|");
  add_dist_opts(d_kol, false);
  auto* d_mc = d_cmd->add_subcommand("mc", "Monte Carlo P(|S_n| >= t)");
  add_dist_opts(d_mc, true);
  d_mc->add_option("--reps", d_reps, "Replications (>= 100)")
      ->capture_default_str();
  d_mc->add_option("--seed", d_seed, "RNG seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    auto conv = conv_of(convention);

    if (c_gamma->parsed() || c_eta->parsed()) {
      CertifiedValue v;
      if (c_gamma->parsed()) {
        v = constants::gamma_delta(c_delta, c_tol, conv);
      } else {
        auto d = dist::parse_distribution(c_dist);
        v = constants::eta_delta(d, c_delta, c_tol, conv);
      }
      emit(c_out, certified_text(v), certified_json(v), certified_csv(v));
      return 0;
    }

    if (s_davis->parsed() || s_norm->parsed() || s_klesov->parsed()) {
      series::EvalPlan plan = series::EvalPlan::defaults_for(s_delta);
      plan.log_convention = conv;
      if (s_n_exact) plan.n_exact = s_n_exact;
      if (s_n_normal) plan.n_normal = s_n_normal;
      if (plan.n_normal < plan.n_exact) plan.n_normal = plan.n_exact;

      bool use_normal = s_normal_marker || s_dist == "normal" ||
                        s_dist.rfind("normal:", 0) == 0;
      if (!use_normal && s_dist.empty())
        throw std::invalid_argument("need --dist or --normal");
      std::optional<dist::LatticeDistribution> lat;
      series::ExactNormal nm{s_sigma};
      if (use_normal) {
        if (s_dist.rfind("normal:", 0) == 0) nm.sigma = std::stod(s_dist.substr(7));
      } else {
        lat = dist::parse_distribution(s_dist);
      }

      CertifiedValue v;
      double lead = 0.0;
      if (s_davis->parsed()) {
        double sigma = use_normal ? nm.sigma : lat->sigma();
        lead = series::davis_leading_term(sigma, s_eps, s_delta);
        if (s_remainder)
          v = use_normal ? series::davis_remainder(nm, s_eps, s_delta, plan)
                         : series::davis_remainder(*lat, s_eps, s_delta, plan);
        else
          v = use_normal ? series::davis_series(nm, s_eps, s_delta, plan)
                         : series::davis_series(*lat, s_eps, s_delta, plan);
      } else if (s_norm->parsed()) {
        lead = series::davis_leading_term(1.0, s_eps, s_delta);
        v = s_remainder ? series::normal_series_remainder(s_eps, s_delta, plan)
                        : series::normal_series(s_eps, s_delta, plan);
      } else {
        double sigma = use_normal ? nm.sigma : lat->sigma();
        lead = sigma * sigma / (s_eps * s_eps);
        if (s_remainder) {
          if (!use_normal)
            throw std::invalid_argument(
                "series klesov --remainder needs the exact-normal law");
          v = series::klesov_remainder(nm, s_eps, plan);
        } else {
          v = use_normal ? series::heyde_klesov_series(nm, s_eps, plan)
                         : series::heyde_klesov_series(*lat, s_eps, plan);
        }
      }
      std::string text = certified_text(v);
      ordered_json j = certified_json(v);
      if (s_remainder) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "leading_term %.17g\n", lead);
        text += buf;
        j["leading_term"] = lead;
      }
      emit(s_out, text, j, certified_csv(v));
      return 0;
    }

    for (auto& [name, mode] : v_modes) {
      CLI::App* sub = v_cmd->get_subcommand(name);
      if (!sub->parsed()) continue;
      verify::DistSpec ds = mode == verify::Mode::klesov_normal && v_dist.empty()
                                ? verify::DistSpec::normal()
                                : verify::DistSpec::parse(v_dist);
      verify::SweepSpec spec = verify::SweepSpec::defaults(mode, ds, v_delta);
      spec.plan.log_convention = conv;
      spec.tolerance = v_tol;
      spec.seed = v_seed;
      if (!v_grid.empty()) spec.eps_grid = parse_grid(v_grid);
      if (v_n_exact) spec.plan.n_exact = v_n_exact;
      if (v_n_normal) spec.plan.n_normal = v_n_normal;
      if (spec.plan.n_normal < spec.plan.n_exact)
        spec.plan.n_normal = spec.plan.n_exact;
      if (v_extrap == "last_point")
        spec.extrapolation = verify::Extrapolation::last_point;
      spec.validate();  // usage errors exit 2 before any heavy work

      verify::VerifyReport rep = verify::run_sweep(spec);
      std::string js = verify::to_json(rep);
      if (!v_out.out_path.empty())
        write_atomic(v_out.out_path, js);
      else if (v_out.format == "json")
        std::cout << js;
      if (!v_csv_path.empty()) write_atomic(v_csv_path, verify::to_csv(rep));
      if (v_out.format == "csv" && v_csv_path.empty())
        std::cout << verify::to_csv(rep);
      if (v_out.format == "text") {
        std::printf("mode %s  dist %s  delta %g\n", rep.mode.c_str(),
                    rep.dist.c_str(), rep.delta);
        for (const auto& p : rep.points)
          std::printf("  eps %-8g remainder %+.8f  (bound %.3g)\n", p.eps,
                      p.remainder, p.remainder_bound);
        std::printf("extrapolated %.8f +- %.3g  [model %s]\n",
                    rep.extrapolated.limit, rep.extrapolated.uncertainty,
                    rep.extrapolated.model.c_str());
        std::printf("target       %.8f +- %.3g\n", rep.target,
                    rep.target_uncertainty);
        std::printf("verdict      %s\n", rep.pass ? "pass" : "fail");
        if (!rep.error.empty())
          std::printf("error        %s\n", rep.error.c_str());
      }
      return rep.pass ? 0 : 1;
    }

    if (d_pzero->parsed() || d_tail->parsed() || d_kol->parsed() ||
        d_mc->parsed()) {
      if (d_n == 0) throw std::invalid_argument("--n must be >= 1");
      auto d = dist::parse_distribution(d_dist);
      CertifiedValue v{};
      if (d_pzero->parsed()) {
        v = {dist::pmf_at_zero(d, d_n), 1e-12, BoundKind::rigorous, d_n};
      } else if (d_tail->parsed()) {
        v = {dist::tail_two_sided(d, d_n, d_t), 1e-13, BoundKind::rigorous,
             d_n};
      } else if (d_kol->parsed()) {
        v = {dist::kolmogorov_two_sided(d, d_n), 1e-11, BoundKind::rigorous,
             d_n};
      } else {
        v = dist::mc_tail(d, d_n, d_t, d_reps, d_seed);
      }
      emit(d_out, certified_text(v), certified_json(v), certified_csv(v));
      return 0;
    }

    std::cerr << app.help();
    return 2;
  } catch (const tolerance_error& e) {
    std::cerr << "tolerance unachievable: " << e.what() << "\n";
    std::fprintf(stderr, "best: %.17g +- %.17g\n", e.best().value,
                 e.best().error_bound);
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
