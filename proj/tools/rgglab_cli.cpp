// rgglab: command-line front end for the random geometric graph experiments.
//
//   rgglab gen       --n N --seed S [--out FILE]
//   rgglab census    --n N (--mu M | --r R) [--eps E --lmax L --trials T --seed S]
//   rgglab census    --ns N1,N2,... --ell L (--mu M) ...         (scaling sweep)
//   rgglab hitting   --ns N1,N2,... --trials T --kappa K --seed S
//   rgglab analytic  --op {mu,ek1,ibeta,ibeta-asym,area-bounds,ek-shape,chernoff-box} ...
//   rgglab verify    [--quick]
//
// Exit codes: 0 success, 1 acceptance failure, 2 usage, 3 budget, 4 I/O.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rgglab/acceptance.hpp"
#include "rgglab/rgglab.hpp"

namespace {

using namespace rgglab;

constexpr int kExitOk = 0;
constexpr int kExitAcceptance = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;
constexpr int kExitIo = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::size_t threads = 0;
  std::string config;
  std::string format = "csv";
  std::string out;
  std::uint64_t seed = 1;
};

void add_common(CLI::App& sub, Common& c) {
  sub.add_option("--threads", c.threads, "Worker threads (0 = all cores)");
  sub.add_option("--config", c.config, "JSON file with the same keys as the flags; flags take precedence")
      ->check(CLI::ExistingFile);
  sub.add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub.add_option("--out", c.out, "Output file (default: standard output)");
  sub.add_option("--seed", c.seed, "Master seed");
}

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) return format_double(v.get<double>());
  throw UsageError("config values must be scalars or arrays of scalars");
}

// Fills every option of `sub` that was not given on the command line from
// the config file, by key = long option name.
void apply_config(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "config") continue;
    CLI::Option* opt = nullptr;
    try {
      opt = sub.get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError("unknown config key '" + key + "' for " + sub.get_name());
    }
    if (opt->count() > 0) continue;
    if (value.is_array()) {
      std::vector<std::string> items;
      for (const auto& v : value) items.push_back(json_scalar(v));
      opt->add_result(items);
    } else {
      opt->add_result(json_scalar(value));
    }
    try {
      opt->run_callback();
    } catch (const CLI::ParseError& e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
  }
}

void emit(const Table& t, const Common& c) {
  std::ostringstream buf;
  if (c.format == "json") write_json(buf, t);
  else write_csv(buf, t);
  if (c.out.empty()) {
    std::cout << buf.str();
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing to standard output");
    return;
  }
  std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open output file " + c.out);
  f << buf.str();
  f.close();
  if (!f) throw IoError("failed writing output file " + c.out);
}

// Radius from exactly one of --mu / --r, or mu = `fallback_mu` when neither is set.
double radius_from(std::size_t n, const CLI::Option* mu_opt, double mu, const CLI::Option* r_opt, double r,
                   std::optional<double> fallback_mu) {
  const bool has_mu = mu_opt->count() > 0, has_r = r_opt->count() > 0;
  if (has_mu && has_r) throw UsageError("--mu and --r are mutually exclusive");
  if (has_r) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw UsageError("--r must be a non-negative number");
    return r;
  }
  if (!has_mu) {
    if (!fallback_mu) throw UsageError("exactly one of --mu or --r is required");
    mu = *fallback_mu;
  }
  if (!(mu > 0.0 && mu <= static_cast<double>(n))) throw UsageError("--mu must lie in (0, n]");
  return r_of_mu(n, mu);
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw UsageError("--eps must lie in (0, 1/2)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random geometric graphs on the unit torus near the connectivity threshold"};
  app.require_subcommand(1);

  // gen
  Common gen_c;
  std::size_t gen_n = 0;
  CLI::App* gen = app.add_subcommand("gen", "Write n uniform points as index,x,y");
  add_common(*gen, gen_c);
  CLI::Option* gen_n_opt = gen->add_option("--n", gen_n, "Number of points");

  // census
  Common cen_c;
  std::size_t cen_n = 0, cen_lmax = 3, cen_trials = 1000, cen_ell = 2;
  double cen_mu = 1.0, cen_r = 0.0, cen_eps = 0.4, cen_alpha = 0.2, cen_kappa = 2.0;
  std::vector<std::size_t> cen_ns;
  CLI::App* cen = app.add_subcommand("census", "Component census campaign, or a scaling sweep with --ns");
  add_common(*cen, cen_c);
  CLI::Option* cen_n_opt = cen->add_option("--n", cen_n, "Number of points");
  CLI::Option* cen_ns_opt = cen->add_option("--ns", cen_ns, "Sizes for a scaling sweep")->delimiter(',');
  CLI::Option* cen_mu_opt = cen->add_option("--mu", cen_mu, "Expected isolated vertices; sets r");
  CLI::Option* cen_r_opt = cen->add_option("--r", cen_r, "Connection radius");
  cen->add_option("--eps", cen_eps, "Cluster tightness epsilon in (0, 1/2)");
  cen->add_option("--lmax", cen_lmax, "Largest component size counted");
  cen->add_option("--ell", cen_ell, "Component size for the scaling sweep");
  cen->add_option("--trials", cen_trials, "Trials per size");
  cen->add_option("--alpha", cen_alpha, "Solitary-test cell side in units of r");
  cen->add_option("--kappa", cen_kappa, "Threshold window (unused by census; accepted for shared configs)");

  // hitting
  Common hit_c;
  std::vector<std::size_t> hit_ns;
  std::size_t hit_trials = 500;
  double hit_kappa = 2.0;
  CLI::App* hit = app.add_subcommand("hitting", "Sweep of Pr(r_c = r_i) and Pr(Z > 0)");
  add_common(*hit, hit_c);
  CLI::Option* hit_ns_opt = hit->add_option("--ns", hit_ns, "Sizes, comma separated")->delimiter(',');
  hit->add_option("--trials", hit_trials, "Trials per size");
  hit->add_option("--kappa", hit_kappa, "Window: r_lower/upper = sqrt((log n -/+ kappa)/(pi n))");

  // analytic
  Common ana_c;
  std::string ana_op;
  std::size_t ana_n = 0, ana_ell = 2, ana_k = 3;
  double ana_mu = 1.0, ana_r = 0.0, ana_beta = 1.0 / 6.0, ana_eps = 0.4, ana_rho_over_r = 0.25;
  CLI::App* ana = app.add_subcommand("analytic", "Evaluate a closed-form or numerical quantity");
  add_common(*ana, ana_c);
  CLI::Option* ana_op_opt = ana->add_option("--op", ana_op, "Quantity");
  ana_op_opt->check(CLI::IsMember({"mu", "ek1", "ibeta", "ibeta-asym", "area-bounds", "ek-shape", "chernoff-box"}));
  CLI::Option* ana_n_opt = ana->add_option("--n", ana_n, "Number of points");
  CLI::Option* ana_mu_opt = ana->add_option("--mu", ana_mu, "Expected isolated vertices; sets r");
  CLI::Option* ana_r_opt = ana->add_option("--r", ana_r, "Connection radius");
  ana->add_option("--beta", ana_beta, "Exponent rate beta");
  ana->add_option("--ell", ana_ell, "Cluster size");
  ana->add_option("--eps", ana_eps, "Cluster tightness epsilon in (0, 1/2)");
  ana->add_option("--rho-over-r", ana_rho_over_r, "Cluster radius rho as a fraction of r");
  ana->add_option("--k", ana_k, "Cluster size for ek-shape");

  // verify
  Common ver_c;
  bool ver_quick = false;
  CLI::App* ver = app.add_subcommand("verify", "Run the acceptance suite");
  ver->add_option("--threads", ver_c.threads, "Worker threads (0 = all cores)");
  ver->add_option("--seed", ver_c.seed, "Master seed")->default_val(acceptance::Options{}.seed);
  ver->add_option("--config", ver_c.config, "JSON file with the same keys as the flags")->check(CLI::ExistingFile);
  ver->add_flag("--quick", ver_quick, "Sizes n <= 4096 and fewer trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      if (!gen_c.config.empty()) apply_config(*gen, gen_c.config);
      if (gen_n_opt->count() == 0) throw UsageError("gen needs --n");
      if (gen_n < 1) throw UsageError("--n must be at least 1");
      check_budget(static_cast<double>(gen_n), budget_from_env());
      emit(points_table(sample_points(gen_n, RandomSeed{gen_c.seed})), gen_c);
      return kExitOk;
    }

    if (cen->parsed()) {
      if (!cen_c.config.empty()) apply_config(*cen, cen_c.config);
      check_eps(cen_eps);
      if (cen_trials < 1) throw UsageError("--trials must be at least 1");
      if (!(cen_alpha > 0.0 && cen_alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
      if (cen_lmax < 2) throw UsageError("--lmax must be at least 2");
      CensusConfig cfg{cen_eps, cen_lmax, cen_alpha, 37.0};
      const double budget = budget_from_env();
      if (cen_ns_opt->count() > 0) {
        if (cen_n_opt->count() > 0) throw UsageError("--n and --ns are mutually exclusive");
        if (cen_r_opt->count() > 0) throw UsageError("a scaling sweep is parameterized by --mu, not --r");
        if (cen_ell < 2) throw UsageError("--ell must be at least 2");
        for (std::size_t i = 0; i < cen_ns.size(); ++i) {
          if (cen_ns[i] < 16) throw UsageError("sweep sizes must be at least 16");
          if (i > 0 && cen_ns[i] <= cen_ns[i - 1]) throw UsageError("sweep sizes must be strictly increasing");
          if (!(cen_mu > 0.0 && cen_mu <= static_cast<double>(cen_ns[i]))) throw UsageError("--mu must lie in (0, n]");
        }
        const ScalingSweep sw =
            scaling_sweep(cen_ns, cen_ell, cen_mu, cen_trials, RandomSeed{cen_c.seed}, cfg, cen_c.threads, budget);
        emit(scaling_table(sw.rows), cen_c);
        return kExitOk;
      }
      if (cen_n_opt->count() == 0) throw UsageError("census needs --n (or --ns for a sweep)");
      if (cen_n < 1) throw UsageError("--n must be at least 1");
      TrialPlan plan;
      plan.n = cen_n;
      plan.trials = cen_trials;
      plan.master_seed = RandomSeed{cen_c.seed};
      plan.census_cfg = cfg;
      plan.kappa = cen_kappa;
      if (!(cen_kappa > 0.0)) throw UsageError("--kappa must be positive");
      plan.radius = radius_from(cen_n, cen_mu_opt, cen_mu, cen_r_opt, cen_r, std::nullopt);
      const CensusRun run = run_census_trials(plan, cen_c.threads, budget);
      emit(estimate_table(run.rows), cen_c);
      return kExitOk;
    }

    if (hit->parsed()) {
      if (!hit_c.config.empty()) apply_config(*hit, hit_c.config);
      if (hit_ns_opt->count() == 0) throw UsageError("hitting needs --ns");
      if (hit_trials < 1) throw UsageError("--trials must be at least 1");
      if (!(hit_kappa > 0.0)) throw UsageError("--kappa must be positive");
      for (std::size_t i = 0; i < hit_ns.size(); ++i) {
        if (hit_ns[i] < 2) throw UsageError("sizes must be at least 2");
        if (i > 0 && hit_ns[i] <= hit_ns[i - 1]) throw UsageError("sizes must be strictly increasing");
      }
      const HittingSweep sw =
          hitting_sweep(hit_ns, hit_trials, hit_kappa, RandomSeed{hit_c.seed}, hit_c.threads, budget_from_env());
      emit(hitting_table(sw.rows), hit_c);
      return kExitOk;
    }

    if (ana->parsed()) {
      if (!ana_c.config.empty()) apply_config(*ana, ana_c.config);
      if (ana_op_opt->count() == 0) throw UsageError("analytic needs --op");
      std::vector<std::pair<std::string, double>> values;
      const auto need_n = [&](std::size_t min_n) {
        if (ana_n_opt->count() == 0) throw UsageError("--op " + ana_op + " needs --n");
        if (ana_n < min_n) throw UsageError("--n must be at least " + std::to_string(min_n));
      };
      if (ana_op == "mu") {
        need_n(1);
        const double r = radius_from(ana_n, ana_mu_opt, ana_mu, ana_r_opt, ana_r, std::nullopt);
        values = {{"mu", mu_of(ana_n, r)}, {"r", r}};
      } else if (ana_op == "ek1") {
        need_n(1);
        const double r = radius_from(ana_n, ana_mu_opt, ana_mu, ana_r_opt, ana_r, 1.0);
        values = {{"expected_k1", expected_k1_exact(ana_n, r)}, {"r", r}};
      } else if (ana_op == "ibeta" || ana_op == "ibeta-asym") {
        need_n(3);
        check_eps(ana_eps);
        if (ana_ell < 2) throw UsageError("--ell must be at least 2");
        if (!(ana_beta > 0.0)) throw UsageError("--beta must be positive");
        const double r = radius_from(ana_n, ana_mu_opt, ana_mu, ana_r_opt, ana_r, 1.0);
        if (!(r > 0.0)) throw UsageError("the radius must be positive");
        const IBetaParams p{ana_beta, ana_ell, ana_eps, ana_n, r};
        values = {{ana_op == "ibeta" ? "i_beta" : "i_beta_asymptotic",
                   ana_op == "ibeta" ? i_beta_quadrature(p) : i_beta_asymptotic(p)},
                  {"r", r}};
      } else if (ana_op == "area-bounds") {
        if (ana_r_opt->count() == 0) throw UsageError("--op area-bounds needs --r");
        if (!(ana_r > 0.0)) throw UsageError("--r must be positive");
        if (!(ana_rho_over_r >= 0.0 && ana_rho_over_r < 0.5)) throw UsageError("--rho-over-r must lie in [0, 1/2)");
        const AreaBounds b = area_bounds(ClusterGeometry{ana_rho_over_r * ana_r, ana_r});
        values = {{"lower", b.lower}, {"upper", b.upper}};
      } else if (ana_op == "ek-shape") {
        need_n(3);
        check_eps(ana_eps);
        if (ana_k < 3) throw UsageError("--k must be at least 3");
        values = {{"ek_shape", ek_shape(ana_k, static_cast<double>(ana_n), ana_eps)}};
      } else {  // chernoff-box
        need_n(2);
        check_eps(ana_eps);
        const double r = radius_from(ana_n, ana_mu_opt, ana_mu, ana_r_opt, ana_r, 1.0);
        if (!(ana_eps * r > 0.0 && ana_eps * r < 1.0)) throw UsageError("need 0 < eps r < 1");
        const BoxOccupancyBound b = chernoff_box_bound(ana_n, r, ana_eps);
        values = {{"y", b.y},         {"ew", b.ew},
                  {"delta", b.delta}, {"bound", b.bound},
                  {"vacuous", b.vacuous ? 1.0 : 0.0}};
      }
      emit(scalar_table(values), ana_c);
      return kExitOk;
    }

    if (ver->parsed()) {
      if (!ver_c.config.empty()) apply_config(*ver, ver_c.config);
      acceptance::Options o;
      o.quick = ver_quick;
      o.threads = ver_c.threads;
      o.seed = ver_c.seed;
      o.progress = &std::cerr;
      const auto results = acceptance::run_all(o, std::cout);
      for (const auto& r : results)
        if (!r.passed) std::cerr << "failing criterion: [" << r.id << "] " << r.name << '\n';
      return acceptance::all_passed(results) ? kExitOk : kExitAcceptance;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << " (set RGG_BUDGET to raise it)\n";
    return kExitBudget;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
