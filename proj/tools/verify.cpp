#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssnmc/ssnmc.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct RunOptions {
  std::string manifold;
  int dim = 0;  // 0: dims 2, 3, 4 for "all"
  double radius = 1.0;
  std::string phi_mode = "generic";
  std::string sigma_mode;
  std::size_t points = 25;
  double tol_analytic = 1e-9;
  double tol_fd = 1e-5;
  std::uint64_t seed = 1;
  std::string format = "json";
  std::vector<std::string> checks;
  std::string jets = "both";
  unsigned threads = 0;
};

ssnmc::SuiteConfig base_config(const RunOptions& o) {
  using ssnmc::Error;
  using ssnmc::ErrorKind;
  ssnmc::SuiteConfig cfg;
  cfg.manifold = o.manifold;
  cfg.params.dim = o.dim == 0 ? 2 : o.dim;
  cfg.params.radius = o.radius;
  cfg.params.seed = o.seed;
  const auto phi = ssnmc::parse_phi_mode(o.phi_mode);
  if (!phi) throw Error(ErrorKind::ConfigError, "unknown phi mode '" + o.phi_mode + "'");
  cfg.params.phi = *phi;
  if (!o.sigma_mode.empty()) {
    const auto sigma = ssnmc::parse_sigma_mode(o.sigma_mode);
    if (!sigma) throw Error(ErrorKind::ConfigError, "unknown sigma mode '" + o.sigma_mode + "'");
    cfg.sigma = *sigma;
  }
  cfg.points = o.points;
  cfg.tol_analytic = o.tol_analytic;
  cfg.tol_fd = o.tol_fd;
  for (const auto& name : o.checks) {
    const auto id = ssnmc::parse_check(name);
    if (!id) throw Error(ErrorKind::ConfigError, "unknown check '" + name + "'");
    cfg.checks.push_back(*id);
  }
  if (o.jets == "analytic") {
    cfg.modes = {ssnmc::JetMode::Analytic};
  } else if (o.jets == "fd") {
    cfg.modes = {ssnmc::JetMode::FiniteDifference};
  } else if (o.jets != "both") {
    throw Error(ErrorKind::ConfigError, "unknown jet mode '" + o.jets + "'");
  }
  cfg.threads = o.threads;
  return cfg;
}

int run(const RunOptions& o) {
  std::vector<ssnmc::SuiteConfig> cfgs;
  try {
    ssnmc::SuiteConfig cfg = base_config(o);
    if (o.manifold == "all") {
      for (ssnmc::SuiteConfig& c : ssnmc::default_suite(cfg)) {
        if (o.dim != 0 && c.params.dim != o.dim) continue;
        cfgs.push_back(std::move(c));
      }
    } else {
      if (o.dim == 0) throw ssnmc::Error(ssnmc::ErrorKind::ConfigError, "--dim is required for a single manifold");
      cfgs.push_back(cfg);
    }
    for (const auto& c : cfgs) ssnmc::validate(c);
  } catch (const ssnmc::Error& e) {
    std::cerr << "verify: " << e.what() << "\n";
    return kExitConfig;
  }

  ssnmc::VerificationReport report;
  try {
    report = ssnmc::run_suites(cfgs);
  } catch (const ssnmc::Error& e) {
    std::cerr << "verify: " << e.what() << "\n";
    return e.kind() == ssnmc::ErrorKind::ConfigError ? kExitConfig : kExitFail;
  }
  if (o.format == "json") {
    std::cout << ssnmc::to_json(report).dump(2) << "\n";
  } else {
    std::cout << ssnmc::to_text(report);
  }
  for (const auto& r : report.runs)
    for (const auto& c : r.checks)
      if (c.failed())
        std::cerr << "verify: FAIL " << r.manifold << " n=" << r.dim << " phi=" << ssnmc::to_string(r.phi) << " "
                  << ssnmc::to_string(r.mode) << " " << ssnmc::check_spec(c.id).name << ": " << c.reason << "\n";
  return report.passed() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for semi-symmetric non-metric connections"};
  app.require_subcommand(1);

  RunOptions opts;
  auto* run_cmd = app.add_subcommand("run", "Run the identity suite on a catalog manifold");
  run_cmd->add_option("--manifold", opts.manifold, "Catalog manifold, or 'all' for the default suite")->required();
  run_cmd->add_option("--dim", opts.dim, "Dimension (2..8)");
  run_cmd->add_option("--radius", opts.radius, "Sphere radius")->capture_default_str();
  run_cmd->add_option("--phi-mode", opts.phi_mode, "zero|constant|closed|generic")->capture_default_str();
  run_cmd->add_option("--sigma-mode", opts.sigma_mode, "zero|constant|linear|quadratic|trig (default: three fields)");
  run_cmd->add_option("--points", opts.points, "Sample points")->capture_default_str();
  run_cmd->add_option("--tol-analytic", opts.tol_analytic, "Tolerance with analytic jets")->capture_default_str();
  run_cmd->add_option("--tol-fd", opts.tol_fd, "Tolerance with finite-difference jets")->capture_default_str();
  run_cmd->add_option("--seed", opts.seed, "Seed for samples and random fields")->capture_default_str();
  run_cmd->add_option("--format", opts.format, "json|text")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  run_cmd->add_option("--check", opts.checks, "Restrict to a check (repeatable)");
  run_cmd->add_option("--jets", opts.jets, "analytic|fd|both")->capture_default_str();
  run_cmd->add_option("--threads", opts.threads, "Worker threads (0: all cores)")->capture_default_str();

  auto* list_checks = app.add_subcommand("list-checks", "List check names and anchors");
  auto* list_manifolds = app.add_subcommand("list-manifolds", "List catalog manifolds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  if (*list_checks) {
    for (const auto& c : ssnmc::kChecks) {
      std::printf("%-26s %-18s %s\n", std::string(c.name).c_str(), std::string(c.anchor).c_str(),
                  std::string(c.summary).c_str());
    }
    return kExitPass;
  }
  if (*list_manifolds) {
    for (auto name : ssnmc::kCatalogNames) std::printf("%s\n", std::string(name).c_str());
    return kExitPass;
  }
  return run(opts);
}
