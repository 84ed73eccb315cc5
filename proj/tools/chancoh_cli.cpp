// Command-line surface: measure coherence of channels, run verification
// suites, and generate random channel files. Exit codes: 0 success,
// 2 input validation failure, 3 solver failure, 4 verification-suite failure.

#include <cstdlib>
#include <iostream>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "chancoh/generators.hpp"
#include "chancoh/io.hpp"
#include "chancoh/measures.hpp"

namespace {

struct RunConfig {
  chancoh::Tolerances tol;
  std::uint64_t seed = 1;
  std::size_t trials = 10;
  std::vector<std::size_t> dims{2, 2, 2, 2};
  bool json = false;
};

/// Optional tolerance file named by CHANCOH_TOLERANCES; flags override it.
void load_tolerance_env(chancoh::Tolerances& tol) {
  const char* path = std::getenv("CHANCOH_TOLERANCES");
  if (!path || !*path) return;
  const chancoh::Json j = chancoh::load_json(path);
  if (j.contains("solver_gap")) tol.solver_gap = j["solver_gap"].get<double>();
  if (j.contains("psd")) tol.psd = j["psd"].get<double>();
  if (j.contains("classification")) tol.classification = j["classification"].get<double>();
  if (j.contains("channel")) tol.channel = j["channel"].get<double>();
}

int run_measure(const std::string& input, const std::string& against,
                const std::string& quantity, const RunConfig& cfg) {
  const chancoh::Channel c = chancoh::channel_from_json(chancoh::load_json(input), cfg.tol);
  if (quantity == "dmax") {
    if (against.empty()) throw chancoh::ValidationError("--against is required for dmax");
    const chancoh::Channel c2 =
        chancoh::channel_from_json(chancoh::load_json(against), cfg.tol);
    const double v = chancoh::d_max(c, c2, cfg.tol);
    if (cfg.json)
      std::cout << chancoh::Json{{"d_max_bits", v}}.dump(2) << "\n";
    else
      std::cout << "d_max_bits " << v << "\n";
    return 0;
  }
  if (quantity == "cr") {
    const double v = chancoh::c_r(c);
    if (cfg.json)
      std::cout << chancoh::Json{{"c_r", v}}.dump(2) << "\n";
    else
      std::cout << "c_r " << v << "\n";
    return 0;
  }
  const chancoh::CoherenceReport rep = chancoh::c_max(c, cfg.tol);
  if (cfg.json) {
    chancoh::Json j = chancoh::report_to_json(rep);
    std::cout << j.dump(2) << "\n";
  } else if (quantity == "cmax") {
    std::cout << "c_max_bits " << rep.c_max << "\n";
  } else {
    std::cout << "c_max_bits " << rep.c_max << "\nc_r " << rep.c_r << "\nrelation_residual "
              << rep.relation_residual << "\nsolver_gap " << rep.solver_gap << "\n";
  }
  return 0;
}

struct SuiteResult {
  std::string name;
  double max_residual = 0.0;
  double limit = 0.0;
  bool pass() const { return max_residual <= limit; }
};

SuiteResult suite_theorem1(const RunConfig& cfg) {
  SuiteResult r{"theorem1", 0.0, 1e-4};
  const auto [dA, dB, dA2, dB2] = std::tuple(cfg.dims[0], cfg.dims[1], cfg.dims[2], cfg.dims[3]);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const chancoh::Channel c = chancoh::random_channel(dA, dB, 2, cfg.seed + 101 * t);
    const std::vector<double> phases = chancoh::random_phases(dA2 * dB2, cfg.seed + 7 + t);
    const auto isc = chancoh::construct_theorem1_isc(c, dA2, dB2, phases, cfg.tol);
    const auto disc = chancoh::construct_theorem1_disc(c, dA2, dB2, cfg.tol);
    if (!chancoh::classify_isc(isc.superchannel, cfg.tol.classification) ||
        !chancoh::classify_disc(disc.superchannel, cfg.tol.classification))
      r.max_residual = std::max(r.max_residual, 1.0);
    r.max_residual = std::max({r.max_residual, isc.residual, disc.residual});
  }
  return r;
}

SuiteResult suite_theorem2(const RunConfig& cfg) {
  SuiteResult r{"theorem2", 0.0, 1e-4};
  const auto [dA, dB, dA2, dB2] = std::tuple(cfg.dims[0], cfg.dims[1], cfg.dims[2], cfg.dims[3]);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const chancoh::Channel c = chancoh::random_channel(dA, dB, 2, cfg.seed + 211 * t);
    const auto cert = chancoh::construct_theorem2_instrument(c, dA2, dB2, cfg.tol);
    const double isco_residual =
        std::abs(cert.p_isco - 1.0 / static_cast<double>(dA2 * dB2));
    r.max_residual = std::max({r.max_residual, cert.residual, isco_residual});
  }
  return r;
}

SuiteResult suite_monotonicity(const RunConfig& cfg) {
  SuiteResult r{"monotonicity", 0.0, 1e-6};
  const auto [dA, dB] = std::pair(cfg.dims[0], cfg.dims[1]);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const chancoh::Channel c = chancoh::random_channel(dA, dB, 2, cfg.seed + 307 * t);
    const chancoh::Superchannel sc =
        chancoh::random_isc_superchannel(dA, dB, cfg.seed + 13 + t);
    const auto [full, avg] = chancoh::verify_monotonicity(c, sc, cfg.tol);
    r.max_residual = std::max({r.max_residual, full, avg});
  }
  return r;
}

SuiteResult suite_roc(const RunConfig& cfg) {
  SuiteResult r{"roc", 0.0, 1e-6};
  const auto [dA, dB] = std::pair(cfg.dims[0], cfg.dims[1]);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const std::vector<chancoh::Channel> cs{
        chancoh::random_channel(dA, dB, 2, cfg.seed + 401 * t),
        chancoh::random_channel(dA, dB, 2, cfg.seed + 401 * t + 1)};
    const double p = unit(rng);
    const chancoh::Superchannel sc =
        chancoh::random_isc_superchannel(dA, dB, cfg.seed + 17 + t);
    const chancoh::RocResiduals res =
        chancoh::verify_roc_properties(cs, {p, 1.0 - p}, sc, cfg.tol);
    r.max_residual = std::max({r.max_residual, res.convexity, res.average});
  }
  return r;
}

SuiteResult suite_reduction(const RunConfig& cfg) {
  SuiteResult r{"reduction", 0.0, 1e-6};
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const std::size_t dim = 2 + (t % 3);  // 2..4
    const chancoh::ChannelState s = chancoh::random_pure_state(dim, cfg.seed + 503 * t);
    r.max_residual = std::max(r.max_residual, chancoh::state_reduction_check(s, cfg.tol));
  }
  return r;
}

int run_verify(const std::string& suite, const RunConfig& cfg) {
  std::vector<SuiteResult> results;
  if (suite == "theorem1" || suite == "all") results.push_back(suite_theorem1(cfg));
  if (suite == "theorem2" || suite == "all") results.push_back(suite_theorem2(cfg));
  if (suite == "monotonicity" || suite == "all") results.push_back(suite_monotonicity(cfg));
  if (suite == "roc" || suite == "all") results.push_back(suite_roc(cfg));
  if (suite == "reduction" || suite == "all") results.push_back(suite_reduction(cfg));
  bool all_pass = true;
  for (const SuiteResult& r : results) {
    all_pass = all_pass && r.pass();
    std::cout << "suite=" << r.name << " trials=" << cfg.trials << " seed=" << cfg.seed
              << " max_residual=" << r.max_residual << " limit=" << r.limit << " "
              << (r.pass() ? "PASS" : "FAIL") << "\n";
  }
  return all_pass ? 0 : 4;
}

int run_random(const RunConfig& cfg, std::size_t env_dim, const std::string& out) {
  const chancoh::Channel c =
      chancoh::random_channel(cfg.dims[0], cfg.dims[1], env_dim, cfg.seed);
  chancoh::save_json(out, chancoh::channel_to_json(c));
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherence measures for quantum channels"};
  app.require_subcommand(1);
  RunConfig cfg;

  std::string input, against, quantity = "both", suite = "all", out;
  std::size_t env_dim = 2;

  CLI::App* measure = app.add_subcommand("measure", "Compute coherence measures of a channel");
  measure->add_option("--input", input, "channel JSON file")->required();
  measure->add_option("--against", against, "second channel (for dmax)");
  measure->add_option("--quantity", quantity, "cmax|cr|dmax|both")
      ->check(CLI::IsMember({"cmax", "cr", "dmax", "both"}));
  measure->add_flag("--json", cfg.json, "JSON output");

  CLI::App* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("--suite", suite, "theorem1|theorem2|roc|monotonicity|reduction|all")
      ->check(CLI::IsMember({"theorem1", "theorem2", "roc", "monotonicity", "reduction", "all"}));
  verify->add_option("--dims", cfg.dims, "A B A' B'")->expected(4);
  verify->add_option("--trials", cfg.trials, "trial count")->check(CLI::PositiveNumber);
  verify->add_option("--seed", cfg.seed, "PRNG seed");
  verify->add_option("--tol-gap", cfg.tol.solver_gap, "solver gap tolerance")
      ->check(CLI::PositiveNumber);
  verify->add_option("--tol-psd", cfg.tol.psd, "PSD tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--tol-class", cfg.tol.classification, "classification threshold")
      ->check(CLI::PositiveNumber);

  CLI::App* random = app.add_subcommand("random", "Write a random channel file");
  random->add_option("--dims", cfg.dims, "A B")->expected(2);
  random->add_option("--env", env_dim, "environment dimension")->check(CLI::PositiveNumber);
  random->add_option("--seed", cfg.seed, "PRNG seed");
  random->add_option("--out", out, "output path")->required();

  try {
    load_tolerance_env(cfg.tol);
    CLI11_PARSE(app, argc, argv);
    if (measure->parsed()) return run_measure(input, against, quantity, cfg);
    if (verify->parsed()) return run_verify(suite, cfg);
    if (random->parsed()) return run_random(cfg, env_dim, out);
  } catch (const chancoh::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const chancoh::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
