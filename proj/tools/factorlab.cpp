// Command-line front end. Every subcommand maps onto one library entry
// point; all heavy lifting (validation included) happens in the headers.
//
// Exit codes: 0 success, 2 validation error (bad flags, bad config),
// 3 resource error (files, memory envelope), 4 check-suite failure.

#include <fstream>
#include <iostream>
#include <iterator>
#include <string>

#include <CLI11.hpp>

#include "factorlab/factorlab.hpp"

namespace {

/// Loads a JSON config, enforces that its kind matches the subcommand
/// (empty expectation = any kind), and runs it.
int run_config(const std::string& path, const std::string& expected_kind,
               const std::string& out_override) {
  std::ifstream is(path);
  if (!is) throw factorlab::resource_error("cannot open config file " + path);
  nlohmann::json config;
  try {
    is >> config;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config validation failed: bad JSON in " + path + ": " +
                                e.what());
  }
  if (!expected_kind.empty()) {
    const std::string kind = config.is_object() ? config.value("kind", "") : "";
    if (kind != expected_kind)
      throw std::invalid_argument("config validation failed: kind '" + kind +
                                  "' does not match subcommand '" + expected_kind + "'");
  }
  const auto result = factorlab::run_experiment(config, out_override);
  std::cout << result.kind << ": wrote " << result.output_path << " (" << result.rows
            << " rows)\n";
  for (const auto& extra : result.extra_outputs) std::cout << "  also " << extra << '\n';
  return 0;
}

int run_check(const std::string& suite) {
  const auto results = factorlab::selfcheck::run_suite(suite);
  size_t passed = 0;
  for (const auto& r : results) {
    if (r.pass) ++passed;
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << '\n';
  }
  std::cout << "suite " << suite << ": " << passed << "/" << results.size()
            << " checks passed\n";
  return passed == results.size() ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"factorlab: reproducible experiments on prime-factorization statistics"};
  app.require_subcommand(1);

  auto* sieve_cmd = app.add_subcommand("sieve-build", "build and dump a smallest-prime-factor table");
  std::int64_t sieve_limit = 0;
  std::string sieve_out;
  sieve_cmd->add_option("--limit", sieve_limit, "largest integer in the table")->required();
  sieve_cmd->add_option("--out", sieve_out, "output path for the binary dump")->required();

  struct ConfigCmd {
    CLI::App* cmd = nullptr;
    std::string kind;
    std::string config;
    std::string out;
  };
  // CLI11 keeps raw pointers to the bound strings, so the vector must never
  // reallocate once options are attached.
  std::vector<ConfigCmd> config_cmds;
  const std::pair<const char*, const char*> kinds[] = {
      {"ek", "weighted distribution of the prime-factor count"},
      {"ekpnt", "orbit averages weighted by the factor-count statistic"},
      {"ep", "distribution of the totient's prime-factor count"},
      {"friable", "friable sums against their predicted main term"},
      {"density", "prime-counting error functionals for a prime set"},
      {"ivic", "repeated-largest-prime-factor sums"},
      {"run", "run any experiment config (kind taken from the file)"},
  };
  config_cmds.reserve(std::size(kinds));
  for (const auto& [name, help] : kinds) {
    ConfigCmd c;
    c.kind = std::string(name) == "run" ? "" : name;
    c.cmd = app.add_subcommand(name, help);
    config_cmds.push_back(std::move(c));
    auto& back = config_cmds.back();
    back.cmd->add_option("--config", back.config, "JSON experiment config")->required();
    back.cmd->add_option("--out", back.out, "override the config's output path");
  }

  auto* rho_cmd = app.add_subcommand("rho", "tabulate the generalized Dickman function");
  double rho_alpha = 1.0, rho_umax = 20.0, rho_step = 1.0 / 1024.0;
  std::string rho_out;
  rho_cmd->add_option("--alpha", rho_alpha, "weight mean on the primes")->required();
  rho_cmd->add_option("--umax", rho_umax, "tabulation horizon");
  rho_cmd->add_option("--step", rho_step, "grid step (1/step must be an integer)");
  rho_cmd->add_option("--out", rho_out, "output CSV path")->required();

  auto* check_cmd = app.add_subcommand("check", "run a built-in consistency suite");
  std::string suite;
  check_cmd->add_option("--suite", suite, "identities or oracles")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sieve_cmd->parsed()) {
      const factorlab::FactorTable table = factorlab::build_factor_table(sieve_limit);
      factorlab::dump_spf(table, sieve_out);
      std::cout << "sieve-build: wrote table for limit " << sieve_limit << " to " << sieve_out
                << " (" << table.primes().size() << " primes)\n";
      return 0;
    }
    if (rho_cmd->parsed()) {
      nlohmann::json config = {{"kind", "rho"},
                               {"alpha", rho_alpha},
                               {"umax", rho_umax},
                               {"step", rho_step},
                               {"out", rho_out}};
      const auto result = factorlab::run_experiment(config);
      std::cout << "rho: wrote " << result.output_path << " (" << result.rows << " rows)\n";
      return 0;
    }
    if (check_cmd->parsed()) return run_check(suite);
    for (const auto& c : config_cmds)
      if (c.cmd->parsed()) return run_config(c.config, c.kind, c.out);
    std::cerr << "error: no subcommand dispatched\n";
    return 2;
  } catch (const factorlab::block_construction_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const factorlab::resource_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: config validation failed: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
