// solgeo: batch experiments on Sol(p,q).
//   solgeo <command> --config FILE [--seed U64] [--workers N] [--out DIR]
// Exit status: 0 all checks pass, 1 a check failed, 2 bad usage or config,
// 3 numerical failure.

#include <fstream>
#include <iostream>
#include <iterator>
#include <string>

#include <CLI11.hpp>

#include "solgeo/experiment.hpp"

namespace {

solgeo::Json read_document(const std::string& file) {
  std::string text;
  if (file.empty() || file == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw solgeo::SchemaError("--config", "cannot open " + file);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  try {
    return solgeo::Json::parse(text);
  } catch (const solgeo::Json::parse_error& e) {
    throw solgeo::SchemaError("<root>", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brownian motion and harmonic functions on Sol(p,q)", "solgeo"};
  app.set_version_flag("--version", std::string(solgeo::kVersion));
  std::string command, config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::vector<std::string> names;
  for (const auto& [_, name] : solgeo::command_names()) names.emplace_back(name);
  app.add_option("command", command, "experiment to run")->required()->check(CLI::IsMember(names));
  app.add_option("--config", config, "JSON config file (default: stdin)");
  app.add_option("--seed", seed, "override run.seed");
  app.add_option("--workers", workers, "worker threads (default: SOLGEO_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output directory for report.json and CSV files");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto doc = read_document(config);
    const auto cfg = solgeo::parse_config(doc, solgeo::parse_command(command), {seed, workers, out});
    const auto res = solgeo::run_experiment(cfg);
    solgeo::write_artifacts(res, cfg.out_dir);
    for (const auto& r : res.report["reports"])
      std::cout << (r["pass"].get<bool>() ? "PASS " : "FAIL ") << r["name"].get<std::string>()
                << " statistic=" << r["statistic"].dump() << " threshold=" << r["threshold"].dump()
                << '\n';
    std::cout << "report: " << (cfg.out_dir / "report.json").string() << '\n';
    return res.pass() ? 0 : 1;
  } catch (const solgeo::SchemaError& e) {
    std::cerr << "solgeo: config error: " << e.what() << '\n';
    return 2;
  } catch (const solgeo::NonFiniteError& e) {
    std::cerr << "solgeo: numerical error: " << e.what() << '\n';
    return 3;
  } catch (const solgeo::DomainError& e) {
    std::cerr << "solgeo: numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "solgeo: " << e.what() << '\n';
    return 3;
  }
}
