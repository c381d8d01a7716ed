#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fockop/fockop.hpp"

namespace {

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) return false;
  f << text;
  return static_cast<bool>(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundedness of Volterra-type operators on growth Fock spaces"};
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path, csv_path;
  app.add_option("-c,--config", config_path, "key=value configuration file ('-' reads stdin)");
  app.add_option("--out", out_path, "write the JSON report here instead of stdout");
  app.add_option("--csv", csv_path, "write plot data / sweep CSV here");
  app.add_option("overrides", overrides, "key=value settings applied after the file");
  CLI11_PARSE(app, argc, argv);

  std::string text;
  if (!config_path.empty()) {
    std::stringstream ss;
    if (config_path == "-") {
      ss << std::cin.rdbuf();
    } else {
      std::ifstream f(config_path);
      if (!f) {
        std::cerr << "error: cannot read " << config_path << "\n";
        return 1;
      }
      ss << f.rdbuf();
    }
    text = ss.str();
  }
  if (!out_path.empty()) overrides.push_back("out=" + out_path);
  if (!csv_path.empty()) overrides.push_back("csv=" + csv_path);

  fockop::RunConfig cfg;
  try {
    cfg = fockop::parse_config(text, overrides);
  } catch (const fockop::ConfigError& e) {
    for (const auto& m : e.errors()) std::cerr << "error: " << m << "\n";
    return 1;
  }

  const auto res = fockop::run(cfg);
  if (cfg.has("out")) {
    if (!write_file(cfg.get("out"), res.json)) {
      std::cerr << "error: cannot write " << cfg.get("out") << "\n";
      return 1;
    }
  } else {
    std::cout << res.json;
  }
  if (cfg.has("csv") && !res.csv.empty() && !write_file(cfg.get("csv"), res.csv)) {
    std::cerr << "error: cannot write " << cfg.get("csv") << "\n";
    return 1;
  }
  if (res.exit_code == 1) std::cerr << "error: " << res.message << "\n";
  return res.exit_code;
}
