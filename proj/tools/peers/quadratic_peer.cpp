// Reference objective peer: answers every request with 1/2 |theta|^2 using
// the builtin quadratic, so traces can be compared bit for bit.
//
//   quadratic_peer [--nan] [--error] [--garbage] [--hang] [--log <file>]
//
// --nan / --error / --garbage / --hang make the peer misbehave for testing;
// --log appends the size of every received batch, one per line.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <thread>

#include "json.hpp"
#include "zosa/benchmarks.hpp"

int main(int argc, char** argv) {
  bool nan = false, error = false, garbage = false, hang = false;
  std::string log_path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--nan") nan = true;
    else if (arg == "--error") error = true;
    else if (arg == "--garbage") garbage = true;
    else if (arg == "--hang") hang = true;
    else if (arg == "--log" && i + 1 < argc) log_path = argv[++i];
    else {
      std::cerr << "unknown argument " << arg << '\n';
      return 1;
    }
  }

  std::string line;
  while (std::getline(std::cin, line)) {
    const auto request = nlohmann::json::parse(line);
    const auto id = request.at("id");
    const auto& thetas = request.at("thetas");
    if (!log_path.empty()) std::ofstream(log_path, std::ios::app) << thetas.size() << '\n';
    if (hang) std::this_thread::sleep_for(std::chrono::hours(1));
    if (garbage) {
      std::cout << "this is not json" << std::endl;
      continue;
    }
    if (error) {
      std::cout << nlohmann::json{{"id", id}, {"error", "simulated failure"}}.dump() << std::endl;
      continue;
    }
    std::string losses = "[";
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      const zosa::Vector theta(thetas[i].get<std::vector<double>>());
      const zosa::bench::SyntheticFunction f(zosa::bench::FunctionKind::quadratic, theta.size());
      if (i > 0) losses += ",";
      losses += nan ? std::string("NaN") : nlohmann::json(zosa::bench::eval_function(f, theta)).dump();
    }
    losses += "]";
    std::cout << "{\"id\":" << id.dump() << ",\"losses\":" << losses << "}" << std::endl;
  }
  return 0;
}
