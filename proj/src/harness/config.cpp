#include "zosa/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "zosa/errors.hpp"

namespace zosa::harness {

using nlohmann::json;

namespace {

void reject_unknown(const json& node, const std::string& prefix,
                    std::initializer_list<const char*> allowed) {
  if (!node.is_object()) {
    throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
  }
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : node.items()) {
    if (!keys.contains(key)) {
      throw ConfigError(prefix.empty() ? key : prefix + "." + key, "unknown key");
    }
  }
}

template <class T>
T get_as(const json& node, const std::string& field) {
  try {
    return node.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(field, fmt::format("wrong type ({})", node.type_name()));
  }
}

double get_real(const json& node, const char* key, const std::string& field, double fallback) {
  if (!node.contains(key)) return fallback;
  const json& v = node.at(key);
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  return v.get<double>();
}

bool is_non_negative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::uint64_t get_count(const json& node, const char* key, const std::string& field,
                        std::uint64_t fallback) {
  if (!node.contains(key)) return fallback;
  const json& v = node.at(key);
  if (!is_non_negative_integer(v)) {
    throw ConfigError(field, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

OptimizerKind parse_kind(const json& optimizer) {
  if (!optimizer.contains("kind")) return OptimizerKind::zosa;
  return parse_optimizer_kind(get_as<std::string>(optimizer.at("kind"), "optimizer.kind"));
}

ExternalAddress parse_external(const json& node) {
  reject_unknown(node, "objective.external", {"command", "host", "port", "timeout_ms"});
  ExternalAddress address;
  if (node.contains("command")) {
    address.command = get_as<std::vector<std::string>>(node.at("command"), "objective.external.command");
    if (address.command.empty()) throw ConfigError("objective.external.command", "must not be empty");
  }
  if (node.contains("host")) address.host = get_as<std::string>(node.at("host"), "objective.external.host");
  if (node.contains("port")) {
    const auto port = get_count(node, "port", "objective.external.port", 0);
    if (port == 0 || port > 65535) throw ConfigError("objective.external.port", "must be in 1..65535");
    address.port = static_cast<std::uint16_t>(port);
  }
  const bool has_process = !address.command.empty();
  const bool has_socket = !address.host.empty() || address.port != 0;
  if (has_process == has_socket) {
    throw ConfigError("objective.external", "give either \"command\" or \"host\" and \"port\"");
  }
  if (has_socket && (address.host.empty() || address.port == 0)) {
    throw ConfigError("objective.external", "a socket peer needs both \"host\" and \"port\"");
  }
  const auto timeout = get_count(node, "timeout_ms", "objective.external.timeout_ms", 10000);
  if (timeout == 0) throw ConfigError("objective.external.timeout_ms", "must be positive");
  address.timeout = std::chrono::milliseconds(timeout);
  return address;
}

void flatten_into(const json& node, const std::string& prefix, std::vector<std::string>& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      flatten_into(value, prefix.empty() ? key : prefix + "." + key, out);
    }
    return;
  }
  std::string rendered;
  if (node.is_number_float()) {
    rendered = format_real(node.get<double>());
  } else if (node.is_string()) {
    rendered = node.get<std::string>();
  } else {
    rendered = node.dump();
  }
  out.push_back(prefix + "=" + rendered);
}

}  // namespace

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

RunSpec parse_run_spec(const json& config) {
  reject_unknown(config, "", {"optimizer", "objective", "dimension", "iterations", "query_budget",
                              "seeds", "output", "workers", "track_cosine"});
  RunSpec spec;

  const json optimizer = config.value("optimizer", json::object());
  reject_unknown(optimizer, "optimizer",
                 {"kind", "eta", "rho", "epsilon", "m", "direction", "beta1", "beta2",
                  "moment_epsilon", "sigma_floor"});
  spec.kind = parse_kind(optimizer);
  OptimizerConfig cfg = OptimizerConfig::defaults(spec.kind);
  cfg.eta = get_real(optimizer, "eta", "optimizer.eta", cfg.eta);
  cfg.rho = get_real(optimizer, "rho", "optimizer.rho", cfg.rho);
  cfg.estimator.epsilon = get_real(optimizer, "epsilon", "optimizer.epsilon", cfg.estimator.epsilon);
  cfg.estimator.m = get_count(optimizer, "m", "optimizer.m", cfg.estimator.m);
  if (optimizer.contains("direction")) {
    try {
      cfg.estimator.direction =
          parse_direction_kind(get_as<std::string>(optimizer.at("direction"), "optimizer.direction"));
    } catch (const ConfigError& e) {
      throw ConfigError("optimizer.direction", e.what());
    }
  }
  cfg.beta1 = get_real(optimizer, "beta1", "optimizer.beta1", cfg.beta1);
  cfg.beta2 = get_real(optimizer, "beta2", "optimizer.beta2", cfg.beta2);
  cfg.moment_epsilon = get_real(optimizer, "moment_epsilon", "optimizer.moment_epsilon", cfg.moment_epsilon);
  cfg.sigma_floor = get_real(optimizer, "sigma_floor", "optimizer.sigma_floor", cfg.sigma_floor);
  cfg.validate(spec.kind);
  spec.optimizer = cfg;

  if (!config.contains("objective")) throw ConfigError("objective", "missing");
  const json& objective = config.at("objective");
  reject_unknown(objective, "objective", {"function", "external", "optimum"});
  if (objective.contains("function") == objective.contains("external")) {
    throw ConfigError("objective", "give exactly one of \"function\" or \"external\"");
  }
  if (objective.contains("function")) {
    try {
      spec.objective.builtin =
          bench::parse_function_kind(get_as<std::string>(objective.at("function"), "objective.function"));
    } catch (const ConfigError& e) {
      throw ConfigError("objective.function", e.what());
    }
    if (objective.contains("optimum")) {
      throw ConfigError("objective.optimum", "only external objectives take an optimum");
    }
  } else {
    spec.objective.external = parse_external(objective.at("external"));
    if (objective.contains("optimum")) {
      spec.objective.optimum = get_real(objective, "optimum", "objective.optimum", 0.0);
    }
  }

  spec.dimension = get_count(config, "dimension", "dimension", spec.dimension);
  if (spec.dimension == 0) throw ConfigError("dimension", "must be positive");
  if (spec.objective.builtin && spec.dimension < bench::min_dimension(*spec.objective.builtin)) {
    throw ConfigError("dimension", fmt::format("{} needs dimension >= {}",
                                               bench::to_string(*spec.objective.builtin),
                                               bench::min_dimension(*spec.objective.builtin)));
  }
  spec.iterations = get_count(config, "iterations", "iterations", spec.iterations);
  if (spec.iterations == 0) throw ConfigError("iterations", "must be at least 1");
  if (config.contains("query_budget") && !config.at("query_budget").is_null()) {
    spec.query_budget = get_count(config, "query_budget", "query_budget", 0);
    if (*spec.query_budget == 0) throw ConfigError("query_budget", "must be positive");
  }
  if (config.contains("seeds")) {
    const json& seeds = config.at("seeds");
    if (!seeds.is_array()) throw ConfigError("seeds", "expected an array of integers");
    spec.seeds.clear();
    for (const json& s : seeds) {
      if (!is_non_negative_integer(s)) throw ConfigError("seeds", "seeds must be non-negative integers");
      spec.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (spec.seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
  if (config.contains("output")) spec.output = get_as<std::string>(config.at("output"), "output");
  spec.workers = get_count(config, "workers", "workers", spec.workers);
  if (config.contains("track_cosine")) {
    spec.track_cosine = get_as<bool>(config.at("track_cosine"), "track_cosine");
  }
  return spec;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), fmt::format("invalid JSON: {}", e.what()));
  }
}

RunSpec load_run_spec(const std::filesystem::path& path) { return parse_run_spec(load_json(path)); }

json to_json(const RunSpec& spec) {
  const OptimizerConfig& c = spec.optimizer;
  json out;
  out["optimizer"] = {
      {"kind", std::string(to_string(spec.kind))},
      {"eta", c.eta},
      {"rho", c.rho},
      {"epsilon", c.estimator.epsilon},
      {"m", c.estimator.m},
      {"direction", std::string(to_string(c.estimator.direction))},
      {"beta1", c.beta1},
      {"beta2", c.beta2},
      {"moment_epsilon", c.moment_epsilon},
      {"sigma_floor", c.sigma_floor},
  };
  json objective = json::object();
  if (spec.objective.builtin) {
    objective["function"] = std::string(bench::to_string(*spec.objective.builtin));
  } else if (spec.objective.external) {
    const ExternalAddress& a = *spec.objective.external;
    json ext = {{"timeout_ms", a.timeout.count()}};
    if (a.is_process()) {
      ext["command"] = a.command;
    } else {
      ext["host"] = a.host;
      ext["port"] = a.port;
    }
    objective["external"] = ext;
    if (spec.objective.optimum) objective["optimum"] = *spec.objective.optimum;
  }
  out["objective"] = objective;
  out["dimension"] = spec.dimension;
  out["iterations"] = spec.iterations;
  out["query_budget"] = spec.query_budget ? json(*spec.query_budget) : json(nullptr);
  out["seeds"] = spec.seeds;
  out["output"] = spec.output.string();
  out["workers"] = spec.workers;
  out["track_cosine"] = spec.track_cosine;
  return out;
}

std::vector<std::string> flatten_settings(const json& resolved) {
  std::vector<std::string> out;
  flatten_into(resolved, "", out);
  std::sort(out.begin(), out.end());
  return out;
}

void set_by_path(json& config, const std::string& dotted, const json& value) {
  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError(dotted, "malformed parameter path");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!node->contains(key)) (*node)[key] = json::object();
    node = &(*node)[key];
    if (!node->is_object()) throw ConfigError(dotted, "path crosses a non-object value");
    start = dot + 1;
  }
}

}  // namespace zosa::harness
