#include "gasket/cli/config.hpp"

#include <cstdlib>

#include "gasket/constants.hpp"
#include "gasket/errors.hpp"
#include "gasket/geometry.hpp"

namespace gasket::cli {

std::string to_string(Command c) {
  switch (c) {
    case Command::Build: return "build";
    case Command::Eigs: return "eigs";
    case Command::Kernel: return "kernel";
    case Command::Sample: return "sample";
    case Command::Verify: return "verify";
  }
  return "unknown";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::Build, Command::Eigs, Command::Kernel, Command::Sample, Command::Verify})
    if (to_string(c) == name) return c;
  throw ParameterError("unknown command '" + name + "'");
}

bool RunConfig::needs_order() const {
  switch (command) {
    case Command::Sample:
    case Command::Verify: return true;
    case Command::Kernel: return kernel == "riesz";
    default: return false;
  }
}

void RunConfig::resolve() {
  if (level < 0 || level > kMaxLevel)
    throw ParameterError("level must lie in [0, " + std::to_string(kMaxLevel) + "], got " + std::to_string(level));
  if (s && hurst) throw ParameterError("give exactly one of s and H, not both");
  if (command == Command::Verify && !s && !hurst) s = 0.5;
  if (needs_order() && !s && !hurst) throw ParameterError("give exactly one of s and H");

  if (hurst) {
    require_admissible_hurst(*hurst);
    s = order_from_hurst(*hurst);
  } else if (s) {
    // Kernels of any positive order are meaningful; fields need the interval.
    if (command == Command::Kernel) {
      if (!(*s > 0.0)) throw ParameterError("s must be positive, got " + std::to_string(*s));
    } else {
      require_admissible_order(*s);
    }
    hurst = hurst_from_order(*s);
  }

  if (count && *count < 1) throw ParameterError("count must be at least 1");
  if (modes && *modes < 0) throw ParameterError("modes must be non-negative");
  if (!(tail_budget > 0.0 && tail_budget < 1.0)) throw ParameterError("tail budget must lie in (0, 1)");
  if (!(tolerance > 0.0)) throw ParameterError("tolerance must be positive");
  if (kernel != "riesz" && kernel != "heat") throw ParameterError("kernel must be 'riesz' or 'heat'");
  if (command == Command::Kernel && kernel == "heat" && !(time > 0.0))
    throw ParameterError("heat kernel time must be positive");
  if (command == Command::Verify && replications < 1000)
    throw ParameterError("replications must be at least 1000");
}

nlohmann::ordered_json RunConfig::echo() const {
  nlohmann::ordered_json j;
  j["command"] = to_string(command);
  j["level"] = level;
  if (s) j["s"] = *s;
  if (hurst) j["H"] = *hurst;
  if (count) j["count"] = *count;
  if (modes) j["modes"] = *modes;
  else j["tail_budget"] = tail_budget;
  j["tolerance"] = tolerance;
  j["seed"] = seed;
  switch (command) {
    case Command::Kernel:
      j["kernel"] = kernel;
      if (kernel == "heat") j["t"] = time;
      break;
    case Command::Verify:
      j["suite"] = suite;
      j["replications"] = replications;
      break;
    default: break;
  }
  return j;
}

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ParameterError("config file must hold a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") cfg.command = parse_command(v.get<std::string>());
      else if (key == "level") cfg.level = v.get<int>();
      else if (key == "s") cfg.s = v.get<double>();
      else if (key == "H") cfg.hurst = v.get<double>();
      else if (key == "count") cfg.count = v.get<int>();
      else if (key == "modes") cfg.modes = v.get<int>();
      else if (key == "tail_budget") cfg.tail_budget = v.get<double>();
      else if (key == "tolerance") cfg.tolerance = v.get<double>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "replications") cfg.replications = v.get<std::size_t>();
      else if (key == "kernel") cfg.kernel = v.get<std::string>();
      else if (key == "t") cfg.time = v.get<double>();
      else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "report") cfg.report = v.get<std::string>();
      else if (key == "vectors") cfg.vectors = v.get<std::string>();
      else if (key == "matrix") cfg.matrix = v.get<std::string>();
      else if (key == "pgm") cfg.pgm = v.get<std::string>();
      else if (key == "suite") cfg.suite = v.get<std::string>();
      else if (key == "threads") cfg.threads = v.get<unsigned>();
      else throw ParameterError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("config file: ") + e.what());
  }
}

std::optional<unsigned> threads_from_env() {
  const char* v = std::getenv("GASKET_FGF_THREADS");
  if (v == nullptr || *v == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long n = std::strtoul(v, &end, 10);
  if (*end != '\0') throw ParameterError(std::string("GASKET_FGF_THREADS is not a number: ") + v);
  return static_cast<unsigned>(n);
}

}  // namespace gasket::cli
