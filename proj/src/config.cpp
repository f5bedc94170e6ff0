#include "driftstab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "driftstab/csv.hpp"
#include "driftstab/errors.hpp"

namespace driftstab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& path, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError(path + ": not a number: `" + value + "`");
  }
  if (pos != value.size()) {
    throw ConfigError(path + ": trailing garbage in `" + value + "`");
  }
  return v;
}

long long parse_int(const std::string& path, const std::string& value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError(path + ": not an integer: `" + value + "`");
  }
  if (pos != value.size()) {
    throw ConfigError(path + ": trailing garbage in `" + value + "`");
  }
  return v;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& is) {
  ExperimentConfig cfg;
  bool have_a = false, have_b = false, have_std = false, have_p = false,
       have_K = false;

  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "plant" && section != "quantizer" &&
          section != "channel" && section != "run") {
        throw ConfigError("config: unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected `key = value`");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string path = section + "." + key;
    if (section.empty()) {
      throw ConfigError("config: key `" + key + "` outside any section");
    }

    if (section == "plant") {
      if (key == "a") {
        cfg.plant.a = parse_double(path, value);
        have_a = true;
      } else if (key == "b") {
        cfg.plant.b = parse_double(path, value);
        have_b = true;
      } else if (key == "noise_std") {
        cfg.plant.noise_std = parse_double(path, value);
        have_std = true;
      } else if (key == "x0") {
        cfg.plant.x0 = parse_double(path, value);
      } else {
        throw ConfigError("config: unknown key " + path);
      }
    } else if (section == "quantizer") {
      if (key == "K") {
        cfg.K = static_cast<int>(parse_int(path, value));
        have_K = true;
      } else if (key == "B_exp") {
        cfg.B_exp = static_cast<int>(parse_int(path, value));
      } else if (key == "A_exp") {
        cfg.A_exp = static_cast<int>(parse_int(path, value));
      } else if (key == "s") {
        cfg.s = parse_double(path, value);
      } else if (key == "L_idx") {
        cfg.L_idx = parse_int(path, value);
      } else {
        throw ConfigError("config: unknown key " + path);
      }
    } else if (section == "channel") {
      if (key == "p") {
        cfg.channel_p = parse_double(path, value);
        have_p = true;
      } else {
        throw ConfigError("config: unknown key " + path);
      }
    } else {  // run
      if (key == "T") {
        cfg.run.T = parse_int(path, value);
      } else if (key == "n_traj") {
        cfg.run.n_traj = static_cast<int>(parse_int(path, value));
      } else if (key == "seed") {
        cfg.run.seed = static_cast<std::uint64_t>(parse_int(path, value));
      } else if (key == "m") {
        cfg.run.m = static_cast<int>(parse_int(path, value));
      } else if (key == "delta0_idx") {
        cfg.run.delta0_idx = parse_int(path, value);
        cfg.run_delta0_given = true;
      } else if (key == "k_max") {
        cfg.run.k_max = static_cast<int>(parse_int(path, value));
      } else {
        throw ConfigError("config: unknown key " + path);
      }
    }
  }

  if (!have_a) throw ConfigError("config: plant.a is required");
  if (!have_b) throw ConfigError("config: plant.b is required");
  if (!have_std) throw ConfigError("config: plant.noise_std is required");
  if (!have_p) throw ConfigError("config: channel.p is required");
  if (!have_K) throw ConfigError("config: quantizer.K is required");
  if (cfg.s.has_value() != cfg.A_exp.has_value()) {
    throw ConfigError(
        "config: quantizer.s and quantizer.A_exp must be given together");
  }
  return cfg;
}

ExperimentConfig parse_experiment_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw ConfigError("cannot open config file: " + path);
  }
  return parse_experiment_config(is);
}

ResolvedExperiment resolve(const ExperimentConfig& cfg) {
  ResolvedExperiment out;
  out.sim.plant = cfg.plant;
  validate(out.sim.plant);

  if (cfg.s.has_value()) {
    out.sim.quant.K = cfg.K;
    out.sim.quant.s = *cfg.s;
    out.sim.quant.A_exp = *cfg.A_exp;
    out.sim.quant.B_exp = cfg.B_exp;
    out.sim.quant.L_idx = cfg.L_idx.value_or(*cfg.A_exp);
  } else {
    out.sim.quant =
        snap_gains_to_lattice(cfg.plant.a, cfg.channel_p, cfg.K, cfg.B_exp);
    if (cfg.L_idx) {
      out.sim.quant.L_idx = *cfg.L_idx;
    }
  }
  validate(out.sim.quant, cfg.plant.a, cfg.channel_p);

  out.sim.chan.p = cfg.channel_p;
  out.sim.chan.alphabet_size = cfg.K + 1;
  validate(out.sim.chan);

  out.run = cfg.run;
  if (!cfg.run_delta0_given) {
    out.run.delta0_idx = out.sim.quant.L_idx;
  }
  if (const char* env = std::getenv("DRIFTSTAB_SEED")) {
    out.run.seed = static_cast<std::uint64_t>(
        parse_int("DRIFTSTAB_SEED", trim(env)));
  }

  std::ostringstream os;
  os << "plant.a=" << csv::f17(out.sim.plant.a)
     << ";plant.b=" << csv::f17(out.sim.plant.b)
     << ";plant.noise_std=" << csv::f17(out.sim.plant.noise_std)
     << ";plant.x0=" << csv::f17(out.sim.plant.x0)
     << ";quantizer.K=" << out.sim.quant.K
     << ";quantizer.s=" << csv::f17(out.sim.quant.s)
     << ";quantizer.A_exp=" << out.sim.quant.A_exp
     << ";quantizer.B_exp=" << out.sim.quant.B_exp
     << ";quantizer.L_idx=" << out.sim.quant.L_idx
     << ";channel.p=" << csv::f17(out.sim.chan.p)
     << ";run.T=" << out.run.T << ";run.n_traj=" << out.run.n_traj
     << ";run.seed=" << out.run.seed << ";run.m=" << out.run.m
     << ";run.delta0_idx=" << out.run.delta0_idx
     << ";run.k_max=" << out.run.k_max;
  out.canonical = os.str();
  out.hash = csv::hash_hex(out.canonical);
  return out;
}

}  // namespace driftstab
