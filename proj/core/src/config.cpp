#include "wpcn/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wpcn/units.hpp"

namespace wpcn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& value, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw std::runtime_error("config: empty entry in '" + key + "'");
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw std::runtime_error("config: bad number '" + item + "' for '" + key + "'");
    }
    if (pos != item.size())
      throw std::runtime_error("config: bad number '" + item + "' for '" + key + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::runtime_error("config: no value for '" + key + "'");
  return out;
}

double parse_scalar(const std::string& value, const std::string& key) {
  const std::vector<double> v = parse_list(value, key);
  if (v.size() != 1)
    throw std::runtime_error("config: '" + key + "' expects a single value");
  return v[0];
}

Eigen::Vector3d parse_vec3(const std::string& value, const std::string& key) {
  const std::vector<double> v = parse_list(value, key);
  if (v.size() != 3)
    throw std::runtime_error("config: '" + key + "' expects x,y,z");
  return {v[0], v[1], v[2]};
}

}  // namespace

SystemConfig default_config() {
  SystemConfig cfg;
  finalize_config(cfg);
  return cfg;
}

void finalize_config(SystemConfig& cfg) {
  if (cfg.devices < 1) throw std::runtime_error("config: devices must be >= 1");
  if (cfg.irs_elements < 0) throw std::runtime_error("config: irs_elements must be >= 0");
  if (cfg.trials < 1) throw std::runtime_error("config: trials must be >= 1");
  if (cfg.t_max <= 0.0) throw std::runtime_error("config: t_max must be positive");
  if (cfg.pe <= 0.0) throw std::runtime_error("config: pe must be positive");
  if (cfg.sigma2 <= 0.0) throw std::runtime_error("config: sigma2 must be positive");

  if (cfg.gamma.size() == 0) cfg.gamma = Eigen::VectorXd::Constant(cfg.devices, 0.1);
  else if (cfg.gamma.size() == 1)
    cfg.gamma = Eigen::VectorXd::Constant(cfg.devices, cfg.gamma[0]);
  else if (cfg.gamma.size() != cfg.devices)
    throw std::runtime_error("config: gamma needs 1 or K entries");
  if ((cfg.gamma.array() < 0.0).any())
    throw std::runtime_error("config: gamma must be non-negative");

  if (cfg.eh.empty()) cfg.eh.assign(cfg.devices, EhParams{});
  else if (cfg.eh.size() == 1)
    cfg.eh.assign(cfg.devices, cfg.eh.front());
  else if (static_cast<int>(cfg.eh.size()) != cfg.devices)
    throw std::runtime_error("config: eh params need 1 or K entries");
}

SystemConfig parse_config(const std::string& text) {
  SystemConfig cfg;
  std::vector<double> eh_a{EhParams{}.a}, eh_b{EhParams{}.b}, eh_m{EhParams{}.saturation};

  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(line_no) +
                               " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "devices") cfg.devices = static_cast<int>(parse_scalar(value, key));
    else if (key == "irs_elements") cfg.irs_elements = static_cast<int>(parse_scalar(value, key));
    else if (key == "pe_dbm") cfg.pe = dbm_to_watts(parse_scalar(value, key));
    else if (key == "sigma2_dbm") cfg.sigma2 = dbm_to_watts(parse_scalar(value, key));
    else if (key == "t_max") cfg.t_max = parse_scalar(value, key);
    else if (key == "gamma") {
      const std::vector<double> g = parse_list(value, key);
      cfg.gamma = Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
    } else if (key == "eh_a") eh_a = parse_list(value, key);
    else if (key == "eh_b") eh_b = parse_list(value, key);
    else if (key == "eh_m") eh_m = parse_list(value, key);
    else if (key == "ps_pos") cfg.ps_pos = parse_vec3(value, key);
    else if (key == "irs_pos") cfg.irs_pos = parse_vec3(value, key);
    else if (key == "ds_pos") cfg.ds_pos = parse_vec3(value, key);
    else if (key == "cluster_center") cfg.cluster_center = parse_vec3(value, key);
    else if (key == "cluster_radius") cfg.cluster_radius = parse_scalar(value, key);
    else if (key == "c0") cfg.fading.c0 = parse_scalar(value, key);
    else if (key == "d0") cfg.fading.d0 = parse_scalar(value, key);
    else if (key == "alpha_los") cfg.fading.alpha_los = parse_scalar(value, key);
    else if (key == "alpha_nlos") cfg.fading.alpha_nlos = parse_scalar(value, key);
    else if (key == "rician_k") cfg.fading.rician_k = parse_scalar(value, key);
    else if (key == "trials") cfg.trials = static_cast<int>(parse_scalar(value, key));
    else if (key == "base_seed")
      cfg.base_seed = static_cast<std::uint64_t>(parse_scalar(value, key));
    else
      throw std::runtime_error("config: unknown key '" + key + "' on line " +
                               std::to_string(line_no));
  }

  const std::size_t n_eh = std::max({eh_a.size(), eh_b.size(), eh_m.size()});
  auto at = [](const std::vector<double>& v, std::size_t i) {
    return v.size() == 1 ? v[0] : v.at(i);
  };
  if ((eh_a.size() != 1 && eh_a.size() != n_eh) ||
      (eh_b.size() != 1 && eh_b.size() != n_eh) ||
      (eh_m.size() != 1 && eh_m.size() != n_eh))
    throw std::runtime_error("config: eh_a/eh_b/eh_m lengths inconsistent");
  cfg.eh.clear();
  for (std::size_t i = 0; i < n_eh; ++i)
    cfg.eh.push_back({at(eh_a, i), at(eh_b, i), at(eh_m, i)});

  finalize_config(cfg);
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace wpcn
