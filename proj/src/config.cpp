#include "carnotflow/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "carnotflow/oracles.hpp"

namespace carnotflow {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

using KvMap = std::map<std::string, std::string>;  // "section.key" -> value

KvMap parse_ini(const std::string& text) {
  KvMap kv;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty() || key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key outside section");
    if (!kv.emplace(section + "." + key, value).second)
      throw ConfigError("config: duplicate key " + section + "." + key);
  }
  return kv;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + key + ": '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) throw ConfigError("config: expected integer for " + key);
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: bad boolean for " + key + ": '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw ConfigError("config: empty list for " + key);
  return out;
}

class Reader {
 public:
  explicit Reader(KvMap kv) : kv_(std::move(kv)) {}

  std::optional<std::string> take(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    std::string v = it->second;
    kv_.erase(it);
    return v;
  }

  std::string require(const std::string& key) {
    auto v = take(key);
    if (!v) throw ConfigError("config: missing required key " + key);
    return *v;
  }

  void finish() const {
    if (!kv_.empty()) throw ConfigError("config: unknown key " + kv_.begin()->first);
  }

 private:
  KvMap kv_;
};

Vec to_vec(const std::vector<double>& xs) {
  Vec v(static_cast<int>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v(static_cast<int>(i)) = xs[i];
  return v;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  Reader r(parse_ini(text));
  RunConfig cfg;
  cfg.group_name = r.require("group.name");
  const GroupDescriptor group = GroupDescriptor::parse(cfg.group_name);
  cfg.operator_name = r.require("operator.name");
  make_operator(cfg.operator_name, group.horizontal_dim());  // validates the name

  cfg.game.epsilon = to_double("game.epsilon", r.require("game.epsilon"));
  cfg.game.horizon = to_double("game.T", r.require("game.T"));
  if (auto v = r.take("game.mu")) cfg.game.mu = to_double("game.mu", *v);
  if (auto v = r.take("game.strategy")) {
    if (*v == "guided")
      cfg.game.strategy = Strategy::Guided;
    else if (*v == "generic")
      cfg.game.strategy = Strategy::Generic;
    else
      throw ConfigError("config: game.strategy must be guided or generic");
  }
  if (auto v = r.take("game.n_dir")) cfg.game.n_dir = to_int("game.n_dir", *v);
  if (auto v = r.take("game.n_mag")) cfg.game.n_mag = to_int("game.n_mag", *v);
  if (auto v = r.take("game.eta_min")) cfg.game.eta_min = to_double("game.eta_min", *v);
  if (auto v = r.take("game.fd_delta")) cfg.game.fd_delta = to_double("game.fd_delta", *v);
  if (auto v = r.take("game.guided_perturb"))
    cfg.game.x_dict.guided_perturb = to_list("game.guided_perturb", *v);
  if (auto v = r.take("game.a_max")) cfg.game.x_dict.a_max = to_double("game.a_max", *v);
  if (auto v = r.take("game.n_a")) cfg.game.x_dict.n_a = to_int("game.n_a", *v);
  if (auto v = r.take("game.b_max")) cfg.game.x_dict.b_max = to_double("game.b_max", *v);
  if (auto v = r.take("game.n_b")) cfg.game.x_dict.n_b = to_int("game.n_b", *v);
  if (!(cfg.game.epsilon > 0.0 && cfg.game.epsilon < 1.0))
    throw ConfigError("config: game.epsilon must lie in (0,1)");
  if (cfg.game.n_dir < 1 || cfg.game.n_mag < 1)
    throw ConfigError("config: game.n_dir and game.n_mag must be positive");

  cfg.box_lo = to_vec(to_list("grid.lo", r.require("grid.lo")));
  cfg.box_hi = to_vec(to_list("grid.hi", r.require("grid.hi")));
  auto hs = to_list("grid.h", r.require("grid.h"));
  if (static_cast<int>(hs.size()) == 1) hs.assign(group.dim(), hs[0]);
  cfg.box_h = to_vec(hs);
  if (cfg.box_lo.size() != group.dim() || cfg.box_hi.size() != group.dim() ||
      cfg.box_h.size() != group.dim())
    throw ConfigError("config: grid lo/hi/h must match the group dimension");

  cfg.data.name = r.require("initial_data.name");
  if (auto v = r.take("initial_data.value")) cfg.data.value = to_double("initial_data.value", *v);
  if (auto v = r.take("initial_data.r0")) cfg.data.r0 = to_double("initial_data.r0", *v);
  if (auto v = r.take("initial_data.cap")) cfg.data.cap = to_double("initial_data.cap", *v);
  if (auto v = r.take("initial_data.amplitude"))
    cfg.data.amplitude = to_double("initial_data.amplitude", *v);
  if (auto v = r.take("initial_data.rho")) cfg.data.rho = to_double("initial_data.rho", *v);
  if (auto v = r.take("initial_data.blend")) cfg.data.blend = to_double("initial_data.blend", *v);

  if (auto v = r.take("output.dir")) cfg.output.dir = *v;
  if (auto v = r.take("output.stride")) cfg.output.stride = to_int("output.stride", *v);
  if (auto v = r.take("output.track_level_set"))
    cfg.output.track_level_set = to_bool("output.track_level_set", *v);
  if (auto v = r.take("output.n_rays")) cfg.output.n_rays = to_int("output.n_rays", *v);
  if (cfg.output.stride < 1) throw ConfigError("config: output.stride must be >= 1");

  r.finish();
  make_initial_datum(cfg.data, group);  // validates the data name/params
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string RunConfig::canonical() const {
  std::ostringstream os;
  os.precision(17);
  auto vec = [&](const Vec& v) {
    std::ostringstream s;
    s.precision(17);
    for (int i = 0; i < v.size(); ++i) s << (i ? "," : "") << v(i);
    return s.str();
  };
  os << "group.name=" << group_name << "\n";
  os << "operator.name=" << operator_name << "\n";
  os << "game.epsilon=" << game.epsilon << "\n";
  os << "game.mu=" << game.mu << "\n";
  os << "game.T=" << game.horizon << "\n";
  os << "game.strategy=" << (game.strategy == Strategy::Guided ? "guided" : "generic") << "\n";
  os << "game.n_dir=" << game.n_dir << "\n";
  os << "game.n_mag=" << game.n_mag << "\n";
  os << "game.eta_min=" << game.eta_min << "\n";
  os << "game.fd_delta=" << game.fd_delta << "\n";
  os << "game.guided_perturb=";
  for (std::size_t i = 0; i < game.x_dict.guided_perturb.size(); ++i)
    os << (i ? "," : "") << game.x_dict.guided_perturb[i];
  os << "\n";
  os << "game.a_max=" << game.x_dict.a_max << "\n";
  os << "game.n_a=" << game.x_dict.n_a << "\n";
  os << "game.b_max=" << game.x_dict.b_max << "\n";
  os << "game.n_b=" << game.x_dict.n_b << "\n";
  os << "grid.lo=" << vec(box_lo) << "\n";
  os << "grid.hi=" << vec(box_hi) << "\n";
  os << "grid.h=" << vec(box_h) << "\n";
  os << "initial_data.name=" << data.name << "\n";
  os << "initial_data.value=" << data.value << "\n";
  os << "initial_data.r0=" << data.r0 << "\n";
  os << "initial_data.cap=" << data.cap << "\n";
  os << "initial_data.amplitude=" << data.amplitude << "\n";
  os << "initial_data.rho=" << data.rho << "\n";
  os << "initial_data.blend=" << data.blend << "\n";
  os << "output.stride=" << output.stride << "\n";
  os << "output.track_level_set=" << (output.track_level_set ? "true" : "false") << "\n";
  os << "output.n_rays=" << output.n_rays << "\n";
  return os.str();
}

InitialDatum make_initial_datum(const InitialDataSpec& spec, const GroupDescriptor& g) {
  InitialDatum d;
  if (spec.name == "constant") {
    const double v = spec.value;
    d.fn = [v](const Vec&) { return v; };
    d.far_field = v;
    return d;
  }
  if (spec.name == "quadratic-cylinder" || spec.name == "capped-quadratic") {
    if (g.dim() < 2) throw ConfigError(spec.name + " needs dimension >= 2");
    const int ncoord = spec.name == "quadratic-cylinder" ? 2 : g.horizontal_dim();
    const double r2 = spec.r0 * spec.r0;
    const double cap = spec.cap, w = spec.blend, amp = spec.amplitude;
    if (w < 0.0 || w >= cap) throw ConfigError("blend must lie in [0, cap)");
    d.fn = [ncoord, r2, cap, w, amp](const Vec& p) {
      const double s = p.head(ncoord).squaredNorm() - r2;
      double f;
      if (s <= cap - w)
        f = s;
      else if (w > 0.0 && s < cap + w)
        f = cap - (cap + w - s) * (cap + w - s) / (4.0 * w);
      else
        f = cap;
      return amp * f;
    };
    d.far_field = amp * cap;
    d.r0 = spec.r0;
    return d;
  }
  if (spec.name == "smooth-bump") {
    const double amp = spec.amplitude, rho = spec.rho;
    if (!(rho > 0.0)) throw ConfigError("smooth-bump: rho must be positive");
    d.fn = [amp, rho](const Vec& p) {
      const double s2 = p.squaredNorm() / (rho * rho);
      if (s2 >= 1.0) return 0.0;
      return amp * std::exp(1.0 - 1.0 / (1.0 - s2));
    };
    d.far_field = 0.0;
    return d;
  }
  throw ConfigError("unknown initial data: " + spec.name);
}

std::optional<double> exact_radius(const RunConfig& cfg, const GroupDescriptor& g, double t) {
  if (cfg.operator_name != "mcf") return std::nullopt;
  const InitialDatum d = make_initial_datum(cfg.data, g);
  if (!d.r0 || *d.r0 <= 0.0) return std::nullopt;
  try {
    if (cfg.data.name == "quadratic-cylinder") return heisenberg_cylinder_radius(t, *d.r0);
    if (cfg.data.name == "capped-quadratic") {
      if (g.kind() == GroupKind::Euclidean)
        return euclidean_sphere_radius(t, *d.r0, g.horizontal_dim());
      if (g.kind() == GroupKind::Heisenberg && g.horizontal_dim() == 2)
        return heisenberg_cylinder_radius(t, *d.r0);
    }
  } catch (const std::domain_error&) {
    return std::nullopt;  // past extinction
  }
  return std::nullopt;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace carnotflow
