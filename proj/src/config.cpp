#include "eigsgd/config.hpp"

#include <cerrno>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>
#include <variant>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace eigsgd {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> kSchema = {
    {"experiment", {"name"}},
    {"problem",
     {"rows", "cols", "sigma_min", "sigma_max", "spacing", "matrix_seed", "data_seed", "consistency", "noise_level"}},
    {"method", {"name"}},
    {"schedule", {"type", "alpha", "a", "b", "gamma"}},
    {"run",
     {"iters", "probes", "repetitions", "base_seed", "x0_radius", "x0_seed", "recording", "points_per_decade"}},
    {"output", {"dir", "emit_theory", "emit_plot_script"}},
};

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) const {
    const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return *v;
  }

  std::string require(const std::string& key) const {
    auto v = raw(key);
    if (!v) throw ConfigError(key, "required key is missing");
    return *v;
  }

  template <class T>
  T number(const std::string& key, const std::string& text) const {
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
      throw ConfigError(key, fmt::format("expected a {}, got '{}'", std::is_integral_v<T> ? "integer" : "number", text));
    return v;
  }

  template <class T>
  T get(const std::string& key) const {
    return number<T>(key, require(key));
  }

  template <class T>
  T get(const std::string& key, T fallback) const {
    const auto v = raw(key);
    return v ? number<T>(key, *v) : fallback;
  }

  bool flag(const std::string& key, bool fallback) const {
    const auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError(key, "expected true or false, got '" + *v + "'");
  }

 private:
  const pt::ptree& tree_;
};

void reject_unknown(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    const auto it = kSchema.find(section);
    if (it == kSchema.end()) {
      if (body.empty()) throw ConfigError(section, "keys must live inside a [section]");
      throw ConfigError(section, "unknown section");
    }
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ConfigError(section + "." + key, "unknown key");
  }
}

std::vector<Index> parse_probes(const std::string& text, const Reader& r) {
  std::vector<Index> out;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("run.probes", "empty entry in '" + text + "'");
    out.push_back(r.number<Index>("run.probes", cell.substr(b, e - b + 1)));
  }
  if (out.empty()) throw ConfigError("run.probes", "at least one probe is required");
  return out;
}

template <class F>
auto wrap(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", fmt::format("malformed config at line {}: {}", e.line(), e.message()));
  }
  reject_unknown(tree);
  const Reader r(tree);

  ExperimentConfig cfg;
  cfg.name = r.raw("experiment.name").value_or(cfg.name);

  auto& sp = cfg.problem;
  sp.rows = r.get<Index>("problem.rows");
  sp.cols = r.get<Index>("problem.cols");
  sp.sigma_min = r.get<double>("problem.sigma_min");
  sp.sigma_max = r.get<double>("problem.sigma_max");
  if (auto s = r.raw("problem.spacing")) sp.spacing = wrap("problem.spacing", [&] { return parse_spacing(*s); });
  sp.seed = r.get<std::uint64_t>("problem.matrix_seed", 0);
  cfg.data_seed = r.get<std::uint64_t>("problem.data_seed", 0);
  wrap("problem", [&] {
    sp.validate();
    return 0;
  });

  const std::string consistency = r.raw("problem.consistency").value_or("consistent");
  if (consistency == "consistent") {
    if (r.raw("problem.noise_level")) throw ConfigError("problem.noise_level", "only valid for inconsistent problems");
    cfg.consistency = Consistency::exact();
  } else if (consistency == "inconsistent") {
    const double noise = r.get<double>("problem.noise_level");
    if (!(noise > 0.0)) throw ConfigError("problem.noise_level", "must be positive");
    if (sp.rows <= sp.cols)
      throw ConfigError("problem.consistency", "an inconsistent problem needs rows > cols");
    cfg.consistency = Consistency::noisy(noise);
  } else {
    throw ConfigError("problem.consistency", "expected consistent or inconsistent, got '" + consistency + "'");
  }

  const std::string method = r.require("method.name");
  cfg.method = wrap("method.name", [&] { return parse_method(method); });

  const auto type = r.raw("schedule.type");
  if (cfg.method == Method::kaczmarz) {
    // The projection step has no step size; a schedule section is accepted and ignored.
    cfg.schedule.reset();
  } else {
    if (!type) throw ConfigError("schedule.type", "required for " + method);
    auto used = [&](std::initializer_list<const char*> allowed) {
      for (const char* k : {"alpha", "a", "b", "gamma"}) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || std::string(a) == k;
        if (!ok && r.raw(std::string("schedule.") + k))
          throw ConfigError(std::string("schedule.") + k, "not a parameter of the " + *type + " schedule");
      }
    };
    if (*type == "fixed") {
      used({"alpha"});
      const double alpha = r.get<double>("schedule.alpha");
      cfg.schedule = wrap("schedule.alpha", [&] { return StepSchedule::fixed(alpha); });
    } else if (*type == "harmonic") {
      used({"a", "b"});
      const double a = r.get<double>("schedule.a"), b = r.get<double>("schedule.b");
      cfg.schedule = wrap("schedule", [&] { return StepSchedule::harmonic(a, b); });
    } else if (*type == "polynomial") {
      used({"a", "b", "gamma"});
      const double a = r.get<double>("schedule.a"), b = r.get<double>("schedule.b");
      const double g = r.get<double>("schedule.gamma");
      cfg.schedule = wrap("schedule.gamma", [&] { return StepSchedule::polynomial(a, b, g); });
    } else {
      throw ConfigError("schedule.type", "expected fixed, harmonic or polynomial, got '" + *type + "'");
    }
  }

  cfg.iters = r.get<std::int64_t>("run.iters");
  if (cfg.iters < 1) throw ConfigError("run.iters", "must be >= 1");
  cfg.probes = parse_probes(r.require("run.probes"), r);
  for (Index l : cfg.probes)
    if (l < 1 || l > sp.cols) throw ConfigError("run.probes", fmt::format("probe {} outside 1..{}", l, sp.cols));
  cfg.plan.repetitions = r.get<std::int64_t>("run.repetitions", 1);
  if (cfg.plan.repetitions < 1) throw ConfigError("run.repetitions", "must be >= 1");
  cfg.plan.base_seed = r.get<std::uint64_t>("run.base_seed", 0);
  cfg.x0_radius = r.get<double>("run.x0_radius", 1.0);
  if (!(cfg.x0_radius > 0.0)) throw ConfigError("run.x0_radius", "must be positive");
  cfg.x0_seed = r.get<std::uint64_t>("run.x0_seed", 0);

  const std::string rec = r.raw("run.recording").value_or("geometric");
  if (rec == "all") {
    if (r.raw("run.points_per_decade")) throw ConfigError("run.points_per_decade", "only valid with geometric recording");
    cfg.recording = Recording::every();
  } else if (rec == "geometric") {
    const int ppd = r.get<int>("run.points_per_decade", 64);
    if (ppd < 1) throw ConfigError("run.points_per_decade", "must be >= 1");
    cfg.recording = Recording::geometric(ppd);
  } else {
    throw ConfigError("run.recording", "expected all or geometric, got '" + rec + "'");
  }

  if (auto dir = r.raw("output.dir")) {
    if (dir->empty()) throw ConfigError("output.dir", "must not be empty");
    cfg.output_dir = *dir;
  }
  cfg.emit_theory = r.flag("output.emit_theory", true);
  cfg.emit_plot_script = r.flag("output.emit_plot_script", true);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::system_error(errno, std::generic_category(), "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  auto line = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };

  out += "[experiment]\n";
  line("name", cfg.name);

  out += "\n[problem]\n";
  line("rows", std::to_string(cfg.problem.rows));
  line("cols", std::to_string(cfg.problem.cols));
  line("sigma_min", num(cfg.problem.sigma_min));
  line("sigma_max", num(cfg.problem.sigma_max));
  line("spacing", to_string(cfg.problem.spacing));
  line("matrix_seed", std::to_string(cfg.problem.seed));
  line("data_seed", std::to_string(cfg.data_seed));
  line("consistency", cfg.consistency.consistent ? "consistent" : "inconsistent");
  if (!cfg.consistency.consistent) line("noise_level", num(cfg.consistency.noise_level));

  out += "\n[method]\n";
  line("name", to_string(cfg.method));

  if (cfg.schedule) {
    out += "\n[schedule]\n";
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, FixedStep>) {
            line("type", "fixed");
            line("alpha", num(s.alpha));
          } else if constexpr (std::is_same_v<T, HarmonicStep>) {
            line("type", "harmonic");
            line("a", num(s.a));
            line("b", num(s.b));
          } else {
            line("type", "polynomial");
            line("a", num(s.a));
            line("b", num(s.b));
            line("gamma", num(s.gamma));
          }
        },
        cfg.schedule->variant());
  }

  out += "\n[run]\n";
  line("iters", std::to_string(cfg.iters));
  std::string probes;
  for (std::size_t j = 0; j < cfg.probes.size(); ++j) probes += (j ? "," : "") + std::to_string(cfg.probes[j]);
  line("probes", probes);
  line("repetitions", std::to_string(cfg.plan.repetitions));
  line("base_seed", std::to_string(cfg.plan.base_seed));
  line("x0_radius", num(cfg.x0_radius));
  line("x0_seed", std::to_string(cfg.x0_seed));
  if (cfg.recording.kind == Recording::Kind::all) {
    line("recording", "all");
  } else {
    line("recording", "geometric");
    line("points_per_decade", std::to_string(cfg.recording.points_per_decade));
  }

  out += "\n[output]\n";
  line("dir", cfg.output_dir.string());
  line("emit_theory", cfg.emit_theory ? "true" : "false");
  line("emit_plot_script", cfg.emit_plot_script ? "true" : "false");
  return out;
}

}  // namespace eigsgd
