#include "tcdark/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace tcdark {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
  throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as " + expected);
}

double to_double(const std::string& key, const std::string& value) {
  double x = 0.0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, x);
  if (ec != std::errc{} || ptr != end || !std::isfinite(x)) bad_value(key, value, "a finite number");
  return x;
}

int to_int(const std::string& key, const std::string& value) {
  int x = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, x);
  if (ec != std::errc{} || ptr != end) bad_value(key, value, "an integer");
  return x;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  bad_value(key, value, "true or false");
}

std::vector<int> to_ints(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const auto& w : words(value)) out.push_back(to_int(key, w));
  return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& w : words(value)) out.push_back(to_double(key, w));
  return out;
}

std::vector<std::pair<int, int>> to_pairs(const std::string& key, const std::string& value) {
  std::vector<std::pair<int, int>> out;
  for (const auto& w : words(value)) {
    const auto dash = w.find('-');
    if (dash == std::string::npos || dash == 0) bad_value(key, w, "a pair 'i-j'");
    out.emplace_back(to_int(key, w.substr(0, dash)), to_int(key, w.substr(dash + 1)));
  }
  return out;
}

// Shortest representation that parses back to the same double.
std::string fmt(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string fmt(const std::vector<int>& v) {
  std::string s;
  for (int x : v) s += (s.empty() ? "" : " ") + std::to_string(x);
  return s;
}

std::string fmt(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt(x);
  return s;
}

std::string fmt(const std::vector<std::pair<int, int>>& v) {
  std::string s;
  for (auto [a, b] : v) s += (s.empty() ? "" : " ") + std::to_string(a) + "-" + std::to_string(b);
  return s;
}

struct Field {
  std::string key;
  std::function<void(ExperimentSpec&, const std::string&)> set;
  std::function<std::string(const ExperimentSpec&)> get;
};

template <class Parse>
auto wrap(const std::string& key, Parse parse) {
  return [key, parse](const std::string& v) {
    try {
      return parse(v);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  };
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    auto add = [&](std::string key, auto set, auto get) { f.push_back({std::move(key), set, get}); };
    using S = ExperimentSpec;
    using Str = const std::string&;

    add("name", [](S& s, Str v) { s.name = v; }, [](const S& s) { return s.name; });
    add("alias", [](S& s, Str v) { s.alias = v; }, [](const S& s) { return s.alias; });
    add("description", [](S& s, Str v) { s.description = v; }, [](const S& s) { return s.description; });
    add("kind", [](S& s, Str v) { s.kind = wrap("kind", parse_experiment_kind)(v); },
        [](const S& s) { return to_string(s.kind); });

    add("model.cavities", [](S& s, Str v) { s.cavities = to_int("model.cavities", v); },
        [](const S& s) { return std::to_string(s.cavities); });
    add("model.atoms", [](S& s, Str v) { s.atoms = to_int("model.atoms", v); },
        [](const S& s) { return std::to_string(s.atoms); });
    add("model.mobile", [](S& s, Str v) { s.mobile = to_bool("model.mobile", v); },
        [](const S& s) { return std::string(s.mobile ? "true" : "false"); });
    add("model.home", [](S& s, Str v) { s.home = to_ints("model.home", v); }, [](const S& s) { return fmt(s.home); });
    add("model.edges", [](S& s, Str v) { s.edges = to_pairs("model.edges", v); },
        [](const S& s) { return fmt(s.edges); });
    add("model.sector", [](S& s, Str v) { s.sector = to_int("model.sector", v); },
        [](const S& s) { return std::to_string(s.sector); });
    add("model.cutoff",
        [](S& s, Str v) {
          if (v == "none") s.cutoff.reset();
          else s.cutoff = to_int("model.cutoff", v);
        },
        [](const S& s) { return s.cutoff ? std::to_string(*s.cutoff) : std::string("none"); });

    add("params.omega", [](S& s, Str v) { s.omega = to_double("params.omega", v); }, [](const S& s) { return fmt(s.omega); });
    add("params.g", [](S& s, Str v) { s.g = to_double("params.g", v); }, [](const S& s) { return fmt(s.g); });
    add("params.mu_ph", [](S& s, Str v) { s.mu_ph = to_double("params.mu_ph", v); }, [](const S& s) { return fmt(s.mu_ph); });
    add("params.mu_at", [](S& s, Str v) { s.mu_at = to_double("params.mu_at", v); }, [](const S& s) { return fmt(s.mu_at); });
    add("params.frame",
        [](S& s, Str v) {
          if (v == "rotating") s.frame = Frame::rotating;
          else if (v == "lab") s.frame = Frame::lab;
          else bad_value("params.frame", v, "rotating or lab");
        },
        [](const S& s) { return std::string(s.frame == Frame::lab ? "lab" : "rotating"); });

    add("schedule.kind", [](S& s, Str v) { s.schedule.kind = wrap("schedule.kind", parse_schedule_kind)(v); },
        [](const S& s) { return to_string(s.schedule.kind); });
    add("schedule.duration", [](S& s, Str v) { s.schedule.duration = to_double("schedule.duration", v); },
        [](const S& s) { return fmt(s.schedule.duration); });
    add("schedule.speedup", [](S& s, Str v) { s.schedule.speedup = to_double("schedule.speedup", v); },
        [](const S& s) { return fmt(s.schedule.speedup); });
    add("schedule.length", [](S& s, Str v) { s.schedule.length = to_double("schedule.length", v); },
        [](const S& s) { return fmt(s.schedule.length); });
    add("schedule.x_start", [](S& s, Str v) { s.schedule.x_start = to_double("schedule.x_start", v); },
        [](const S& s) { return fmt(s.schedule.x_start); });
    add("schedule.x_end", [](S& s, Str v) { s.schedule.x_end = to_double("schedule.x_end", v); },
        [](const S& s) { return fmt(s.schedule.x_end); });
    add("schedule.target", [](S& s, Str v) { s.target = wrap("schedule.target", parse_drive_target)(v); },
        [](const S& s) { return to_string(s.target); });
    add("schedule.driven", [](S& s, Str v) { s.driven_atoms = to_ints("schedule.driven", v); },
        [](const S& s) { return fmt(s.driven_atoms); });

    add("initial.pairs", [](S& s, Str v) { s.pairs = to_pairs("initial.pairs", v); },
        [](const S& s) { return fmt(s.pairs); });
    add("initial.weights", [](S& s, Str v) { s.cavity_weights = to_doubles("initial.weights", v); },
        [](const S& s) { return fmt(s.cavity_weights); });

    add("run.dt", [](S& s, Str v) { s.run.dt = to_double("run.dt", v); }, [](const S& s) { return fmt(s.run.dt); });
    add("run.stop_time",
        [](S& s, Str v) {
          if (v == "none") s.run.stop_time.reset();
          else s.run.stop_time = to_double("run.stop_time", v);
        },
        [](const S& s) { return s.run.stop_time ? fmt(*s.run.stop_time) : std::string("none"); });
    add("run.backend", [](S& s, Str v) { s.run.backend = wrap("run.backend", parse_backend)(v); },
        [](const S& s) { return to_string(s.run.backend); });
    add("run.stride", [](S& s, Str v) { s.run.sample_every = to_int("run.stride", v); },
        [](const S& s) { return std::to_string(s.run.sample_every); });
    add("run.cache_quantum", [](S& s, Str v) { s.run.cache_quantum = to_double("run.cache_quantum", v); },
        [](const S& s) { return fmt(s.run.cache_quantum); });
    add("run.rule", [](S& s, Str v) { s.run.rule = wrap("run.rule", parse_step_rule)(v); },
        [](const S& s) { return to_string(s.run.rule); });

    add("observables", [](S& s, Str v) { s.observables = split(v, ','); },
        [](const S& s) {
          std::string out;
          for (const auto& o : s.observables) out += (out.empty() ? "" : ", ") + o;
          return out;
        });
    add("spectrum.points", [](S& s, Str v) { s.spectrum_points = to_int("spectrum.points", v); },
        [](const S& s) { return std::to_string(s.spectrum_points); });
    return f;
  }();
  return table;
}

const Field& field(const std::string& key) {
  for (const auto& f : fields())
    if (f.key == key) return f;
  std::string known;
  for (const auto& f : fields()) known += " " + f.key;
  throw ConfigError("unknown config key '" + key + "'; known keys:" + known);
}

}  // namespace

ConfigEntries parse_config(std::istream& is) {
  ConfigEntries out;
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    out.emplace_back(std::move(key), trim(line.substr(eq + 1)));
  }
  return out;
}

ConfigEntries read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::pair<std::string, std::string> parse_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || trim(text.substr(0, eq)).empty())
    throw ConfigError("expected key=value, got '" + text + "'");
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  field(key).set(spec, value);
}

ExperimentSpec spec_from_entries(const ConfigEntries& entries, ExperimentSpec base) {
  std::size_t first = 0;
  if (!entries.empty() && entries.front().first == "experiment") {
    base = find_experiment(entries.front().second);
    first = 1;
  }
  for (std::size_t i = first; i < entries.size(); ++i) apply_setting(base, entries[i].first, entries[i].second);
  return base;
}

ConfigEntries spec_entries(const ExperimentSpec& spec) {
  ConfigEntries out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(spec));
  return out;
}

void write_config(std::ostream& os, const ExperimentSpec& spec) {
  for (const auto& [k, v] : spec_entries(spec)) os << k << " = " << v << '\n';
}

}  // namespace tcdark
