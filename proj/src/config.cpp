#include "fermi_slab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "fermi_slab/io.hpp"

namespace fslab {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(trim(part));
  return out;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Every token of `name` is a prefix of a distinct token of `candidate`, or vice versa.
bool tokens_match(const std::string& name, const std::string& candidate) {
  const auto a = split(name, '_');
  auto b = split(candidate, '_');
  if (a.size() != b.size()) return false;
  for (const auto& t : a) {
    auto it = std::find_if(b.begin(), b.end(), [&](const std::string& u) {
      return !t.empty() && !u.empty() && (u.rfind(t, 0) == 0 || t.rfind(u, 0) == 0);
    });
    if (it == b.end()) return false;
    b.erase(it);
  }
  return true;
}

std::string suggest(const std::string& dotted, const std::vector<std::string>& known) {
  const auto dot = dotted.find('.');
  const std::string section = dotted.substr(0, dot);
  const std::string name = dot == std::string::npos ? dotted : dotted.substr(dot + 1);
  std::string best;
  std::size_t best_score = static_cast<std::size_t>(-1);
  for (const auto& k : known) {
    const auto kdot = k.find('.');
    const std::string ksec = k.substr(0, kdot);
    const std::string kname = k.substr(kdot + 1);
    std::size_t score;
    if (lower(kname) == lower(name) || tokens_match(lower(name), lower(kname))) {
      score = 0;
    } else {
      const std::size_t d = levenshtein(lower(name), lower(kname));
      if (d > std::max<std::size_t>(2, kname.size() / 3)) continue;
      score = 2 * d;
    }
    if (ksec != section) score += 1;
    if (score < best_score) {
      best_score = score;
      best = k;
    }
  }
  return best;
}

struct Entry {
  std::string value;
  std::string location;
};

struct Setter {
  std::function<void(RunConfig&, const std::string&)> apply;
  std::function<std::string(const RunConfig&)> show;
};

double to_double(const std::string& v) {
  const double x = parse_double(v);
  if (!std::isfinite(x)) throw InvalidArgument("value must be finite");
  return x;
}

int to_int(const std::string& v) {
  const double x = parse_double(v);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw InvalidArgument("not an integer: '" + trim(v) + "'");
  return static_cast<int>(x);
}

bool to_bool(const std::string& v) {
  const std::string t = lower(trim(v));
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw InvalidArgument("not a boolean: '" + trim(v) + "'");
}

std::vector<double> to_list(const std::string& v) {
  std::string s = trim(v);
  if (!s.empty() && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (const auto& part : split(s, ',')) out.push_back(to_double(part));
  return out;
}

std::string show_list(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + format_double(xs[i]);
  return s;
}

std::string unquote(const std::string& v) {
  std::string s = trim(v);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
  return s;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"physics.epsilon_F",
       {[](RunConfig& c, const std::string& v) { c.physics.epsilon_F = to_double(v); },
        [](const RunConfig& c) { return format_double(c.physics.epsilon_F); }}},
      {"physics.m",
       {[](RunConfig& c, const std::string& v) { c.physics.m = to_double(v); },
        [](const RunConfig& c) { return format_double(c.physics.m); }}},
      {"defect.type",
       {[](RunConfig& c, const std::string& v) {
          const std::string t = lower(unquote(v));
          if (t == "trench") {
            c.defect.type = DefectType::Trench;
          } else if (t == "file" || t == "custom-file") {
            c.defect.type = DefectType::File;
          } else {
            throw InvalidArgument("expected 'trench' or 'file', got '" + unquote(v) + "'");
          }
        },
        [](const RunConfig& c) { return std::string(c.defect.type == DefectType::Trench ? "trench" : "file"); }}},
      {"defect.w",
       {[](RunConfig& c, const std::string& v) { c.defect.w = to_double(v); },
        [](const RunConfig& c) { return format_double(c.defect.w); }}},
      {"defect.depth_scale",
       {[](RunConfig& c, const std::string& v) { c.defect.depth_scale = to_double(v); },
        [](const RunConfig& c) { return format_double(c.defect.depth_scale); }}},
      {"defect.mollify_s",
       {[](RunConfig& c, const std::string& v) { c.defect.mollify_s = to_double(v); },
        [](const RunConfig& c) { return format_double(c.defect.mollify_s); }}},
      {"defect.file",
       {[](RunConfig& c, const std::string& v) { c.defect.file = unquote(v); },
        [](const RunConfig& c) { return c.defect.file.generic_string(); }}},
      {"grid.L",
       {[](RunConfig& c, const std::string& v) { c.grid.L = to_double(v); },
        [](const RunConfig& c) { return format_double(c.grid.L); }}},
      {"grid.n",
       {[](RunConfig& c, const std::string& v) { c.grid.n = to_int(v); },
        [](const RunConfig& c) { return std::to_string(c.grid.n); }}},
      {"scf.max_iter",
       {[](RunConfig& c, const std::string& v) { c.scf.max_iter = to_int(v); },
        [](const RunConfig& c) { return std::to_string(c.scf.max_iter); }}},
      {"scf.tol",
       {[](RunConfig& c, const std::string& v) { c.scf.tol = to_double(v); },
        [](const RunConfig& c) { return format_double(c.scf.tol); }}},
      {"scf.mixing_alpha",
       {[](RunConfig& c, const std::string& v) { c.scf.mixing_alpha = to_double(v); },
        [](const RunConfig& c) { return format_double(c.scf.mixing_alpha); }}},
      {"scf.anderson_depth",
       {[](RunConfig& c, const std::string& v) { c.scf.anderson_depth = to_int(v); },
        [](const RunConfig& c) { return std::to_string(c.scf.anderson_depth); }}},
      {"analysis.friedel_window",
       {[](RunConfig& c, const std::string& v) {
          const auto xs = to_list(v);
          if (xs.size() != 2) throw InvalidArgument("expected two numbers 'z_lo, z_hi'");
          c.analysis.window_set = true;
          c.analysis.window_lo = xs[0];
          c.analysis.window_hi = xs[1];
        },
        [](const RunConfig& c) {
          const auto w = c.friedel_window();
          return show_list({w.z_lo, w.z_hi});
        }}},
      {"analysis.free_exponent",
       {[](RunConfig& c, const std::string& v) { c.analysis.free_exponent = to_bool(v); },
        [](const RunConfig& c) { return std::string(c.analysis.free_exponent ? "true" : "false"); }}},
      {"analysis.m_sweep",
       {[](RunConfig& c, const std::string& v) { c.analysis.m_sweep = to_list(v); },
        [](const RunConfig& c) { return show_list(c.analysis.m_sweep); }}},
      {"output.directory",
       {[](RunConfig& c, const std::string& v) { c.output.directory = unquote(v); },
        [](const RunConfig& c) { return c.output.directory.generic_string(); }}},
      {"output.formats",
       {[](RunConfig& c, const std::string& v) {
          c.output.csv = false;
          c.output.json = false;
          for (const auto& f : split(lower(unquote(v)), ',')) {
            if (f == "csv") {
              c.output.csv = true;
            } else if (f == "json") {
              c.output.json = true;
            } else {
              throw InvalidArgument("unknown format '" + f + "' (allowed: csv, json)");
            }
          }
        },
        [](const RunConfig& c) {
          std::string s;
          if (c.output.csv) s += "csv";
          if (c.output.json) s += s.empty() ? "json" : ", json";
          return s;
        }}},
  };
  return table;
}

struct Collected {
  std::map<std::string, Entry> entries;
};

void add_entry(Collected& col, const std::string& key, const std::string& value, const std::string& location,
               bool allow_replace) {
  const auto& known = known_config_keys();
  if (std::find(known.begin(), known.end(), key) == known.end()) {
    std::string msg = "unknown key '" + key + "'";
    const std::string s = suggest(key, known);
    if (!s.empty()) msg += "; did you mean '" + s + "'?";
    throw ConfigError(msg, location, key);
  }
  auto it = col.entries.find(key);
  if (it != col.entries.end() && !allow_replace) {
    throw ConfigError("duplicate key '" + key + "' (first set at " + it->second.location + ")", location, key);
  }
  col.entries[key] = Entry{value, location};
}

class Validator {
public:
  Validator(const RunConfig& cfg, const Collected& col) : cfg_(cfg), col_(col) {}

  void require(bool ok, const std::string& key, const std::string& message) const {
    if (ok) return;
    const auto it = col_.entries.find(key);
    const std::string where = it == col_.entries.end() ? "<defaults>" : it->second.location;
    std::string shown;
    try {
      shown = setters().at(key).show(cfg_);
    } catch (...) {
    }
    throw ConfigError(key + " = " + shown + ": " + message, where, key);
  }

private:
  const RunConfig& cfg_;
  const Collected& col_;
};

void validate(const RunConfig& c, const Collected& col) {
  const Validator v(c, col);
  v.require(c.physics.epsilon_F > 0.0, "physics.epsilon_F", "must be > 0");
  v.require(c.physics.m > 0.0, "physics.m",
            "must be > 0 (the self-consistent solve needs a Yukawa interaction; m -> 0 is reached by sweep-m)");
  v.require(c.grid.L > 0.0, "grid.L", "must be > 0");
  v.require(c.grid.n >= 3 && c.grid.n % 2 == 1, "grid.n", "must be an odd integer >= 3");
  if (c.defect.type == DefectType::Trench) {
    v.require(c.defect.w > 0.0 && c.defect.w < c.grid.L, "defect.w", "must lie in (0, grid.L)");
    v.require(c.defect.mollify_s >= 0.0, "defect.mollify_s", "must be >= 0");
    v.require(c.grid.L - c.defect.w >= 10.0 / c.physics.m, "defect.w",
              "the defect must stay at least 10/m away from the wall (grid.L - w >= 10/physics.m)");
  } else {
    v.require(!c.defect.file.empty(), "defect.file", "is required when defect.type = file");
  }
  v.require(c.scf.max_iter >= 1, "scf.max_iter", "must be >= 1");
  v.require(c.scf.tol > 0.0, "scf.tol", "must be > 0");
  v.require(c.scf.mixing_alpha > 0.0 && c.scf.mixing_alpha <= 1.0, "scf.mixing_alpha", "must lie in (0, 1]");
  v.require(c.scf.anderson_depth >= 0, "scf.anderson_depth", "must be >= 0");

  const auto w = c.friedel_window();
  const double edge = c.defect.type == DefectType::Trench ? c.defect.w + 2.0 : 0.0;
  v.require(w.z_lo > edge && w.z_lo < w.z_hi && w.z_hi < c.grid.L - 5.0, "analysis.friedel_window",
            "must satisfy defect.w + 2 < z_lo < z_hi < grid.L - 5");

  const auto& ms = c.analysis.m_sweep;
  v.require(!ms.empty(), "analysis.m_sweep", "must list at least one m");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    v.require(ms[i] > 0.0, "analysis.m_sweep", "values must be > 0");
    if (i > 0) v.require(ms[i] < ms[i - 1], "analysis.m_sweep", "values must be strictly decreasing");
  }
  if (c.defect.type == DefectType::Trench) {
    v.require(c.grid.L - c.defect.w >= 10.0 / ms.back(), "analysis.m_sweep",
              "the smallest m must keep the defect 10/m away from the wall");
  }
  v.require(c.output.csv || c.output.json, "output.formats", "must name at least one of csv, json");
}

}  // namespace

ScfConfig RunConfig::scf_config() const {
  ScfConfig s;
  s.max_iter = scf.max_iter;
  s.tol = scf.tol;
  s.mixing_alpha = scf.mixing_alpha;
  s.anderson_depth = scf.anderson_depth;
  return s;
}

FriedelWindow RunConfig::friedel_window() const {
  if (analysis.window_set) return {analysis.window_lo, analysis.window_hi};
  return FriedelWindow::defaults(defect.w, grid.L);
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

RunConfig parse_config(const std::string& text, const std::string& origin, const std::vector<std::string>& overrides,
                       const std::filesystem::path& base_dir) {
  static const std::vector<std::string> sections{"physics", "defect", "grid", "scf", "analysis", "output"};
  Collected col;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string location = origin + ":" + std::to_string(line_no);
    std::string t = line;
    const auto hash = t.find_first_of("#;");
    if (hash != std::string::npos) t = t.substr(0, hash);
    t = trim(t);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("malformed section header '" + t + "'", location);
      section = trim(t.substr(1, t.size() - 2));
      if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
        std::string msg = "unknown section [" + section + "]";
        std::string best;
        std::size_t best_d = 3;
        for (const auto& s : sections) {
          const std::size_t d = levenshtein(lower(section), s);
          if (d < best_d) {
            best_d = d;
            best = s;
          }
        }
        if (!best.empty()) msg += "; did you mean [" + best + "]?";
        throw ConfigError(msg, location, section);
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + t + "'", location);
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", location);
    if (value.empty()) throw ConfigError("missing value for '" + key + "'", location, key);
    if (section.empty()) {
      throw ConfigError("key '" + key + "' appears before any [section] header", location, key);
    }
    add_entry(col, section + "." + key, value, location, false);
  }

  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw ConfigError("override must read 'section.key=value', got '" + ov + "'", "<override>");
    const std::string key = trim(ov.substr(0, eq));
    const std::string value = trim(ov.substr(eq + 1));
    if (key.find('.') == std::string::npos) {
      throw ConfigError("override key '" + key + "' must be dotted as section.key", "<override>", key);
    }
    if (value.empty()) throw ConfigError("missing value for override '" + key + "'", "<override>", key);
    add_entry(col, key, value, "<override>", true);
  }

  RunConfig cfg;
  for (const auto& [key, entry] : col.entries) {
    try {
      setters().at(key).apply(cfg, entry.value);
    } catch (const InvalidArgument& e) {
      throw ConfigError(key + ": " + e.what(), entry.location, key);
    }
  }
  if (!cfg.defect.file.empty() && cfg.defect.file.is_relative() && !base_dir.empty()) {
    cfg.defect.file = base_dir / cfg.defect.file;
  }
  validate(cfg, col);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string(), path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string(), overrides, path.parent_path());
}

std::string canonical_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [key, setter] : setters()) {
    if (key == "output.directory") continue;
    if (key == "defect.file" && cfg.defect.type != DefectType::File) continue;
    out += key + " = " + setter.show(cfg) + "\n";
  }
  return out;
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fslab
