#include "config.hpp"

#include <openssl/evp.h>

#include "common.hpp"
#include "superpixel.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace afa {

namespace {

std::string fmt_double(double v) {
  // Shortest decimal form that parses back to the same value.
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double out = 0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for '" + key + "': " + v);
  }
  if (pos != v.size())
    throw ConfigError("config: bad number for '" + key + "': " + v);
  return out;
}

int64_t parse_int(const std::string& key, const std::string& v) {
  size_t pos = 0;
  int64_t out = 0;
  try {
    out = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for '" + key + "': " + v);
  }
  if (pos != v.size())
    throw ConfigError("config: bad integer for '" + key + "': " + v);
  return out;
}

uint64_t parse_uint(const std::string& key, const std::string& v) {
  size_t pos = 0;
  uint64_t out = 0;
  try {
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for '" + key + "': " + v);
  }
  if (pos != v.size())
    throw ConfigError("config: bad integer for '" + key + "': " + v);
  return out;
}

template <typename Enum>
struct EnumName {
  Enum value;
  const char* name;
};

constexpr EnumName<DenoiseMode> kDenoiseNames[] = {
    {DenoiseMode::kNone, "none"},
    {DenoiseMode::kGaussian, "gaussian"},
    {DenoiseMode::kBilateral, "bilateral"},
    {DenoiseMode::kIkde, "ikde"},
};
constexpr EnumName<DenoiseTarget> kTargetNames[] = {
    {DenoiseTarget::kImage, "image"},
    {DenoiseTarget::kFeature, "feature"},
};
constexpr EnumName<NodesMode> kNodesNames[] = {
    {NodesMode::kApcSpr, "apc_spr"},
    {NodesMode::kKmeansSpr, "kmeans_spr"},
    {NodesMode::kKmeans, "kmeans"},
    {NodesMode::kArea, "area"},
};
constexpr EnumName<NodeRule> kRuleNames[] = {
    {NodeRule::kSizeWindow, "size_window"},
    {NodeRule::kAllClusters, "all_clusters"},
    {NodeRule::kLargestExcluded, "largest_excluded"},
};
constexpr EnumName<MUpdate> kMUpdateNames[] = {
    {MUpdate::kAlgo2, "algo2"},
    {MUpdate::kEq15, "eq15"},
};
constexpr EnumName<GraphMode> kGraphNames[] = {
    {GraphMode::kFused, "fused"},
    {GraphMode::kAdjacency, "adjacency"},
    {GraphMode::kNolrrOnly, "nolrr"},
};
constexpr EnumName<AffinityKernel> kAffinityNames[] = {
    {AffinityKernel::kLinear, "linear"},
    {AffinityKernel::kGaussian, "gaussian"},
};

template <typename Enum, size_t N>
std::string enum_to_name(const EnumName<Enum> (&table)[N], Enum v) {
  for (const auto& row : table)
    if (row.value == v) return row.name;
  throw InternalError("config: unmapped enum value");
}

template <typename Enum, size_t N>
Enum name_to_enum(const EnumName<Enum> (&table)[N], const std::string& key,
                  const std::string& name) {
  for (const auto& row : table)
    if (name == row.name) return row.value;
  std::string allowed;
  for (const auto& row : table) {
    if (!allowed.empty()) allowed += "|";
    allowed += row.name;
  }
  throw ConfigError("config: '" + key + "' must be one of " + allowed +
                    ", got '" + name + "'");
}

struct Field {
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, const std::string&)> set;
  bool quoted = false;  // serialised as a TOML string
};

const std::map<std::string, Field>& field_table() {
  static const std::map<std::string, Field> table = {
      {"scales",
       {[](const PipelineConfig& c) { return c.scales; },
        [](PipelineConfig& c, const std::string& v) { c.scales = v; }, true}},
      {"fh_min_size",
       {[](const PipelineConfig& c) { return std::to_string(c.fh_min_size); },
        [](PipelineConfig& c, const std::string& v) {
          c.fh_min_size = int(parse_int("fh_min_size", v));
        }}},
      {"fh_sigma",
       {[](const PipelineConfig& c) { return fmt_double(c.fh_sigma); },
        [](PipelineConfig& c, const std::string& v) {
          c.fh_sigma = parse_double("fh_sigma", v);
        }}},
      {"denoise",
       {[](const PipelineConfig& c) {
          return enum_to_name(kDenoiseNames, c.denoise);
        },
        [](PipelineConfig& c, const std::string& v) {
          c.denoise = name_to_enum(kDenoiseNames, "denoise", v);
        },
        true}},
      {"denoise_target",
       {[](const PipelineConfig& c) {
          return enum_to_name(kTargetNames, c.denoise_target);
        },
        [](PipelineConfig& c, const std::string& v) {
          c.denoise_target = name_to_enum(kTargetNames, "denoise_target", v);
        },
        true}},
      {"alpha",
       {[](const PipelineConfig& c) { return fmt_double(c.alpha); },
        [](PipelineConfig& c, const std::string& v) {
          c.alpha = parse_double("alpha", v);
        }}},
      {"psi",
       {[](const PipelineConfig& c) { return std::to_string(c.psi); },
        [](PipelineConfig& c, const std::string& v) {
          c.psi = int(parse_int("psi", v));
        }}},
      {"tau",
       {[](const PipelineConfig& c) { return fmt_double(c.tau); },
        [](PipelineConfig& c, const std::string& v) {
          c.tau = parse_double("tau", v);
        }}},
      {"e",
       {[](const PipelineConfig& c) { return fmt_double(c.e); },
        [](PipelineConfig& c, const std::string& v) {
          c.e = parse_double("e", v);
        }}},
      {"g",
       {[](const PipelineConfig& c) { return fmt_double(c.g); },
        [](PipelineConfig& c, const std::string& v) {
          c.g = parse_double("g", v);
        }}},
      {"damping",
       {[](const PipelineConfig& c) { return fmt_double(c.damping); },
        [](PipelineConfig& c, const std::string& v) {
          c.damping = parse_double("damping", v);
        }}},
      {"apc_max_iter",
       {[](const PipelineConfig& c) { return std::to_string(c.apc_max_iter); },
        [](PipelineConfig& c, const std::string& v) {
          c.apc_max_iter = int(parse_int("apc_max_iter", v));
        }}},
      {"apc_conv_window",
       {[](const PipelineConfig& c) {
          return std::to_string(c.apc_conv_window);
        },
        [](PipelineConfig& c, const std::string& v) {
          c.apc_conv_window = int(parse_int("apc_conv_window", v));
        }}},
      {"nodes_mode",
       {[](const PipelineConfig& c) {
          return enum_to_name(kNodesNames, c.nodes_mode);
        },
        [](PipelineConfig& c, const std::string& v) {
          c.nodes_mode = name_to_enum(kNodesNames, "nodes_mode", v);
        },
        true}},
      {"node_rule",
       {[](const PipelineConfig& c) {
          return enum_to_name(kRuleNames, c.node_rule);
        },
        [](PipelineConfig& c, const std::string& v) {
          c.node_rule = name_to_enum(kRuleNames, "node_rule", v);
        },
        true}},
      {"d",
       {[](const PipelineConfig& c) { return std::to_string(c.d); },
        [](PipelineConfig& c, const std::string& v) {
          c.d = int(parse_int("d", v));
        }}},
      {"lambda1",
       {[](const PipelineConfig& c) { return fmt_double(c.lambda1); },
        [](PipelineConfig& c, const std::string& v) {
          c.lambda1 = parse_double("lambda1", v);
        }}},
      {"m_update",
       {[](const PipelineConfig& c) {
          return enum_to_name(kMUpdateNames, c.m_update);
        },
        [](PipelineConfig& c, const std::string& v) {
          c.m_update = name_to_enum(kMUpdateNames, "m_update", v);
        },
        true}},
      {"graph_mode",
       {[](const PipelineConfig& c) {
          return enum_to_name(kGraphNames, c.graph_mode);
        },
        [](PipelineConfig& c, const std::string& v) {
          c.graph_mode = name_to_enum(kGraphNames, "graph_mode", v);
        },
        true}},
      {"affinity",
       {[](const PipelineConfig& c) {
          return enum_to_name(kAffinityNames, c.affinity);
        },
        [](PipelineConfig& c, const std::string& v) {
          c.affinity = name_to_enum(kAffinityNames, "affinity", v);
        },
        true}},
      {"beta",
       {[](const PipelineConfig& c) { return fmt_double(c.beta); },
        [](PipelineConfig& c, const std::string& v) {
          c.beta = parse_double("beta", v);
        }}},
      {"kt",
       {[](const PipelineConfig& c) { return std::to_string(c.kt); },
        [](PipelineConfig& c, const std::string& v) {
          c.kt = int(parse_int("kt", v));
        }}},
      {"kt_min",
       {[](const PipelineConfig& c) { return std::to_string(c.kt_min); },
        [](PipelineConfig& c, const std::string& v) {
          c.kt_min = int(parse_int("kt_min", v));
        }}},
      {"kt_max",
       {[](const PipelineConfig& c) { return std::to_string(c.kt_max); },
        [](PipelineConfig& c, const std::string& v) {
          c.kt_max = int(parse_int("kt_max", v));
        }}},
      {"seed",
       {[](const PipelineConfig& c) { return std::to_string(c.seed); },
        [](PipelineConfig& c, const std::string& v) {
          c.seed = parse_uint("seed", v);
        }}},
      {"voi_log",
       {[](const PipelineConfig& c) {
          return std::string(c.voi_bits ? "bits" : "nat");
        },
        [](PipelineConfig& c, const std::string& v) {
          if (v == "bits")
            c.voi_bits = true;
          else if (v == "nat")
            c.voi_bits = false;
          else
            throw ConfigError("config: 'voi_log' must be nat|bits, got '" + v +
                              "'");
        },
        true}},
      {"debug_dir",
       {[](const PipelineConfig& c) { return c.debug_dir; },
        [](PipelineConfig& c, const std::string& v) { c.debug_dir = v; },
        true}},
  };
  return table;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ConfigError("config: alpha must lie in (0,1]");
  if (psi < 1) throw ConfigError("config: psi must be >= 1");
  if (tau < 0) throw ConfigError("config: tau must be >= 0");
  if (e <= 0 || g <= 0) throw ConfigError("config: e and g must be > 0");
  if (!(damping >= 0.0 && damping < 1.0))
    throw ConfigError("config: damping must lie in [0,1)");
  if (apc_max_iter < 1 || apc_conv_window < 1)
    throw ConfigError("config: apc iteration limits must be >= 1");
  if (d < 1) throw ConfigError("config: d must be >= 1");
  if (lambda1 <= 0) throw ConfigError("config: lambda1 must be > 0");
  if (beta <= 0) throw ConfigError("config: beta must be > 0");
  if (kt < 1) throw ConfigError("config: kt must be >= 1");
  if (kt_min < 1 || kt_max < kt_min)
    throw ConfigError("config: need 1 <= kt_min <= kt_max");
  if (fh_min_size < 1) throw ConfigError("config: fh_min_size must be >= 1");
  if (fh_sigma < 0) throw ConfigError("config: fh_sigma must be >= 0");
  scale_specs();  // throws on a malformed scale list
}

std::string PipelineConfig::to_toml() const {
  std::ostringstream out;
  for (const auto& [key, field] : field_table()) {
    std::string v = field.get(*this);
    if (field.quoted)
      out << key << " = \"" << v << "\"\n";
    else
      out << key << " = " << v << "\n";
  }
  return out.str();
}

std::string PipelineConfig::hash() const { return sha256_hex(to_toml()); }

std::vector<ScaleSpec> PipelineConfig::scale_specs() const {
  std::vector<ScaleSpec> specs;
  for (const std::string& raw : split(scales, ',')) {
    std::string entry = trim(raw);
    if (entry.empty())
      throw ConfigError("config: empty entry in scales list");
    auto parts = split(entry, ':');
    if (parts[0] == "fh") {
      if (parts.size() < 2 || parts.size() > 4)
        throw ConfigError("config: bad scale entry '" + entry + "'");
      FhParams p;
      p.k = parse_double("scales", parts[1]);
      p.min_size = fh_min_size;
      p.sigma = fh_sigma;
      if (parts.size() >= 3) p.min_size = int(parse_int("scales", parts[2]));
      if (parts.size() >= 4) p.sigma = parse_double("scales", parts[3]);
      specs.emplace_back(p);
    } else if (parts[0] == "map") {
      if (parts.size() < 2)
        throw ConfigError("config: bad scale entry '" + entry + "'");
      // Re-join in case the path itself contains ':'.
      specs.emplace_back(entry.substr(4));
    } else {
      throw ConfigError("config: scale entry must start with fh: or map:, got '" +
                        entry + "'");
    }
  }
  if (specs.empty()) throw ConfigError("config: scales list is empty");
  return specs;
}

PipelineConfig PipelineConfig::parse_toml(const std::string& text) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t[0] == '[')
      throw ConfigError("config: sections are not supported (line " +
                        std::to_string(lineno) + ")");
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value at line " +
                        std::to_string(lineno));
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    } else {
      size_t hash_pos = value.find('#');
      if (hash_pos != std::string::npos) value = trim(value.substr(0, hash_pos));
    }
    cfg.set(key, value);
  }
  cfg.validate();
  return cfg;
}

PipelineConfig PipelineConfig::load_toml_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_toml(buf.str());
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  auto it = field_table().find(key);
  if (it == field_table().end())
    throw ConfigError("config: unknown key '" + key + "'");
  it->second.set(*this, value);
}

std::string PipelineConfig::get(const std::string& key) const {
  auto it = field_table().find(key);
  if (it == field_table().end())
    throw ConfigError("config: unknown key '" + key + "'");
  return it->second.get(*this);
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw InternalError("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

}  // namespace afa
