// Copyright 2026 The mfcpg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mfcpg/config.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace mfcpg {

ConfigError::ConfigError(const std::string& key, int line, const std::string& what)
    : std::runtime_error(
          (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
          (key.empty() ? std::string() : "key '" + key + "': ") + what),
      key_(key),
      line_(line) {}

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Field {
  std::string_view section;
  std::string_view key;
  std::function<void(Config&, std::string_view)> set;  // throws std::string
  std::function<std::string(const Config&)> get;
};

double ToDouble(std::string_view s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::string("expected a number, got '" + std::string(s) + "'");
  }
  return x;
}

template <typename Int>
Int ToInt(std::string_view s) {
  Int x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::string("expected an integer, got '" + std::string(s) + "'");
  }
  return x;
}

void Require(bool ok, const char* what) {
  if (!ok) throw std::string(what);
}

Field NonNegative(std::string_view section, std::string_view key,
                  double CsParams::*member) {
  return {section, key,
          [member](Config& c, std::string_view v) {
            const double x = ToDouble(v);
            Require(x >= 0.0, "must be >= 0");
            c.cs.*member = x;
          },
          [member](const Config& c) { return FormatDouble(c.cs.*member); }};
}

Field PositiveInt(std::string_view section, std::string_view key, int Config::*member) {
  return {section, key,
          [member](Config& c, std::string_view v) {
            const int x = ToInt<int>(v);
            Require(x >= 1, "must be >= 1");
            c.*member = x;
          },
          [member](const Config& c) { return std::to_string(c.*member); }};
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      NonNegative("model", "Phi", &CsParams::Phi),
      NonNegative("model", "beta", &CsParams::beta),
      NonNegative("model", "sigma", &CsParams::sigma),
      NonNegative("model", "gamma1", &CsParams::gamma1),
      {"model", "T",
       [](Config& c, std::string_view v) {
         const double x = ToDouble(v);
         Require(x > 0.0, "must be > 0");
         c.cs.T = x;
       },
       [](const Config& c) { return FormatDouble(c.cs.T); }},
      {"model", "d",
       [](Config& c, std::string_view v) {
         const int x = ToInt<int>(v);
         Require(x >= 1, "must be >= 1");
         c.cs.d = x;
       },
       [](const Config& c) { return std::to_string(c.cs.d); }},
      PositiveInt("train", "N", &Config::N),
      PositiveInt("train", "M", &Config::M),
      PositiveInt("train", "K", &Config::K),
      {"train", "seed",
       [](Config& c, std::string_view v) { c.seed = ToInt<uint64_t>(v); },
       [](const Config& c) { return std::to_string(c.seed); }},
      {"train", "lr0",
       [](Config& c, std::string_view v) {
         const double x = ToDouble(v);
         Require(x > 0.0, "must be > 0");
         c.lr.lr0 = x;
       },
       [](const Config& c) { return FormatDouble(c.lr.lr0); }},
      {"train", "decay",
       [](Config& c, std::string_view v) {
         const double x = ToDouble(v);
         Require(x > 0.0 && x <= 1.0, "must lie in (0, 1]");
         c.lr.decay = x;
       },
       [](const Config& c) { return FormatDouble(c.lr.decay); }},
      {"train", "period",
       [](Config& c, std::string_view v) {
         const int x = ToInt<int>(v);
         Require(x >= 1, "must be >= 1");
         c.lr.period = x;
       },
       [](const Config& c) { return std::to_string(c.lr.period); }},
      PositiveInt("train", "hidden", &Config::hidden),
      {"train", "layers",
       [](Config& c, std::string_view v) {
         const int x = ToInt<int>(v);
         Require(x >= 0, "must be >= 0");
         c.layers = x;
       },
       [](const Config& c) { return std::to_string(c.layers); }},
      {"train", "activation",
       [](Config& c, std::string_view v) {
         Require(v == "relu" || v == "tanh", "must be relu or tanh");
         c.activation = ParseActivation(v);
       },
       [](const Config& c) { return std::string(ActivationName(c.activation)); }},
      PositiveInt("riccati", "riccati_steps", &Config::riccati_steps),
      PositiveInt("evaluate", "eval_N", &Config::eval_N),
      PositiveInt("evaluate", "eval_M", &Config::eval_M),
      PositiveInt("evaluate", "eval_reps", &Config::eval_reps),
      {"converge", "conv_M_list",
       [](Config& c, std::string_view v) {
         std::vector<int> list;
         std::string_view rest = v;
         while (!rest.empty()) {
           const auto comma = rest.find(',');
           const std::string_view item = Trim(rest.substr(0, comma));
           const int m = ToInt<int>(item);
           Require(m >= 1, "entries must be >= 1");
           list.push_back(m);
           rest = comma == std::string_view::npos ? std::string_view()
                                                  : rest.substr(comma + 1);
         }
         Require(list.size() >= 2, "needs at least two entries");
         std::sort(list.begin(), list.end());
         Require(std::adjacent_find(list.begin(), list.end()) == list.end(),
                 "entries must be distinct");
         for (int m : list) {
           Require(list.back() % m == 0 &&
                       std::has_single_bit(static_cast<unsigned>(list.back() / m)),
                   "every entry must divide the largest by a power of two");
         }
         c.conv_M_list = list;
       },
       [](const Config& c) {
         std::string s;
         for (size_t i = 0; i < c.conv_M_list.size(); ++i) {
           if (i) s += ", ";
           s += std::to_string(c.conv_M_list[i]);
         }
         return s;
       }},
      PositiveInt("converge", "conv_N", &Config::conv_N),
      PositiveInt("converge", "conv_reps", &Config::conv_reps),
      {"converge", "conv_protocol",
       [](Config& c, std::string_view v) {
         Require(v == "exact" || v == "trained", "must be exact or trained");
         c.conv_protocol = std::string(v);
       },
       [](const Config& c) { return c.conv_protocol; }},
  };
  return fields;
}

}  // namespace

Config ParseConfig(std::string_view text) {
  Config config;
  std::set<std::string> seen;
  std::string section;
  int line_no = 0;
  std::string_view rest = text;
  while (!rest.empty() || line_no == 0) {
    ++line_no;
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view() : rest.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) {
      if (rest.empty()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("", line_no, "malformed section header");
      section = std::string(Trim(line.substr(1, line.size() - 2)));
      const bool known = std::any_of(Fields().begin(), Fields().end(),
                                     [&](const Field& f) { return f.section == section; });
      if (!known) throw ConfigError("", line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", line_no, "expected 'key = value'");
    }
    const std::string key(Trim(line.substr(0, eq)));
    const std::string_view value = Trim(line.substr(eq + 1));
    const auto it = std::find_if(Fields().begin(), Fields().end(),
                                 [&](const Field& f) { return f.key == key; });
    if (it == Fields().end()) throw ConfigError(key, line_no, "unknown key");
    if (!section.empty() && it->section != section) {
      throw ConfigError(key, line_no, "does not belong to section [" + section + "]");
    }
    if (!seen.insert(key).second) throw ConfigError(key, line_no, "duplicate key");
    if (value.empty()) throw ConfigError(key, line_no, "missing value");
    try {
      it->set(config, value);
    } catch (const std::string& what) {
      throw ConfigError(key, line_no, what);
    }
    if (rest.empty()) break;
  }
  return config;
}

Config LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str());
}

std::string RenderConfig(const Config& c) {
  std::ostringstream out;
  std::string_view section;
  for (const Field& f : Fields()) {
    if (f.section != section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get(c) << '\n';
  }
  return out.str();
}

TrainConfig ToTrainConfig(const Config& c) {
  TrainConfig t;
  t.cs = c.cs;
  t.N = c.N;
  t.M = c.M;
  t.K = c.K;
  t.seed = c.seed;
  t.lr = c.lr;
  t.hidden_width = c.hidden;
  t.hidden_layers = c.layers;
  t.activation = c.activation;
  return t;
}

}  // namespace mfcpg
