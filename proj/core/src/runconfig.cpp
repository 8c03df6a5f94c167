// Copyright 2026 The soundnet-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "soundnet/runconfig.hpp"

#include <fstream>
#include <sstream>

#include "soundnet/error.hpp"
#include "soundnet/loss.hpp"

namespace soundnet {

AdamConfig TrainConfig::adam() const {
  AdamConfig a;
  a.learning_rate = learning_rate;
  a.beta1 = beta1;
  a.beta2 = beta2;
  a.epsilon = epsilon;
  return a;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw ConfigError("learning_rate must be > 0");
  if (!(beta1 >= 0 && beta1 < 1)) throw ConfigError("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0 && beta2 < 1)) throw ConfigError("beta2 must lie in [0, 1)");
  if (!(epsilon > 0)) throw ConfigError("epsilon must be > 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  if (log_every < 1) throw ConfigError("log_every must be >= 1");
  if (!(input_scale > 0)) throw ConfigError("input_scale must be > 0");
  parse_distill_loss(loss);
}

namespace {

std::string trim(const std::string& s) {
  const std::size_t first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const std::size_t last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

Real parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const Real v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + key + ": \"" + value + "\"");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for " + key + ": \"" + value + "\"");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size() || value[0] == '-') throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad unsigned integer for " + key + ": \"" + value + "\"");
  }
}

}  // namespace

TrainConfig parse_run_config(const std::string& text, TrainConfig base) {
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string entry = trim(line);
    if (entry.empty()) continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value, got \"" + entry + "\"");
    }
    const std::string key = trim(entry.substr(0, eq));
    const std::string value = trim(entry.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
    }
    if (key == "learning_rate") base.learning_rate = parse_real(key, value);
    else if (key == "beta1") base.beta1 = parse_real(key, value);
    else if (key == "beta2") base.beta2 = parse_real(key, value);
    else if (key == "epsilon") base.epsilon = parse_real(key, value);
    else if (key == "batch_size") base.batch_size = parse_int(key, value);
    else if (key == "max_iterations") base.max_iterations = parse_int(key, value);
    else if (key == "seed") base.seed = parse_uint(key, value);
    else if (key == "loss") base.loss = value;
    else if (key == "checkpoint_every") base.checkpoint_every = parse_int(key, value);
    else if (key == "log_every") base.log_every = parse_int(key, value);
    else if (key == "input_scale") base.input_scale = parse_real(key, value);
    else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key \"" +
                           key + "\"");
  }
  base.validate();
  return base;
}

TrainConfig load_run_config(const std::string& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), std::move(base));
}

}  // namespace soundnet
