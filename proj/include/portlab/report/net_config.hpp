#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "portlab/dates.hpp"
#include "portlab/errors.hpp"
#include "portlab/market/synthetic.hpp"
#include "portlab/policy/topology.hpp"
#include "portlab/util.hpp"

namespace portlab::report {

using nlohmann::json;

namespace detail {

inline const json& need(const json& obj, const std::string& section, const char* key) {
  if (!obj.contains(key)) throw config_error("net_config: missing key " + section + "." + key);
  return obj.at(key);
}

inline int need_int(const json& obj, const std::string& section, const char* key) {
  const json& v = need(obj, section, key);
  if (!v.is_number_integer()) throw config_error("net_config: " + section + "." + key + " must be an integer");
  return v.get<int>();
}

inline double need_num(const json& obj, const std::string& section, const char* key) {
  const json& v = need(obj, section, key);
  if (!v.is_number()) throw config_error("net_config: " + section + "." + key + " must be a number");
  return v.get<double>();
}

inline bool need_bool(const json& obj, const std::string& section, const char* key) {
  const json& v = need(obj, section, key);
  if (!v.is_boolean()) throw config_error("net_config: " + section + "." + key + " must be a boolean");
  return v.get<bool>();
}

inline std::string need_str(const json& obj, const std::string& section, const char* key) {
  const json& v = need(obj, section, key);
  if (!v.is_string()) throw config_error("net_config: " + section + "." + key + " must be a string");
  return v.get<std::string>();
}

// unknown keys are dropped, not honored; the caller surfaces the list
inline void note_unknown(const json& obj, const std::string& section,
                         std::initializer_list<const char*> known, std::vector<std::string>* warnings) {
  if (!warnings) return;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool hit = false;
    for (const char* k : known)
      if (it.key() == k) hit = true;
    if (!hit)
      warnings->push_back("unknown key '" + (section.empty() ? it.key() : section + "." + it.key()) +
                          "' ignored");
  }
}

}  // namespace detail

struct TrainingSection {
  int steps = 80000;
  double learning_rate = 0.00028;
  int batch_size = 109;
  double buffer_biased = 5e-5;
  bool snap_shot = false;
  bool fast_train = true;
  std::string training_method = "Adam";
  std::string loss_function = "loss_function6";

  void validate() const {
    if (steps < 0) throw config_error("net_config: training.steps must be nonnegative");
    if (batch_size < 1) throw config_error("net_config: training.batch_size must be positive");
    if (!(learning_rate > 0.0)) throw config_error("net_config: training.learning_rate must be positive");
    if (!(buffer_biased > 0.0 && buffer_biased <= 1.0))
      throw config_error("net_config: training.buffer_biased must lie in (0,1]");
    if (training_method != "Adam")
      throw config_error("net_config: training.training_method: only 'Adam' is supported");
    if (loss_function != "loss_function6")
      throw config_error("net_config: training.loss_function: only 'loss_function6' is supported");
  }

  json to_json() const {
    json j;
    j["steps"] = steps;
    j["learning_rate"] = learning_rate;
    j["batch_size"] = batch_size;
    j["buffer_biased"] = buffer_biased;
    j["snap_shot"] = snap_shot;
    j["fast_train"] = fast_train;
    j["training_method"] = training_method;
    j["loss_function"] = loss_function;
    return j;
  }
};

struct InputSection {
  int window_size = 31;
  int coin_number = 11;
  int64_t global_period = 1800;
  int feature_number = 3;
  double test_portion = 0.08;
  bool online = false;
  std::string start_date = "2015/07/01";
  std::string end_date = "2017/07/01";
  int volume_average_days = 30;
  bool portion_reversed = false;

  int64_t start_epoch() const { return parse_date_utc(start_date, "net_config: input.start_date"); }
  int64_t end_epoch() const { return parse_date_utc(end_date, "net_config: input.end_date"); }

  void validate() const {
    if (window_size < 1) throw config_error("net_config: input.window_size must be positive");
    if (coin_number < 1) throw config_error("net_config: input.coin_number must be positive");
    if (global_period <= 0) throw config_error("net_config: input.global_period must be positive");
    if (feature_number != 3)
      throw config_error("net_config: input.feature_number: only 3 feature planes (close, high, low) are supported");
    if (!(test_portion > 0.0 && test_portion < 1.0))
      throw config_error("net_config: input.test_portion must lie inside (0,1)");
    if (volume_average_days < 1)
      throw config_error("net_config: input.volume_average_days must be positive");
    if (start_epoch() >= end_epoch())
      throw config_error("net_config: input.start_date must precede end_date");
  }

  json to_json() const {
    json j;
    j["window_size"] = window_size;
    j["coin_number"] = coin_number;
    j["global_period"] = global_period;
    j["feature_number"] = feature_number;
    j["test_portion"] = test_portion;
    j["online"] = online;
    j["start_date"] = start_date;
    j["end_date"] = end_date;
    j["volume_average_days"] = volume_average_days;
    j["portion_reversed"] = portion_reversed;
    return j;
  }
};

struct TradingSection {
  double trading_consumption = 0.0025;
  int rolling_training_steps = 85;
  double learning_rate = 0.00028;
  double buffer_biased = 5e-5;

  void validate() const {
    if (!(trading_consumption >= 0.0 && trading_consumption < 1.0))
      throw config_error("net_config: trading.trading_consumption must lie in [0,1)");
    if (rolling_training_steps < 0)
      throw config_error("net_config: trading.rolling_training_steps must be nonnegative");
    if (!(learning_rate > 0.0)) throw config_error("net_config: trading.learning_rate must be positive");
    if (!(buffer_biased > 0.0 && buffer_biased <= 1.0))
      throw config_error("net_config: trading.buffer_biased must lie in (0,1]");
  }

  json to_json() const {
    json j;
    j["trading_consumption"] = trading_consumption;
    j["rolling_training_steps"] = rolling_training_steps;
    j["learning_rate"] = learning_rate;
    j["buffer_biased"] = buffer_biased;
    return j;
  }
};

// where the candle store gets its bars from. optional while parsing so a
// bare research config still loads; required before any data is touched.
struct DataSourceSection {
  std::string kind;  // "" (absent) | "synthetic" | "csv" | "http"
  std::vector<market::SyntheticAssetSpec> synthetic_assets;
  uint64_t seed = 0;
  std::string path;      // csv: candle file, relative to the workspace root
  std::string base_url;  // http: exchange endpoint
  std::vector<std::string> assets;  // http: ids to fetch

  void validate() const {
    if (kind.empty()) return;
    if (kind == "synthetic") {
      if (synthetic_assets.empty())
        throw config_error("net_config: data_source.assets must list at least one synthetic asset");
      for (const auto& a : synthetic_assets) a.validate();
    } else if (kind == "csv") {
      if (path.empty()) throw config_error("net_config: data_source.path is required for kind 'csv'");
    } else if (kind == "http") {
      if (base_url.empty()) throw config_error("net_config: data_source.base_url is required for kind 'http'");
      if (assets.empty()) throw config_error("net_config: data_source.assets must list ids for kind 'http'");
    } else {
      throw config_error("net_config: data_source.kind '" + kind + "' is not one of synthetic, csv, http");
    }
  }

  json to_json() const {
    json j;
    j["kind"] = kind;
    if (kind == "synthetic") {
      j["seed"] = seed;
      json arr = json::array();
      for (const auto& a : synthetic_assets) {
        json e;
        e["id"] = a.id;
        e["base_price"] = a.base_price;
        e["drift"] = a.drift;
        e["volatility"] = a.volatility;
        e["season_amplitude"] = a.season_amplitude;
        e["season_period"] = a.season_period;
        e["season_phase"] = a.season_phase;
        e["volume_scale"] = a.volume_scale;
        arr.push_back(std::move(e));
      }
      j["assets"] = std::move(arr);
    } else if (kind == "csv") {
      j["path"] = path;
    } else if (kind == "http") {
      j["base_url"] = base_url;
      j["assets"] = assets;
    }
    return j;
  }
};

struct NetConfig {
  policy::EiieTopologySpec topology;
  TrainingSection training;
  InputSection input;
  TradingSection trading;
  DataSourceSection data_source;

  void validate() const {
    training.validate();
    input.validate();
    trading.validate();
    data_source.validate();
  }

  json to_json() const {
    json j;
    j["layers"] = topology.to_json();
    j["training"] = training.to_json();
    j["input"] = input.to_json();
    j["trading"] = trading.to_json();
    if (!data_source.kind.empty()) j["data_source"] = data_source.to_json();
    return j;
  }

  // stable fingerprint: nlohmann objects serialize with sorted keys
  std::string hash() const { return to_hex(fnv1a64(to_json().dump())); }
};

inline NetConfig parse_net_config(const json& j, std::vector<std::string>* warnings = nullptr) {
  using detail::need;
  using detail::need_bool;
  using detail::need_int;
  using detail::need_num;
  using detail::need_str;
  if (!j.is_object()) throw config_error("net_config: the document must be a JSON object");
  detail::note_unknown(j, "", {"layers", "training", "input", "trading", "data_source"}, warnings);

  NetConfig cfg;
  const json& layers = need(j, "<root>", "layers");
  if (warnings && layers.is_array())
    for (size_t i = 0; i < layers.size(); ++i)
      if (layers[i].is_object())
        detail::note_unknown(layers[i], "layers[" + std::to_string(i) + "]",
                             {"type", "filter_shape", "filter_number", "neuron_number", "regularizer",
                              "weight_decay", "dropouts"},
                             warnings);
  cfg.topology = policy::EiieTopologySpec::from_json(layers);

  const json& tr = need(j, "<root>", "training");
  if (!tr.is_object()) throw config_error("net_config: training must be an object");
  detail::note_unknown(tr, "training",
                       {"steps", "learning_rate", "batch_size", "buffer_biased", "snap_shot",
                        "fast_train", "training_method", "loss_function"},
                       warnings);
  cfg.training.steps = need_int(tr, "training", "steps");
  cfg.training.learning_rate = need_num(tr, "training", "learning_rate");
  cfg.training.batch_size = need_int(tr, "training", "batch_size");
  cfg.training.buffer_biased = need_num(tr, "training", "buffer_biased");
  cfg.training.snap_shot = need_bool(tr, "training", "snap_shot");
  cfg.training.fast_train = need_bool(tr, "training", "fast_train");
  cfg.training.training_method = need_str(tr, "training", "training_method");
  cfg.training.loss_function = need_str(tr, "training", "loss_function");

  const json& in = need(j, "<root>", "input");
  if (!in.is_object()) throw config_error("net_config: input must be an object");
  detail::note_unknown(in, "input",
                       {"window_size", "coin_number", "global_period", "feature_number", "test_portion",
                        "online", "start_date", "end_date", "volume_average_days", "portion_reversed"},
                       warnings);
  cfg.input.window_size = need_int(in, "input", "window_size");
  cfg.input.coin_number = need_int(in, "input", "coin_number");
  cfg.input.global_period = need_int(in, "input", "global_period");
  cfg.input.feature_number = need_int(in, "input", "feature_number");
  cfg.input.test_portion = need_num(in, "input", "test_portion");
  cfg.input.online = need_bool(in, "input", "online");
  cfg.input.start_date = need_str(in, "input", "start_date");
  cfg.input.end_date = need_str(in, "input", "end_date");
  cfg.input.volume_average_days = need_int(in, "input", "volume_average_days");
  cfg.input.portion_reversed = need_bool(in, "input", "portion_reversed");

  const json& td = need(j, "<root>", "trading");
  if (!td.is_object()) throw config_error("net_config: trading must be an object");
  detail::note_unknown(td, "trading",
                       {"trading_consumption", "rolling_training_steps", "learning_rate", "buffer_biased"},
                       warnings);
  cfg.trading.trading_consumption = need_num(td, "trading", "trading_consumption");
  cfg.trading.rolling_training_steps = need_int(td, "trading", "rolling_training_steps");
  cfg.trading.learning_rate = need_num(td, "trading", "learning_rate");
  cfg.trading.buffer_biased = need_num(td, "trading", "buffer_biased");

  if (j.contains("data_source")) {
    const json& ds = j.at("data_source");
    if (!ds.is_object()) throw config_error("net_config: data_source must be an object");
    detail::note_unknown(ds, "data_source", {"kind", "seed", "assets", "path", "base_url"}, warnings);
    cfg.data_source.kind = need_str(ds, "data_source", "kind");
    if (cfg.data_source.kind == "synthetic") {
      cfg.data_source.seed = uint64_t(ds.value("seed", 0));
      const json& arr = need(ds, "data_source", "assets");
      if (!arr.is_array()) throw config_error("net_config: data_source.assets must be an array");
      for (size_t i = 0; i < arr.size(); ++i) {
        const json& e = arr[i];
        const std::string where = "data_source.assets[" + std::to_string(i) + "]";
        if (!e.is_object()) throw config_error("net_config: " + where + " must be an object");
        detail::note_unknown(e, where,
                             {"id", "base_price", "drift", "volatility", "season_amplitude",
                              "season_period", "season_phase", "volume_scale"},
                             warnings);
        market::SyntheticAssetSpec a;
        a.id = need_str(e, where, "id");
        a.base_price = e.value("base_price", a.base_price);
        a.drift = e.value("drift", a.drift);
        a.volatility = e.value("volatility", a.volatility);
        a.season_amplitude = e.value("season_amplitude", a.season_amplitude);
        a.season_period = e.value("season_period", a.season_period);
        a.season_phase = e.value("season_phase", a.season_phase);
        a.volume_scale = e.value("volume_scale", a.volume_scale);
        cfg.data_source.synthetic_assets.push_back(std::move(a));
      }
    } else if (cfg.data_source.kind == "csv") {
      cfg.data_source.path = need_str(ds, "data_source", "path");
    } else if (cfg.data_source.kind == "http") {
      cfg.data_source.base_url = need_str(ds, "data_source", "base_url");
      const json& arr = need(ds, "data_source", "assets");
      if (!arr.is_array()) throw config_error("net_config: data_source.assets must be an array");
      for (const auto& e : arr) {
        if (!e.is_string()) throw config_error("net_config: data_source.assets entries must be strings");
        cfg.data_source.assets.push_back(e.get<std::string>());
      }
    }
  }

  cfg.validate();
  return cfg;
}

inline NetConfig parse_net_config_text(const std::string& text, std::vector<std::string>* warnings = nullptr) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw parse_error(std::string("net_config: invalid JSON: ") + e.what());
  }
  return parse_net_config(j, warnings);
}

inline NetConfig load_net_config(const std::string& path, std::vector<std::string>* warnings = nullptr) {
  return parse_net_config_text(read_text_file(path), warnings);
}

}  // namespace portlab::report
