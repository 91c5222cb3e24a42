#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "portlab/errors.hpp"

namespace portlab::policy {

enum class NetKind { cnn, rnn, lstm };

inline const char* net_kind_name(NetKind k) {
  switch (k) {
    case NetKind::cnn: return "cnn";
    case NetKind::rnn: return "rnn";
    case NetKind::lstm: return "lstm";
  }
  return "?";
}

struct LayerSpec {
  std::string type;  // ConvLayer | EIIE_Dense | EIIE_Output_WithW | EIIE_LSTM | EIIE_RNN
  int filter_number = 0;
  std::array<int, 2> filter_shape{1, 1};  // ConvLayer kernel, rows x periods
  int neuron_number = 0;                  // recurrent units
  std::string regularizer;                // "" or "L2"
  double weight_decay = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["type"] = type;
    if (type == "ConvLayer") {
      j["filter_shape"] = filter_shape;
      j["filter_number"] = filter_number;
    } else if (type == "EIIE_Dense") {
      j["filter_number"] = filter_number;
    } else if (type == "EIIE_LSTM" || type == "EIIE_RNN") {
      j["neuron_number"] = neuron_number;
    }
    if (!regularizer.empty()) {
      j["regularizer"] = regularizer;
      j["weight_decay"] = weight_decay;
    }
    return j;
  }
};

// a per-asset evaluator stack: feature extraction layers ending in the
// scoring layer that folds in the previous weights
struct EiieTopologySpec {
  NetKind kind = NetKind::cnn;
  std::vector<LayerSpec> layers;

  static EiieTopologySpec from_layers(std::vector<LayerSpec> layers) {
    if (layers.empty()) throw config_error("topology: no layers");
    for (size_t i = 0; i < layers.size(); ++i) {
      const std::string& t = layers[i].type;
      if (t != "ConvLayer" && t != "EIIE_Dense" && t != "EIIE_Output_WithW" && t != "EIIE_LSTM" &&
          t != "EIIE_RNN")
        throw config_error("topology: layer " + std::to_string(i) + " has unknown type '" + t + "'");
      if (!layers[i].regularizer.empty() && layers[i].regularizer != "L2")
        throw config_error("topology: layer " + std::to_string(i) + " has unsupported regularizer '" +
                           layers[i].regularizer + "'");
    }
    if (layers.back().type != "EIIE_Output_WithW")
      throw config_error("topology: the layer stack must end in EIIE_Output_WithW");

    EiieTopologySpec spec;
    int recurrent = 0;
    for (const auto& l : layers)
      if (l.type == "EIIE_LSTM" || l.type == "EIIE_RNN") ++recurrent;

    if (recurrent > 0) {
      if (recurrent > 1 || layers.size() != 2 || (layers[0].type != "EIIE_LSTM" && layers[0].type != "EIIE_RNN"))
        throw config_error("topology: recurrent stacks must be exactly [EIIE_LSTM|EIIE_RNN, EIIE_Output_WithW]");
      if (layers[0].neuron_number <= 0)
        throw config_error("topology: recurrent layer needs a positive neuron_number");
      spec.kind = layers[0].type == "EIIE_LSTM" ? NetKind::lstm : NetKind::rnn;
    } else {
      spec.kind = NetKind::cnn;
      for (size_t i = 0; i + 1 < layers.size(); ++i) {
        const auto& l = layers[i];
        if (l.type == "EIIE_Output_WithW")
          throw config_error("topology: EIIE_Output_WithW must be the final layer");
        if (l.filter_number <= 0)
          throw config_error("topology: layer " + std::to_string(i) + " needs a positive filter_number");
        if (l.type == "ConvLayer") {
          if (l.filter_shape[0] != 1)
            throw config_error("topology: ConvLayer kernels must keep assets independent (filter_shape [1, k])");
          if (l.filter_shape[1] < 1)
            throw config_error("topology: ConvLayer kernel width must be positive");
        }
      }
      if (layers.size() < 2) throw config_error("topology: a scoring layer alone cannot read prices");
    }
    spec.layers = std::move(layers);
    return spec;
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& l : layers) arr.push_back(l.to_json());
    return arr;
  }

  static EiieTopologySpec from_json(const nlohmann::json& arr) {
    if (!arr.is_array()) throw config_error("topology: layers must be an array");
    std::vector<LayerSpec> layers;
    for (size_t i = 0; i < arr.size(); ++i) {
      const auto& j = arr[i];
      LayerSpec l;
      l.type = j.value("type", "");
      l.filter_number = j.value("filter_number", 0);
      l.neuron_number = j.value("neuron_number", 0);
      if (j.contains("filter_shape")) {
        auto fs = j.at("filter_shape").get<std::vector<int>>();
        if (fs.size() != 2)
          throw config_error("topology: layer " + std::to_string(i) + " filter_shape must have 2 entries");
        l.filter_shape = {fs[0], fs[1]};
      }
      l.regularizer = j.value("regularizer", "");
      l.weight_decay = j.value("weight_decay", 0.0);
      layers.push_back(std::move(l));
    }
    return from_layers(std::move(layers));
  }
};

}  // namespace portlab::policy
