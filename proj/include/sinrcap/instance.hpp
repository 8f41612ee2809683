// SPDX-License-Identifier: Apache-2.0
//
// Capacity-problem instances: n links with fixed transmission powers, an
// arbitrary positive gain matrix, ambient noise and a SINR threshold.
// The derived coefficient matrix g is the only thing the feasibility and
// SDP machinery ever look at:
//   g_vv = P_v * G_vv - beta * N      (noise-adjusted self signal)
//   g_vw = P_w * G_vw  for v != w     (interference at receiver v from sender w)
#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace sinrcap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Set of link indices, kept sorted ascending and duplicate-free.
using IndexSet = std::vector<int>;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Instance {
  int n = 0;
  double beta = 1.0;
  double noise = 0.0;
  Vector powers;  // length n, strictly positive
  Matrix gain;    // n x n, strictly positive; gain(w, v) = gain from sender v to receiver w
  nlohmann::json meta;  // free-form (planted set, geometry, generator parameters)

  // Throws std::invalid_argument on any violated invariant.
  void validate() const {
    if (n < 1) throw std::invalid_argument("instance: n must be >= 1");
    if (!(beta > 0.0)) throw std::invalid_argument("instance: beta must be > 0");
    if (!(noise >= 0.0)) throw std::invalid_argument("instance: noise must be >= 0");
    if (powers.size() != n) throw std::invalid_argument("instance: powers must have length n");
    if (gain.rows() != n || gain.cols() != n)
      throw std::invalid_argument("instance: gain must be n x n");
    for (int v = 0; v < n; ++v) {
      if (!(powers[v] > 0.0) || !std::isfinite(powers[v]))
        throw std::invalid_argument("instance: powers[" + std::to_string(v) +
                                    "] must be finite and > 0");
    }
    for (int w = 0; w < n; ++w) {
      for (int v = 0; v < n; ++v) {
        if (!(gain(w, v) > 0.0) || !std::isfinite(gain(w, v)))
          throw std::invalid_argument("instance: gain[" + std::to_string(w) + "][" +
                                      std::to_string(v) + "] must be finite and > 0");
      }
    }
  }
};

struct EffectiveCoeffs {
  int n = 0;
  double beta = 1.0;  // carried along; feasibility checks apply it exactly once
  Matrix g;           // row v = receiver v; diagonal may be negative when beta*N > P_v*G_vv

  bool never_feasible(int v) const { return g(v, v) < 0.0; }
};

inline EffectiveCoeffs derive_coeffs(const Instance& inst) {
  inst.validate();
  EffectiveCoeffs coeffs;
  coeffs.n = inst.n;
  coeffs.beta = inst.beta;
  coeffs.g.resize(inst.n, inst.n);
  for (int v = 0; v < inst.n; ++v) {
    for (int w = 0; w < inst.n; ++w) {
      coeffs.g(v, w) = v == w ? inst.powers[v] * inst.gain(v, v) - inst.beta * inst.noise
                              : inst.powers[w] * inst.gain(v, w);
    }
  }
  return coeffs;
}

enum class PowerMode { kUniform, kMean };

inline std::string to_string(PowerMode mode) {
  return mode == PowerMode::kUniform ? "uniform" : "mean";
}

inline PowerMode power_mode_from_string(const std::string& name) {
  if (name == "uniform") return PowerMode::kUniform;
  if (name == "mean") return PowerMode::kMean;
  throw std::invalid_argument("unknown power mode '" + name + "' (expected uniform|mean)");
}

struct GeometricParams {
  int n = 0;
  double box_side = 450.0;
  double offset_range = 20.0;
  double alpha = 2.5;
  PowerMode power_mode = PowerMode::kUniform;
  double beta = 1.0;
  double noise = 0.0;

  void validate() const {
    if (n < 1) throw std::invalid_argument("geometric params: n must be >= 1");
    if (!(box_side > 0.0)) throw std::invalid_argument("geometric params: box_side must be > 0");
    if (!(offset_range > 0.0))
      throw std::invalid_argument("geometric params: offset_range must be > 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("geometric params: alpha must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("geometric params: beta must be > 0");
    if (!(noise >= 0.0)) throw std::invalid_argument("geometric params: noise must be >= 0");
  }
};

struct PlantedParams {
  GeometricParams geometric;  // geometric.n is the planted core size
  int n_total = 0;
  double kappa = 1000.0;  // filler gain entries are iid uniform on (0, kappa]

  void validate() const {
    geometric.validate();
    if (n_total < geometric.n)
      throw std::invalid_argument("planted params: n_total must be >= core size");
    if (!(kappa > 0.0)) throw std::invalid_argument("planted params: kappa must be > 0");
  }
};

// ---------------------------------------------------------------------------
// JSON file format. Top-level object:
//   { "n": int, "beta": num, "noise": num,
//     "powers": [num x n], "gain": [[num x n] x n], "meta": {...}? }
// Row w of "gain" is receiver w. Doubles round-trip exactly.
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const Instance& inst) {
  nlohmann::json j;
  j["n"] = inst.n;
  j["beta"] = inst.beta;
  j["noise"] = inst.noise;
  j["powers"] = std::vector<double>(inst.powers.data(), inst.powers.data() + inst.n);
  nlohmann::json rows = nlohmann::json::array();
  for (int w = 0; w < inst.n; ++w) {
    nlohmann::json row = nlohmann::json::array();
    for (int v = 0; v < inst.n; ++v) row.push_back(inst.gain(w, v));
    rows.push_back(std::move(row));
  }
  j["gain"] = std::move(rows);
  if (!inst.meta.is_null()) j["meta"] = inst.meta;
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  Instance inst;
  try {
    if (!j.is_object()) throw ParseError("instance file: top level must be an object");
    inst.n = j.at("n").get<int>();
    if (inst.n < 1) throw ParseError("instance file: \"n\" must be >= 1");
    inst.beta = j.at("beta").get<double>();
    inst.noise = j.at("noise").get<double>();
    const auto& powers = j.at("powers");
    if (!powers.is_array() || static_cast<int>(powers.size()) != inst.n)
      throw ParseError("instance file: \"powers\" must be an array of n numbers");
    inst.powers.resize(inst.n);
    for (int v = 0; v < inst.n; ++v) inst.powers[v] = powers.at(v).get<double>();
    const auto& gain = j.at("gain");
    if (!gain.is_array() || static_cast<int>(gain.size()) != inst.n)
      throw ParseError("instance file: \"gain\" must be an array of n rows");
    inst.gain.resize(inst.n, inst.n);
    for (int w = 0; w < inst.n; ++w) {
      const auto& row = gain.at(w);
      if (!row.is_array() || static_cast<int>(row.size()) != inst.n)
        throw ParseError("instance file: \"gain\" row " + std::to_string(w) +
                         " must have n entries");
      for (int v = 0; v < inst.n; ++v) inst.gain(w, v) = row.at(v).get<double>();
    }
    if (j.contains("meta")) inst.meta = j.at("meta");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("instance file: ") + e.what());
  }
  try {
    inst.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return inst;
}

inline Instance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return instance_from_json(j);
}

inline void write_instance(const Instance& inst, const std::string& path) {
  inst.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << to_json(inst).dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace sinrcap
